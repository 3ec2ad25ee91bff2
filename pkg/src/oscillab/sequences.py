"""Weight sequences and their averaged Fourier spectra.

Generators for the arithmetic and phase sequences used throughout the
package (Mobius, Liouville, quadratic and polynomial phases, random
subnormal weights), together with the Cesaro-mean machinery that locates
where a sequence's averaged Fourier mass survives.  Quadratic-phase
sequences with rational parameter get their spectrum computed exactly via
cyclotomic integer arithmetic; everything else is measured numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .cyclotomic import root_sum_is_zero, root_sum_value

_BLOCK = 1 << 16


class KahanSum:
    """Compensated complex accumulator (Kahan-Babuska)."""

    __slots__ = ("_total", "_comp")

    def __init__(self) -> None:
        self._total = 0j
        self._comp = 0j

    def add(self, value: complex) -> None:
        y = value - self._comp
        t = self._total + y
        self._comp = (t - self._total) - y
        self._total = t

    @property
    def value(self) -> complex:
        return self._total


def prefix_growth_bound(values: np.ndarray, growth_exponent: float) -> float:
    """sup over prefixes N of ((1/N) sum_{n<=N} |c_n|^exponent)^(1/exponent)."""
    mags = np.abs(values) ** growth_exponent
    prefix = np.cumsum(mags) / np.arange(1, len(values) + 1)
    return float(np.max(prefix) ** (1.0 / growth_exponent))


@dataclass(frozen=True, eq=False)
class WeightSequence:
    """Complex weights c_1..c_N plus their averaged-growth metadata.

    ``growth_bound`` is recomputed from the stored values on construction,
    so it is always the exact prefix supremum for ``growth_exponent``.
    """

    name: str
    values: np.ndarray
    growth_exponent: float
    growth_bound: float = field(init=False)

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.complex128)
        if values.ndim != 1 or len(values) < 1:
            raise ValueError("values must be a non-empty 1-d array")
        if not np.all(np.isfinite(values)):
            raise ValueError("weight values must be finite")
        if not self.growth_exponent > 1.0:
            raise ValueError("growth_exponent must be > 1")
        object.__setattr__(self, "values", values)
        object.__setattr__(
            self, "growth_bound", prefix_growth_bound(values, self.growth_exponent)
        )

    def __len__(self) -> int:
        return len(self.values)

    def __repr__(self) -> str:
        return f"WeightSequence({self.name}, n={len(self)})"


@dataclass(frozen=True)
class SpectrumReport:
    """Cesaro means over a frequency grid."""

    grid: np.ndarray
    sigma: np.ndarray
    n_terms: int
    max_abs: float


# ----------------------------------------------------------------------
# arithmetic sequences

def _prime_sieve(n_max: int) -> np.ndarray:
    sieve = np.ones(n_max + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(n_max) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.flatnonzero(sieve)


def mobius(n_max: int) -> np.ndarray:
    """Mobius function mu(1)..mu(n_max) by a multiplicative sieve."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    mu = np.ones(n_max + 1, dtype=np.int64)
    for p in _prime_sieve(n_max):
        mu[p::p] *= -1
        sq = int(p) * int(p)
        if sq <= n_max:
            mu[sq::sq] = 0
    return mu[1:]


def liouville(n_max: int) -> np.ndarray:
    """Liouville function (-1)^Omega(n) for n = 1..n_max."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    omega = np.zeros(n_max + 1, dtype=np.int64)
    for p in _prime_sieve(n_max):
        pk = int(p)
        while pk <= n_max:
            omega[pk::pk] += 1
            pk *= int(p)
    return np.where(omega[1:] % 2 == 0, 1, -1).astype(np.int64)


def mobius_sequence(n_terms: int) -> WeightSequence:
    return WeightSequence("mobius", mobius(n_terms).astype(np.complex128), 2.0)


def liouville_sequence(n_terms: int) -> WeightSequence:
    return WeightSequence("liouville", liouville(n_terms).astype(np.complex128), 2.0)


# ----------------------------------------------------------------------
# phase sequences

def _quadratic_phases(alpha, n_terms: int) -> np.ndarray:
    """Fractional parts of n^2 * alpha for n = 1..n_terms.

    Rational alpha is reduced in exact integer arithmetic; irrational alpha
    uses extended precision so the reduction stays accurate for n up to 1e7.
    """
    if isinstance(alpha, Fraction):
        numer, denom = alpha.numerator, alpha.denominator
        n = np.arange(1, n_terms + 1, dtype=np.int64)
        if n_terms**2 * abs(numer) >= 2**62:
            n = n.astype(object)  # exact big-int path for extreme sizes
        return (((n * n * numer) % denom) / float(denom)).astype(np.float64)
    n = np.arange(1, n_terms + 1, dtype=np.longdouble)
    return np.mod(n * n * np.longdouble(alpha), 1.0).astype(np.float64)


def _polynomial_phases(coeffs, n_terms: int) -> np.ndarray:
    """Fractional parts of P(n) for n = 1..n_terms by forward differences.

    The difference table keeps every intermediate in [0, 1), so rounding
    grows only linearly in n instead of with the magnitude of P(n).
    """
    coeffs = [float(c) for c in coeffs]
    deg = len(coeffs) - 1
    init = []
    for n in range(1, deg + 2):
        acc = np.longdouble(0.0)
        for c in reversed(coeffs):
            acc = acc * n + np.longdouble(c)
        init.append(acc)
    # forward-difference table of order deg, reduced mod 1
    diffs = [np.array(init, dtype=np.longdouble)]
    for _ in range(deg):
        diffs.append(np.diff(diffs[-1]))
    state = [float(np.mod(d[0], 1.0)) for d in diffs]
    out = np.empty(n_terms)
    for k in range(n_terms):
        out[k] = state[0]
        for j in range(deg):
            state[j] = (state[j] + state[j + 1]) % 1.0
    return out


def phase_sequence(kind: str, n_terms: int, **params) -> WeightSequence:
    """Unimodular phase sequences exp(2 pi i phi(n)).

    kind 'n_log_n' takes ``c`` (phi = c n log n); 'quadratic' takes
    ``alpha`` (phi = n^2 alpha, Fraction allowed for exact reduction);
    'polynomial' takes ``coeffs`` ascending (phi = P(n)).
    """
    if n_terms < 1:
        raise ValueError("n_terms must be >= 1")
    if kind == "n_log_n":
        c = float(params.pop("c"))
        n = np.arange(1, n_terms + 1, dtype=np.float64)
        phases = np.mod(c * n * np.log(n), 1.0)
        name = f"n_log_n(c={c:g})"
    elif kind == "quadratic":
        alpha = params.pop("alpha")
        phases = _quadratic_phases(alpha, n_terms)
        name = f"quadratic(alpha={alpha})"
    elif kind == "polynomial":
        coeffs = list(params.pop("coeffs"))
        phases = _polynomial_phases(coeffs, n_terms)
        name = f"polynomial({coeffs})"
    else:
        raise ValueError(f"unknown phase kind {kind!r}")
    if params:
        raise TypeError(f"unexpected parameters {sorted(params)}")
    values = np.exp(2j * np.pi * phases)
    return WeightSequence(name, values, 2.0)


def subnormal_sequence(tau: float, n_terms: int, seed: int) -> WeightSequence:
    """Random weights n^tau * xi_n with fair-coin signs xi_n from ``seed``."""
    if not 0.0 < tau < 0.5:
        raise ValueError("tau must lie in (0, 1/2)")
    rng = np.random.default_rng(seed)
    signs = rng.integers(0, 2, size=n_terms) * 2 - 1
    n = np.arange(1, n_terms + 1, dtype=np.float64)
    values = (n**tau * signs).astype(np.complex128)
    return WeightSequence(f"subnormal(tau={tau:g}, seed={seed})", values, 2.0)


# ----------------------------------------------------------------------
# Cesaro means and spectra

def cesaro_mean(weights: WeightSequence, freq: float, n_terms: int | None = None) -> complex:
    """(1/N) sum_{n<=N} c_n exp(-2 pi i n freq), block-compensated."""
    n_total = len(weights)
    if n_terms is None:
        n_terms = n_total
    if not 1 <= n_terms <= n_total:
        raise ValueError(f"n_terms must be in 1..{n_total}")
    acc = KahanSum()
    for start in range(0, n_terms, _BLOCK):
        stop = min(start + _BLOCK, n_terms)
        n = np.arange(start + 1, stop + 1, dtype=np.float64)
        block = weights.values[start:stop] * np.exp((-2j * np.pi * freq) * n)
        acc.add(complex(block.sum()))
    return acc.value / n_terms


def low_denominator_rationals(max_denominator: int = 8) -> list[float]:
    """All r/s in [0,1) with s <= max_denominator, sorted."""
    out = {0.0}
    for s in range(2, max_denominator + 1):
        for r in range(1, s):
            out.add(r / s)
    return sorted(out)


def zero_set_scan(
    weights: WeightSequence,
    grid_size: int = 512,
    n_terms: int | None = None,
    include_low_rationals: bool = True,
) -> SpectrumReport:
    """Evaluate the Cesaro mean over a frequency grid and record the peak.

    The uniform grid is augmented with all rationals of denominator <= 8,
    since surviving spectra sit at low-denominator rationals.
    """
    if grid_size < 2:
        raise ValueError("grid_size must be >= 2")
    if n_terms is None:
        n_terms = len(weights)
    grid = set(np.arange(grid_size) / grid_size)
    if include_low_rationals:
        grid.update(low_denominator_rationals())
    grid = np.array(sorted(grid))
    sigma = np.array([cesaro_mean(weights, t, n_terms) for t in grid])
    return SpectrumReport(
        grid=grid,
        sigma=sigma,
        n_terms=n_terms,
        max_abs=float(np.max(np.abs(sigma))),
    )


def quadratic_rational_spectrum(numer: int, denom: int) -> dict[Fraction, complex]:
    """Exact surviving spectrum of the phases exp(2 pi i n^2 numer/denom).

    Candidates are the reduced rationals r/s with s | denom; for each, the
    limit of the Cesaro mean is a root-of-unity sum over one period, which
    is tested for vanishing in exact cyclotomic arithmetic.  Returns the
    non-vanishing frequencies with their limit amplitudes.
    """
    if denom < 1:
        raise ValueError("denominator must be >= 1")
    if not (0 <= numer < denom or (numer, denom) == (0, 1)):
        raise ValueError("require 0 <= numer < denom")
    if math.gcd(numer, denom) != 1:
        raise ValueError("numer and denom must be coprime")
    atoms: dict[Fraction, complex] = {}
    for s in range(1, denom + 1):
        if denom % s != 0:
            continue
        stride = denom // s
        for r in range(s):
            if math.gcd(r, s) != 1:
                continue
            counts = [0] * denom
            for k in range(denom):
                counts[(k * k * numer + k * r * stride) % denom] += 1
            if not root_sum_is_zero(counts, denom):
                atoms[Fraction(r, s)] = root_sum_value(counts, denom) / denom
    return atoms


def quadratic_rational_cesaro(
    numer: int, denom: int, freq: Fraction, n_terms: int
) -> complex:
    """Direct average of exp(2 pi i (n^2 numer/denom - n freq)), exact phases.

    Brute-force companion to ``quadratic_rational_spectrum``: phases are
    reduced with integer arithmetic so the only float work is the final
    root-of-unity sum.
    """
    if freq.denominator > denom or denom % freq.denominator != 0:
        raise ValueError("freq must have denominator dividing denom")
    stride = denom // freq.denominator
    total = KahanSum()
    roots = np.exp(2j * np.pi * np.arange(denom) / denom)
    for start in range(0, n_terms, 1 << 22):
        stop = min(start + (1 << 22), n_terms)
        n = np.arange(start + 1, stop + 1, dtype=np.int64)
        residues = (n * n * numer - n * freq.numerator * stride) % denom
        counts = np.bincount(residues, minlength=denom)
        total.add(complex(np.dot(counts, roots)))
    return total.value / n_terms


def arithmetic_subsequence_mean(
    weights: WeightSequence, modulus: int, residue: int, freq: float, n_terms: int
) -> complex:
    """(1/N) sum over n <= N with n = residue (mod modulus) of c_n e^{-2 pi i n freq}."""
    if modulus < 2:
        raise ValueError("modulus must be >= 2")
    if not 1 <= residue <= modulus:
        raise ValueError("residue must lie in 1..modulus")
    if not 1 <= n_terms <= len(weights):
        raise ValueError("n_terms out of range")
    n = np.arange(residue, n_terms + 1, modulus, dtype=np.int64)
    if len(n) == 0:
        return 0j
    terms = weights.values[n - 1] * np.exp((-2j * np.pi * freq) * n.astype(np.float64))
    return complex(terms.sum()) / n_terms


# ----------------------------------------------------------------------
# Daboussi-Delange partial sums

def _validate_character(chi: np.ndarray) -> int:
    """Check a value table chi[n mod q] is a Dirichlet character; return q."""
    chi = np.asarray(chi, dtype=np.complex128)
    q = len(chi)
    if q < 1:
        raise ValueError("character table must be non-empty")
    for n in range(q):
        coprime = math.gcd(n if n else q, q) == 1
        mag = abs(chi[n % q])
        if coprime and abs(mag - 1.0) > 1e-12:
            raise ValueError(f"character must be unimodular on units (n={n})")
        if not coprime and mag > 1e-12:
            raise ValueError(f"character must vanish off units (n={n})")
    if abs(chi[1 % q] - 1.0) > 1e-12:
        raise ValueError("character must satisfy chi(1) = 1")
    if q <= 512:
        for m in range(q):
            for n in range(q):
                if abs(chi[(m * n) % q] - chi[m] * chi[n]) > 1e-9:
                    raise ValueError("character table is not multiplicative")
    return q


def daboussi_delange_diagnostic(
    f_values: np.ndarray, chi: np.ndarray, u: float, prime_cutoff: int
) -> float:
    """Partial sum over primes p <= cutoff of (1 - Re(chi(p) f(p) p^{-iu})) / p.

    Divergence of the full sum (over all primes, all characters, all u)
    characterizes oscillation for bounded multiplicative f; only the
    partial sum is computable, so this is a diagnostic, not a decision.
    """
    f_values = np.asarray(f_values, dtype=np.complex128)
    if np.max(np.abs(f_values)) > 1.0 + 1e-12:
        raise ValueError("multiplicative input must satisfy |f(n)| <= 1")
    q = _validate_character(chi)
    if prime_cutoff > len(f_values):
        raise ValueError("prime cutoff exceeds the provided range of f")
    chi = np.asarray(chi, dtype=np.complex128)
    terms = []
    for p in _prime_sieve(prime_cutoff):
        p = int(p)
        val = chi[p % q] * f_values[p - 1] * p ** (-1j * u)
        terms.append((1.0 - val.real) / p)
    return math.fsum(terms)


# ----------------------------------------------------------------------
# export

def write_sequence(weights: WeightSequence, path) -> None:
    """One complex value per line, headed by the generator name."""
    with open(path, "w") as fh:
        fh.write(f"# {weights.name}  n={len(weights)}  "
                 f"growth_exponent={weights.growth_exponent:.17g}\n")
        for v in weights.values:
            fh.write(f"{v.real:.17g} {v.imag:.17g}\n")


def write_spectrum_csv(report: SpectrumReport, path) -> None:
    """CSV columns: t, re_sigma, im_sigma, abs_sigma, N."""
    with open(path, "w") as fh:
        fh.write("t,re_sigma,im_sigma,abs_sigma,N\n")
        for t, s in zip(report.grid, report.sigma):
            fh.write(
                f"{t:.17g},{s.real:.17g},{s.imag:.17g},{abs(s):.17g},{report.n_terms}\n"
            )
