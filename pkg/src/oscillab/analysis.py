"""Weighted Birkhoff averaging and empirical stability probes.

The disjointness engine streams one orbit, accumulates the weighted
average of an observable with compensated summation, and classifies the
decay of the checkpointed magnitudes.  Companion probes measure
mean-equicontinuity responses, bad-time densities, periodic shadowing,
and orbit autocorrelations (the Fourier coefficients of the spectral
measure of the observable).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigvalsh, toeplitz

from .flows import Flow, Observable
from .sequences import KahanSum, WeightSequence, cesaro_mean

# verdict thresholds: empirical separation between the decaying examples
# and the exact stagnant counterexample; configuration, not truth
DECAY_SLOPE = -0.1
STAGNANT_SLOPE = -0.02
DECAY_FINAL_LEVEL = 0.05


def default_checkpoints(n_max: int) -> list[int]:
    """Half-decade grid 100, 316, 1000, ... capped at n_max."""
    points = []
    k = 4
    while True:
        n = round(10 ** (k / 2))
        if n >= n_max:
            break
        if n >= 100:
            points.append(n)
        k += 1
    points.append(n_max)
    return points


@dataclass(frozen=True)
class DisjointnessReport:
    """Checkpointed weighted Birkhoff averages and their decay verdict."""

    sequence: str
    flow: str
    observable: str
    start: str
    checkpoints: tuple[tuple[int, complex], ...]
    decay_slope: float
    verdict: str  # 'decaying' | 'stagnant' | 'inconclusive'
    limit_estimate: complex | None
    sup_observed: float

    def final_value(self) -> complex:
        return self.checkpoints[-1][1]

    def to_json_dict(self) -> dict:
        return {
            "sequence": self.sequence,
            "flow": self.flow,
            "observable": self.observable,
            "start": self.start,
            "checkpoints": [
                {"N": n, "re": s.real, "im": s.imag} for n, s in self.checkpoints
            ],
            "slope": self.decay_slope,
            "verdict": self.verdict,
        }


def weighted_birkhoff(
    weights: WeightSequence,
    flow: Flow,
    observable: Observable,
    start,
    checkpoints=None,
) -> DisjointnessReport:
    """Stream (1/N) sum c_n f(T^n x) and classify its decay.

    The verdict fits the slope of log |S_N| against log N over the last
    half of the checkpoints: clearly negative slope with a small final
    level reads 'decaying', a flat tail reads 'stagnant', anything else is
    'inconclusive'.
    """
    if checkpoints is None:
        checkpoints = default_checkpoints(len(weights))
    checkpoints = [int(n) for n in checkpoints]
    if any(b <= a for a, b in zip(checkpoints, checkpoints[1:])):
        raise ValueError("checkpoints must be strictly increasing")
    if checkpoints[0] < 1 or checkpoints[-1] > len(weights):
        raise ValueError("checkpoints must lie in 1..len(weights)")
    acc = KahanSum()
    x = start
    sup_observed = 0.0
    recorded: list[tuple[int, complex]] = []
    next_idx = 0
    values = weights.values
    for n in range(1, checkpoints[-1] + 1):
        x = flow.step(x)
        fx = complex(observable.eval(x))
        mag = abs(fx)
        if mag > sup_observed:
            sup_observed = mag
        acc.add(values[n - 1] * fx)
        if n == checkpoints[next_idx]:
            recorded.append((n, acc.value / n))
            next_idx += 1
    slope = _fit_tail_slope(recorded)
    final_mag = abs(recorded[-1][1])
    if slope < DECAY_SLOPE and final_mag < DECAY_FINAL_LEVEL * weights.growth_bound * max(
        sup_observed, 1e-300
    ):
        verdict = "decaying"
        limit = None
    elif slope > STAGNANT_SLOPE:
        verdict = "stagnant"
        limit = recorded[-1][1]
    else:
        verdict = "inconclusive"
        limit = None
    return DisjointnessReport(
        sequence=weights.name,
        flow=flow.name,
        observable=observable.name,
        start=repr(start),
        checkpoints=tuple(recorded),
        decay_slope=slope,
        verdict=verdict,
        limit_estimate=limit,
        sup_observed=sup_observed,
    )


def _fit_tail_slope(recorded) -> float:
    tail = recorded[len(recorded) // 2 :]
    if len(tail) < 2:
        tail = recorded
    if len(tail) < 2:
        return 0.0  # a single checkpoint carries no decay evidence
    logs_n = np.log([n for n, _ in tail])
    logs_s = np.log([max(abs(s), 1e-300) for _, s in tail])
    slope, _ = np.polyfit(logs_n, logs_s, 1)
    return float(slope)


# ----------------------------------------------------------------------
# stability probes

def mean_equicontinuity_probe(flow: Flow, pairs, n_steps: int) -> float:
    """Worst prefix-Cesaro orbit distance over the supplied close pairs."""
    worst = 0.0
    for x, y in pairs:
        u, v = x, y
        total = 0.0
        for _ in range(n_steps):
            u = flow.step(u)
            v = flow.step(v)
            total += flow.dist(u, v)
        worst = max(worst, total / n_steps)
    return worst


def mean_equicontinuity_curve(
    flow: Flow, pair_sampler, deltas, n_steps_for, n_pairs: int = 8, seed: int = 0
):
    """Response curve delta -> worst Cesaro distance.

    ``pair_sampler(delta, rng)`` yields one close pair; ``n_steps_for``
    maps delta to the averaging horizon (longer horizons are needed at
    small separations to see genuine non-collapse).
    """
    rng = np.random.default_rng(seed)
    curve = []
    for delta in deltas:
        pairs = [pair_sampler(delta, rng) for _ in range(n_pairs)]
        curve.append((delta, mean_equicontinuity_probe(flow, pairs, n_steps_for(delta))))
    return curve


@dataclass(frozen=True)
class DensityEstimate:
    """Bad-time counts along prefixes and the resulting upper density."""

    bad_counts: tuple[tuple[int, int], ...]
    upper_density: float


def mls_bad_density(
    flow: Flow, x, y, eps: float, n_steps: int, burn_in_fraction: float = 0.1
) -> DensityEstimate:
    """Density of times with d(T^n x, T^n y) >= eps, tracked along prefixes."""
    checkpoints = default_checkpoints(n_steps)
    u, v = x, y
    bad = 0
    recorded = []
    next_idx = 0
    for n in range(1, n_steps + 1):
        u = flow.step(u)
        v = flow.step(v)
        if flow.dist(u, v) >= eps:
            bad += 1
        if n == checkpoints[next_idx]:
            recorded.append((n, bad))
            next_idx += 1
    burn_in = burn_in_fraction * n_steps
    rates = [c / n for n, c in recorded if n >= burn_in] or [
        recorded[-1][1] / recorded[-1][0]
    ]
    return DensityEstimate(bad_counts=tuple(recorded), upper_density=max(rates))


def mean_attraction_test(flow: Flow, x, z, n_steps: int) -> float:
    """(1/N) sum_{n<=N} d(T^n x, T^n z)."""
    u, v = x, z
    total = 0.0
    for _ in range(n_steps):
        u = flow.step(u)
        v = flow.step(v)
        total += flow.dist(u, v)
    return total / n_steps


def shadow_periodic(
    flow: Flow, x, eps: float, horizon: int, max_period: int = 64
):
    """Find (tau, phase) so the orbit eps-shadows a periodic cycle from tau on.

    The candidate cycle is read off the orbit tail; the shadowing claim is
    verified at every time up to the horizon.  Returns None when no
    periodic cycle shadows the orbit at this eps (e.g. irrational
    rotations).
    """
    points = [x]
    u = x
    for _ in range(horizon):
        u = flow.step(u)
        points.append(u)
    period = None
    for p in range(1, max_period + 1):
        tail_ok = all(
            flow.dist(points[-1 - m], points[-1 - m - p]) < eps / 4.0
            for m in range(min(2 * p, horizon - p))
        )
        if tail_ok:
            period = p
            break
    if period is None:
        return None
    cycle = points[-period:]
    # phase alignment: points[horizon] corresponds to cycle[period-1]
    def cycle_at(n: int):
        return cycle[(period - 1 + n - horizon) % period]

    bad_last = 0
    for n in range(horizon + 1):
        if flow.dist(points[n], cycle_at(n)) >= eps:
            bad_last = n + 1
    if bad_last > horizon - 4 * period:
        return None  # drift persists to the end: not genuine shadowing
    tau = bad_last
    phase = (period - 1 + tau - horizon) % period
    return tau, phase


# ----------------------------------------------------------------------
# spectral measure diagnostics

def autocorrelation_spectrum(
    flow: Flow, observable: Observable, start, n_lags: int, n_terms: int
) -> np.ndarray:
    """gamma(k) = (1/N) sum f(T^(n+k) x) conj(f(T^n x)) for k = 0..n_lags.

    These are the Fourier coefficients of the observable's spectral
    measure.  The orbit is streamed in blocks; only a lag window of
    observable values is carried across blocks.
    """
    if n_terms <= n_lags:
        raise ValueError("need n_terms > n_lags")
    block_size = 1 << 15
    acc = np.zeros(n_lags + 1, dtype=complex)
    carry = np.empty(0, dtype=complex)
    x = start
    produced = 0  # observable values emitted so far; value index n runs 1..N+K
    total = n_terms + n_lags
    while produced < total:
        count = min(block_size, total - produced)
        block = np.empty(count, dtype=complex)
        for i in range(count):
            x = flow.step(x)
            block[i] = observable.eval(x)
        ext = np.concatenate([carry, block])
        base = produced - len(carry)  # ext[i] holds the value with index base+i+1
        for k in range(n_lags + 1):
            # each pair (n, n+k) is charged to the block holding index n+k
            lo = max(len(carry), k)
            hi = min(len(ext), n_terms + k - base)  # n = base+i+1-k must stay <= N
            if hi <= lo:
                continue
            acc[k] += np.vdot(ext[lo - k : hi - k], ext[lo:hi])
        carry = ext[len(ext) - n_lags :] if n_lags else np.empty(0, dtype=complex)
        produced += count
    return acc / n_terms


def autocorrelation_toeplitz(gamma: np.ndarray) -> np.ndarray:
    """Hermitian Toeplitz matrix of the autocorrelations."""
    return toeplitz(np.conj(gamma), gamma)


def toeplitz_min_eigenvalue(gamma: np.ndarray) -> float:
    """Smallest eigenvalue of the autocorrelation Toeplitz matrix."""
    return float(eigvalsh(autocorrelation_toeplitz(gamma))[0])


def rotation_trig_autocorrelation(coeffs: dict[int, complex], angle: float, lags) -> np.ndarray:
    """Closed-form gamma(k) = sum |a_m|^2 e^{2 pi i m angle k} for trig observables."""
    return np.array(
        [
            sum(abs(a) ** 2 * cmath.exp(2j * math.pi * m * angle * k) for m, a in coeffs.items())
            for k in np.atleast_1d(lags)
        ]
    )


# ----------------------------------------------------------------------
# spectral-support gate

@dataclass(frozen=True)
class HookedReport:
    atom_means: dict
    spectral_clear: bool
    birkhoff: DisjointnessReport
    verdict: str  # 'supported' | 'resonant' | 'mixed'


def hooked_disjointness(
    weights: WeightSequence,
    flow: Flow,
    observable: Observable,
    start,
    support_atoms,
    atom_level: float = 0.05,
    checkpoints=None,
) -> HookedReport:
    """Check the sequence's Cesaro means at candidate spectral atoms, then average.

    If every atom mean is small the decay hypothesis applies and the
    Birkhoff average should decay ('supported'); a resonant atom paired
    with a stagnant average is 'resonant'; disagreement is 'mixed'.
    """
    atom_means = {t: cesaro_mean(weights, float(t)) for t in support_atoms}
    spectral_clear = all(abs(v) < atom_level for v in atom_means.values())
    report = weighted_birkhoff(weights, flow, observable, start, checkpoints)
    if spectral_clear and report.verdict == "decaying":
        verdict = "supported"
    elif not spectral_clear and report.verdict == "stagnant":
        verdict = "resonant"
    else:
        verdict = "mixed"
    return HookedReport(
        atom_means=atom_means,
        spectral_clear=spectral_clear,
        birkhoff=report,
        verdict=verdict,
    )


# ----------------------------------------------------------------------
# averaged Holder bound

def holder_defect(
    weights: WeightSequence,
    flow: Flow,
    observable: Observable,
    x,
    y,
    n_terms: int,
) -> float:
    """|S_N f(x) - S_N f(y)| minus its averaged Holder bound (<= 0 up to rounding).

    The bound is growth_bound * ((1/N) sum |f(T^n x) - f(T^n y)|^q)^(1/q)
    with q conjugate to the growth exponent.
    """
    q = weights.growth_exponent / (weights.growth_exponent - 1.0)
    acc_x = KahanSum()
    acc_y = KahanSum()
    diff_sum = 0.0
    u, v = x, y
    values = weights.values
    for n in range(1, n_terms + 1):
        u = flow.step(u)
        v = flow.step(v)
        fu = complex(observable.eval(u))
        fv = complex(observable.eval(v))
        acc_x.add(values[n - 1] * fu)
        acc_y.add(values[n - 1] * fv)
        diff_sum += abs(fu - fv) ** q
    lhs = abs(acc_x.value - acc_y.value) / n_terms
    rhs = weights.growth_bound * (diff_sum / n_terms) ** (1.0 / q)
    return lhs - rhs
