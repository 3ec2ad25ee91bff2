"""Fixed-precision p-adic integers, polynomial flows, and the projective line.

Arithmetic is exact modulo p^K, so ultrametric inequalities can be tested
with zero tolerance: a valuation is either known exactly (below K) or the
value is flagged as below working precision.  The spherical metric on the
projective line extends the p-adic norm and certifies the 1-Lipschitz
property of good-reduction rational maps on samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .flows import Flow

DEFAULT_PRECISION = 32

_SMALL_PRIMES = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}


def _check_prime(p: int) -> None:
    if p in _SMALL_PRIMES:
        return
    if p < 2 or any(p % d == 0 for d in range(2, math.isqrt(p) + 1)):
        raise ValueError(f"{p} is not prime")


@dataclass(frozen=True)
class PadicNorm:
    """|x|_p as an exact power of p, or the below-precision marker for 0 mod p^K."""

    p: int
    valuation: int
    below_precision: bool

    @property
    def value(self) -> float:
        return float(self.p) ** (-self.valuation)

    def as_fraction(self) -> Fraction:
        return Fraction(1, self.p**self.valuation)

    def __le__(self, other: "PadicNorm") -> bool:
        return self.valuation >= other.valuation

    def __lt__(self, other: "PadicNorm") -> bool:
        return self.valuation > other.valuation

    def __str__(self) -> str:
        if self.below_precision:
            return f"below precision (<= {self.p}^-{self.valuation})"
        return f"{self.p}^-{self.valuation}"


@dataclass(frozen=True)
class PadicInt:
    """A p-adic integer known exactly modulo p^precision."""

    p: int
    precision: int
    residue: int  # canonical representative in [0, p^precision)

    def __post_init__(self) -> None:
        _check_prime(self.p)
        if self.precision < 1:
            raise ValueError("precision must be >= 1")
        object.__setattr__(self, "residue", self.residue % self.p**self.precision)

    @classmethod
    def from_int(cls, n: int, p: int, precision: int = DEFAULT_PRECISION) -> "PadicInt":
        return cls(p, precision, n)

    @classmethod
    def from_digits(cls, digits, p: int) -> "PadicInt":
        """Least-significant-first base-p digits."""
        digits = [int(d) for d in digits]
        if not digits:
            raise ValueError("need at least one digit")
        if any(not 0 <= d < p for d in digits):
            raise ValueError("digits must lie in [0, p)")
        value = 0
        for d in reversed(digits):
            value = value * p + d
        return cls(p, len(digits), value)

    @property
    def digits(self) -> tuple[int, ...]:
        """Base-p digits, least significant first, exactly ``precision`` of them."""
        out = []
        n = self.residue
        for _ in range(self.precision):
            n, r = divmod(n, self.p)
            out.append(r)
        return tuple(out)

    def _like(self, residue: int) -> "PadicInt":
        return PadicInt(self.p, self.precision, residue)

    def _check_compatible(self, other: "PadicInt") -> None:
        if self.p != other.p or self.precision != other.precision:
            raise ValueError("mixed p-adic rings")

    def __add__(self, other: "PadicInt") -> "PadicInt":
        self._check_compatible(other)
        return self._like(self.residue + other.residue)

    def __sub__(self, other: "PadicInt") -> "PadicInt":
        self._check_compatible(other)
        return self._like(self.residue - other.residue)

    def __mul__(self, other: "PadicInt") -> "PadicInt":
        self._check_compatible(other)
        return self._like(self.residue * other.residue)

    def __neg__(self) -> "PadicInt":
        return self._like(-self.residue)

    def valuation(self) -> int:
        """Index of the first nonzero digit; ``precision`` when 0 mod p^K."""
        if self.residue == 0:
            return self.precision
        v = 0
        n = self.residue
        while n % self.p == 0:
            n //= self.p
            v += 1
        return v

    def is_unit(self) -> bool:
        return self.residue % self.p != 0

    def unit_inverse(self) -> "PadicInt":
        if not self.is_unit():
            raise ZeroDivisionError("not a unit in Z_p")
        return self._like(pow(self.residue, -1, self.p**self.precision))

    def shift_down(self, k: int) -> "PadicInt":
        """Exact division by p^k (requires valuation >= k)."""
        if self.residue % self.p**k != 0:
            raise ValueError("value not divisible by p^k")
        return self._like(self.residue // self.p**k)

    def norm(self) -> PadicNorm:
        v = self.valuation()
        return PadicNorm(self.p, v, below_precision=v >= self.precision)

    def __str__(self) -> str:
        return f"{self.residue} (mod {self.p}^{self.precision})"


def padic_norm(x: PadicInt) -> PadicNorm:
    """|x|_p = p^(-v) with v the index of the first nonzero digit."""
    return x.norm()


def padic_dist(x: PadicInt, y: PadicInt) -> float:
    return (x - y).norm().value


# ----------------------------------------------------------------------
# polynomials and flows on Z_p

@dataclass(frozen=True)
class PadicPoly:
    """Polynomial with Z_p coefficients, evaluated exactly mod p^precision."""

    coefficients: tuple[PadicInt, ...]

    def __post_init__(self) -> None:
        if not self.coefficients:
            raise ValueError("need at least one coefficient")
        p = self.coefficients[0].p
        prec = self.coefficients[0].precision
        for c in self.coefficients:
            if c.p != p or c.precision != prec:
                raise ValueError("mixed p-adic rings in coefficients")
        object.__setattr__(self, "coefficients", tuple(self.coefficients))

    @classmethod
    def from_ints(cls, coeffs, p: int, precision: int = DEFAULT_PRECISION) -> "PadicPoly":
        return cls(tuple(PadicInt.from_int(int(c), p, precision) for c in coeffs))

    @property
    def p(self) -> int:
        return self.coefficients[0].p

    @property
    def precision(self) -> int:
        return self.coefficients[0].precision

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, x: PadicInt) -> PadicInt:
        acc = PadicInt(self.p, self.precision, 0)
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    def __str__(self) -> str:
        return " + ".join(
            f"{c.residue}*x^{k}" for k, c in enumerate(self.coefficients) if c.residue
        ) or "0"


@dataclass(frozen=True)
class PadicPolyFlow(Flow):
    poly: PadicPoly | None = None


def random_padic_int(rng: np.random.Generator, p: int, precision: int) -> PadicInt:
    digits = rng.integers(0, p, size=precision)
    return PadicInt.from_digits([int(d) for d in digits], p)


def poly_flow(poly: PadicPoly) -> PadicPolyFlow:
    """The flow x -> P(x) on Z_p with metric |x - y|_p.

    Integral polynomials are automatically 1-Lipschitz for the p-adic
    metric, hence equicontinuous.
    """
    p, precision = poly.p, poly.precision

    def sample(rng):
        return random_padic_int(rng, p, precision)

    return PadicPolyFlow(
        name=f"padic_poly(p={p}, {poly})",
        step=poly,
        dist=padic_dist,
        sample=sample,
        lipschitz_one=True,
        poly=poly,
    )


def adding_machine(p: int, precision: int = DEFAULT_PRECISION) -> PadicPolyFlow:
    """x -> x + 1 on Z_p: a minimal isometry (the odometer)."""
    poly = PadicPoly.from_ints([1, 1], p, precision)
    flow = poly_flow(poly)
    return PadicPolyFlow(
        name=f"adding_machine(p={p})",
        step=flow.step,
        dist=flow.dist,
        sample=flow.sample,
        isometric=True,
        lipschitz_one=True,
        poly=poly,
    )


# ----------------------------------------------------------------------
# projective line

@dataclass(frozen=True)
class ProjPoint:
    """[x : y] on the projective line, normalized so max(|x|_p, |y|_p) = 1."""

    x: PadicInt
    y: PadicInt

    def __post_init__(self) -> None:
        self.x._check_compatible(self.y)
        if min(self.x.valuation(), self.y.valuation()) != 0:
            raise ValueError("point must be normalized: one coordinate must be a unit")

    @classmethod
    def make(cls, x: PadicInt, y: PadicInt) -> "ProjPoint":
        """Normalize [x : y] by dividing out the common power of p."""
        x._check_compatible(y)
        shift = min(x.valuation(), y.valuation())
        if shift >= x.precision:
            raise ValueError("zero pair (both coordinates below precision)")
        return cls(x.shift_down(shift), y.shift_down(shift))

    @classmethod
    def from_ints(cls, x: int, y: int, p: int, precision: int = DEFAULT_PRECISION) -> "ProjPoint":
        return cls.make(PadicInt.from_int(x, p, precision), PadicInt.from_int(y, p, precision))

    @classmethod
    def infinity(cls, p: int, precision: int = DEFAULT_PRECISION) -> "ProjPoint":
        return cls.from_ints(1, 0, p, precision)

    def cross(self, other: "ProjPoint") -> PadicInt:
        return self.x * other.y - self.y * other.x

    def projectively_equal(self, other: "ProjPoint") -> bool:
        """Equality as projective points, up to working precision."""
        return self.cross(other).norm().below_precision

    def __str__(self) -> str:
        return f"[{self.x.residue} : {self.y.residue}]"


def spherical_dist(u: ProjPoint, v: ProjPoint) -> PadicNorm:
    """|x1 y2 - x2 y1|_p over the (unit) coordinate norms of normalized points."""
    return u.cross(v).norm()


def spherical_dist_value(u: ProjPoint, v: ProjPoint) -> float:
    return spherical_dist(u, v).value


# ----------------------------------------------------------------------
# rational flows with good reduction

def _homogenize(num: PadicPoly, den: PadicPoly) -> tuple[list[PadicInt], list[PadicInt], int]:
    deg = max(num.degree, den.degree)
    zero = PadicInt(num.p, num.precision, 0)
    nc = list(num.coefficients) + [zero] * (deg - num.degree)
    dc = list(den.coefficients) + [zero] * (deg - den.degree)
    return nc, dc, deg


def _eval_homogeneous(coeffs, x: PadicInt, y: PadicInt, deg: int) -> PadicInt:
    """sum coeffs[i] x^i y^(deg - i), exact mod p^precision."""
    acc = PadicInt(x.p, x.precision, 0)
    xp = PadicInt(x.p, x.precision, 1)
    powers = []
    for _ in range(deg + 1):
        powers.append(xp)
        xp = xp * x
    yp = PadicInt(x.p, x.precision, 1)
    for i in range(deg, -1, -1):
        acc = acc + coeffs[i] * powers[i] * yp
        yp = yp * y
    return acc


@dataclass(frozen=True)
class PadicRationalFlow(Flow):
    numerator: PadicPoly | None = None
    denominator: PadicPoly | None = None


def rational_flow(
    num: PadicPoly,
    den: PadicPoly,
    *,
    check_pairs: int = 128,
    seed: int = 20210331,
) -> PadicRationalFlow:
    """Flow of a rational map on the projective line, declared good reduction.

    Good reduction is a hypothesis supplied by the caller; the constructor
    spot-checks the resulting 1-Lipschitz property on sampled pairs and
    refuses to build the flow if a violation shows up.
    """
    if num.p != den.p or num.precision != den.precision:
        raise ValueError("numerator and denominator live in different rings")
    p, precision = num.p, num.precision
    nc, dc, deg = _homogenize(num, den)

    def step(point: ProjPoint) -> ProjPoint:
        fx = _eval_homogeneous(nc, point.x, point.y, deg)
        fy = _eval_homogeneous(dc, point.x, point.y, deg)
        if min(fx.valuation(), fy.valuation()) >= precision:
            raise ArithmeticError(
                "image fell below working precision; raise precision or "
                "check the declared reduction"
            )
        return ProjPoint.make(fx, fy)

    def sample(rng) -> ProjPoint:
        a = random_padic_int(rng, p, precision)
        if rng.random() < 0.5:
            return ProjPoint.make(a, PadicInt.from_int(1, p, precision))
        b = random_padic_int(rng, p, precision)
        try:
            return ProjPoint.make(PadicInt.from_int(1, p, precision), a * b)
        except ValueError:
            return ProjPoint.infinity(p, precision)

    flow = PadicRationalFlow(
        name=f"padic_rational(p={p}, ({num})/({den}))",
        step=step,
        dist=lambda u, v: spherical_dist_value(u, v),
        sample=sample,
        lipschitz_one=True,
        numerator=num,
        denominator=den,
    )
    rng = np.random.default_rng(seed)
    for _ in range(check_pairs):
        u, v = sample(rng), sample(rng)
        before = spherical_dist(u, v)
        after = spherical_dist(step(u), step(v))
        if after.valuation < before.valuation:
            raise ValueError(
                f"sampled pair violates the 1-Lipschitz bound "
                f"(rho before={before}, after={after}); bad reduction?"
            )
    return flow


# ----------------------------------------------------------------------
# empirical minimality probe

@dataclass(frozen=True)
class MinimalityProbe:
    """Visit counts of an orbit at resolution p^level, versus the reduced cycle."""

    level: int
    histogram: dict[int, int]
    reduced_cycle: frozenset[int]
    covers_component: bool


def empirical_minimality(flow, start: PadicInt, n_steps: int, level: int) -> MinimalityProbe:
    """Count orbit residues mod p^level and compare with the reduced dynamics.

    Polynomial evaluation commutes with reduction mod p^level, so the exact
    finite system x -> P(x) mod p^level is a faithful oracle: the probe
    reports whether the orbit visited every residue of the cycle that the
    reduced system eventually enters.
    """
    poly = getattr(flow, "poly", None) or (flow if isinstance(flow, PadicPoly) else None)
    if poly is None:
        raise TypeError("empirical_minimality needs a polynomial flow")
    if level > start.precision:
        raise ValueError("resolution exceeds working precision")
    modulus = poly.p**level
    coeffs = [c.residue % modulus for c in poly.coefficients]

    def reduced_step(r: int) -> int:
        acc = 0
        for c in reversed(coeffs):
            acc = (acc * r + c) % modulus
        return acc

    # exact orbit of the finite reduced system: tail + cycle
    seen: dict[int, int] = {}
    r = start.residue % modulus
    trail = []
    while r not in seen:
        seen[r] = len(trail)
        trail.append(r)
        r = reduced_step(r)
    cycle = frozenset(trail[seen[r]:])

    histogram: dict[int, int] = {}
    r = start.residue % modulus
    for _ in range(n_steps + 1):
        histogram[r] = histogram.get(r, 0) + 1
        r = reduced_step(r)
    covers = cycle.issubset(histogram)
    return MinimalityProbe(level, histogram, cycle, covers)
