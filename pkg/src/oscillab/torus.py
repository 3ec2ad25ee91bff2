"""Affine and automorphism flows on the 2-torus.

Entropy classification of integer matrices, the equicontinuity bound for
diagonalizable zero-entropy automorphisms, the constructive normal form
P^-1 M P = +/- [[1,t],[0,1]] for the non-diagonalizable ones, and the
exact affine counterexample whose weighted Birkhoff average is constantly
one.  All matrix work is exact integer arithmetic.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .flows import Flow, circle_distance


@dataclass(frozen=True)
class ModularMatrix:
    """2x2 integer matrix with determinant +1 or -1."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self) -> None:
        for entry in (self.a, self.b, self.c, self.d):
            if not isinstance(entry, int):
                raise TypeError("entries must be integers")
        if self.det not in (1, -1):
            raise ValueError(f"determinant must be +/-1, got {self.det}")

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    @property
    def trace(self) -> int:
        return self.a + self.d

    @classmethod
    def identity(cls) -> "ModularMatrix":
        return cls(1, 0, 0, 1)

    @classmethod
    def shear(cls, t: int) -> "ModularMatrix":
        """The standard unipotent shear [[1, t], [0, 1]]."""
        return cls(1, t, 0, 1)

    @classmethod
    def from_string(cls, text: str) -> "ModularMatrix":
        """Parse 'a,b;c,d'."""
        try:
            rows = [part.split(",") for part in text.split(";")]
            (a, b), (c, d) = rows
            return cls(int(a), int(b), int(c), int(d))
        except (ValueError, TypeError) as exc:
            raise ValueError(f"cannot parse matrix from {text!r}") from exc

    def __matmul__(self, other: "ModularMatrix") -> "ModularMatrix":
        return ModularMatrix(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def __neg__(self) -> "ModularMatrix":
        return ModularMatrix(-self.a, -self.b, -self.c, -self.d)

    def inverse(self) -> "ModularMatrix":
        det = self.det
        return ModularMatrix(self.d * det, -self.b * det, -self.c * det, self.a * det)

    def apply(self, xy) -> np.ndarray:
        """Matrix-vector product (no mod-1 reduction)."""
        x, y = xy
        return np.array([self.a * x + self.b * y, self.c * x + self.d * y])

    def as_array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=np.int64)

    def __str__(self) -> str:
        return f"[[{self.a},{self.b}],[{self.c},{self.d}]]"


# ----------------------------------------------------------------------
# torus metric

def torus_reduce(xy) -> np.ndarray:
    return np.mod(np.asarray(xy, dtype=float), 1.0)


def torus_dist(u, v) -> float:
    """Quotient Euclidean distance: min over the 9 nearest integer translates."""
    delta = torus_reduce(u) - torus_reduce(v)
    best = math.inf
    for nx in (-1.0, 0.0, 1.0):
        for ny in (-1.0, 0.0, 1.0):
            dx = delta[0] - nx
            dy = delta[1] - ny
            best = min(best, dx * dx + dy * dy)
    return math.sqrt(best)


def torus_norm(xy) -> float:
    return torus_dist(xy, (0.0, 0.0))


def torus_norm_batch(points: np.ndarray) -> np.ndarray:
    """Quotient norms of a (2, m) array of representatives in [0,1)^2."""
    best = np.full(points.shape[1], np.inf)
    for nx in (-1.0, 0.0, 1.0):
        for ny in (-1.0, 0.0, 1.0):
            dx = points[0] - nx
            dy = points[1] - ny
            best = np.minimum(best, dx * dx + dy * dy)
    return np.sqrt(best)


# ----------------------------------------------------------------------
# entropy classification and the diagonalizable bound

@dataclass(frozen=True)
class EntropyClass:
    kind: str  # 'zero' | 'positive'
    value: float | None = None  # log of spectral radius when positive


def classify_entropy(matrix: ModularMatrix) -> EntropyClass:
    """Zero entropy iff both eigenvalues sit on the unit circle.

    For det=+1 that means |trace| <= 2; for det=-1 it means trace = 0.
    Otherwise the entropy is the log of the spectral radius.
    """
    tr, det = matrix.trace, matrix.det
    if (det == 1 and abs(tr) <= 2) or (det == -1 and tr == 0):
        return EntropyClass("zero")
    disc = tr * tr - 4 * det
    radius = (abs(tr) + math.sqrt(disc)) / 2.0
    return EntropyClass("positive", math.log(radius))


def eigenvalues(matrix: ModularMatrix) -> tuple[complex, complex]:
    """Exact quadratic-formula eigenvalues."""
    tr, det = matrix.trace, matrix.det
    disc = cmath.sqrt(complex(tr * tr - 4 * det))
    return ((tr + disc) / 2.0, (tr - disc) / 2.0)


def diag_bound(matrix: ModularMatrix) -> float:
    """Constant C with ||A^n x|| <= C ||x|| on the torus, via an eigenbasis.

    Requires zero entropy and diagonalizability over C; C is the spectral
    condition number of the eigenvector matrix.
    """
    if classify_entropy(matrix).kind != "zero":
        raise ValueError("matrix has positive entropy")
    tr, det = matrix.trace, matrix.det
    if det == 1 and abs(tr) == 2:
        if matrix in (ModularMatrix.identity(), -ModularMatrix.identity()):
            return 1.0
        raise ValueError("matrix with a double eigenvalue is not diagonalizable")
    lam1, lam2 = eigenvalues(matrix)
    a, b, c, d = matrix.a, matrix.b, matrix.c, matrix.d
    if b != 0:
        v1 = (b, lam1 - a)
        v2 = (b, lam2 - a)
    elif c != 0:
        v1 = (lam1 - d, c)
        v2 = (lam2 - d, c)
    else:
        return 1.0  # diagonal with unit-modulus integer entries
    basis = np.array([[v1[0], v2[0]], [v1[1], v2[1]]], dtype=complex)
    return float(np.linalg.cond(basis, 2))


# ----------------------------------------------------------------------
# normal form for the non-diagonalizable case

@dataclass(frozen=True)
class NormalForm:
    """Exact conjugation P^-1 M P = sign * [[1, t], [0, 1]]."""

    basis: ModularMatrix
    t: int
    sign: int

    def verify(self, matrix: ModularMatrix) -> bool:
        lhs = self.basis.inverse() @ matrix @ self.basis
        target = ModularMatrix.shear(self.t)
        if self.sign == -1:
            target = -target
        return lhs == target


def _bezout(a: int, b: int) -> tuple[int, int, int]:
    """Extended gcd: returns (g, x, y) with a*x + b*y = g, g = gcd >= 0."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def normal_form(matrix: ModularMatrix) -> NormalForm:
    """Constructive conjugation of a double-eigenvalue modular matrix to a shear.

    Follows the eigenvector/generalized-eigenvector construction: for
    M = [[a, b], [c, 2-a]] with b, c nonzero, set g = gcd(a-1, b); the
    shear parameter is t = g^2 / b (an integer), the eigenvector column is
    (b/g, -(a-1)/g), and the second column solves a Bezout equation.  The
    determinant of the assembled basis is automatically one.
    """
    if matrix.det != 1:
        raise ValueError("normal form requires determinant +1")
    if matrix.trace == 2:
        sign = 1
        work = matrix
    elif matrix.trace == -2:
        sign = -1
        work = -matrix
    else:
        raise ValueError("matrix must have a double eigenvalue +/-1 (trace +/-2)")
    a, b, c = work.a, work.b, work.c
    if b == 0 and c == 0:
        result = NormalForm(ModularMatrix.identity(), 0, sign)
    elif b == 0:
        result = NormalForm(ModularMatrix(0, 1, -1, 0), -c, sign)
    elif c == 0:
        result = NormalForm(ModularMatrix.identity(), b, sign)
    else:
        g = math.gcd(a - 1, b)
        if (g * g) % b != 0:
            raise ArithmeticError("gcd^2 not divisible by b; input is not unipotent")
        t = (g * g) // b
        x1, x2 = b // g, -(a - 1) // g
        _, y1, y2 = _bezout((a - 1) // g, b // g)
        # canonical representative: reduce the Bezout column modulo the
        # eigenvector column so that 0 <= y1 < |x1|
        y1_red = y1 % abs(x1)
        shift = (y1 - y1_red) // x1
        y1, y2 = y1_red, y2 - shift * x2
        result = NormalForm(ModularMatrix(x1, y1, x2, y2), t, sign)
    if not result.verify(matrix):
        raise AssertionError("normal form failed exact verification")
    return result


def _is_perfect_square(n: int) -> bool:
    if n < 0:
        return False
    r = math.isqrt(n)
    return r * r == n


def conjugacy_equivalent(t: int, t_other: int) -> bool:
    """True iff t / t_other is the square of an integer (exact rational test).

    Zero pairs only with zero.
    """
    if t == 0 or t_other == 0:
        return t == 0 and t_other == 0
    num, den = t, t_other
    g = math.gcd(num, den)
    num //= g
    den //= g
    if den < 0:
        num, den = -num, -den
    return den == 1 and _is_perfect_square(num)


# ----------------------------------------------------------------------
# flows

def torus_affine_flow(matrix: ModularMatrix, shift=(0.0, 0.0)) -> Flow:
    """x -> A x + b on [0,1)^2 with the quotient metric."""
    shift = torus_reduce(shift)

    def step(xy):
        return torus_reduce(matrix.apply(xy) + shift)

    def sample(rng):
        return rng.random(2)

    return Flow(
        name=f"torus_affine({matrix}, b=({shift[0]:g},{shift[1]:g}))",
        step=step,
        dist=torus_dist,
        sample=sample,
        isometric=matrix == ModularMatrix.identity(),
    )


def torus_automorphism_flow(matrix: ModularMatrix) -> Flow:
    return torus_affine_flow(matrix, (0.0, 0.0))


def shear_minimal_fiber(t: int, height: float) -> Flow:
    """Restriction of the shear (x, y) -> (x + t y, y) to the circle fiber at y.

    The fiber is invariant and the restriction is the rigid rotation by
    t * y (mod 1), hence an isometry for the arc metric.
    """
    angle = (t * height) % 1.0

    def step(x):
        return (x + angle) % 1.0

    def sample(rng):
        return float(rng.random())

    return Flow(
        name=f"shear_fiber(t={t}, y={height:g})",
        step=step,
        dist=circle_distance,
        sample=sample,
        isometric=True,
        lipschitz_one=True,
    )


# ----------------------------------------------------------------------
# the exact counterexample

COUNTEREXAMPLE_MATRIX = ModularMatrix(1, 0, 1, 1)


def counterexample_flow(alpha: float) -> Flow:
    """The affine skew product (x, y) -> (x + alpha, x + y) on the torus.

    State is kept in extended precision so long orbits stay accurate
    enough for the exact-average identity to be visible at 1e-9.
    """
    alpha_ld = np.longdouble(alpha)

    def step(xy):
        x, y = xy
        return (np.mod(x + alpha_ld, 1.0), np.mod(x + y, 1.0))

    def dist(u, v):
        return torus_dist((float(u[0]), float(u[1])), (float(v[0]), float(v[1])))

    def sample(rng):
        return (np.longdouble(rng.random()), np.longdouble(rng.random()))

    return Flow(
        name=f"counterexample_skew(alpha={alpha:g})",
        step=step,
        dist=dist,
        sample=sample,
    )


def counterexample_start(alpha: float):
    """The start point (alpha/2, 0) at which the averaged identity is exact."""
    return (np.longdouble(alpha) / 2, np.longdouble(0.0))


def counterexample_weights(alpha: float, n_terms: int):
    """Weights exp(-pi i n^2 alpha) as a WeightSequence."""
    from .sequences import phase_sequence

    weights = phase_sequence("quadratic", n_terms, alpha=-alpha / 2.0)
    return weights


def counterexample_prefix_means(
    alpha: float, checkpoints, method: str = "closed"
) -> np.ndarray:
    """Averages (1/N) sum exp(-pi i n^2 alpha) exp(2 pi i y_n) at each checkpoint.

    The observable reads the second coordinate of the orbit of (alpha/2, 0)
    under the skew product.  'closed' evaluates the orbit from its closed
    formula in extended precision; 'iterated' runs the map in float64.
    Every prefix mean equals one up to rounding.
    """
    checkpoints = sorted(int(n) for n in checkpoints)
    if checkpoints[0] < 1:
        raise ValueError("checkpoints must be >= 1")
    n_max = checkpoints[-1]
    n = np.arange(1, n_max + 1, dtype=np.longdouble)
    alpha_ld = np.longdouble(alpha)
    weight_phase = np.mod(n * n * (alpha_ld / 2), 1.0).astype(float)
    x0, y0 = alpha_ld / 2, np.longdouble(0.0)
    if method == "closed":
        orbit_y = np.mod(n * (n - 1) / 2 * alpha_ld + n * x0 + y0, 1.0).astype(float)
    elif method == "iterated":
        orbit_y = np.empty(n_max)
        x, y = float(x0), float(y0)
        for k in range(n_max):
            x_new = (x + alpha) % 1.0
            y = (x + y) % 1.0
            x = x_new
            orbit_y[k] = y
    else:
        raise ValueError(f"unknown method {method!r}")
    terms = np.exp(-2j * np.pi * weight_phase) * np.exp(2j * np.pi * orbit_y)
    partial = np.cumsum(terms)
    return np.array([partial[k - 1] / k for k in checkpoints])


def counterexample_average(alpha: float, n_terms: int, method: str = "closed") -> complex:
    """The single average at N = n_terms (equals 1 up to rounding)."""
    return complex(counterexample_prefix_means(alpha, [n_terms], method=method)[0])
