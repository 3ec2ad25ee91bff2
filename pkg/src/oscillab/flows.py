"""Flow abstraction shared by every concrete dynamical system.

A flow bundles a step map and a metric over an opaque state type.  Flows
are stateless: orbits are produced by repeated stepping, so arbitrarily
long runs need O(1) memory.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Iterator

import numpy as np

Point = Any


@dataclass(frozen=True)
class Flow:
    """A state space with a continuous self-map and a metric.

    ``sample`` draws a random point of the state space (used by sampling
    checks and experiment runners).  ``isometric`` / ``lipschitz_one``
    record what the construction promises; the checkers below verify the
    promise on samples.
    """

    name: str
    step: Callable[[Point], Point]
    dist: Callable[[Point, Point], float]
    sample: Callable[[np.random.Generator], Point] | None = None
    isometric: bool = False
    lipschitz_one: bool = False

    def __repr__(self) -> str:  # keep reports readable
        return f"Flow({self.name})"


@dataclass(frozen=True)
class Observable:
    """A complex-valued function evaluated along orbits."""

    name: str
    eval: Callable[[Point], complex]

    def __repr__(self) -> str:
        return f"Observable({self.name})"


@dataclass
class Orbit:
    start: Point
    points: list = field(repr=False)

    @property
    def n_steps(self) -> int:
        return len(self.points) - 1

    def __len__(self) -> int:
        return len(self.points)

    def __getitem__(self, k: int) -> Point:
        return self.points[k]


def iter_orbit(flow: Flow, start: Point) -> Iterator[Point]:
    """Yield start, T(start), T^2(start), ... indefinitely."""
    x = start
    while True:
        yield x
        x = flow.step(x)


def orbit(flow: Flow, start: Point, n_steps: int) -> Orbit:
    """Materialize the first ``n_steps + 1`` orbit points."""
    if n_steps < 0:
        raise ValueError("n_steps must be >= 0")
    points = [start]
    x = start
    for _ in range(n_steps):
        x = flow.step(x)
        points.append(x)
    return Orbit(start=start, points=points)


def orbit_distance_trace(flow: Flow, x: Point, z: Point, n_steps: int) -> np.ndarray:
    """Distances d(T^n x, T^n z) for n = 1..n_steps along synchronized orbits."""
    out = np.empty(n_steps)
    u, v = x, z
    for n in range(n_steps):
        u = flow.step(u)
        v = flow.step(v)
        out[n] = flow.dist(u, v)
    return out


def circle_distance(a: float, b: float) -> float:
    """Arc-length metric on the unit circle R/Z (total length 1)."""
    d = abs(a - b) % 1.0
    return min(d, 1.0 - d)


def check_metric_axioms(flow: Flow, rng: np.random.Generator, n_triples: int = 1000):
    """Sample triples and measure worst symmetry / triangle-inequality defect."""
    if flow.sample is None:
        raise ValueError(f"flow {flow.name} has no sampler")
    sym = 0.0
    tri = 0.0
    for _ in range(n_triples):
        x, y, z = flow.sample(rng), flow.sample(rng), flow.sample(rng)
        dxy, dyx = flow.dist(x, y), flow.dist(y, x)
        sym = max(sym, abs(dxy - dyx))
        tri = max(tri, flow.dist(x, z) - (dxy + flow.dist(y, z)))
    return sym, tri


def isometry_defect(
    flow: Flow, rng: np.random.Generator, n_pairs: int = 100, n_steps: int = 100
) -> float:
    """Worst |d(T^n x, T^n y) - d(x, y)| over sampled pairs and n <= n_steps."""
    if flow.sample is None:
        raise ValueError(f"flow {flow.name} has no sampler")
    worst = 0.0
    for _ in range(n_pairs):
        x, y = flow.sample(rng), flow.sample(rng)
        base = flow.dist(x, y)
        u, v = x, y
        for _ in range(n_steps):
            u = flow.step(u)
            v = flow.step(v)
            worst = max(worst, abs(flow.dist(u, v) - base))
    return worst


def lipschitz_one_defect(
    flow: Flow, rng: np.random.Generator, n_pairs: int = 1000
) -> float:
    """Worst d(Tx, Ty) - d(x, y) over sampled pairs (<= 0 for 1-Lipschitz maps)."""
    if flow.sample is None:
        raise ValueError(f"flow {flow.name} has no sampler")
    worst = -np.inf
    for _ in range(n_pairs):
        x, y = flow.sample(rng), flow.sample(rng)
        worst = max(worst, flow.dist(flow.step(x), flow.step(y)) - flow.dist(x, y))
    return worst
