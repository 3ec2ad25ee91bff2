"""Name-indexed factories for sequences, flows, and observables.

The experiment runner instantiates everything through this registry, so
config files refer to generators by name and the CLI can enumerate what is
available together with each entry's parameter schema.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import circle, interval, padic, torus
from .flows import Flow, Observable
from .sequences import (
    WeightSequence,
    liouville_sequence,
    mobius_sequence,
    phase_sequence,
    subnormal_sequence,
)


class RegistryError(KeyError):
    """Unknown registry name or bad parameter set."""


@dataclass(frozen=True)
class RegistryEntry:
    factory: Callable
    params: dict[str, str]  # name -> type tag ('int', 'float', 'str', 'floats', 'ints')
    needs_seed: bool = False
    description: str = ""


def _parse_value(tag: str, raw: str):
    if tag == "int":
        return int(raw)
    if tag == "float":
        return float(raw)
    if tag == "str":
        return raw
    if tag == "ints":
        return [int(part) for part in raw.split(",") if part.strip() != ""]
    if tag == "floats":
        return [float(part) for part in raw.split(",") if part.strip() != ""]
    raise RegistryError(f"unknown parameter type tag {tag!r}")


# ----------------------------------------------------------------------
# sequences

def _seq_mobius(n_terms: int, seed=None) -> WeightSequence:
    return mobius_sequence(n_terms)


def _seq_liouville(n_terms: int, seed=None) -> WeightSequence:
    return liouville_sequence(n_terms)


def _seq_quadratic(n_terms: int, alpha: float, seed=None) -> WeightSequence:
    return phase_sequence("quadratic", n_terms, alpha=alpha)


def _seq_nlogn(n_terms: int, c: float, seed=None) -> WeightSequence:
    return phase_sequence("n_log_n", n_terms, c=c)


def _seq_polynomial(n_terms: int, coeffs, seed=None) -> WeightSequence:
    return phase_sequence("polynomial", n_terms, coeffs=coeffs)


def _seq_subnormal(n_terms: int, tau: float, seed=None) -> WeightSequence:
    if seed is None:
        raise RegistryError("subnormal sequence requires an explicit seed")
    return subnormal_sequence(tau, n_terms, seed)


SEQUENCES: dict[str, RegistryEntry] = {
    "mobius": RegistryEntry(_seq_mobius, {}, description="Mobius function mu(n)"),
    "liouville": RegistryEntry(
        _seq_liouville, {}, description="Liouville function (-1)^Omega(n)"
    ),
    "quadratic_phase": RegistryEntry(
        _seq_quadratic,
        {"alpha": "float"},
        description="exp(2 pi i n^2 alpha)",
    ),
    "nlogn_phase": RegistryEntry(
        _seq_nlogn, {"c": "float"}, description="exp(2 pi i c n log n)"
    ),
    "polynomial_phase": RegistryEntry(
        _seq_polynomial,
        {"coeffs": "floats"},
        description="exp(2 pi i P(n)), coefficients ascending",
    ),
    "subnormal": RegistryEntry(
        _seq_subnormal,
        {"tau": "float"},
        needs_seed=True,
        description="n^tau times random signs (seeded)",
    ),
}


# ----------------------------------------------------------------------
# flows

def _flow_rotation(rho: float) -> Flow:
    return circle.rotation_flow(rho)


def _flow_denjoy(rho: float, trunc: int) -> Flow:
    return circle.build_denjoy(rho, trunc).as_flow()


def _flow_torus_affine(matrix: str, shift) -> Flow:
    return torus.torus_affine_flow(torus.ModularMatrix.from_string(matrix), tuple(shift))


def _flow_torus_auto(matrix: str) -> Flow:
    return torus.torus_automorphism_flow(torus.ModularMatrix.from_string(matrix))


def _flow_padic_poly(p: int, precision: int, coeffs) -> Flow:
    return padic.poly_flow(padic.PadicPoly.from_ints(coeffs, p, precision))


def _flow_padic_rational(p: int, precision: int, num, den) -> Flow:
    return padic.rational_flow(
        padic.PadicPoly.from_ints(num, p, precision),
        padic.PadicPoly.from_ints(den, p, precision),
    )


def _flow_quadratic(t: float) -> Flow:
    return interval.quadratic_flow(t)


def _flow_adding_machine(p: int, precision: int) -> Flow:
    return padic.adding_machine(p, precision)


def _flow_shear_fiber(t: int, y: float) -> Flow:
    return torus.shear_minimal_fiber(t, y)


FLOWS: dict[str, RegistryEntry] = {
    "rotation": RegistryEntry(
        _flow_rotation, {"rho": "float"}, description="rigid circle rotation"
    ),
    "denjoy": RegistryEntry(
        _flow_denjoy,
        {"rho": "float", "trunc": "int"},
        description="Denjoy counter-example (truncated gap table)",
    ),
    "torus_affine": RegistryEntry(
        _flow_torus_affine,
        {"matrix": "str", "shift": "floats"},
        description="x -> Ax + b on the 2-torus; matrix as 'a,b;c,d'",
    ),
    "torus_auto": RegistryEntry(
        _flow_torus_auto,
        {"matrix": "str"},
        description="automorphism x -> Ax on the 2-torus",
    ),
    "padic_poly": RegistryEntry(
        _flow_padic_poly,
        {"p": "int", "precision": "int", "coeffs": "ints"},
        description="polynomial flow on the p-adic integers",
    ),
    "padic_rational": RegistryEntry(
        _flow_padic_rational,
        {"p": "int", "precision": "int", "num": "ints", "den": "ints"},
        description="good-reduction rational flow on the projective line",
    ),
    "quadratic_family": RegistryEntry(
        _flow_quadratic,
        {"t": "float"},
        description="t - (1+t)x^2 on [-1, 1]",
    ),
    "adding_machine": RegistryEntry(
        _flow_adding_machine,
        {"p": "int", "precision": "int"},
        description="x -> x + 1 on the p-adic integers",
    ),
    "shear_fiber": RegistryEntry(
        _flow_shear_fiber,
        {"t": "int", "y": "float"},
        description="torus shear restricted to one circle fiber",
    ),
}


# ----------------------------------------------------------------------
# observables

def _obs_fourier(k: int) -> Observable:
    def evaluate(x):
        return complex(np.exp(2j * np.pi * k * float(x)))

    return Observable(f"fourier({k})", evaluate)


def _obs_torus_fourier(k1: int, k2: int) -> Observable:
    def evaluate(xy):
        return complex(np.exp(2j * np.pi * (k1 * float(xy[0]) + k2 * float(xy[1]))))

    return Observable(f"torus_fourier({k1},{k2})", evaluate)


def _obs_coordinate() -> Observable:
    return Observable("coordinate", lambda x: complex(float(x)))


def _obs_padic_phase(level: int) -> Observable:
    def evaluate(x: padic.PadicInt):
        modulus = x.p**level
        return complex(np.exp(2j * np.pi * (x.residue % modulus) / modulus))

    return Observable(f"padic_phase({level})", evaluate)


def _obs_projective_phase(level: int) -> Observable:
    """Locally constant phase on the projective line (clopen charts)."""

    def evaluate(point: padic.ProjPoint):
        p = point.x.p
        modulus = p**level
        if point.y.is_unit():
            chart = (point.x * point.y.unit_inverse()).residue % modulus
            return complex(np.exp(2j * np.pi * chart / modulus))
        chart = (point.y * point.x.unit_inverse()).residue % modulus
        return complex(-np.exp(2j * np.pi * chart / modulus))

    return Observable(f"projective_phase({level})", evaluate)


OBSERVABLES: dict[str, RegistryEntry] = {
    "fourier": RegistryEntry(
        _obs_fourier, {"k": "int"}, description="exp(2 pi i k x) for scalar states"
    ),
    "torus_fourier": RegistryEntry(
        _obs_torus_fourier,
        {"k1": "int", "k2": "int"},
        description="exp(2 pi i (k1 x + k2 y)) on the torus",
    ),
    "coordinate": RegistryEntry(
        _obs_coordinate, {}, description="the scalar state itself"
    ),
    "padic_phase": RegistryEntry(
        _obs_padic_phase,
        {"level": "int"},
        description="phase of the residue mod p^level",
    ),
    "projective_phase": RegistryEntry(
        _obs_projective_phase,
        {"level": "int"},
        description="chartwise phase on the projective line",
    ),
}


# ----------------------------------------------------------------------
# builders

def _build(group: dict[str, RegistryEntry], kind: str, name: str, params: dict[str, str], **extra):
    if name not in group:
        raise RegistryError(
            f"unknown {kind} {name!r}; known: {', '.join(sorted(group))}"
        )
    entry = group[name]
    unknown = set(params) - set(entry.params)
    if unknown:
        raise RegistryError(f"{kind} {name!r} got unknown parameters {sorted(unknown)}")
    missing = set(entry.params) - set(params)
    if missing:
        raise RegistryError(f"{kind} {name!r} missing parameters {sorted(missing)}")
    parsed = {key: _parse_value(tag, params[key]) for key, tag in entry.params.items()}
    return entry.factory(**parsed, **extra)


def build_sequence(name: str, params: dict[str, str], n_terms: int, seed=None) -> WeightSequence:
    entry = SEQUENCES.get(name)
    if entry is not None and entry.needs_seed and seed is None:
        raise RegistryError(f"sequence {name!r} requires a seed")
    return _build(SEQUENCES, "sequence", name, params, n_terms=n_terms, seed=seed)


def build_flow(name: str, params: dict[str, str]) -> Flow:
    return _build(FLOWS, "flow", name, params)


def build_observable(name: str, params: dict[str, str]) -> Observable:
    return _build(OBSERVABLES, "observable", name, params)


def parse_start(flow_name: str, raw: str, flow: Flow):
    """Parse a start point appropriate for the named flow.

    p-adic integers accept either a decimal integer or an explicit
    comma-separated digit list (least significant digit first).
    """
    raw = raw.strip()
    if flow_name in ("rotation", "denjoy", "quadratic_family", "shear_fiber"):
        return float(raw)
    if flow_name in ("torus_affine", "torus_auto"):
        x, y = (float(part) for part in raw.split(","))
        return np.array([x, y])
    if flow_name in ("padic_poly", "adding_machine"):
        poly = getattr(flow, "poly")
        if "," in raw:
            digits = [int(part) for part in raw.split(",")]
            digits += [0] * (poly.precision - len(digits))
            return padic.PadicInt.from_digits(digits[: poly.precision], poly.p)
        return padic.PadicInt.from_int(int(raw), poly.p, poly.precision)
    if flow_name == "padic_rational":
        num = getattr(flow, "numerator")
        x, y = (int(part) for part in raw.split(","))
        return padic.ProjPoint.from_ints(x, y, num.p, num.precision)
    raise RegistryError(f"no start-point parser for flow {flow_name!r}")


def registry_table() -> str:
    """Stable, human-readable listing of every registered name and schema."""
    lines = []
    for title, group in (
        ("sequences", SEQUENCES),
        ("flows", FLOWS),
        ("observables", OBSERVABLES),
    ):
        lines.append(f"{title}:")
        for name in sorted(group):
            entry = group[name]
            schema = ", ".join(f"{k}:{v}" for k, v in sorted(entry.params.items()))
            seed_note = " (seeded)" if entry.needs_seed else ""
            lines.append(f"  {name:18s} [{schema}]{seed_note}  {entry.description}")
    return "\n".join(lines) + "\n"
