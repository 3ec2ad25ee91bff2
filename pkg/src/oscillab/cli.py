"""Experiment runner and command-line interface.

Subcommands: ``run`` (execute experiments from a config file), ``list``
(registry table), ``cascade``, ``denjoy``, ``spectrum``, ``normal-form``.
Reports are JSON plus a CSV mirror, written atomically; identical config
and seed reproduce byte-identical outputs.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import configparser
import hashlib
import json
import math
import os
import sys
import time
from dataclasses import dataclass

from . import __version__, circle, interval, registry, sequences, torus
from .analysis import weighted_birkhoff

OUTPUT_ENV_VAR = "OSCILLAB_OUT"


class ConfigError(ValueError):
    """Malformed or inconsistent experiment configuration."""


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment: sequence x flow x observable from a named start point."""

    name: str
    sequence: str
    sequence_params: dict
    n_terms: int
    flow: str
    flow_params: dict
    observable: str
    observable_params: dict
    start: str
    checkpoints: tuple[int, ...] | None
    seed: int | None

    def to_config_text(self) -> str:
        """Serialize back to the [experiment ...] section format, losslessly."""
        lines = [f"[experiment {self.name}]"]
        lines.append(f"sequence = {self.sequence}")
        for key in sorted(self.sequence_params):
            lines.append(f"sequence.{key} = {self.sequence_params[key]}")
        lines.append(f"n = {self.n_terms}")
        lines.append(f"flow = {self.flow}")
        for key in sorted(self.flow_params):
            lines.append(f"flow.{key} = {self.flow_params[key]}")
        lines.append(f"observable = {self.observable}")
        for key in sorted(self.observable_params):
            lines.append(f"observable.{key} = {self.observable_params[key]}")
        lines.append(f"start = {self.start}")
        if self.checkpoints is not None:
            lines.append("checkpoints = " + ",".join(str(n) for n in self.checkpoints))
        if self.seed is not None:
            lines.append(f"seed = {self.seed}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_section(cls, name: str, section) -> "ExperimentConfig":
        def grouped(prefix: str) -> dict:
            return {
                key[len(prefix) + 1 :]: value
                for key, value in section.items()
                if key.startswith(prefix + ".")
            }

        try:
            n_terms = section.getint("n")
            if n_terms is None:
                raise ConfigError(f"[{name}] missing n")
            checkpoints = None
            if section.get("checkpoints"):
                checkpoints = tuple(
                    int(part) for part in section["checkpoints"].split(",")
                )
            seed = section.getint("seed") if section.get("seed") else None
            return cls(
                name=name,
                sequence=section["sequence"],
                sequence_params=grouped("sequence"),
                n_terms=n_terms,
                flow=section["flow"],
                flow_params=grouped("flow"),
                observable=section["observable"],
                observable_params=grouped("observable"),
                start=section["start"],
                checkpoints=checkpoints,
                seed=seed,
            )
        except KeyError as exc:
            raise ConfigError(f"[{name}] missing key {exc.args[0]!r}") from exc
        except ValueError as exc:
            raise ConfigError(f"[{name}] bad value: {exc}") from exc

    def known_names(self) -> None:
        if self.sequence not in registry.SEQUENCES:
            raise ConfigError(f"[{self.name}] unknown sequence {self.sequence!r}")
        if self.flow not in registry.FLOWS:
            raise ConfigError(f"[{self.name}] unknown flow {self.flow!r}")
        if self.observable not in registry.OBSERVABLES:
            raise ConfigError(f"[{self.name}] unknown observable {self.observable!r}")


def parse_config(path: str) -> list[ExperimentConfig]:
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc
    experiments = []
    for section_name in parser.sections():
        if not section_name.startswith("experiment"):
            raise ConfigError(
                f"unexpected section [{section_name}]; sections must be "
                f"[experiment <name>]"
            )
        label = section_name[len("experiment") :].strip() or section_name
        cfg = ExperimentConfig.from_section(label, parser[section_name])
        cfg.known_names()
        experiments.append(cfg)
    if not experiments:
        raise ConfigError(f"{path} declares no [experiment ...] sections")
    return experiments


def _atomic_write(path: str, text: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def run_experiment(cfg: ExperimentConfig, out_dir: str) -> dict:
    weights = registry.build_sequence(
        cfg.sequence, cfg.sequence_params, cfg.n_terms, seed=cfg.seed
    )
    flow = registry.build_flow(cfg.flow, cfg.flow_params)
    observable = registry.build_observable(cfg.observable, cfg.observable_params)
    start = registry.parse_start(cfg.flow, cfg.start, flow)
    report = weighted_birkhoff(weights, flow, observable, start, cfg.checkpoints)
    payload = report.to_json_dict()
    payload["start"] = cfg.start  # canonical config text, not the parsed repr
    json_text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    csv_lines = ["N,re,im,abs"]
    for n, s in report.checkpoints:
        csv_lines.append(f"{n},{s.real:.17g},{s.imag:.17g},{abs(s):.17g}")
    _atomic_write(os.path.join(out_dir, f"{cfg.name}.json"), json_text)
    _atomic_write(os.path.join(out_dir, f"{cfg.name}.csv"), "\n".join(csv_lines) + "\n")
    return {"name": cfg.name, "verdict": report.verdict}


def cmd_run(args) -> int:
    out_dir = args.out
    os.makedirs(out_dir, exist_ok=True)
    try:
        experiments = parse_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    if args.seed is not None:
        experiments = [
            ExperimentConfig(
                **{**cfg.__dict__, "seed": args.seed}
            )
            for cfg in experiments
        ]
    started = time.time()
    statuses = {}
    failed = False
    if args.jobs > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=args.jobs) as pool:
            futures = {
                pool.submit(run_experiment, cfg, out_dir): cfg for cfg in experiments
            }
            for future in concurrent.futures.as_completed(futures):
                cfg = futures[future]
                try:
                    result = future.result()
                    statuses[cfg.name] = result["verdict"]
                    print(f"{cfg.name}: {result['verdict']}")
                except Exception as exc:  # surfaced per experiment
                    statuses[cfg.name] = f"error: {exc}"
                    print(f"{cfg.name}: error: {exc}", file=sys.stderr)
                    failed = True
    else:
        for cfg in experiments:
            try:
                result = run_experiment(cfg, out_dir)
                statuses[cfg.name] = result["verdict"]
                print(f"{cfg.name}: {result['verdict']}")
            except Exception as exc:
                statuses[cfg.name] = f"error: {exc}"
                print(f"{cfg.name}: error: {exc}", file=sys.stderr)
                failed = True
    with open(args.config, "rb") as fh:
        digest = hashlib.sha256(fh.read()).hexdigest()
    manifest = {
        "config_sha256": digest,
        "version": __version__,
        "wall_time_s": time.time() - started,
        "experiments": statuses,
    }
    _atomic_write(
        os.path.join(out_dir, "manifest.json"),
        json.dumps(manifest, sort_keys=True, indent=2) + "\n",
    )
    return 1 if failed else 0


def cmd_list(args) -> int:
    sys.stdout.write(registry.registry_table())
    return 0


def cmd_cascade(args) -> int:
    result = interval.cascade(args.depth)
    params = result.parameters
    ratios = result.ratios()
    lines = ["n,t_n,ratio"]
    lines.append(f"0,{interval.CASCADE_ORIGIN:.17g},")
    for i, t_n in enumerate(params, start=1):
        ratio = f"{ratios[i - 1]:.17g}" if i - 1 < len(ratios) else ""
        lines.append(f"{i},{t_n:.17g},{ratio}")
    text = "\n".join(lines) + "\n"
    if args.out_file:
        _atomic_write(os.path.join(args.out, args.out_file), text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_denjoy(args) -> int:
    denjoy = circle.build_denjoy(args.rho, args.trunc)
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, args.out_file or "denjoy_gap_table.csv")
    circle.save_gap_table(denjoy, path)
    print(
        f"gap table written to {path} (tail mass {denjoy.tail_mass:.3g}, "
        f"rotation number target {args.rho:.12g})"
    )
    return 0


def cmd_spectrum(args) -> int:
    if args.scan_sequence:
        params = dict(
            part.split("=", 1) for part in (args.scan_params or "").split(";") if part
        )
        weights = registry.build_sequence(
            args.scan_sequence, params, args.n, seed=args.seed
        )
        report = sequences.zero_set_scan(weights, grid_size=args.grid, n_terms=args.n)
        lines = ["t,re_sigma,im_sigma,abs_sigma,N"]
        for t, s in zip(report.grid, report.sigma):
            lines.append(
                f"{t:.17g},{s.real:.17g},{s.imag:.17g},{abs(s):.17g},{report.n_terms}"
            )
        text = "\n".join(lines) + "\n"
    else:
        atoms = sequences.quadratic_rational_spectrum(args.p, args.q)
        lines = ["r,s,re_amp,im_amp,abs_amp"]
        for frac in sorted(atoms):
            amp = atoms[frac]
            lines.append(
                f"{frac.numerator},{frac.denominator},{amp.real:.17g},"
                f"{amp.imag:.17g},{abs(amp):.17g}"
            )
        text = "\n".join(lines) + "\n"
    if args.out_file:
        os.makedirs(args.out, exist_ok=True)
        _atomic_write(os.path.join(args.out, args.out_file), text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_coding(args) -> int:
    try:
        report = interval.attractor_coding(args.t, args.depth)
    except (ValueError, interval.CycleNotFound, interval.CodingAmbiguous) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    lines = ["word,image_word"]
    for word in sorted(report.word_map):
        image = report.word_map[word]
        lines.append(
            "".join(map(str, word)) + "," + "".join(map(str, image))
        )
    lines.append(f"# adding_machine = {report.is_adding_machine}")
    text = "\n".join(lines) + "\n"
    if args.out_file:
        os.makedirs(args.out, exist_ok=True)
        _atomic_write(os.path.join(args.out, args.out_file), text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_normal_form(args) -> int:
    try:
        matrix = torus.ModularMatrix.from_string(args.matrix)
        result = torus.normal_form(matrix)
    except (ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"matrix  = {matrix}")
    print(f"basis P = {result.basis}")
    print(f"t       = {result.t}")
    print(f"sign    = {'+1' if result.sign == 1 else '-1'}")
    print(f"check   : P^-1 M P == {'+' if result.sign == 1 else '-'}T_{result.t}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oscillab",
        description="oscillating-sequence and flow disjointness experiments",
    )
    parser.add_argument(
        "--out",
        default=None,
        help=f"output directory (default: ${OUTPUT_ENV_VAR} or current directory)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run experiments from a config file")
    p_run.add_argument("config")
    p_run.add_argument("--jobs", type=int, default=1)
    p_run.add_argument("--seed", type=int, default=None, help="override config seeds")
    p_run.set_defaults(func=cmd_run)

    p_list = sub.add_parser("list", help="list registered sequences/flows/observables")
    p_list.set_defaults(func=cmd_list)

    p_cascade = sub.add_parser("cascade", help="period-doubling cascade parameters")
    p_cascade.add_argument("--depth", type=int, default=8)
    p_cascade.add_argument("--out-file", default=None)
    p_cascade.set_defaults(func=cmd_cascade)

    p_denjoy = sub.add_parser("denjoy", help="build and persist a Denjoy gap table")
    p_denjoy.add_argument("--rho", type=float, default=math.sqrt(2) - 1)
    p_denjoy.add_argument("--trunc", type=int, default=4000)
    p_denjoy.add_argument("--out-file", default=None)
    p_denjoy.set_defaults(func=cmd_denjoy)

    p_spec = sub.add_parser(
        "spectrum", help="exact quadratic-phase spectrum or a Cesaro grid scan"
    )
    p_spec.add_argument("--p", type=int, default=1)
    p_spec.add_argument("--q", type=int, default=2)
    p_spec.add_argument("--scan-sequence", default=None)
    p_spec.add_argument("--scan-params", default=None, help="key=value;key=value")
    p_spec.add_argument("--n", type=int, default=10000)
    p_spec.add_argument("--grid", type=int, default=512)
    p_spec.add_argument("--seed", type=int, default=None)
    p_spec.add_argument("--out-file", default=None)
    p_spec.set_defaults(func=cmd_spectrum)

    p_coding = sub.add_parser(
        "coding", help="odometer word table of an attracting power-of-two cycle"
    )
    p_coding.add_argument("--t", type=float, required=True)
    p_coding.add_argument("--depth", type=int, required=True)
    p_coding.add_argument("--out-file", default=None)
    p_coding.set_defaults(func=cmd_coding)

    p_nf = sub.add_parser("normal-form", help="shear normal form of a modular matrix")
    p_nf.add_argument("--matrix", required=True, help="format 'a,b;c,d'")
    p_nf.set_defaults(func=cmd_normal_form)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.out is None:
        args.out = os.environ.get(OUTPUT_ENV_VAR, ".")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
