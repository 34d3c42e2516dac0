"""Experiment harness: INI configs in, CSV/JSON out.

Subcommands: ``run`` executes a configured experiment, ``fit`` estimates a
log-log exponent from a report CSV, ``gen`` writes a generated system to a
file.  Identical (config, seed) pairs produce byte-identical outputs; the
SHALLOWPACK_THREADS environment variable caps trial parallelism.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .discrepancy import bound_disc_halfspaces, eval_coloring, random_coloring
from .packing import (
    CsParams,
    SweepSpec,
    fit_loglog,
    greedy_packing,
    scaling_experiment,
    shallow_filter,
)
from .sampling import (
    SampleParams,
    compact_projection_experiment,
    decay_tail_experiment,
    epsilon_net_experiment,
    projection_expectation_check,
    relative_approx_experiment,
    symmetric_difference_system,
)
from .seeding import spawn
from .setsystem import (
    SetSystem,
    build_balls,
    build_halfspaces,
    build_rectangle_grid_dual,
    build_slabs,
    clustered_points,
    convex_position_points,
    random_points,
)
from .spanning import approx_mst, bound_tree_conflict, build_sketch, exact_mst
from .measures import brute_force_measure, traverse_and_measure

KINDS = (
    "packing-scaling",
    "tail",
    "net",
    "approx",
    "projection",
    "mst",
    "measures",
    "discrepancy",
    "grid-lowerbound",
)


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    """Parsed experiment description: a kind plus raw key-value sections."""

    kind: str
    seed: int = 0
    trials: int = 1
    sections: dict[str, dict[str, str]] = field(default_factory=dict)
    output_path: str = ""
    output_format: str = "csv"

    @classmethod
    def from_ini(cls, text: str) -> "ExperimentConfig":
        parser = configparser.ConfigParser()
        try:
            parser.read_string(text)
        except configparser.Error as exc:
            raise ConfigError(f"cannot parse config: {exc}") from exc
        if "experiment" not in parser:
            raise ConfigError("missing [experiment] section")
        exp = parser["experiment"]
        kind = exp.get("kind", "")
        if kind not in KINDS:
            raise ConfigError(f"[experiment] kind: unknown kind '{kind}'")
        try:
            seed = exp.getint("seed", 0)
            trials = exp.getint("trials", 1)
        except ValueError as exc:
            raise ConfigError(f"[experiment] seed/trials: {exc}") from exc
        if trials < 1:
            raise ConfigError("[experiment] trials: must be >= 1")
        out = parser["output"] if "output" in parser else {}
        fmt = out.get("format", "csv")
        if fmt not in ("csv", "json"):
            raise ConfigError(f"[output] format: must be csv or json, got '{fmt}'")
        sections = {
            name: dict(parser[name])
            for name in parser.sections()
            if name not in ("experiment", "output")
        }
        return cls(kind, seed, trials, sections, out.get("path", ""), fmt)

    @classmethod
    def from_file(cls, path: str) -> "ExperimentConfig":
        try:
            with open(path, "r", encoding="utf-8") as fh:
                return cls.from_ini(fh.read())
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc

    def to_ini(self) -> str:
        parser = configparser.ConfigParser()
        parser["experiment"] = {
            "kind": self.kind,
            "seed": str(self.seed),
            "trials": str(self.trials),
        }
        for name in sorted(self.sections):
            parser[name] = dict(self.sections[name])
        parser["output"] = {"path": self.output_path, "format": self.output_format}
        buf = io.StringIO()
        parser.write(buf)
        return buf.getvalue()

    def get(self, section: str, key: str, cast, default=None):
        raw = self.sections.get(section, {}).get(key)
        if raw is None:
            if default is None:
                raise ConfigError(f"[{section}] {key}: required field is missing")
            return default
        try:
            if cast is bool:
                if raw.lower() in ("1", "true", "yes", "on"):
                    return True
                if raw.lower() in ("0", "false", "no", "off"):
                    return False
                raise ValueError("not a boolean")
            return cast(raw)
        except ValueError as exc:
            raise ConfigError(f"[{section}] {key}: {exc} (value '{raw}')") from exc

    def get_list(self, section: str, key: str, cast, default=None):
        raw = self.sections.get(section, {}).get(key)
        if raw is None:
            if default is None:
                raise ConfigError(f"[{section}] {key}: required field is missing")
            return default
        try:
            return [cast(tok) for tok in raw.replace(",", " ").split()]
        except ValueError as exc:
            raise ConfigError(f"[{section}] {key}: {exc} (value '{raw}')") from exc


def thread_cap() -> int:
    raw = os.environ.get("SHALLOWPACK_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------
# generators shared by experiments


def _points(cfg: ExperimentConfig, section: str, n: int):
    support = cfg.get(section, "support", str, "uniform")
    dim = cfg.get(section, "dim", int, 2)
    if support == "uniform":
        return random_points(n, dim, cfg.seed)
    if support == "circle":
        return convex_position_points(n, cfg.seed)
    if support == "clustered":
        clusters = cfg.get(section, "clusters", int, 4)
        return clustered_points(n, dim, cfg.seed, clusters)
    raise ConfigError(f"[{section}] support: unknown support '{support}'")


def _system(cfg: ExperimentConfig, section: str) -> SetSystem:
    gen = cfg.get(section, "id", str, "halfplanes")
    if gen == "grid":
        n = cfg.get(section, "n", int)
        delta = cfg.get(section, "delta", int)
        return build_rectangle_grid_dual(n, delta)
    builders = {
        "halfplanes": build_halfspaces,
        "halfspaces": build_halfspaces,
        "balls": build_balls,
        "slabs": build_slabs,
    }
    if gen not in builders:
        raise ConfigError(f"[{section}] id: unknown generator '{gen}'")
    n = cfg.get(section, "n", int)
    return builders[gen](_points(cfg, section, n))


def _csv_text(header: str, rows: list[str]) -> str:
    return "\n".join([header, *rows]) + "\n"


# ---------------------------------------------------------------------------
# experiment runners


def _run_packing_scaling(cfg: ExperimentConfig) -> tuple[str, object]:
    gen = cfg.get("generator", "id", str, "halfplanes")
    params = CsParams(
        d=cfg.get("generator", "d", float, 2.0),
        d1=cfg.get("generator", "d1", float, 1.0),
        d0=cfg.get("generator", "d0", int, 3),
    )
    sweep = SweepSpec(
        vary=cfg.get("sweep", "vary", str),
        values=tuple(cfg.get_list("sweep", "values", int)),
        n=cfg.get("sweep", "n", int, cfg.get("generator", "n", int, 0)),
        k=cfg.get("sweep", "k", int, 0),
        delta=cfg.get("sweep", "delta", int, 0),
        strict=cfg.get("sweep", "strict", bool, True),
    )
    report = scaling_experiment(
        gen,
        sweep,
        trials=cfg.trials,
        seed=cfg.seed,
        dim=cfg.get("generator", "dim", int, 2),
        params=params,
        support=cfg.get("generator", "support", str, "uniform"),
        max_workers=thread_cap(),
    )
    return report.to_csv(), report.to_json_obj()


def _run_tail(cfg: ExperimentConfig) -> tuple[str, object]:
    n = cfg.get("tail", "n", int, 32)
    k = cfg.get("tail", "k", int, 8)
    m_j = cfg.get("tail", "m_j", int, 9)
    ts = cfg.get_list("tail", "t_values", float, [2 * math.e, 8.0, 12.0])
    report = decay_tail_experiment(n, k, m_j, ts, cfg.trials, cfg.seed)
    obj = {
        "trials": report.trials,
        "rows": [vars(r) for r in report.rows],
    }
    return report.to_csv(), obj


def _packing_system(cfg: ExperimentConfig, section: str) -> tuple[SetSystem, int, int]:
    n = cfg.get(section, "n", int, 128)
    delta = cfg.get(section, "delta", int, 32)
    k = cfg.get(section, "k", int, 0)
    base = _system(cfg, section)
    if k:
        base = shallow_filter(base, k)
    packing = greedy_packing(base, delta, strict=True, order_seed=0)
    return packing.subsystem(), n, delta


def _run_net(cfg: ExperimentConfig) -> tuple[str, object]:
    system, n, delta = _packing_system(cfg, "net")
    params = SampleParams(
        epsilon=cfg.get("net", "epsilon", float, delta / n),
        eta=cfg.get("net", "eta", float, 0.25),
        q=cfg.get("net", "q", float, 0.25),
        c=cfg.get("net", "c", float, 4.0),
    )
    d = cfg.get("net", "d", float, 3.0)
    diff = symmetric_difference_system(system)
    report = epsilon_net_experiment(diff, params, d, cfg.trials, cfg.seed)
    return report.to_csv(), vars(report)


def _run_approx(cfg: ExperimentConfig) -> tuple[str, object]:
    system, n, delta = _packing_system(cfg, "approx")
    params = SampleParams(
        epsilon=cfg.get("approx", "epsilon", float, delta / n),
        eta=cfg.get("approx", "eta", float, 0.25),
        q=cfg.get("approx", "q", float, 0.25),
        c=cfg.get("approx", "c", float, 4.0),
    )
    d = cfg.get("approx", "d", float, 3.0)
    report = relative_approx_experiment(system, params, d, cfg.trials, cfg.seed)
    return report.to_csv(), vars(report)


def _run_projection(cfg: ExperimentConfig) -> tuple[str, object]:
    compact = cfg.get("projection", "compact", bool, False)
    system, n, delta = _packing_system(cfg, "projection")
    if compact:
        k = cfg.get("projection", "k", int)
        d = cfg.get("projection", "d", float, 2.0)
        c = cfg.get("projection", "c", float, 4.0)
        freqs = compact_projection_experiment(
            system, delta, k, d, cfg.trials, cfg.seed, c
        )
        rows = [
            f"{freqs['trials']},{freqs['sample_size']},{freqs['injective']!r},"
            f"{freqs['length']!r},{freqs['joint']!r}"
        ]
        return (
            _csv_text("trials,sample_size,injective_freq,length_freq,joint_freq", rows),
            freqs,
        )
    d0 = cfg.get("projection", "d0", int, 3)
    check = projection_expectation_check(system, delta, d0, cfg.trials, cfg.seed)
    csv_out = _csv_text("lhs,rhs,se,trials", [check.csv_row()])
    obj = {
        "lhs": check.lhs,
        "rhs": check.rhs,
        "se": check.rhs_se,
        "trials": check.trials,
        "m": check.m,
        "exact": check.exact,
    }
    return csv_out, obj


def _run_mst(cfg: ExperimentConfig) -> tuple[str, object]:
    n = cfg.get("mst", "n", int, 128)
    k = cfg.get("mst", "k", int, 32)
    m_cap = cfg.get("mst", "m", int, 200)
    mu = cfg.get("mst", "mu", int, 64)
    eta = cfg.get("mst", "eta", float, 0.25)
    base = shallow_filter(_system(cfg, "mst"), k)
    if len(base) > m_cap:
        rng = spawn(cfg.seed, "mst_subsample", len(base))
        base = base.subsystem(np.sort(rng.permutation(len(base))[:m_cap]))
    exact = exact_mst(base)
    sketch = build_sketch(base, mu, cfg.seed)
    approx = approx_mst(base, sketch, eta)
    params = CsParams(
        d=cfg.get("mst", "d", float, 2.0),
        d1=cfg.get("mst", "d1", float, 1.0),
        d0=cfg.get("mst", "d0", int, 3),
    )
    bound = bound_tree_conflict(n, k, len(base), params)
    ratio = approx.total_conflict / max(exact.total_conflict, 1)
    header = "m,exact_conflict,approx_conflict,ratio,bound"
    row = (
        f"{len(base)},{exact.total_conflict},{approx.total_conflict},"
        f"{ratio!r},{bound!r}"
    )
    obj = {
        "m": len(base),
        "exact_conflict": exact.total_conflict,
        "approx_conflict": approx.total_conflict,
        "ratio": ratio,
        "bound": bound,
    }
    return _csv_text(header, [row]), obj


def _run_measures(cfg: ExperimentConfig) -> tuple[str, object]:
    n = cfg.get("measures", "n", int, 64)
    k = cfg.get("measures", "k", int, 16)
    m_cap = cfg.get("measures", "m", int, 100)
    measure = cfg.get("measures", "measure", str, "diameter")
    if "measures" not in cfg.sections:
        cfg.sections["measures"] = {}
    cfg.sections["measures"].setdefault("support", "clustered")
    pts = _points(cfg, "measures", n)
    builders = {"halfplanes": build_halfspaces, "balls": build_balls, "slabs": build_slabs}
    gen = cfg.get("measures", "id", str, "halfplanes")
    if gen not in builders:
        raise ConfigError(f"[measures] id: unknown generator '{gen}'")
    base = shallow_filter(builders[gen](pts), k)
    if len(base) > m_cap:
        rng = spawn(cfg.seed, "measures_subsample", len(base))
        base = base.subsystem(np.sort(rng.permutation(len(base))[:m_cap]))
    tree = exact_mst(base)
    walked = traverse_and_measure(base, tree, pts, measure)
    brute = brute_force_measure(base, pts, measure)
    obj = {
        "measure": measure,
        "m": len(base),
        "total_updates": walked.total_updates,
        "brute_force_updates": brute.total_updates,
        "ratio": walked.total_updates / max(brute.total_updates, 1),
        "values_match": all(
            abs(a - b) <= 1e-9 for a, b in zip(walked.values, brute.values)
        ),
    }
    return walked.to_csv(), obj


def _run_discrepancy(cfg: ExperimentConfig) -> tuple[str, object]:
    n = cfg.get("discrepancy", "n", int, 128)
    k = cfg.get("discrepancy", "k", int, 32)
    d = cfg.get("discrepancy", "d", int, 4)
    base = shallow_filter(_system(cfg, "discrepancy"), k)
    chi = random_coloring(base.n, cfg.seed)
    sums, disc = eval_coloring(base, chi)
    rows = []
    for i, (size, val) in enumerate(zip(base.lengths, sums)):
        bound = bound_disc_halfspaces(int(size), n, d) if size > 0 else 0.0
        rows.append(f"{i},{int(size)},{int(val)},{bound!r}")
    obj = {"disc": disc, "sets": len(base), "n": n, "k": k}
    return _csv_text("set_index,set_size,chi_value,predicted_bound", rows), obj


def _run_grid_lowerbound(cfg: ExperimentConfig) -> tuple[str, object]:
    n = cfg.get("grid", "n", int, 64)
    delta = cfg.get("grid", "delta", int, 4)
    system = build_rectangle_grid_dual(n, delta)
    expected = (n // delta) ** 2
    min_dist = kernels.min_pairwise_distance(system.words) if len(system) > 1 else 0
    lengths = system.lengths
    obj = {
        "n": n,
        "delta": delta,
        "cells": len(system),
        "expected_cells": expected,
        "min_distance": int(min_dist),
        "min_length": int(lengths.min()),
        "max_length": int(lengths.max()),
        "verified": bool(
            len(system) == expected
            and min_dist >= delta
            and (lengths == delta).all()
        ),
    }
    header = "n,delta,cells,expected_cells,min_distance,min_length,max_length,verified"
    row = (
        f"{n},{delta},{obj['cells']},{expected},{obj['min_distance']},"
        f"{obj['min_length']},{obj['max_length']},{obj['verified']}"
    )
    return _csv_text(header, [row]), obj


_RUNNERS = {
    "packing-scaling": _run_packing_scaling,
    "tail": _run_tail,
    "net": _run_net,
    "approx": _run_approx,
    "projection": _run_projection,
    "mst": _run_mst,
    "measures": _run_measures,
    "discrepancy": _run_discrepancy,
    "grid-lowerbound": _run_grid_lowerbound,
}


def run(
    config_path: str,
    seed: int | None = None,
    trials: int | None = None,
    output: str | None = None,
    fmt: str | None = None,
) -> int:
    """Execute a configured experiment; 0 ok, 1 config error, 2 runtime error."""
    try:
        cfg = ExperimentConfig.from_file(config_path)
        if seed is not None:
            cfg.seed = seed
        if trials is not None:
            if trials < 1:
                raise ConfigError("trials override must be >= 1")
            cfg.trials = trials
        if output is not None:
            cfg.output_path = output
        if fmt is not None:
            if fmt not in ("csv", "json"):
                raise ConfigError("format override must be csv or json")
            cfg.output_format = fmt
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    try:
        csv_text, obj = _RUNNERS[cfg.kind](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - harness boundary
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2
    payload = (
        csv_text
        if cfg.output_format == "csv"
        else json.dumps(obj, sort_keys=True, indent=2, default=float) + "\n"
    )
    if cfg.output_path:
        try:
            with open(cfg.output_path, "w", encoding="utf-8", newline="") as fh:
                fh.write(payload)
        except OSError as exc:
            print(f"runtime error: cannot write output: {exc}", file=sys.stderr)
            return 2
    else:
        sys.stdout.write(payload)
    return 0


def fit_exponents(
    csv_path: str, column: str, value_column: str = "packing_size"
) -> tuple[float, float]:
    """OLS slope and SE of log(value) against log(swept column) from a CSV."""
    with open(csv_path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        xs, ys = [], []
        for row in reader:
            if row.get(column) in (None, "", "summary"):
                continue
            try:
                xs.append(float(row[column]))
                ys.append(float(row[value_column]))
            except (KeyError, TypeError, ValueError):
                continue
    if len(xs) < 3:
        raise ValueError("need at least 3 usable rows")
    return fit_loglog(xs, ys)


# ---------------------------------------------------------------------------
# entry point


def _cmd_gen(args: argparse.Namespace) -> int:
    try:
        if args.generator == "grid":
            if args.delta is None:
                print("gen error: grid requires --delta", file=sys.stderr)
                return 1
            system = build_rectangle_grid_dual(args.n, args.delta)
        else:
            builders = {
                "halfplanes": build_halfspaces,
                "balls": build_balls,
                "slabs": build_slabs,
            }
            if args.generator not in builders:
                print(f"gen error: unknown generator '{args.generator}'", file=sys.stderr)
                return 1
            if args.support == "circle":
                pts = convex_position_points(args.n, args.seed)
            elif args.support == "clustered":
                pts = clustered_points(args.n, args.dim, args.seed)
            else:
                pts = random_points(args.n, args.dim, args.seed)
            system = builders[args.generator](pts)
    except ValueError as exc:
        print(f"gen error: {exc}", file=sys.stderr)
        return 1
    with open(args.output, "w", encoding="utf-8", newline="") as fh:
        fh.write(system.to_text())
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="shallowpack")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment config")
    p_run.add_argument("config")
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--trials", type=int, default=None)
    p_run.add_argument("--format", choices=("csv", "json"), default=None)
    p_run.add_argument("--output", default=None)

    p_fit = sub.add_parser("fit", help="fit a log-log exponent from a report CSV")
    p_fit.add_argument("csv")
    p_fit.add_argument("--col", required=True)
    p_fit.add_argument("--value-col", default="packing_size")

    p_gen = sub.add_parser("gen", help="generate a system and write it to a file")
    p_gen.add_argument("generator", choices=("halfplanes", "balls", "slabs", "grid"))
    p_gen.add_argument("-n", type=int, default=64)
    p_gen.add_argument("--dim", type=int, default=2)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--delta", type=int, default=None)
    p_gen.add_argument("--support", choices=("uniform", "circle", "clustered"), default="uniform")
    p_gen.add_argument("-o", "--output", required=True)

    args = parser.parse_args(argv)
    if args.command == "run":
        return run(args.config, args.seed, args.trials, args.output, args.format)
    if args.command == "fit":
        try:
            slope, se = fit_exponents(args.csv, args.col, args.value_col)
        except (OSError, ValueError) as exc:
            print(f"fit error: {exc}", file=sys.stderr)
            return 1
        print(f"slope={slope!r} se={se!r}")
        return 0
    return _cmd_gen(args)


if __name__ == "__main__":
    sys.exit(main())
