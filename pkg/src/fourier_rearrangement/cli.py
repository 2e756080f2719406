"""Command-line interface: ``frearr <subcommand> ...``.

Exit codes: 0 success, 2 unreadable or malformed field file, 3 domain
error (e.g. zero field, parameter out of range), 64 usage, 65 bad config.
Every run writes one JSON manifest: ``<output>.manifest.json`` next to
the primary output file, or the path given by ``--manifest``, or a single
line on stderr for commands that only print to stdout.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ContractError, FieldFormatError, RearrangementError, SearchFailure
from .functionals import (
    GNParams,
    WeightSpec,
    amt_functional,
    choquard_norm,
    choquard_norm_direct,
    hormander_norm,
    lp_even_fourier,
    lp_norm,
    weighted_norm_check,
    weinstein,
)
from .grid import Field, Space, field_checksum, forward_transform, inverse_transform, l2_norm, read_field, write_field
from .majorant import classify_equality, disconnected_equality_example, littlewood_counterexample, littlewood_search
from .multiplier import multiplier_from_dict, quadratic_form, sobolev_norm
from .rearrange import fourier_rearrange, partial_fourier_rearrange, radial_order
from .solver import config_from_dict, ground_state

EXIT_OK, EXIT_FORMAT, EXIT_DOMAIN, EXIT_USAGE, EXIT_CONFIG = 0, 2, 3, 64, 65


class UsageError(Exception):
    pass


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# --- output formatting ----------------------------------------------------


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def to_json(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON with every float written to 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "NaN"
        if math.isinf(x):
            return "Infinity" if x > 0 else "-Infinity"
        return fmt(x)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {to_json(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        return "[" + ", ".join(to_json(v, indent, _level + 1) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _write_csv(path_or_stream, header, rows):
    def cell(v):
        if isinstance(v, bool):
            return str(v).lower()
        if isinstance(v, (float, np.floating)):
            return fmt(v)
        return str(v)

    if isinstance(path_or_stream, (str, Path)):
        stream = open(path_or_stream, "w", newline="")
        close = True
    else:
        stream, close = path_or_stream, False
    try:
        w = csv.writer(stream, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([cell(v) for v in r])
    finally:
        if close:
            stream.close()


class Run:
    """Collects manifest data for one invocation."""

    def __init__(self, args: argparse.Namespace):
        self.command = args.command
        self.params = {k: v for k, v in vars(args).items() if k not in ("func", "command", "manifest")}
        self.manifest_path = getattr(args, "manifest", None)
        self.inputs: list[str] = []
        self.outputs: list[str] = []
        self.checksum: str | None = None
        self.start = time.perf_counter()

    def emit(self, primary: str | None = None):
        doc = {
            "command": self.command,
            "params": {k: (str(v) if isinstance(v, Path) else v) for k, v in self.params.items()},
            "inputs": self.inputs,
            "outputs": self.outputs,
            "wall_time_s": time.perf_counter() - self.start,
            "version": __version__,
            "grid_checksum": self.checksum,
            "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        }
        text = to_json(doc)
        target = self.manifest_path or (f"{primary}.manifest.json" if primary else None)
        if target:
            Path(target).write_text(text + "\n")
        else:
            sys.stderr.write(to_json(doc, indent=0).replace("\n", "") + "\n")


def _load(run: Run, path) -> Field:
    run.inputs.append(str(path))
    try:
        return read_field(path)
    except OSError as exc:
        raise FieldFormatError(f"cannot read {path}: {exc.strerror}") from exc


def _save(run: Run, f: Field, path):
    write_field(f, path)
    run.outputs.append(str(path))
    if run.checksum is None:
        run.checksum = field_checksum(f)


def _multiplier(text: str):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"--multiplier is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError("--multiplier must be a JSON object")
    return multiplier_from_dict(data)


# --- subcommands ----------------------------------------------------------


def cmd_rearrange(args, run: Run):
    f = _load(run, args.input)
    if args.partial_axis is None:
        out = fourier_rearrange(f, strict_real=args.strict_real)
    else:
        out = partial_fourier_rearrange(f, args.partial_axis)
    _save(run, out, args.output)
    run.emit(args.output)


def cmd_transform(args, run: Run):
    f = _load(run, args.input)
    direction = args.direction
    if direction == "auto":
        direction = "forward" if f.space == Space.PHYSICAL else "inverse"
    out = forward_transform(f) if direction == "forward" else inverse_transform(f)
    _save(run, out, args.output)
    run.emit(args.output)


def _norm_value(f: Field, args):
    name = args.name
    params: dict = {}
    oracle = None
    if name == "l2":
        value = l2_norm(f)
        oracle = l2_norm(forward_transform(f))
    elif name == "lp":
        params["p"] = args.p
        value = lp_norm(f, args.p)
        if float(args.p).is_integer() and int(args.p) % 2 == 0:
            oracle = lp_even_fourier(forward_transform(f), int(args.p) // 2) ** (1 / args.p)
    elif name == "weighted":
        params.update(p=args.p, weight=args.weight, alpha=args.alpha)
        chk = weighted_norm_check(f, _even(args.p), WeightSpec(args.weight, args.alpha))
        value, oracle = chk.physical, chk.fourier
    elif name == "choquard":
        params.update(p=args.p, alpha=args.alpha)
        value = choquard_norm(f, _even(args.p), args.alpha)
        if f.spec.size <= 4096:
            oracle = choquard_norm_direct(f, _even(args.p), args.alpha)
    elif name == "hormander":
        params.update(s=args.s, p=args.p)
        value = hormander_norm(f, args.s, args.p)
    elif name == "sobolev":
        params.update(s=args.s, split=args.split)
        value = sobolev_norm(f, args.s, split=args.split)
    elif name == "quadratic":
        if args.multiplier is None:
            raise UsageError("--multiplier is required for the quadratic form")
        params["multiplier"] = json.loads(args.multiplier)
        value = quadratic_form(f, _multiplier(args.multiplier))
    elif name == "amt":
        params.update(alpha=args.alpha, trunc=args.trunc)
        res = amt_functional(f, args.alpha, args.trunc)
        value, oracle = res.direct, res.series
        params["tail_bound"] = res.tail_bound
    elif name == "weinstein":
        params.update(s=args.s, p=args.p)
        value = weinstein(f, GNParams(f.spec.dim, args.s, _even(args.p)))
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(f"unknown norm {name}")
    return params, value, oracle


def _even(p) -> int:
    if not float(p).is_integer() or int(p) % 2:
        raise UsageError(f"p must be an even integer, got {p}")
    return int(p)


def cmd_norm(args, run: Run):
    f = _load(run, args.input)
    if f.space != Space.PHYSICAL:
        f = inverse_transform(f)
    run.checksum = field_checksum(f)
    params, value, oracle = _norm_value(f, args)
    doc = {"name": args.name, "params": params, "value": value}
    if oracle is not None:
        doc["oracle_value"] = oracle
        doc["gap"] = abs(value - oracle) / max(abs(value), abs(oracle), np.finfo(float).tiny)
    else:
        doc["gap"] = None
    sys.stdout.write(to_json(doc) + "\n")
    run.emit()


def cmd_classify(args, run: Run):
    f = _load(run, args.input)
    run.checksum = field_checksum(f)
    L = _multiplier(args.multiplier)
    report = classify_equality(f, L, args.p, tau=args.tau)
    sys.stdout.write(to_json(report.to_dict()) + "\n")
    run.emit()


def _read_config(path):
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    import jsonschema

    try:
        return data, config_from_dict(data)
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"config does not match schema 1: {exc.message}") from exc
    except ContractError as exc:
        raise ConfigError(f"invalid config: {exc}") from exc


def _write_solve(prefix: str, res, run: Run):
    _save(run, res.Q, f"{prefix}.frf")
    Path(f"{prefix}.json").write_text(to_json(res.diagnostics()) + "\n")
    run.outputs.append(f"{prefix}.json")
    _write_csv(f"{prefix}.csv", ["iteration", "residual"], enumerate(res.residual_history))
    run.outputs.append(f"{prefix}.csv")


def cmd_solve(args, run: Run):
    run.inputs.append(str(args.config))
    _, cfg = _read_config(args.config)
    res = ground_state(cfg)
    _write_solve(args.out, res, run)
    sys.stdout.write(to_json(res.diagnostics()) + "\n")
    run.emit(f"{args.out}.frf")


def _threads() -> int:
    raw = os.environ.get("SPECR_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError as exc:
        raise UsageError(f"SPECR_THREADS must be an integer, got {raw!r}") from exc
    if n < 1:
        raise UsageError("SPECR_THREADS must be >= 1")
    return n


def cmd_sweep(args, run: Run):
    run.inputs.append(str(args.config))
    data, base = _read_config(args.config)
    values = [float(v) for v in args.values.split(",") if v.strip()]
    if not values:
        raise UsageError("--values is empty")
    configs = []
    for v in values:
        try:
            if args.param == "p":
                configs.append(replace(base, p=_even(v)))
            else:
                configs.append(replace(base, omega_const=v))
        except ContractError as exc:
            raise ConfigError(f"sweep value {v}: {exc}") from exc
    workers = min(_threads(), len(configs))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(ground_state, configs))
    rows = [
        (v, r.residual, r.iterations, r.converged, r.objective, r.sign_changing, r.sharp_deviation)
        for v, r in zip(values, results)
    ]
    out = f"{args.out}.csv"
    _write_csv(out, [args.param, "residual", "iterations", "converged", "objective", "sign_changing", "sharp_deviation"], rows)
    run.outputs.append(out)
    run.params["threads"] = workers
    run.emit(out)


def cmd_counterexample(args, run: Run):
    prefix = args.out
    if args.kind == "littlewood":
        rows = [("p", args.p), ("lam", args.lam)]
        try:
            res = littlewood_counterexample(args.p, args.lam)
        except SearchFailure:
            search = littlewood_search(args.p)
            rows += [("torus_relative_gap", search.best_gap), ("status", "no violation")]
            _write_csv(f"{prefix}.csv", ["quantity", "value"], rows)
            run.outputs.append(f"{prefix}.csv")
            sys.stdout.write("no violation\n")
            run.emit(f"{prefix}.csv")
            return
        pattern = ";".join(f"{k}:{c.real:+g}" for k, c in res.torus.best.coefficients)
        rows += [
            ("pattern", pattern),
            ("torus_relative_gap", res.torus.best_gap),
            ("norm_f", lp_norm(res.f, args.p)),
            ("norm_majorant", lp_norm(res.majorant, args.p)),
            ("gap", res.gap),
            ("relative_gap", res.relative_gap),
            ("status", "violation" if res.gap > 0 else "no violation"),
        ]
        _save(run, res.f, f"{prefix}_f.frf")
        _save(run, res.majorant, f"{prefix}_majorant.frf")
    else:
        y = [float(v) for v in args.y.split(",")]
        res = disconnected_equality_example(y, args.alpha, args.beta)
        nf, ng = lp_norm(res.f, 4), lp_norm(res.g, 4)
        rows = [
            ("alpha", args.alpha),
            ("beta", args.beta),
            ("norm_f4", nf),
            ("norm_g4", ng),
            ("relative_l4_gap", abs(nf - ng) / ng),
            ("phase_residual", res.report.phase_residual),
            ("verdict", res.report.verdict),
        ]
        _save(run, res.f, f"{prefix}_f.frf")
        _save(run, res.g, f"{prefix}_g.frf")
    _write_csv(f"{prefix}.csv", ["quantity", "value"], rows)
    run.outputs.append(f"{prefix}.csv")
    run.emit(f"{prefix}.csv")


def _parse_slice(text: str) -> tuple[int, int]:
    try:
        axis, k = text.split("=")
        return int(axis), int(k)
    except ValueError as exc:
        raise argparse.ArgumentTypeError("slice must look like AXIS=K") from exc


def cmd_plotdata(args, run: Run):
    f = _load(run, args.input)
    run.checksum = field_checksum(f)
    spec = f.spec
    vals = f.values
    if args.radial:
        order = radial_order(spec, f.space)
        flat = vals.ravel()[order.permutation]
        coords = np.sqrt(order.squared_radius)
        header = ["radius", "re", "im", "modulus"]
    else:
        axis, k = args.slice
        if not 0 <= axis < spec.dim:
            raise ContractError(f"axis {axis} out of range for d={spec.dim}")
        idx = []
        for a in range(spec.dim):
            if a == axis:
                idx.append(slice(None))
            else:
                m = (spec.points[a] - 1) // 2
                if not -m <= k <= m:
                    raise ContractError(f"offset {k} outside axis {a}")
                idx.append(k + m)
        flat = vals[tuple(idx)]
        coords = spec.axis_coordinates(axis, f.space)
        header = ["coordinate", "re", "im", "modulus"]
    rows = zip(coords, flat.real, flat.imag, np.abs(flat))
    if args.out:
        _write_csv(args.out, header, rows)
        run.outputs.append(str(args.out))
        run.emit(str(args.out))
    else:
        buf = io.StringIO()
        _write_csv(buf, header, rows)
        sys.stdout.write(buf.getvalue())
        run.emit()


# --- parser ---------------------------------------------------------------


def _even_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from exc
    if v % 2 or v < 4:
        raise argparse.ArgumentTypeError(f"p must be an even integer >= 4, got {v}")
    return v


def _number(text: str) -> float:
    """Float or ``a/b`` fraction."""
    try:
        if "/" in text:
            a, b = text.split("/")
            return float(a) / float(b)
        return float(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="frearr", description="Fourier rearrangement toolkit")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_text, manifest=True):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        if manifest:
            p.add_argument("--manifest", help="write the run manifest here")
        return p

    p = add("rearrange", cmd_rearrange, "write f# (or the partial rearrangement)")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--partial-axis", type=int)
    p.add_argument("--strict-real", action="store_true", help="fail if f# is not real")

    p = add("transform", cmd_transform, "forward or inverse transform")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--direction", choices=("auto", "forward", "inverse"), default="auto")

    p = add("norm", cmd_norm, "evaluate a norm or functional; prints JSON")
    p.add_argument("input")
    p.add_argument("--name", required=True, choices=("l2", "lp", "weighted", "choquard", "hormander", "sobolev", "quadratic", "amt", "weinstein"))
    p.add_argument("--p", type=_number, default=2.0)
    p.add_argument("--s", type=_number, default=1.0)
    p.add_argument("--alpha", type=_number, default=1.0)
    p.add_argument("--weight", choices=("riesz", "bessel"), default="bessel")
    p.add_argument("--trunc", type=int, default=30)
    p.add_argument("--split", action="store_true")
    p.add_argument("--multiplier")

    p = add("classify", cmd_classify, "equality classification; prints JSON report")
    p.add_argument("input")
    p.add_argument("--multiplier", default='{"kind": "fractional_laplacian", "s": 1}')
    p.add_argument("--p", type=_even_int, default=4)
    p.add_argument("--tau", type=float, default=1e-8)

    p = add("solve", cmd_solve, "ground state from a JSON config")
    p.add_argument("config")
    p.add_argument("--out", default="solution")

    p = add("sweep", cmd_sweep, "ground states over a list of parameter values")
    p.add_argument("config")
    p.add_argument("--param", choices=("p", "omega_const"), required=True)
    p.add_argument("--values", required=True, help="comma separated")
    p.add_argument("--out", default="sweep")

    p = add("counterexample", cmd_counterexample, "majorant counterexamples")
    p.add_argument("kind", choices=("littlewood", "disconnected"))
    p.add_argument("--p", type=_number, default=3.0)
    p.add_argument("--lam", type=_number, default=1 / 64)
    p.add_argument("--y", default="6", help="comma separated separation vector")
    p.add_argument("--alpha", type=_number, default=0.0)
    p.add_argument("--beta", type=_number, default=math.pi / 2)
    p.add_argument("--out", default="counterexample")

    p = add("plotdata", cmd_plotdata, "CSV export (coordinate, re, im, modulus)")
    p.add_argument("input")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--radial", action="store_true")
    g.add_argument("--slice", type=_parse_slice, metavar="AXIS=K")
    p.add_argument("--out")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    run = Run(args)
    try:
        args.func(args, run)
    except UsageError as exc:
        sys.stderr.write(f"frearr: usage error: {exc}\n")
        return EXIT_USAGE
    except ConfigError as exc:
        sys.stderr.write(f"frearr: config error: {exc}\n")
        return EXIT_CONFIG
    except FieldFormatError as exc:
        sys.stderr.write(f"frearr: format error: {exc}\n")
        return EXIT_FORMAT
    except (RearrangementError, ValueError) as exc:
        sys.stderr.write(f"frearr: {exc}\n")
        return EXIT_DOMAIN
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
