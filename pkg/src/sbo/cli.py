"""Command-line harness.

    sbo run <config>                          run one experiment
    sbo rates <suite>                         run a rate-verification suite
    sbo plot <csv> --metric m --out f.svg     render a trace column
    sbo gen <instance-spec> --out <file>      write an instance file

Configs are flat UTF-8 "dotted.key = value" files. Traces are CSV with the
fixed header below; reruns of the same config produce byte-identical CSV
(wall-clock timings go to report.txt, or into the CSV only with
output.timings = 1).
"""

from __future__ import annotations

import argparse
import concurrent.futures
import math
import os
import sys
from pathlib import Path

import numpy as np

from .bilevel import BilevelProblem
from .errors import (ConfigurationError, ContractViolation, DivergenceError,
                     ParseError, SboError)
from .metrics import fit_rate
from .problems import (InstanceSpec, build_instance, generate_instance_arrays,
                       save_instance)
from .solvers import (ConstantIstaSchedule, ConstantVfistaSchedule,
                      DiminishingSchedule, FixedEtaSchedule, NcConfig,
                      RunReport, SolverConfig, TraceRecord,
                      geometric_trace_ks, solve_fista_baseline,
                      solve_ipr_vfista, solve_ir_ista, solve_r_vfista)

CSV_HEADER = ("k,eta,theta,f_bar,h_bar,infeas,subopt,dist_xstar_sq,"
              "dist_lower,residual_sq,elapsed_ns")

EXIT_OK = 0
EXIT_RATE_FAIL = 1
EXIT_CONFIG = 2
EXIT_DIVERGED = 3


# ---------------------------------------------------------------------------
# Config files
# ---------------------------------------------------------------------------


def parse_kv_file(path) -> dict:
    """Flat "key = value" lines; '#' starts a comment; blank lines ignored."""
    out: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParseError(f"expected 'key = value', got {raw.strip()!r}", lineno)
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if not key or not value:
                raise ParseError(f"empty key or value in {raw.strip()!r}", lineno)
            if key in out:
                raise ParseError(f"duplicate key {key!r}", lineno)
            out[key] = value
    return out


def _get(cfg: dict, key: str, default=None, required: bool = False) -> str:
    if key in cfg:
        return cfg[key]
    if required:
        raise ConfigurationError(f"missing required config key {key!r}")
    return default


def instance_from_config(cfg: dict) -> InstanceSpec:
    name = _get(cfg, "instance.name", required=True)
    n = int(_get(cfg, "instance.n", required=True))
    seed = _get(cfg, "instance.seed")
    params = {
        key.split(".", 1)[1]: value for key, value in cfg.items()
        if key.startswith("instance.") and key not in ("instance.name", "instance.n",
                                                       "instance.seed")
    }
    return InstanceSpec(name=name, n=n, seed=int(seed) if seed else None, params=params)


def _resolve_eta(spec: str, problem: BilevelProblem) -> float:
    if spec == "weak_sharp":
        ref = problem.reference
        if (ref is None or ref.weak_sharp is None or ref.weak_sharp.order != 1.0
                or ref.subgradient is None or ref.subgradient.norm == 0.0):
            raise ConfigurationError(
                "eta = weak_sharp needs reference truth with order-1 weak-sharp "
                "constants and a subgradient at the optimum"
            )
        return ref.weak_sharp.alpha / (2.0 * ref.subgradient.norm)
    return float(spec)


def run_from_config(cfg: dict) -> RunReport:
    """Build the instance and solver from a parsed config and execute."""
    problem = build_instance(instance_from_config(cfg))
    solver = _get(cfg, "solver.name", required=True)
    big_k = int(_get(cfg, "solver.K", required=True))
    gamma = _get(cfg, "solver.gamma", "auto")
    gamma = gamma if gamma == "auto" else float(gamma)
    trace_every = _get(cfg, "solver.trace_every")
    trace_every = int(trace_every) if trace_every else None
    eta_spec = _get(cfg, "solver.eta")

    if solver == "ir_ista":
        schedule = (FixedEtaSchedule(_resolve_eta(eta_spec, problem))
                    if eta_spec else DiminishingSchedule())
        sc = SolverConfig(big_k=big_k, schedule=schedule, gamma=gamma,
                          trace_every=trace_every)
        return solve_ir_ista(problem, sc)
    if solver == "r_ista_const":
        if eta_spec:
            schedule = FixedEtaSchedule(_resolve_eta(eta_spec, problem))
        else:
            schedule = ConstantIstaSchedule(p=float(_get(cfg, "solver.p", "1")),
                                            big_k=big_k)
        sc = SolverConfig(big_k=big_k, schedule=schedule, gamma=gamma,
                          trace_every=trace_every)
        return solve_ir_ista(problem, sc)
    if solver == "r_vfista":
        if eta_spec:
            schedule = FixedEtaSchedule(_resolve_eta(eta_spec, problem))
        else:
            schedule = ConstantVfistaSchedule(
                p=float(_get(cfg, "solver.p", "3")),
                eta_bar=float(_get(cfg, "solver.eta_bar", "1.0")), big_k=big_k)
        sc = SolverConfig(big_k=big_k, schedule=schedule, gamma=gamma,
                          trace_every=trace_every)
        return solve_r_vfista(problem, sc)
    if solver == "ipr_vfista":
        nc = NcConfig(
            big_k=big_k,
            a=int(_get(cfg, "solver.a", "2")),
            eta_bar=float(_get(cfg, "solver.eta_bar", "1.0")),
            box_lower=float(_get(cfg, "solver.box_lower", "-10")),
            box_upper=float(_get(cfg, "solver.box_upper", "10")),
            allow_large_step=bool(int(_get(cfg, "solver.allow_large_step", "0"))),
        )
        return solve_ipr_vfista(problem, nc)
    if solver == "fista_baseline":
        records: list[TraceRecord] = []
        want = set(geometric_trace_ks(big_k))
        obj = problem.lower
        if gamma == "auto":
            gamma = 1.0 / obj.smooth.lipschitz if obj.smooth.lipschitz > 0 else 1.0

        def hook(k, x, value):
            if k in want:
                records.append(TraceRecord(
                    k=k, eta=None, theta=None, f_bar=problem.upper.value(x),
                    h_bar=value, infeas=None, subopt=None, dist_xstar_sq=None,
                    dist_lower=None, residual_sq=None, elapsed_ns=0))

        x, value = solve_fista_baseline(obj, big_k, gamma, x0=problem.initial_point,
                                        trace_hook=hook)
        return RunReport(
            solver="fista_baseline",
            config={"solver": "fista_baseline", "K": big_k, "gamma": gamma},
            x_final=x, trace=records, extras={"best_value": value})
    raise ConfigurationError(
        f"unknown solver {solver!r}; pick one of ir_ista, r_ista_const, "
        "r_vfista, ipr_vfista, fista_baseline"
    )


# ---------------------------------------------------------------------------
# Trace / report serialization
# ---------------------------------------------------------------------------


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def trace_to_csv(trace, include_timings: bool = False) -> str:
    lines = [CSV_HEADER]
    for r in trace:
        lines.append(",".join([
            str(r.k), _fmt(r.eta), _fmt(r.theta), _fmt(r.f_bar), _fmt(r.h_bar),
            _fmt(r.infeas), _fmt(r.subopt), _fmt(r.dist_xstar_sq),
            _fmt(r.dist_lower), _fmt(r.residual_sq),
            str(r.elapsed_ns) if include_timings else "",
        ]))
    return "\n".join(lines) + "\n"


def read_trace_csv(path) -> dict[str, list]:
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != CSV_HEADER:
        raise ParseError(f"unexpected trace header in {path}", 1)
    cols: dict[str, list] = {name: [] for name in CSV_HEADER.split(",")}
    names = CSV_HEADER.split(",")
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != len(names):
            raise ParseError(f"expected {len(names)} fields, got {len(parts)}", lineno)
        for name, part in zip(names, parts):
            cols[name].append(float(part) if part else None)
    return cols


_FITTABLE = ("infeas", "subopt", "dist_xstar_sq", "dist_lower", "residual_sq")


def attach_rate_fits(report: RunReport) -> None:
    """Fit the default-window slope of every positive metric column."""
    big_k = max((r.k for r in report.trace), default=0)
    if big_k < 2:
        return
    window = (max(1, big_k // 10), big_k)
    for name in _FITTABLE:
        samples = [(r.k, getattr(r, name)) for r in report.trace]
        try:
            report.rate_fits[name] = fit_rate(samples, window)
        except ConfigurationError:
            continue


def report_to_text(report: RunReport) -> str:
    lines = [f"schema_version = {report.schema_version}",
             f"solver = {report.solver}"]
    for key in sorted(report.config):
        if key == "solver":
            continue
        lines.append(f"config.{key} = {_fmt(report.config[key])}")
    x = report.x_final
    lines.append(f"final.norm = {_fmt(float(np.linalg.norm(x)))}")
    if report.trace:
        last = report.trace[-1]
        for name in ("f_bar", "h_bar", "infeas", "subopt", "dist_xstar_sq",
                     "dist_lower", "residual_sq"):
            value = getattr(last, name)
            if value is not None:
                lines.append(f"final.{name} = {_fmt(value)}")
    for key in sorted(report.extras):
        value = report.extras[key]
        if isinstance(value, (int, float)):
            lines.append(f"extras.{key} = {_fmt(value)}")
    for name in sorted(report.rate_fits):
        fit = report.rate_fits[name]
        lines.append(f"fit.{name}.slope = {_fmt(fit.slope)}")
        lines.append(f"fit.{name}.r_squared = {_fmt(fit.r_squared)}")
        lines.append(f"fit.{name}.window = {fit.window[0]}:{fit.window[1]}")
        lines.append(f"fit.{name}.n_samples = {fit.n_samples}")
    # wall-clock footer: excluded from the determinism contract
    lines.append(f"wall_clock_ns = {report.wall_ns}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# SVG line plots
# ---------------------------------------------------------------------------

_W, _H = 640.0, 480.0
_ML, _MR, _MT, _MB = 70.0, 20.0, 20.0, 50.0


def render_svg(xs, ys, logx: bool = False, logy: bool = False,
               xlabel: str = "k", ylabel: str = "value") -> str:
    """Self-contained SVG line chart of one data series."""
    pts = [(x, y) for x, y in zip(xs, ys)
           if y is not None and (not logy or y > 0) and (not logx or x > 0)]
    if len(pts) < 2:
        raise ConfigurationError("plot needs at least 2 plottable points")
    tx = (lambda v: math.log10(v)) if logx else (lambda v: v)
    ty = (lambda v: math.log10(v)) if logy else (lambda v: v)
    px = [tx(x) for x, _ in pts]
    py = [ty(y) for _, y in pts]
    x0, x1 = min(px), max(px)
    y0, y1 = min(py), max(py)
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0
    inner_w = _W - _ML - _MR
    inner_h = _H - _MT - _MB

    def sx(v):
        return _ML + (v - x0) / (x1 - x0) * inner_w

    def sy(v):
        return _MT + (y1 - v) / (y1 - y0) * inner_h

    coords = " ".join(f"{sx(a):.3f},{sy(b):.3f}" for a, b in zip(px, py))
    tick_lines = []
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        vx, vy = x0 + frac * (x1 - x0), y0 + frac * (y1 - y0)
        gx, gy = sx(vx), sy(vy)
        lx = f"{10**vx:.3g}" if logx else f"{vx:.3g}"
        ly = f"{10**vy:.3g}" if logy else f"{vy:.3g}"
        tick_lines.append(
            f'<line x1="{gx:.3f}" y1="{_H - _MB:.3f}" x2="{gx:.3f}" '
            f'y2="{_H - _MB + 6:.3f}" stroke="#333"/>'
            f'<text x="{gx:.3f}" y="{_H - _MB + 20:.3f}" font-size="11" '
            f'text-anchor="middle">{lx}</text>'
            f'<line x1="{_ML - 6:.3f}" y1="{gy:.3f}" x2="{_ML:.3f}" '
            f'y2="{gy:.3f}" stroke="#333"/>'
            f'<text x="{_ML - 10:.3f}" y="{gy + 4:.3f}" font-size="11" '
            f'text-anchor="end">{ly}</text>'
        )
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W:.0f}" height="{_H:.0f}" '
        f'viewBox="0 0 {_W:.0f} {_H:.0f}">'
        f'<rect width="{_W:.0f}" height="{_H:.0f}" fill="white"/>'
        f'<rect x="{_ML:.1f}" y="{_MT:.1f}" width="{inner_w:.1f}" '
        f'height="{inner_h:.1f}" fill="none" stroke="#333"/>'
        + "".join(tick_lines)
        + f'<text x="{_ML + inner_w / 2:.1f}" y="{_H - 8:.1f}" font-size="13" '
          f'text-anchor="middle">{xlabel}</text>'
        + f'<text x="16" y="{_MT + inner_h / 2:.1f}" font-size="13" '
          f'text-anchor="middle" transform="rotate(-90 16 {_MT + inner_h / 2:.1f})">'
          f'{ylabel}</text>'
        + f'<polyline fill="none" stroke="#1f77b4" stroke-width="1.5" points="{coords}"/>'
        + "</svg>\n"
    )


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_run(config_path: str) -> int:
    try:
        cfg = parse_kv_file(config_path)
        out_dir = Path(_get(cfg, "output.dir", required=True))
        timings = bool(int(_get(cfg, "output.timings", "0")))
        plots = _get(cfg, "output.plots", "")
    except (ConfigurationError, ParseError, OSError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        report = run_from_config(cfg)
    except (ConfigurationError, ContractViolation, ParseError, OSError,
            ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DivergenceError as exc:
        # keep whatever was traced up to the last finite record
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "trace.csv").write_text(
            trace_to_csv(getattr(exc, "trace", [])), encoding="utf-8")
        (out_dir / "report.txt").write_text(
            f"diverged_at_step = {exc.k}\nerror = {exc}\n", encoding="utf-8")
        print(f"runtime divergence: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    report.config.update(
        {k: v for k, v in cfg.items() if k.startswith("instance.")})
    attach_rate_fits(report)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "trace.csv").write_text(
        trace_to_csv(report.trace, include_timings=timings), encoding="utf-8")
    (out_dir / "report.txt").write_text(report_to_text(report), encoding="utf-8")
    for metric in [m.strip() for m in plots.split(",") if m.strip()]:
        try:
            xs = [r.k for r in report.trace]
            ys = [getattr(r, metric) for r in report.trace]
            svg = render_svg(xs, ys, logx=True, logy=True, xlabel="k", ylabel=metric)
        except (AttributeError, ConfigurationError) as exc:
            print(f"config error: cannot plot {metric!r}: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        (out_dir / f"plot_{metric}.svg").write_text(svg, encoding="utf-8")
    print(f"ok: wrote {out_dir / 'trace.csv'}")
    return EXIT_OK


def _parse_suite_row(line: str, lineno: int) -> dict:
    row: dict[str, str] = {}
    for token in line.split():
        if "=" not in token:
            raise ParseError(f"expected key=value tokens, got {token!r}", lineno)
        key, _, value = token.partition("=")
        row[key] = value
    for req in ("metric", "slope", "tol"):
        if req not in row:
            raise ParseError(f"suite row missing {req!r}", lineno)
    if "config" not in row:
        raise ParseError("suite row missing 'config'", lineno)
    return row


def _selftest_samples(spec: str):
    # selftest:powerlaw:exp=-1,coeff=7[,wobble=0.01]
    parts = spec.split(":")
    params = {}
    if len(parts) > 2 and parts[2]:
        for item in parts[2].split(","):
            key, _, value = item.partition("=")
            params[key] = float(value)
    exponent = params.get("exp", -1.0)
    coeff = params.get("coeff", 1.0)
    wobble = params.get("wobble", 0.0)
    ks = range(1, 1001)
    return [(k, coeff * k ** exponent * (1.0 + wobble * math.sin(k))) for k in ks]


def _run_suite_row(row: dict, base_dir: Path) -> tuple[bool, str]:
    label = row.get("label", row["config"])
    metric = row["metric"]
    expected = float(row["slope"])
    tol = float(row["tol"])
    min_samples = int(row.get("min_samples", "5"))
    try:
        if row["config"].startswith("selftest:"):
            samples = _selftest_samples(row["config"])
            window = (int(row.get("kmin", 1)), int(row.get("kmax", 10**9)))
            fit = fit_rate(samples, window, min_samples=min_samples)
        elif row.get("mode") == "finals":
            ks = [int(v) for v in row["ks"].split(",")]
            cfg = parse_kv_file(base_dir / row["config"])
            samples = []
            for k in ks:
                cfg_k = dict(cfg)
                cfg_k["solver.K"] = str(k)
                rep = run_from_config(cfg_k)
                value = getattr(rep.trace[-1], metric) if rep.trace else None
                if metric == "residual_sq" and "best_residual_sq" in rep.extras:
                    value = rep.extras["best_residual_sq"]
                samples.append((k, value))
            fit = fit_rate(samples, (min(ks), max(ks)), min_samples=min_samples)
        else:
            cfg = parse_kv_file(base_dir / row["config"])
            rep = run_from_config(cfg)
            big_k = max(r.k for r in rep.trace)
            window = (int(row.get("kmin", max(1, big_k // 10))),
                      int(row.get("kmax", big_k)))
            samples = [(r.k, getattr(r, metric)) for r in rep.trace]
            fit = fit_rate(samples, window, min_samples=min_samples)
    except SboError as exc:
        return False, f"FAIL {label}: {exc}"
    ok = abs(fit.slope - expected) <= tol if row.get("bound") != "upper" \
        else fit.slope <= expected + tol
    verdict = "PASS" if ok else "FAIL"
    return ok, (f"{verdict} {label}: metric={metric} slope={fit.slope:+.4f} "
                f"expected={expected:+.3f}+/-{tol:.3f} r2={fit.r_squared:.4f} "
                f"n={fit.n_samples}")


def cmd_rates(suite_path: str) -> int:
    try:
        base_dir = Path(suite_path).resolve().parent
        rows = []
        with open(suite_path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if line:
                    rows.append(_parse_suite_row(line, lineno))
    except (ParseError, OSError) as exc:
        print(f"suite error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    workers = int(os.environ.get("SBO_THREADS", "0")) or (os.cpu_count() or 1)
    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(lambda r: _run_suite_row(r, base_dir), rows))
    all_ok = True
    for ok, message in results:
        print(message)
        all_ok = all_ok and ok
    return EXIT_OK if all_ok else EXIT_RATE_FAIL


def cmd_plot(csv_path: str, metric: str, out_svg: str, logx: bool, logy: bool) -> int:
    try:
        cols = read_trace_csv(csv_path)
        if metric not in cols:
            raise ConfigurationError(
                f"no column {metric!r} in {csv_path}; have {list(cols)}")
        svg = render_svg(cols["k"], cols[metric], logx=logx, logy=logy,
                         xlabel="k", ylabel=metric)
    except (SboError, OSError) as exc:
        print(f"plot error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    Path(out_svg).write_text(svg, encoding="utf-8")
    print(f"ok: wrote {out_svg}")
    return EXIT_OK


def parse_instance_arg(spec: str) -> InstanceSpec:
    """name:key=value,key=value with n required, seed optional."""
    name, _, rest = spec.partition(":")
    params: dict[str, str] = {}
    if rest:
        for item in rest.split(","):
            key, eq, value = item.partition("=")
            if not eq:
                raise ConfigurationError(f"bad instance parameter {item!r}")
            params[key.strip()] = value.strip()
    if "n" not in params:
        raise ConfigurationError("instance spec needs n=<dimension>")
    n = int(params.pop("n"))
    seed = params.pop("seed", None)
    return InstanceSpec(name=name, n=n, seed=int(seed) if seed else None,
                        params=params)


def cmd_gen(spec: str, out: str) -> int:
    try:
        inst = parse_instance_arg(spec)
        a, b = generate_instance_arrays(inst)
        params = dict(inst.params)
        params["n"] = inst.n
        if inst.seed is not None:
            params["seed"] = inst.seed
        save_instance(out, inst.name, params, a, b)
    except (SboError, ValueError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(f"ok: wrote {out}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="sbo", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one experiment config")
    p_run.add_argument("config")

    p_rates = sub.add_parser("rates", help="run a rate-verification suite")
    p_rates.add_argument("suite")

    p_plot = sub.add_parser("plot", help="render a trace metric to SVG")
    p_plot.add_argument("csv")
    p_plot.add_argument("--metric", required=True)
    p_plot.add_argument("--out", required=True)
    p_plot.add_argument("--logx", action="store_true")
    p_plot.add_argument("--logy", action="store_true")

    p_gen = sub.add_parser("gen", help="write an instance file")
    p_gen.add_argument("spec")
    p_gen.add_argument("--out", required=True)

    args = parser.parse_args(argv)
    if args.command == "run":
        return cmd_run(args.config)
    if args.command == "rates":
        return cmd_rates(args.suite)
    if args.command == "plot":
        return cmd_plot(args.csv, args.metric, args.out, args.logx, args.logy)
    if args.command == "gen":
        return cmd_gen(args.spec, args.out)
    parser.error("unknown command")
    return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
