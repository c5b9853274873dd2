"""Command line front end.

Exit codes: 0 success, 1 usage / I/O / config errors, 2 regime or domain
errors (the attempt probability leaves the Lambert W domain).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from typing import Optional, Sequence

from . import experiments as ex
from .config import ExperimentSpec, spec_from_dict
from .errors import ConfigError, DomainError, EponError, RegimeError

COMMANDS = {
    "analyze": "analyze",
    "sweep-omega": "sweep_omega",
    "sweep-h": "sweep_h",
    "simulate": "simulate",
    "fig6": "fig6",
    "fig7": "fig7",
    "fig8": "fig8",
    "fig9": "fig9",
    "fig11": "fig11",
}

FIG6_COLUMNS = ["omega", "root_d", "root_u", "root_s", "lambda_out_d", "lambda_out_s"]
FIG8_COLUMNS = ["h", "omega_m1"]
FIG9_COLUMNS = ["h", "pi_r", "lower_bound", "upper_bound", "minus_alpha"]
FIG11_COLUMNS = ["omega", "e_d_analytic", "e_d_sim", "eta_analytic", "eta_sim"]
TRACE_COLUMNS = ["window_index", "time_s", "frac_r", "n_attempts", "n_successes"]
SUMMARY_COLUMNS = ["pi_r_hat", "se", "lambda_out_hat", "mean_delay_s", "mean_residual_s",
                   "efficiency_hat", "seed", "replications", "replication"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def format_value(value) -> str:
    """CSV cell: empty for missing, 17 significant digits for reals."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def render_csv(rows: list[dict], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(row.get(c)) for c in columns])
    return buf.getvalue()


def render_json(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=False, allow_nan=True) + "\n"


def _emit(text: str, path: Optional[str]) -> None:
    if not path or path == "-":
        sys.stdout.write(text)
        return
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _workers() -> int:
    raw = os.environ.get("EPONSIM_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ConfigError(f"EPONSIM_THREADS must be an integer, got {raw!r}")


def _rows_output(rows: list[dict], columns: Sequence[str], fmt: str, path: Optional[str]) -> None:
    if fmt == "json":
        _emit(render_json([{c: r.get(c) for c in columns} for r in rows]), path)
    else:
        _emit(render_csv(rows, columns), path)


def _prefix(spec: ExperimentSpec, out: Optional[str], default: str) -> str:
    return out or spec.output_path or default


def _write_traces(labelled, prefix: str, fmt: str) -> list[dict]:
    summaries = []
    for label, trace in labelled:
        path = f"{prefix}_{label}trace.csv" if label else f"{prefix}_trace.csv"
        _emit(render_csv(ex.trace_rows(trace), TRACE_COLUMNS), path)
        summaries.append(ex.summary_row(trace))
    return summaries


def run_spec(spec: ExperimentSpec, out: Optional[str], fmt: Optional[str]) -> None:
    kind = spec.kind
    path = out or spec.output_path or None
    values = spec.sweep.values() if spec.sweep else None
    if kind == "analyze":
        doc = ex.analyze_document(spec.params, spec.exact_h)
        if fmt == "csv":
            rows = [{k: v for k, v in r.items() if k != "delay"} for r in doc["roots"]]
            columns = ["pi_r", "role", "multiplicity", "pi_a", "pi_f", "g", "p_suc", "lambda_out"]
            _emit(render_csv(rows, columns), path)
        else:
            _emit(render_json(doc), path)
    elif kind == "fig6":
        _rows_output(ex.fig6_rows(spec.params, values, spec.exact_h), FIG6_COLUMNS, fmt, path)
    elif kind == "sweep_omega":
        rows = ex.sweep_omega_rows(spec.params, values, spec.exact_h)
        _rows_output(rows, list(rows[0]) if rows else ["omega"], fmt, path)
    elif kind == "sweep_h":
        rows = ex.sweep_h_rows(spec.params, values)
        _rows_output(rows, list(rows[0]) if rows else ["h"], fmt, path)
    elif kind == "fig8":
        _rows_output(ex.fig8_rows(spec.params, values), FIG8_COLUMNS, fmt, path)
    elif kind == "fig9":
        factor = float(spec.options.get("omega_factor", 1.0))
        _rows_output(ex.fig9_rows(spec.params, values, factor), FIG9_COLUMNS, fmt, path)
    elif kind == "fig11":
        rows = ex.fig11_rows(spec.params, values, spec.sim, spec.exact_h, _workers())
        _rows_output(rows, FIG11_COLUMNS, fmt, path)
    elif kind == "simulate":
        prefix = _prefix(spec, out, "simulate")
        traces = ex.simulate(spec.sim, _workers())
        multi = len(traces) > 1
        labelled = [(f"r{t.replication:03d}_" if multi else "", t) for t in traces]
        summaries = _write_traces(labelled, prefix, fmt)
        _emit(render_csv(summaries, SUMMARY_COLUMNS), f"{prefix}_summary.csv")
    elif kind == "fig7":
        prefix = _prefix(spec, out, "fig7")
        panels = str(spec.options.get("panels", "abc"))
        runs = ex.fig7_runs(spec.sim, panels, _workers())
        labelled, meta = [], []
        for panel, init, trace in runs:
            labelled.append((f"{panel}_init{round(init * 1e4):05d}_r{trace.replication:03d}_", trace))
            meta.append({"panel": panel, "omega": trace.config.params.max_wait, "init_fraction_r": init})
        summaries = _write_traces(labelled, prefix, fmt)
        rows = [dict(m, **s) for m, s in zip(meta, summaries)]
        columns = ["panel", "omega", "init_fraction_r", *SUMMARY_COLUMNS, "final_frac_r"]
        _emit(render_csv(rows, columns), f"{prefix}_summary.csv")
    else:  # pragma: no cover - guarded by spec_from_dict
        raise ConfigError(f"unhandled kind {kind!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="eponsim", description="EPON registration stability, delay and simulation")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", metavar="PATH", help="JSON experiment config")
        p.add_argument("--out", metavar="PATH", help="output file (or prefix for simulation outputs)")
        p.add_argument("--seed", type=int, help="override the simulation seed")
        p.add_argument("--replications", type=int, help="override the replication count")
        p.add_argument("--format", choices=("csv", "json"), help="output format")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override a system parameter, e.g. --set max_wait=300us")
    return parser


def _load(args) -> ExperimentSpec:
    kind = COMMANDS[args.command]
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{args.config}: invalid JSON: {exc}") from exc
    else:
        data = {}
    data = dict(data)
    params = dict(data.get("params", {}))
    for item in args.set:
        if "=" not in item:
            raise UsageError(f"--set expects KEY=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        params[key.strip()] = value.strip()
    data["params"] = params
    sim = dict(data.get("sim", {}))
    if args.seed is not None:
        sim["seed"] = args.seed
    if args.replications is not None:
        sim["replications"] = args.replications
    data["sim"] = sim
    return spec_from_dict(data, kind)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        spec = _load(args)
        default_fmt = "json" if spec.kind == "analyze" else "csv"
        run_spec(spec, args.out, args.format or default_fmt)
    except UsageError as exc:
        print(f"eponsim: error: {exc}", file=sys.stderr)
        return 1
    except (RegimeError, DomainError) as exc:
        print(f"eponsim: regime error: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, OSError, EponError, ValueError) as exc:
        print(f"eponsim: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
