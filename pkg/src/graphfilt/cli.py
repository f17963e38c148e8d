"""Command-line front end: graph generation, filter design, application, and
experiment sweeps with machine-readable outputs.

Every run resolves its configuration (JSON config file overridden by flags),
echoes it into the report, and writes outputs atomically.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import tempfile

import numpy as np

from . import experiments
from .arma import ArmaFilter, arma_apply_direct, arma_from_json, arma_to_json
from .cg import CgConfig, arma_apply_cg, trace_to_csv
from .design import (
    METHODS,
    DesignProblem,
    best_order_search,
    report_to_json,
    run_method,
)
from .errors import (
    ConjugateSymmetryError,
    CsvParseError,
    DimensionError,
    DivergenceError,
    GraphFiltError,
    InstabilityError,
    ParameterError,
)
from .fir import fir_apply, fir_design, fir_from_json, fir_to_json
from .graphs import (
    NORMALIZED_ADJACENCY,
    NORMALIZED_LAPLACIAN,
    build_er_graph,
    build_knn_directed,
    graph_from_json,
    graph_to_json,
    normalize,
    read_coords_csv,
    read_edge_csv,
)
from .spectral import (
    complex_disc_grid,
    eigendecompose,
    spectrum_grid,
    uniform_real_grid,
    validate_conjugate_pairs,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_PARSE = 2
EXIT_DIMENSION = 3
EXIT_INSTABILITY = 4
EXIT_DIVERGENCE = 5
EXIT_SYMMETRY = 6

_SHIFT_KINDS = {"adjacency": NORMALIZED_ADJACENCY, "laplacian": NORMALIZED_LAPLACIAN}


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".graphfilt-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _atomic_writer(path: str, write_fn) -> None:
    """Run write_fn against a temp path, then rename into place."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".graphfilt-")
    os.close(fd)
    try:
        write_fn(tmp)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _apply_config(parser: argparse.ArgumentParser, argv) -> None:
    """Install --config JSON values as subcommand defaults.

    Values from the file act as defaults, so flags on the command line win.
    Keys that match no flag of the invoked subcommand are rejected.
    """
    probe = argparse.ArgumentParser(add_help=False)
    probe.add_argument("--config")
    known, _ = probe.parse_known_args(argv)
    if not known.config:
        return
    with open(known.config) as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise CsvParseError(f"invalid config JSON: {exc}") from exc
    sub_action = next(
        a for a in parser._actions if isinstance(a, argparse._SubParsersAction)
    )
    command = next((t for t in argv if t in sub_action.choices), None)
    valid = {a.dest for a in parser._actions}
    if command is not None:
        valid |= {a.dest for a in sub_action.choices[command]._actions}
    valid -= {"help", "command", "config"}
    unknown = set(payload) - valid
    if unknown:
        raise ParameterError(f"unknown config keys: {sorted(unknown)}")
    if command is not None:
        sub_action.choices[command].set_defaults(**payload)
    else:
        parser.set_defaults(**payload)


def _read_signal_column(path):
    values = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["node_id", "value"]:
            raise CsvParseError("expected header 'node_id,value'", line=1)
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                values[int(row[0])] = float(row[1])
            except ValueError as exc:
                raise CsvParseError(str(exc), line=lineno) from exc
    n = max(values) + 1 if values else 0
    if sorted(values) != list(range(n)):
        raise CsvParseError("node ids must cover 0..n-1")
    return np.array([values[i] for i in range(n)])


def _write_signal_column(path, values):
    def write(tmp):
        with open(tmp, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["node_id", "value"])
            for i, v in enumerate(values):
                writer.writerow([i, repr(float(v))])

    _atomic_writer(path, write)


def _read_response_csv(path):
    values = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["re", "im"]:
            raise CsvParseError("expected header 're,im'", line=1)
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                values.append(complex(float(row[0]), float(row[1])))
            except ValueError as exc:
                raise CsvParseError(str(exc), line=lineno) from exc
    return np.array(values)


def _resolve_grid(args):
    if args.grid == "uniform-real":
        return uniform_real_grid(args.grid_size)
    if args.grid == "complex-disc":
        return complex_disc_grid(args.grid_size)
    if args.grid == "graph-spectrum":
        if not args.graph:
            raise ParameterError("--grid graph-spectrum requires --graph")
        op = _load_operator(args)
        return spectrum_grid(eigendecompose(op))
    raise ParameterError(f"unknown grid {args.grid!r}")


def _resolve_response(spec: str, grid):
    if spec == "allpass":
        return np.ones(grid.n, dtype=complex)
    if spec.startswith("lowpass:"):
        return experiments.ideal_lowpass(grid, float(spec.split(":", 1)[1]))
    if spec.startswith("file:"):
        h = _read_response_csv(spec.split(":", 1)[1])
        if len(h) != grid.n:
            raise DimensionError(f"response has {len(h)} rows, grid has {grid.n}")
        validate_conjugate_pairs(h, grid)
        return h
    raise ParameterError(f"unknown response spec {spec!r}")


def _load_operator(args):
    with open(args.graph) as fh:
        graph = graph_from_json(fh.read())
    return normalize(graph, _SHIFT_KINDS[args.shift])


def _load_filter(path):
    with open(path) as fh:
        payload = fh.read()
    kind = json.loads(payload).get("type")
    if kind == "fir":
        return fir_from_json(payload)
    if kind == "arma":
        return arma_from_json(payload)
    raise ParameterError(f"unknown filter type {kind!r}")


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def _cmd_gen_graph(args) -> int:
    if args.er:
        if args.n is None or args.p is None:
            raise ParameterError("--er requires --n and --p")
        graph = build_er_graph(args.n, args.p, args.seed)
    elif args.knn is not None:
        if not args.coords:
            raise ParameterError("--knn requires --coords")
        coords = read_coords_csv(args.coords, one_based=args.one_based)
        graph = build_knn_directed(coords, args.knn)
    elif args.edges:
        graph = read_edge_csv(args.edges, directed=args.directed, one_based=args.one_based)
    else:
        raise ParameterError("choose one of --er, --knn, --edges")
    _atomic_write(args.output, graph_to_json(graph) + "\n")
    return EXIT_OK


def _cmd_design(args) -> int:
    grid = _resolve_grid(args)
    h = _resolve_response(args.response, grid)
    if args.method == "fir":
        if args.k is None:
            raise ParameterError("--method fir requires --k")
        design = fir_design(grid, h, args.k)
        _atomic_write(args.output, fir_to_json(design.filter) + "\n")
        report = {
            "method": "fir", "order": args.k, "rnmse": design.rnmse,
            "imag_residue": design.imag_residue,
            "condition_estimate": design.condition_estimate,
        }
    else:
        if args.budget is not None:
            rep = best_order_search(
                grid, h, args.budget, args.method, le_budget=args.le_budget
            )
        else:
            if args.p is None or args.q is None:
                raise ParameterError("give --budget or both --p and --q")
            problem = DesignProblem(
                grid=grid, h_hat=h, ar_order=args.p, ma_order=args.q
            )
            rep = run_method(args.method, problem)
        _atomic_write(args.output, arma_to_json(rep.filter) + "\n")
        report = json.loads(report_to_json(rep))
        report["ar_order"] = rep.filter.ar_order
        report["ma_order"] = rep.filter.ma_order
    if args.report:
        report["config"] = _echo_config(args)
        _atomic_write(args.report, json.dumps(report, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def _cmd_apply(args) -> int:
    op = _load_operator(args)
    filt = _load_filter(args.filter)
    x = _read_signal_column(args.input)
    if x.shape != (op.n,):
        raise DimensionError(f"signal has {len(x)} values, graph has {op.n} nodes")
    if isinstance(filt, ArmaFilter):
        if args.solver == "direct":
            y = arma_apply_direct(filt, op, x)
        else:
            cfg = CgConfig(epsilon=args.cg_eps, max_iterations=args.cg_max_iter)
            y, trace = arma_apply_cg(filt, op, x, cfg)
            if args.trace:
                _atomic_writer(args.trace, lambda p: trace_to_csv(trace, p))
    else:
        y = fir_apply(filt, op, x)
    _write_signal_column(args.output, y)
    return EXIT_OK


def _cmd_experiment(args) -> int:
    if args.kind == "universal":
        report = experiments.universal_study(
            grid_kind=args.grid,
            n_points=args.grid_size,
            k_values=list(range(args.k_min, args.k_max + 1, args.k_step)),
            seed=args.seed,
            er_trials=args.trials,
        )
    elif args.kind == "interpolation":
        report = experiments.interpolation_study(trials=args.trials, seed=args.seed)
    elif args.kind == "compression":
        report = experiments.compression_study(
            k_values=tuple(range(args.k_min, args.k_max + 1, args.k_step)),
            trials=args.trials,
            seed=args.seed,
        )
    elif args.kind == "prediction":
        report = experiments.prediction_study(
            k_values=tuple(range(args.k_min, args.k_max + 1, args.k_step)),
            trials=args.trials,
            seed=args.seed,
        )
    else:
        raise ParameterError(f"unknown experiment {args.kind!r}")
    _atomic_writer(args.output, report.to_csv)
    return EXIT_OK


def _echo_config(args) -> dict:
    return {k: v for k, v in vars(args).items() if k != "func" and v is not None}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graphfilt",
        description="Design and apply ARMA/FIR graph filters.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-graph", help="generate or ingest a graph, write JSON")
    g.add_argument("--config", help="JSON config file with flag defaults")
    g.add_argument("--er", action="store_true", help="Erdos-Renyi random graph")
    g.add_argument("--n", type=int, help="node count for --er")
    g.add_argument("--p", type=float, help="link probability for --er")
    g.add_argument("--knn", type=int, help="directed k-nearest-neighbor graph")
    g.add_argument("--coords", help="coordinates CSV (id,x,y) for --knn")
    g.add_argument("--edges", help="edge-list CSV (src,dst,weight)")
    g.add_argument("--directed", action="store_true", help="edge list is directed")
    g.add_argument("--one-based", action="store_true", help="CSV indices start at 1")
    g.add_argument("--seed", type=int, default=0, help="RNG seed")
    g.add_argument("-o", "--output", required=True, help="output graph JSON path")
    g.set_defaults(func=_cmd_gen_graph)

    d = sub.add_parser("design", help="design a filter against a frequency grid")
    d.add_argument("--config", help="JSON config file with flag defaults")
    d.add_argument("--method", required=True, choices=("fir",) + METHODS)
    d.add_argument("--grid", required=True,
                   choices=("uniform-real", "complex-disc", "graph-spectrum"))
    d.add_argument("--grid-size", type=int, default=100, help="grid point count")
    d.add_argument("--graph", help="graph JSON (for graph-spectrum grids)")
    d.add_argument("--shift", choices=sorted(_SHIFT_KINDS), default="laplacian")
    d.add_argument("--response", required=True,
                   help="lowpass:<cutoff> | allpass | file:<path>")
    d.add_argument("--k", type=int, help="FIR order")
    d.add_argument("--p", type=int, help="AR order")
    d.add_argument("--q", type=int, help="MA order")
    d.add_argument("--budget", type=int, help="total order budget for (P,Q) search")
    d.add_argument("--le-budget", action="store_true",
                   help="search all P+Q <= budget instead of P+Q == budget")
    d.add_argument("-o", "--output", required=True, help="output filter JSON path")
    d.add_argument("--report", help="optional design report JSON path")
    d.set_defaults(func=_cmd_design)

    a = sub.add_parser("apply", help="apply a filter file to a signal file")
    a.add_argument("--config", help="JSON config file with flag defaults")
    a.add_argument("--filter", required=True, help="filter JSON path")
    a.add_argument("--graph", required=True, help="graph JSON path")
    a.add_argument("--shift", choices=sorted(_SHIFT_KINDS), default="laplacian")
    a.add_argument("--input", required=True, help="signal CSV (node_id,value)")
    a.add_argument("--solver", choices=("direct", "cg"), default="direct")
    a.add_argument("--cg-eps", type=float, default=1e-3)
    a.add_argument("--cg-max-iter", type=int, default=200)
    a.add_argument("--trace", help="optional CG trace CSV path")
    a.add_argument("-o", "--output", required=True, help="output signal CSV path")
    a.set_defaults(func=_cmd_apply)

    e = sub.add_parser("experiment", help="run a seeded experiment sweep")
    e.add_argument("--config", help="JSON config file with flag defaults")
    e.add_argument("kind", choices=("universal", "interpolation", "compression", "prediction"))
    e.add_argument("--grid", default="uniform-real",
                   choices=("uniform-real", "complex-disc", "er-spectrum"))
    e.add_argument("--grid-size", type=int, default=100)
    e.add_argument("--k-min", type=int, default=2)
    e.add_argument("--k-max", type=int, default=16)
    e.add_argument("--k-step", type=int, default=2)
    e.add_argument("--trials", type=int, default=5)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("-o", "--output", required=True, help="output report CSV path")
    e.set_defaults(func=_cmd_experiment)

    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
        args = parser.parse_args(argv)
        return args.func(args)
    except ConjugateSymmetryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SYMMETRY
    except (CsvParseError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except DimensionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIMENSION
    except InstabilityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INSTABILITY
    except DivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGENCE
    except (GraphFiltError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
