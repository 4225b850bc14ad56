"""Declarative experiment runner.

One spec file = one task; outputs are CSV/JSON artifacts whose headers echo
every parameter plus the sha256 of the spec, so identical spec + seed give
byte-identical numeric bodies.  Exit codes: 0 success (soft flags such as
guarantee_missed only warn), 1 hard assertion or budget failure, 2 spec
validation error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict
from fractions import Fraction
from pathlib import Path

from . import __version__
from .covers import min_subcover, pullback_iterate
from .entropy import (NEG_INF, amenable_measure_trace, amenable_topological_trace,
                      check_amenable_agreement, check_variational, entropy_pair_scan,
                      partition_count_bound, sofic_measure_trace,
                      sofic_topological_trace)
from .errors import ResourceBudgetError, SoficLabError, SpecError
from .groups import FiniteSubset, folner_set
from .microstates import MeasureFilter, count_cover, enumerate_microstates_both
from .sofic import freeness_defect, mult_defect
from .specfile import (build_cover, build_measure, build_pattern, build_sigma,
                       build_system, build_test_functions, cross_validate,
                       load_spec, spec_hash)
from .symbolic import as_fraction
from .tiling import amenable_exact_tile, sofic_quasi_tile


def _fmt(x) -> str:
    if isinstance(x, Fraction):
        return repr(float(x))
    if isinstance(x, float):
        return repr(x)  # '-inf' for the sentinel, '.' decimal, no locale
    return str(x)


class ArtifactWriter:
    def __init__(self, out_dir: Path, prefix: str, spec_sha: str, task: str, params: dict):
        self.out_dir = out_dir
        self.prefix = prefix
        self.header = [
            f"# soficlab {__version__}",
            f"# spec_sha256={spec_sha}",
            f"# task={task}",
            f"# params={json.dumps(params, sort_keys=True, default=str)}",
        ]
        self.written = []

    def csv(self, name: str, columns, rows) -> Path:
        path = self.out_dir / f"{self.prefix}_{name}.csv"
        with open(path, "w") as fh:
            for line in self.header:
                fh.write(line + "\n")
            fh.write(",".join(columns) + "\n")
            for row in rows:
                fh.write(",".join(_fmt(x) for x in row) + "\n")
        self.written.append(path)
        return path

    def json(self, name: str, payload: dict) -> Path:
        path = self.out_dir / f"{self.prefix}_{name}.json"
        body = {
            "soficlab_version": __version__,
            "spec_sha256": self.header[1].split("=", 1)[1],
        }
        body.update(payload)
        with open(path, "w") as fh:
            json.dump(body, fh, indent=2, sort_keys=True, default=str)
            fh.write("\n")
        self.written.append(path)
        return path


def _deltas(params):
    vals = params.get("deltas", params.get("delta"))
    if vals is None:
        raise SpecError("missing delta grid", field="params.deltas")
    if not isinstance(vals, list):
        vals = [vals]
    return [as_fraction(v) for v in vals]


def _sigma_stages(system, params):
    stages = params["stages"]
    return [build_sigma(system, params["sigma"], stage_value=n) for n in stages]


def _element_name(system, g):
    return system.group.element_name(system.group.coerce(g))


# task handlers ------------------------------------------------------------------


def _task_language(system, spec, params, writer, budget):
    window = system.window(params["window"])
    values = system.language_values(window, budget=budget)
    rows = [(i, "".join(map(str, v))) for i, v in enumerate(values)]
    writer.csv("language", ("index", "pattern"), rows)
    writer.json("language_summary", {
        "window_size": len(window), "count": len(values),
    })
    return 0, []


def _task_defects(system, spec, params, writer, budget):
    rows = []
    for i, n in enumerate(params["stages"]):
        sigma = build_sigma(system, params["sigma"], stage_value=n)
        for s, t in params["pairs"]:
            gs, gt = system.group.coerce(s), system.group.coerce(t)
            md = mult_defect(sigma, gs, gt)
            fd = freeness_defect(sigma, gs, gt) if gs != gt else ""
            rows.append((i, sigma.d,
                         f"{_element_name(system, gs)}|{_element_name(system, gt)}",
                         md, fd))
    writer.csv("defects", ("i", "d_i", "pair", "mult_defect", "freeness_defect"), rows)
    return 0, []


def _task_microstates(system, spec, params, writer, budget):
    cover = build_cover(system, params.get("cover"))
    window = system.window(params["window"])
    F = [system.group.coerce(g) for g in params["F"]]
    mf = None
    if "filter" in params:
        fspec = params["filter"]
        measure = build_measure(system, spec["measures"][fspec["measure"]])
        functions = build_test_functions(system, fspec.get("functions", ()))
        mf = MeasureFilter.build(measure, functions,
                                 as_fraction(fspec.get("delta", params.get("delta"))))
    rows = []
    for delta in _deltas(params):
        for n in params["stages"]:
            sigma = build_sigma(system, params["sigma"], stage_value=n)
            try:
                inner, outer = enumerate_microstates_both(
                    system, F, delta, sigma, window, measure_filter=mf, budget=budget)
            except ResourceBudgetError as exc:
                raise ResourceBudgetError(
                    f"stage d={sigma.d}, delta={float(delta)}: {exc}",
                    dp_prunable=exc.dp_prunable) from exc
            rows.append((sigma.d, len(inner), len(outer),
                         count_cover(inner, cover), count_cover(outer, cover)))
    writer.csv("microstates", ("d", "m_inner", "m_outer", "n_inner", "n_outer"), rows)
    return 0, []


def _trace_rows(trace, F_id, delta):
    out = []
    for r in trace.rows:
        out.append((trace.kind, r.stage, r.d, F_id, delta,
                    r.count_inner, r.count_outer, r.value_inner, r.value_outer))
    return out


def _task_entropy_sofic(system, spec, params, writer, budget):
    cover = build_cover(system, params.get("cover"))
    window = system.window(params["window"])
    F = [system.group.coerce(g) for g in params["F"]]
    F_id = ";".join(_element_name(system, g) for g in F)
    maps = _sigma_stages(system, params)
    measure = None
    L = ()
    if "measure" in params:
        measure = build_measure(system, spec["measures"][params["measure"]])
        L = build_test_functions(system, params.get("L", ()))
    rows = []
    for delta in _deltas(params):
        if measure is None:
            tr = sofic_topological_trace(system, cover, F, delta, maps, window,
                                         budget=budget)
        else:
            tr = sofic_measure_trace(system, cover, measure, L, F, delta, maps,
                                     window, budget=budget)
        rows.extend(_trace_rows(tr, F_id, delta))
    writer.csv("trace", ("kind", "i", "d", "F_id", "delta",
                         "count_inner", "count_outer", "value_inner", "value_outer"), rows)
    return 0, []


def _task_entropy_amenable(system, spec, params, writer, budget):
    cover = build_cover(system, params.get("cover"))
    ns = params["ns"]
    measure = None
    if "measure" in params:
        measure = build_measure(system, spec["measures"][params["measure"]])
        tr = amenable_measure_trace(system, cover, measure, ns, budget=budget)
    else:
        tr = amenable_topological_trace(system, cover, ns, budget=budget)
    columns = ["n", "size_F", "count", "entropy", "value"]
    rows = [[r.n, r.size, r.count, r.entropy, r.value] for r in tr.rows]
    if measure is not None and "a" in params:
        # the covers dump: append b_nu(F_n, a, V) per stage
        from .covers import partial_cover_count
        from .groups import folner_set

        a = as_fraction(params["a"])
        columns.append("b_nu")
        for row, n in zip(rows, ns):
            row.append(partial_cover_count(measure, folner_set(system.group, n),
                                           a, cover, budget=budget))
    writer.csv("amenable", tuple(columns), [tuple(r) for r in rows])
    return 0, []


def _task_compare(system, spec, params, writer, budget):
    cover = build_cover(system, params.get("cover"))
    window = system.window(params["window"])
    F = [system.group.coerce(g) for g in params["F"]]
    sigma_spec = params.get("sigma", {"model": "cyclic"})
    measure = None
    if "measure" in params:
        measure = build_measure(system, spec["measures"][params["measure"]])
    slack = params.get("slack")
    kwargs = {}
    if slack is not None:
        kwargs["slack"] = float(slack)
    report = check_amenable_agreement(
        system, cover, params["ns"],
        lambda n: build_sigma(system, sigma_spec, stage_value=n),
        _deltas(params), F, window, measure=measure, **kwargs, budget=budget)
    rows = [(r.n, r.d, r.delta, r.value_sofic_inner, r.value_sofic_outer,
             r.value_amenable, r.gap, int(r.bound_ok)) for r in report.rows]
    writer.csv("compare", ("n", "d", "delta", "value_sofic_inner",
                           "value_sofic_outer", "value_amenable", "gap", "bound_ok"),
               rows)
    writer.json("compare_report", {
        "ok": report.ok,
        "slack_used": {f"n={n},delta={float(dl)}": s
                       for (n, dl), s in report.slack_used.items()},
        "verdict": "agreement bound holds" if report.ok else "agreement bound violated",
    })
    return (0 if report.ok else 1), []


def _task_variational(system, spec, params, writer, budget):
    cover = build_cover(system, params.get("cover"))
    window = system.window(params["window"])
    F = [system.group.coerce(g) for g in params["F"]]
    measures = [(label, build_measure(system, spec["measures"][label]))
                for label in params["measure_labels"]]
    L = build_test_functions(system, params.get("L", ()))
    maps = _sigma_stages(system, {"stages": params["stages"],
                                  "sigma": params.get("sigma", {"model": "cyclic"})})
    report = check_variational(system, cover, measures, L, F, _deltas(params),
                               maps, window, budget=budget)
    rows = [(r.measure_label, r.delta, r.stage, r.d,
             r.count_unfiltered_inner, r.count_unfiltered_outer,
             r.count_filtered_inner, r.count_filtered_outer,
             int(r.ordered_ok), r.gap_outer) for r in report.rows]
    writer.csv("variational", ("measure", "delta", "i", "d",
                               "count_unfiltered_inner", "count_unfiltered_outer",
                               "count_filtered_inner", "count_filtered_outer",
                               "ordered_ok", "gap"), rows)
    writer.json("variational_report", {
        "ok": report.ok,
        "worst_gap": report.worst_gap(),
        "verdict": "measure trace never exceeds topological trace"
                   if report.ok else "ordering violated",
    })
    return (0 if report.ok else 1), []


def _task_tile(system, spec, params, writer, budget):
    group = system.group
    sigma = build_sigma(system, params["sigma"], stage_value=params["sigma"].get("n"))
    shapes = [FiniteSubset(group, shape) for shape in params["shapes"]]
    eta = as_fraction(params.get("eta", "0.1"))
    tau = as_fraction(params.get("tau", 0))
    V = params.get("V")
    flavor = params.get("flavor", "sofic")
    if flavor == "amenable-exact":
        tiling = amenable_exact_tile(sigma, shapes, tau, eta, V=V)
    else:
        tiling = sofic_quasi_tile(sigma, V, shapes, eta, tau,
                                  check_good=bool(params.get("check_good", True)))
    warnings = []
    if tiling.guarantee_missed:
        warnings.append(f"guarantee_missed: coverage {float(tiling.coverage):.4f} "
                        f"< 1 - tau - eta")
    record = tiling.record
    writer.json("tiling", {
        "flavor": tiling.flavor,
        "d": tiling.d,
        "eta": float(eta),
        "tau": float(tau),
        "is_good_policy": "E = F_l F_l + identity, eta'' = eta / 4",
        "shapes": [[group.element_name(g) for g in s] for s in tiling.shapes],
        "centers": [list(c) for c in tiling.centers],
        "guarantee_missed": tiling.guarantee_missed,
        "verification": {
            "across_disjoint": record.across_disjoint,
            "coverage": float(record.coverage),
            "coverage_ok": record.coverage_ok,
            "eta_disjoint": list(record.eta_disjoint),
            "centers_bijective": list(record.centers_bijective),
            "product_bijective": list(record.product_bijective),
            "all_ok": record.all_ok(tiling.flavor),
        },
    })
    writer.csv("coverage", ("phase", "shape_size", "centers", "coverage"),
               [(k, len(s), len(c), record.coverage)
                for k, (s, c) in enumerate(zip(tiling.shapes, tiling.centers))])
    return (0 if record.all_ok(tiling.flavor) else 1), warnings


def _task_pairs(system, spec, params, writer, budget):
    pairs = [(build_pattern(system, a), build_pattern(system, b))
             for a, b in params["candidates"]]
    report = entropy_pair_scan(system, pairs, float(params.get("threshold", 0.0)),
                               int(params.get("n", 6)), budget=budget)
    writer.json("pairs", {
        "note": report.note,
        "threshold": report.threshold,
        "results": [{"pair": r.pair_label, "value": r.value, "positive": r.positive}
                    for r in report.rows],
    })
    return 0, []


def _task_partition_bound(system, spec, params, writer, budget):
    res = partition_count_bound(int(params["lam_size"]), params["p"],
                                params["eta"], params["eps"])
    writer.csv("partition_bound",
               ("lam_size", "count", "log_count", "log_bound", "holds"),
               [(params["lam_size"], res.count, res.log_count, res.log_bound,
                 int(res.holds))])
    return 0, []


_HANDLERS = {
    "language": _task_language,
    "defects": _task_defects,
    "microstates": _task_microstates,
    "entropy-sofic": _task_entropy_sofic,
    "entropy-amenable": _task_entropy_amenable,
    "compare": _task_compare,
    "variational": _task_variational,
    "tile": _task_tile,
    "pairs": _task_pairs,
    "partition-bound": _task_partition_bound,
}


def validate(spec_path) -> list:
    """Schema and cross-reference check only; returns diagnostics."""
    spec = load_spec(spec_path)
    return cross_validate(spec)


def run(spec_path, out_dir=None, budget_nodes=None, workers: int = 1) -> int:
    """Execute one spec; returns the exit status."""
    if workers < 1:
        raise SpecError("workers must be >= 1", field="--workers")
    spec = load_spec(spec_path)
    diagnostics = cross_validate(spec)
    if diagnostics:
        for d in diagnostics:
            print(f"error: {d}", file=sys.stderr)
        return 2
    system = build_system(spec)
    out = Path(out_dir or os.environ.get("SOFICLAB_OUT") or ".")
    out.mkdir(parents=True, exist_ok=True)
    prefix = spec.get("out", {}).get("prefix") or Path(spec_path).stem
    writer = ArtifactWriter(out, prefix, spec_hash(spec_path), spec["task"],
                            spec.get("params", {}))
    budget = budget_nodes if budget_nodes else 2_000_000
    handler = _HANDLERS[spec["task"]]
    try:
        code, warnings = handler(system, spec, spec["params"], writer, budget)
    except ResourceBudgetError as exc:
        print(f"error: budget exhausted in task {spec['task']}: {exc}", file=sys.stderr)
        return 1
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    for path in writer.written:
        print(path)
    return code


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="soficlab",
        description="Finite-stage entropy laboratory for subshifts over groups",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, with_run_flags=True):
        p.add_argument("--spec", required=True, help="path to the experiment spec JSON")
        if with_run_flags:
            p.add_argument("--workers", type=int, default=1,
                           help="worker count (wall time only; output bytes unchanged)")
            p.add_argument("--budget-nodes", type=int, default=None,
                           help="search node budget override")
            p.add_argument("--out", default=None,
                           help="output directory (default $SOFICLAB_OUT or .)")
            p.add_argument("--validate", action="store_true",
                           help="validate the spec and exit")

    add_common(sub.add_parser("run", help="run any task"))
    add_common(sub.add_parser("validate", help="validate a spec"), with_run_flags=False)
    add_common(sub.add_parser("sofic", help="run a defects task"))
    add_common(sub.add_parser("microstates", help="run a microstates task"))
    add_common(sub.add_parser("tile", help="run a tile task"))
    args = parser.parse_args(argv)

    required_task = {"sofic": "defects", "microstates": "microstates", "tile": "tile"}
    try:
        if args.command == "validate" or getattr(args, "validate", False):
            diagnostics = validate(args.spec)
            for d in diagnostics:
                print(f"error: {d}", file=sys.stderr)
            return 2 if diagnostics else 0
        if args.command in required_task:
            spec = load_spec(args.spec)
            if spec["task"] != required_task[args.command]:
                print(f"error: task: subcommand {args.command!r} requires task "
                      f"{required_task[args.command]!r}, spec has {spec['task']!r}",
                      file=sys.stderr)
                return 2
        return run(args.spec, out_dir=args.out, budget_nodes=args.budget_nodes,
                   workers=args.workers)
    except SpecError as exc:
        where = f" ({exc.field})" if exc.field else ""
        print(f"error{where}: {exc}", file=sys.stderr)
        return 2
    except SoficLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
