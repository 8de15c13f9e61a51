"""Command-line front-end.

One binary with subcommands; every command prints a JSON run report to
stdout.  With --report-dir the command also drops delimited data and
figure renderings into the given directory.  Exit codes: 0 on success,
1 when --expect names a different verdict than the one reached, 2 on
malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import csp as csp_mod
from . import jsonio, linopt
from . import polymorphism as pol
from . import quantale as qv
from . import tvcsp as tv
from .errors import FormatError, QuantcspError, SizeExceeded
from .report import (
    RunReport,
    digest_file,
    render_alpha_profile,
    render_curve,
    render_schedule,
    render_number,
    write_csv,
)


def _read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON: {exc}", line=exc.lineno)


def _assignment_pairs(assignment):
    return [
        [jsonio.encode_label(var), jsonio.encode_label(val)]
        for var, val in assignment.graph()
    ]


def _report_dir(args):
    if getattr(args, "report_dir", None):
        path = Path(args.report_dir)
        path.mkdir(parents=True, exist_ok=True)
        return path
    return None


def _load_csp(args) -> csp_mod.CspInstance:
    path = Path(args.file)
    fmt = args.format
    if fmt == "auto":
        suffix = path.suffix.lower()
        if suffix == ".cnf":
            fmt = "dimacs"
        elif suffix in (".graph", ".col", ".edge"):
            fmt = "graph"
        else:
            fmt = "json"
    if fmt == "dimacs":
        return csp_mod.from_dimacs_cnf(path.read_text())
    if fmt == "graph":
        vertices, edges = csp_mod.parse_dimacs_graph(path.read_text())
        return csp_mod.from_graph_colouring(edges, args.colours, vertices)
    return jsonio.decode_csp_instance(_read_json(path))


def cmd_csp_solve(args, report: RunReport) -> None:
    instance = _load_csp(args)
    stats = csp_mod.SolveStats()
    solution = csp_mod.solve(instance, stats)
    report.verdict = "satisfiable" if solution is not None else "unsatisfiable"
    report.witness = _assignment_pairs(solution) if solution is not None else None
    report.stats = {
        "nodes": stats.nodes,
        "propagations": stats.propagations,
        "cspCalls": 1,
    }
    out = _report_dir(args)
    solutions = None
    if args.enumerate:
        morphism = csp_mod.solution_set(instance)
        solutions = [_assignment_pairs(f) for f in morphism.support]
        report.extra["solutions"] = solutions
        report.extra["solutionCount"] = len(solutions)
    if out:
        if solutions is not None:
            header = [str(v) for v in instance.variables.elements]
            rows = [[str(val) for _, val in sol] for sol in solutions]
            write_csv(out / "solutions.csv", header, rows)
        else:
            write_csv(
                out / "solution.csv",
                ["variable", "value"],
                [[str(a), str(b)] for a, b in (report.witness or [])],
            )


def cmd_csp_enumerate(args, report: RunReport) -> None:
    args.enumerate = True
    cmd_csp_solve(args, report)


def cmd_tvcsp_solve(args, report: RunReport) -> None:
    instance = jsonio.decode_tvcsp_instance(_read_json(args.file))
    stats = tv.ReductionStats()
    results = {}
    if args.method in ("reduction", "both"):
        value, witness = tv.solve_by_reduction(
            instance, method="scan" if args.scan else "binary",
            jobs=args.jobs, stats=stats,
        )
        results["reduction"] = (value, witness)
    if args.method in ("brute", "both"):
        results["bruteforce"] = tv.solve_bruteforce(instance)
    if len(results) == 2 and results["reduction"][0] != results["bruteforce"][0]:
        raise QuantcspError(
            "reduction and brute force disagree: "
            f"{results['reduction'][0]!r} vs {results['bruteforce'][0]!r}"
        )
    value, witness = results.get("reduction", results.get("bruteforce"))
    report.verdict = "optimal"
    report.value = render_number(value, args.decimal)
    report.witness = _assignment_pairs(witness) if witness is not None else None
    if value == qv.RBAR.neg_inf:
        report.extra["unboundedBelow"] = True
    report.extra["methods"] = {
        name: render_number(v, args.decimal) for name, (v, _) in results.items()
    }
    report.stats = {
        "nodes": stats.nodes,
        "propagations": stats.propagations,
        "cspCalls": stats.csp_calls,
        "alphasTested": stats.alphas_tested,
    }
    out = _report_dir(args)
    if out:
        candidates = tv.candidate_alphas(instance)
        sats = [
            csp_mod.o_value(tv.reduce_to_csp(instance, alpha)) for alpha in candidates
        ]
        write_csv(
            out / "candidates.csv",
            ["alpha", "satisfiable"],
            [
                [render_number(alpha), int(sat)]
                for alpha, sat in zip(candidates, sats)
            ],
        )
        render_alpha_profile(candidates, sats, value, out / "alpha_profile.png")


def cmd_tvcsp_reduce(args, report: RunReport) -> None:
    instance = jsonio.decode_tvcsp_instance(_read_json(args.file))
    try:
        alpha = qv.RBAR.of(args.alpha)
    except (ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"bad --alpha value: {exc}") from None
    if alpha == qv.RBAR.bottom:
        raise FormatError("--alpha must be below +inf")
    reduced = tv.reduce_to_csp(instance, alpha)
    payload = jsonio.encode_csp_instance(reduced)
    report.verdict = "reduced"
    report.extra["cspInstance"] = payload
    report.stats = {"constraints": len(reduced.constraints)}
    if args.output:
        Path(args.output).write_text(json.dumps(payload, indent=2) + "\n")


def cmd_tvcsp_classify(args, report: RunReport) -> None:
    relations, _domain = jsonio.decode_valued_language(_read_json(args.file))
    result = tv.classify_tvcsp(relations, mode=args.mode, jobs=args.jobs)
    report.verdict = result.verdict
    if result.witness is not None:
        report.extra["witnessTable"] = jsonio.encode_arrow(result.witness)
    report.extra["mode"] = result.mode


def cmd_classify(args, report: RunReport) -> None:
    language = jsonio.decode_language(_read_json(args.file))
    result = pol.classify(language, mode=args.mode, jobs=args.jobs)
    report.verdict = result.verdict
    if result.witness is not None:
        report.extra["witnessTable"] = jsonio.encode_arrow(result.witness)
    report.extra["mode"] = result.mode


def cmd_polymorphisms(args, report: RunReport) -> None:
    language = jsonio.decode_language(_read_json(args.file))
    if args.arity < 0:
        raise FormatError("--arity must be nonnegative")
    morphism = pol.intersect_pol(
        language.relations, args.arity, domain=language.domain
    )
    tables = [jsonio.encode_arrow(f) for f in morphism.support]
    report.verdict = "ok"
    report.extra["arity"] = args.arity
    report.extra["count"] = len(tables)
    report.extra["operations"] = tables
    out = _report_dir(args)
    if out:
        write_csv(
            out / "operations.csv",
            ["table"],
            [[json.dumps(t)] for t in tables],
        )


def cmd_schedule(args, report: RunReport) -> None:
    activities, precedences, processing, due, horizon = jsonio.decode_schedule_spec(
        _read_json(args.file)
    )
    if args.horizon is not None:
        horizon = args.horizon
    if horizon is None:
        raise FormatError("horizon missing: give it in the file or with --horizon")
    instance = tv.from_scheduling(activities, precedences, processing, due, horizon)
    stats = tv.ReductionStats()
    value, witness = tv.solve_by_reduction(instance, stats=stats)
    report.verdict = "optimal"
    report.value = render_number(value, args.decimal)
    report.witness = _assignment_pairs(witness) if witness is not None else None
    report.stats = {
        "nodes": stats.nodes,
        "propagations": stats.propagations,
        "cspCalls": stats.csp_calls,
        "horizon": horizon,
    }
    out = _report_dir(args)
    if out and witness is not None:
        starts = dict(witness.graph())
        rows = [
            (a, starts[a], processing[a], due[a]) for a in activities
        ]
        write_csv(
            out / "schedule.csv",
            ["activity", "start", "finish", "due", "deviation"],
            [
                [str(a), s, s + processing[a], due[a], abs(due[a] - (s + processing[a]))]
                for a, s, _, _ in rows
            ],
        )
        render_schedule(rows, out / "schedule.png")


def cmd_lp_build(args, report: RunReport) -> None:
    instance = jsonio.decode_linear_instance(_read_json(args.file))
    lp = linopt.build_lp(instance)
    text = linopt.emit_lp_file(lp)
    report.verdict = "built"
    report.stats = {"rows": len(lp.rows), "variables": len(lp.variables)}
    if args.emit:
        Path(args.emit).write_text(text)
    else:
        report.extra["lpFile"] = text
    if args.solve:
        result = linopt.solve_lp(lp)
        if isinstance(result, linopt.LpOptimal):
            report.verdict = "optimal"
            report.value = render_number(result.value, args.decimal)
            report.witness = {
                name: render_number(v, args.decimal)
                for name, v in sorted(result.point.items(), key=lambda kv: str(kv[0]))
            }
            report.stats["pivots"] = result.pivots
        elif isinstance(result, linopt.LpUnbounded):
            report.verdict = "unbounded"
            report.value = "-inf"
            report.stats["pivots"] = result.pivots
        else:
            report.verdict = "infeasible"
            report.stats["pivots"] = result.pivots


def cmd_qconvex(args, report: RunReport) -> None:
    fn, samples, lambdas = jsonio.decode_qconvex_spec(_read_json(args.file))
    hit = linopt.quasiconvexity_falsify(fn, samples, lambdas)
    if hit is None:
        report.verdict = "no-counterexample"
    else:
        x, y, lam = hit
        report.verdict = "counterexample"
        report.witness = {
            "x": [render_number(c, args.decimal) for c in x],
            "y": [render_number(c, args.decimal) for c in y],
            "lambda": render_number(lam, args.decimal),
        }
    report.stats = {"samples": len(samples), "lambdas": len(lambdas)}
    out = _report_dir(args)
    if out:
        values = [fn(p) for p in samples]
        write_csv(
            out / "samples.csv",
            ["point", "value"],
            [
                [json.dumps([str(c) for c in p]), str(v)]
                for p, v in zip(samples, values)
            ],
        )
        if samples and len(samples[0]) == 1:
            render_curve(samples, values, hit, out / "curve.png")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quantcsp",
        description="Exact CSP and tropical valued CSP toolkit",
    )
    parser.add_argument(
        "--decimal", action="store_true", help="render numbers as decimals"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, report_dir=True, expect=True):
        if report_dir:
            p.add_argument("--report-dir", help="write CSV/figures into this directory")
        if expect:
            p.add_argument(
                "--expect", help="exit 1 unless the verdict matches this string"
            )

    csp_p = sub.add_parser("csp", help="classical instances")
    csp_sub = csp_p.add_subparsers(dest="subcommand", required=True)
    for name in ("solve", "enumerate"):
        p = csp_sub.add_parser(name)
        p.add_argument("file")
        p.add_argument(
            "--format", choices=("auto", "dimacs", "graph", "json"), default="auto"
        )
        p.add_argument("--colours", type=int, default=3)
        p.add_argument("--enumerate", action="store_true")
        add_common(p)
        p.set_defaults(func=cmd_csp_solve if name == "solve" else cmd_csp_enumerate)

    tv_p = sub.add_parser("tvcsp", help="tropical valued instances")
    tv_sub = tv_p.add_subparsers(dest="subcommand", required=True)
    p = tv_sub.add_parser("solve")
    p.add_argument("file")
    p.add_argument("--method", choices=("brute", "reduction", "both"), default="reduction")
    p.add_argument("--scan", action="store_true", help="linear threshold scan")
    p.add_argument("--jobs", type=int, default=1)
    add_common(p)
    p.set_defaults(func=cmd_tvcsp_solve)
    p = tv_sub.add_parser("reduce")
    p.add_argument("file")
    p.add_argument("--alpha", required=True, help="threshold (rational or -inf)")
    p.add_argument("--output", help="write the crisp instance JSON here")
    add_common(p, report_dir=False)
    p.set_defaults(func=cmd_tvcsp_reduce)
    p = tv_sub.add_parser("classify")
    p.add_argument("file")
    p.add_argument("--mode", choices=("auto", "exhaustive", "indicator"), default="auto")
    p.add_argument("--jobs", type=int, default=1)
    add_common(p, report_dir=False)
    p.set_defaults(func=cmd_tvcsp_classify)

    p = sub.add_parser("classify", help="crisp language tractability")
    p.add_argument("file")
    p.add_argument("--mode", choices=("auto", "exhaustive", "indicator"), default="auto")
    p.add_argument("--jobs", type=int, default=1)
    add_common(p, report_dir=False)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("polymorphisms", help="common polymorphisms of a language")
    p.add_argument("file")
    p.add_argument("--arity", type=int, required=True)
    add_common(p)
    p.set_defaults(func=cmd_polymorphisms)

    p = sub.add_parser("schedule", help="due-date deviation minimisation")
    p.add_argument("file")
    p.add_argument("--horizon", type=int)
    add_common(p)
    p.set_defaults(func=cmd_schedule)

    lp_p = sub.add_parser("lp", help="linear relations over the reals")
    lp_sub = lp_p.add_subparsers(dest="subcommand", required=True)
    p = lp_sub.add_parser("build")
    p.add_argument("file")
    p.add_argument("--emit", help="write the LP text file here")
    p.add_argument("--solve", action="store_true")
    add_common(p)
    p.set_defaults(func=cmd_lp_build)
    p = lp_sub.add_parser("qconvex")
    p.add_argument("file")
    add_common(p)
    p.set_defaults(func=cmd_qconvex)

    p = sub.add_parser("qconvex", help="quasiconvexity falsification on a grid")
    p.add_argument("file")
    add_common(p)
    p.set_defaults(func=cmd_qconvex)

    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    report = RunReport(command=argv)
    start = time.perf_counter()
    try:
        input_file = getattr(args, "file", None)
        if input_file:
            report.input_digest = digest_file(input_file)
        args.func(args, report)
    except (FormatError, FileNotFoundError, SizeExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except QuantcspError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    report.timing_ms = (time.perf_counter() - start) * 1000.0
    sys.stdout.write(report.to_json())
    expected = getattr(args, "expect", None)
    if expected is not None and report.verdict != expected:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
