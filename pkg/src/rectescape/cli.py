"""Command line entry point: ``rectescape <subcommand> ...``.

Exit codes: 0 success, 1 usage error, 2 infeasible or incompatible input,
3 internal assertion (an approximation bound failed under --strict).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from . import io
from .generators import FAMILIES, GenerationError, GenSpec, generate
from .geometry import (BoundViolation, EscapeAssignment, GeometryError, RepInstance, SepInstance,
                       compute_density)
from .matching import solve_sep
from .mpc import MpcConfig, MpcFault, check_mpc_constraints, run_sep_mpc
from .oracle import InstanceTooLarge, solve_exact
from .peeling import NotDisjoint, peel, peel_and_verify
from .render import render_svg
from .rounding import (InfeasibleSolution, ParseError, deterministic_round, export_lp,
                       import_fractional, randomized_round)

log = logging.getLogger("rectescape")

ALGOS = ("peel", "match", "mpc", "round-det", "round-rand")
# worst-case ratio to OPT per algorithm, used by `compare`; match drops to 2 on disjoint input
RATIO_BOUND = {"peel": 8, "match": 4, "mpc": None, "round-det": 4, "round-rand": None}


class UsageError(Exception):
    pass


class Incompatible(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _read_instance(path):
    try:
        return io.read_instance(path)
    except FileNotFoundError:
        raise UsageError(f"no such file: {path}") from None
    except json.JSONDecodeError as exc:
        raise Incompatible(f"{path}: not JSON ({exc})") from None


def run_algo(algo: str, inst, frac_text=None, seed: int = 0, strict: bool = False):
    """Dispatch one algorithm; returns (assignment, report, extra fields)."""
    extra = {"algorithm": algo}
    if algo == "peel":
        try:
            result, report = peel_and_verify(inst)
        except BoundViolation:
            if strict:
                raise
            result = peel(inst)
            report = compute_density(inst, result.assignment)
            log.warning("density %d exceeds 2*rho = %d", report.density, 2 * result.rho)
        extra["rho"] = result.rho
        extra["levels"] = result.level_of()
        return result.assignment, report, extra
    if algo in ("match", "mpc"):
        if not isinstance(inst, SepInstance):
            raise Incompatible(f"{algo} needs a SEP instance")
        if algo == "match":
            res = solve_sep(inst)
            report = compute_density(inst, res.assignment)
            extra["k_B"] = res.k_b
            if report.density > 4 * res.k_b:
                msg = f"density {report.density} exceeds 4*k_B = {4 * res.k_b}"
                if strict:
                    raise BoundViolation(msg)
                log.warning(msg)
            return res.assignment, report, extra
        res = run_sep_mpc(inst)
        extra["iterations"] = res.trace.iterations
        extra["rounds"] = res.trace.total_rounds
        return res.assignment, compute_density(inst, res.assignment), extra
    if algo in ("round-det", "round-rand"):
        if not isinstance(inst, RepInstance):
            raise Incompatible(f"{algo} needs a REP instance")
        if frac_text is None:
            raise UsageError(f"{algo} needs --frac")
        f = import_fractional(frac_text, inst)
        extra["k_f"] = float(f.k_f)
        if algo == "round-det":
            a, report = deterministic_round(f, inst, check=strict)
        else:
            a, report = randomized_round(f, inst, seed)
            extra["seed"] = seed
        return a, report, extra
    raise UsageError(f"unknown algorithm {algo!r}")


def cmd_gen(args):
    spec = GenSpec(kind=args.kind, n=args.n, seed=args.seed, disjoint=not args.overlapping,
                   width=args.width, height=args.height, family=args.family,
                   max_side=args.max_side, interior=not args.allow_boundary)
    inst = generate(spec)
    text = io.dumps(io.instance_to_dict(inst))
    _emit(text, args.out)


def cmd_solve(args):
    inst = _read_instance(args.input)
    frac = Path(args.frac).read_text() if args.frac else None
    a, report, extra = run_algo(args.algo, inst, frac, args.seed, args.strict)
    _emit(io.dumps(io.solution_to_dict(a, report, extra)), args.out)


def cmd_verify(args):
    inst = _read_instance(args.input)
    sol = io.read_solution(args.sol)
    try:
        a = EscapeAssignment.from_names(sol["directions"])
        report = compute_density(inst, a)
    except GeometryError as exc:
        print(f"INVALID: {exc}")
        return 2
    problems = []
    for key in ("density", "boundary_density"):
        if key in sol and sol[key] != getattr(report, key):
            problems.append(f"{key} claimed {sol[key]}, recomputed {getattr(report, key)}")
    out = {"ok": not problems, "density": report.density,
           "boundary_density": report.boundary_density, "problems": problems}
    print(json.dumps(out))
    return 0 if not problems else 2


def cmd_oracle(args):
    inst = _read_instance(args.input)
    res = solve_exact(inst, cap=args.cap)
    out = {"opt_density": res.opt_density, "directions": res.opt_assignment.names()}
    if res.opt_boundary_density is not None:
        out["opt_boundary_density"] = res.opt_boundary_density
    _emit(io.dumps(out), args.out)


def compare_rows(paths, algos, oracle: bool, frac=None, seed: int = 0):
    rows = []
    for path in paths:
        inst = _read_instance(path)
        opt = solve_exact(inst).opt_density if oracle else None
        for algo in algos:
            t0 = time.perf_counter()
            try:
                _, report, _ = run_algo(algo, inst, frac, seed)
            except (Incompatible, UsageError, NotDisjoint) as exc:
                rows.append({"instance": str(path), "algo": algo, "skipped": str(exc)})
                continue
            dt = time.perf_counter() - t0
            row = {"instance": str(path), "algo": algo, "n": len(inst),
                   "density": report.density, "seconds": round(dt, 6)}
            if opt is not None:
                row["opt"] = opt
                row["ratio"] = report.density / opt if opt else None
                bound = RATIO_BOUND[algo]
                if algo == "match" and inst.disjoint:
                    bound = 2
                # the guarantees are stated for OPT >= 2 only
                row["bound"] = bound if opt >= 2 else None
            rows.append(row)
    return rows


def cmd_compare(args):
    if not args.algos:
        raise UsageError("compare needs at least one algorithm")
    frac = Path(args.frac).read_text() if args.frac else None
    rows = compare_rows(args.input, args.algos, args.oracle, frac, args.seed)
    if args.json:
        print(json.dumps(rows, indent=2))
        return 0
    cols = ["instance", "algo", "n", "density", "opt", "ratio", "bound", "seconds"]
    print("\t".join(cols))
    for r in rows:
        if "skipped" in r:
            print(f"{r['instance']}\t{r['algo']}\tskipped: {r['skipped']}")
            continue
        cells = []
        for c in cols:
            v = r.get(c, "")
            cells.append(f"{v:.3f}" if isinstance(v, float) else ("" if v is None else str(v)))
        print("\t".join(cells))
    return 0


def cmd_mpc(args):
    inst = _read_instance(args.input)
    if not isinstance(inst, SepInstance):
        raise Incompatible("mpc needs a SEP instance")
    default = MpcConfig.sqrt_config(len(inst))
    cfg = MpcConfig(machines=args.machines or default.machines, memory=args.memory or default.memory)
    res = run_sep_mpc(inst, cfg)
    if args.trace:
        Path(args.trace).write_text(res.trace.to_json())
    report = compute_density(inst, res.assignment)
    extra = {"algorithm": "mpc", "iterations": res.trace.iterations,
             "rounds": res.trace.total_rounds,
             "violations": check_mpc_constraints(res.trace, cfg, len(inst))}
    _emit(io.dumps(io.solution_to_dict(res.assignment, report, extra)), args.out)


def cmd_lp_export(args):
    inst = _read_instance(args.input)
    if not isinstance(inst, RepInstance):
        raise Incompatible("lp-export needs a REP instance")
    _emit(export_lp(inst), args.out)


def cmd_render(args):
    inst = _read_instance(args.input)
    a = levels = None
    if args.sol:
        sol = io.read_solution(args.sol)
        a = EscapeAssignment.from_names(sol["directions"])
        levels = sol.get("levels") if args.levels else None
    elif args.levels:
        res = peel(inst)
        a, levels = res.assignment, res.level_of()
    _emit(render_svg(inst, a, levels), args.out)


def _emit(text: str, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="rectescape", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="generate an instance")
    g.add_argument("--kind", choices=("rep", "sep"), default="rep")
    g.add_argument("--family", choices=FAMILIES, default="random")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--width", type=int)
    g.add_argument("--height", type=int)
    g.add_argument("--max-side", type=int)
    g.add_argument("--overlapping", action="store_true", help="allow intersections / repeats")
    g.add_argument("--allow-boundary", action="store_true", help="SEP points may lie on the box")
    g.add_argument("--out")
    g.set_defaults(fn=cmd_gen)

    s = sub.add_parser("solve", help="run one algorithm")
    s.add_argument("--algo", choices=ALGOS, required=True)
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--frac", help="fractional LP solution for round-*")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--strict", action="store_true", help="exit 3 on a bound violation")
    s.add_argument("--out")
    s.set_defaults(fn=cmd_solve)

    v = sub.add_parser("verify", help="recompute the density of a solution")
    v.add_argument("--in", dest="input", required=True)
    v.add_argument("--sol", required=True)
    v.set_defaults(fn=cmd_verify)

    o = sub.add_parser("oracle", help="exhaustive optimum (small n)")
    o.add_argument("--in", dest="input", required=True)
    o.add_argument("--cap", type=int, default=8)
    o.add_argument("--out")
    o.set_defaults(fn=cmd_oracle)

    c = sub.add_parser("compare", help="densities, ratios and runtimes across algorithms")
    c.add_argument("--in", dest="input", nargs="+", required=True)
    c.add_argument("--algos", nargs="*", default=None)
    c.add_argument("--oracle", action="store_true")
    c.add_argument("--frac")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--json", action="store_true")
    c.set_defaults(fn=cmd_compare)

    m = sub.add_parser("mpc", help="simulated MPC peeling with a round trace")
    m.add_argument("--in", dest="input", required=True)
    m.add_argument("--machines", type=int)
    m.add_argument("--memory", type=int)
    m.add_argument("--trace")
    m.add_argument("--out")
    m.set_defaults(fn=cmd_mpc)

    lp = sub.add_parser("lp-export", help="write the LP relaxation in CPLEX LP format")
    lp.add_argument("--in", dest="input", required=True)
    lp.add_argument("--out")
    lp.set_defaults(fn=cmd_lp_export)

    r = sub.add_parser("render", help="draw an instance as SVG")
    r.add_argument("--in", dest="input", required=True)
    r.add_argument("--sol")
    r.add_argument("--levels", action="store_true", help="color by peeling level")
    r.add_argument("--out")
    r.set_defaults(fn=cmd_render)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        rc = args.fn(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: no such file: {exc.filename}", file=sys.stderr)
        return 1
    except (Incompatible, GeometryError, GenerationError, InfeasibleSolution, ParseError,
            InstanceTooLarge, MpcFault, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BoundViolation as exc:
        print(f"bound violation: {exc}", file=sys.stderr)
        return 3
    return rc or 0


if __name__ == "__main__":
    sys.exit(main())
