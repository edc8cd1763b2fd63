"""Command-line interface: solving, exact audits, generators, benchmarks.

Audit ratios are reported as exact integer fractions (opt/alg), never
floats.  Hereditary rows additionally carry the 4/3 guarantee; any violation
of 3*opt <= 4*alg flips the exit code, since it would falsify the
implementation rather than the bound.  SETPACK_SEED in the environment
overrides ``--seed`` everywhere.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import random
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import instance as inst
from .hereditary import hereditary_closure, is_hereditary, solve_hereditary
from .local_search import SearchParams, solve
from .normalize import dump_normalized, load_tuple, normalize
from .oracle import solve_exact

CSV_COLUMNS = ["instance", "alg_weight", "opt_weight", "ratio_num", "ratio_den",
               "iterations", "binoculars", "wall_ms"]


@dataclass(frozen=True)
class AuditRow:
    instance: str
    alg_weight: int
    opt_weight: int
    ratio: Fraction
    iterations: int
    binoculars: int
    wall_ms: float
    guarantee_bound: str | None = None  # "4/3" on hereditary rows, reported-only otherwise

    def to_dict(self) -> dict:
        return {
            "instance": self.instance,
            "alg_weight": self.alg_weight,
            "opt_weight": self.opt_weight,
            "ratio_num": self.ratio.numerator,
            "ratio_den": self.ratio.denominator,
            "iterations": self.iterations,
            "binoculars": self.binoculars,
            "wall_ms": self.wall_ms,
            "guarantee_bound": self.guarantee_bound,
        }

    @property
    def violates_guarantee(self) -> bool:
        return self.guarantee_bound == "4/3" and 3 * self.opt_weight > 4 * self.alg_weight


def rows_to_json(rows: list[AuditRow]) -> str:
    ordered = sorted(rows, key=lambda r: r.instance)
    return json.dumps([r.to_dict() for r in ordered], indent=2)


def rows_from_json(text: str) -> list[AuditRow]:
    out = []
    for d in json.loads(text):
        out.append(AuditRow(d["instance"], d["alg_weight"], d["opt_weight"],
                            Fraction(d["ratio_num"], d["ratio_den"]),
                            d["iterations"], d["binoculars"], d["wall_ms"],
                            d.get("guarantee_bound")))
    return out


def rows_to_csv(rows: list[AuditRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(CSV_COLUMNS)
    for r in sorted(rows, key=lambda r: r.instance):
        d = r.to_dict()
        writer.writerow([d[c] for c in CSV_COLUMNS])
    return buf.getvalue()


def audit_instance(name: str, instance: inst.Instance, params: SearchParams,
                   oracle_budget: int = 10_000_000) -> AuditRow:
    """Solve and compare against the exact oracle on one instance."""
    if params.mode == "hereditary":
        packing, stats = solve_hereditary(instance, seed=params.seed,
                                          tau=params.resolved_tau())
        bound = "4/3"
    else:
        packing, stats = solve(instance, params)
        bound = None
    opt = solve_exact(instance, budget=oracle_budget)
    alg_w = packing.weight(instance)
    ratio = Fraction(opt.optimum_weight, alg_w) if alg_w else Fraction(1)
    return AuditRow(name, alg_w, opt.optimum_weight, ratio,
                    stats.iterations, stats.binoculars_applied, stats.wall_ms, bound)


# -- instance suites ----------------------------------------------------------

def random_triples(nx: int, ny: int, nz: int, m: int, seed: int) -> list[tuple]:
    """m distinct random triples over disjoint parts, for 3DM-style instances."""
    rng = random.Random(seed)
    pool = set()
    limit = nx * ny * nz
    if m > limit:
        raise ValueError("more triples requested than exist")
    while len(pool) < m:
        pool.add((("x", rng.randrange(nx)), ("y", rng.randrange(ny)), ("z", rng.randrange(nz))))
    return sorted(pool)


def suite_instances(suite: str, count: int, seed: int):
    """Yield (name, instance, params) triples for a named benchmark family."""
    for i in range(count):
        sub = seed * 1_000_003 + i
        rng = random.Random(sub)
        if suite == "hereditary-small":
            universe = rng.randrange(9, 16)
            k = rng.randrange(5, 11)
            base = inst.generate_random(universe, k, p3=1.0, seed=sub)
            closed = hereditary_closure(base).base
            yield f"{suite}-{i:04d}", closed, SearchParams(tau=10, mode="hereditary", seed=sub)
        elif suite == "threedm-small":
            m = rng.randrange(6, 13)
            part = max(2, m // 2)
            triples = random_triples(part, part, part, m, sub)
            yield (f"{suite}-{i:04d}", inst.embed_3dm(triples),
                   SearchParams(tau=8, mode="general", seed=sub, injective_colorings=True))
        elif suite == "random-small":
            n = rng.randrange(8, 15)
            m = rng.randrange(6, 18)
            yield (f"{suite}-{i:04d}", inst.generate_random(n, m, p3=0.6, seed=sub),
                   SearchParams(tau=4, mode="general", seed=sub))
        else:
            raise ValueError(f"unknown suite {suite!r}")


# -- command handlers ---------------------------------------------------------

def _read_instance(path: str, wire: str) -> inst.Instance:
    data = sys.stdin.read() if path == "-" else Path(path).read_text()
    if wire == "auto":
        wire = "json" if path.endswith(".json") else "text"
    return inst.parse_instance(data, format=wire)


def _params_from_args(args, mode: str = "general") -> SearchParams:
    epsilon = Fraction(args.epsilon) if getattr(args, "epsilon", None) else None
    return SearchParams(
        tau=getattr(args, "tau", None),
        epsilon=epsilon,
        mode=mode,
        seed=args.seed,
        coloring_reps=getattr(args, "colorings", 64),
        pair_mode=getattr(args, "pair_mode", "canonical"),
        improve_method="naive" if getattr(args, "naive_improve", False) else "auto",
        injective_colorings=getattr(args, "injective_colorings", False),
        t_override=getattr(args, "t_override", None),
    )


def _cmd_solve(args) -> int:
    instance = _read_instance(args.instance, args.input_format)
    packing, stats = solve(instance, _params_from_args(args))
    print(json.dumps({"packing": sorted(packing.members),
                      "stats": json.loads(stats.to_json())}))
    return 0


def _cmd_solve_hereditary(args) -> int:
    instance = _read_instance(args.instance, args.input_format)
    if args.close:
        instance = hereditary_closure(instance).base
    elif not is_hereditary(instance):
        print("instance is not hereditary (use --close to complete it)", file=sys.stderr)
        return 2
    packing, stats = solve_hereditary(instance, seed=args.seed, tau=args.tau)
    print(json.dumps({"packing": sorted(packing.members),
                      "stats": json.loads(stats.to_json())}))
    return 0


def _cmd_oracle(args) -> int:
    instance = _read_instance(args.instance, args.input_format)
    result = solve_exact(instance, budget=args.budget)
    print(json.dumps({"optimum_weight": result.optimum_weight,
                      "witness": sorted(result.witness.members),
                      "nodes_explored": result.nodes_explored}))
    return 0


def _cmd_gen(args) -> int:
    if args.kind == "random":
        instance = inst.generate_random(args.universe, args.sets, args.p3, args.seed)
    elif args.kind == "threedm":
        part = max(2, args.sets // 2)
        instance = inst.embed_3dm(random_triples(part, part, part, args.sets, args.seed))
    else:
        base = inst.generate_random(args.universe, args.sets, p3=1.0, seed=args.seed)
        instance = hereditary_closure(base).base
    text = inst.serialize_instance(instance, format=args.wire)
    if args.output == "-":
        sys.stdout.write(text)
    else:
        Path(args.output).write_text(text)
    return 0


def _cmd_normalize(args) -> int:
    t = load_tuple(Path(args.tuple).read_text())
    out = dump_normalized(normalize(t))
    if args.output == "-":
        print(out)
    else:
        Path(args.output).write_text(out)
    return 0


def _emit_rows(rows: list[AuditRow], fmt: str) -> int:
    print(rows_to_csv(rows) if fmt == "csv" else rows_to_json(rows), end="")
    violations = [r for r in rows if r.violates_guarantee]
    for r in violations:
        print(f"guarantee violation on {r.instance}: opt={r.opt_weight} alg={r.alg_weight}",
              file=sys.stderr)
    return 1 if violations else 0


def _cmd_audit(args) -> int:
    mode = "hereditary" if args.hereditary else "general"
    rows = []
    for path in args.instances:
        instance = _read_instance(path, args.input_format)
        if len(instance) > args.max_oracle_sets and not args.force_oracle:
            print(f"{path}: {len(instance)} sets exceeds the oracle comfort zone "
                  f"(--force-oracle to override)", file=sys.stderr)
            return 2
        if mode == "hereditary" and not is_hereditary(instance):
            print(f"{path}: not hereditary", file=sys.stderr)
            return 2
        params = _params_from_args(args, mode=mode)
        rows.append(audit_instance(Path(path).stem, instance, params, args.oracle_budget))
    return _emit_rows(rows, args.format)


def _cmd_bench(args) -> int:
    rows = [audit_instance(name, instance, params, args.oracle_budget)
            for name, instance, params in suite_instances(args.suite, args.count, args.seed)]
    return _emit_rows(rows, args.format)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="setpack",
                                     description="2-3-set packing local search, oracle and audits")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, solver=False):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--input-format", choices=["auto", "text", "json"], default="auto")
        if solver:
            group = p.add_mutually_exclusive_group()
            group.add_argument("--tau", type=int)
            group.add_argument("--epsilon", type=str,
                               help="positive rational; tau becomes 4*ceil(2/epsilon)")
            p.add_argument("--pair-mode", choices=["canonical", "full"], default="canonical")
            p.add_argument("--colorings", type=int, default=64, metavar="R")
            p.add_argument("--t-override", type=int)
            p.add_argument("--injective-colorings", action="store_true")
            p.add_argument("--naive-improve", action="store_true")

    p = sub.add_parser("solve", help="general-mode local search with the binocular phase")
    p.add_argument("instance")
    add_common(p, solver=True)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("solve-hereditary", help="tau>=10 local search, no binocular phase")
    p.add_argument("instance")
    p.add_argument("--close", action="store_true", help="apply the hereditary closure first")
    p.add_argument("--tau", type=int, default=10)
    add_common(p)
    p.set_defaults(func=_cmd_solve_hereditary)

    p = sub.add_parser("oracle", help="exact optimum by branch and bound")
    p.add_argument("instance")
    p.add_argument("--budget", type=int, default=10_000_000)
    add_common(p)
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("gen", help="write a generated instance")
    p.add_argument("--kind", choices=["random", "threedm", "hereditary"], default="random")
    p.add_argument("--universe", type=int, default=12)
    p.add_argument("--sets", type=int, default=10)
    p.add_argument("--p3", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--wire", choices=["text", "json"], default="text")
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("normalize", help="normalize an analysis tuple file")
    p.add_argument("tuple")
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(func=_cmd_normalize)

    p = sub.add_parser("audit", help="solver vs oracle on instance files")
    p.add_argument("instances", nargs="+")
    p.add_argument("--hereditary", action="store_true")
    p.add_argument("--oracle-budget", type=int, default=10_000_000)
    p.add_argument("--max-oracle-sets", type=int, default=40)
    p.add_argument("--force-oracle", action="store_true")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    add_common(p, solver=True)
    p.set_defaults(func=_cmd_audit)

    p = sub.add_parser("bench", help="run a named instance suite with audits")
    p.add_argument("--suite", choices=["hereditary-small", "threedm-small", "random-small"],
                   required=True)
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--oracle-budget", type=int, default=10_000_000)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.set_defaults(func=_cmd_bench)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if "SETPACK_SEED" in os.environ and hasattr(args, "seed"):
        args.seed = int(os.environ["SETPACK_SEED"])
    try:
        return args.func(args)
    except AssertionError as exc:
        print(f"internal invariant violated: {exc}", file=sys.stderr)
        return 3
    except (inst.FormatError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
