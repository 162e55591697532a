"""Command line: ``actsim gen|run|simulate-cut|verify|experiment``.

Exit status is 0 exactly when every check of the command passed.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import algorithms, oracles
from .bits import to_int
from .engine import SimulationError, check_activation_inequalities, run, trace_to_jsonl
from .instances import (PointerChasingSpec, gen_c4_disjointness_instance, gen_c4free_host,
                        gen_dfpc_instance, gen_symmetry_instance, random_disjointness,
                        random_labeled_connected)
from .model import Instance, Model, validate_instance
from .report import (ExperimentSpec, build_instance, evaluate, rows_to_csv, run_experiment,
                     write_report)
from .twoparty import PartitionSpec, simulate_cut, simulate_cut_round_efficient

PRESETS = {
    "leader-bfs": dict(algorithm="leader-bfs", generator="random",
                       sweep=tuple(range(10, 101, 10)), seeds=(1, 2, 3, 4, 5)),
    "separation": dict(algorithm="dfpc", generator="fig4", sweep=tuple(range(1, 9))),
    "greedy-mis": dict(algorithm="greedy-mis", generator="random",
                       sweep=(10, 20, 50, 100), seeds=(1, 2, 3)),
    "greedy-coloring": dict(algorithm="greedy-coloring", generator="random",
                            sweep=(10, 20, 50, 100), seeds=(1, 2, 3)),
    "universal": dict(algorithm="universal-local:mis", generator="random",
                      sweep=(10, 20, 40, 80), seeds=(1, 2)),
    "broadcast": dict(algorithm="broadcast-cycle", generator="cycle",
                      sweep=(3, 5, 8, 13, 21), seeds=(0, 1)),
}


def _ints(text: str) -> tuple[int, ...]:
    """``"1,2,5"`` or ``"1-5"`` or ``"10-100:10"``."""
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part[1:]:
            rng, _, step = part.partition(":")
            lo, hi = rng.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1, int(step or 1)))
        else:
            out.append(int(part))
    return tuple(out)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", choices=["local", "congest"])
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--N", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--round-cap", type=int)
    p.add_argument("--out")


def _override(inst: Instance, args) -> Instance:
    changes = {}
    if args.model:
        changes["model"] = Model(args.model)
    if args.N:
        changes["N"] = args.N
    if args.round_cap:
        changes["round_cap"] = args.round_cap
    return inst.with_params(**changes) if changes else inst


def _load_instance(args, algorithm: str = "leader-bfs") -> Instance:
    if args.instance:
        inst = Instance.from_json(Path(args.instance).read_text())
    else:
        spec = ExperimentSpec(algorithm, args.gen, (args.n,), (args.seed,), M=getattr(args, "M", 1))
        _, inst = build_instance(spec, args.n, args.seed)
    return _override(inst, args)


# -- subcommands -----------------------------------------------------------


def cmd_gen(args) -> int:
    kind = args.generator
    if kind == "fig4":
        inst = gen_dfpc_instance(PointerChasingSpec.random(args.k, args.seed), N=args.N)
    elif kind == "disjointness":
        ds = random_disjointness(gen_c4free_host(args.n, args.seed), args.seed)
        inst = gen_c4_disjointness_instance(ds, connect=args.connect)
    elif kind == "symmetry":
        a = random_labeled_connected(args.n, args.seed)
        b = a if args.same else random_labeled_connected(args.n, args.seed + 1)
        inst = gen_symmetry_instance(a, b, args.n)
    else:
        spec = ExperimentSpec(args.algorithm, kind, (args.n,), (args.seed,))
        _, inst = build_instance(spec, args.n, args.seed)
    inst = _override(inst, args)
    _emit(json.dumps(inst.to_dict(), indent=1), args.out)
    return 0


def cmd_run(args) -> int:
    inst = _load_instance(args, args.algorithm)
    row = evaluate(args.algorithm, inst, args.M, label=args.instance or f"{args.gen}(n={args.n},seed={args.seed})")
    if args.trace:
        res = run(inst, algorithms.build(args.algorithm, args.M), trace=True)
        Path(args.trace).write_text(trace_to_jsonl(res.trace))
    summary = {"instance": row.instance, "nact": row.nact, "eact": row.eact, "awake": row.awake,
               "rounds": row.rounds, "bits": row.bits,
               "checks": {c.name: c.passed for c in row.checks}, "failures": row.failures()}
    _emit(json.dumps(summary, indent=1), args.out)
    return 0 if row.ok else 1


def cmd_simulate_cut(args) -> int:
    inst = _load_instance(args, args.algorithm)
    side_a = _ints(args.side_a) if args.side_a else tuple(range(inst.n // 2))
    extra: dict = {}
    part = PartitionSpec.from_side_a(inst.n, side_a)
    behavior = algorithms.build(args.algorithm, args.M)
    try:
        if args.protocol == "phases":
            sess = simulate_cut(inst, behavior, part)
            ok = sess.rounds <= max(1, sess.bounds["phase_bound"])
        else:
            sess = simulate_cut_round_efficient(inst, behavior, part, dilate=args.dilate)
            ok = sess.rounds <= sess.bounds["round_bound"]
            extra = {"within_alternation_bound": sess.rounds <= sess.bounds["alternation_bound"]}
    except SimulationError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    doc = sess.to_dict()
    doc["within_bound"] = ok
    doc.update(extra)
    _emit(json.dumps(doc, indent=1), args.out)
    return 0 if ok else 1


def cmd_verify(args) -> int:
    inst = Instance.from_json(Path(args.instance).read_text())
    g = inst.graph
    what = args.oracle
    detail: dict = {}
    if what == "valid":
        problems = validate_instance(inst)
        ok, detail = not problems, {"violations": problems}
    elif what == "c4-free":
        ok = oracles.verify_c4_free(g)
    elif what == "mis":
        ok = oracles.verify_mis(g, _ints(args.nodes or ""))
    elif what == "coloring":
        ok = oracles.verify_coloring(g, _ints(args.colors or ""))
    elif what == "bfs":
        root = args.root if args.root is not None else inst.node_of_id(min(inst.ids))
        detail = {"root": root, "distances": oracles.bfs_distances(g, root)}
        ok = True
    elif what == "dfpc":
        from .checks import dfpc_expected
        res = run(inst, algorithms.dfpc_edge_frugal())
        want = dfpc_expected(inst)
        root = next(v for v in range(g.n) if res.outputs.get(v) is not None
                    and inst.inputs[v] and algorithms.decode_dfpc_input(inst.inputs[v], inst.params.N).dfs_index == 1)
        got = to_int(res.outputs[root])
        ok = got == want and not check_activation_inequalities(res, g)
        detail = {"expected": want, "output": got, "eact": res.ledger.eact}
    else:
        raise SystemExit(f"unknown oracle {what}")
    _emit(json.dumps({"oracle": what, "ok": ok, **detail}), args.out)
    return 0 if ok else 1


def cmd_experiment(args) -> int:
    base = dict(PRESETS.get(args.preset, {})) if args.preset else {}
    if args.preset and args.preset not in PRESETS:
        raise SystemExit(f"unknown preset {args.preset}; choose from {sorted(PRESETS)}")
    if args.algorithm:
        base["algorithm"] = args.algorithm
    if args.generator:
        base["generator"] = args.generator
    if args.sweep is not None:
        base["sweep"] = _ints(args.sweep)
    if args.seeds is not None:
        base["seeds"] = _ints(args.seeds)
    if args.model:
        base["model"] = args.model
    if args.round_cap:
        base["round_cap"] = args.round_cap
    base["M"] = args.M
    if "algorithm" not in base or "generator" not in base:
        raise SystemExit("need --algorithm and --generator (or a preset)")
    base.setdefault("sweep", (args.n,))
    base.setdefault("seeds", (args.seed,))
    spec = ExperimentSpec(**base)
    rows = run_experiment(spec)
    if args.out:
        stem = args.preset or spec.algorithm.replace(":", "_")
        for p in write_report(rows, args.out, stem):
            print(p)
    else:
        sys.stdout.write(rows_to_csv(rows))
    failures = [f for r in rows for f in r.failures()]
    for f in failures:
        print(f"FAIL {f}", file=sys.stderr)
    return 0 if not failures else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="actsim", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write an instance as JSON")
    p.add_argument("generator", choices=["cycle", "path", "star", "complete", "random", "c4free",
                                         "fig4", "disjointness", "symmetry"])
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--algorithm", default="leader-bfs", help="shapes the node inputs")
    p.add_argument("--connect", action="store_true")
    p.add_argument("--same", action="store_true")
    _common(p)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("run", help="run one algorithm and check its contracts")
    p.add_argument("algorithm")
    p.add_argument("--instance")
    p.add_argument("--gen", default="random")
    p.add_argument("--M", type=int, default=1)
    p.add_argument("--trace")
    _common(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("simulate-cut", help="two-party reconstruction across a cut")
    p.add_argument("algorithm")
    p.add_argument("--instance")
    p.add_argument("--gen", default="random")
    p.add_argument("--side-a")
    p.add_argument("--protocol", choices=["phases", "alternating"], default="phases")
    p.add_argument("--dilate", action="store_true")
    p.add_argument("--M", type=int, default=1)
    _common(p)
    p.set_defaults(func=cmd_simulate_cut)

    p = sub.add_parser("verify", help="ground-truth oracles")
    p.add_argument("oracle", choices=["valid", "c4-free", "mis", "coloring", "bfs", "dfpc"])
    p.add_argument("--instance", required=True)
    p.add_argument("--nodes")
    p.add_argument("--colors")
    p.add_argument("--root", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("experiment", help="sweep, check and write CSV plus figures")
    p.add_argument("preset", nargs="?")
    p.add_argument("--algorithm")
    p.add_argument("--generator")
    p.add_argument("--sweep")
    p.add_argument("--seeds")
    p.add_argument("--M", type=int, default=1)
    _common(p)
    p.set_defaults(func=cmd_experiment)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (SimulationError, KeyError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
