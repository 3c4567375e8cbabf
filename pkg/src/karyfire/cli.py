"""Command-line interface: simulate, enumerate, bound, verify, flatten, construct.

Exit codes: 0 success, 1 property violation or failed run, 2 usage or bad
input, 3 enumeration truncated.  JSON output (--json) carries a
format_version field and echoes any seed that fed randomness, so every
run can be reproduced byte for byte.
"""

from __future__ import annotations

import argparse
import json
import sys

from .analysis import (
    ConstructionError,
    check_ballot,
    check_minmax_descendants,
    check_zigzag_relation,
    flatten,
    inversions,
    replay_lower_bound_construction,
)
from .bounds import (
    FormulaError,
    binary_zigzag_bound,
    lower_bound_binary,
    lower_bound_general,
    naive_bound,
    zigzag_bound,
)
from .engine import (
    Configuration,
    EngineError,
    initial_config,
    parse_script,
    random_endgame_start,
    stabilize,
    unlabeled_fire_counts,
    unlabeled_profile,
    unlabeled_simulate,
)
from .enumeration import (
    EnumerationTruncated,
    dump_stable,
    enumerate_stable,
    verify_endgame_confluence,
)
from .tree import TreeShape, layer_size, layer_start

FORMAT_VERSION = 1


class UsageError(Exception):
    """Bad flag combination or bad input data (exit code 2)."""


def _emit_json(payload: dict) -> None:
    payload = {"format_version": FORMAT_VERSION, **payload}
    print(json.dumps(payload, sort_keys=True))


# ---------------------------------------------------------------------------
# subcommands


def cmd_simulate(args) -> int:
    shape = TreeShape(args.k)
    config = initial_config(shape, args.ell)
    if args.script is not None:
        with open(args.script, encoding="utf-8") as fh:
            script = parse_script(fh.read())
        final, trace = stabilize(config, "script", script=script)
        policy = "script"
    elif args.policy == "random":
        if args.seed is None:
            raise UsageError("--policy random needs --seed")
        final, trace = stabilize(config, "random", seed=args.seed)
        policy = "random"
    else:
        final, trace = stabilize(config, "lowest")
        policy = "lowest"
    if args.json:
        payload = {
            "command": "simulate",
            "k": args.k,
            "ell": args.ell,
            "policy": policy,
            "config": final.to_json_dict(),
            "trace": [{"vertex": m.vertex, "selected": list(m.selected)} for m in trace],
        }
        if policy == "random":
            payload["seed"] = args.seed
        _emit_json(payload)
    else:
        print(final)
        if policy == "random":
            print(f"seed: {args.seed}")
        for move in trace:
            print(f"fire {move.vertex}: {' '.join(map(str, move.selected))}")
    return 0


def cmd_enumerate(args) -> int:
    shape = TreeShape(args.k)
    result = enumerate_stable(
        initial_config(shape, args.ell),
        max_states=args.max_states,
        max_stable=args.max_stable,
        threads=args.threads,
        endgame_shortcut=not args.no_endgame_shortcut,
    )
    if args.dump is not None:
        with open(args.dump, "w", encoding="utf-8") as fh:
            dump_stable(result, fh)
    if args.json:
        _emit_json(
            {
                "command": "enumerate",
                "k": args.k,
                "ell": args.ell,
                "count": len(result.stable_keys),
                "states_explored": result.states_explored,
                "memo_hits": result.memo_hits,
                "truncated": result.truncated,
                "threads": args.threads,
            }
        )
    elif result.truncated:
        print(
            f"truncated after {result.states_explored} states; "
            f"partial stable count = {len(result.stable_keys)}",
            file=sys.stderr,
        )
    else:
        print(f"Z = {len(result.stable_keys)}")
    return 3 if result.truncated else 0


def _bound_reports(args) -> list:
    which = args.which
    if which in ("binary", "lower-binary") and args.k != 2:
        raise UsageError(f"--which {which} needs --k 2")
    try:
        if which == "naive":
            return [naive_bound(args.k, args.ell)]
        if which == "zigzag":
            return [zigzag_bound(args.k, args.ell)]
        if which == "binary":
            return [binary_zigzag_bound(args.ell, "T"), binary_zigzag_bound(args.ell, "Z")]
        if which == "lower-binary":
            return [lower_bound_binary(args.ell)]
        if which == "lower-general":
            return [lower_bound_general(args.k, args.ell)]
        reports = [
            naive_bound(args.k, args.ell),
            zigzag_bound(args.k, args.ell),
            lower_bound_general(args.k, args.ell),
        ]
        if args.k == 2:
            reports.append(lower_bound_binary(args.ell))
            if args.ell >= 4:
                reports.append(binary_zigzag_bound(args.ell, "T"))
                reports.append(binary_zigzag_bound(args.ell, "Z"))
        return reports
    except ValueError as err:
        raise UsageError(str(err)) from err


def cmd_bounds(args) -> int:
    reports = _bound_reports(args)
    if args.json:
        _emit_json(
            {
                "command": "bounds",
                "which": args.which,
                "reports": [r.to_json_dict() for r in reports],
            }
        )
    elif len(reports) == 1:
        print(reports[0].decimal())
    else:
        for r in reports:
            print(f"{r.kind} = {r.decimal()} ({r.sci()})")
    return 0


def _expected_counts(shape: TreeShape, profile: list[int]) -> dict[int, int]:
    expected = {}
    for depth, per_vertex in enumerate(profile, start=1):
        for v in range(layer_start(shape, depth), layer_start(shape, depth) + layer_size(shape, depth)):
            expected[v] = per_vertex
    return expected


def cmd_verify(args) -> int:
    shape = TreeShape(args.k)
    prop = args.property
    failures: list[dict] = []
    checks = 0
    used_seed = None

    if prop in ("minmax", "zigzag-relation", "ballot"):
        checker = {
            "minmax": check_minmax_descendants,
            "zigzag-relation": check_zigzag_relation,
            "ballot": check_ballot,
        }[prop]
        if args.samples is not None:
            used_seed = args.seed
            configs = []
            for idx in range(args.samples):
                final, _ = stabilize(initial_config(shape, args.ell), "random", seed=args.seed + idx)
                configs.append(final)
        else:
            result = enumerate_stable(initial_config(shape, args.ell))
            if result.truncated:
                raise EnumerationTruncated("enumeration truncated — cannot verify the full stable set")
            configs = list(result.iter_stable())
        for config in configs:
            verdict = checker(config)
            checks += 1
            if not verdict.holds:
                failures.append({"config": config.to_json_dict(), **verdict.to_json_dict()})
    elif prop == "endgame-confluence":
        samples = args.samples if args.samples is not None else 20
        used_seed = args.seed
        for idx in range(samples):
            config = random_endgame_start(shape, args.ell, args.seed + idx)
            checks += 1
            if not verify_endgame_confluence(config):
                failures.append({"config": config.to_json_dict(), "property": prop, "holds": False})
    elif prop == "unlabeled-profile":
        limit = args.samples if args.samples is not None else 100
        for n in range(1, limit + 1):
            checks += 1
            simulated = unlabeled_simulate(shape, n)
            expected = _expected_counts(shape, unlabeled_profile(shape, n))
            if simulated != expected:
                failures.append({"property": prop, "holds": False, "chips": n})
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(f"unknown property {prop!r}")

    if args.json:
        payload = {
            "command": "verify",
            "property": prop,
            "k": args.k,
            "ell": args.ell,
            "checks": checks,
            "failures": failures,
        }
        if used_seed is not None:
            payload["seed"] = used_seed
        _emit_json(payload)
    else:
        status = "all hold" if not failures else f"{len(failures)} violated"
        print(f"property {prop} at ({args.k},{args.ell}): {checks} checks, {status}")
        if used_seed is not None:
            print(f"seed: {used_seed}")
        for failure in failures:
            print(f"violation: {json.dumps(failure, sort_keys=True)}", file=sys.stderr)
    return 1 if failures else 0


def cmd_flatten(args) -> int:
    with open(args.config, encoding="utf-8") as fh:
        config = Configuration.from_json(fh.read())
    rule = "children_first" if args.rule == "children-first" else "inorder"
    try:
        perm = flatten(config, rule)
    except ValueError as err:
        raise UsageError(str(err)) from err
    count = inversions(perm)
    if args.json:
        _emit_json(
            {
                "command": "flatten",
                "rule": rule,
                "sequence": list(perm.sequence),
                "inversions": count,
            }
        )
    else:
        print(perm.as_line())
        print(f"inversions = {count}")
    return 0


def _int_list(text: str) -> tuple[int, ...]:
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(int(tok) for tok in text.split(","))
    except ValueError as err:
        raise UsageError(f"expected a comma-separated integer list, got {text!r}") from err


def cmd_construct(args) -> int:
    config = replay_lower_bound_construction(
        args.k, args.ell, args.i, _int_list(args.c), _int_list(args.cprime)
    )
    if args.json:
        _emit_json(
            {
                "command": "construct",
                "k": args.k,
                "ell": args.ell,
                "i": args.i,
                "c": list(_int_list(args.c)),
                "cprime": list(_int_list(args.cprime)),
                "config": config.to_json_dict(),
            }
        )
    else:
        print(config)
    return 0


def cmd_oracle(args) -> int:
    if args.kind != "unlabeled":
        raise UsageError(f"unknown oracle {args.kind!r}")
    shape = TreeShape(args.k)
    counts = unlabeled_simulate(shape, args.chips)
    if args.json:
        _emit_json(
            {
                "command": "oracle",
                "kind": "unlabeled",
                "k": args.k,
                "chips": args.chips,
                "counts": {str(v): c for v, c in sorted(counts.items())},
                "fires": {str(v): c for v, c in sorted(unlabeled_fire_counts(shape, args.chips).items())},
            }
        )
    else:
        print("{" + ", ".join(f"{v}:{c}" for v, c in sorted(counts.items())) + "}")
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="karyfire",
        description="Labeled chip-firing on looped k-ary trees: simulation, enumeration, bounds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, ell_required=True):
        p.add_argument("--k", type=int, required=True, help="tree arity (>= 2)")
        p.add_argument("--ell", type=int, required=ell_required, help="number of layers to fill")
        p.add_argument("--json", action="store_true", help="machine-readable output")

    p = sub.add_parser("simulate", help="stabilize the root-loaded configuration")
    common(p)
    p.add_argument("--policy", choices=["lowest", "random"], default="lowest")
    p.add_argument("--seed", type=int, help="RNG seed (required with --policy random)")
    p.add_argument("--script", help="replay a firing script from this file")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("enumerate", help="count all reachable stable configurations")
    common(p)
    p.add_argument("--dump", help="write the stable set as newline-delimited JSON")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--max-states", type=int, default=10**8)
    p.add_argument("--max-stable", type=int, default=10**7)
    p.add_argument("--no-endgame-shortcut", action="store_true")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("bounds", help="evaluate the counting bounds exactly")
    common(p)
    p.add_argument(
        "--which",
        choices=["naive", "zigzag", "binary", "lower-binary", "lower-general", "all"],
        default="all",
    )
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("verify", help="check structural properties")
    common(p)
    p.add_argument(
        "--property",
        required=True,
        choices=["minmax", "zigzag-relation", "ballot", "endgame-confluence", "unlabeled-profile"],
    )
    p.add_argument("--samples", type=int, help="sampled checks instead of full enumeration")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("flatten", help="flatten a stable configuration to a permutation")
    p.add_argument("--config", required=True, help="configuration JSON file")
    p.add_argument("--rule", choices=["inorder", "children-first"], default="inorder")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_flatten)

    p = sub.add_parser("construct", help="replay the lower-bound construction")
    common(p)
    p.add_argument("--i", type=int, required=True, help="number of crossing chips per side")
    p.add_argument("--c", default="", help="comma-separated below-median crossing chips")
    p.add_argument("--cprime", default="", help="comma-separated above-median crossing chips")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("oracle", help="independent reference computations")
    p.add_argument("kind", choices=["unlabeled"])
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--chips", type=int, required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_oracle)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.func(args)
    except UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except EnumerationTruncated as err:
        print(f"error: {err}", file=sys.stderr)
        return 3
    except ConstructionError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2 if str(err).startswith("choice out of range") else 1
    except (EngineError, FormulaError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
