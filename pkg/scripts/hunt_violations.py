"""Search every relation for violation witnesses and print a summary table.

Runs the derivative-free search once per relation over a chosen model family,
certifies any witness it finds by rebuilding the scenario from scratch, and
optionally saves the witness files for replay with `murel check`.
"""
from __future__ import annotations

import argparse
from pathlib import Path

from murel import Family, RelationId, SearchSpace, certify, scenario_to_text, search_min_slack


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--family", choices=[f.value for f in Family], default="sigma_phi")
    parser.add_argument("--budget", type=int, default=4000)
    parser.add_argument("--seed", type=int, default=20260817)
    parser.add_argument("--tol", type=float, default=1e-9)
    parser.add_argument("--object-dim", type=int, default=2)
    parser.add_argument("--probe-dim", type=int, default=None)
    parser.add_argument("--value-map", default="identity")
    parser.add_argument(
        "--relations",
        nargs="*",
        default=[r.value for r in RelationId],
        choices=[r.value for r in RelationId],
    )
    parser.add_argument("--witness-dir", default=None, help="directory for witness JSON files")
    args = parser.parse_args(argv)

    family = Family(args.family)
    probe_dim = args.probe_dim if args.probe_dim is not None else (4 if family is Family.SHIFT else 2)
    space = SearchSpace(
        family=family,
        object_dim=args.object_dim,
        probe_dim=probe_dim,
        value_map_spec=args.value_map,
    )

    witness_dir = Path(args.witness_dir) if args.witness_dir else None
    if witness_dir is not None:
        witness_dir.mkdir(parents=True, exist_ok=True)

    width = max(len(r) for r in args.relations)
    print(f"family={family.value} budget={args.budget} seed={args.seed}")
    found = 0
    for rid in args.relations:
        # Separate seed stream per relation so adding one to the list does not
        # reshuffle the others.
        offset = list(RelationId).index(RelationId(rid))
        result = search_min_slack(rid, space, args.budget, args.seed + offset, tol=args.tol)
        if result.violation_found(args.tol):
            certify(result)
            found += 1
            note = "VIOLATED"
            if witness_dir is not None:
                path = witness_dir / f"{rid}.json"
                path.write_text(scenario_to_text(result.witness_doc), encoding="utf-8")
                note = f"VIOLATED  witness -> {path}"
        else:
            note = "no violation found"
        print(f"  {rid:<{width}}  best slack {result.best_slack:+.9f}  {note}")
    print(f"{found}/{len(args.relations)} relations violated within this family")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
