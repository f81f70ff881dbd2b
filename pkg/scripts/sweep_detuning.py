"""Sweep the coupling angle and report where each relation starts to fail.

Writes the full per-angle metrics table as CSV and prints, for every relation,
the first grid angle at which it is violated (if any).  The +z column of the
table is the cleanest place to watch HEISENBERG_E1 collapse while OZAWA_E2
stays safely positive.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from murel import RelationId, build_configuration, make_scenario_doc, scenario_from_dict
from murel.reporting import configuration_row, render_csv


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--state", default="+z", help="named qubit state, e.g. +z, +x, -y")
    parser.add_argument("--points", type=int, default=73)
    parser.add_argument("--max-phi", type=float, default=360.0)
    parser.add_argument("--value-map", default="identity")
    parser.add_argument("--out", default="-", help="CSV output path, '-' for stdout")
    args = parser.parse_args(argv)

    rows = []
    for phi in np.linspace(0.0, args.max_phi, args.points):
        doc = make_scenario_doc(
            family="sigma_phi",
            model_params={"phi_degrees": float(phi)},
            state_spec=args.state,
            x0_spec="sigma_x",
            y0_spec="sigma_y",
            value_map_spec=args.value_map,
            scenario_id=f"detuning-{args.state}-{phi:.4f}",
        )
        cfg = build_configuration(scenario_from_dict(doc))
        rows.append(
            configuration_row(
                cfg, section="detuning", param_name="phi_degrees", param_value=float(phi)
            )
        )

    text = render_csv(rows)
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)

    print(f"# state {args.state}, {args.points} angles in [0, {args.max_phi}] deg", file=sys.stderr)
    for rid in RelationId:
        broken = [
            (row["param_value"], row[f"{rid.value}_slack"])
            for row in rows
            if not row[f"{rid.value}_holds"]
        ]
        if broken:
            phi0, slack0 = broken[0]
            print(
                f"# {rid.value}: first violated at phi={phi0:g} deg "
                f"(slack {slack0:+.6f}; {len(broken)}/{len(rows)} grid points)",
                file=sys.stderr,
            )
        else:
            print(f"# {rid.value}: holds on the whole grid", file=sys.stderr)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
