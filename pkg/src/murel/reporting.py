"""Tabular reports: metric/verdict rows, CSV and JSON-lines rendering.

Both renderers share one fixed column set so sweeps from different runs can
be concatenated and diffed.  Numbers are written with full round-trip
precision (shortest repr), booleans as "true"/"false", missing values as
empty cells (CSV) or null (JSON lines).
"""

from __future__ import annotations

import csv
import io
import json
import math
from typing import Any

import numpy as np

from .metrics import full_report
from .model import outcome_probabilities
from .relations import RelationId, check_all
from .scenario import BuiltConfiguration, build_configuration, make_scenario_doc, scenario_from_dict, vector_pairs

__all__ = [
    "COLUMNS",
    "REPORT_HEADER_COMMENT",
    "configuration_row",
    "render_csv",
    "render_json_lines",
    "spin_reference_rows",
]

REPORT_HEADER_COMMENT = "# murel report schema_version=1"
PROB_MATCH_ATOL = 1e-9

_METRIC_COLUMNS = [
    "eps_x0",
    "eps_xt",
    "eta_y0",
    "sigma_x0",
    "sigma_y0",
    "sigma_mvo",
    "delta",
    "eps_sys",
    "eps_rand",
    "eps_rand_half_angle",
    "eps_rand_flag",
    "unbias_res_x0",
    "unbias_res_xt",
    "variance_identity_residual",
]

COLUMNS = [
    "scenario_id",
    "section",
    "family",
    "phi_degrees",
    "state",
    "param_name",
    "param_value",
    "p_plus",
    "p_minus",
    "outcomes",
    *_METRIC_COLUMNS,
    *[f"{rid.value}_{part}" for rid in RelationId for part in ("lhs", "rhs", "slack", "holds")],
]


def _state_label(spec) -> str:
    if isinstance(spec, str):
        return spec
    return json.dumps(vector_pairs(np.asarray(spec)), separators=(",", ":"))


def _outcome_string(pairs) -> str:
    return ";".join(f"{float(v)!r}:{float(p)!r}" for v, p in pairs)


def configuration_row(
    cfg: BuiltConfiguration,
    *,
    section: str = "",
    param_name: str = "",
    param_value: float | None = None,
    extras: dict[str, Any] | None = None,
) -> dict[str, Any]:
    """One report row: metrics, outcome statistics, and all relation verdicts."""
    report = full_report(cfg.model, cfg.state, cfg.x0, cfg.y0)
    verdicts = check_all(cfg.model, cfg.state, cfg.x0, cfg.y0, tol=cfg.tolerance)
    pairs = outcome_probabilities(cfg.model, cfg.state)

    row: dict[str, Any] = {k: None for k in COLUMNS}
    sc = cfg.scenario
    row["scenario_id"] = sc.scenario_id or ""
    row["section"] = section
    row["family"] = sc.family
    if sc.family == "sigma_phi":
        row["phi_degrees"] = float(sc.model_params["phi_degrees"])
    row["state"] = _state_label(sc.state_spec)
    row["param_name"] = param_name
    row["param_value"] = param_value
    row["outcomes"] = _outcome_string(pairs)
    values = [v for v, _ in pairs]
    if len(values) <= 2 and all(min(abs(v - 1.0), abs(v + 1.0)) <= PROB_MATCH_ATOL for v in values):
        plus = sum(p for v, p in pairs if abs(v - 1.0) <= PROB_MATCH_ATOL)
        minus = sum(p for v, p in pairs if abs(v + 1.0) <= PROB_MATCH_ATOL)
        row["p_plus"] = float(plus)
        row["p_minus"] = float(minus)

    row["eps_x0"] = report.eps_x0
    row["eps_xt"] = report.eps_xt
    row["eta_y0"] = report.eta_y0
    row["sigma_x0"] = report.sigma_x0
    row["sigma_y0"] = report.sigma_y0
    row["sigma_mvo"] = report.sigma_mvo
    row["delta"] = report.delta
    row["eps_sys"] = report.eps_sys
    row["eps_rand"] = report.eps_rand
    row["unbias_res_x0"] = report.unbias_res_x0
    row["unbias_res_xt"] = report.unbias_res_xt
    row["variance_identity_residual"] = (
        report.sigma_mvo**2 - report.sigma_x0**2 - report.eps_x0**2
    )
    for v in verdicts:
        row[f"{v.relation_id}_lhs"] = v.lhs
        row[f"{v.relation_id}_rhs"] = v.rhs
        row[f"{v.relation_id}_slack"] = v.slack
        row[f"{v.relation_id}_holds"] = v.holds
    if extras:
        unknown = sorted(set(extras) - set(COLUMNS))
        if unknown:
            raise ValueError(f"extras carry unknown columns {unknown!r}")
        row.update(extras)
    return row


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _json_value(value: Any) -> Any:
    if value is None or isinstance(value, (bool, str)):
        return value
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if not math.isfinite(v):
            return repr(v)
        return v
    return str(value)


def render_csv(rows: list[dict[str, Any]]) -> str:
    """Fixed-column CSV with a schema comment line above the header."""
    out = io.StringIO()
    out.write(REPORT_HEADER_COMMENT + "\n")
    writer = csv.DictWriter(out, fieldnames=COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _cell(row.get(k)) for k in COLUMNS})
    return out.getvalue()


def render_json_lines(rows: list[dict[str, Any]]) -> str:
    lines = [
        json.dumps({k: _json_value(row.get(k)) for k in COLUMNS}, separators=(",", ":"))
        for row in rows
    ]
    return "".join(line + "\n" for line in lines)


def _spin_cfg(
    phi_degrees: float,
    state: str,
    *,
    value_map: str = "identity",
    scenario_id: str,
) -> BuiltConfiguration:
    doc = make_scenario_doc(
        family="sigma_phi",
        model_params={"phi_degrees": phi_degrees},
        state_spec=state,
        x0_spec="sigma_x",
        y0_spec="sigma_y",
        value_map_spec=value_map,
        scenario_id=scenario_id,
    )
    return build_configuration(scenario_from_dict(doc))


def spin_reference_rows() -> list[dict[str, Any]]:
    """The deterministic spin-half reference table.

    Sections: pointer_anomaly (the +y state at 90 degrees reads +1 with
    certainty while carrying maximal error), outcome_independence (+z gives
    a fair coin at every detuning), eigenstate_error_laws (systematic and
    random error on the +-x eigenstates, including both candidate random
    error laws), calibration_residuals (bias operator norms across the
    detuning sweep), relation_verdicts (three spotlight configurations),
    and rescale_demo (value map scale:100 keeps error-based relations valid
    while breaking the spread-based ones).
    """
    rows: list[dict[str, Any]] = []

    cfg = _spin_cfg(90.0, "+y", scenario_id="spin-pointer-anomaly-phi90-plus-y")
    rows.append(configuration_row(cfg, section="pointer_anomaly"))

    for phi in (0.0, 40.0, 90.0):
        cfg = _spin_cfg(phi, "+z", scenario_id=f"spin-outcome-independence-phi{phi:g}-plus-z")
        rows.append(configuration_row(cfg, section="outcome_independence"))

    for label in ("+x", "-x"):
        for phi in (0.0, 40.0, 90.0):
            cfg = _spin_cfg(
                phi, label, scenario_id=f"spin-eigenstate-error-phi{phi:g}-{label.replace('+', 'plus').replace('-', 'minus')}"
            )
            half_angle = abs(math.sin(math.radians(phi) / 2.0))
            row = configuration_row(cfg, section="eigenstate_error_laws")
            decomposed = row["eps_rand"]
            flag = ""
            if decomposed is not None:
                flag = "consistent" if abs(decomposed - half_angle) <= 1e-9 else "DISCREPANCY"
            row["eps_rand_half_angle"] = half_angle
            row["eps_rand_flag"] = flag
            rows.append(row)

    for phi_step in range(0, 10):
        phi = 10.0 * phi_step
        cfg = _spin_cfg(phi, "+z", scenario_id=f"spin-calibration-phi{phi:g}-plus-z")
        rows.append(
            configuration_row(
                cfg, section="calibration_residuals", param_name="phi_degrees", param_value=phi
            )
        )

    spotlight = [
        (90.0, "+y", "spin-verdicts-phi90-plus-y"),
        (0.0, "+z", "spin-verdicts-phi0-plus-z"),
        (40.0, "+x", "spin-verdicts-phi40-plus-x"),
    ]
    for phi, label, sid in spotlight:
        cfg = _spin_cfg(phi, label, scenario_id=sid)
        rows.append(configuration_row(cfg, section="relation_verdicts"))

    cfg = _spin_cfg(90.0, "+z", value_map="scale:100", scenario_id="spin-rescale-phi90-plus-z-scale100")
    rows.append(configuration_row(cfg, section="rescale_demo"))
    return rows
