"""Scenario documents: strict JSON descriptions of one measurement setup.

Schema (schema_version 1).  Unknown keys are rejected everywhere; complex
numbers are written as [re, im] pairs; angles are given in degrees under the
key "phi_degrees".

    {
      "schema_version": 1,
      "id": "optional label",
      "model": <model object>,
      "state": "+x" | [[re, im], ...],
      "observables": {"x0": <observable>, "y0": <observable>},
      "value_map": "identity" | "scale:<c>" | "shift:<c>" | "center_on_meter_mean",
      "tolerance": 1e-9,
      "seed": 0
    }

Model objects, by family:

    {"family": "sigma_phi", "phi_degrees": <number>}
    {"family": "shift", "probe_dim": <int>, "probe_state": [[re, im], ...]}
    {"family": "explicit", "object_dim": <int>, "unitary": [[[re, im], ...], ...],
     "probe_state": [[re, im], ...], "meter": [[[re, im], ...], ...]}

Observables are "sigma_x" / "sigma_y" / "sigma_z" / "identity" or an explicit
Hermitian matrix.  Named states ("+x", "-x", "+y", "-y", "+z", "-z") are
qubit-only.  The value map composes on top of the family's built-in
calibration (identity for sigma_phi/explicit, pointer-mean subtraction for
shift): "scale:100" on a shift model recalibrates values to 100 * (raw - mean).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from .linalg import HermitianObservable, PureState, expectation, herm_eig
from .model import (
    IndirectModel,
    build_shift_model,
    build_sigma_phi,
    named_qubit_state,
    pauli_observable,
    rescale_mvo,
)

__all__ = [
    "BuiltConfiguration",
    "Scenario",
    "ScenarioError",
    "apply_value_map",
    "build_configuration",
    "make_scenario_doc",
    "matrix_pairs",
    "parse_scenario",
    "scenario_from_dict",
    "scenario_to_text",
    "vector_pairs",
]

SCHEMA_VERSION = 1
NAMED_OBSERVABLES = ("sigma_x", "sigma_y", "sigma_z", "identity")
NAMED_STATES = ("+x", "-x", "+y", "-y", "+z", "-z")
VALUE_MAP_NAMES = ("identity", "scale", "shift", "center_on_meter_mean")


class ScenarioError(ValueError):
    """Scenario document rejected; .path names the offending field."""

    def __init__(self, message: str, path: str = ""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


def _require_dict(obj: Any, path: str) -> dict:
    if not isinstance(obj, dict):
        raise ScenarioError(f"expected an object, got {type(obj).__name__}", path)
    return obj


def _check_keys(obj: dict, path: str, required: set[str], optional: set[str] = frozenset()):
    unknown = sorted(set(obj) - required - optional)
    if unknown:
        raise ScenarioError(f"unknown keys {unknown!r}", path)
    missing = sorted(required - set(obj))
    if missing:
        raise ScenarioError(f"missing required keys {missing!r}", path)


def _number(obj: Any, path: str) -> float:
    if isinstance(obj, bool) or not isinstance(obj, (int, float)):
        raise ScenarioError(f"expected a number, got {obj!r}", path)
    v = float(obj)
    if not math.isfinite(v):
        raise ScenarioError(f"non-finite number {obj!r}", path)
    return v


def _integer(obj: Any, path: str) -> int:
    if isinstance(obj, bool) or not isinstance(obj, int):
        raise ScenarioError(f"expected an integer, got {obj!r}", path)
    return obj


def _complex_pair(obj: Any, path: str) -> complex:
    if not isinstance(obj, list) or len(obj) != 2:
        raise ScenarioError(f"expected a [re, im] pair, got {obj!r}", path)
    return complex(_number(obj[0], f"{path}[0]"), _number(obj[1], f"{path}[1]"))


def _complex_vector(obj: Any, path: str) -> np.ndarray:
    if not isinstance(obj, list) or not obj:
        raise ScenarioError("expected a non-empty list of [re, im] pairs", path)
    return np.array([_complex_pair(e, f"{path}[{i}]") for i, e in enumerate(obj)], dtype=complex)


def _complex_matrix(obj: Any, path: str) -> np.ndarray:
    if not isinstance(obj, list) or not obj:
        raise ScenarioError("expected a non-empty list of rows", path)
    rows = [_complex_vector(r, f"{path}[{i}]") for i, r in enumerate(obj)]
    n = len(rows)
    for i, r in enumerate(rows):
        if r.size != n:
            raise ScenarioError(f"row {i} has length {r.size}, expected {n} (square matrix)", path)
    return np.array(rows, dtype=complex)


def _parse_state_spec(obj: Any, path: str) -> str | np.ndarray:
    if isinstance(obj, str):
        if obj not in NAMED_STATES:
            raise ScenarioError(f"unknown state name {obj!r} (known: {list(NAMED_STATES)!r})", path)
        return obj
    return _complex_vector(obj, path)


def _parse_observable_spec(obj: Any, path: str) -> str | np.ndarray:
    if isinstance(obj, str):
        if obj not in NAMED_OBSERVABLES:
            raise ScenarioError(
                f"unknown observable name {obj!r} (known: {list(NAMED_OBSERVABLES)!r})", path
            )
        return obj
    return _complex_matrix(obj, path)


def _parse_value_map_spec(obj: Any, path: str) -> str:
    if not isinstance(obj, str):
        raise ScenarioError(f"expected a value-map string, got {obj!r}", path)
    head, _, arg = obj.partition(":")
    if head not in VALUE_MAP_NAMES:
        raise ScenarioError(f"unknown value map {obj!r} (known: {list(VALUE_MAP_NAMES)!r})", path)
    if head in ("scale", "shift"):
        if not arg:
            raise ScenarioError(f"value map {head!r} needs a numeric argument, e.g. '{head}:2'", path)
        try:
            c = float(arg)
        except ValueError:
            raise ScenarioError(f"bad numeric argument in value map {obj!r}", path) from None
        if not math.isfinite(c):
            raise ScenarioError(f"non-finite argument in value map {obj!r}", path)
    elif arg:
        raise ScenarioError(f"value map {head!r} takes no argument", path)
    return obj


@dataclass(frozen=True, eq=False)
class Scenario:
    """Parsed scenario; `document` is the normalized JSON-ready form."""

    schema_version: int
    scenario_id: str | None
    family: str
    model_params: dict
    state_spec: str | np.ndarray
    x0_spec: str | np.ndarray
    y0_spec: str | np.ndarray
    value_map_spec: str
    tolerance: float
    seed: int
    document: dict


@dataclass(frozen=True, eq=False)
class BuiltConfiguration:
    model: IndirectModel
    state: PureState
    x0: HermitianObservable
    y0: HermitianObservable
    tolerance: float
    seed: int
    scenario: Scenario


def scenario_from_dict(doc: Any) -> Scenario:
    """Validate a scenario document (parsed JSON).  Strict: unknown keys fail."""
    top = _require_dict(doc, "scenario")
    _check_keys(
        top,
        "scenario",
        required={"schema_version", "model", "state", "observables"},
        optional={"id", "value_map", "tolerance", "seed"},
    )
    version = _integer(top["schema_version"], "scenario.schema_version")
    if version != SCHEMA_VERSION:
        raise ScenarioError(f"unsupported schema_version {version}", "scenario.schema_version")
    scenario_id = top.get("id")
    if scenario_id is not None and not isinstance(scenario_id, str):
        raise ScenarioError(f"expected a string, got {scenario_id!r}", "scenario.id")

    mobj = _require_dict(top["model"], "scenario.model")
    family = mobj.get("family")
    if family == "sigma_phi":
        _check_keys(mobj, "scenario.model", required={"family", "phi_degrees"})
        params = {"phi_degrees": _number(mobj["phi_degrees"], "scenario.model.phi_degrees")}
    elif family == "shift":
        _check_keys(mobj, "scenario.model", required={"family", "probe_dim", "probe_state"})
        probe_dim = _integer(mobj["probe_dim"], "scenario.model.probe_dim")
        if probe_dim < 1:
            raise ScenarioError("probe_dim must be positive", "scenario.model.probe_dim")
        probe = _complex_vector(mobj["probe_state"], "scenario.model.probe_state")
        if probe.size != probe_dim:
            raise ScenarioError(
                f"probe_state length {probe.size} != probe_dim {probe_dim}",
                "scenario.model.probe_state",
            )
        params = {"probe_dim": probe_dim, "probe_state": probe}
    elif family == "explicit":
        _check_keys(
            mobj,
            "scenario.model",
            required={"family", "object_dim", "unitary", "probe_state", "meter"},
        )
        object_dim = _integer(mobj["object_dim"], "scenario.model.object_dim")
        if object_dim < 1:
            raise ScenarioError("object_dim must be positive", "scenario.model.object_dim")
        params = {
            "object_dim": object_dim,
            "unitary": _complex_matrix(mobj["unitary"], "scenario.model.unitary"),
            "probe_state": _complex_vector(mobj["probe_state"], "scenario.model.probe_state"),
            "meter": _complex_matrix(mobj["meter"], "scenario.model.meter"),
        }
    else:
        raise ScenarioError(
            f"unknown family {family!r} (known: ['sigma_phi', 'shift', 'explicit'])",
            "scenario.model.family",
        )

    state_spec = _parse_state_spec(top["state"], "scenario.state")
    oobj = _require_dict(top["observables"], "scenario.observables")
    _check_keys(oobj, "scenario.observables", required={"x0", "y0"})
    x0_spec = _parse_observable_spec(oobj["x0"], "scenario.observables.x0")
    y0_spec = _parse_observable_spec(oobj["y0"], "scenario.observables.y0")
    value_map_spec = _parse_value_map_spec(top.get("value_map", "identity"), "scenario.value_map")
    tolerance = _number(top.get("tolerance", 1e-9), "scenario.tolerance")
    if tolerance <= 0:
        raise ScenarioError("tolerance must be positive", "scenario.tolerance")
    seed = _integer(top.get("seed", 0), "scenario.seed")

    document = make_scenario_doc(
        family=family,
        model_params=params,
        state_spec=state_spec,
        x0_spec=x0_spec,
        y0_spec=y0_spec,
        value_map_spec=value_map_spec,
        tolerance=tolerance,
        seed=seed,
        scenario_id=scenario_id,
    )
    return Scenario(
        schema_version=version,
        scenario_id=scenario_id,
        family=family,
        model_params=params,
        state_spec=state_spec,
        x0_spec=x0_spec,
        y0_spec=y0_spec,
        value_map_spec=value_map_spec,
        tolerance=tolerance,
        seed=seed,
        document=document,
    )


def parse_scenario(text: str) -> Scenario:
    """Parse scenario JSON text; syntax errors carry line/column positions."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioError(f"syntax error at line {e.lineno} column {e.colno}: {e.msg}") from None
    return scenario_from_dict(doc)


def _resolve_observable(spec: str | np.ndarray, path: str) -> HermitianObservable:
    if isinstance(spec, str):
        return pauli_observable(spec)
    try:
        return herm_eig(spec)
    except ValueError as e:
        raise ScenarioError(str(e), path) from None


def _resolve_state(spec: str | np.ndarray, dim: int, path: str) -> PureState:
    if isinstance(spec, str):
        if dim != 2:
            raise ScenarioError(f"named state {spec!r} requires a qubit object, got dim {dim}", path)
        return named_qubit_state(spec)
    if spec.size != dim:
        raise ScenarioError(f"state length {spec.size} != object dim {dim}", path)
    try:
        return PureState(spec)
    except ValueError as e:
        raise ScenarioError(str(e), path) from None


def apply_value_map(model: IndirectModel, spec: str) -> IndirectModel:
    """Compose a named value map on top of the model's current calibration."""
    head, _, arg = spec.partition(":")
    if head == "identity":
        return model
    if head == "scale":
        c = float(arg)
        return rescale_mvo(model, lambda v: c * v)
    if head == "shift":
        c = float(arg)
        return rescale_mvo(model, lambda v: v + c)
    if head == "center_on_meter_mean":
        mean = float(expectation(model.probe_state, model.meter.matrix).real)
        return rescale_mvo(model, lambda v: v - mean)
    raise ScenarioError(f"unknown value map {spec!r}", "scenario.value_map")  # pragma: no cover


def build_configuration(sc: Scenario) -> BuiltConfiguration:
    """Realize a parsed scenario as model + state + observable pair."""
    x0 = _resolve_observable(sc.x0_spec, "scenario.observables.x0")
    y0 = _resolve_observable(sc.y0_spec, "scenario.observables.y0")
    if x0.dim != y0.dim:
        raise ScenarioError(
            f"x0 dim {x0.dim} != y0 dim {y0.dim}", "scenario.observables"
        )
    if sc.family == "sigma_phi":
        if x0.dim != 2:
            raise ScenarioError("sigma_phi is a qubit model; observables must be 2x2",
                                "scenario.observables")
        model = build_sigma_phi(math.radians(sc.model_params["phi_degrees"]))
    elif sc.family == "shift":
        try:
            probe = PureState(sc.model_params["probe_state"])
        except ValueError as e:
            raise ScenarioError(str(e), "scenario.model.probe_state") from None
        try:
            model = build_shift_model(x0, sc.model_params["probe_dim"], probe)
        except ValueError as e:
            raise ScenarioError(str(e), "scenario.model") from None
    else:  # explicit
        p = sc.model_params
        object_dim = p["object_dim"]
        probe_amps = p["probe_state"]
        if p["unitary"].shape[0] != object_dim * probe_amps.size:
            raise ScenarioError(
                f"unitary dim {p['unitary'].shape[0]} != object_dim * probe dim "
                f"{object_dim * probe_amps.size}",
                "scenario.model.unitary",
            )
        if p["meter"].shape[0] != probe_amps.size:
            raise ScenarioError(
                f"meter dim {p['meter'].shape[0]} != probe dim {probe_amps.size}",
                "scenario.model.meter",
            )
        try:
            probe = PureState(probe_amps)
        except ValueError as e:
            raise ScenarioError(str(e), "scenario.model.probe_state") from None
        try:
            meter = herm_eig(p["meter"])
        except ValueError as e:
            raise ScenarioError(str(e), "scenario.model.meter") from None
        try:
            model = IndirectModel(
                object_dim=object_dim,
                probe_dim=probe_amps.size,
                unitary=p["unitary"],
                probe_state=probe,
                meter=meter,
            )
        except ValueError as e:
            raise ScenarioError(str(e), "scenario.model") from None
        if x0.dim != object_dim:
            raise ScenarioError(
                f"observable dim {x0.dim} != object_dim {object_dim}", "scenario.observables"
            )
    if x0.dim != model.object_dim:
        raise ScenarioError(
            f"observable dim {x0.dim} != model object dim {model.object_dim}",
            "scenario.observables",
        )
    state = _resolve_state(sc.state_spec, model.object_dim, "scenario.state")
    model = apply_value_map(model, sc.value_map_spec)
    return BuiltConfiguration(
        model=model, state=state, x0=x0, y0=y0,
        tolerance=sc.tolerance, seed=sc.seed, scenario=sc,
    )


def vector_pairs(amps: np.ndarray) -> list[list[float]]:
    return [[float(a.real), float(a.imag)] for a in np.asarray(amps, dtype=complex)]


def matrix_pairs(m: np.ndarray) -> list[list[list[float]]]:
    return [vector_pairs(row) for row in np.asarray(m, dtype=complex)]


def _spec_json(spec: str | np.ndarray, kind: str):
    if isinstance(spec, str):
        return spec
    return vector_pairs(spec) if kind == "vector" else matrix_pairs(spec)


def make_scenario_doc(
    *,
    family: str,
    model_params: dict,
    state_spec: str | np.ndarray,
    x0_spec: str | np.ndarray,
    y0_spec: str | np.ndarray,
    value_map_spec: str = "identity",
    tolerance: float = 1e-9,
    seed: int = 0,
    scenario_id: str | None = None,
) -> dict:
    """Assemble a normalized scenario document (JSON-ready dict)."""
    model: dict[str, Any] = {"family": family}
    if family == "sigma_phi":
        model["phi_degrees"] = float(model_params["phi_degrees"])
    elif family == "shift":
        model["probe_dim"] = int(model_params["probe_dim"])
        model["probe_state"] = _spec_json(model_params["probe_state"], "vector")
    elif family == "explicit":
        model["object_dim"] = int(model_params["object_dim"])
        model["unitary"] = _spec_json(model_params["unitary"], "matrix")
        model["probe_state"] = _spec_json(model_params["probe_state"], "vector")
        model["meter"] = _spec_json(model_params["meter"], "matrix")
    else:
        raise ValueError(f"unknown family {family!r}")
    doc: dict[str, Any] = {"schema_version": SCHEMA_VERSION}
    if scenario_id is not None:
        doc["id"] = scenario_id
    doc["model"] = model
    doc["state"] = _spec_json(state_spec, "vector")
    doc["observables"] = {
        "x0": _spec_json(x0_spec, "matrix"),
        "y0": _spec_json(y0_spec, "matrix"),
    }
    doc["value_map"] = value_map_spec
    doc["tolerance"] = float(tolerance)
    doc["seed"] = int(seed)
    return doc


def scenario_to_text(doc: dict) -> str:
    """Serialize a scenario document; floats round-trip exactly."""
    return json.dumps(doc, indent=2) + "\n"
