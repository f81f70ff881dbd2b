"""Uncertainty-relation verdicts for one measurement configuration.

Every relation is normalized to "lhs >= rhs" with lhs, rhs >= 0; the verdict
reports slack = lhs - rhs and holds iff slack >= -tol.  hbar = 1 throughout,
so each commutator bound is 0.5 * |<[A, B]>|.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .linalg import HermitianObservable, PureState, commutator, expectation
from .metrics import (
    conditional_pairs,
    disturbance_y0,
    error_x0,
    error_xt,
    mvo_stddev,
    stddev,
)
from .model import EvolvedOperators, IndirectModel, composite_input, evolve

__all__ = ["RelationId", "RelationVerdict", "check", "check_all"]

DEFAULT_TOL = 1e-9


class RelationId(str, Enum):
    """Identifiers accepted by check() and the command line."""

    HEISENBERG_E1 = "HEISENBERG_E1"    # eps(x0) * eta(y0)            >= 0.5|<[x0,y0]>|
    OZAWA_E2 = "OZAWA_E2"              # eps*eta + eps*sig(y0) + sig(x0)*eta >= same
    SQL_COND_E3 = "SQL_COND_E3"        # eps_cond >= sigma_cond, per readout
    RESOLUTION_E4 = "RESOLUTION_E4"    # eps(x_t) * eta(y0)           >= 0.5|<[x_t,y_t]>|
    MVOSTD_E12 = "MVOSTD_E12"          # sigma(values) * eta(y0)      >= 0.5|<[x0,y0]>|
    SUM_E13 = "SUM_E13"                # (eps(x0)+sig(x0)) * eta(y0)  >= 0.5|<[x0,y0]>|
    SQL_E14 = "SQL_E14"                # sigma(values)                >= sigma(x0)
    MENSKY_E17 = "MENSKY_E17"          # eps(x_t) * sigma(y_t)        >= 0.5|<[x_t,y_t]>|
    ROBERTSON = "ROBERTSON"            # sigma(x0) * sigma(y0)        >= 0.5|<[x0,y0]>|


@dataclass(frozen=True)
class RelationVerdict:
    relation_id: str
    lhs: float
    rhs: float
    slack: float
    holds: bool
    tol: float


def _verdict(relation_id: RelationId, lhs: float, rhs: float, tol: float) -> RelationVerdict:
    lhs = float(lhs)
    rhs = float(rhs)
    slack = lhs - rhs
    return RelationVerdict(
        relation_id=relation_id.value,
        lhs=lhs,
        rhs=rhs,
        slack=slack,
        holds=slack >= -tol,
        tol=tol,
    )


def _object_bound(state: PureState, x0: HermitianObservable, y0: HermitianObservable) -> float:
    return 0.5 * abs(expectation(state, commutator(x0.matrix, y0.matrix)))


def _evolved_bound(model: IndirectModel, state: PureState, ev: EvolvedOperators) -> float:
    psi = PureState(composite_input(model, state))
    return 0.5 * abs(expectation(psi, commutator(ev.x_t, ev.y_t)))


def check(
    relation_id: RelationId | str,
    model: IndirectModel,
    state: PureState,
    x0: HermitianObservable,
    y0: HermitianObservable,
    *,
    tol: float = DEFAULT_TOL,
    evolved: EvolvedOperators | None = None,
    readout_floor: float = 1e-12,
) -> RelationVerdict:
    """Evaluate one relation on one configuration.

    SQL_COND_E3 is checked per readout (probability above readout_floor) and
    the verdict carries the worst readout; use metrics.conditional_pairs for
    the full per-readout listing.
    """
    rid = RelationId(relation_id)
    ev = evolved if evolved is not None else evolve(model, x0, y0)

    if rid is RelationId.HEISENBERG_E1:
        lhs = error_x0(model, state, x0, evolved=ev) * disturbance_y0(model, state, y0, evolved=ev)
        return _verdict(rid, lhs, _object_bound(state, x0, y0), tol)

    if rid is RelationId.OZAWA_E2:
        eps = error_x0(model, state, x0, evolved=ev)
        eta = disturbance_y0(model, state, y0, evolved=ev)
        lhs = eps * eta + eps * stddev(state, y0) + stddev(state, x0) * eta
        return _verdict(rid, lhs, _object_bound(state, x0, y0), tol)

    if rid is RelationId.SQL_COND_E3:
        pairs = conditional_pairs(model, state, x0, floor=readout_floor)
        if not pairs:
            raise ValueError("no readout above the probability floor")
        worst = min(pairs, key=lambda p: p[2] - p[3])
        return _verdict(rid, worst[2], worst[3], tol)

    if rid is RelationId.RESOLUTION_E4:
        lhs = error_xt(model, state, x0, evolved=ev) * disturbance_y0(model, state, y0, evolved=ev)
        return _verdict(rid, lhs, _evolved_bound(model, state, ev), tol)

    if rid is RelationId.MVOSTD_E12:
        lhs = mvo_stddev(model, state, x0, evolved=ev) * disturbance_y0(model, state, y0, evolved=ev)
        return _verdict(rid, lhs, _object_bound(state, x0, y0), tol)

    if rid is RelationId.SUM_E13:
        eps = error_x0(model, state, x0, evolved=ev)
        eta = disturbance_y0(model, state, y0, evolved=ev)
        lhs = (eps + stddev(state, x0)) * eta
        return _verdict(rid, lhs, _object_bound(state, x0, y0), tol)

    if rid is RelationId.SQL_E14:
        lhs = mvo_stddev(model, state, x0, evolved=ev)
        return _verdict(rid, lhs, stddev(state, x0), tol)

    if rid is RelationId.MENSKY_E17:
        psi = PureState(composite_input(model, state))
        lhs = error_xt(model, state, x0, evolved=ev) * stddev(psi, ev.y_t)
        return _verdict(rid, lhs, _evolved_bound(model, state, ev), tol)

    if rid is RelationId.ROBERTSON:
        lhs = stddev(state, x0) * stddev(state, y0)
        return _verdict(rid, lhs, _object_bound(state, x0, y0), tol)

    raise ValueError(f"unhandled relation {rid!r}")  # pragma: no cover


def check_all(
    model: IndirectModel,
    state: PureState,
    x0: HermitianObservable,
    y0: HermitianObservable,
    *,
    tol: float = DEFAULT_TOL,
    evolved: EvolvedOperators | None = None,
) -> list[RelationVerdict]:
    """All relations in declaration order, sharing one evolved-operator set."""
    ev = evolved if evolved is not None else evolve(model, x0, y0)
    return [check(rid, model, state, x0, y0, tol=tol, evolved=ev) for rid in RelationId]
