"""Error, disturbance, and bias statistics of an indirect measurement.

All root-mean-square quantities are evaluated on the joint input state
(object state (x) probe state).  Quantities built from vector norms are
exactly nonnegative; trace-based ones clamp tiny negative round-off and
reject anything worse as an internal inconsistency.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import (
    HermitianObservable,
    MixedState,
    PureState,
    commutator,
    expectation,
    probe_partial_expectation,
    spectral_norm,
    tensor,
)
from .model import (
    EvolvedOperators,
    IndirectModel,
    composite_input,
    conditional_post_state,
    evolve,
    readout_probabilities,
)

__all__ = [
    "MetricsReport",
    "accuracy_commutator_residual",
    "conditional_pairs",
    "conditional_resolution",
    "disturbance_y0",
    "error_x0",
    "error_xt",
    "full_report",
    "mvo_stddev",
    "random_error",
    "stddev",
    "systematic_error",
    "unbiasedness_residual_x0",
    "unbiasedness_residual_xt",
]

EIGENSTATE_SIGMA_ATOL = 1e-9  # sigma(x0) below this counts as an eigenstate


def _sqrt_clamped(value: float, scale: float) -> float:
    """sqrt of a mathematically nonnegative quantity; tolerate round-off only."""
    tol = 1e-12 * max(1.0, abs(scale))
    if value < -tol:
        raise ArithmeticError(f"negative variance {value!r} beyond round-off (scale {scale!r})")
    return math.sqrt(max(value, 0.0))


def _rms(op: np.ndarray, psi: np.ndarray) -> float:
    """sqrt(<psi|op^2|psi>) for Hermitian op, via ||op psi||."""
    return float(np.linalg.norm(op @ psi))


def _op(x) -> np.ndarray:
    return x.matrix if isinstance(x, HermitianObservable) else np.asarray(x, dtype=complex)


def stddev(state: PureState | MixedState, observable) -> float:
    """Standard deviation of an observable in a pure or mixed state."""
    a = _op(observable)
    if isinstance(state, PureState):
        mean = float(expectation(state, a).real)
        return _rms(a - mean * np.eye(a.shape[0]), state.amplitudes)
    if a.shape != (state.dim, state.dim):
        raise ValueError(f"operator shape {a.shape} does not match state dim {state.dim}")
    mean = float(np.trace(state.rho @ a).real)
    b = a - mean * np.eye(a.shape[0])
    var = float(np.trace(state.rho @ b @ b).real)
    return _sqrt_clamped(var, float(np.trace(state.rho @ a @ a).real) + mean * mean)


def _evolved(model, x0, y0, evolved):
    return evolved if evolved is not None else evolve(model, x0, y0)


def error_x0(
    model: IndirectModel,
    state: PureState,
    x0: HermitianObservable,
    *,
    evolved: EvolvedOperators | None = None,
) -> float:
    """RMS gap between assigned measurement values and the pre-interaction observable."""
    ev = _evolved(model, x0, x0, evolved)
    psi = composite_input(model, state)
    d = ev.mvo_x0 - tensor(x0.matrix, np.eye(model.probe_dim))
    return _rms(d, psi)


def error_xt(
    model: IndirectModel,
    state: PureState,
    x0: HermitianObservable,
    *,
    evolved: EvolvedOperators | None = None,
) -> float:
    """RMS gap between assigned values and the post-interaction observable."""
    ev = _evolved(model, x0, x0, evolved)
    psi = composite_input(model, state)
    return _rms(ev.mvo_xt - ev.x_t, psi)


def disturbance_y0(
    model: IndirectModel,
    state: PureState,
    y0: HermitianObservable,
    *,
    evolved: EvolvedOperators | None = None,
) -> float:
    """RMS change the interaction imposes on a second object observable."""
    ev = _evolved(model, y0, y0, evolved) if evolved is None else evolved
    psi = composite_input(model, state)
    d = ev.y_t - tensor(y0.matrix, np.eye(model.probe_dim))
    return _rms(d, psi)


def mvo_stddev(
    model: IndirectModel,
    state: PureState,
    x0: HermitianObservable,
    *,
    evolved: EvolvedOperators | None = None,
) -> float:
    """Standard deviation of the assigned measurement values."""
    ev = _evolved(model, x0, x0, evolved)
    return stddev(PureState(composite_input(model, state)), ev.mvo_x0)


def systematic_error(
    model: IndirectModel,
    state: PureState,
    x0: HermitianObservable,
    *,
    evolved: EvolvedOperators | None = None,
) -> tuple[float, float]:
    """(delta, |delta|): mean assigned value minus mean of the target observable."""
    ev = _evolved(model, x0, x0, evolved)
    psi = PureState(composite_input(model, state))
    delta = float(expectation(psi, ev.mvo_x0).real) - float(expectation(state, x0.matrix).real)
    return delta, abs(delta)


def random_error(
    model: IndirectModel,
    state: PureState,
    x0: HermitianObservable,
    *,
    evolved: EvolvedOperators | None = None,
) -> float:
    """Statistical error component on an eigenstate of the target observable.

    Defined only where sigma(x0) vanishes; there the total error splits into
    a systematic mean offset and this residual spread:
    eps_rand = sqrt(max(eps^2 - eps_sys^2, 0)).
    """
    sig = stddev(state, x0)
    if sig > EIGENSTATE_SIGMA_ATOL:
        raise ValueError(f"random error undefined: sigma(x0) = {sig!r} > {EIGENSTATE_SIGMA_ATOL}")
    ev = _evolved(model, x0, x0, evolved)
    eps = error_x0(model, state, x0, evolved=ev)
    _, eps_sys = systematic_error(model, state, x0, evolved=ev)
    return math.sqrt(max(eps * eps - eps_sys * eps_sys, 0.0))


def unbiasedness_residual_x0(
    model: IndirectModel,
    x0: HermitianObservable,
    *,
    evolved: EvolvedOperators | None = None,
) -> float:
    """Spectral norm of the probe-averaged bias operator for x0.

    Zero iff assigned values are calibration-true for every object state.
    """
    ev = _evolved(model, x0, x0, evolved)
    d = ev.mvo_x0 - tensor(x0.matrix, np.eye(model.probe_dim))
    return spectral_norm(probe_partial_expectation(d, model.probe_state))


def unbiasedness_residual_xt(
    model: IndirectModel,
    x0: HermitianObservable,
    *,
    evolved: EvolvedOperators | None = None,
) -> float:
    """Spectral norm of the probe-averaged bias operator for the evolved observable."""
    ev = _evolved(model, x0, x0, evolved)
    return spectral_norm(probe_partial_expectation(ev.mvo_xt - ev.x_t, model.probe_state))


def accuracy_commutator_residual(
    model: IndirectModel,
    x0: HermitianObservable,
    y0: HermitianObservable,
    *,
    evolved: EvolvedOperators | None = None,
) -> float:
    """Probe-averaged commutator of the bias operator with the second observable.

    Vanishes for calibration-true models; this is the identity that powers
    the strengthened product/sum relations.
    """
    ev = _evolved(model, x0, y0, evolved)
    ip = np.eye(model.probe_dim)
    d = ev.mvo_x0 - tensor(x0.matrix, ip)
    c = commutator(d, tensor(y0.matrix, ip))
    return spectral_norm(probe_partial_expectation(c, model.probe_state))


def conditional_resolution(
    model: IndirectModel,
    state: PureState,
    x0: HermitianObservable,
    readout: float,
) -> tuple[float, float]:
    """(eps_cond, sigma_cond) of the target observable given one readout.

    eps_cond is the RMS gap to the assigned value m = value_map_xt(readout)
    in the conditional post-measurement object state; sigma_cond is the plain
    standard deviation there.  eps_cond^2 = sigma_cond^2 + (mean - m)^2.
    """
    rho, _prob = conditional_post_state(model, state, readout)
    m = float(model.value_map_xt(float(readout)))
    a = x0.matrix
    mean = float(np.trace(rho.rho @ a).real)
    sigma = stddev(rho, a)
    eps = math.sqrt(sigma * sigma + (mean - m) ** 2)
    return eps, sigma


def conditional_pairs(
    model: IndirectModel,
    state: PureState,
    x0: HermitianObservable,
    *,
    floor: float = 1e-12,
) -> list[tuple[float, float, float, float]]:
    """(readout, probability, eps_cond, sigma_cond) for readouts above the floor."""
    out = []
    for value, prob in readout_probabilities(model, state):
        if prob > floor:
            eps, sigma = conditional_resolution(model, state, x0, value)
            out.append((value, prob, eps, sigma))
    return out


@dataclass(frozen=True)
class MetricsReport:
    """One configuration's error/disturbance statistics.

    eps_rand is None whenever the input state is not an eigenstate of the
    target observable (the systematic/random split is undefined there).
    """

    eps_x0: float
    eps_xt: float
    eta_y0: float
    sigma_x0: float
    sigma_y0: float
    sigma_mvo: float
    delta: float
    eps_sys: float
    eps_rand: float | None
    unbias_res_x0: float
    unbias_res_xt: float


def full_report(
    model: IndirectModel,
    state: PureState,
    x0: HermitianObservable,
    y0: HermitianObservable,
    *,
    evolved: EvolvedOperators | None = None,
) -> MetricsReport:
    ev = _evolved(model, x0, y0, evolved)
    delta, eps_sys = systematic_error(model, state, x0, evolved=ev)
    sigma_x0 = stddev(state, x0)
    eps_rand = (
        random_error(model, state, x0, evolved=ev) if sigma_x0 <= EIGENSTATE_SIGMA_ATOL else None
    )
    return MetricsReport(
        eps_x0=error_x0(model, state, x0, evolved=ev),
        eps_xt=error_xt(model, state, x0, evolved=ev),
        eta_y0=disturbance_y0(model, state, y0, evolved=ev),
        sigma_x0=sigma_x0,
        sigma_y0=stddev(state, y0),
        sigma_mvo=mvo_stddev(model, state, x0, evolved=ev),
        delta=delta,
        eps_sys=eps_sys,
        eps_rand=eps_rand,
        unbias_res_x0=unbiasedness_residual_x0(model, x0, evolved=ev),
        unbias_res_xt=unbiasedness_residual_xt(model, x0, evolved=ev),
    )
