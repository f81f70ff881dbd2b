"""Indirect measurement models: object coupled to a pointer probe.

A model is (U, probe state, meter observable, value maps).  The object
observable of interest evolves in the Heisenberg picture,
``x_t = U^dag (x0 (x) I) U``, the meter reads out through
``X_t = U^dag (I (x) meter) U``, and the measurement values assigned to the
object are carried by the measurement-value operator ``f(X_t)`` for a real
calibration function f.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .linalg import (
    HermitianObservable,
    MixedState,
    PureState,
    apply_spectral,
    as_complex_matrix,
    eigen_clusters,
    expectation,
    herm_eig,
    max_abs,
    tensor,
)

__all__ = [
    "EvolvedOperators",
    "IndirectModel",
    "build_shift_model",
    "build_sigma_phi",
    "composite_input",
    "conditional_post_state",
    "evolve",
    "named_qubit_state",
    "outcome_probabilities",
    "pauli_observable",
    "readout_probabilities",
    "rescale_mvo",
    "sigma_phi_matrix",
]

UNITARITY_ATOL = 1e-10
POPULATED_ATOL = 1e-12  # probe amplitudes above this count as populated
READOUT_MERGE_GAP = 1e-9
ZERO_PROB = 1e-12

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
ID2 = np.eye(2, dtype=complex)

_NAMED_OBSERVABLES = {
    "sigma_x": PAULI_X,
    "sigma_y": PAULI_Y,
    "sigma_z": PAULI_Z,
    "identity": ID2,
}

_SQ2 = 1.0 / np.sqrt(2.0)
_NAMED_QUBIT_STATES = {
    "+x": np.array([_SQ2, _SQ2], dtype=complex),
    "-x": np.array([_SQ2, -_SQ2], dtype=complex),
    "+y": np.array([_SQ2, 1.0j * _SQ2], dtype=complex),
    "-y": np.array([_SQ2, -1.0j * _SQ2], dtype=complex),
    "+z": np.array([1.0, 0.0], dtype=complex),
    "-z": np.array([0.0, 1.0], dtype=complex),
}


def pauli_observable(name: str) -> HermitianObservable:
    try:
        return herm_eig(_NAMED_OBSERVABLES[name])
    except KeyError:
        raise ValueError(f"unknown observable name {name!r}") from None


def named_qubit_state(label: str) -> PureState:
    try:
        return PureState(_NAMED_QUBIT_STATES[label])
    except KeyError:
        raise ValueError(f"unknown state label {label!r}") from None


def sigma_phi_matrix(phi: float) -> np.ndarray:
    """Spin component along the equatorial direction at angle phi: cos(phi) X + sin(phi) Y."""
    return np.cos(phi) * PAULI_X + np.sin(phi) * PAULI_Y


def _identity_map(v: float) -> float:
    return v


@dataclass(frozen=True, eq=False)
class IndirectModel:
    """Object-probe measurement scheme, immutable after construction.

    value_map_x0 calibrates raw meter readings into measurement values for
    the pre-interaction object observable; value_map_xt does the same for
    the post-interaction observable and defaults to value_map_x0.
    """

    object_dim: int
    probe_dim: int
    unitary: np.ndarray
    probe_state: PureState
    meter: HermitianObservable
    value_map_x0: Callable[[float], float] = _identity_map
    value_map_xt: Callable[[float], float] | None = None

    def __post_init__(self):
        if self.object_dim < 1 or self.probe_dim < 1:
            raise ValueError("dimensions must be positive")
        d = self.object_dim * self.probe_dim
        u = as_complex_matrix(self.unitary, name="unitary")
        if u.shape[0] != d:
            raise ValueError(f"unitary dim {u.shape[0]} != object*probe dim {d}")
        drift = max_abs(u.conj().T @ u - np.eye(d))
        if drift > UNITARITY_ATOL:
            raise ValueError(f"non-unitary interaction (max |U^dag U - I| = {drift!r})")
        if self.probe_state.dim != self.probe_dim:
            raise ValueError("probe state dim does not match probe_dim")
        if self.meter.dim != self.probe_dim:
            raise ValueError("meter dim does not match probe_dim")
        u.setflags(write=False)
        object.__setattr__(self, "unitary", u)
        if self.value_map_xt is None:
            object.__setattr__(self, "value_map_xt", self.value_map_x0)

    @property
    def dim(self) -> int:
        return self.object_dim * self.probe_dim


@dataclass(frozen=True, eq=False)
class EvolvedOperators:
    """Heisenberg-picture operators of one model/observable-pair combination."""

    x_t: np.ndarray
    X_t: np.ndarray
    y_t: np.ndarray
    mvo_x0: np.ndarray
    mvo_xt: np.ndarray


def composite_input(model: IndirectModel, state: PureState) -> np.ndarray:
    """Amplitudes of the joint input state, object factor first."""
    if state.dim != model.object_dim:
        raise ValueError(f"object state dim {state.dim} != model object dim {model.object_dim}")
    return np.kron(state.amplitudes, model.probe_state.amplitudes)


def evolve(model: IndirectModel, x0: HermitianObservable, y0: HermitianObservable) -> EvolvedOperators:
    """Conjugate the relevant operators by the interaction unitary."""
    if x0.dim != model.object_dim or y0.dim != model.object_dim:
        raise ValueError("observable dims do not match the model object dim")
    u = model.unitary
    ud = u.conj().T
    ip = np.eye(model.probe_dim)
    io = np.eye(model.object_dim)
    x_t = ud @ tensor(x0.matrix, ip) @ u
    meter_t = ud @ tensor(io, model.meter.matrix) @ u
    y_t = ud @ tensor(y0.matrix, ip) @ u
    meter_obs = herm_eig(meter_t)
    mvo_x0 = apply_spectral(model.value_map_x0, meter_obs).matrix
    mvo_xt = apply_spectral(model.value_map_xt, meter_obs).matrix
    return EvolvedOperators(x_t=x_t, X_t=meter_obs.matrix, y_t=y_t, mvo_x0=mvo_x0, mvo_xt=mvo_xt)


def build_sigma_phi(phi: float) -> IndirectModel:
    """Two-qubit pointer scheme that records the spin component at angle phi.

    The interaction copies the sigma_phi eigenspace label onto the pointer:
    |psi> (x) |0>  ->  (P+ |psi>) (x) |0> + (P- |psi>) (x) |1>, with meter
    diag(+1, -1) in the pointer basis and identity value map.  With phi
    detuned from 0 this is a deliberately miscalibrated measurement of
    sigma_x.
    """
    sp = sigma_phi_matrix(float(phi))
    p_plus = (ID2 + sp) / 2
    p_minus = (ID2 - sp) / 2
    u = tensor(p_plus, ID2) + tensor(p_minus, PAULI_X)
    return IndirectModel(
        object_dim=2,
        probe_dim=2,
        unitary=u,
        probe_state=PureState(np.array([1.0, 0.0], dtype=complex)),
        meter=herm_eig(PAULI_Z),
    )


def build_shift_model(
    x0: HermitianObservable,
    probe_dim: int,
    probe_state: PureState,
) -> IndirectModel:
    """Pointer-shift readout of an integer-spectrum observable.

    The interaction moves the pointer up by the x0 eigenvalue:
    |x> (x) |k> -> |x> (x) |k + eig(x)>.  Pointer arithmetic must stay inside
    the register: every populated pointer level k must satisfy
    0 <= k + eig <= probe_dim - 1 for every eigenvalue, otherwise the model
    is rejected (wrapping the register would corrupt the calibration).

    The meter is diag(0..probe_dim-1) and the value map subtracts the mean
    initial pointer position, so measurement values line up with the x0
    spectrum.
    """
    if probe_state.dim != probe_dim:
        raise ValueError("probe state dim does not match probe_dim")
    eigs = x0.eigenvalues
    rounded = np.round(eigs)
    if max_abs(eigs - rounded) > 1e-9:
        raise ValueError(f"observable spectrum is not integer: {eigs.tolist()!r}")
    shifts = rounded.astype(int)
    populated = np.flatnonzero(np.abs(probe_state.amplitudes) > POPULATED_ATOL)
    if populated.size == 0:
        raise ValueError("probe state has no populated pointer level")
    k_min, k_max = int(populated.min()), int(populated.max())
    e_min, e_max = int(shifts.min()), int(shifts.max())
    if k_min + e_min < 0 or k_max + e_max > probe_dim - 1:
        raise ValueError(
            "pointer shift would wrap around the register: populated levels "
            f"[{k_min}, {k_max}] with eigenvalue range [{e_min}, {e_max}] "
            f"do not fit in 0..{probe_dim - 1}"
        )
    step = np.zeros((probe_dim, probe_dim))
    for k in range(probe_dim):
        step[(k + 1) % probe_dim, k] = 1.0
    u = np.zeros((x0.dim * probe_dim, x0.dim * probe_dim), dtype=complex)
    for value, idx in eigen_clusters(eigs):
        vecs = x0.eigenvectors[:, idx]
        proj = vecs @ vecs.conj().T
        u += tensor(proj, np.linalg.matrix_power(step, int(round(value)) % probe_dim))
    meter = herm_eig(np.diag(np.arange(probe_dim, dtype=float)))
    pointer_mean = float(expectation(probe_state, meter.matrix).real)

    def centered(v: float, _mu: float = pointer_mean) -> float:
        return v - _mu

    return IndirectModel(
        object_dim=x0.dim,
        probe_dim=probe_dim,
        unitary=u,
        probe_state=probe_state,
        meter=meter,
        value_map_x0=centered,
    )


def rescale_mvo(model: IndirectModel, f: Callable[[float], float]) -> IndirectModel:
    """Recalibrate measurement values: value_map_x0 becomes f o value_map_x0.

    Everything else, including value_map_xt, is left untouched.
    """
    old = model.value_map_x0

    def composed(v: float) -> float:
        return float(f(old(v)))

    return replace(model, value_map_x0=composed, value_map_xt=model.value_map_xt)


def _meter_cluster_coeffs(model: IndirectModel, state: PureState):
    """Evolved joint amplitudes resolved per meter eigenvalue cluster.

    Yields (readout value, coefficient matrix) where the coefficient matrix
    holds <i| (x) <v_m| applied to the evolved state, object index by
    cluster-internal index.
    """
    psi_t = model.unitary @ composite_input(model, state)
    amps = psi_t.reshape(model.object_dim, model.probe_dim)
    for value, idx in eigen_clusters(model.meter.eigenvalues, READOUT_MERGE_GAP):
        coeffs = amps @ model.meter.eigenvectors[:, idx].conj()
        yield value, coeffs


def readout_probabilities(model: IndirectModel, state: PureState) -> list[tuple[float, float]]:
    """Born probabilities of raw meter eigenvalues, ascending, zeros included."""
    return [
        (value, float(np.sum(np.abs(coeffs) ** 2)))
        for value, coeffs in _meter_cluster_coeffs(model, state)
    ]


def outcome_probabilities(model: IndirectModel, state: PureState) -> list[tuple[float, float]]:
    """Probabilities of calibrated measurement values.

    Raw readouts are passed through value_map_x0; readouts mapping to the
    same value (within a small gap) are merged.  Sorted ascending by value.
    """
    mapped: list[tuple[float, float]] = []
    for value, prob in readout_probabilities(model, state):
        mapped.append((float(model.value_map_x0(value)), prob))
    mapped.sort(key=lambda vp: vp[0])
    merged: list[tuple[float, float]] = []
    for value, prob in mapped:
        if merged and value - merged[-1][0] <= READOUT_MERGE_GAP:
            merged[-1] = (merged[-1][0], merged[-1][1] + prob)
        else:
            merged.append((value, prob))
    return merged


def conditional_post_state(
    model: IndirectModel, state: PureState, readout: float
) -> tuple[MixedState, float]:
    """Object state after observing a raw meter eigenvalue, with its probability.

    Conditioning on an outcome of probability <= 1e-12 is undefined and
    rejected.
    """
    for value, coeffs in _meter_cluster_coeffs(model, state):
        if abs(value - readout) <= READOUT_MERGE_GAP:
            prob = float(np.sum(np.abs(coeffs) ** 2))
            if prob <= ZERO_PROB:
                raise ValueError(f"readout {readout!r} has probability {prob!r}; conditioning undefined")
            rho = coeffs @ coeffs.conj().T / prob
            rho = (rho + rho.conj().T) / 2
            return MixedState(rho), prob
    raise ValueError(f"readout {readout!r} is not a meter eigenvalue")
