"""Dense complex linear algebra on small finite-dimensional Hilbert spaces.

Operators are plain complex ndarrays; observables additionally carry a frozen
eigendecomposition so spectral functions and outcome enumeration stay cheap
and mutually consistent.  Composite indices are object-major throughout:
``|i> (x) |k>`` of an object/probe product sits at flat index
``i * probe_dim + k``, which matches ``numpy.kron(object_factor, probe_factor)``.

All containers are immutable after construction and every function is pure,
so everything here is safe to call from parallel workers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "DEGENERACY_GAP",
    "HermitianObservable",
    "MixedState",
    "PureState",
    "adjoint",
    "apply_spectral",
    "as_complex_matrix",
    "commutator",
    "eigen_clusters",
    "expectation",
    "herm_eig",
    "max_abs",
    "probe_partial_expectation",
    "spectral_norm",
    "tensor",
]

HERM_STORE_ATOL = 1e-12   # hermiticity required of stored observable matrices
HERM_ACCEPT_ATOL = 1e-10  # drift tolerated on herm_eig input before rejection
RECON_ATOL = 1e-10        # eigendecomposition must reconstruct to this
STATE_NORM_ATOL = 1e-12
DEGENERACY_GAP = 1e-9     # eigenvalues closer than this form one cluster


def as_complex_matrix(a, *, name: str = "matrix") -> np.ndarray:
    """Coerce to a square, finite, complex ndarray (copies its input)."""
    arr = np.array(a, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
        raise ValueError(f"{name} must be square, got shape {arr.shape}")
    if not np.all(np.isfinite(arr.real)) or not np.all(np.isfinite(arr.imag)):
        raise ValueError(f"{name} has non-finite entries")
    return arr


def max_abs(a) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def spectral_norm(a) -> float:
    """Largest singular value."""
    a = np.asarray(a, dtype=complex)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, ord=2))


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class PureState:
    """Unit-norm state vector."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amp = np.array(self.amplitudes, dtype=complex)
        if amp.ndim != 1 or amp.size < 1:
            raise ValueError(f"state must be a vector, got shape {amp.shape}")
        if not np.all(np.isfinite(amp.real)) or not np.all(np.isfinite(amp.imag)):
            raise ValueError("state has non-finite amplitudes")
        nrm = float(np.linalg.norm(amp))
        if abs(nrm - 1.0) > STATE_NORM_ATOL:
            raise ValueError(f"state not normalized: ||psi|| = {nrm!r}")
        object.__setattr__(self, "amplitudes", _freeze(amp))

    @property
    def dim(self) -> int:
        return self.amplitudes.size


@dataclass(frozen=True, eq=False)
class MixedState:
    """Density matrix: Hermitian, unit trace, positive semidefinite."""

    rho: np.ndarray

    def __post_init__(self):
        rho = as_complex_matrix(self.rho, name="density matrix")
        if max_abs(rho - rho.conj().T) > HERM_STORE_ATOL:
            raise ValueError("density matrix is not Hermitian")
        tr = complex(np.trace(rho))
        if abs(tr - 1.0) > 1e-10:
            raise ValueError(f"density matrix trace {tr!r} != 1")
        w = np.linalg.eigvalsh(rho)
        if float(w.min()) < -1e-10:
            raise ValueError(f"density matrix has negative eigenvalue {w.min()!r}")
        object.__setattr__(self, "rho", _freeze(rho))

    @property
    def dim(self) -> int:
        return self.rho.shape[0]


@dataclass(frozen=True, eq=False)
class HermitianObservable:
    """Hermitian matrix together with a validated eigendecomposition.

    eigenvalues are ascending; eigenvectors are orthonormal columns, paired
    index-for-index with the eigenvalues.
    """

    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self):
        m = as_complex_matrix(self.matrix, name="observable")
        if max_abs(m - m.conj().T) > HERM_STORE_ATOL:
            raise ValueError("observable matrix is not Hermitian")
        w = np.array(self.eigenvalues, dtype=float)
        v = as_complex_matrix(self.eigenvectors, name="eigenvectors")
        n = m.shape[0]
        if w.shape != (n,) or v.shape != (n, n):
            raise ValueError("eigendecomposition shape mismatch")
        if np.any(np.diff(w) < 0):
            raise ValueError("eigenvalues must be ascending")
        if max_abs(v.conj().T @ v - np.eye(n)) > RECON_ATOL:
            raise ValueError("eigenvectors are not orthonormal")
        if max_abs((v * w) @ v.conj().T - m) > RECON_ATOL:
            raise ValueError("eigendecomposition does not reconstruct the matrix")
        object.__setattr__(self, "matrix", _freeze(m))
        object.__setattr__(self, "eigenvalues", _freeze(w))
        object.__setattr__(self, "eigenvectors", _freeze(v))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def herm_eig(a, *, atol: float = HERM_ACCEPT_ATOL) -> HermitianObservable:
    """Eigendecompose a Hermitian matrix into a HermitianObservable.

    Input may drift from exact hermiticity by up to `atol`; it is
    symmetrized before decomposition.  Larger drift is rejected.
    """
    m = as_complex_matrix(a, name="observable")
    drift = max_abs(m - m.conj().T)
    if drift > atol:
        raise ValueError(f"matrix is not Hermitian (max |A - A^dag| = {drift!r})")
    m = (m + m.conj().T) / 2
    w, v = np.linalg.eigh(m)
    return HermitianObservable(m, w, v)


def tensor(a, b) -> np.ndarray:
    """Kronecker product, object factor first."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def adjoint(a) -> np.ndarray:
    return np.asarray(a, dtype=complex).conj().T


def commutator(a, b) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValueError(f"commutator shape mismatch: {a.shape} vs {b.shape}")
    return a @ b - b @ a


def expectation(state: PureState, a) -> complex:
    """<psi|A|psi>.  Returns the full complex value; callers take Re/abs."""
    a = np.asarray(a, dtype=complex)
    psi = state.amplitudes
    if a.shape != (psi.size, psi.size):
        raise ValueError(f"operator shape {a.shape} does not match state dim {psi.size}")
    return complex(psi.conj() @ (a @ psi))


def apply_spectral(f: Callable[[float], float], obs: HermitianObservable) -> HermitianObservable:
    """Apply a real scalar function to an observable through its spectrum."""
    mapped = np.array([float(f(float(w))) for w in obs.eigenvalues], dtype=float)
    if not np.all(np.isfinite(mapped)):
        raise ValueError("spectral function produced a non-finite value")
    order = np.argsort(mapped, kind="stable")
    w = mapped[order]
    v = obs.eigenvectors[:, order]
    m = (v * w) @ v.conj().T
    m = (m + m.conj().T) / 2
    return HermitianObservable(m, w, v)


def probe_partial_expectation(a, probe_state: PureState) -> np.ndarray:
    """Average a product-space operator over the probe factor.

    For A acting on object (x) probe, returns the object operator
    M[i, j] = sum_{k,l} conj(xi[k]) * A[(i,k),(j,l)] * xi[l].
    """
    a = as_complex_matrix(a, name="operator")
    dp = probe_state.dim
    d = a.shape[0]
    if d % dp != 0:
        raise ValueError(f"dimension factorization mismatch: {d} not divisible by probe dim {dp}")
    do = d // dp
    a4 = a.reshape(do, dp, do, dp)
    xi = probe_state.amplitudes
    return np.einsum("k,ikjl,l->ij", xi.conj(), a4, xi)


def eigen_clusters(values: np.ndarray, gap: float = DEGENERACY_GAP) -> list[tuple[float, np.ndarray]]:
    """Group ascending eigenvalues into clusters separated by more than `gap`.

    Returns (representative value, index array) per cluster, ascending.
    """
    values = np.asarray(values, dtype=float)
    clusters: list[tuple[float, np.ndarray]] = []
    start = 0
    for i in range(1, values.size + 1):
        if i == values.size or values[i] - values[i - 1] > gap:
            idx = np.arange(start, i)
            clusters.append((float(np.mean(values[idx])), idx))
            start = i
    return clusters
