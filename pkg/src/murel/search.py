"""Randomized search for uncertainty-relation violation witnesses.

The optimizer is derivative-free: random multi-starts interleaved with
coordinate-wise moves around the incumbent whose step sizes shrink after
unproductive sweeps.  The candidate stream depends only on the seed and on
evaluation history, never on the budget, so a larger budget extends the same
stream: best_slack is monotone non-increasing in the budget and a fixed
(seed, budget) pair reproduces the result bit for bit.

RNG policy: PCG64 behind numpy Generator.  Parallel workers must draw from
disjoint substreams obtained via ``substream(seed, worker_index)`` (SeedSequence
spawn keys); results record the generator name.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .linalg import HermitianObservable, PureState, herm_eig
from .model import IndirectModel, build_shift_model, build_sigma_phi
from .relations import RelationId, RelationVerdict, check
from .scenario import (
    apply_value_map,
    build_configuration,
    make_scenario_doc,
    scenario_from_dict,
)

__all__ = [
    "CertificationError",
    "Family",
    "SearchResult",
    "SearchSpace",
    "certify",
    "haar_unitary",
    "random_model",
    "random_pure_state",
    "search_min_slack",
    "substream",
]

MIN_STEP = 1e-6     # coordinate refinement halts below this step size
EXPLORE_EVERY = 8   # every n-th evaluation is a fresh random draw
RNG_NAME = "pcg64"
MAX_RANDOM_MODEL_DIM = 16


class CertificationError(RuntimeError):
    """A witness failed to reproduce its recorded slack."""


class Family(str, Enum):
    SIGMA_PHI = "sigma_phi"
    SHIFT = "shift"
    RANDOM_UNITARY = "random_unitary"


def substream(seed: int, index: int) -> np.random.Generator:
    """Disjoint child generator #index of a root seed (SeedSequence spawn key)."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=(int(index),))))


def root_generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed))))


def random_pure_state(dim: int, rng: np.random.Generator) -> PureState:
    """Haar-distributed pure state: normalized i.i.d. complex Gaussian vector."""
    if dim < 1:
        raise ValueError("dim must be positive")
    z = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    nrm = np.linalg.norm(z)
    while nrm == 0.0:  # pragma: no cover - probability zero
        z = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        nrm = np.linalg.norm(z)
    return PureState(z / nrm)


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary: QR of a complex Ginibre matrix, phases fixed."""
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    ph = np.where(np.abs(d) > 0, d / np.abs(np.where(np.abs(d) > 0, d, 1)), 1.0)
    return q * ph


def random_model(object_dim: int, probe_dim: int, rng: np.random.Generator) -> IndirectModel:
    """Haar-random interaction with a Haar-random probe and an integer-graded meter."""
    if object_dim < 2 or probe_dim < 2:
        raise ValueError("random models need object and probe dims >= 2")
    if object_dim * probe_dim > MAX_RANDOM_MODEL_DIM:
        raise ValueError(f"product dimension {object_dim * probe_dim} exceeds {MAX_RANDOM_MODEL_DIM}")
    u = haar_unitary(object_dim * probe_dim, rng)
    probe = random_pure_state(probe_dim, rng)
    meter = herm_eig(np.diag(np.arange(probe_dim, dtype=float)))
    return IndirectModel(
        object_dim=object_dim, probe_dim=probe_dim, unitary=u, probe_state=probe, meter=meter
    )


def state_from_angles(dim: int, angles) -> PureState:
    """Pure state from 2*dim-2 reals: dim-1 polar angles, then dim-1 phases."""
    angles = [float(a) for a in angles]
    if len(angles) != 2 * dim - 2:
        raise ValueError(f"need {2 * dim - 2} angles for dim {dim}, got {len(angles)}")
    polar = angles[: dim - 1]
    phases = angles[dim - 1 :]
    amps = np.zeros(dim, dtype=complex)
    sin_prod = 1.0
    for i, th in enumerate(polar):
        amps[i] = sin_prod * math.cos(th)
        sin_prod *= math.sin(th)
    amps[dim - 1] = sin_prod
    for i, al in enumerate(phases, start=1):
        amps[i] *= complex(math.cos(al), math.sin(al))
    nrm = np.linalg.norm(amps)
    return PureState(amps / nrm)


def _state_bounds(dim: int) -> list[tuple[float, float, bool]]:
    polar = [(0.0, math.pi / 2, False)] * (dim - 1)
    phases = [(0.0, 2 * math.pi, True)] * (dim - 1)
    return polar + phases


@dataclass(frozen=True, eq=False)
class SearchSpace:
    """Which configurations the search ranges over.

    x0/y0 default per family ("sigma_x"/"sigma_y" for qubit objects;
    "sigma_z"/"sigma_y" for shift).  value_map composes on top of the
    family's built-in calibration.  For the shift family, probe_state pins
    the probe so only the object state is searched; leave it None to search
    the probe amplitudes as well (restricted to pointer levels that cannot
    wrap the register).
    """

    family: Family | str
    object_dim: int = 2
    probe_dim: int = 4
    x0_spec: str | np.ndarray | None = None
    y0_spec: str | np.ndarray | None = None
    value_map_spec: str = "identity"
    probe_state: np.ndarray | None = None


@dataclass(frozen=True, eq=False)
class _Candidate:
    params: tuple[float, ...]
    context: tuple | None = None  # random_unitary: (unitary, probe amplitudes)


def _default_pair(family: Family, dim: int) -> tuple:
    if family is Family.SHIFT:
        return "sigma_z", "sigma_y"
    if dim == 2:
        return "sigma_x", "sigma_y"
    step = np.zeros((dim, dim))
    for k in range(dim):
        step[(k + 1) % dim, k] = 1.0
    grade = np.diag(np.arange(dim, dtype=float) - (dim - 1) / 2.0)
    return grade, (step + step.T) / 2.0


class _SpaceImpl:
    """Family-specific parameterization behind the generic optimizer."""

    def __init__(self, space: SearchSpace):
        self.family = Family(space.family)
        self.value_map_spec = space.value_map_spec
        if self.family is Family.SIGMA_PHI:
            self.object_dim = 2
            self.probe_dim = 2
        else:
            self.object_dim = int(space.object_dim)
            self.probe_dim = int(space.probe_dim)
        dx, dy = _default_pair(self.family, self.object_dim)
        self.x0_spec = dx if space.x0_spec is None else space.x0_spec
        self.y0_spec = dy if space.y0_spec is None else space.y0_spec
        self.x0 = self._resolve(self.x0_spec)
        self.y0 = self._resolve(self.y0_spec)
        if self.x0.dim != self.object_dim or self.y0.dim != self.object_dim:
            raise ValueError("observable dims do not match the search object dim")

        state_b = _state_bounds(self.object_dim)
        if self.family is Family.SIGMA_PHI:
            self.bounds = [(0.0, 360.0, True)] + state_b
        elif self.family is Family.SHIFT:
            eigs = np.round(self.x0.eigenvalues).astype(int)
            if np.max(np.abs(self.x0.eigenvalues - eigs)) > 1e-9:
                raise ValueError("shift family needs an integer-spectrum x0")
            lo = max(0, -int(eigs.min()))
            hi = self.probe_dim - 1 - int(eigs.max())
            if hi < lo:
                raise ValueError(
                    f"probe_dim {self.probe_dim} leaves no pointer level free of wraparound"
                )
            self.window = (lo, hi)
            if space.probe_state is not None:
                self.fixed_probe = PureState(np.asarray(space.probe_state, dtype=complex))
                build_shift_model(self.x0, self.probe_dim, self.fixed_probe)  # fail fast
                self.bounds = list(state_b)
                self.n_probe_params = 0
            else:
                self.fixed_probe = None
                w = hi - lo + 1
                self.n_probe_params = 2 * w - 2
                self.bounds = _state_bounds(w) + state_b
        else:
            self.bounds = list(state_b)
        self.nparams = len(self.bounds)

    @staticmethod
    def _resolve(spec) -> HermitianObservable:
        from .model import pauli_observable

        return pauli_observable(spec) if isinstance(spec, str) else herm_eig(spec)

    def initial_steps(self) -> np.ndarray:
        return np.array([(hi - lo) / 4.0 for lo, hi, _ in self.bounds], dtype=float)

    def random(self, rng: np.random.Generator) -> _Candidate:
        params = tuple(float(rng.uniform(lo, hi)) for lo, hi, _ in self.bounds)
        if self.family is Family.RANDOM_UNITARY:
            model = random_model(self.object_dim, self.probe_dim, rng)
            return _Candidate(params, (model.unitary, model.probe_state.amplitudes))
        return _Candidate(params)

    def perturb(self, cand: _Candidate, coord: int, step: float, sign: float) -> _Candidate:
        lo, hi, periodic = self.bounds[coord]
        v = cand.params[coord] + sign * step
        if periodic:
            v = lo + ((v - lo) % (hi - lo))
        else:
            v = min(max(v, lo), hi)
        params = list(cand.params)
        params[coord] = float(v)
        return _Candidate(tuple(params), cand.context)

    def _probe_state(self, cand: _Candidate) -> PureState:
        if self.fixed_probe is not None:
            return self.fixed_probe
        lo, hi = self.window
        w = hi - lo + 1
        window_state = state_from_angles(w, cand.params[: self.n_probe_params])
        amps = np.zeros(self.probe_dim, dtype=complex)
        amps[lo : hi + 1] = window_state.amplitudes
        return PureState(amps)

    def build(self, cand: _Candidate) -> tuple[IndirectModel, PureState]:
        if self.family is Family.SIGMA_PHI:
            model = build_sigma_phi(math.radians(cand.params[0]))
            state = state_from_angles(2, cand.params[1:])
        elif self.family is Family.SHIFT:
            model = build_shift_model(self.x0, self.probe_dim, self._probe_state(cand))
            state = state_from_angles(self.object_dim, cand.params[self.n_probe_params :])
        else:
            u, probe_amps = cand.context
            meter = herm_eig(np.diag(np.arange(self.probe_dim, dtype=float)))
            model = IndirectModel(
                object_dim=self.object_dim,
                probe_dim=self.probe_dim,
                unitary=u,
                probe_state=PureState(probe_amps),
                meter=meter,
            )
            state = state_from_angles(self.object_dim, cand.params)
        return apply_value_map(model, self.value_map_spec), state

    def evaluate(self, cand: _Candidate, relation_id, tol: float) -> tuple[float, RelationVerdict]:
        model, state = self.build(cand)
        verdict = check(relation_id, model, state, self.x0, self.y0, tol=tol)
        return verdict.slack, verdict

    def scenario_doc(self, cand: _Candidate, tol: float, seed: int, label: str) -> dict:
        _, state = self.build(cand)
        if self.family is Family.SIGMA_PHI:
            family = "sigma_phi"
            model_params = {"phi_degrees": cand.params[0]}
        elif self.family is Family.SHIFT:
            family = "shift"
            model_params = {
                "probe_dim": self.probe_dim,
                "probe_state": self._probe_state(cand).amplitudes,
            }
        else:
            u, probe_amps = cand.context
            family = "explicit"
            model_params = {
                "object_dim": self.object_dim,
                "unitary": u,
                "probe_state": probe_amps,
                "meter": np.diag(np.arange(self.probe_dim, dtype=float)),
            }
        return make_scenario_doc(
            family=family,
            model_params=model_params,
            state_spec=state.amplitudes,
            x0_spec=self.x0_spec,
            y0_spec=self.y0_spec,
            value_map_spec=self.value_map_spec,
            tolerance=tol,
            seed=seed,
            scenario_id=label,
        )


@dataclass(frozen=True, eq=False)
class SearchResult:
    relation_id: str
    family: str
    budget: int
    seed: int
    evaluations: int
    best_slack: float
    verdict: RelationVerdict | None
    witness_params: tuple[float, ...] | None
    witness_doc: dict | None
    rng_name: str = RNG_NAME

    def violation_found(self, tol: float = 1e-9) -> bool:
        return self.witness_doc is not None and self.best_slack < -tol


def search_min_slack(
    relation_id: RelationId | str,
    space: SearchSpace,
    budget: int,
    seed: int,
    *,
    tol: float = 1e-9,
) -> SearchResult:
    """Minimize relation slack over a configuration family.

    budget counts configuration evaluations; budget 0 returns an empty
    result.  Deterministic in (space, relation, budget, seed).
    """
    rid = RelationId(relation_id)
    if budget < 0:
        raise ValueError("budget must be nonnegative")
    impl = _SpaceImpl(space)
    rng = root_generator(seed)

    best_cand: _Candidate | None = None
    best_slack = math.inf
    best_verdict: RelationVerdict | None = None
    steps = impl.initial_steps()
    coord = 0
    stale = 0

    for t in range(int(budget)):
        refine = (
            best_cand is not None
            and impl.nparams > 0
            and float(np.max(steps)) >= MIN_STEP
            and t % EXPLORE_EVERY != 0
        )
        if refine:
            sign = 1.0 if rng.random() < 0.5 else -1.0
            cand = impl.perturb(best_cand, coord, float(steps[coord]), sign)
            coord = (coord + 1) % impl.nparams
        else:
            cand = impl.random(rng)
        slack, verdict = impl.evaluate(cand, rid, tol)
        if slack < best_slack:
            best_slack, best_cand, best_verdict = slack, cand, verdict
            steps = impl.initial_steps()
            coord = 0
            stale = 0
        elif refine:
            stale += 1
            if stale >= 2 * impl.nparams:
                steps = steps / 2.0
                stale = 0

    if best_cand is None:
        return SearchResult(
            relation_id=rid.value,
            family=impl.family.value,
            budget=int(budget),
            seed=int(seed),
            evaluations=0,
            best_slack=math.inf,
            verdict=None,
            witness_params=None,
            witness_doc=None,
        )
    label = f"witness-{rid.value}-{impl.family.value}-seed{int(seed)}"
    return SearchResult(
        relation_id=rid.value,
        family=impl.family.value,
        budget=int(budget),
        seed=int(seed),
        evaluations=int(budget),
        best_slack=float(best_slack),
        verdict=best_verdict,
        witness_params=best_cand.params,
        witness_doc=impl.scenario_doc(best_cand, tol, int(seed), label),
    )


def certify(result: SearchResult, *, atol: float = 1e-10) -> RelationVerdict:
    """Re-evaluate a witness from its scenario document, from scratch.

    Raises CertificationError if the reproduced slack strays from the
    recorded one by more than atol.
    """
    if result.witness_doc is None:
        raise CertificationError("result carries no witness")
    cfg = build_configuration(scenario_from_dict(result.witness_doc))
    verdict = check(result.relation_id, cfg.model, cfg.state, cfg.x0, cfg.y0, tol=cfg.tolerance)
    if not math.isfinite(verdict.slack) or abs(verdict.slack - result.best_slack) > atol:
        raise CertificationError(
            f"witness does not reproduce: recorded slack {result.best_slack!r}, "
            f"recomputed {verdict.slack!r}"
        )
    return verdict
