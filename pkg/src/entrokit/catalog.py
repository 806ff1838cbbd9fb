"""Concrete model systems with closed-form oracles and process engines.

The engines play nature: they execute weight processes, polygonal chains,
and standard weight processes consistently with each model's oracle entropy
(total entropy never decreases, reversible means zero generation).  The
ideal gas additionally exposes an independent quasistatic route for the
reservoir drain, computed from the equation of state alone.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from math import lgamma
from typing import Optional

import numpy as np

from .core import (
    AccessibilityRelation,
    ModelSystem,
    ProcessRecord,
    State,
    StateKind,
    StateSpace,
    parts_of,
    scale as scale_space,
)
from .energy import AGAINST, ALONG, WeightPolygonal
from .errors import CapabilityError, DomainError, EngineError, ParseError
from .quadrature import line_integral
from .reservoir import Reservoir, StandardWeightProcessRecord

R_GAS = 8.314462618  # J/(mol K)
K_BOLTZMANN = 1.380649e-23  # J/K

REVERSIBLE_DS_TOL = 1e-12  # below this, a process counts as entropy-preserving


def _state_kind(deficit: float) -> StateKind:
    return StateKind.NONEQUILIBRIUM if deficit > 0 else StateKind.STABLE_EQUILIBRIUM


class _EngineBase:
    """Common bookkeeping for oracle-driven engines."""

    def __init__(self):
        self.model: Optional[ModelSystem] = None
        self.polygonal_work_noise = 0.0

    def bind(self, model: ModelSystem):
        self.model = model

    # subclasses: oracle_entropy, energy_fn, sample_state, state constructors

    def _delta_s(self, a, b) -> float:
        sa = sum(self.oracle_entropy(p) for p in parts_of(a))
        sb = sum(self.oracle_entropy(p) for p in parts_of(b))
        return sb - sa

    def weight_process(self, a, b) -> ProcessRecord:
        """A weight process from a to b; nature refuses entropy decreases."""
        ds = self._delta_s(a, b)
        if ds < -REVERSIBLE_DS_TOL:
            raise EngineError(
                "nature refuses: the requested weight process would lower entropy "
                f"by {-ds:.3e} J/K",
                witness=(a, b),
            )
        sigma = ds if ds >= REVERSIBLE_DS_TOL else 0.0
        ea = sum(p.energy for p in parts_of(a))
        eb = sum(p.energy for p in parts_of(b))
        return ProcessRecord(
            "weight", a, b, work_done=ea - eb,
            reversible=(sigma == 0.0), sigma=sigma,
        )

    def connect_polygonal(self, a, b, rng: random.Random, legs: int = None) -> WeightPolygonal:
        """A random chain of weight processes joining a to b, each leg
        traversed in whichever direction nature permits."""
        if legs is None:
            legs = rng.randint(1, 4)
        if legs < 1:
            raise DomainError("a polygonal needs at least one leg")
        chain = [a]
        for _ in range(legs - 1):
            chain.append(self.sample_state(rng))
        chain.append(b)
        leg_records = []
        for p, q in zip(chain, chain[1:]):
            if self._delta_s(p, q) >= -REVERSIBLE_DS_TOL:
                rec, direction = self.weight_process(p, q), ALONG
            else:
                rec, direction = self.weight_process(q, p), AGAINST
            if self.polygonal_work_noise:
                rec = ProcessRecord(
                    rec.kind, rec.initial, rec.final,
                    rec.work_done + self.polygonal_work_noise,
                    reversible=rec.reversible, sigma=rec.sigma,
                )
            leg_records.append((rec, direction))
        return WeightPolygonal(tuple(leg_records), (a, b))

    def reversible_swp(self, a, b, r: Reservoir) -> StandardWeightProcessRecord:
        """Reversible standard weight process: the reservoir absorbs exactly
        the opposite of the system's entropy change."""
        ds_system = self._delta_s(a, b)
        delta = r.delta_energy_for_delta_entropy(-ds_system)
        return StandardWeightProcessRecord(
            system_pair=(a, b),
            reservoir_id=r.id,
            delta_e_r=delta,
            reversible=True,
            sigma=0.0,
            reservoir_energy_before=r.energy,
            reservoir_energy_after=r.energy + delta,
        )

    def carnot_reservoir_delta(self, a, b, r: Reservoir) -> float:
        raise CapabilityError(
            f"model {self.model.id!r} provides no quasistatic integrator"
        )

    def sample_nonequilibrium(self, rng: random.Random) -> State:
        raise CapabilityError("model has no nonequilibrium state family")

    def relax_to_ses(self, state: State) -> ProcessRecord:
        """Zero-work relaxation to the stable state with the same energy and
        regions."""
        target = self.ses_with_energy(state.energy, state.region)
        ds = self._delta_s(state, target)
        sigma = ds if ds >= REVERSIBLE_DS_TOL else 0.0
        return ProcessRecord(
            "weight", state, target, work_done=0.0,
            reversible=(sigma == 0.0), sigma=sigma,
        )

    def reversible_chain_via_ses(self, a1, a2, r: Reservoir):
        """a1 -> equal-entropy stable state -> (reservoir process) -> stable
        anchor of a2 -> a2; reversible end to end."""
        s1 = sum(self.oracle_entropy(p) for p in parts_of(a1))
        s2 = sum(self.oracle_entropy(p) for p in parts_of(a2))
        a3 = self.ses_with_entropy(s1, a1.region)
        a4 = self.ses_with_entropy(s2, a2.region)
        rec1 = self.weight_process(a1, a3)
        rec2 = self.reversible_swp(a3, a4, r)
        rec3 = self.weight_process(a4, a2)
        solver_residual = abs(self._delta_s(a1, a3)) + abs(self._delta_s(a4, a2))
        total_sigma = rec1.sigma + rec2.sigma + rec3.sigma + solver_residual
        return [rec1, rec2, rec3], total_sigma


# ---------------------------------------------------------------------------
# Ideal gas
# ---------------------------------------------------------------------------

class IdealGasEngine(_EngineBase):
    def __init__(self, n: float, c_v_hat: float, gauge: tuple[float, float, float],
                 box: tuple[tuple[float, float], tuple[float, float]]):
        super().__init__()
        self.n0 = n
        self.cv = c_v_hat
        self.u_star, self.v_star, self.s_star = gauge
        self.box = box

    # -- state plumbing -------------------------------------------------

    def base_space_id(self) -> str:
        return f"{self.model.id}:base"

    def n_eff(self, state: State) -> float:
        return self.n0 * self.model.spaces[state.space_id].scale

    def state(self, u: float, v: float, deficit: float = 0.0,
              space_id: Optional[str] = None) -> State:
        if u <= 0 or v <= 0:
            raise DomainError(f"ideal gas needs U > 0 and V > 0, got ({u}, {v})")
        if deficit < 0:
            raise DomainError("entropy deficit cannot be negative")
        return State(
            space_id=space_id or self.base_space_id(),
            coords=(u, v, deficit),
            energy=u,
            region=("vol", v),
            kind=_state_kind(deficit),
        )

    def oracle_entropy(self, state: State) -> float:
        u, v, deficit = state.coords
        n = self.n_eff(state)
        s_eq = n * R_GAS * (
            self.cv * math.log(u / (n * self.u_star))
            + math.log(v / (n * self.v_star))
        ) + n * self.s_star
        return s_eq - deficit

    def energy_fn(self, state: State) -> float:
        return state.coords[0]

    def temperature(self, state: State) -> float:
        return state.coords[0] / (self.cv * self.n_eff(state) * R_GAS)

    def pressure(self, state: State) -> float:
        u, v, _ = state.coords
        return u / (self.cv * v)

    def scale_state(self, model: ModelSystem, state: State, t: float) -> State:
        space = model.spaces[state.space_id]
        scaled = scale_space(model, space, t)
        u, v, deficit = state.coords
        return State(
            space_id=scaled.id,
            coords=(t * u, t * v, t * deficit),
            energy=t * u,
            region=("vol", t * v),
            kind=state.kind,
        )

    # -- sampling --------------------------------------------------------

    def sample_state(self, rng: random.Random) -> State:
        (ulo, uhi), (vlo, vhi) = self.box
        return self.state(rng.uniform(ulo, uhi), rng.uniform(vlo, vhi))

    def sample_nonequilibrium(self, rng: random.Random) -> State:
        lo, hi = self.entropy_range()
        for _ in range(1000):
            base = self.sample_state(rng)
            deficit = rng.uniform(0.05, 1.5)
            s = self.oracle_entropy(base) - deficit
            if lo + 1.0 < s < hi - 1.0:
                return self.state(base.coords[0], base.coords[1], deficit)
        raise EngineError("could not sample a bracketed nonequilibrium state")

    def entropy_range(self) -> tuple[float, float]:
        (ulo, uhi), (vlo, vhi) = self.box
        return (
            self.oracle_entropy(self.state(ulo, vlo)),
            self.oracle_entropy(self.state(uhi, vhi)),
        )

    def grid(self, nu: int = 21, nv: int = 21) -> list[State]:
        (ulo, uhi), (vlo, vhi) = self.box
        us = np.linspace(ulo, uhi, nu)
        vs = np.linspace(vlo, vhi, nv)
        return [self.state(float(u), float(v)) for u in us for v in vs]

    def gamma_grid(self) -> list[State]:
        # Deterministic equilibrium covering of the box, corners included,
        # so sandwich searches can bracket any interior entropy value.
        return self.grid(7, 7)

    def isentropic_partner(self, state: State, rng: random.Random) -> Optional[State]:
        """A distinct state on the same entropy level set."""
        u, v, deficit = state.coords
        factor = rng.uniform(1.05, 1.3)
        v2 = v * factor
        u2 = u * factor ** (-1.0 / self.cv)
        return self.state(u2, v2, deficit, space_id=state.space_id)

    # -- stable-state solvers ---------------------------------------------

    def ses_with_energy(self, energy: float, region) -> State:
        _, v = region
        return self.state(energy, v)

    def ses_with_entropy(self, s_target: float, region) -> State:
        _, v = region
        n = self.n0
        log_u = (
            (s_target - n * self.s_star) / (n * R_GAS)
            - math.log(v / (n * self.v_star))
        ) / self.cv
        return self.state(n * self.u_star * math.exp(log_u), v)

    # -- processes ---------------------------------------------------------

    def raise_energy(self, state: State, de: float) -> ProcessRecord:
        """Stirring: energy up at fixed regions, landing on the stable state."""
        if de <= 0:
            raise DomainError("stirring must raise the energy")
        u, v, _ = state.coords
        return self.weight_process(state, self.state(u + de, v))

    def attempt_process_at_fixed_region(self, start: State, rng: random.Random):
        """Propose a random weight process keeping the regions fixed; returns
        None when nature refuses it."""
        u, v, _ = start.coords
        u2 = u * math.exp(rng.uniform(-0.5, 0.5))
        deficit = 0.0 if rng.random() < 0.5 else rng.uniform(0.0, 0.5)
        candidate = self.state(u2, v, deficit)
        try:
            return self.weight_process(start, candidate)
        except EngineError:
            return None

    def random_weight_processes(self, n: int, rng: random.Random) -> list[ProcessRecord]:
        records = []
        while len(records) < n:
            draw = rng.random()
            a = self.sample_state(rng)
            if draw < 0.4:
                b = self.isentropic_partner(a, rng)
                records.append(self.weight_process(a, b))
            elif draw < 0.7:
                records.append(self.raise_energy(a, rng.uniform(10.0, 500.0)))
            else:
                b = self.sample_state(rng)
                if self._delta_s(a, b) < 0:
                    a, b = b, a
                if self._delta_s(a, b) < REVERSIBLE_DS_TOL:
                    continue
                records.append(self.weight_process(a, b))
        return records

    # -- quasistatic route ----------------------------------------------

    def carnot_reservoir_delta(self, a: State, b: State, r: Reservoir) -> float:
        """Reservoir drain via a quasistatic path integral of the heat form
        over temperature, using only the equation of state."""
        for s in (a, b):
            if s.coords[2] != 0.0:
                raise CapabilityError(
                    "the quasistatic route joins stable equilibrium states only"
                )
        n_a = self.n_eff(a)
        if not math.isclose(n_a, self.n_eff(b), rel_tol=1e-12):
            raise CapabilityError("end states must carry the same amount")
        cv = self.cv

        def one_form(coords: np.ndarray) -> np.ndarray:
            u, v = coords
            # (dU + p dV)/T with p = U/(cv V) and T = U/(cv n R)
            return np.array([cv * n_a * R_GAS / u, n_a * R_GAS / v])

        p0 = np.array([a.coords[0], a.coords[1]])
        p1 = np.array([b.coords[0], b.coords[1]])

        def segment(s: float):
            return p0 + s * (p1 - p0), p1 - p0

        ds_system = line_integral(one_form, [segment]).value
        return r.delta_energy_for_delta_entropy(-ds_system)


def ideal_gas(
    n: float = 1.0,
    c_v_hat: float = 1.5,
    gauge: tuple[float, float, float] = (1.0, 1.0, 0.0),
    box: tuple[tuple[float, float], tuple[float, float]] = ((500.0, 10000.0), (0.005, 0.1)),
    model_id: str = "idealgas",
) -> ModelSystem:
    """Monatomic-by-default ideal gas with scaling support and both reservoir
    routes."""
    if n <= 0:
        raise DomainError("amount of substance must be positive")
    engine = IdealGasEngine(n, c_v_hat, gauge, box)
    base = StateSpace(
        id=f"{model_id}:base",
        coord_names=("U", "V", "d"),
        composition_tag=f"gas:n={n}:cv={c_v_hat}",
        scale=1.0,
    )
    model = ModelSystem(
        id=model_id,
        spaces={base.id: base},
        energy_fn=engine.energy_fn,
        oracle_entropy=engine.oracle_entropy,
        process_engine=engine,
        is_normal=True,
        energy_bounds=None,
        supports_scaling=True,
        scale_state_fn=engine.scale_state,
        entropy_atol=1e-10,
        isentropic_partner=engine.isentropic_partner,
    )
    return model


# ---------------------------------------------------------------------------
# Two-level spin system
# ---------------------------------------------------------------------------

class TwoLevelSpinEngine(_EngineBase):
    def __init__(self, n_particles: int, eps: float):
        super().__init__()
        self.n_particles = n_particles
        self.eps = eps
        self.e_max = n_particles * eps
        self.box = (0.05 * self.e_max, 0.95 * self.e_max)

    def base_space_id(self) -> str:
        return f"{self.model.id}:base"

    def state(self, e: float, deficit: float = 0.0) -> State:
        if not 0.0 <= e <= self.e_max:
            raise DomainError(
                f"spin energy must lie in [0, {self.e_max:.3e}] J, got {e:.3e}"
            )
        return State(
            space_id=self.base_space_id(),
            coords=(e, deficit),
            energy=e,
            region=("lattice", self.n_particles),
            kind=_state_kind(deficit),
        )

    def equilibrium_entropy(self, e: float) -> float:
        x = e / self.eps
        n = self.n_particles
        return K_BOLTZMANN * (lgamma(n + 1.0) - lgamma(x + 1.0) - lgamma(n - x + 1.0))

    def oracle_entropy(self, state: State) -> float:
        e, deficit = state.coords
        return self.equilibrium_entropy(e) - deficit

    def energy_fn(self, state: State) -> float:
        return state.coords[0]

    def sample_state(self, rng: random.Random) -> State:
        return self.state(rng.uniform(*self.box))

    def gamma_grid(self) -> list[State]:
        lo, hi = self.box
        return [self.state(float(e)) for e in np.linspace(lo, hi, 25)]

    def sample_nonequilibrium(self, rng: random.Random) -> State:
        s_lo = self.equilibrium_entropy(self.box[0])
        for _ in range(1000):
            e = rng.uniform(0.2 * self.e_max, 0.8 * self.e_max)
            deficit = rng.uniform(1.0, 5.0) * K_BOLTZMANN
            if self.equilibrium_entropy(e) - deficit > s_lo + K_BOLTZMANN:
                return self.state(e, deficit)
        raise EngineError("could not sample a bracketed nonequilibrium spin state")

    def ses_with_energy(self, energy: float, region) -> State:
        return self.state(energy)

    def ses_with_entropy(self, s_target: float, region) -> State:
        # Increasing branch only: energies below the entropy maximum.
        lo, hi = 0.0, self.e_max / 2.0
        if not (self.equilibrium_entropy(lo) <= s_target <= self.equilibrium_entropy(hi)):
            raise EngineError(
                f"spin entropy target {s_target:.3e} J/K outside reachable range"
            )
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if self.equilibrium_entropy(mid) < s_target:
                lo = mid
            else:
                hi = mid
        return self.state(0.5 * (lo + hi))

    def raise_energy(self, state: State, de: float) -> ProcessRecord:
        if de <= 0:
            raise DomainError("stirring must raise the energy")
        e, _ = state.coords
        if e + de > self.e_max:
            raise EngineError(
                f"spin energy bound {self.e_max:.3e} J exceeded", witness=state
            )
        return self.weight_process(state, self.state(e + de))

    def attempt_process_at_fixed_region(self, start: State, rng: random.Random):
        e2 = rng.uniform(*self.box)
        deficit = 0.0 if rng.random() < 0.5 else rng.uniform(0.0, 2.0) * K_BOLTZMANN
        try:
            return self.weight_process(start, self.state(e2, deficit))
        except EngineError:
            return None

    def random_weight_processes(self, n: int, rng: random.Random) -> list[ProcessRecord]:
        records = []
        while len(records) < n:
            a = self.sample_state(rng)
            b = self.sample_state(rng)
            if self._delta_s(a, b) < 0:
                a, b = b, a
            if self._delta_s(a, b) < REVERSIBLE_DS_TOL:
                records.append(self.weight_process(a, a))
            else:
                records.append(self.weight_process(a, b))
        return records


def two_level_spin(n_particles: int = 100, eps: float = 1e-21,
                   model_id: str = "spin") -> ModelSystem:
    """Bounded-energy spin bath; not normal, no scaled copies."""
    if n_particles < 2:
        raise DomainError("need at least two particles")
    engine = TwoLevelSpinEngine(n_particles, eps)
    base = StateSpace(
        id=f"{model_id}:base",
        coord_names=("E", "d"),
        composition_tag=f"spin:N={n_particles}:eps={eps}",
        scale=1.0,
    )
    return ModelSystem(
        id=model_id,
        spaces={base.id: base},
        energy_fn=engine.energy_fn,
        oracle_entropy=engine.oracle_entropy,
        process_engine=engine,
        is_normal=False,
        energy_bounds=(0.0, engine.e_max),
        supports_scaling=False,
        entropy_atol=K_BOLTZMANN * n_particles * 1e-13,
    )


# ---------------------------------------------------------------------------
# Triple-point reservoir
# ---------------------------------------------------------------------------

def triple_point_reservoir(
    capacity: float, energy: float = 0.0, reservoir_id: str = "triple-point"
) -> Reservoir:
    """Finite-capacity three-phase reservoir: exactly affine at 273.16 K
    inside its energy window, different phase slopes outside."""
    if capacity <= 0:
        raise DomainError("capacity window must be non-empty")
    return Reservoir(
        id=reservoir_id,
        temperature=273.16,
        energy=energy,
        ref_energy=energy,
        ref_entropy=0.0,
        region=("three-phase-cell", capacity),
        window=(energy - capacity, energy + capacity),
        outside_temperatures=(273.16 / 2.0, 273.16 * 2.0),
    )


# ---------------------------------------------------------------------------
# Finite preorder fixtures
# ---------------------------------------------------------------------------

@dataclass
class FinitePreorderFixture:
    """An explicit relation over labelled states, as loaded from a file."""

    ids: list
    pairs: set
    kinds: dict = field(default_factory=dict)

    def relation(self) -> AccessibilityRelation:
        return AccessibilityRelation.finite(self.ids, self.pairs)


def load_fixture(path) -> FinitePreorderFixture:
    """Parse a fixture file: states plus relation pairs as integer-id lists."""
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    except OSError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    if not isinstance(raw, dict) or "states" not in raw or "pairs" not in raw:
        raise ParseError(f"{path}: fixture needs 'states' and 'pairs' keys")
    if not isinstance(raw["states"], list) or not isinstance(raw["pairs"], list):
        raise ParseError(f"{path}: 'states' and 'pairs' must be lists")
    ids = []
    kinds = {}
    for entry in raw["states"]:
        if isinstance(entry, dict):
            if "id" not in entry:
                raise ParseError(f"{path}: state entry missing 'id': {entry!r}")
            sid = entry["id"]
            kinds[sid] = entry.get("kind", "stable_equilibrium")
        else:
            sid = entry
        if sid in ids:
            raise ParseError(f"{path}: duplicate state id {sid!r}")
        ids.append(sid)
    known = set(ids)
    pairs = set()
    for i, pair in enumerate(raw["pairs"]):
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise ParseError(f"{path}: pair #{i} is not a two-element list: {pair!r}")
        a, b = pair
        if a not in known or b not in known:
            raise ParseError(f"{path}: pair #{i} references unknown state: {pair!r}")
        pairs.add((a, b))
    return FinitePreorderFixture(ids, pairs, kinds)


def chain_fixture(n: int) -> FinitePreorderFixture:
    """The total order 0 <= 1 <= ... <= n-1, reflexive-transitively closed."""
    ids = list(range(n))
    pairs = {(i, j) for i in ids for j in ids if i <= j}
    return FinitePreorderFixture(ids, pairs)


def discrete_spin_fixture(n_particles: int = 12) -> FinitePreorderFixture:
    """The exact discrete levels of a small spin bath as a finite relation.

    Level k carries entropy ln C(N, k) (in units of k_B), so mirror levels k
    and N-k are genuinely equivalent; the relation is a total preorder and
    small enough for exhaustive order checks.
    """
    if not 2 <= n_particles <= 20:
        raise DomainError("exhaustive spin fixture needs 2 <= N <= 20 particles")
    ids = list(range(n_particles + 1))
    level = {k: math.comb(n_particles, k) for k in ids}
    pairs = {(a, b) for a in ids for b in ids if level[a] <= level[b]}
    return FinitePreorderFixture(ids, pairs)


def random_closed_dag_fixture(n: int, seed: int = 0, density: float = 0.05) -> FinitePreorderFixture:
    """A random DAG closed under reflexivity and transitivity."""
    rng = random.Random(seed)
    reach = np.eye(n, dtype=bool)
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < density:
                reach[i, j] = True
    # Boolean Warshall closure.
    for k in range(n):
        reach |= np.outer(reach[:, k], reach[k, :])
    ids = list(range(n))
    pairs = {(i, j) for i in range(n) for j in range(n) if reach[i, j]}
    return FinitePreorderFixture(ids, pairs)


# ---------------------------------------------------------------------------
# Simple-system view of the ideal gas (for the quasistatic structure checks)
# ---------------------------------------------------------------------------

def ideal_gas_simple_system(n: float = 1.0, c_v_hat: float = 1.5,
                            box=((300.0, 600.0), (0.01, 0.02))):
    """The gas in (tau, V) coordinates with its quasistatic structure spelled
    out analytically: work form p dV, collapse M dx0 with M = n R tau and
    x0 = cv ln(tau) + ln(V), factorization f(tau) = tau, alpha = n R, c = 1."""
    from .pfaffian import SimpleSystemModel

    nr = n * R_GAS

    def u_fn(coords):
        tau, _ = coords
        return c_v_hat * nr * tau

    def p_fn(coords):
        tau, v = coords
        return nr * tau / v

    def m_fn(coords):
        tau, _ = coords
        return nr * tau

    def x0_fn(coords):
        tau, v = coords
        return c_v_hat * math.log(tau) + math.log(v)

    def tau_fn(coords):
        return coords[0]

    def u_grad(coords):
        return np.array([c_v_hat * nr, 0.0])

    def x0_grad(coords):
        tau, v = coords
        return np.array([c_v_hat / tau, 1.0 / v])

    return SimpleSystemModel(
        coord_names=("tau", "V"),
        u_fn=u_fn,
        p_fns=(p_fn,),
        m_fn=m_fn,
        x0_fn=x0_fn,
        tau_fn=tau_fn,
        f_fn=lambda tau: tau,
        alpha_fn=lambda x0: nr,
        c=1.0,
        coord_box=box,
        u_grad_fn=u_grad,
        x0_grad_fn=x0_grad,
    )
