"""Shared domain types: states, state spaces, composition, scaling, and the
adiabatic-accessibility preorder.

States are immutable values.  A model system bundles the functions that give
them physical meaning (energy, a ground-truth entropy oracle, a process
engine that plays nature).  The accessibility relation is either an explicit
finite pair set or induced from a model's oracle: within one space or between
compatible composites, X precedes Y exactly when the oracle entropy of X does
not exceed that of Y.  Construction code elsewhere in the package is required
to interact with models only through relation queries and engine calls, never
by reading the oracle directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Hashable, Iterable, Optional, Sequence, Union

from .errors import CapabilityError, DomainError

# Absolute per-coordinate tolerance for deciding that two states are the same
# point; bisection and closed-form solvers produce near-equal states.
COORD_ATOL = 1e-12


class StateKind(str, Enum):
    EQUILIBRIUM = "equilibrium"
    STABLE_EQUILIBRIUM = "stable_equilibrium"
    NONEQUILIBRIUM = "nonequilibrium"


@dataclass(frozen=True)
class StateSpace:
    """A state space, possibly a scaled copy of a parent space.

    ``scale`` is the absolute scale factor relative to the unscaled base
    space; every extensive quantity of a state in this space is ``scale``
    times the value of the corresponding base state.
    """

    id: str
    coord_names: tuple[str, ...]
    composition_tag: str
    scale: float = 1.0
    parent_id: Optional[str] = None

    def __post_init__(self):
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise DomainError(f"state space scale must be positive, got {self.scale!r}")


@dataclass(frozen=True)
class State:
    """A point in a state space.

    ``region`` is an opaque, equality-comparable descriptor of the regions of
    space occupied by the constituents; "no net change of the regions" is
    modelled as descriptor equality.  Separability and non-correlation are
    declared flags, not computed properties.
    """

    space_id: str
    coords: tuple[float, ...]
    energy: float
    region: Hashable
    separable: bool = True
    uncorrelated: bool = True
    kind: StateKind = StateKind.STABLE_EQUILIBRIUM

    def __post_init__(self):
        if not math.isfinite(self.energy):
            raise DomainError(f"state energy must be finite, got {self.energy!r}")
        if self.kind is StateKind.STABLE_EQUILIBRIUM and not (
            self.separable and self.uncorrelated
        ):
            raise DomainError(
                "a stable equilibrium state must be separable and uncorrelated"
            )


@dataclass(frozen=True)
class CompositeState:
    """An ordered tuple of subsystem states treated as one state."""

    parts: tuple[State, ...]

    def __post_init__(self):
        if not self.parts:
            raise DomainError("composite state needs at least one part")

    @property
    def energy(self) -> float:
        if not all(p.separable for p in self.parts):
            raise DomainError("composite energy undefined: a part is not separable")
        return sum(p.energy for p in self.parts)

    @property
    def separable(self) -> bool:
        return all(p.separable for p in self.parts)

    @property
    def uncorrelated(self) -> bool:
        return all(p.uncorrelated for p in self.parts)


StateLike = Union[State, CompositeState]


@dataclass(frozen=True)
class CompositeSpace:
    """The product of several state spaces; its states are CompositeStates."""

    parts: tuple[StateSpace, ...]

    @property
    def id(self) -> str:
        return "(" + ",".join(p.id for p in self.parts) + ")"


def states_equal(a: StateLike, b: StateLike, atol: float = COORD_ATOL) -> bool:
    """Coordinate-wise identity of two states within an absolute tolerance."""
    pa, pb = parts_of(a), parts_of(b)
    if len(pa) != len(pb):
        return False
    for x, y in zip(pa, pb):
        if x.space_id != y.space_id or x.region != y.region:
            return False
        if len(x.coords) != len(y.coords):
            return False
        if any(abs(u - v) > atol for u, v in zip(x.coords, y.coords)):
            return False
    return True


def parts_of(state: StateLike) -> tuple[State, ...]:
    """Flatten a state into its tuple of atomic parts."""
    if isinstance(state, CompositeState):
        return state.parts
    return (state,)


def composite_state(parts: Sequence[StateLike]) -> CompositeState:
    """Build a composite state, flattening nested composites."""
    flat: list[State] = []
    for p in parts:
        flat.extend(parts_of(p))
    return CompositeState(tuple(flat))


def compose(spaces: Sequence[Union[StateSpace, CompositeSpace]]) -> CompositeSpace:
    """Product of state spaces; nested composites are flattened."""
    if not spaces:
        raise DomainError("compose needs a non-empty list of spaces")
    flat: list[StateSpace] = []
    for s in spaces:
        if isinstance(s, CompositeSpace):
            flat.extend(s.parts)
        else:
            flat.append(s)
    return CompositeSpace(tuple(flat))


@dataclass(frozen=True)
class ProcessRecord:
    """An executed process: end states, work, and its entropy bookkeeping.

    ``work_done`` is the work done *by* the system (raised-weight convention).
    ``sigma`` is the entropy generated; it is exactly zero iff the process is
    reversible.
    """

    kind: str  # "weight" | "weight_polygonal" | "standard_weight"
    initial: StateLike
    final: StateLike
    work_done: float
    reservoir_delta: Optional[float] = None
    reversible: bool = True
    sigma: float = 0.0

    def __post_init__(self):
        if (self.sigma == 0.0) != self.reversible:
            raise DomainError("reversible flag must agree with sigma == 0")
        if self.sigma < 0.0:
            raise DomainError("entropy generation cannot be negative")


class ModelSystem:
    """A concrete physical model: spaces, energy, oracle entropy, and an engine.

    The oracle entropy is ground truth used by the engine ("nature") and by
    verification code; entropy-construction algorithms must not call it.
    ``entropy_atol`` is the absolute tolerance the induced relation uses to
    decide equivalence of near-equal oracle values.
    """

    def __init__(
        self,
        id: str,
        spaces: dict[str, StateSpace],
        energy_fn: Callable[[State], float],
        oracle_entropy: Callable[[State], float],
        process_engine,
        is_normal: bool = True,
        energy_bounds: Optional[tuple[float, float]] = None,
        supports_scaling: bool = False,
        scale_state_fn: Optional[Callable[["ModelSystem", State, float], State]] = None,
        entropy_atol: float = 0.0,
        isentropic_partner: Optional[Callable[[State, object], Optional[State]]] = None,
        composite_policy: str = "sum",
        strict_single_space: bool = False,
    ):
        if not is_normal:
            if energy_bounds is None or not math.isfinite(energy_bounds[1]):
                raise DomainError(
                    "a non-normal model must declare a finite upper energy bound"
                )
        self.id = id
        self.spaces = dict(spaces)
        self.energy_fn = energy_fn
        self.oracle_entropy = oracle_entropy
        self.process_engine = process_engine
        self.is_normal = is_normal
        self.energy_bounds = energy_bounds
        self.supports_scaling = supports_scaling
        self._scale_state_fn = scale_state_fn
        self.entropy_atol = entropy_atol
        self.isentropic_partner = isentropic_partner
        # Relation-behaviour hooks; altered only by fault injection.
        self.composite_policy = composite_policy
        self.strict_single_space = strict_single_space
        self.mutation = None
        self.expected_failures: frozenset[str] = frozenset()
        if process_engine is not None:
            process_engine.bind(self)

    def owns_space(self, space_id: str) -> bool:
        return space_id in self.spaces

    def register_space(self, space: StateSpace) -> StateSpace:
        # Idempotent: scaled copies are created on demand and cached.
        existing = self.spaces.get(space.id)
        if existing is not None:
            return existing
        self.spaces[space.id] = space
        return space

    def scale_state(self, state: State, t: float) -> State:
        if not self.supports_scaling or self._scale_state_fn is None:
            raise CapabilityError(f"model {self.id!r} does not support scaled copies")
        if not (t > 0 and math.isfinite(t)):
            raise DomainError(f"scale factor must be positive, got {t!r}")
        if t == 1.0:
            return state
        return self._scale_state_fn(self, state, t)

    def relation(self, **kwargs) -> "AccessibilityRelation":
        return AccessibilityRelation.induced([self], **kwargs)


def scale(model: ModelSystem, space: StateSpace, t: float) -> StateSpace:
    """The t-scaled copy of a space: every extensive quantity multiplied by t.

    Raises CapabilityError for models that cannot form scaled copies (field
    systems, few-particle systems).
    """
    if not (t > 0 and math.isfinite(t)):
        raise DomainError(f"scale factor must be positive, got {t!r}")
    if not model.supports_scaling:
        raise CapabilityError(f"model {model.id!r} does not support scaled copies")
    if space.id not in model.spaces:
        raise DomainError(f"space {space.id!r} is not owned by model {model.id!r}")
    if t == 1.0:
        return space
    new_scale = t * space.scale
    base_id = space.parent_id or space.id
    scaled = StateSpace(
        id=f"{base_id}*{new_scale:.17g}",
        coord_names=space.coord_names,
        composition_tag=space.composition_tag,
        scale=new_scale,
        parent_id=base_id,
    )
    return model.register_space(scaled)


class Access(str, Enum):
    FORWARD = "forward"
    BACKWARD_ONLY = "backward_only"
    BOTH = "both"
    INCOMPARABLE = "incomparable"


class AccessibilityRelation:
    """The adiabatic-accessibility preorder, finite or model-induced.

    Finite mode stores an explicit pair set over hashable element ids; its
    reflexivity and transitivity are checked, never assumed.  Induced mode
    answers queries by comparing oracle entropies of compatible states, with
    an absolute equivalence tolerance taken from the owning model.
    """

    def __init__(self, mode, *, elements=None, pairs=None, models=None,
                 composite_policy=None, strict_single_space=None,
                 sampler=None):
        self.mode = mode
        if mode == "finite":
            self.elements = list(elements)
            self._element_set = set(self.elements)
            self.pairs = set(tuple(p) for p in pairs)
            self.models = []
        elif mode == "induced":
            self.models = list(models)
            if not self.models:
                raise DomainError("induced relation needs at least one model")
            self.composite_policy = (
                composite_policy
                if composite_policy is not None
                else self.models[0].composite_policy
            )
            self.strict_single_space = (
                strict_single_space
                if strict_single_space is not None
                else self.models[0].strict_single_space
            )
            self._sampler = sampler
        else:
            raise DomainError(f"unknown relation mode {mode!r}")

    # -- constructors -------------------------------------------------

    @classmethod
    def finite(cls, elements: Iterable[Hashable], pairs: Iterable[tuple]) -> "AccessibilityRelation":
        return cls("finite", elements=elements, pairs=pairs)

    @classmethod
    def induced(cls, models: Sequence[ModelSystem], **kwargs) -> "AccessibilityRelation":
        return cls("induced", models=models, **kwargs)

    # -- induced-mode internals ----------------------------------------

    def _model_for(self, space_id: str) -> ModelSystem:
        for m in self.models:
            if m.owns_space(space_id):
                return m
        raise DomainError(f"no model in this relation owns space {space_id!r}")

    def _space(self, space_id: str) -> StateSpace:
        return self._model_for(space_id).spaces[space_id]

    def _entropy(self, state: StateLike) -> float:
        """Oracle entropy as the relation sees it (sum over composite parts).

        Internal: nature's side of the fence.  Construction code must go
        through leq()/accessible() instead.
        """
        parts = parts_of(state)
        values = [self._model_for(p.space_id).oracle_entropy(p) for p in parts]
        if len(values) == 1:
            return values[0]
        if self.composite_policy == "sum":
            return sum(values)
        if self.composite_policy == "max":
            return max(values)
        raise DomainError(f"unknown composite policy {self.composite_policy!r}")

    def _atol(self, state: StateLike) -> float:
        return max(
            self._model_for(p.space_id).entropy_atol for p in parts_of(state)
        )

    def _composition_totals(self, state: StateLike) -> dict[str, float]:
        totals: dict[str, float] = {}
        for p in parts_of(state):
            sp = self._space(p.space_id)
            totals[sp.composition_tag] = totals.get(sp.composition_tag, 0.0) + sp.scale
        return totals

    def compatible(self, x: StateLike, y: StateLike) -> bool:
        """Whether x and y live in comparable (possibly composite) spaces."""
        if self.mode == "finite":
            return True
        tx, ty = self._composition_totals(x), self._composition_totals(y)
        if set(tx) != set(ty):
            return False
        return all(math.isclose(tx[k], ty[k], rel_tol=1e-12) for k in tx)

    # -- queries --------------------------------------------------------

    def contains(self, x) -> bool:
        if self.mode == "finite":
            return x in self._element_set
        try:
            for p in parts_of(x):
                self._model_for(p.space_id)
            return True
        except DomainError:
            return False

    def leq(self, x, y) -> bool:
        """X precedes Y: Y is adiabatically accessible from X."""
        if self.mode == "finite":
            if x not in self._element_set:
                raise DomainError(f"unknown element {x!r}")
            if y not in self._element_set:
                raise DomainError(f"unknown element {y!r}")
            return (x, y) in self.pairs
        if not self.compatible(x, y):
            return False
        sx, sy = self._entropy(x), self._entropy(y)
        atol = max(self._atol(x), self._atol(y))
        single = isinstance(x, State) and isinstance(y, State)
        if self.strict_single_space and single:
            # Fault-injection hook: order by strict inequality only, keeping
            # the diagonal so identity remains related to itself.
            return states_equal(x, y) or sx < sy - atol
        return sx <= sy + atol

    def equivalent(self, x, y) -> bool:
        return self.leq(x, y) and self.leq(y, x)

    def sample(self, rng, n: int) -> list:
        """Draw n universe elements (finite: with replacement from the list)."""
        if self.mode == "finite":
            if not self.elements:
                return []
            return [self.elements[rng.randrange(len(self.elements))] for _ in range(n)]
        if self._sampler is not None:
            return [self._sampler(rng) for _ in range(n)]
        engine = self.models[0].process_engine
        return [engine.sample_state(rng) for _ in range(n)]

    def universe_size(self) -> Optional[int]:
        return len(self.elements) if self.mode == "finite" else None


def accessible(rel: AccessibilityRelation, x, y) -> Access:
    """Tri-state accessibility classification of an ordered state pair."""
    fwd = rel.leq(x, y)
    bwd = rel.leq(y, x)
    if fwd and bwd:
        return Access.BOTH
    if fwd:
        return Access.FORWARD
    if bwd:
        return Access.BACKWARD_ONLY
    return Access.INCOMPARABLE


def composite_relation(
    rels: Sequence[AccessibilityRelation], **kwargs
) -> AccessibilityRelation:
    """Relation over composites whose parts come from the given relations."""
    models: list[ModelSystem] = []
    policy = None
    strict = None
    for r in rels:
        if r.mode != "induced":
            raise CapabilityError("composite relations require induced mode")
        for m in r.models:
            if m not in models:
                models.append(m)
        policy = r.composite_policy if policy is None else policy
        strict = r.strict_single_space if strict is None else strict
    kwargs.setdefault("composite_policy", policy)
    kwargs.setdefault("strict_single_space", strict)
    return AccessibilityRelation.induced(models, **kwargs)
