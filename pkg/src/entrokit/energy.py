"""Energy from weight polygonals: signed work sums, energy assignment from a
reference state, and path-independence / additivity verification."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .axioms import CheckResult, CheckStatus
from .core import (
    CompositeState,
    ModelSystem,
    ProcessRecord,
    StateLike,
    composite_state,
    states_equal,
)
from .errors import DomainError, EngineError, StructuralError

ALONG = "along"
AGAINST = "against"

PATH_INDEP_REL_TOL = 1e-10
PATH_INDEP_ABS_FLOOR = 1e-12
ENERGY_ADD_TOL = 1e-12


@dataclass(frozen=True)
class WeightPolygonal:
    """A chain of weight processes, each traversed along or against its own
    direction, connecting two end states through shared intermediates."""

    legs: tuple[tuple[ProcessRecord, str], ...]
    endpoints: tuple[StateLike, StateLike]

    def __post_init__(self):
        if not self.legs:
            raise StructuralError("a weight polygonal needs at least one leg")
        for rec, direction in self.legs:
            if rec.kind != "weight":
                raise StructuralError("polygonal legs must be weight processes")
            if direction not in (ALONG, AGAINST):
                raise StructuralError(f"unknown leg direction {direction!r}")
            for s in (rec.initial, rec.final):
                if not all(p.separable for p in _atoms(s)):
                    raise StructuralError("polygonal end states must be separable")
        chain = self.chain_points()
        if not states_equal(chain[0], self.endpoints[0]) or not states_equal(
            chain[-1], self.endpoints[1]
        ):
            raise StructuralError("polygonal endpoints do not match its chain")

    def chain_points(self) -> list[StateLike]:
        """The traversed state sequence; raises if consecutive legs disagree."""
        points = []
        for rec, direction in self.legs:
            start, end = (
                (rec.initial, rec.final) if direction == ALONG else (rec.final, rec.initial)
            )
            if not points:
                points.append(start)
            elif not states_equal(points[-1], start):
                raise StructuralError("broken chain: consecutive legs do not share a state")
            points.append(end)
        return points

    def reversed(self) -> "WeightPolygonal":
        flipped = tuple(
            (rec, AGAINST if direction == ALONG else ALONG)
            for rec, direction in reversed(self.legs)
        )
        return WeightPolygonal(flipped, (self.endpoints[1], self.endpoints[0]))


def _atoms(state: StateLike):
    if isinstance(state, CompositeState):
        return state.parts
    return (state,)


def polygonal_work(p: WeightPolygonal) -> float:
    """Signed work done by the system in traversing the polygonal: along-leg
    works count positive, against-leg works negative."""
    p.chain_points()  # validates the chain
    total = 0.0
    for rec, direction in p.legs:
        total += rec.work_done if direction == ALONG else -rec.work_done
    return total


def energy_of(
    model: ModelSystem,
    target: StateLike,
    ref: StateLike,
    e0: float,
    p: WeightPolygonal,
) -> float:
    """Energy assigned to ``target`` from reference energy ``e0``: the work
    received in any polygonal from the reference, i.e. e0 minus the work done."""
    if not states_equal(p.endpoints[0], ref) or not states_equal(p.endpoints[1], target):
        raise DomainError("polygonal endpoints do not match (ref, target)")
    for s in (ref, target):
        if not all(part.separable for part in _atoms(s)):
            raise DomainError("energy is defined only for separable states")
    return e0 - polygonal_work(p)


def trivial_polygonal(state: StateLike) -> WeightPolygonal:
    """The zero-leg stand-in: a single identity weight process with no work."""
    rec = ProcessRecord("weight", state, state, 0.0, reversible=True, sigma=0.0)
    return WeightPolygonal(((rec, ALONG),), (state, state))


def check_path_independence(
    model: ModelSystem,
    pairs: Sequence[tuple[StateLike, StateLike]],
    k: int,
    *,
    seed=0,
    rel_tol: float = PATH_INDEP_REL_TOL,
    abs_floor: float = PATH_INDEP_ABS_FLOOR,
) -> CheckResult:
    """Works of k engine-generated polygonals per pair agree within tolerance.

    Pairs the engine cannot connect are reported, not raised: they witness
    the limits of interconnectability rather than a defect.
    """
    if k < 2:
        raise DomainError(f"need at least two polygonals per pair, got k={k}")
    rng = random.Random(seed)
    witnesses = []
    skipped = []
    worst = 0.0
    for a, b in pairs:
        works = []
        try:
            for i in range(k):
                poly = model.process_engine.connect_polygonal(
                    a, b, rng, legs=1 + i % 4
                )
                works.append(polygonal_work(poly))
        except EngineError as exc:
            skipped.append((a, b, str(exc)))
            continue
        spread = max(works) - min(works)
        tol = max(rel_tol * max(abs(w) for w in works), abs_floor)
        worst = max(worst, spread)
        if spread > tol:
            witnesses.append((a, b, works))
    message = ""
    if skipped:
        message = f"{len(skipped)} pair(s) not connectable by the engine"
    if witnesses:
        return CheckResult(
            "path_independence", CheckStatus.FAIL, witnesses,
            samples_used=len(pairs) * k, tolerance_used=rel_tol, message=message,
        )
    if skipped and not witnesses and len(skipped) == len(pairs):
        return CheckResult(
            "path_independence", CheckStatus.NOT_APPLICABLE, [],
            samples_used=0, message=message,
        )
    return CheckResult(
        "path_independence", CheckStatus.PASS, [],
        samples_used=len(pairs) * k, tolerance_used=rel_tol,
        message=message or f"max spread {worst:.3e} J",
    )


def check_energy_additivity(
    a_pair: tuple[StateLike, StateLike],
    b_pair: tuple[StateLike, StateLike],
    *,
    tol: float = ENERGY_ADD_TOL,
) -> float:
    """Residual of composite-vs-parts energy differences, evaluated exactly
    over the stored values.

    Exact rational arithmetic keeps summation-order rounding out of the
    verdict: the residual is zero precisely when the composite energy is the
    sum of the part energies, which is the structural claim being guarded.
    """
    a1, a2 = a_pair
    b1, b2 = b_pair
    for s in (a1, a2, b1, b2):
        if not all(p.separable for p in _atoms(s)):
            raise DomainError("energy additivity requires separable states")
    comp1 = composite_state([a1, b1])
    comp2 = composite_state([a2, b2])

    def exact_sum(state: StateLike) -> Fraction:
        return sum((Fraction(p.energy) for p in _atoms(state)), Fraction(0))

    residual = (
        (exact_sum(comp2) - exact_sum(comp1))
        - (exact_sum(a2) - exact_sum(a1))
        - (exact_sum(b2) - exact_sum(b1))
    )
    return float(abs(residual))


def _energy(state: StateLike) -> float:
    return state.energy
