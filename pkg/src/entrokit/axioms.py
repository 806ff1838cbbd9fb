"""Order-axiom checks for accessibility relations.

Finite relations are scanned exhaustively (with a cube-cost cap for
transitivity); induced relations are checked by seeded sampling.  Every
failure carries witnesses that replay as violations when re-queried.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, fields, is_dataclass
from enum import Enum
from typing import Optional, Sequence

from .core import (
    Access,
    AccessibilityRelation,
    CompositeState,
    State,
    accessible,
    composite_relation,
    composite_state,
)
from .errors import DomainError

DEFAULT_SAMPLES = 200
TRANSITIVITY_CAP = 200
STABILITY_EPS = tuple(0.5 ** k for k in range(1, 21))


class CheckStatus(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    NOT_APPLICABLE = "not_applicable"


@dataclass
class CheckResult:
    check_name: str
    status: CheckStatus
    witnesses: list = field(default_factory=list)
    samples_used: int = 0
    tolerance_used: Optional[float] = None
    message: str = ""

    def __post_init__(self):
        if self.status is CheckStatus.FAIL and not self.witnesses:
            raise DomainError("a failing check must provide witnesses")

    @property
    def passed(self) -> bool:
        return self.status is CheckStatus.PASS

    @property
    def failed(self) -> bool:
        return self.status is CheckStatus.FAIL

    def to_dict(self) -> dict:
        return {
            "check": self.check_name,
            "status": self.status.value,
            "witnesses": [describe(w) for w in self.witnesses],
            "samples_used": self.samples_used,
            "tolerance_used": self.tolerance_used,
            "message": self.message,
        }


def describe(obj):
    """JSON-friendly rendering of witnesses (states, records, tuples)."""
    if isinstance(obj, State):
        return {
            "space": obj.space_id,
            "coords": list(obj.coords),
            "energy": obj.energy,
            "kind": obj.kind.value,
        }
    if isinstance(obj, CompositeState):
        return {"parts": [describe(p) for p in obj.parts]}
    if isinstance(obj, (tuple, list)):
        return [describe(o) for o in obj]
    if isinstance(obj, dict):
        return {k: describe(v) for k, v in obj.items()}
    if isinstance(obj, Enum):
        return obj.value
    if is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: describe(getattr(obj, f.name)) for f in fields(obj)}
    if obj is None or isinstance(obj, (bool, int, float, str)):
        return obj
    return repr(obj)


def _rng(seed_or_rng) -> random.Random:
    if isinstance(seed_or_rng, random.Random):
        return seed_or_rng
    return random.Random(seed_or_rng)


def _universe(rel: AccessibilityRelation, samples: int, rng) -> list:
    if rel.mode == "finite":
        return list(rel.elements)
    return rel.sample(rng, samples)


# ---------------------------------------------------------------------------
# A1 reflexivity
# ---------------------------------------------------------------------------

def check_reflexivity(rel, *, samples: int = DEFAULT_SAMPLES, seed=0) -> CheckResult:
    rng = _rng(seed)
    states = _universe(rel, samples, rng)
    bad = [x for x in states if not rel.equivalent(x, x)]
    if bad:
        return CheckResult("reflexivity", CheckStatus.FAIL, bad, len(states))
    return CheckResult("reflexivity", CheckStatus.PASS, [], len(states))


# ---------------------------------------------------------------------------
# A2 transitivity
# ---------------------------------------------------------------------------

def check_transitivity(
    rel, *, samples: int = 500, cap: int = TRANSITIVITY_CAP, seed=0
) -> CheckResult:
    rng = _rng(seed)
    if rel.mode == "finite":
        n = rel.universe_size()
        if n > cap:
            return CheckResult(
                "transitivity",
                CheckStatus.NOT_APPLICABLE,
                [],
                0,
                message=f"universe size {n} exceeds exhaustive-scan cap {cap}",
            )
        elems = rel.elements
        for x in elems:
            for y in elems:
                if not rel.leq(x, y):
                    continue
                for z in elems:
                    if rel.leq(y, z) and not rel.leq(x, z):
                        return CheckResult(
                            "transitivity", CheckStatus.FAIL, [(x, y, z)], n ** 3
                        )
        return CheckResult("transitivity", CheckStatus.PASS, [], n ** 3)

    count = 0
    for _ in range(samples):
        x, y, z = rel.sample(rng, 3)
        count += 1
        if rel.leq(x, y) and rel.leq(y, z) and not rel.leq(x, z):
            return CheckResult("transitivity", CheckStatus.FAIL, [(x, y, z)], count)
    return CheckResult("transitivity", CheckStatus.PASS, [], count)


# ---------------------------------------------------------------------------
# A3 consistency under composition
# ---------------------------------------------------------------------------

def _sample_ordered_pair(rel, rng, strict=False, tries=200):
    """A pair (x, y) with x related to y; strict pairs exclude the converse."""
    for _ in range(tries):
        x, y = rel.sample(rng, 2)
        if not rel.leq(x, y):
            x, y = y, x
        if not rel.leq(x, y):
            continue
        if strict and rel.leq(y, x):
            continue
        return x, y
    raise DomainError("could not sample an ordered pair of states")


def check_consistency(
    rel_a, rel_b, rel_comp=None, *, samples: int = DEFAULT_SAMPLES, seed=0
) -> CheckResult:
    """Composition preserves the order, including the strict part.

    Two clauses: related pairs compose to a related composite pair, and
    adjoining a common state preserves strict precedence.  The second clause
    is what exposes composites that merge their parts instead of adding them.
    """
    rng = _rng(seed)
    if rel_comp is None:
        rel_comp = composite_relation([rel_a, rel_b])
    witnesses = []
    used = 0
    for _ in range(samples):
        x, y = _sample_ordered_pair(rel_a, rng)
        xp, yp = _sample_ordered_pair(rel_b, rng)
        used += 1
        if not rel_comp.leq(composite_state([x, xp]), composite_state([y, yp])):
            witnesses.append((x, xp, y, yp))
            break
    if not witnesses:
        for _ in range(samples // 2):
            x, y = _sample_ordered_pair(rel_a, rng, strict=True)
            z = rel_b.sample(rng, 1)[0]
            used += 1
            cx, cy = composite_state([x, z]), composite_state([y, z])
            if accessible(rel_comp, cx, cy) is not Access.FORWARD:
                witnesses.append((x, z, y, z))
                break
    if witnesses:
        return CheckResult("consistency", CheckStatus.FAIL, witnesses, used)
    return CheckResult("consistency", CheckStatus.PASS, [], used)


# ---------------------------------------------------------------------------
# A4 scaling invariance
# ---------------------------------------------------------------------------

def check_scaling_invariance(
    rel, t_samples: Sequence[float] = (0.5, 2.0, 3.0), *,
    samples: int = 100, seed=0,
) -> CheckResult:
    rng = _rng(seed)
    if rel.mode == "finite":
        return CheckResult(
            "scaling_invariance", CheckStatus.NOT_APPLICABLE, [],
            message="finite fixture declares no scaling support",
        )
    model = rel.models[0]
    if not model.supports_scaling:
        return CheckResult(
            "scaling_invariance", CheckStatus.NOT_APPLICABLE, [],
            message=f"model {model.id!r} cannot form scaled copies",
        )
    used = 0
    for t in t_samples:
        if t <= 0:
            raise DomainError(f"scale factor must be positive, got {t!r}")
        for _ in range(samples):
            x, y = _sample_ordered_pair(rel, rng)
            used += 1
            tx, ty = model.scale_state(x, t), model.scale_state(y, t)
            if not rel.leq(tx, ty):
                return CheckResult(
                    "scaling_invariance", CheckStatus.FAIL, [(x, y, t)], used
                )
    return CheckResult("scaling_invariance", CheckStatus.PASS, [], used)


# ---------------------------------------------------------------------------
# A5 splitting and recombination
# ---------------------------------------------------------------------------

def check_splitting(
    rel, t: float = 0.5, *, samples: int = 100, seed=0
) -> CheckResult:
    if not (0.0 < t < 1.0):
        raise DomainError(f"splitting fraction must lie strictly in (0, 1), got {t!r}")
    rng = _rng(seed)
    if rel.mode == "finite" or not rel.models[0].supports_scaling:
        return CheckResult(
            "splitting", CheckStatus.NOT_APPLICABLE, [],
            message="scaling unsupported",
        )
    model = rel.models[0]
    for i in range(samples):
        x = rel.sample(rng, 1)[0]
        split = composite_state([model.scale_state(x, t), model.scale_state(x, 1.0 - t)])
        if not (rel.leq(x, split) and rel.leq(split, x)):
            return CheckResult("splitting", CheckStatus.FAIL, [(x, t)], i + 1,
                               tolerance_used=t)
    return CheckResult("splitting", CheckStatus.PASS, [], samples, tolerance_used=t)


# ---------------------------------------------------------------------------
# A6 stability
# ---------------------------------------------------------------------------

def check_stability(
    rel, eps_sequence: Sequence[float] = STABILITY_EPS, *,
    samples: int = 100, seed=0, boundary_cases: bool = True,
) -> CheckResult:
    """Perturbations by vanishing scaled copies cannot flip accessibility.

    Checks the finite approximation: whenever the perturbed comparison holds
    for every epsilon in the (decreasing) test sequence, the unperturbed one
    must hold.  Crafted equal-entropy pairs probe the equality boundary,
    where relations comparing by strict inequality alone break.
    """
    if list(eps_sequence) != sorted(eps_sequence, reverse=True) or eps_sequence[-1] <= 0:
        raise DomainError("eps sequence must be decreasing and positive")
    rng = _rng(seed)
    if rel.mode == "finite" or not rel.models[0].supports_scaling:
        return CheckResult(
            "stability", CheckStatus.NOT_APPLICABLE, [],
            message="scaling unsupported",
        )
    model = rel.models[0]
    min_eps = eps_sequence[-1]

    def premise_holds(x, y, z0, z1) -> bool:
        for eps in eps_sequence:
            lhs = composite_state([x, model.scale_state(z0, eps)])
            rhs = composite_state([y, model.scale_state(z1, eps)])
            if not rel.leq(lhs, rhs):
                return False
        return True

    used = 0
    tuples = []
    for _ in range(samples):
        x, y, z0, z1 = rel.sample(rng, 4)
        tuples.append((x, y, z0, z1))
    if boundary_cases and model.isentropic_partner is not None:
        for _ in range(10):
            x = rel.sample(rng, 1)[0]
            y = model.isentropic_partner(x, rng)
            if y is None:
                continue
            z0, z1 = _sample_ordered_pair(rel, rng, strict=True)
            tuples.append((x, y, z0, z1))

    for x, y, z0, z1 in tuples:
        used += 1
        if premise_holds(x, y, z0, z1) and not rel.leq(x, y):
            return CheckResult(
                "stability", CheckStatus.FAIL, [(x, y, z0, z1)], used,
                tolerance_used=min_eps,
            )
    return CheckResult("stability", CheckStatus.PASS, [], used, tolerance_used=min_eps)


# ---------------------------------------------------------------------------
# Comparison hypothesis
# ---------------------------------------------------------------------------

def check_comparison(rel, *, samples: int = DEFAULT_SAMPLES, seed=0) -> CheckResult:
    rng = _rng(seed)
    if rel.mode == "finite":
        elems = rel.elements
        used = 0
        for i, x in enumerate(elems):
            for y in elems[i:]:
                used += 1
                if accessible(rel, x, y) is Access.INCOMPARABLE:
                    return CheckResult("comparison", CheckStatus.FAIL, [(x, y)], used)
        return CheckResult("comparison", CheckStatus.PASS, [], used)
    for i in range(samples):
        x, y = rel.sample(rng, 2)
        if not rel.compatible(x, y):
            continue
        if accessible(rel, x, y) is Access.INCOMPARABLE:
            return CheckResult("comparison", CheckStatus.FAIL, [(x, y)], i + 1)
    return CheckResult("comparison", CheckStatus.PASS, [], samples)


# ---------------------------------------------------------------------------
# N1/N2: nonequilibrium extension
# ---------------------------------------------------------------------------

def check_n1_n2(
    rel, equilibrium_states: Sequence, nonequilibrium_states: Sequence = (), *,
    samples: int = DEFAULT_SAMPLES, seed=0,
) -> CheckResult:
    """The relation behaves on the extended set and sandwiches every
    nonequilibrium state between equilibrium ones.

    The first clause re-checks reflexivity, transitivity, plain consistency,
    and premise-sampled stability on the union; the second looks for the
    two-sided equilibrium bracket of each nonequilibrium state.
    """
    rng = _rng(seed)
    gamma = list(equilibrium_states)
    if not gamma:
        return CheckResult(
            "n1_n2", CheckStatus.NOT_APPLICABLE, [],
            message="no equilibrium subset declared",
        )
    hat = gamma + list(nonequilibrium_states)
    used = 0
    witnesses = []

    def pick(seq):
        return seq[rng.randrange(len(seq))]

    # N1(a): reflexivity and transitivity on the union.
    for x in hat:
        used += 1
        if not rel.equivalent(x, x):
            witnesses.append(("reflexivity", x))
    for _ in range(samples):
        x, y, z = pick(hat), pick(hat), pick(hat)
        used += 1
        if rel.leq(x, y) and rel.leq(y, z) and not rel.leq(x, z):
            witnesses.append(("transitivity", (x, y, z)))
            break

    # N1(b): composition keeps the order (plain clause).
    if rel.mode == "induced":
        for _ in range(samples // 2):
            x, y = pick(hat), pick(hat)
            if not rel.leq(x, y):
                x, y = y, x
            xp, yp = pick(hat), pick(hat)
            if not rel.leq(xp, yp):
                xp, yp = yp, xp
            used += 1
            if not rel.leq(composite_state([x, xp]), composite_state([y, yp])):
                witnesses.append(("consistency", (x, xp, y, yp)))
                break

    # N1(c): stability, premise-sampled only.
    if rel.mode == "induced" and rel.models[0].supports_scaling:
        model = rel.models[0]
        for _ in range(samples // 4):
            x, y, z0, z1 = pick(hat), pick(hat), pick(gamma), pick(gamma)
            used += 1
            ok = True
            for eps in STABILITY_EPS:
                lhs = composite_state([x, model.scale_state(z0, eps)])
                rhs = composite_state([y, model.scale_state(z1, eps)])
                if not rel.leq(lhs, rhs):
                    ok = False
                    break
            if ok and not rel.leq(x, y):
                witnesses.append(("stability", (x, y, z0, z1)))
                break

    # N2: equilibrium sandwich for each nonequilibrium state.
    for x in nonequilibrium_states:
        used += 1
        below = any(rel.leq(g, x) for g in gamma)
        above = any(rel.leq(x, g) for g in gamma)
        if not (below and above):
            witnesses.append(("sandwich", x))

    if witnesses:
        return CheckResult("n1_n2", CheckStatus.FAIL, witnesses, used)
    return CheckResult("n1_n2", CheckStatus.PASS, [], used)


def is_total_preorder(rel, *, samples: int = DEFAULT_SAMPLES, seed=0) -> bool:
    """Combined scan: reflexive, transitive, and totally comparable."""
    return (
        check_reflexivity(rel, samples=samples, seed=seed).passed
        and check_transitivity(rel, samples=samples, seed=seed).passed
        and check_comparison(rel, samples=samples, seed=seed).passed
    )
