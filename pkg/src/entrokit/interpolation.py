"""Entropy from accessibility alone, by interpolation between two reference
states.

Given references X0 strictly below X1, the unique fraction lam with
X equivalent to the pair ((1-lam)X0, lam X1) is located by bisection using
nothing but accessibility queries; the entropy of X is then the lam-weighted
mix of the reference values.  Tables built this way on different spaces are
stitched together by an affine calibration that enforces additivity and
extensivity, and certified against ground truth up to the affine gauge any
valid entropy carries.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .core import (
    AccessibilityRelation,
    State,
    StateLike,
    composite_state,
)
from .errors import (
    CapabilityError,
    DegenerateFitError,
    DomainError,
    NumericError,
    RankDeficiencyError,
)

LAMBDA_TOL = 1e-9
LAMBDA_MAX_ITER = 200


@dataclass(frozen=True)
class ReferencePair:
    """Two strictly ordered reference states with assigned entropy values."""

    x0: State
    x1: State
    s0: float
    s1: float

    def __post_init__(self):
        if not self.s0 < self.s1:
            raise DomainError("reference entropies must satisfy s0 < s1")


@dataclass
class EntropyTable:
    """Constructed entropy values on a set of states, plus the affine
    calibration (a > 0, b) that places the table on a common gauge."""

    space_id: str
    entries: dict[State, float] = field(default_factory=dict)
    calibration: tuple[float, float] = (1.0, 0.0)
    skipped: dict[State, str] = field(default_factory=dict)

    def __post_init__(self):
        if not self.calibration[0] > 0:
            raise DomainError("calibration slope must be positive")

    def raw(self, state: State) -> float:
        return self.entries[state]

    def value(self, state: State) -> float:
        a, b = self.calibration
        return a * self.entries[state] + b

    def values(self, states: Optional[Sequence[State]] = None) -> list[float]:
        keys = list(self.entries) if states is None else list(states)
        return [self.value(s) for s in keys]

    def with_calibration(self, a: float, b: float) -> "EntropyTable":
        return EntropyTable(self.space_id, dict(self.entries), (a, b), dict(self.skipped))


def _require_induced_scaling(rel: AccessibilityRelation):
    if rel.mode != "induced":
        raise CapabilityError("interpolation needs an induced, scalable relation")
    model = rel.models[0]
    if not model.supports_scaling:
        raise CapabilityError(f"model {model.id!r} cannot form scaled copies")
    return model


def find_lambda(
    rel: AccessibilityRelation,
    x: State,
    refs: ReferencePair,
    tol: float = LAMBDA_TOL,
    max_iter: int = LAMBDA_MAX_ITER,
) -> float:
    """Bisect for the fraction lam with x ~ ((1-lam) x0, lam x1).

    Only accessibility queries are used.  Ties inside the bracket resolve
    toward equivalence so the search terminates even when the interpolant
    lands exactly on x.
    """
    model = _require_induced_scaling(rel)
    x0, x1 = refs.x0, refs.x1
    if not (rel.leq(x0, x1) and not rel.leq(x1, x0)):
        raise DomainError("reference states must be strictly ordered")
    if not rel.leq(x0, x):
        raise DomainError("state lies below the lower reference")
    if not rel.leq(x, x1):
        raise DomainError("state lies above the upper reference")
    if rel.equivalent(x, x0):
        return 0.0
    if rel.equivalent(x, x1):
        return 1.0

    def interpolant(lam: float) -> StateLike:
        return composite_state(
            [model.scale_state(x0, 1.0 - lam), model.scale_state(x1, lam)]
        )

    lo, hi = 0.0, 1.0
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        probe = interpolant(mid)
        fwd = rel.leq(probe, x)
        bwd = rel.leq(x, probe)
        if fwd and bwd:
            return mid
        if fwd:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol:
            return 0.5 * (lo + hi)
    raise NumericError(
        f"bisection did not reach tolerance {tol} in {max_iter} iterations"
    )


def entropy_from_accessibility(
    rel: AccessibilityRelation,
    refs: ReferencePair,
    states: Sequence[State],
    tol: float = LAMBDA_TOL,
) -> EntropyTable:
    """Table of interpolated entropies over the given states.

    States outside the reference bracket are recorded as skipped rather than
    failing the whole table.
    """
    table = EntropyTable(space_id=refs.x0.space_id)
    for s in states:
        try:
            lam = find_lambda(rel, s, refs, tol=tol)
        except DomainError as exc:
            table.skipped[s] = str(exc)
            continue
        table.entries[s] = (1.0 - lam) * refs.s0 + lam * refs.s1
    return table


# ---------------------------------------------------------------------------
# Affine certification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AffineFit:
    a: float
    b: float
    max_residual: float

    @property
    def orientation_ok(self) -> bool:
        return self.a > 0


def affine_match(f: Sequence[float], g: Sequence[float]) -> AffineFit:
    """Least-squares a, b minimizing |a*f + b - g|, with the max residual.

    A valid entropy is unique up to exactly this freedom, so two correct
    tables must match with a positive slope and a residual at noise level.
    """
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    if f.shape != g.shape or f.ndim != 1:
        raise DomainError("affine_match needs two equal-length value vectors")
    if f.size < 3:
        raise DegenerateFitError("affine fit needs at least three states")
    if np.ptp(g) == 0.0:
        raise DegenerateFitError("target values are constant; fit is degenerate")
    if np.ptp(f) == 0.0:
        raise DegenerateFitError("source values are constant; fit is degenerate")
    design = np.column_stack([f, np.ones_like(f)])
    (a, b), *_ = np.linalg.lstsq(design, g, rcond=None)
    residuals = np.abs(a * f + b - g)
    return AffineFit(float(a), float(b), float(residuals.max()))


# ---------------------------------------------------------------------------
# Multi-space calibration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CalibrationIdentity:
    """One linear identity sum(coeff * S_global(table_index, state)) = 0."""

    terms: tuple[tuple[int, State, float], ...]


def split_identity(
    whole: tuple[int, State], parts: Sequence[tuple[int, State]]
) -> CalibrationIdentity:
    terms = [(whole[0], whole[1], 1.0)]
    terms += [(i, s, -1.0) for i, s in parts]
    return CalibrationIdentity(tuple(terms))


def extensivity_identity(
    scaled: tuple[int, State], base: tuple[int, State], t: float
) -> CalibrationIdentity:
    return CalibrationIdentity(((scaled[0], scaled[1], 1.0), (base[0], base[1], -t)))


def calibrate_multispace(
    tables: Sequence[EntropyTable],
    identities: Sequence[CalibrationIdentity],
) -> tuple[list[tuple[float, float]], float]:
    """Solve for per-table constants (a, b) making the identities hold.

    The first table fixes the gauge (a=1, b=0).  Returns the constants and
    the largest identity residual after calibration; an underdetermined
    system raises and names the tables lacking constraints.
    """
    m = len(tables)
    if m == 0:
        raise DomainError("no tables to calibrate")
    n_unknowns = 2 * (m - 1)  # (a_i, b_i) for i >= 1; table 0 pinned to (1, 0)
    rows = []
    rhs = []
    touched = set()
    for ident in identities:
        row = np.zeros(n_unknowns)
        r = 0.0
        for idx, state, coeff in ident.terms:
            if not 0 <= idx < m:
                raise DomainError(f"identity references unknown table {idx}")
            v = tables[idx].raw(state)
            touched.add(idx)
            if idx == 0:
                r -= coeff * v  # a=1, b=0
            else:
                row[2 * (idx - 1)] += coeff * v
                row[2 * (idx - 1) + 1] += coeff
        rows.append(row)
        rhs.append(r)
    missing = [tables[i].space_id for i in range(1, m) if i not in touched]
    if missing:
        raise RankDeficiencyError(
            f"no identities constrain table(s) {missing}", missing=missing
        )
    if n_unknowns == 0:
        constants = [(1.0, 0.0)]
        res = max(abs(r) for r in rhs) if rhs else 0.0
        return constants, res
    a_mat = np.vstack(rows)
    b_vec = np.asarray(rhs)
    rank = np.linalg.matrix_rank(a_mat, tol=1e-9 * max(1.0, np.abs(a_mat).max()))
    if rank < n_unknowns:
        raise RankDeficiencyError(
            f"calibration system has rank {rank} < {n_unknowns} unknowns; "
            "add splitting or extensivity identities",
            missing=[t.space_id for t in tables[1:]],
        )
    sol, *_ = np.linalg.lstsq(a_mat, b_vec, rcond=None)
    constants = [(1.0, 0.0)]
    for i in range(m - 1):
        constants.append((float(sol[2 * i]), float(sol[2 * i + 1])))
    residual = float(np.abs(a_mat @ sol - b_vec).max()) if rows else 0.0
    return constants, residual


# ---------------------------------------------------------------------------
# Nonequilibrium sandwich bounds
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SandwichBounds:
    s_minus: Optional[float]
    s_plus: Optional[float]
    ok: bool
    message: str = ""


def sandwich_bounds(
    rel: AccessibilityRelation,
    x: State,
    gamma: Sequence[State],
    table: EntropyTable,
) -> SandwichBounds:
    """Tightest equilibrium entropy bracket around x over the sampled grid.

    A missing side is reported as a violation of the sandwich requirement,
    not raised: that outcome is itself a finding.
    """
    if not gamma:
        raise DomainError("sandwich bounds need a non-empty equilibrium grid")
    below = [table.value(g) for g in gamma if g in table.entries and rel.leq(g, x)]
    above = [table.value(g) for g in gamma if g in table.entries and rel.leq(x, g)]
    s_minus = max(below) if below else None
    s_plus = min(above) if above else None
    if s_minus is None or s_plus is None:
        side = "lower" if s_minus is None else "upper"
        return SandwichBounds(
            s_minus, s_plus, False,
            message=f"no {side} equilibrium state found: sandwich requirement violated",
        )
    return SandwichBounds(s_minus, s_plus, True)
