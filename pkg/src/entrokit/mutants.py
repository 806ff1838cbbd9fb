"""Targeted fault injection and the mutation coverage matrix.

Each mutation plants one defect and declares exactly which checks must fail
because of it.  The matrix runs the full check battery on the intact catalog
and on every mutant, then compares the set of newly failing checks against
the declaration; any difference, in either direction, is a finding about the
checks themselves.
"""

from __future__ import annotations

import copy
import random
from dataclasses import dataclass, field
from typing import Optional, Union

from .axioms import (
    CheckResult,
    CheckStatus,
    check_comparison,
    check_consistency,
    check_n1_n2,
    check_reflexivity,
    check_scaling_invariance,
    check_splitting,
    check_stability,
    check_transitivity,
)
from .catalog import FinitePreorderFixture, chain_fixture, ideal_gas
from .core import ModelSystem
from .energy import check_energy_additivity, check_path_independence
from .errors import CapabilityError, DomainError
from .reservoir import (
    Reservoir,
    check_entropy_additivity,
    check_entropy_nondecrease,
    check_lower_bound,
    check_mutual_equilibrium,
    check_pmm2,
    check_reservoir_independence,
    reference_reservoir,
    temperature_of,
)

MUTATIONS = (
    "break_transitivity",
    "break_scaling",
    "break_splitting",
    "composite_max",
    "noisy_work",
    "wrong_reservoir_temperature",
    "strict_only_comparison",
)

EXPECTED_FAILURES = {
    "break_transitivity": frozenset({"transitivity"}),
    "break_scaling": frozenset({"scaling_invariance"}),
    "break_splitting": frozenset({"splitting"}),
    "composite_max": frozenset({"consistency", "splitting"}),
    "noisy_work": frozenset({"path_independence"}),
    "wrong_reservoir_temperature": frozenset(
        {"temperature_agreement", "reservoir_independence"}
    ),
    "strict_only_comparison": frozenset({"stability"}),
}

MutationTarget = Union[ModelSystem, FinitePreorderFixture, Reservoir]


def mutate_model(target: MutationTarget, mutation: str) -> MutationTarget:
    """A copy of the target with one planted defect; its metadata names the
    checks that must now fail."""
    if mutation not in MUTATIONS:
        raise DomainError(f"unknown mutation {mutation!r}")
    expected = EXPECTED_FAILURES[mutation]

    if mutation == "break_transitivity":
        if not isinstance(target, FinitePreorderFixture):
            raise CapabilityError("break_transitivity applies to finite fixtures")
        return _break_transitivity(target)

    if mutation == "wrong_reservoir_temperature":
        if not isinstance(target, Reservoir):
            raise CapabilityError("wrong_reservoir_temperature applies to reservoirs")
        from dataclasses import replace
        return replace(target, behavior_temperature=1.1 * target.temperature)

    if not isinstance(target, ModelSystem):
        raise CapabilityError(f"mutation {mutation!r} applies to model systems")

    if mutation in ("break_scaling", "break_splitting") and not target.supports_scaling:
        raise CapabilityError(f"mutation {mutation!r} needs a scalable model")

    clone = _clone_model(target)
    base_oracle = clone.oracle_entropy
    spaces = clone.spaces

    if mutation == "break_scaling":
        # Order-reversing only on enlarged copies: shrunk copies (splitting,
        # vanishing perturbations) stay intact, so only scaling invariance
        # can notice.
        def oracle(state):
            value = base_oracle(state)
            return -value if spaces[state.space_id].scale > 1.0 + 1e-12 else value

        clone.oracle_entropy = oracle
    elif mutation == "break_splitting":
        # Superlinear scaling: a t-copy carries t times too much entropy, so
        # the split halves no longer recombine to the whole.
        def oracle(state):
            return base_oracle(state) * spaces[state.space_id].scale

        clone.oracle_entropy = oracle
    elif mutation == "composite_max":
        clone.composite_policy = "max"
    elif mutation == "strict_only_comparison":
        clone.strict_single_space = True
    elif mutation == "noisy_work":
        clone.process_engine.polygonal_work_noise = 0.1

    clone.mutation = mutation
    clone.expected_failures = expected
    return clone


def _clone_model(model: ModelSystem) -> ModelSystem:
    engine = copy.copy(model.process_engine)
    clone = ModelSystem(
        id=model.id,
        spaces=model.spaces,
        energy_fn=model.energy_fn,
        oracle_entropy=model.oracle_entropy,
        process_engine=engine,
        is_normal=model.is_normal,
        energy_bounds=model.energy_bounds,
        supports_scaling=model.supports_scaling,
        scale_state_fn=model._scale_state_fn,
        entropy_atol=model.entropy_atol,
        isentropic_partner=model.isentropic_partner,
        composite_policy=model.composite_policy,
        strict_single_space=model.strict_single_space,
    )
    # Share the space registry: scaled copies registered through either view
    # must resolve in both, since the clone's inherited callables still look
    # spaces up through the original.
    clone.spaces = model.spaces
    return clone


def _break_transitivity(fixture: FinitePreorderFixture) -> FinitePreorderFixture:
    """Replace one closure pair (a, c) by its reverse: transitivity now has a
    witness while every element stays comparable."""
    for a, b in sorted(fixture.pairs):
        if a == b:
            continue
        for c in fixture.ids:
            if c in (a, b):
                continue
            if (b, c) in fixture.pairs and (a, c) in fixture.pairs and (c, a) not in fixture.pairs:
                pairs = set(fixture.pairs)
                pairs.discard((a, c))
                pairs.add((c, a))
                mutated = FinitePreorderFixture(list(fixture.ids), pairs, dict(fixture.kinds))
                mutated.mutation = "break_transitivity"
                mutated.expected_failures = EXPECTED_FAILURES["break_transitivity"]
                return mutated
    raise CapabilityError("fixture has no transitive triple to break")


# ---------------------------------------------------------------------------
# The coverage matrix
# ---------------------------------------------------------------------------

MODEL_CHECKS = (
    "reflexivity",
    "transitivity",
    "consistency",
    "scaling_invariance",
    "splitting",
    "stability",
    "comparison",
    "n1_n2",
    "path_independence",
    "energy_additivity",
    "temperature_agreement",
    "reservoir_independence",
    "mutual_equilibrium",
    "entropy_additivity",
    "lower_bound",
    "entropy_nondecrease",
    "pmm2",
)

FIXTURE_CHECKS = ("reflexivity", "transitivity", "comparison")


def _status_map(results: list[CheckResult]) -> dict[str, CheckStatus]:
    return {r.check_name: r.status for r in results}


def run_model_checks(
    model: ModelSystem,
    reservoir: Reservoir,
    *,
    seed: int = 0,
    samples: int = 120,
) -> list[CheckResult]:
    """The full battery used by the coverage matrix for parametric models."""
    rng = random.Random(seed)
    rel = model.relation()
    engine = model.process_engine
    results = [
        check_reflexivity(rel, samples=samples, seed=seed),
        check_transitivity(rel, samples=samples, seed=seed + 1),
        check_consistency(rel, rel, samples=samples // 2, seed=seed + 2),
        check_scaling_invariance(rel, samples=samples // 3, seed=seed + 3),
        check_splitting(rel, samples=samples // 3, seed=seed + 4),
        check_stability(rel, samples=samples // 3, seed=seed + 5),
        check_comparison(rel, samples=samples, seed=seed + 6),
    ]
    gamma = engine.gamma_grid()
    try:
        noneq = [engine.sample_nonequilibrium(rng) for _ in range(10)]
    except CapabilityError:
        noneq = []
    results.append(check_n1_n2(rel, gamma, noneq, samples=samples // 2, seed=seed + 7))

    pairs = [(engine.sample_state(rng), engine.sample_state(rng)) for _ in range(5)]
    results.append(check_path_independence(model, pairs, k=4, seed=seed + 8))

    worst = max(
        check_energy_additivity(
            (engine.sample_state(rng), engine.sample_state(rng)),
            (engine.sample_state(rng), engine.sample_state(rng)),
        )
        for _ in range(5)
    )
    results.append(
        CheckResult(
            "energy_additivity",
            CheckStatus.PASS if worst < 1e-12 else CheckStatus.FAIL,
            [] if worst < 1e-12 else [("residual", worst)],
            samples_used=5,
            tolerance_used=1e-12,
        )
    )

    r0 = reference_reservoir()
    probe = (model, engine.sample_state(rng), engine.sample_state(rng))
    measured = temperature_of(reservoir, r0, probe)
    rel_err = abs(measured - reservoir.temperature) / reservoir.temperature
    results.append(
        CheckResult(
            "temperature_agreement",
            CheckStatus.PASS if rel_err <= 1e-9 else CheckStatus.FAIL,
            [] if rel_err <= 1e-9 else [("measured", measured, reservoir.temperature)],
            samples_used=1,
            tolerance_used=1e-9,
        )
    )

    honest = Reservoir(id="aux-600", temperature=600.0)
    results.append(
        check_reservoir_independence(
            model,
            (engine.sample_state(rng), engine.sample_state(rng)),
            [reservoir, honest, r0.reservoir],
        )
    )

    copy_res = Reservoir(
        id=reservoir.id + "-copy",
        temperature=reservoir.temperature,
        energy=reservoir.energy + 7.0,
        behavior_temperature=reservoir.behavior_temperature,
    )
    results.append(check_mutual_equilibrium(reservoir, copy_res, seed=seed + 9))

    residual = check_entropy_additivity(
        model, model,
        (engine.sample_state(rng), engine.sample_state(rng)),
        (engine.sample_state(rng), engine.sample_state(rng)),
        reservoir,
    )
    results.append(
        CheckResult(
            "entropy_additivity",
            CheckStatus.PASS if residual < 1e-9 else CheckStatus.FAIL,
            [] if residual < 1e-9 else [("residual", residual)],
            samples_used=1,
            tolerance_used=1e-9,
        )
    )

    results.append(
        check_lower_bound(
            model,
            (engine.sample_state(rng), engine.sample_state(rng)),
            reservoir,
            n_irr=20,
            seed=seed + 10,
        )
    )
    results.append(
        check_entropy_nondecrease(model, engine.random_weight_processes(30, rng))
    )
    ses = engine.sample_state(rng)
    results.append(check_pmm2(model, ses, attempts=200, seed=seed + 11))
    return results


def run_fixture_checks(fixture: FinitePreorderFixture) -> list[CheckResult]:
    rel = fixture.relation()
    return [
        check_reflexivity(rel),
        check_transitivity(rel),
        check_comparison(rel),
    ]


@dataclass
class MutantOutcome:
    mutation: str
    expected: frozenset
    newly_failed: frozenset
    statuses: dict
    exact: bool


@dataclass
class MatrixReport:
    baseline_model: dict
    baseline_fixture: dict
    outcomes: list[MutantOutcome] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        baseline_clean = all(
            s is not CheckStatus.FAIL for s in self.baseline_model.values()
        ) and all(s is not CheckStatus.FAIL for s in self.baseline_fixture.values())
        return baseline_clean and all(o.exact for o in self.outcomes)

    def to_dict(self) -> dict:
        return {
            "baseline_model": {k: v.value for k, v in self.baseline_model.items()},
            "baseline_fixture": {k: v.value for k, v in self.baseline_fixture.items()},
            "mutants": [
                {
                    "mutation": o.mutation,
                    "expected_failures": sorted(o.expected),
                    "newly_failed": sorted(o.newly_failed),
                    "statuses": {k: v.value for k, v in o.statuses.items()},
                    "exact": o.exact,
                }
                for o in self.outcomes
            ],
            "ok": self.ok,
        }


def mutation_matrix(*, seed: int = 0, model: Optional[ModelSystem] = None) -> MatrixReport:
    """Run every mutation against the intact baseline and compare newly
    failing checks with each mutation's declaration."""
    base_model = model if model is not None else ideal_gas()
    base_reservoir = Reservoir(id="bench-300", temperature=300.0)
    base_fixture = chain_fixture(6)

    baseline_model = _status_map(run_model_checks(base_model, base_reservoir, seed=seed))
    baseline_fixture = _status_map(run_fixture_checks(base_fixture))
    report = MatrixReport(baseline_model, baseline_fixture)

    for mutation in MUTATIONS:
        if mutation == "break_transitivity":
            mutant = mutate_model(base_fixture, mutation)
            statuses = _status_map(run_fixture_checks(mutant))
            baseline = baseline_fixture
        elif mutation == "wrong_reservoir_temperature":
            bad_reservoir = mutate_model(base_reservoir, mutation)
            statuses = _status_map(run_model_checks(base_model, bad_reservoir, seed=seed))
            baseline = baseline_model
        else:
            mutant = mutate_model(base_model, mutation)
            statuses = _status_map(run_model_checks(mutant, base_reservoir, seed=seed))
            baseline = baseline_model
        newly_failed = frozenset(
            name
            for name, status in statuses.items()
            if status is CheckStatus.FAIL and baseline[name] is not CheckStatus.FAIL
        )
        expected = EXPECTED_FAILURES[mutation]
        report.outcomes.append(
            MutantOutcome(
                mutation=mutation,
                expected=expected,
                newly_failed=newly_failed,
                statuses=statuses,
                exact=newly_failed == expected,
            )
        )
    return report
