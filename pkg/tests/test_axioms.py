import pytest

from entrokit.axioms import (
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
from entrokit.catalog import chain_fixture, ideal_gas
from entrokit.core import AccessibilityRelation
from entrokit.errors import DomainError
from entrokit.mutants import mutate_model


def test_check_result_fail_needs_witnesses():
    with pytest.raises(DomainError):
        CheckResult("x", CheckStatus.FAIL, [])


# -- reflexivity -------------------------------------------------------------

def test_reflexivity_induced_passes(gas_rel):
    assert check_reflexivity(gas_rel, samples=200, seed=1).passed


def test_reflexivity_missing_diagonal_fails():
    rel = AccessibilityRelation.finite([1, 2], [(1, 2), (2, 2)])
    result = check_reflexivity(rel)
    assert result.failed
    assert result.witnesses == [1]


def test_reflexivity_empty_universe_vacuously_passes():
    rel = AccessibilityRelation.finite([], [])
    assert check_reflexivity(rel).passed


# -- transitivity ------------------------------------------------------------

def test_transitivity_closed_chain_passes():
    rel = AccessibilityRelation.finite([1, 2, 3], [(1, 2), (2, 3), (1, 3)])
    assert check_transitivity(rel).passed


def test_transitivity_missing_closure_pair_fails():
    rel = AccessibilityRelation.finite([1, 2, 3], [(1, 2), (2, 3)])
    result = check_transitivity(rel)
    assert result.failed
    assert (1, 2, 3) in result.witnesses


def test_transitivity_cap_reports_not_applicable():
    fixture = chain_fixture(12)
    result = check_transitivity(fixture.relation(), cap=10)
    assert result.status is CheckStatus.NOT_APPLICABLE


def test_transitivity_induced_sampled(gas_rel):
    assert check_transitivity(gas_rel, samples=500, seed=2).passed


# -- consistency -------------------------------------------------------------

def test_consistency_induced_passes(gas_rel):
    assert check_consistency(gas_rel, gas_rel, samples=200, seed=3).passed


def test_consistency_max_composite_fails():
    mutant = mutate_model(ideal_gas(), "composite_max")
    rel = mutant.relation()
    result = check_consistency(rel, rel, samples=200, seed=3)
    assert result.failed
    assert result.witnesses


def test_consistency_across_distinct_systems(gas, spin):
    result = check_consistency(gas.relation(), spin.relation(),
                               samples=100, seed=3)
    assert result.passed


def test_consistency_equal_pairs_compose(gas, gas_rel):
    from entrokit.core import composite_state

    e = gas.process_engine
    x, xp = e.state(1000.0, 0.02), e.state(2000.0, 0.04)
    assert gas_rel.leq(composite_state([x, xp]), composite_state([x, xp]))


# -- scaling invariance --------------------------------------------------------

def test_scaling_invariance_gas(gas_rel):
    result = check_scaling_invariance(gas_rel, (0.5, 2.0, 3.0), samples=100, seed=4)
    assert result.passed


def test_scaling_invariance_t_equal_one(gas_rel):
    assert check_scaling_invariance(gas_rel, (1.0,), samples=20, seed=4).passed


def test_scaling_invariance_spin_not_applicable(spin):
    result = check_scaling_invariance(spin.relation())
    assert result.status is CheckStatus.NOT_APPLICABLE


# -- splitting ---------------------------------------------------------------

def test_splitting_half(gas_rel):
    assert check_splitting(gas_rel, 0.5, samples=50, seed=5).passed


def test_splitting_near_boundary(gas_rel):
    assert check_splitting(gas_rel, 0.01, samples=50, seed=5).passed


def test_splitting_requires_fraction_in_unit_interval(gas_rel):
    with pytest.raises(DomainError):
        check_splitting(gas_rel, 1.5)


def test_splitting_superlinear_mutant_fails():
    mutant = mutate_model(ideal_gas(), "break_splitting")
    result = check_splitting(mutant.relation(), 0.5, samples=50, seed=5)
    assert result.failed


# -- stability ---------------------------------------------------------------

def test_stability_gas(gas_rel):
    result = check_stability(gas_rel, samples=60, seed=6)
    assert result.passed
    assert result.tolerance_used == pytest.approx(0.5 ** 20)


def test_stability_equal_entropy_pair_is_equivalent(gas, gas_rel, rng):
    x = gas.process_engine.sample_state(rng)
    y = gas.isentropic_partner(x, rng)
    assert gas_rel.equivalent(x, y)


def test_stability_strict_only_mutant_fails_at_equality():
    mutant = mutate_model(ideal_gas(), "strict_only_comparison")
    result = check_stability(mutant.relation(), samples=60, seed=6)
    assert result.failed


def test_stability_requires_decreasing_eps(gas_rel):
    with pytest.raises(DomainError):
        check_stability(gas_rel, eps_sequence=(0.25, 0.5))


# -- comparison ---------------------------------------------------------------

def test_comparison_induced_single_space(gas_rel):
    assert check_comparison(gas_rel, samples=200, seed=7).passed


def test_comparison_disconnected_fixture_fails():
    rel = AccessibilityRelation.finite([1, 2], [(1, 1), (2, 2)])
    result = check_comparison(rel)
    assert result.failed


def test_comparison_single_state_universe():
    rel = AccessibilityRelation.finite([1], [(1, 1)])
    assert check_comparison(rel).passed


# -- n1/n2 ---------------------------------------------------------------------

def test_n1_n2_gas_passes(gas, gas_rel, rng):
    e = gas.process_engine
    gamma = e.gamma_grid()
    noneq = [e.sample_nonequilibrium(rng) for _ in range(10)]
    assert check_n1_n2(gas_rel, gamma, noneq, samples=100, seed=8).passed


def test_n1_n2_unsandwiched_state_fails(gas, gas_rel):
    e = gas.process_engine
    gamma = e.gamma_grid()
    lowest = min(gas.oracle_entropy(g) for g in gamma)
    base = e.state(600.0, 0.006)
    drop = gas.oracle_entropy(base) - lowest + 5.0
    stranded = e.state(600.0, 0.006, deficit=drop)
    result = check_n1_n2(gas_rel, gamma, [stranded], samples=50, seed=8)
    assert result.failed
    assert any(w[0] == "sandwich" for w in result.witnesses)


def test_n1_n2_equilibrium_only_passes(gas, gas_rel):
    gamma = gas.process_engine.gamma_grid()
    assert check_n1_n2(gas_rel, gamma, [], samples=50, seed=8).passed


def test_n1_n2_empty_gamma_not_applicable(gas_rel):
    result = check_n1_n2(gas_rel, [], [])
    assert result.status is CheckStatus.NOT_APPLICABLE


# -- witness replay -----------------------------------------------------------

def test_fail_witnesses_replay_deterministically():
    rel = AccessibilityRelation.finite([1, 2, 3], [(1, 2), (2, 3)])
    result = check_transitivity(rel)
    x, y, z = result.witnesses[0]
    assert rel.leq(x, y) and rel.leq(y, z) and not rel.leq(x, z)


def test_checks_reproducible_under_fixed_seed(gas_rel):
    a = check_stability(gas_rel, samples=40, seed=11)
    b = check_stability(gas_rel, samples=40, seed=11)
    assert a.status is b.status and a.samples_used == b.samples_used


def test_any_witness_kind_serializes(gas):
    import json

    from entrokit.core import ProcessRecord

    e = gas.process_engine
    a, b = e.state(2000.0, 0.02), e.state(2500.0, 0.02)
    rec = e.weight_process(a, b)
    result = CheckResult("demo", CheckStatus.FAIL, [rec, (a, b), {"note": a}])
    json.dumps(result.to_dict(), sort_keys=True)
