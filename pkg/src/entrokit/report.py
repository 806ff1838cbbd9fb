"""Suite runner and report serialization for the command-line entry point.

A run is deterministic given (config, seed): every sampler derives from the
recorded seed, and the canonical JSON serialization carries no volatile
fields, so identical configurations reproduce byte-identical reports.
"""

from __future__ import annotations

import io
import json
import math
import random
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import __version__
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
from .catalog import (
    FinitePreorderFixture,
    ideal_gas,
    ideal_gas_simple_system,
    load_fixture,
    triple_point_reservoir,
    two_level_spin,
)
from .core import ModelSystem
from .energy import check_energy_additivity, check_path_independence, polygonal_work
from .errors import (
    CapabilityError,
    ConfigError,
    DomainError,
    EngineError,
)
from .interpolation import (
    ReferencePair,
    affine_match,
    entropy_from_accessibility,
    sandwich_bounds,
)
from .mutants import mutate_model, mutation_matrix
from .pfaffian import (
    QuasistaticPath,
    check_integrating_factor,
    check_pfaffian_form,
    entropy_from_integrating_factor,
    factorization_residual,
    loop_integral,
    quasistatic_work,
    random_closed_loop,
    sample_box_coords,
)
from .reservoir import (
    REFERENCE_TEMPERATURE,
    Reservoir,
    check_carnot_agreement,
    check_entropy_additivity,
    check_entropy_nondecrease,
    check_interconnect,
    check_lower_bound,
    check_mutual_equilibrium,
    check_pmm2,
    check_reservoir_independence,
    derive_assumptions_from_comparability,
    entropy_from_reservoir,
    reference_reservoir,
    temperature_of,
    temperature_ratio_independence,
)

SUITES = ("axioms", "energy", "ly", "zb", "caratheodory", "theorems", "mutants")

DEFAULT_TOLERANCES = {
    "lambda_tol": 1e-9,
    "ly_residual": 1e-6,
    "zb_residual": 1e-6,
    "carnot_rel": 1e-7,
    "temp_rel": 1e-9,
    "ratio_rel": 1e-9,
    "zb_additivity": 1e-9,
    "nondecrease_zero": 1e-12,
    "mutual_eq": 1e-12,
    "loop_abs": 1e-8,
    "pfaffian_rel": 1e-8,
    "path_indep_rel": 1e-10,
    "energy_add": 1e-12,
    "bookkeeping": 1e-12,
    "negative_control_min": 1e-3,
}

DEFAULT_SAMPLE_COUNTS = {
    "axiom_samples": 200,
    "grid_nu": 21,
    "grid_nv": 21,
    "probe_pairs": 20,
    "carnot_pairs": 50,
    "irr_draws": 100,
    "weight_processes": 100,
    "interconnect_pairs": 25,
    "pmm2_attempts": 1000,
    "loops": 10,
    "path_pairs": 10,
    "polygonals_per_pair": 5,
}


@dataclass
class SuiteConfig:
    model: dict
    suites: tuple[str, ...]
    seed: int = 0
    tolerances: dict = field(default_factory=dict)
    sample_counts: dict = field(default_factory=dict)

    def __post_init__(self):
        for s in self.suites:
            if s not in SUITES:
                raise ConfigError(f"unknown suite {s!r}; known: {SUITES}")
        for name, value in self.tolerances.items():
            if name not in DEFAULT_TOLERANCES:
                raise ConfigError(f"unknown tolerance {name!r}")
            if not (isinstance(value, (int, float)) and value > 0):
                raise ConfigError(f"tolerance {name!r} must be positive, got {value!r}")
        for name, value in self.sample_counts.items():
            if name not in DEFAULT_SAMPLE_COUNTS:
                raise ConfigError(f"unknown sample count {name!r}")
            if not (isinstance(value, int) and value > 0):
                raise ConfigError(f"sample count {name!r} must be a positive int")
            if name in ("grid_nu", "grid_nv") and value < 2:
                raise ConfigError(f"{name} must be at least 2 for a usable grid")
        if not isinstance(self.seed, int):
            raise ConfigError("seed must be an integer")

    def tol(self, name: str) -> float:
        return self.tolerances.get(name, DEFAULT_TOLERANCES[name])

    def count(self, name: str) -> int:
        return self.sample_counts.get(name, DEFAULT_SAMPLE_COUNTS[name])

    @classmethod
    def from_dict(cls, raw: dict) -> "SuiteConfig":
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        unknown = set(raw) - {"model", "suites", "seed", "tolerances", "sample_counts"}
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        model = raw.get("model", {"kind": "ideal_gas"})
        suites = raw.get("suites", list(SUITES))
        if suites == "all":
            suites = list(SUITES)
        return cls(
            model=model,
            suites=tuple(suites),
            seed=raw.get("seed", 0),
            tolerances=dict(raw.get("tolerances", {})),
            sample_counts=dict(raw.get("sample_counts", {})),
        )

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "suites": list(self.suites),
            "seed": self.seed,
            "tolerances": dict(self.tolerances),
            "sample_counts": dict(self.sample_counts),
        }


def default_config(suites: Sequence[str] = SUITES, seed: int = 0) -> SuiteConfig:
    return SuiteConfig(model={"kind": "ideal_gas"}, suites=tuple(suites), seed=seed)


def build_target(model_spec: dict):
    """Instantiate the configured model or fixture, applying a mutation if
    the config plants one."""
    if not isinstance(model_spec, dict) or "kind" not in model_spec:
        raise ConfigError("model spec needs a 'kind'")
    kind = model_spec["kind"]
    params = model_spec.get("params", {})
    if kind == "ideal_gas":
        target = ideal_gas(**params)
    elif kind == "two_level_spin":
        target = two_level_spin(**params)
    elif kind == "fixture":
        if "path" not in params:
            raise ConfigError("fixture model spec needs params.path")
        target = load_fixture(params["path"])
    else:
        raise ConfigError(f"unknown model kind {kind!r}")
    mutation = model_spec.get("mutation")
    if mutation:
        try:
            target = mutate_model(target, mutation)
        except (CapabilityError, DomainError) as exc:
            raise ConfigError(f"cannot apply mutation {mutation!r}: {exc}") from exc
    return target


@dataclass
class Report:
    config: SuiteConfig
    suite_results: dict[str, list[CheckResult]]
    summaries: dict = field(default_factory=dict)
    wall_time_s: float = 0.0
    version: str = __version__

    @property
    def all_checks(self) -> list[CheckResult]:
        return [r for results in self.suite_results.values() for r in results]

    @property
    def aggregate_pass(self) -> bool:
        return all(not r.failed for r in self.all_checks)

    def to_canonical_dict(self) -> dict:
        # Volatile fields (wall time) stay out of the canonical form so that
        # identical (config, seed) runs serialize byte-identically.
        return {
            "schema": "report_v1",
            "version": self.version,
            "config": self.config.to_dict(),
            "suites": {
                name: [r.to_dict() for r in results]
                for name, results in self.suite_results.items()
            },
            "summaries": self.summaries,
            "aggregate_pass": self.aggregate_pass,
        }


# ---------------------------------------------------------------------------
# Suites
# ---------------------------------------------------------------------------

def _na(name: str, message: str) -> CheckResult:
    return CheckResult(name, CheckStatus.NOT_APPLICABLE, [], message=message)


def suite_axioms(target, config: SuiteConfig) -> list[CheckResult]:
    seed = config.seed
    n = config.count("axiom_samples")
    if isinstance(target, FinitePreorderFixture):
        rel = target.relation()
        return [
            check_reflexivity(rel, samples=n, seed=seed),
            check_transitivity(rel, samples=n, seed=seed + 1),
            _na("consistency", "fixture declares no composition tables"),
            check_scaling_invariance(rel, seed=seed + 3),
            check_splitting(rel, seed=seed + 4),
            check_stability(rel, seed=seed + 5),
            check_comparison(rel, samples=n, seed=seed + 6),
            _na("n1_n2", "fixture declares no equilibrium partition"),
        ]
    model = target
    rel = model.relation()
    engine = model.process_engine
    rng = random.Random(seed + 70)
    results = [
        check_reflexivity(rel, samples=n, seed=seed),
        check_transitivity(rel, samples=max(n, 500), seed=seed + 1),
        check_consistency(rel, rel, samples=n, seed=seed + 2),
        check_scaling_invariance(rel, samples=max(20, n // 2), seed=seed + 3),
        check_splitting(rel, samples=max(20, n // 2), seed=seed + 4),
        check_stability(rel, samples=max(20, n // 2), seed=seed + 5),
        check_comparison(rel, samples=n, seed=seed + 6),
    ]
    gamma = engine.gamma_grid()
    try:
        noneq = [engine.sample_nonequilibrium(rng) for _ in range(15)]
    except CapabilityError:
        noneq = []
    results.append(check_n1_n2(rel, gamma, noneq, samples=n, seed=seed + 7))
    return results


def suite_energy(target, config: SuiteConfig) -> list[CheckResult]:
    if isinstance(target, FinitePreorderFixture):
        return [_na("path_independence", "fixtures carry no process engine")]
    model = target
    engine = model.process_engine
    seed = config.seed
    rng = random.Random(seed + 100)
    pairs = [
        (engine.sample_state(rng), engine.sample_state(rng))
        for _ in range(config.count("path_pairs"))
    ]
    results = [
        check_path_independence(
            model, pairs, k=config.count("polygonals_per_pair"),
            seed=seed + 101, rel_tol=config.tol("path_indep_rel"),
        )
    ]

    worst = max(
        check_energy_additivity(
            (engine.sample_state(rng), engine.sample_state(rng)),
            (engine.sample_state(rng), engine.sample_state(rng)),
        )
        for _ in range(10)
    )
    tol = config.tol("energy_add")
    results.append(
        CheckResult(
            "energy_additivity",
            CheckStatus.PASS if worst < tol else CheckStatus.FAIL,
            [] if worst < tol else [("residual", worst)],
            samples_used=10, tolerance_used=tol,
        )
    )

    # Reversal sign convention on random polygonals.
    bad = []
    for _ in range(20):
        a, b = engine.sample_state(rng), engine.sample_state(rng)
        poly = engine.connect_polygonal(a, b, rng)
        if abs(polygonal_work(poly.reversed()) + polygonal_work(poly)) > 1e-9:
            bad.append((a, b))
    results.append(
        CheckResult(
            "polygonal_reversal",
            CheckStatus.FAIL if bad else CheckStatus.PASS,
            bad, samples_used=20, tolerance_used=1e-9,
        )
    )
    return results


def _grid_and_refs(model: ModelSystem, config: SuiteConfig):
    engine = model.process_engine
    grid = engine.grid(config.count("grid_nu"), config.count("grid_nv"))
    by_oracle = sorted(grid, key=model.oracle_entropy)
    refs = ReferencePair(x0=by_oracle[0], x1=by_oracle[-1], s0=0.0, s1=100.0)
    return grid, refs


def suite_ly(target, config: SuiteConfig) -> tuple[list[CheckResult], dict]:
    if isinstance(target, FinitePreorderFixture) or not getattr(
        target, "supports_scaling", False
    ):
        return [_na("ly_oracle_match", "interpolation needs a scalable model")], {}
    model = target
    rel = model.relation()
    grid, refs = _grid_and_refs(model, config)
    table = entropy_from_accessibility(rel, refs, grid, tol=config.tol("lambda_tol"))
    oracle = [model.oracle_entropy(s) for s in grid if s in table.entries]
    constructed = [table.value(s) for s in grid if s in table.entries]
    fit = affine_match(constructed, oracle)
    tol = config.tol("ly_residual")
    ok = fit.max_residual < tol and fit.orientation_ok
    results = [
        CheckResult(
            "ly_oracle_match",
            CheckStatus.PASS if ok else CheckStatus.FAIL,
            [] if ok else [("fit", fit.a, fit.b, fit.max_residual)],
            samples_used=len(constructed), tolerance_used=tol,
            message=f"affine fit a={fit.a:.6g} b={fit.b:.6g} "
                    f"max residual {fit.max_residual:.3e} J/K",
        )
    ]

    # Sandwich bounds for sampled nonequilibrium states.
    engine = model.process_engine
    rng = random.Random(config.seed + 200)
    bad = []
    tested = 0
    try:
        for _ in range(10):
            x = engine.sample_nonequilibrium(rng)
            tested += 1
            bounds = sandwich_bounds(rel, x, grid, table)
            s_x = model.oracle_entropy(x)
            a, b = fit.a, fit.b
            if not bounds.ok:
                bad.append((x, bounds.message))
            elif not (
                a * bounds.s_minus + b - 1e-6 <= s_x <= a * bounds.s_plus + b + 1e-6
            ):
                bad.append((x, bounds.s_minus, bounds.s_plus, s_x))
        results.append(
            CheckResult(
                "ly_sandwich_bounds",
                CheckStatus.FAIL if bad else CheckStatus.PASS,
                bad, samples_used=tested,
            )
        )
    except CapabilityError:
        results.append(_na("ly_sandwich_bounds", "model has no nonequilibrium family"))

    summary = {
        "ly": {
            "states": len(table.entries),
            "skipped": len(table.skipped),
            "affine_fit": {"a": fit.a, "b": fit.b, "max_residual": fit.max_residual},
        }
    }
    return results, summary


def suite_zb(target, config: SuiteConfig) -> tuple[list[CheckResult], dict]:
    if isinstance(target, FinitePreorderFixture):
        return [_na("zb_oracle_match", "fixtures carry no process engine")], {}
    model = target
    engine = model.process_engine
    seed = config.seed
    rng = random.Random(seed + 300)
    r0 = reference_reservoir()
    bench = Reservoir(id="bench-300", temperature=300.0)
    results = []
    summary: dict = {}

    # Reconstruction against the oracle, additive constant only.
    states = (
        engine.grid(config.count("grid_nu"), config.count("grid_nv"))
        if hasattr(engine, "grid")
        else [engine.sample_state(rng) for _ in range(100)]
    )
    a0 = states[0]
    table = entropy_from_reservoir(model, a0, 0.0, r0.reservoir, states)
    diffs = [table.value(s) - model.oracle_entropy(s) for s in states if s in table.entries]
    mean = sum(diffs) / len(diffs)
    residual = max(abs(d - mean) for d in diffs)
    tol = config.tol("zb_residual")
    results.append(
        CheckResult(
            "zb_oracle_match",
            CheckStatus.PASS if residual < tol else CheckStatus.FAIL,
            [] if residual < tol else [("residual", residual)],
            samples_used=len(diffs), tolerance_used=tol,
            message=f"shift {mean:.6g} J/K, max residual {residual:.3e} J/K",
        )
    )
    summary["zb"] = {"states": len(diffs), "max_residual": residual}

    # Kelvin gauge: the reference measures itself exactly; the triple-point
    # realization agrees inside its window.
    probe = (model, engine.sample_state(rng), engine.sample_state(rng))
    gauge = temperature_of(r0.reservoir, r0, probe)
    tp = triple_point_reservoir(capacity=1e6)
    tp_measured = temperature_of(tp, r0, probe)
    gauge_ok = gauge == REFERENCE_TEMPERATURE and abs(
        tp_measured - REFERENCE_TEMPERATURE
    ) <= 1e-9 * REFERENCE_TEMPERATURE
    results.append(
        CheckResult(
            "kelvin_gauge",
            CheckStatus.PASS if gauge_ok else CheckStatus.FAIL,
            [] if gauge_ok else [("reference", gauge), ("triple_point", tp_measured)],
            samples_used=2, tolerance_used=config.tol("temp_rel"),
        )
    )

    # Temperature universality across two distinct systems.
    aux = two_level_spin() if model.id != "spin" else ideal_gas()
    aux_engine = aux.process_engine
    pp = config.count("probe_pairs")
    probes = []
    for _ in range(pp // 2):
        probes.append((model, engine.sample_state(rng), engine.sample_state(rng)))
    for _ in range(pp - pp // 2):
        probes.append((aux, aux_engine.sample_state(rng), aux_engine.sample_state(rng)))
    r300 = Reservoir(id="R-300", temperature=300.0)
    r600 = Reservoir(id="R-600", temperature=600.0)
    results.append(
        temperature_ratio_independence(
            r300, r600, probes, rel_tol=config.tol("ratio_rel")
        )
    )

    results.append(
        check_reservoir_independence(
            model,
            (engine.sample_state(rng), engine.sample_state(rng)),
            [
                Reservoir(id="R-100", temperature=100.0),
                r0.reservoir,
                Reservoir(id="R-1000", temperature=1000.0),
            ],
            rel_tol=config.tol("ratio_rel"),
        )
    )

    copy_res = Reservoir(id="bench-300-copy", temperature=300.0, energy=11.0)
    results.append(
        check_mutual_equilibrium(bench, copy_res, seed=seed + 301,
                                 tol=config.tol("mutual_eq"))
    )

    # Additivity over composite processes, including mixed-system composites.
    worst = 0.0
    for _ in range(config.count("weight_processes")):
        pair_a = (engine.sample_state(rng), engine.sample_state(rng))
        pair_b = (aux_engine.sample_state(rng), aux_engine.sample_state(rng))
        worst = max(worst, check_entropy_additivity(model, aux, pair_a, pair_b, bench))
        pair_b2 = (engine.sample_state(rng), engine.sample_state(rng))
        worst = max(worst, check_entropy_additivity(model, model, pair_a, pair_b2, bench))
    tol = config.tol("zb_additivity")
    results.append(
        CheckResult(
            "zb_additivity",
            CheckStatus.PASS if worst < tol else CheckStatus.FAIL,
            [] if worst < tol else [("residual", worst)],
            samples_used=2 * config.count("weight_processes"), tolerance_used=tol,
            message=f"max residual {worst:.3e} J/K",
        )
    )

    # Quasistatic route agreement, when the model provides one.
    try:
        pairs = [
            (engine.sample_state(rng), engine.sample_state(rng))
            for _ in range(config.count("carnot_pairs"))
        ]
        results.append(
            check_carnot_agreement(model, pairs, bench, rel_tol=config.tol("carnot_rel"))
        )
    except CapabilityError as exc:
        results.append(_na("carnot_agreement", str(exc)))

    # Cross-construction agreement with the interpolation route.
    if getattr(model, "supports_scaling", False):
        rel = model.relation()
        grid, refs = _grid_and_refs(model, config)
        ly_table = entropy_from_accessibility(rel, refs, grid, tol=config.tol("lambda_tol"))
        common = [s for s in grid if s in ly_table.entries and s in table.entries]
        fit = affine_match(
            [ly_table.value(s) for s in common], [table.value(s) for s in common]
        )
        tol = config.tol("ly_residual")
        ok = fit.max_residual < tol and fit.orientation_ok
        results.append(
            CheckResult(
                "cross_construction",
                CheckStatus.PASS if ok else CheckStatus.FAIL,
                [] if ok else [("fit", fit.a, fit.b, fit.max_residual)],
                samples_used=len(common), tolerance_used=tol,
                message=f"affine fit residual {fit.max_residual:.3e} J/K",
            )
        )
        summary["cross_construction"] = {"max_residual": fit.max_residual}
    else:
        results.append(_na("cross_construction", "interpolation route needs scaling"))

    return results, summary


def suite_theorems(target, config: SuiteConfig) -> list[CheckResult]:
    if isinstance(target, FinitePreorderFixture):
        return [_na("lower_bound", "fixtures carry no process engine")]
    model = target
    engine = model.process_engine
    seed = config.seed
    rng = random.Random(seed + 400)
    bench = Reservoir(id="bench-300", temperature=300.0)
    results = [
        check_lower_bound(
            model,
            (engine.sample_state(rng), engine.sample_state(rng)),
            bench,
            n_irr=config.count("irr_draws"),
            seed=seed + 401,
        ),
        check_entropy_nondecrease(
            model,
            engine.random_weight_processes(config.count("weight_processes"), rng),
            zero_tol=config.tol("nondecrease_zero"),
        ),
        check_pmm2(
            model, engine.sample_state(rng),
            attempts=config.count("pmm2_attempts"), seed=seed + 402,
        ),
        check_interconnect(
            model,
            [
                (engine.sample_state(rng), engine.sample_state(rng))
                for _ in range(config.count("interconnect_pairs"))
            ],
            bench,
            tol=config.tol("bookkeeping"),
        ),
    ]
    try:
        results.append(
            derive_assumptions_from_comparability(
                model, bench, samples=25, seed=seed + 403,
                sigma_tol=config.tol("bookkeeping"),
            )
        )
    except (CapabilityError, EngineError) as exc:
        results.append(_na("derive_assumptions", str(exc)))
    return results


def suite_caratheodory(target, config: SuiteConfig) -> list[CheckResult]:
    if isinstance(target, FinitePreorderFixture) or getattr(target, "id", "") == "spin":
        return [_na("integrating_factor", "quasistatic structure needs a simple system")]
    seed = config.seed
    rng = random.Random(seed + 500)
    simple = ideal_gas_simple_system()
    results = []

    # Closed-form anchor: isothermal expansion doubles the volume.
    from .catalog import R_GAS

    tau = 300.0
    path = QuasistaticPath([[tau, 0.01], [tau, 0.02]], interp="linear")
    work = quasistatic_work(simple, path)
    expected = R_GAS * tau * math.log(2.0)
    ok = abs(work - expected) < 1e-8 * abs(expected)
    results.append(
        CheckResult(
            "quasistatic_work_closed_form",
            CheckStatus.PASS if ok else CheckStatus.FAIL,
            [] if ok else [("work", work, expected)],
            samples_used=1, tolerance_used=1e-8,
        )
    )

    paths = [
        QuasistaticPath(
            [[rng.uniform(320, 580), rng.uniform(0.011, 0.019)] for _ in range(3)],
            interp="cubic",
        )
        for _ in range(5)
    ]
    results.append(
        check_pfaffian_form(simple, paths, rel_tol=config.tol("pfaffian_rel"))
    )

    loops = [
        random_closed_loop(simple.coord_box, rng) for _ in range(config.count("loops"))
    ]
    results.append(
        check_integrating_factor(simple, loops, abs_tol=config.tol("loop_abs"))
    )

    rectangle = QuasistaticPath(
        [[300.0, 0.01], [600.0, 0.01], [600.0, 0.02], [300.0, 0.02]],
        closed=True, interp="linear",
    )
    control = loop_integral(simple, rectangle, power=2)
    threshold = config.tol("negative_control_min")
    ok = abs(control) > threshold
    results.append(
        CheckResult(
            "negative_control",
            CheckStatus.PASS if ok else CheckStatus.FAIL,
            [] if ok else [("control_value", control)],
            samples_used=1, tolerance_used=threshold,
            message=f"loop of (dU+dW)/T^2 = {control:.6g}",
        )
    )

    coords = sample_box_coords(simple.coord_box, 50, rng)
    res = factorization_residual(simple, coords)
    ok = res < 1e-10
    results.append(
        CheckResult(
            "factorization",
            CheckStatus.PASS if ok else CheckStatus.FAIL,
            [] if ok else [("residual", res)],
            samples_used=50, tolerance_used=1e-10,
        )
    )

    # Entropy from the collapsed coordinate matches the gas oracle affinely.
    gas = ideal_gas()
    entropy = entropy_from_integrating_factor(simple, x0_ref=0.0, s_ref=0.0)
    states = [
        (rng.uniform(320, 580), rng.uniform(0.011, 0.019)) for _ in range(25)
    ]
    built = [entropy.s_of_x0(simple.x0_fn(np.array(c))) for c in states]
    oracle = [
        gas.oracle_entropy(
            gas.process_engine.state(simple.u_fn(np.array(c)), c[1])
        )
        for c in states
    ]
    fit = affine_match(built, oracle)
    ok = fit.max_residual < 1e-8 and fit.orientation_ok
    results.append(
        CheckResult(
            "caratheodory_entropy_match",
            CheckStatus.PASS if ok else CheckStatus.FAIL,
            [] if ok else [("fit", fit.a, fit.b, fit.max_residual)],
            samples_used=len(states), tolerance_used=1e-8,
            message=f"affine fit residual {fit.max_residual:.3e}",
        )
    )
    return results


def suite_mutants(target, config: SuiteConfig) -> tuple[list[CheckResult], dict]:
    matrix = mutation_matrix(seed=config.seed)
    results = []
    baseline_ok = all(
        s is not CheckStatus.FAIL for s in matrix.baseline_model.values()
    ) and all(s is not CheckStatus.FAIL for s in matrix.baseline_fixture.values())
    results.append(
        CheckResult(
            "matrix_baseline",
            CheckStatus.PASS if baseline_ok else CheckStatus.FAIL,
            []
            if baseline_ok
            else [
                (name, status.value)
                for name, status in {**matrix.baseline_model, **matrix.baseline_fixture}.items()
                if status is CheckStatus.FAIL
            ],
            samples_used=len(matrix.baseline_model) + len(matrix.baseline_fixture),
        )
    )
    for outcome in matrix.outcomes:
        results.append(
            CheckResult(
                f"mutant_{outcome.mutation}",
                CheckStatus.PASS if outcome.exact else CheckStatus.FAIL,
                []
                if outcome.exact
                else [
                    ("expected", sorted(outcome.expected)),
                    ("newly_failed", sorted(outcome.newly_failed)),
                ],
                samples_used=len(outcome.statuses),
            )
        )
    return results, {"mutation_matrix": matrix.to_dict()}


# ---------------------------------------------------------------------------
# Runner and emitters
# ---------------------------------------------------------------------------

def run(config: SuiteConfig) -> Report:
    """Execute the selected suites in dependency order."""
    start = time.perf_counter()
    target = build_target(config.model)
    suite_results: dict[str, list[CheckResult]] = {}
    summaries: dict = {}
    ordered = [s for s in SUITES if s in config.suites]
    for name in ordered:
        if name == "axioms":
            suite_results[name] = suite_axioms(target, config)
        elif name == "energy":
            suite_results[name] = suite_energy(target, config)
        elif name == "ly":
            results, extra = suite_ly(target, config)
            suite_results[name] = results
            summaries.update(extra)
        elif name == "zb":
            results, extra = suite_zb(target, config)
            suite_results[name] = results
            summaries.update(extra)
        elif name == "caratheodory":
            suite_results[name] = suite_caratheodory(target, config)
        elif name == "theorems":
            suite_results[name] = suite_theorems(target, config)
        elif name == "mutants":
            results, extra = suite_mutants(target, config)
            suite_results[name] = results
            summaries.update(extra)
    wall = time.perf_counter() - start
    return Report(config, suite_results, summaries, wall_time_s=wall)


def emit(report: Report, fmt: str = "json") -> str:
    if fmt == "json":
        return json.dumps(report.to_canonical_dict(), sort_keys=True, indent=2) + "\n"
    if fmt == "csv":
        out = io.StringIO()
        out.write("suite,check,status,samples_used,tolerance_used,witness_count,message\n")
        for suite, results in report.suite_results.items():
            for r in results:
                msg = r.message.replace('"', "'")
                tol = "" if r.tolerance_used is None else repr(r.tolerance_used)
                out.write(
                    f'{suite},{r.check_name},{r.status.value},{r.samples_used},'
                    f'{tol},{len(r.witnesses)},"{msg}"\n'
                )
        return out.getvalue()
    if fmt == "text":
        lines = [f"entrokit {report.version} report (seed={report.config.seed})"]
        for suite, results in report.suite_results.items():
            lines.append(f"\n[{suite}]")
            for r in results:
                tol = "" if r.tolerance_used is None else f" tol={r.tolerance_used:g}"
                lines.append(f"  {r.check_name:32s} {r.status.value:>14s}{tol}  {r.message}")
                if r.failed:
                    for w in r.witnesses[:5]:
                        lines.append(f"    witness: {json.dumps(_short(w), default=str)}")
        lines.append(
            f"\naggregate: {'PASS' if report.aggregate_pass else 'FAIL'}"
            f"  (wall time {report.wall_time_s:.2f} s)"
        )
        return "\n".join(lines) + "\n"
    raise ConfigError(f"unknown output format {fmt!r}")


def _short(witness):
    from .axioms import describe

    return describe(witness)


def parse_report(text: str) -> dict:
    return json.loads(text)
