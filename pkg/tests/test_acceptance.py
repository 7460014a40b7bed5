"""One pass/fail test per acceptance criterion, at the stated tolerances.

Each test runs the registered campaign entries with the default seed and
asserts both the report verdicts and the numeric bound directly, so a change
in the registry tolerances cannot loosen a criterion.
"""

import time
from functools import lru_cache

import pytest

from rarefied.verify import CONJECTURE, PROVED, build_tasks, run_task
from rarefied.verify.properties import run_properties

SEED = 20240601


@lru_cache(maxsize=None)
def reports(identity_id):
    out = []
    for task in build_tasks([identity_id], SEED):
        out.extend(run_task(task))
    return tuple(out)


def assert_within(reps, bound, label=PROVED):
    assert reps, "campaign produced no reports"
    bad = [(r.tags, r.rel_dev, r.message) for r in reps if not (r.passed and r.rel_dev <= bound)]
    assert not bad, bad
    assert all(r.label == label for r in reps)


def cells(reps):
    return {(r.tags["r"], r.tags["eps"]) for r in reps}


def test_criterion_1_classical_beta():
    reps = reports("beta_classical")
    assert len(reps) == 20 and cells(reps) == {(1, 0)}
    assert_within(reps, 1e-10)
    for r in reps:
        assert all(0.05 <= abs(complex(*r.bases[k])) <= 0.2 for k in ("p", "q"))
        assert max(abs(complex(*t)) for t in r.params["t"]) <= 0.8
        assert r.wall_time <= 2.0


def test_criterion_2_rarefied_beta():
    reps = reports("rfint")
    assert cells(reps) == {(r, e) for r in (1, 2, 3) for e in (0, 1)}
    assert all(sum(1 for x in reps if (x.tags["r"], x.tags["eps"]) == c) == 10 for c in cells(reps))
    assert_within(reps, 1e-8)
    assert max(r.wall_time for r in reps) <= 10.0


@pytest.mark.parametrize("identity_id", ["typeI_Cn_rank2", "typeII_Cn_d2"])
def test_criterion_3_rank_two(identity_id):
    reps = reports(identity_id)
    assert cells(reps) == {(2, 0), (2, 1)} and len(reps) == 6
    assert_within(reps, 1e-6)
    assert all(r.wall_time <= 600 and r.grid_used <= 512 for r in reps)


def test_criterion_4_E7_transformations():
    reps = reports("E7_1") + reports("E7_2") + reports("E7_3")
    assert {r.tags["r"] for r in reps} == {1, 2}
    assert_within(reps, 1e-8)
    assert any(r.tags["mixed_parity"] for r in reps)


def test_criterion_5_difference_equations():
    for ident in ("contiguous", "reheq", "reheq_partner", "reheq_sym"):
        reps = reports(ident)
        assert cells(reps) == {(1, 0), (2, 0)} and len(reps) == 20
        assert_within(reps, 1e-7)


def test_criterion_6_q_limits():
    for ident in ("qbeta_asym", "qbeta_asym_flip", "rahman"):
        reps = reports(ident)
        assert {r.tags["r"] for r in reps} == {2, 3}
        assert_within(reps, 1e-10)
    for ident in ("mellin_barnes", "mellin_barnes_flip"):
        reps = reports(ident)
        assert {r.tags["r"] for r in reps} == {2, 3}
        assert_within(reps, 1e-8)


def test_criterion_7_asymptotic_rates():
    small = reports("small_p_rate")
    assert {r.tags["r"] for r in small} == {2, 3}
    assert_within(small, 0.1)
    cm = reports("cm_scaling")
    assert {r.tags["m"] for r in cm} == {0, 1}
    assert all(r.tags["r"] == 3 and r.tags["eps"] == 1 for r in cm)
    assert_within(cm, 0.1)


def test_criterion_8_conjectures():
    bounds = {
        "CdCm_1_1": 1e-8, "CdCm_2_1": 1e-6, "CdCm_1_2": 1e-6,
        "AnAm_1_1": 1e-8, "AnAm_2_1": 1e-6, "AnAm_1_2": 1e-6,
        "typeII_Cd_1": 1e-8, "typeII_Cd_2": 1e-6,
    }
    for ident, bound in bounds.items():
        assert_within(reports(ident), bound, CONJECTURE)
    for ident in ("CdCm_1_1_vs_E7_3", "AnAm_1_1_vs_E7_2", "typeII_Cd_1_vs_E7_1"):
        assert_within(reports(ident), 1e-10, CONJECTURE)


def test_criterion_9_operator():
    null = reports("operator_null")
    assert_within(null, 1e-13)
    sym = reports("operator_symmetry")
    assert {r.tags["r"] for r in sym} == {1, 2}
    assert_within(sym, 1e-8)


def test_criterion_10_property_suites():
    t0 = time.perf_counter()
    results = run_properties(samples=50)
    elapsed = time.perf_counter() - t0
    names = {r.name for r in results}
    assert names == {
        "quasiperiodicity", "inversion", "pq_symmetry", "h_ellipticity",
        "kernel_difference", "theta_addition", "factorized_equivalence",
    }
    assert all(r.samples >= 50 and r.passed for r in results), [(r.name, r.worst) for r in results]
    assert elapsed <= 300
