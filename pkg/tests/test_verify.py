import io
import json
import math

import numpy as np
import pytest

from rarefied.errors import SamplerExhaustedError
from rarefied.kernels import BalancedParams, Kind
from rarefied.qseries import Bases
from rarefied.verify import TOL, IdentityReport, read_jsonl, write_jsonl
from rarefied.verify.checks import check_rfint, e7_image
from rarefied.verify.report import STATUS_ERROR, relative_deviation
from rarefied.verify.sampler import (
    SamplerConfig,
    draw_integers_solved,
    draw_moduli_solved,
    make_rng,
    sample_balanced,
    sample_bases,
)
from rarefied.verify.suites import REGISTRY, SUITES, IdentityOverride, Task, build_tasks, identities_for, run_task, summarize
from rarefied.verify.windows import sample_reheq, sample_v8, reheq_bases

CFG = SamplerConfig()


class TestSampler:
    def test_config_validation(self):
        with pytest.raises(ValueError):
            SamplerConfig(p_mag_range=(0.0, 0.5))
        with pytest.raises(ValueError):
            SamplerConfig(t_mag_cap=1.0)
        with pytest.raises(ValueError):
            SamplerConfig(resample_limit=0)
        assert CFG.n_cap(3) == 2 and SamplerConfig(n_abs_cap=5).n_cap(3) == 5

    def test_streams_deterministic_and_distinct(self):
        a = make_rng(CFG, "x", 1).random(3)
        assert np.array_equal(a, make_rng(CFG, "x", 1).random(3))
        assert not np.array_equal(a, make_rng(CFG, "x", 2).random(3))
        assert not np.array_equal(a, make_rng(CFG.with_seed(7), "x", 1).random(3))

    @pytest.mark.parametrize("kind,rank", [(Kind.BETA6, 1), (Kind.TYPEI_CN, 2), (Kind.TYPEII_CN, 2), (Kind.V8, 1), (Kind.TYPEI_AN, 2)])
    @pytest.mark.parametrize("r", [1, 2, 3])
    def test_balanced_draws(self, kind, rank, r):
        rng = make_rng(CFG, kind.value, rank, r)
        b = sample_bases(r, CFG, rng)
        P = sample_balanced(kind, rank, r, 0 if kind is Kind.TYPEI_AN else 1, CFG, b, rng)
        P.validate(b)
        assert max(abs(v) for v in P.t + P.s) < CFG.t_mag_cap
        assert max(abs(v) for v in P.n[:-1]) <= r - 1

    def test_bases_ranges(self):
        rng = make_rng(CFG, "bases")
        for _ in range(20):
            b = sample_bases(2, CFG, rng)
            assert 0.05 <= abs(b.p) <= 0.25 and 0.05 <= abs(b.q) <= 0.25
        assert sample_bases(2, CFG, rng, real=True).p.imag == 0

    def test_solved_draws(self):
        rng = make_rng(CFG, "solved")
        vals = draw_moduli_solved(rng, 5, 0.01 + 0.02j, CFG)
        assert abs(np.prod(vals) / (0.01 + 0.02j) - 1) < 1e-14
        assert sum(draw_integers_solved(rng, 6, -3, 1)) == -3
        with pytest.raises(SamplerExhaustedError):
            draw_moduli_solved(rng, 3, 0.9, SamplerConfig(resample_limit=5))

    def test_window_samplers(self):
        rng = make_rng(CFG, "windows")
        b = Bases(0.2 * np.exp(0.3j), 0.15 * np.exp(1.1j), 2)
        P = sample_v8(b, 1, CFG, rng)
        for w in (1, 2, 3):
            assert max(abs(v) for v in e7_image(P, b, w)[0].t) < 0.9
        b = reheq_bases(2, rng)
        P = sample_reheq(b, 0, CFG, rng, even_pair=True)
        assert max(abs(P.t[0]), abs(P.t[1])) < min(abs(b.p), abs(b.q))
        assert (P.n[0] + P.n[1]) % 2 == 0


class TestReport:
    def test_relative_deviation(self):
        assert relative_deviation(1.0, 1.0) == 0
        assert relative_deviation(3e-12, 0) == 3e-12

    def test_round_trip(self):
        b = Bases(0.2, 0.1, 2)
        P = BalancedParams(Kind.BETA6, [0.5] * 5 + [b.pq / 0.5**5], [0] * 6)
        rep = IdentityReport.build("rfint", 1 + 1e-12, 1.0, 1e-8, P, b, grid_used=64, tags={"r": 2})
        buf = io.StringIO()
        assert write_jsonl([rep, rep], buf, timing=False) == 2
        recs = read_jsonl(io.StringIO(buf.getvalue()))
        assert len(recs) == 2 and recs[0]["pass"] is True and recs[0]["grid_used"] == 64
        assert BalancedParams.from_dict(recs[0]["params"]) == P
        assert "wall_time_ms" not in recs[0]

    def test_failing_and_nan(self):
        assert not IdentityReport.build("x", 2.0, 1.0, 1e-8).passed
        rep = IdentityReport.skipped("x", "not applicable")
        assert not rep.passed and json.loads(rep.to_json())["rel_dev"] is None

    def test_malformed(self):
        with pytest.raises(ValueError):
            read_jsonl(io.StringIO("{not json}\n"))
        with pytest.raises(ValueError):
            read_jsonl(io.StringIO('{"foo": 1}\n'))
        assert read_jsonl(io.StringIO("\n\n")) == []


class TestChecks:
    def test_E7_3_involution(self):
        rng = make_rng(CFG, "inv")
        b = Bases(0.2 * np.exp(0.3j), 0.15 * np.exp(1.1j), 2)
        P = sample_v8(b, 1, CFG, rng)
        image, _ = e7_image(P, b, 3)
        back, _ = e7_image(image, b, 3)
        assert back.n == P.n and back.eps == P.eps
        assert max(abs(x - y) for x, y in zip(back.t, P.t)) < 1e-15

    def test_E7_1_involution(self):
        rng = make_rng(CFG, "inv1")
        b = Bases(0.2 * np.exp(0.3j), 0.15 * np.exp(1.1j), 2)
        P = sample_v8(b, 0, CFG, rng)
        image, _ = e7_image(P, b, 1)
        back, _ = e7_image(image, b, 1)
        assert back.n == P.n and back.eps == P.eps
        assert max(abs(x - y) for x, y in zip(back.t, P.t)) < 1e-14

    def test_E7_guard(self):
        b = Bases(0.2, 0.1, 1)
        P = BalancedParams(Kind.BETA6, [0.5] * 5 + [b.pq / 0.5**5], [0] * 6)
        with pytest.raises(ValueError):
            e7_image(P, b, 1)

    @pytest.mark.parametrize("r", [2, 3])
    def test_rfint_with_shifted_integers(self, r):
        """Moving n_1 by +r and n_2 by -r keeps the balancing; both sides still agree."""
        rng = make_rng(CFG, "shift", r)
        b = Bases(0.15 * np.exp(0.4j), 0.1 * np.exp(-0.9j), r)
        P = sample_balanced(Kind.BETA6, 1, r, 1, CFG, b, rng)
        Q = P.with_shift(0, 1.0, r).with_shift(1, 1.0, -r)
        assert check_rfint(Q, b).passed


class TestSuites:
    def test_registry_covers_suites(self):
        assert {s.suite for s in REGISTRY.values()} == set(SUITES)
        assert set(identities_for("all")) == set(REGISTRY)
        with pytest.raises(ValueError):
            identities_for("nope")

    def test_build_tasks(self):
        tasks = build_tasks(["rfint"], seed=3)
        assert len(tasks) == 3 * 2 * 10
        ov = {"rfint": IdentityOverride(r=(2,), eps=(1,), draws=2, tolerance=1e-9, grid=64)}
        tasks = build_tasks(["rfint"], seed=3, overrides=ov)
        assert [(t.r, t.eps, t.grid, t.tolerance) for t in tasks] == [(2, 1, 64, 1e-9)] * 2
        with pytest.raises(ValueError):
            build_tasks(["unknown"], seed=3)

    def test_run_task_deterministic(self):
        task = build_tasks(["rfint"], seed=11, overrides={"rfint": IdentityOverride(r=(2,), eps=(0,), draws=1)})[0]
        a, b = run_task(task)[0], run_task(task)[0]
        assert a.passed and a.to_json(timing=False) == b.to_json(timing=False)
        assert a.tags["r"] == 2 and a.seed == 11

    def test_tolerance_scale(self):
        task = Task("rfint", 2, 0, 0, 5, tolerance_scale=1e-9)
        rep = run_task(task)[0]
        assert rep.tolerance == pytest.approx(TOL["rfint"] * 1e-9)

    def test_errors_become_reports(self):
        task = Task("rfint", 2, 0, 0, 5, sampler=SamplerConfig(resample_limit=1, t_mag_cap=0.01))
        rep = run_task(task)[0]
        assert rep.status == STATUS_ERROR and not rep.passed
        assert rep.tags["error"] == "SamplerExhaustedError"

    def test_summarize(self):
        reps = [IdentityReport.build("a", 1.0, 1.0, 1e-8), IdentityReport.build("a", 2.0, 1.0, 1e-8)]
        s = summarize(reps)["a"]
        assert (s["count"], s["passed"], s["worst"]) == (2, 1, 1.0)
        assert summarize([r.to_record() for r in reps]) == summarize(reps)
