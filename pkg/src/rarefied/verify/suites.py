"""Identity registry, campaign construction and the parallel runner.

A campaign is a flat, deterministically ordered list of :class:`Task`
values.  Each task draws its own bases and parameters from a generator keyed
by (seed, identity, r, eps, draw), so results do not depend on scheduling.
Workers return reports; the caller owns the single writer and receives them
in task order.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Iterator

import numpy as np

from ..errors import ConvergenceError, PoleError, RarefiedError
from ..kernels import Kind
from ..quadrature import GridSpec
from . import checks as C
from . import windows as W
from .report import CONJECTURE, PROVED, STATUS_ERROR, IdentityReport
from .sampler import SamplerConfig, make_rng, sample_balanced, sample_bases

SUITES = ("proven", "limits", "conjectures")


@dataclass(frozen=True)
class Task:
    identity_id: str
    r: int
    eps: int
    draw: int
    seed: int
    grid: int = 32
    tolerance_scale: float = 1.0
    tolerance: float | None = None
    sampler: SamplerConfig = field(default_factory=SamplerConfig)


@dataclass(frozen=True)
class IdentitySpec:
    identity_id: str
    suite: str
    r: tuple
    eps: tuple
    draws: int
    run: Callable[[Task, np.random.Generator, GridSpec], list]
    description: str = ""


# --------------------------------------------------------------------------
# per-identity runners: (task, rng, grid) -> list of reports


def _scaled(rep: IdentityReport, task: Task) -> IdentityReport:
    if task.tolerance is not None:
        rep.tolerance = task.tolerance
    rep.tolerance *= task.tolerance_scale
    return rep


def _bases(task, rng, real=False):
    return sample_bases(task.r, task.sampler, rng, real)


def _run_beta_classical(task, rng, grid):
    cfg = replace(task.sampler, p_mag_range=(0.05, 0.2), q_mag_range=(0.05, 0.2), t_mag_cap=0.8)
    b = sample_bases(1, cfg, rng)
    P = sample_balanced(Kind.BETA6, 1, 1, 0, cfg, b, rng)
    return [C.check_rfint(P, b, grid)]


def _run_rfint(task, rng, grid):
    b = _bases(task, rng)
    P = sample_balanced(Kind.BETA6, 1, task.r, task.eps, task.sampler, b, rng)
    return [C.check_rfint(P, b, grid, tol=C.TOL["rfint"], identity_id="rfint")]


def _run_typeI(rank):
    def run(task, rng, grid):
        b = _bases(task, rng)
        return [C.check_typeI_Cn(sample_balanced(Kind.TYPEI_CN, rank, task.r, task.eps, task.sampler, b, rng), b, grid)]

    return run


def _run_typeII(rank):
    def run(task, rng, grid):
        b = _bases(task, rng)
        return [C.check_typeII_Cn(sample_balanced(Kind.TYPEII_CN, rank, task.r, task.eps, task.sampler, b, rng), b, grid)]

    return run


def _run_E7(which):
    def run(task, rng, grid):
        b = _bases(task, rng)
        return [C.check_E7(W.sample_v8(b, task.eps, task.sampler, rng), b, grid, which)]

    return run


def _run_contiguous(task, rng, grid):
    b = _bases(task, rng)
    return [C.check_contiguous(W.sample_v8_shifted(b, task.eps, task.sampler, rng), b, grid)]


def _run_reheq(mode):
    def run(task, rng, grid):
        b = W.reheq_bases(task.r, rng)
        P = W.sample_reheq(b, task.eps, task.sampler, rng, even_pair=mode == "sym")
        if mode == "sym":
            return [C.check_reheq_sym(P, b, grid)]
        return [C.check_reheq(P, b, grid, partner=mode == "partner")]

    return run


def _run_operator(kind):
    def run(task, rng, grid):
        b = W.operator_bases(task.r, rng)
        P = W.sample_operator(b, task.sampler, rng)
        if kind == "null":
            return [C.check_operator_null(P, b)]
        return [C.check_operator_symmetry(P, b, grid)]

    return run


def _limit_t(rng, count=5):
    return [rng.uniform(0.2, 0.8) * np.exp(2j * np.pi * rng.random()) for _ in range(count)]


def _run_rahman(task, rng, grid):
    b = _bases(task, rng)
    return [C.check_rahman(_limit_t(rng), b, grid)]


def _run_qbeta_asym(flip):
    def run(task, rng, grid):
        b = _bases(task, rng)
        return [C.check_qbeta_asym(_limit_t(rng), b, flip, grid)]

    return run


def _run_mellin_barnes(flip):
    def run(task, rng, grid):
        return [C.check_mellin_barnes(list(rng.uniform(0.2, 0.6, 5)), task.r, flip)]

    return run


def _run_small_p(task, rng, grid):
    q = rng.uniform(0.2, 0.35) * np.exp(2j * np.pi * rng.random())
    z = rng.uniform(0.4, 0.8) * np.exp(2j * np.pi * rng.random())
    return [C.check_small_p_rate(z, m, q, task.r) for m in range(-task.r + 1, task.r + 1)]


def _run_cm(task, rng, grid):
    t5 = [rng.uniform(0.4, 0.6) * np.exp(1j * rng.uniform(-np.pi, np.pi)) for _ in range(5)]
    q = rng.uniform(0.25, 0.35)
    return [C.check_cm_scaling(m, t5, q, task.r, grid=grid) for m in (0, 1)]


def _run_cdcm(rank, level):
    def run(task, rng, grid):
        b = _bases(task, rng)
        return [C.check_conjectures("CdCm", W.sample_cdcm(b, rank, level, task.eps, task.sampler, rng), b, grid)]

    return run


def _run_anam(rank, level):
    def run(task, rng, grid):
        b = _bases(task, rng)
        return [C.check_conjectures("AnAm", W.sample_an(b, rank, level, task.eps, task.sampler, rng), b, grid)]

    return run


def _run_typeII_cd(rank):
    def run(task, rng, grid):
        b = _bases(task, rng)
        return [C.check_conjectures("TypeII_Cd", W.sample_typeII_cd(b, rank, task.eps, task.sampler, rng), b, grid)]

    return run


def _run_vs_E7(which):
    def run(task, rng, grid):
        b = _bases(task, rng)
        return [C.check_conjecture_vs_E7(which, W.sample_v8(b, task.eps, task.sampler, rng), b, grid)]

    return run


_R12, _E01 = (1, 2), (0, 1)

REGISTRY = {
    s.identity_id: s
    for s in (
        IdentitySpec("beta_classical", "proven", (1,), (0,), 20, _run_beta_classical, "classical elliptic beta integral"),
        IdentitySpec("rfint", "proven", (1, 2, 3), _E01, 10, _run_rfint, "rarefied elliptic beta integral"),
        IdentitySpec("typeI_Cn_rank1", "proven", _R12, _E01, 2, _run_typeI(1), "type I C_1"),
        IdentitySpec("typeI_Cn_rank2", "proven", (2,), _E01, 3, _run_typeI(2), "type I C_2"),
        IdentitySpec("typeII_Cn_d1", "proven", _R12, _E01, 2, _run_typeII(1), "type II C_1"),
        IdentitySpec("typeII_Cn_d2", "proven", (2,), _E01, 3, _run_typeII(2), "type II C_2"),
        IdentitySpec("E7_1", "proven", _R12, _E01, 3, _run_E7(1), "first V-function transformation"),
        IdentitySpec("E7_2", "proven", _R12, _E01, 3, _run_E7(2), "second V-function transformation"),
        IdentitySpec("E7_3", "proven", _R12, _E01, 3, _run_E7(3), "third V-function transformation"),
        IdentitySpec("contiguous", "proven", _R12, (0,), 10, _run_contiguous, "three-term contiguous relation"),
        IdentitySpec("reheq", "proven", _R12, (0,), 10, _run_reheq("plain"), "difference equation"),
        IdentitySpec("reheq_partner", "proven", _R12, (0,), 10, _run_reheq("partner"), "p <-> q partner equation"),
        IdentitySpec("reheq_sym", "proven", _R12, (0,), 10, _run_reheq("sym"), "symmetric form"),
        IdentitySpec("operator_null", "proven", _R12, (0,), 3, _run_operator("null"), "D 1 = 0"),
        IdentitySpec("operator_symmetry", "proven", _R12, (0,), 3, _run_operator("sym"), "<f, Dg> = <Df, g>"),
        IdentitySpec("rahman", "limits", (2, 3), (0,), 3, _run_rahman, "Rahman integral at base q^r"),
        IdentitySpec("qbeta_asym", "limits", (2, 3), (0,), 3, _run_qbeta_asym(False), "asymmetric q-beta integral"),
        IdentitySpec("qbeta_asym_flip", "limits", (2, 3), (0,), 3, _run_qbeta_asym(True), "asymmetric q-beta integral, flipped"),
        IdentitySpec("mellin_barnes", "limits", (2, 3), (0,), 3, _run_mellin_barnes(False), "Mellin-Barnes evaluation"),
        IdentitySpec("mellin_barnes_flip", "limits", (2, 3), (0,), 3, _run_mellin_barnes(True), "Mellin-Barnes evaluation, flipped"),
        IdentitySpec("small_p_rate", "limits", (2, 3), (0,), 1, _run_small_p, "O(p) approach to the small-p form"),
        IdentitySpec("cm_scaling", "limits", (3,), (1,), 1, _run_cm, "c_m ~ p^{m+3/4}"),
        IdentitySpec("CdCm_1_1", "conjectures", (2,), _E01, 1, _run_cdcm(1, 1), "C_1 <-> C_1"),
        IdentitySpec("CdCm_2_1", "conjectures", (2,), _E01, 1, _run_cdcm(2, 1), "C_2 <-> C_1"),
        IdentitySpec("CdCm_1_2", "conjectures", (2,), _E01, 1, _run_cdcm(1, 2), "C_1 <-> C_2"),
        IdentitySpec("AnAm_1_1", "conjectures", (2,), _E01, 1, _run_anam(1, 1), "A_1 <-> A_1"),
        IdentitySpec("AnAm_2_1", "conjectures", (2,), (0, 1, 2), 1, _run_anam(2, 1), "A_2 <-> A_1"),
        IdentitySpec("AnAm_1_2", "conjectures", (2,), _E01, 1, _run_anam(1, 2), "A_1 <-> A_2"),
        IdentitySpec("typeII_Cd_1", "conjectures", (2,), _E01, 1, _run_typeII_cd(1), "type II C_1 transformation"),
        IdentitySpec("typeII_Cd_2", "conjectures", (2,), _E01, 1, _run_typeII_cd(2), "type II C_2 transformation"),
        IdentitySpec("CdCm_1_1_vs_E7_3", "conjectures", _R12, _E01, 1, _run_vs_E7("CdCm"), "C_1 <-> C_1 against E7_3"),
        IdentitySpec("AnAm_1_1_vs_E7_2", "conjectures", _R12, _E01, 1, _run_vs_E7("AnAm"), "A_1 <-> A_1 against E7_2"),
        IdentitySpec("typeII_Cd_1_vs_E7_1", "conjectures", _R12, _E01, 1, _run_vs_E7("TypeII_Cd"), "type II d=1 against E7_1"),
    )
}


def identities_for(suite: str) -> list:
    if suite == "all":
        return list(REGISTRY)
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}")
    return [k for k, s in REGISTRY.items() if s.suite == suite]


# --------------------------------------------------------------------------
# campaigns


@dataclass(frozen=True)
class IdentityOverride:
    r: tuple | None = None
    eps: tuple | None = None
    draws: int | None = None
    tolerance: float | None = None
    grid: int | None = None


def build_tasks(
    identities: Iterable[str],
    seed: int,
    sampler: SamplerConfig = SamplerConfig(),
    grid: int = 32,
    tolerance_scale: float = 1.0,
    overrides: dict | None = None,
) -> list:
    overrides = overrides or {}
    tasks = []
    for ident in identities:
        if ident not in REGISTRY:
            raise ValueError(f"unknown identity {ident!r}")
        spec = REGISTRY[ident]
        ov = overrides.get(ident, IdentityOverride())
        for r in ov.r or spec.r:
            for eps in ov.eps if ov.eps is not None else spec.eps:
                for d in range(ov.draws if ov.draws is not None else spec.draws):
                    tasks.append(Task(ident, int(r), int(eps), d, int(seed), ov.grid or grid, tolerance_scale, ov.tolerance, sampler.with_seed(seed)))
    return tasks


def run_task(task: Task) -> list:
    """Run one task; library errors become error-status reports instead of exceptions."""
    spec = REGISTRY[task.identity_id]
    rng = make_rng(task.sampler, task.identity_id, task.r, task.eps, task.draw)
    grid = GridSpec(task.grid, target_rel=1e-12)
    label = CONJECTURE if spec.suite == "conjectures" else PROVED
    t0 = time.perf_counter()
    tags = {"r": task.r, "eps": task.eps, "draw": task.draw}
    try:
        reports = spec.run(task, rng, grid)
    except RarefiedError as exc:
        kind = "pole" if isinstance(exc, PoleError) else "no-convergence" if isinstance(exc, ConvergenceError) else type(exc).__name__
        rep = IdentityReport(task.identity_id, 0j, 0j, math.nan, 0.0, label=label, status=STATUS_ERROR,
                             message=f"{kind}: {exc}", seed=task.seed, wall_time=time.perf_counter() - t0, tags=dict(tags, error=kind))
        return [rep]
    for rep in reports:
        _scaled(rep, task)
        rep.seed = task.seed
        rep.label = label
        rep.tags = dict(tags, **rep.tags)
    return reports


def run_campaign(tasks: list, jobs: int = 1) -> Iterator[IdentityReport]:
    """Yield reports in task order; ``jobs > 1`` evaluates tasks in worker processes."""
    if jobs <= 1:
        for t in tasks:
            yield from run_task(t)
        return
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        for reps in pool.map(run_task, tasks):
            yield from reps


def summarize(reports: Iterable) -> dict:
    """identity_id -> {count, passed, worst rel_dev} from reports or JSON records."""
    out: dict = {}
    for rep in reports:
        rec = rep.to_record(False) if isinstance(rep, IdentityReport) else rep
        s = out.setdefault(rec["identity_id"], {"count": 0, "passed": 0, "worst": 0.0, "label": rec.get("label", PROVED)})
        s["count"] += 1
        s["passed"] += int(bool(rec["pass"]))
        dev = rec.get("rel_dev")
        s["worst"] = math.inf if dev is None else max(s["worst"], dev)
    return out


__all__ = [
    "Task",
    "IdentitySpec",
    "IdentityOverride",
    "REGISTRY",
    "SUITES",
    "identities_for",
    "build_tasks",
    "run_task",
    "run_campaign",
    "summarize",
]
