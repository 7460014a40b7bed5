"""Verification layer: samplers, identity checks, property suites and campaigns."""

from .checks import TOL
from .report import CONJECTURE, PROVED, IdentityReport, read_jsonl, write_jsonl
from .sampler import SamplerConfig, make_rng, sample_balanced, sample_bases
from .suites import REGISTRY, build_tasks, identities_for, run_campaign, run_task, summarize

__all__ = [
    "TOL",
    "CONJECTURE",
    "PROVED",
    "IdentityReport",
    "read_jsonl",
    "write_jsonl",
    "SamplerConfig",
    "make_rng",
    "sample_balanced",
    "sample_bases",
    "REGISTRY",
    "build_tasks",
    "identities_for",
    "run_campaign",
    "run_task",
    "summarize",
]
