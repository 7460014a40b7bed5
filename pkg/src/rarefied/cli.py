"""Command-line front end: ``rarefied eval``, ``rarefied verify`` and ``rarefied report``.

Complex numbers are written ``RE,IM`` (``0.2,-0.1``), ``MAG@PHASE`` with the
phase in radians (``0.2@0.5``) or as a plain real (``0.2``).

Exit codes: 0 success, 1 failed checks, 2 parse or input error, 3 pole
proximity, 4 no convergence.
"""

from __future__ import annotations

import argparse
import cmath
import configparser
import csv
import io
import json
import sys
import time
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import __version__
from .ellgamma import elliptic_gamma, elliptic_gamma2
from .errors import ConvergenceError, NonDecayError, PoleError, RarefiedError
from .evaluator import SumIntegralSpec, eval_lhs, eval_rhs, eval_V
from .kernels import BalancedParams, Kind
from .qseries import Bases, theta
from .quadrature import GridSpec
from .rargamma import gamma_lens, gamma_rarefied
from .verify.report import CONJECTURE, read_jsonl, write_jsonl
from .verify.sampler import SamplerConfig, make_rng, sample_balanced
from .verify.suites import REGISTRY, IdentityOverride, build_tasks, identities_for, run_campaign, summarize
from .verify.windows import sample_v8

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_POLE, EXIT_CONVERGENCE = 0, 1, 2, 3, 4


class ParseError(ValueError):
    pass


def parse_complex(text: str) -> complex:
    s = text.strip().replace(" ", "")
    try:
        if "@" in s:
            mag, ph = s.split("@")
            return cmath.rect(float(mag), float(ph))
        if "," in s:
            re_, im_ = s.split(",")
            return complex(float(re_), float(im_))
        return complex(float(s), 0.0)
    except ValueError as exc:
        raise ParseError(f"cannot parse complex number {text!r}") from exc


def parse_int_list(text: str) -> tuple:
    try:
        return tuple(int(v) for v in text.replace(" ", "").split(",") if v != "")
    except ValueError as exc:
        raise ParseError(f"cannot parse integer list {text!r}") from exc


def fmt_complex(z: complex) -> str:
    z = complex(z)
    return f"{z.real:.15g} {z.imag:+.15g}j"


# --------------------------------------------------------------------------
# eval


EVAL_FUNCTIONS = ("theta", "gamma", "gamma2", "gamma_lens", "gamma_rarefied", "V", "beta_lhs", "beta_rhs")


def _params_from(args, b: Bases, kind: Kind) -> BalancedParams:
    if args.params:
        with open(args.params) as fh:
            d = json.load(fh)
        return BalancedParams.from_dict(d)
    cfg = SamplerConfig(seed=args.seed)
    rng = make_rng(cfg, "eval", kind.value, b.r, args.eps)
    if kind is Kind.V8:
        return sample_v8(b, args.eps, cfg, rng)
    return sample_balanced(kind, 1, b.r, args.eps, cfg, b, rng)


def cmd_eval(args) -> int:
    z = parse_complex(args.z) if args.z is not None else None
    p, q = parse_complex(args.p), parse_complex(args.q)
    name = args.function
    if name in ("theta", "gamma", "gamma2", "gamma_lens", "gamma_rarefied") and z is None:
        raise ParseError(f"{name} needs --z")
    if name == "theta":
        val = theta(z, p)
    elif name == "gamma":
        val = elliptic_gamma(z, p, q)
    elif name == "gamma2":
        if args.t is None:
            raise ParseError("gamma2 needs --t")
        val = elliptic_gamma2(z, p, q, parse_complex(args.t))
    else:
        b = Bases(p, q, args.r)
        grid = GridSpec(args.grid, target_rel=1e-12)
        if name == "gamma_lens":
            val = gamma_lens(z, args.m, b)
        elif name == "gamma_rarefied":
            val = gamma_rarefied(z, args.m, b)
        elif name == "V":
            val = eval_V(_params_from(args, b, Kind.V8), b, grid).value
        elif name == "beta_lhs":
            val = eval_lhs(SumIntegralSpec(_params_from(args, b, Kind.BETA6), b, grid)).value
        else:
            val = eval_rhs(_params_from(args, b, Kind.BETA6), b)
    print(fmt_complex(val))
    return EXIT_OK


# --------------------------------------------------------------------------
# campaign configuration


@dataclass
class CampaignConfig:
    suite: str = "proven"
    seed: int = 20240601
    jobs: int = 1
    grid: int = 32
    tolerance_scale: float = 1.0
    output: str = "report.jsonl"
    identities: tuple = ()
    sampler: SamplerConfig = field(default_factory=SamplerConfig)
    overrides: dict = field(default_factory=dict)

    def identity_list(self) -> list:
        ids = list(self.identities) if self.identities else identities_for(self.suite)
        unknown = [i for i in ids if i not in REGISTRY]
        if unknown:
            raise ParseError(f"unknown identities: {', '.join(unknown)}")
        return ids


def _range(text: str) -> tuple:
    lo, hi = (float(v) for v in text.split(","))
    return (lo, hi)


def load_config(path: str | None) -> CampaignConfig:
    cfg = CampaignConfig()
    if path is None:
        return cfg
    cp = configparser.ConfigParser()
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ParseError(f"cannot read config {path!r}: {exc}") from exc
    try:
        if cp.has_section("campaign"):
            c = cp["campaign"]
            cfg.suite = c.get("suite", cfg.suite)
            cfg.seed = c.getint("seed", cfg.seed)
            cfg.jobs = c.getint("jobs", cfg.jobs)
            cfg.grid = c.getint("grid", cfg.grid)
            cfg.tolerance_scale = c.getfloat("tolerance_scale", cfg.tolerance_scale)
            cfg.output = c.get("output", cfg.output)
            ids = c.get("identities", "").replace(",", " ").split()
            cfg.identities = tuple(ids)
        if cp.has_section("sampler"):
            s = cp["sampler"]
            kw = {}
            if "p_mag_range" in s:
                kw["p_mag_range"] = _range(s["p_mag_range"])
            if "q_mag_range" in s:
                kw["q_mag_range"] = _range(s["q_mag_range"])
            if "t_mag_cap" in s:
                kw["t_mag_cap"] = s.getfloat("t_mag_cap")
            if "n_abs_cap" in s and s["n_abs_cap"].strip().lower() not in ("", "none"):
                kw["n_abs_cap"] = s.getint("n_abs_cap")
            if "resample_limit" in s:
                kw["resample_limit"] = s.getint("resample_limit")
            cfg.sampler = replace(cfg.sampler, **kw)
        for sec in cp.sections():
            if not sec.startswith("identity:"):
                continue
            ident = sec.split(":", 1)[1].strip()
            if ident not in REGISTRY:
                raise ParseError(f"config section for unknown identity {ident!r}")
            o = cp[sec]
            cfg.overrides[ident] = IdentityOverride(
                r=parse_int_list(o["r"]) if "r" in o else None,
                eps=parse_int_list(o["eps"]) if "eps" in o else None,
                draws=o.getint("draws") if "draws" in o else None,
                tolerance=o.getfloat("tolerance") if "tolerance" in o else None,
                grid=o.getint("grid") if "grid" in o else None,
            )
    except ValueError as exc:
        raise ParseError(f"bad value in config {path!r}: {exc}") from exc
    return cfg


def dump_config(cfg: CampaignConfig) -> str:
    cp = configparser.ConfigParser()
    cp["campaign"] = {
        "suite": cfg.suite,
        "seed": str(cfg.seed),
        "jobs": str(cfg.jobs),
        "grid": str(cfg.grid),
        "tolerance_scale": repr(cfg.tolerance_scale),
        "output": cfg.output,
        "identities": " ".join(cfg.identities),
    }
    s = cfg.sampler
    cp["sampler"] = {
        "p_mag_range": f"{s.p_mag_range[0]!r},{s.p_mag_range[1]!r}",
        "q_mag_range": f"{s.q_mag_range[0]!r},{s.q_mag_range[1]!r}",
        "t_mag_cap": repr(s.t_mag_cap),
        "n_abs_cap": "none" if s.n_abs_cap is None else str(s.n_abs_cap),
        "resample_limit": str(s.resample_limit),
    }
    for ident, o in sorted(cfg.overrides.items()):
        sec = {}
        for k, v in asdict(o).items():
            if v is None:
                continue
            sec[k] = ",".join(str(x) for x in v) if isinstance(v, tuple) else repr(v) if isinstance(v, float) else str(v)
        cp[f"identity:{ident}"] = sec
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


def _apply_flags(cfg: CampaignConfig, args) -> CampaignConfig:
    for name in ("suite", "seed", "jobs", "grid", "tolerance_scale", "output"):
        v = getattr(args, name, None)
        if v is not None:
            setattr(cfg, name, v)
    if cfg.grid < 8 or cfg.grid & (cfg.grid - 1):
        raise ParseError("--grid must be a power of two and at least 8")
    if cfg.jobs < 1:
        raise ParseError("--jobs must be positive")
    if not cfg.tolerance_scale > 0:
        raise ParseError("--tolerance-scale must be positive")
    return cfg


def cmd_verify(args) -> int:
    cfg = _apply_flags(load_config(args.config), args)
    if args.dump_config:
        sys.stdout.write(dump_config(cfg))
        return EXIT_OK
    tasks = build_tasks(cfg.identity_list(), cfg.seed, cfg.sampler.with_seed(cfg.seed), cfg.grid, cfg.tolerance_scale, cfg.overrides)
    reports = []
    t0 = time.perf_counter()
    with open(cfg.output, "w") as fh:
        try:
            for rep in run_campaign(tasks, cfg.jobs):
                write_jsonl([rep], fh, timing=not args.no_timing)
                reports.append(rep)
        except KeyboardInterrupt:
            print(f"interrupted after {len(reports)} reports; partial report in {cfg.output}", file=sys.stderr)
            return EXIT_FAIL
    summary = summarize(reports)
    print(f"{'identity':24s} {'label':22s} {'pass':>9s} {'worst rel_dev':>14s}")
    for ident, s in summary.items():
        print(f"{ident:24s} {s['label']:22s} {s['passed']:4d}/{s['count']:<4d} {s['worst']:14.3e}")
    failed = [r for r in reports if not r.passed]
    for r in failed:
        print(f"FAIL {r.identity_id} rel_dev={r.rel_dev:.3e} tol={r.tolerance:.1e} {r.message} params={json.dumps(r.params)}", file=sys.stderr)
    print(f"{len(reports)} reports, {len(failed)} failed, {time.perf_counter() - t0:.1f} s -> {cfg.output}")
    gating = [r for r in failed if r.label != CONJECTURE or cfg.suite == "conjectures"]
    return EXIT_FAIL if gating else EXIT_OK


# --------------------------------------------------------------------------
# report


def report_matrix(records: list) -> list:
    """Rows (identity_id, r, eps, passed, count, worst rel_dev) sorted by identity then (r, eps)."""
    cells: dict = {}
    for rec in records:
        tags = rec.get("tags") or {}
        key = (rec["identity_id"], tags.get("r"), tags.get("eps"))
        c = cells.setdefault(key, [0, 0, 0.0])
        c[0] += int(bool(rec["pass"]))
        c[1] += 1
        dev = rec.get("rel_dev")
        c[2] = float("inf") if dev is None else max(c[2], dev)
    order = sorted(cells, key=lambda k: (k[0], -1 if k[1] is None else k[1], -1 if k[2] is None else k[2]))
    return [(k[0], k[1], k[2], *cells[k]) for k in order]


def cmd_report(args) -> int:
    try:
        with open(args.report) as fh:
            records = read_jsonl(fh)
    except OSError as exc:
        raise ParseError(f"cannot read report {args.report!r}: {exc}") from exc
    except ValueError as exc:
        raise ParseError(f"malformed report: {exc}") from exc
    rows = report_matrix(records)
    if rows:
        print(f"{'identity':24s} {'r':>3s} {'eps':>3s} {'pass':>9s} {'worst rel_dev':>14s}")
    for ident, r, e, ok, n, worst in rows:
        print(f"{ident:24s} {str(r):>3s} {str(e):>3s} {ok:4d}/{n:<4d} {worst:14.3e}")
    total = len(records)
    passed = sum(1 for rec in records if rec["pass"])
    print(f"total {total} records, {passed} passed, {total - passed} failed")
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["identity_id", "r", "eps", "grid_used", "rel_dev", "pass"])
            for rec in records:
                tags = rec.get("tags") or {}
                w.writerow([rec["identity_id"], tags.get("r"), tags.get("eps"), rec.get("grid_used"), rec.get("rel_dev"), int(bool(rec["pass"]))])
    return EXIT_OK


# --------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_PARSE)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="rarefied", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    e = sub.add_parser("eval", help="evaluate a special function or a sum-integral")
    e.add_argument("function", choices=EVAL_FUNCTIONS)
    e.add_argument("--z", help="argument z")
    e.add_argument("--m", type=int, default=0, help="discrete argument")
    e.add_argument("--p", default="0.2", help="base p")
    e.add_argument("--q", default="0.15", help="base q")
    e.add_argument("--t", help="third base for gamma2")
    e.add_argument("--r", type=int, default=1, help="rarefaction order")
    e.add_argument("--eps", type=int, default=0, choices=(0, 1))
    e.add_argument("--seed", type=int, default=20240601, help="seed for a sampled parameter set (V, beta_*)")
    e.add_argument("--params", help="JSON file with a BalancedParams record (V, beta_*)")
    e.add_argument("--grid", type=int, default=32, help="starting points per dimension")
    e.set_defaults(func=cmd_eval)

    v = sub.add_parser("verify", help="run a verification campaign")
    v.add_argument("config", nargs="?", help="INI campaign file")
    v.add_argument("--suite", choices=("proven", "conjectures", "limits", "all"))
    v.add_argument("--seed", type=int)
    v.add_argument("--jobs", type=int)
    v.add_argument("--grid", type=int, help="starting points per dimension (power of two)")
    v.add_argument("--tolerance-scale", dest="tolerance_scale", type=float)
    v.add_argument("--output", "-o", help="JSON-lines report path")
    v.add_argument("--no-timing", action="store_true", help="omit wall times so reports are byte-identical across runs")
    v.add_argument("--dump-config", action="store_true", help="print the effective campaign config and exit")
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("report", help="digest a JSON-lines report")
    r.add_argument("report")
    r.add_argument("--csv", help="write rel_dev against grid size to this CSV file")
    r.set_defaults(func=cmd_report)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except PoleError as exc:
        print(f"pole: {exc}", file=sys.stderr)
        return EXIT_POLE
    except (ConvergenceError, NonDecayError) as exc:
        print(f"no convergence: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except RarefiedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
