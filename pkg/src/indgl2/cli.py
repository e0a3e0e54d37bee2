"""Batch verification driver.

`indgl2 verify` loads one configuration (file or preset), runs the selected
check suites, and emits a deterministic report: text (one line per check) or
a single JSON document with stable key order.  Exit codes: 0 all checks pass,
1 at least one failure, 2 configuration or usage error.

Config files are flat `key = value` lines; values are JSON literals (bare
strings allowed), field elements are coordinate lists over the prime field.
"""

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from time import perf_counter

import numpy as np

from . import __version__, analysis
from .errors import ConfigError, LevelZeroInput
from .gf import is_prime, sum_over_field
from .induction import (
    InducedElem,
    alpha_act,
    hecke_T,
    hecke_T_minus,
    hecke_T_plus,
    singleton,
    u_act,
)
from .localring import RingElem, digits, from_digits, residue, teichmuller, witt_carry, witt_carry_closed_form

SUITES = ("arith", "hecke", "mainlemma", "negative", "truncation")

PRESETS = {
    "ramified-r1": {"p": 3, "f": 1, "e": 2, "r": [1]},
    "ramified-r0": {"p": 3, "f": 1, "e": 2, "r": [0]},
    "unramified-generic": {"p": 3, "f": 2, "e": 1, "r": [0, 0]},
    "unramified-maximal": {"p": 2, "f": 2, "e": 1, "r": [1, 1]},
    "unramified-stretch": {"p": 3, "f": 2, "e": 1, "r": [2, 2], "N_max": 1},
}

_CONFIG_KEYS = {
    "p", "f", "e", "m", "r", "chi", "nu", "E", "N", "N_max",
    "suites", "seed", "out", "inject_failure",
}


@dataclass
class Config:
    p: int
    f: int
    e: int
    r: list
    m: int = 1
    chi: int = 0
    nu: list | None = None
    E: list | None = None
    N: int | None = None
    N_max: int = 2
    suites: list = dc_field(default_factory=lambda: list(SUITES))
    seed: int = 0
    out: str | None = None
    inject_failure: bool = False

    def validate(self, where: str = "<config>"):
        def bad(msg):
            raise ConfigError(msg, location=where)

        if not isinstance(self.p, int) or not is_prime(self.p):
            bad(f"p must be prime, got {self.p!r}")
        if not isinstance(self.f, int) or self.f < 1:
            bad(f"f must be a positive integer, got {self.f!r}")
        if not isinstance(self.e, int) or self.e < 1:
            bad(f"e must be a positive integer, got {self.e!r}")
        if not isinstance(self.m, int) or self.m < 1:
            bad(f"m must be a positive integer, got {self.m!r}")
        if not isinstance(self.r, (list, tuple)) or len(self.r) != self.f:
            bad(f"r must list {self.f} weight exponents, got {self.r!r}")
        if any(not isinstance(x, int) or not 0 <= x <= self.p - 1 for x in self.r):
            bad(f"weight exponents must lie in [0, {self.p - 1}]")
        if self.nu is not None and (
            not isinstance(self.nu, (list, tuple)) or not all(isinstance(x, int) for x in self.nu)
        ):
            bad("nu must be a coordinate list over the prime field")
        if not isinstance(self.N_max, int) or self.N_max < 0:
            bad(f"N_max must be a non-negative integer, got {self.N_max!r}")
        if self.N is not None and (not isinstance(self.N, int) or self.N < 2):
            bad(f"N must be an integer >= 2, got {self.N!r}")
        for s in self.suites:
            if s not in SUITES:
                bad(f"unknown suite {s!r}; valid: {', '.join(SUITES)}")
        if not isinstance(self.seed, int):
            bad(f"seed must be an integer, got {self.seed!r}")
        return self

    def effective_precision(self) -> int:
        auto = max(2 * self.N_max + 2, 6)
        return self.N if self.N is not None else auto

    def build(self) -> analysis.InductionCtx:
        try:
            ctx = analysis.build_ctx(
                self.p, self.f, self.e, tuple(self.r),
                chi_c=self.chi, nu_code=None, E=self.E,
                N=self.effective_precision(), m=self.m,
            )
            if self.nu is not None:
                kk = ctx.weight.field.kk
                code = kk.code_of(self.nu)
                from .weight import WeightCtx

                w = WeightCtx(ctx.weight.field, tuple(self.r), chi_c=self.chi, nu=kk.elem(code))
                ctx = analysis.InductionCtx(w, ctx.ring)
            return ctx
        except ConfigError:
            raise
        except (ValueError, ZeroDivisionError) as ex:
            raise ConfigError(str(ex), location="<config>") from ex

    def to_dict(self) -> dict:
        return {
            "p": self.p, "f": self.f, "e": self.e, "m": self.m,
            "r": list(self.r), "chi": self.chi,
            "nu": list(self.nu) if self.nu is not None else None,
            "E": self.E, "N": self.effective_precision(), "N_max": self.N_max,
            "suites": list(self.suites), "seed": self.seed,
            "inject_failure": self.inject_failure,
        }


def parse_config_text(text: str, where: str = "<config>") -> dict:
    """Flat key = value lines; values are JSON literals, bare words pass as strings."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if " #" in line:
            line = line.split(" #", 1)[0].rstrip()
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw!r}", location=f"{where}:{lineno}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"unknown key {key!r}", location=f"{where}:{lineno}")
        if key in out:
            raise ConfigError(f"duplicate key {key!r}", location=f"{where}:{lineno}")
        try:
            out[key] = json.loads(value)
        except json.JSONDecodeError:
            out[key] = value
    return out


def config_from_mapping(mapping: dict, where: str = "<config>") -> Config:
    unknown = set(mapping) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown keys {sorted(unknown)}", location=where)
    missing = {"p", "f", "e", "r"} - set(mapping)
    if missing:
        raise ConfigError(f"missing required keys {sorted(missing)}", location=where)
    if "suites" in mapping and isinstance(mapping["suites"], str):
        parts = [s.strip() for s in mapping["suites"].split(",")]
        mapping = {**mapping, "suites": [s for s in parts if s]}
    return Config(**mapping).validate(where)


def config_from_file(path: str) -> Config:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as ex:
        raise ConfigError(str(ex), location=path) from ex
    return config_from_mapping(parse_config_text(text, where=path), where=path)


def config_from_preset(name: str) -> Config:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; valid: {', '.join(sorted(PRESETS))}", location="--preset")
    return config_from_mapping(dict(PRESETS[name]), where=f"preset:{name}")


@dataclass
class CheckRecord:
    name: str
    status: str  # pass | fail | skipped | assumed
    dims: dict = dc_field(default_factory=dict)
    seconds: float = 0.0
    detail: str | None = None

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "status": self.status,
            "dims": self.dims,
            "seconds": self.seconds,
            "detail": self.detail,
        }


@dataclass
class Report:
    version: str
    config: dict
    records: list
    verdict: str

    def to_dict(self) -> dict:
        return {
            "version": self.version,
            "config": self.config,
            "records": [r.to_dict() for r in self.records],
            "verdict": self.verdict,
        }


# -- suites --


def _random_element(ctx, rng, levels) -> InducedElem:
    terms = {}
    for _ in range(rng.integers(1, 4)):
        n = int(rng.choice(levels))
        mu = tuple(int(v) for v in rng.integers(0, ctx.q, size=n))
        vec = rng.integers(0, ctx.weight.field.kk.order, size=ctx.D).astype(np.int32)
        if vec.any():
            terms[(n, mu)] = vec
    return InducedElem(ctx, terms)


def _random_ring(ctx, rng) -> RingElem:
    ring = ctx.ring
    vec = rng.integers(0, ring.pM, size=(ring.e, ring.f)).astype(np.int64)
    return RingElem(ring, vec, ring.N)


def _suite_arith(ctx, cfg, rng):
    field = ctx.weight.field
    fq, kk = field.fq, field.kk
    ring = ctx.ring
    recs = []

    ok = True
    minus_one = int(kk.NEG[1])
    for k in range(field.q):
        s = sum_over_field([fq.zero] * k + [fq.one], field)
        want = minus_one if k == field.q - 1 else 0
        ok = ok and s.code == want
    recs.append(CheckRecord("arith:field-sum", "pass" if ok else "fail", {"monomials": field.q}))

    ok = True
    pairs = 0
    for a in field.enumerate_field("Fq"):
        for b in field.enumerate_field("Fq"):
            d = witt_carry(a, b, ring)
            ok = ok and d.codes[0] == (a + b).code
            if ring.e == 1:
                ok = ok and d.codes[1] == witt_carry_closed_form(a, b, ring).code
            else:
                ok = ok and all(c == 0 for c in d.codes[1:ring.e])
            pairs += 1
    recs.append(CheckRecord("arith:witt-carry", "pass" if ok else "fail", {"pairs": pairs}))

    ok = True
    for a in field.enumerate_field("Fq"):
        ta = teichmuller(a, ring)
        ok = ok and ta**field.q == ta and residue(ta) == a
        for b in field.enumerate_field("Fq"):
            ok = ok and ta * teichmuller(b, ring) == teichmuller(a * b, ring)
    recs.append(CheckRecord("arith:teichmuller", "pass" if ok else "fail", {"elements": field.q}))

    ok = True
    depth = min(3, ring.N)
    for _ in range(30):
        x = _random_ring(ctx, rng)
        d = digits(x, depth)
        ok = ok and from_digits(d).at_precision(depth) == x.at_precision(depth)
    recs.append(CheckRecord("arith:digit-roundtrip", "pass" if ok else "fail", {"samples": 30, "depth": depth}))
    return recs


def _suite_hecke(ctx, cfg, rng):
    recs = []
    levels = [n for n in (1, 2) if n + 1 <= ctx.max_level()] or [1]

    ok = True
    for _ in range(40):
        x = _random_element(ctx, rng, levels)
        ok = ok and hecke_T(x) == hecke_T_plus(x) + hecke_T_minus(x)
    recs.append(CheckRecord("hecke:composite", "pass" if ok else "fail", {"samples": 40}))

    ok = True
    for _ in range(40):
        x = _random_element(ctx, rng, levels)
        c = _random_ring(ctx, rng)
        ok = ok and u_act(c, hecke_T(x)) == hecke_T(u_act(c, x))
    recs.append(CheckRecord("hecke:u-equivariance", "pass" if ok else "fail", {"samples": 40}))

    ok = True
    checked = 0
    for n in range(min(3, ctx.max_level())):
        pi_pow = ctx.ring.uniformizer() ** (n + 1)
        for _ in range(5):
            c = pi_pow * _random_ring(ctx, rng)
            mu = tuple(int(v) for v in rng.integers(0, ctx.q, size=n))
            x = singleton(ctx, n, mu, int(rng.integers(0, ctx.D)))
            ok = ok and u_act(c, x) == x
            checked += 1
    recs.append(CheckRecord("hecke:depth-triviality", "pass" if ok else "fail", {"samples": checked}))

    ok = True
    for _ in range(30):
        x = _random_element(ctx, rng, [n for n in levels if n + 1 <= ctx.max_level() - 1] or [1])
        c = _random_ring(ctx, rng)
        ok = ok and u_act(ctx.ring.uniformizer() * c, alpha_act(x)) == alpha_act(u_act(c, x))
    recs.append(CheckRecord("hecke:alpha-intertwine", "pass" if ok else "fail", {"samples": 30}))

    k1, method = analysis.tplus_kernel_dim(ctx, 1)
    recs.append(
        CheckRecord(
            "hecke:tplus-kernel-R1",
            "pass" if k1 == 0 else "fail",
            {"kernel_dim": k1},
            detail=f"method={method}",
        )
    )

    try:
        hecke_T(singleton(ctx, 0, (), 0))
        recs.append(CheckRecord("hecke:level-zero-guard", "fail", detail="level-0 input was accepted"))
    except LevelZeroInput:
        recs.append(CheckRecord("hecke:level-zero-guard", "pass"))
    return recs


def _suite_mainlemma(ctx, cfg, rng):
    rep = analysis.main_lemma_report(ctx)
    recs = []
    dims = dict(rep.dims)
    if rep.case == analysis.CASE_SEARCH_ONLY:
        recs.append(CheckRecord("mainlemma:witness", "skipped", dims, detail="no construction case; see the negative suite"))
        recs.append(CheckRecord("mainlemma:certificate", "skipped"))
    else:
        ok = rep.found and all(rep.checks.values())
        detail = f"case={rep.case}" + (f" j0={rep.j0}" if rep.j0 is not None else "")
        recs.append(CheckRecord("mainlemma:witness", "pass" if ok else "fail", dims, detail=detail))
        recs.append(
            CheckRecord(
                "mainlemma:certificate",
                "pass" if rep.certificate else "fail",
                {"block_rank": analysis.tplus_block_rank(ctx), "D": ctx.D},
            )
        )
        recs.append(
            CheckRecord(
                "mainlemma:tplus-injectivity-beyond-R3",
                "assumed",
                detail=rep.certificate_detail.get("higher-levels", ""),
            )
        )
    return recs


def _suite_negative(ctx, cfg, rng):
    rows = analysis.negative_control(cfg.p)
    ok = all(not row["found"] for row in rows)
    return [CheckRecord("negative:exhaustive-base-field", "pass" if ok else "fail", {"weights": len(rows)})]


def _suite_truncation(ctx, cfg, rng):
    recs = []
    case = analysis.select_case(ctx)
    main = analysis.main_lemma_report(ctx) if case != analysis.CASE_SEARCH_ONLY else None
    prev = None
    seq = []
    for N in range(1, cfg.N_max + 1):
        try:
            rep = analysis.truncated_L(ctx, N, main=main, prev=prev)
        except Exception as ex:
            recs.append(CheckRecord(f"truncation:N={N}", "fail", detail=f"{type(ex).__name__}: {ex}"))
            continue
        ok = (
            rep.dim_ln == rep.dim_ie - rep.dim_t_io
            and all(rep.tminus_surjective)
            and all(rep.tplus_vanishing)
            and rep.dim_coinv == 1
        )
        dims = {
            "dim_Ie": rep.dim_ie,
            "dim_T_Io": rep.dim_t_io,
            "dim_LN": rep.dim_ln,
            "dim_LN_U": rep.dim_ln_u,
            "dim_coinvariants": rep.dim_coinv,
        }
        recs.append(
            CheckRecord(
                f"truncation:N={N}",
                "pass" if ok else "fail",
                dims,
                detail=f"ln_u method={rep.methods['ln_u']}",
            )
        )
        seq.append(rep.dim_ln_u)
        prev = rep
    if len(seq) >= 2:
        mono = all(a <= b for a, b in zip(seq, seq[1:]))
        recs.append(CheckRecord("truncation:monotone-fixed-dims", "pass" if mono else "fail", {"sequence": seq}))
    if case != analysis.CASE_SEARCH_ONLY and seq:
        recs.append(
            CheckRecord(
                "truncation:fixed-dim-at-least-2",
                "pass" if seq[-1] >= 2 else "fail",
                {"dim_LN_U": seq[-1]},
            )
        )
    return recs


_SUITE_FNS = {
    "arith": _suite_arith,
    "hecke": _suite_hecke,
    "mainlemma": _suite_mainlemma,
    "negative": _suite_negative,
    "truncation": _suite_truncation,
}


def run(cfg: Config, suites=None, jobs: int = 1, timings: bool = False) -> Report:
    """Execute the selected suites; suite crashes become failed records."""
    ctx = cfg.build()
    selected = list(suites) if suites is not None else list(cfg.suites)
    for s in selected:
        if s not in SUITES:
            raise ConfigError(f"unknown suite {s!r}", location="--suites")

    def task(name):
        rng = np.random.default_rng(cfg.seed + SUITES.index(name))
        t0 = perf_counter()
        try:
            recs = _SUITE_FNS[name](ctx, cfg, rng)
        except Exception as ex:
            recs = [CheckRecord(f"{name}:error", "fail", detail=f"{type(ex).__name__}: {ex}")]
        dt = perf_counter() - t0
        if timings:
            for r in recs:
                r.seconds = round(dt / max(len(recs), 1), 6)
        return recs

    records = []
    if jobs > 1 and len(selected) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            for recs in pool.map(task, selected):
                records.extend(recs)
    else:
        for name in selected:
            records.extend(task(name))
    if cfg.inject_failure:
        records.append(CheckRecord("injected-failure", "fail", detail="forced by configuration"))
    records.sort(key=lambda r: r.name)
    verdict = "pass" if all(r.status != "fail" for r in records) else "fail"
    return Report(version=__version__, config=cfg.to_dict(), records=records, verdict=verdict)


def emit(report: Report, format: str = "text") -> bytes:
    if format in ("json", "structured"):
        return (json.dumps(report.to_dict(), sort_keys=True, indent=2) + "\n").encode()
    if format != "text":
        raise ValueError(f"unknown format {format!r}")
    lines = [f"indgl2 {report.version}"]
    for r in report.records:
        dims = " ".join(f"{k}={v}" for k, v in sorted(r.dims.items()))
        extra = f"  [{dims}]" if dims else ""
        note = f"  ({r.detail})" if r.detail else ""
        lines.append(f"{r.status.upper():8s}{r.name}{extra}{note}")
    lines.append(f"verdict: {report.verdict}")
    return ("\n".join(lines) + "\n").encode()


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="indgl2", description="verification driver for the compact-induction calculus")
    sub = parser.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", help="run verification suites for one configuration")
    v.add_argument("--config", help="path to a key = value configuration file")
    v.add_argument("--preset", help=f"named configuration: {', '.join(sorted(PRESETS))}")
    v.add_argument("--suites", help=f"comma-separated subset of: {', '.join(SUITES)}")
    v.add_argument("--trunc", type=int, help="override the truncation depth N_max")
    v.add_argument("--jobs", type=int, default=1, help="run suites concurrently")
    v.add_argument("--out", help="write the report to this path instead of stdout")
    v.add_argument("--format", choices=("text", "json"), default="text")
    v.add_argument("--timings", action="store_true", help="record wall-clock seconds (breaks byte-determinism)")
    v.add_argument("--seed", type=int, help="override the configuration seed")
    args = parser.parse_args(argv)

    try:
        if args.config and args.preset:
            raise ConfigError("pass either --config or --preset, not both", location="command line")
        if args.config:
            cfg = config_from_file(args.config)
        elif args.preset:
            cfg = config_from_preset(args.preset)
        else:
            raise ConfigError("one of --config or --preset is required", location="command line")
        if args.trunc is not None:
            cfg.N_max = args.trunc
            cfg.validate("--trunc")
        if args.seed is not None:
            cfg.seed = args.seed
        suites = [s for s in args.suites.split(",") if s] if args.suites else None
        report = run(cfg, suites=suites, jobs=args.jobs, timings=args.timings)
    except ConfigError as ex:
        print(f"config error: {ex}", file=sys.stderr)
        return 2

    payload = emit(report, args.format)
    out_path = args.out or cfg.out
    if out_path:
        try:
            with open(out_path, "wb") as fh:
                fh.write(payload)
        except OSError as ex:
            print(f"cannot write report: {ex}", file=sys.stderr)
            return 2
    else:
        sys.stdout.write(payload.decode())
    return 0 if report.verdict == "pass" else 1


if __name__ == "__main__":
    sys.exit(main())
