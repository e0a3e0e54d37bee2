"""The positive part ⊕_{n≥0} R_n(σ) of the compact induction, with the
upper-unipotent action, the α-shift, and the Hecke operators T = T₊ + T₋.

An InducedElem is a finite sum Σ [(ϖⁿ, μ), w] keyed by (level, digit string);
μ ∈ I_n is the canonical representative of its class and w a weight vector.
Everything below realizes the [g, w] calculus: left translation permutes keys
and pushes a K-correction into the weight.

Only positive levels exist here.  The lower coset direction that T would need
on level 0 is not representable, so T and T₋ reject level-0 support and T₊
does likewise for uniformity of the level bookkeeping.
"""

import itertools
import json
import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import (
    DimensionMismatch,
    LevelZeroInput,
    LevelZeroUnsupported,
    PrecisionExhausted,
)
from .gf import monomial_exp
from .localring import DigitString, LocalRingCtx, RingElem, digits, from_digits
from .weight import WeightCtx, WeightVector, action_matrix


class InductionCtx:
    """Weight and local ring contexts bound together over one field context."""

    def __init__(self, weight: WeightCtx, ring: LocalRingCtx):
        if weight.field is not ring.field:
            raise ValueError("weight and ring must share a single field context")
        self.weight = weight
        self.ring = ring
        self._ushift_cache: dict = {}
        self._tplus_local = None
        self._tminus_local = None

    @property
    def q(self) -> int:
        return self.ring.q

    @property
    def D(self) -> int:
        return self.weight.D

    def max_level(self) -> int:
        return self.ring.N - 1

    def tplus_local(self) -> np.ndarray:
        """q x D matrix over K: entry [λ, i⃗] = (-λ)^{i⃗}; T₊'s weight contraction."""
        if self._tplus_local is None:
            field = self.weight.field
            M = np.zeros((self.q, self.D), dtype=np.int32)
            for lam in field.enumerate_field("Fq"):
                for idx, iv in enumerate(self.weight.basis):
                    M[lam.code, idx] = field.embed(monomial_exp(-lam, iv)).code
            self._tplus_local = M
        return self._tplus_local

    def tminus_local(self) -> np.ndarray:
        """q x D matrix over K: row t expands ⊗_j (t^{p^j} x_j + y_j)^{r_j}."""
        if self._tminus_local is None:
            field = self.weight.field
            fq = field.fq
            p = field.p
            rvec = self.weight.rvec
            M = np.zeros((self.q, self.D), dtype=np.int32)
            for t in range(self.q):
                for idx, iv in enumerate(self.weight.basis):
                    acc = 1
                    for j, (r, i) in enumerate(zip(rvec, iv)):
                        b = math.comb(r, i) % p
                        if b == 0:
                            acc = 0
                            break
                        tw = fq.pow_code(t, (p**j) * (r - i))
                        acc = fq.mul_code(acc, fq.mul_code(b, tw))
                    M[t, idx] = field.embed_code(acc) if field.m > 1 else acc
            self._tminus_local = M
        return self._tminus_local

    def __repr__(self):
        return f"InductionCtx(q={self.q}, r={self.weight.rvec}, e={self.ring.e}, N={self.ring.N})"


class InducedElem:
    """Finite association (level, digits) -> weight vector; zero values dropped."""

    __slots__ = ("ctx", "terms")

    def __init__(self, ctx: InductionCtx, terms: dict):
        clean = {}
        for (n, mu), v in terms.items():
            arr = np.asarray(v, dtype=np.int32)
            if not np.any(arr):
                continue
            if len(mu) != n:
                raise ValueError(f"digit string length {len(mu)} != level {n}")
            if n > ctx.max_level():
                raise PrecisionExhausted(f"level {n} exceeds ring headroom N-1 = {ctx.max_level()}")
            clean[(n, tuple(int(c) for c in mu))] = arr
        self.ctx = ctx
        self.terms = clean

    def support(self):
        return sorted(self.terms.keys())

    def levels(self):
        return sorted({n for n, _ in self.terms})

    def coeff(self, n: int, mu) -> WeightVector:
        key = (n, tuple(int(c) for c in mu))
        v = self.terms.get(key)
        if v is None:
            v = np.zeros(self.ctx.D, dtype=np.int32)
        return WeightVector(self.ctx.weight, v.copy())

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other):
        self._check(other)
        kk = self.ctx.weight.field.kk
        out = {k: v.copy() for k, v in self.terms.items()}
        for k, v in other.terms.items():
            out[k] = kk.ADD[out[k], v] if k in out else v.copy()
        return InducedElem(self.ctx, out)

    def __sub__(self, other):
        return self + other.scale_code(int(other.ctx.weight.field.kk.NEG[1]))

    def __neg__(self):
        return self.scale_code(int(self.ctx.weight.field.kk.NEG[1]))

    def scale_code(self, code: int) -> "InducedElem":
        kk = self.ctx.weight.field.kk
        return InducedElem(self.ctx, {k: kk.MUL[code, v] for k, v in self.terms.items()})

    def scale(self, c) -> "InducedElem":
        field = self.ctx.weight.field
        code = c.code if c.field is field.kk else field.embed(c).code
        return InducedElem(self.ctx, {k: field.kk.MUL[code, v] for k, v in self.terms.items()})

    def _check(self, other):
        if not isinstance(other, InducedElem) or other.ctx is not self.ctx:
            raise DimensionMismatch("elements from different induction contexts")

    def __eq__(self, other):
        if not isinstance(other, InducedElem) or other.ctx is not self.ctx:
            return NotImplemented
        if set(self.terms) != set(other.terms):
            return False
        return all(np.array_equal(self.terms[k], other.terms[k]) for k in self.terms)

    def __hash__(self):
        return hash((id(self.ctx), tuple(sorted((k, v.tobytes()) for k, v in self.terms.items()))))

    def __repr__(self):
        parts = [f"[(ϖ^{n},{mu}): {self.terms[(n, mu)].tolist()}]" for n, mu in self.support()]
        return "InducedElem(" + " + ".join(parts) + ")" if parts else "InducedElem(0)"


def singleton(ctx: InductionCtx, n: int, mu, weight) -> InducedElem:
    """[(ϖⁿ, μ), w]; weight may be a WeightVector, coefficient array, or basis index."""
    if isinstance(weight, WeightVector):
        v = weight.codes
    elif isinstance(weight, (int, np.integer)):
        v = np.zeros(ctx.D, dtype=np.int32)
        v[int(weight)] = 1
    elif isinstance(weight, tuple) and weight in ctx.weight.index:
        v = np.zeros(ctx.D, dtype=np.int32)
        v[ctx.weight.index[weight]] = 1
    else:
        v = np.asarray(weight, dtype=np.int32)
    return InducedElem(ctx, {(n, tuple(int(c) for c in mu)): v})


def basis_R(ctx: InductionCtx, n: int):
    """The q^n·D standard basis of R_n, μ lexicographic then i⃗ lexicographic."""
    if n < 0:
        raise ValueError("level must be >= 0")
    if n > ctx.max_level():
        raise PrecisionExhausted(f"level {n} exceeds ring headroom N-1 = {ctx.max_level()}")
    out = []
    for mu in itertools.product(range(ctx.q), repeat=n):
        for widx in range(ctx.D):
            out.append(singleton(ctx, n, mu, widx))
    return out


# -- group actions --


def u_act(c: RingElem, x: InducedElem) -> InducedElem:
    """Left translation by [[1, c], [0, 1]]: reindex μ ↦ μ″ where μ + c = μ″ + ϖⁿ t,
    and push the leftover unipotent [[1, t], [0, 1]] into the weight."""
    ctx = x.ctx
    ring = ctx.ring
    if c.ctx is not ring:
        raise DimensionMismatch("translation amount lives in a different ring context")
    kk = ctx.weight.field.kk
    fq = ctx.weight.field.fq
    out: dict = {}
    c_sig = (c.vec.tobytes(), c.prec)
    for (n, mu), v in x.terms.items():
        if c.prec < n + 1:
            raise PrecisionExhausted(f"translation needs precision {n + 1}, have {c.prec}")
        hit = ctx._ushift_cache.get((c_sig, n, mu))
        if hit is None:
            r = from_digits(DigitString(ring, mu)) + c
            s = digits(r, n + 1)
            hit = (s.codes[:n], s.codes[n])
            ctx._ushift_cache[(c_sig, n, mu)] = hit
        mu2, t = hit
        if t == 0:
            w = v
        else:
            M = action_matrix(ctx.weight, [[fq.one, fq.elem(t)], [fq.zero, fq.one]])
            w = _row_times(v, M, kk)
        key = (n, mu2)
        out[key] = kk.ADD[out[key], w] if key in out else w.astype(np.int32)
    return InducedElem(ctx, out)


def _row_times(v: np.ndarray, M: np.ndarray, kk) -> np.ndarray:
    out = np.zeros(M.shape[1], dtype=np.int32)
    for i in range(v.shape[0]):
        a = int(v[i])
        if a:
            out = kk.ADD[out, kk.MUL[a, M[i]]]
    return out


def alpha_act(x: InducedElem) -> InducedElem:
    """[(ϖⁿ, μ), w] ↦ [(ϖ^{n+1}, ϖμ), w]; prepends a zero digit."""
    ctx = x.ctx
    out = {}
    for (n, mu), v in x.terms.items():
        if n + 1 > ctx.max_level():
            raise PrecisionExhausted("no precision headroom for the level shift")
        out[(n + 1, (0,) + mu)] = v.copy()
    return InducedElem(ctx, out)


def alpha2_act(x: InducedElem) -> InducedElem:
    return alpha_act(alpha_act(x))


# -- Hecke operators --


def hecke_T_plus(x: InducedElem) -> InducedElem:
    """Σ_λ [(ϖ^{n+1}, μ + ϖⁿ[λ]), (Σ_{i⃗} u_{i⃗} (-λ)^{i⃗}) x^{r⃗}]."""
    ctx = x.ctx
    kk = ctx.weight.field.kk
    local = ctx.tplus_local()
    out: dict = {}
    for (n, mu), v in x.terms.items():
        if n == 0:
            raise LevelZeroUnsupported("the lower coset needed at level 0 is not representable")
        if n + 1 > ctx.max_level():
            raise PrecisionExhausted("no precision headroom for the level raise")
        for lam in range(ctx.q):
            coeff = 0
            for i in range(ctx.D):
                a = int(v[i])
                if a:
                    coeff = int(kk.ADD[coeff, kk.MUL[a, local[lam, i]]])
            if coeff == 0:
                continue
            key = (n + 1, mu + (lam,))
            w = np.zeros(ctx.D, dtype=np.int32)
            w[0] = coeff  # multiple of e_{0⃗} = x^{r⃗}
            out[key] = kk.ADD[out[key], w] if key in out else w
    return InducedElem(ctx, out)


def hecke_T_minus(x: InducedElem) -> InducedElem:
    """ν [(ϖ^{n-1}, [μ]_{n-1}), u_{r⃗} ⊗_j (μ_{n-1}^{p^j} x_j + y_j)^{r_j}]."""
    ctx = x.ctx
    kk = ctx.weight.field.kk
    local = ctx.tminus_local()
    top_index = ctx.weight.index[ctx.weight.rvec]  # e_{r⃗} = y^{r⃗}
    nu_code = ctx.weight.nu.code
    out: dict = {}
    for (n, mu), v in x.terms.items():
        if n == 0:
            raise LevelZeroInput("T₋ lowers the level; level 0 has nowhere to go")
        u_r = int(v[top_index])
        if u_r == 0:
            continue
        scalar = int(kk.MUL[nu_code, u_r])
        w = kk.MUL[scalar, local[mu[n - 1]]].astype(np.int32)
        key = (n - 1, mu[: n - 1])
        out[key] = kk.ADD[out[key], w] if key in out else w
    return InducedElem(ctx, out)


def hecke_T(x: InducedElem) -> InducedElem:
    if any(n == 0 for n, _ in x.terms):
        raise LevelZeroInput("T is only defined on levels >= 1 here")
    return hecke_T_plus(x) + hecke_T_minus(x)


# -- level ranges and matrix exports --


@dataclass(frozen=True)
class LevelRange:
    """Levels lo..hi filtered by parity; denotes the I^e/I^o truncations."""

    parity: str
    lo: int
    hi: int

    def __post_init__(self):
        if self.parity not in ("even", "odd", "all"):
            raise ValueError("parity must be even|odd|all")
        if self.lo > self.hi:
            raise ValueError("lo must be <= hi")
        if self.lo < 0:
            raise ValueError("levels are nonnegative")

    def levels(self):
        for n in range(self.lo, self.hi + 1):
            if self.parity == "even" and n % 2:
                continue
            if self.parity == "odd" and n % 2 == 0:
                continue
            yield n

    def __contains__(self, n: int):
        if n < self.lo or n > self.hi:
            return False
        if self.parity == "even":
            return n % 2 == 0
        if self.parity == "odd":
            return n % 2 == 1
        return True


def range_dim(ctx: InductionCtx, lr: LevelRange) -> int:
    return sum(ctx.q**n * ctx.D for n in lr.levels())


def _offsets(ctx: InductionCtx, lr: LevelRange) -> dict:
    off = {}
    pos = 0
    for n in lr.levels():
        off[n] = pos
        pos += ctx.q**n * ctx.D
    return off


def index_of(ctx: InductionCtx, lr: LevelRange, n: int, mu, widx: int) -> int:
    off = _offsets(ctx, lr)
    if n not in off:
        raise DimensionMismatch(f"level {n} outside range {lr}")
    rank = 0
    for c in mu:
        rank = rank * ctx.q + int(c)
    return off[n] + rank * ctx.D + widx


def flatten(x: InducedElem, lr: LevelRange) -> np.ndarray:
    """Coordinates of x in the frozen basis of the level range."""
    ctx = x.ctx
    out = np.zeros(range_dim(ctx, lr), dtype=np.int32)
    off = _offsets(ctx, lr)
    for (n, mu), v in x.terms.items():
        if n not in off:
            raise DimensionMismatch(f"support level {n} outside range {lr}")
        rank = 0
        for c in mu:
            rank = rank * ctx.q + int(c)
        base = off[n] + rank * ctx.D
        out[base : base + ctx.D] = v
    return out


def unflatten(ctx: InductionCtx, lr: LevelRange, coords: np.ndarray) -> InducedElem:
    terms = {}
    pos = 0
    for n in lr.levels():
        for mu in itertools.product(range(ctx.q), repeat=n):
            v = coords[pos : pos + ctx.D]
            if np.any(v):
                terms[(n, mu)] = np.asarray(v, dtype=np.int32)
            pos += ctx.D
    return InducedElem(ctx, terms)


def operator_matrix(ctx: InductionCtx, op, domain: LevelRange, codomain: LevelRange) -> linalg.LinMap:
    """LinMap of op over the frozen bases; row = image of a domain basis element."""
    kk = ctx.weight.field.kk
    rows = range_dim(ctx, domain)
    M = np.zeros((rows, range_dim(ctx, codomain)), dtype=np.int32)
    r = 0
    for n in domain.levels():
        for mu in itertools.product(range(ctx.q), repeat=n):
            for widx in range(ctx.D):
                y = op(singleton(ctx, n, mu, widx))
                M[r] = flatten(y, codomain)
                r += 1
    return linalg.LinMap(kk, M)


# -- serialization --


def to_records(x: InducedElem):
    field = x.ctx.weight.field
    fq, kk = field.fq, field.kk
    recs = []
    for n, mu in x.support():
        v = x.terms[(n, mu)]
        recs.append(
            {
                "level": n,
                "digits": [list(fq.coords_of(c)) for c in mu],
                "weight-coefficients": [list(kk.coords_of(int(c))) for c in v],
            }
        )
    return recs


def from_records(ctx: InductionCtx, recs) -> InducedElem:
    field = ctx.weight.field
    fq, kk = field.fq, field.kk
    terms = {}
    for rec in recs:
        n = int(rec["level"])
        mu = tuple(fq.code_of(coords) for coords in rec["digits"])
        wc = rec["weight-coefficients"]
        if len(wc) != ctx.D:
            raise ValueError(f"weight coefficient list must have length {ctx.D}")
        v = np.array([kk.code_of(coords) for coords in wc], dtype=np.int32)
        key = (n, mu)
        if key in terms:
            v = kk.ADD[terms[key], v]
        terms[key] = v
    return InducedElem(ctx, terms)


def serialize(x: InducedElem) -> str:
    return json.dumps({"terms": to_records(x)}, sort_keys=True, separators=(",", ":"))


def deserialize(ctx: InductionCtx, text: str) -> InducedElem:
    return from_records(ctx, json.loads(text)["terms"])
