"""Exact arithmetic in O/ϖ^N for a local field with residue degree f and ramification e.

O is presented as GR(p^M, f)[x]/(E(x)) with E monic Eisenstein of degree e
(default x^e - p), where GR(p^M, f) = (Z/p^M)[y]/(h) is the Galois ring on a
monic lift h of the residue-field modulus.  A RingElem is a polynomial of
degree < e in the uniformizer with GR coefficients and a declared ϖ-adic
precision.  Digit strings (λ_0, .., λ_{n-1}) denote Σ ϖ^i [λ_i] and give the
canonical set of representatives of O/ϖ^n used to index induced vectors.

The coefficient precision M = ⌈N/e⌉ + 1 guarantees that no carry into the
top tracked ϖ-digit is lost (e·M ≥ N + 1).
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import (
    MixedFieldContexts,
    NonConvergence,
    NotDivisible,
    PrecisionExhausted,
)
from .gf import FieldCtx, FqElem


class LocalRingCtx:
    """Working model of O/ϖ^N; immutable, all operations pure."""

    def __init__(self, p: int, f: int, e: int, E=None, N: int = 8, field: FieldCtx | None = None):
        if e < 1 or f < 1 or N < 1:
            raise ValueError("need e, f, N >= 1")
        self.p, self.f, self.e, self.N = p, f, e, N
        self.M = -(-N // e) + 1
        assert self.e * self.M >= N + 1
        self.pM = p**self.M
        self.field = field if field is not None else FieldCtx(p, f)
        if self.field.p != p or self.field.f != f:
            raise ValueError("field context does not match (p, f)")
        self.q = p**f

        # monic lift of the residue-field modulus, ascending, length f+1
        self.h = np.array([c % self.pM for c in self.field.fq.modulus], dtype=np.int64)

        # Eisenstein polynomial: list of e lower coefficients as GR vectors
        self.E = self._normalize_eisenstein(E)
        self._check_eisenstein()

        # y^(f+k) mod h for k = 0..f-2, used to fold products
        self._ypow_hi = self._build_ypow()
        self._u0_inv = None  # lazy: inverse of E[0]/p in GR

    def _normalize_eisenstein(self, E):
        e, f = self.e, self.f
        if E is None:
            E = [-self.p] + [0] * (e - 1) + [1]
        E = list(E)
        if len(E) != e + 1:
            raise ValueError(f"Eisenstein polynomial must have degree {e}")
        out = []
        for c in E[:e]:
            if isinstance(c, (int, np.integer)):
                vec = np.zeros(f, dtype=np.int64)
                vec[0] = int(c) % self.pM
            else:
                vec = np.array([int(x) % self.pM for x in c], dtype=np.int64)
                if vec.shape != (f,):
                    raise ValueError("Eisenstein coefficient has wrong length")
            out.append(vec)
        lead = E[e]
        if isinstance(lead, (int, np.integer)):
            if int(lead) != 1:
                raise ValueError("Eisenstein polynomial must be monic")
        return out

    def _check_eisenstein(self):
        p = self.p
        for c in self.E:
            if np.any(c % p != 0):
                raise ValueError("Eisenstein: lower coefficients must be divisible by p")
        if not np.any((self.E[0] // p) % p):
            raise ValueError("Eisenstein: constant coefficient divisible by p^2")

    def _build_ypow(self):
        f, pM = self.f, self.pM
        if f == 1:
            return []
        hi = []
        # y^f = -(h_0 + .. + h_{f-1} y^{f-1})
        cur = (-self.h[:f]) % pM
        hi.append(cur.copy())
        for _ in range(f - 2):
            nxt = np.zeros(f, dtype=np.int64)
            nxt[1:] = cur[: f - 1]
            nxt = (nxt + cur[f - 1] * hi[0]) % pM
            hi.append(nxt.copy())
            cur = nxt
        return hi

    # -- Galois ring coefficient arithmetic (vectors length f mod p^M) --

    def gr_mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        f, pM = self.f, self.pM
        conv = np.convolve(a, b)
        out = conv[:f].copy()
        for k in range(f, len(conv)):
            out = out + conv[k] * self._ypow_hi[k - f]
        return out % pM

    def gr_pow(self, a: np.ndarray, n: int) -> np.ndarray:
        out = np.zeros(self.f, dtype=np.int64)
        out[0] = 1
        base = a % self.pM
        while n:
            if n & 1:
                out = self.gr_mul(out, base)
            base = self.gr_mul(base, base)
            n >>= 1
        return out

    def gr_inv(self, a: np.ndarray) -> np.ndarray:
        """Newton-lift the residue-field inverse; a must be a unit."""
        fq = self.field.fq
        res = fq.code_of(a % self.p)
        if res == 0:
            raise NotDivisible("not a unit in the Galois ring")
        v = np.zeros(self.f, dtype=np.int64)
        for i, c in enumerate(fq.coords_of(fq.inv_code(res))):
            v[i] = c
        two = np.zeros(self.f, dtype=np.int64)
        two[0] = 2
        prec = 1
        while prec < self.M:
            v = self.gr_mul(v, (two - self.gr_mul(a, v)) % self.pM)
            prec *= 2
        return v

    # -- element constructors --

    def zero(self, prec: int | None = None) -> "RingElem":
        return RingElem(self, np.zeros((self.e, self.f), dtype=np.int64), prec or self.N)

    def one(self, prec: int | None = None) -> "RingElem":
        vec = np.zeros((self.e, self.f), dtype=np.int64)
        vec[0, 0] = 1
        return RingElem(self, vec, prec or self.N)

    def from_int(self, n: int, prec: int | None = None) -> "RingElem":
        vec = np.zeros((self.e, self.f), dtype=np.int64)
        vec[0, 0] = n % self.pM
        return RingElem(self, vec, prec or self.N)

    def uniformizer(self, prec: int | None = None) -> "RingElem":
        vec = np.zeros((self.e, self.f), dtype=np.int64)
        if self.e == 1:
            vec[0] = (-self.E[0]) % self.pM  # E(ϖ) = 0 pins ϖ = -E_0
        else:
            vec[1, 0] = 1
        return RingElem(self, vec, prec or self.N)

    # -- canonical form and equality --

    def canon(self, vec: np.ndarray, prec: int) -> np.ndarray:
        """Reduce coefficient of ϖ^i mod p^⌈max(prec-i,0)/e⌉; bijective onto O/ϖ^prec."""
        out = vec.copy()
        for i in range(self.e):
            mi = -(-max(prec - i, 0) // self.e)
            out[i] %= self.p**mi if mi > 0 else 1
        return out

    # -- core polynomial arithmetic in the ϖ-generator --

    def _mul_vec(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        e = self.e
        full = [np.zeros(self.f, dtype=np.int64) for _ in range(2 * e - 1)]
        for i in range(e):
            if not np.any(a[i]):
                continue
            for j in range(e):
                if not np.any(b[j]):
                    continue
                full[i + j] = (full[i + j] + self.gr_mul(a[i], b[j])) % self.pM
        # reduce by E: ϖ^e = -(E_0 + E_1 ϖ + .. + E_{e-1} ϖ^{e-1})
        for k in range(2 * e - 2, e - 1, -1):
            c = full[k]
            if not np.any(c):
                continue
            full[k] = np.zeros(self.f, dtype=np.int64)
            for i in range(e):
                full[k - e + i] = (full[k - e + i] - self.gr_mul(c, self.E[i])) % self.pM
        return np.stack(full[:e])

    def _pi_w(self) -> "RingElem":
        """W with p = ϖ·W: W = -u0^{-1}(ϖ^{e-1} + E_{e-1}ϖ^{e-2} + .. + E_1), u0 = E_0/p."""
        if self._u0_inv is None:
            self._u0_inv = self.gr_inv((self.E[0] // self.p) % self.pM)
        e = self.e
        vec = np.zeros((e, self.f), dtype=np.int64)
        if e == 1:
            # p = ϖ·(p/ϖ) with ϖ = p·unit; W = -u0^{-1}·1, E = x - E_0... here E_0 = -p·u0
            vec[0] = (-self._u0_inv) % self.pM
        else:
            vec[e - 1, 0] = 1
            for i in range(1, e):
                vec[i - 1] = (vec[i - 1] + self.E[i]) % self.pM
            for i in range(e):
                vec[i] = self.gr_mul((-self._u0_inv) % self.pM, vec[i])
        return RingElem(self, vec, self.N)

    def __repr__(self):
        return f"LocalRingCtx(p={self.p}, f={self.f}, e={self.e}, N={self.N})"


class RingElem:
    """Polynomial of degree < e over GR(p^M, f) with a declared ϖ-adic precision."""

    __slots__ = ("ctx", "vec", "prec")

    def __init__(self, ctx: LocalRingCtx, vec: np.ndarray, prec: int):
        self.ctx = ctx
        self.vec = vec % ctx.pM
        self.prec = min(prec, ctx.N)

    def _check(self, other):
        if not isinstance(other, RingElem) or other.ctx is not self.ctx:
            raise MixedFieldContexts("operands live in different ring contexts")

    def __add__(self, other):
        self._check(other)
        return RingElem(self.ctx, (self.vec + other.vec) % self.ctx.pM, min(self.prec, other.prec))

    def __sub__(self, other):
        self._check(other)
        return RingElem(self.ctx, (self.vec - other.vec) % self.ctx.pM, min(self.prec, other.prec))

    def __mul__(self, other):
        self._check(other)
        return RingElem(self.ctx, self.ctx._mul_vec(self.vec, other.vec), min(self.prec, other.prec))

    def __neg__(self):
        return RingElem(self.ctx, (-self.vec) % self.ctx.pM, self.prec)

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers not supported")
        out = self.ctx.one(self.prec)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if not isinstance(other, RingElem) or other.ctx is not self.ctx:
            return NotImplemented
        n = min(self.prec, other.prec)
        return np.array_equal(self.ctx.canon(self.vec, n), self.ctx.canon(other.vec, n))

    def __hash__(self):
        return hash((id(self.ctx), self.prec, self.vec.tobytes()))

    def is_zero(self, prec: int | None = None) -> bool:
        n = self.prec if prec is None else min(prec, self.prec)
        return not np.any(self.ctx.canon(self.vec, n))

    def at_precision(self, n: int) -> "RingElem":
        if n > self.prec:
            raise PrecisionExhausted(f"cannot raise precision {self.prec} to {n}")
        return RingElem(self.ctx, self.vec, n)

    def __repr__(self):
        return f"RingElem({self.vec.tolist()}, prec={self.prec})"


@dataclass(frozen=True)
class DigitString:
    """Digits (λ_0, .., λ_{n-1}) denoting Σ ϖ^i [λ_i]; the empty string is 0."""

    ctx: LocalRingCtx
    codes: tuple

    def __len__(self):
        return len(self.codes)

    def __getitem__(self, i) -> FqElem:
        return self.ctx.field.fq.elem(self.codes[i])

    def __iter__(self):
        fq = self.ctx.field.fq
        return (fq.elem(c) for c in self.codes)

    @property
    def digits(self):
        return tuple(self)


def make_digits(ctx: LocalRingCtx, values) -> DigitString:
    codes = tuple(v.code if isinstance(v, FqElem) else int(v) % ctx.q for v in values)
    return DigitString(ctx, codes)


# -- Teichmüller lifts --


def _teich_vec(ctx: LocalRingCtx, code: int) -> np.ndarray:
    coords = ctx.field.fq.coords_of(code)
    x = np.array(coords, dtype=np.int64)
    prev = None
    for _ in range(ctx.M + 8):
        if prev is not None and np.array_equal(x, prev):
            return x
        prev = x
        x = ctx.gr_pow(x, ctx.q)
    raise NonConvergence("Teichmüller iteration did not stabilize")


@lru_cache(maxsize=None)
def _teich_cached(ctx_id: int, code: int) -> bytes:
    ctx = _CTX_REGISTRY[ctx_id]
    return _teich_vec(ctx, code).tobytes()


_CTX_REGISTRY: dict = {}


def teichmuller(lam: FqElem, ctx: LocalRingCtx) -> RingElem:
    """The unique lift of λ with x^q = x; computed by q-power stabilization."""
    if lam.field is not ctx.field.fq:
        raise MixedFieldContexts("element not in the residue field of this context")
    key = id(ctx)
    _CTX_REGISTRY.setdefault(key, ctx)
    flat = np.frombuffer(_teich_cached(key, lam.code), dtype=np.int64)
    vec = np.zeros((ctx.e, ctx.f), dtype=np.int64)
    vec[0] = flat
    return RingElem(ctx, vec, ctx.N)


# -- free functions --


def ring_arith(op: str, a: RingElem, b: RingElem) -> RingElem:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")


def divide_by_uniformizer(a: RingElem) -> RingElem:
    """Exact division by ϖ; requires a ≡ 0 mod ϖ, drops one unit of precision."""
    ctx = a.ctx
    if a.prec - 1 < 1:
        raise PrecisionExhausted("quotient would have precision < 1")
    res = residue(a)
    if res:
        raise NotDivisible("element is a unit mod ϖ")
    a0 = a.vec[0]
    if np.any(a0 % ctx.p):
        raise NotDivisible("constant coefficient not divisible by p")
    # a = p·(a0/p) + Σ_{i≥1} a_i ϖ^i and p = ϖ·W
    shifted = np.zeros((ctx.e, ctx.f), dtype=np.int64)
    if ctx.e > 1:
        shifted[: ctx.e - 1] = a.vec[1:]
    part = RingElem(ctx, shifted, a.prec)
    head_vec = np.zeros((ctx.e, ctx.f), dtype=np.int64)
    head_vec[0] = a0 // ctx.p
    out = RingElem(ctx, head_vec, a.prec) * ctx._pi_w() + part
    return RingElem(ctx, out.vec, a.prec - 1)


def residue(a: RingElem) -> FqElem:
    fq = a.ctx.field.fq
    return fq.elem(fq.code_of(a.vec[0] % a.ctx.p))


def digits(a: RingElem, n: int) -> DigitString:
    """Greedy I_n expansion: λ_i = residue(a), a ← (a - [λ_i])/ϖ."""
    ctx = a.ctx
    if n > a.prec:
        raise PrecisionExhausted(f"need precision {n}, have {a.prec}")
    out = []
    cur = a
    for i in range(n):
        lam = residue(cur)
        out.append(lam.code)
        if i + 1 < n:
            cur = divide_by_uniformizer(cur - teichmuller(lam, ctx))
    return DigitString(ctx, tuple(out))


def from_digits(s: DigitString, prec: int | None = None) -> RingElem:
    ctx = s.ctx
    acc = ctx.zero(prec)
    pi = ctx.uniformizer(prec)
    for lam_code in reversed(s.codes):
        acc = acc * pi + teichmuller(ctx.field.fq.elem(lam_code), ctx).at_precision(acc.prec)
    return acc


def truncate_digits(s: DigitString, n: int) -> DigitString:
    if n > len(s):
        raise ValueError("cannot extend a digit string by truncation")
    return DigitString(s.ctx, s.codes[:n])


def _carry_poly_coeffs(p: int):
    # F(x,y) = (x^p + y^p - (x+y)^p)/p mod p = -Σ_{k=1}^{p-1} (C(p,k)/p) x^k y^{p-k}
    return [(-(math.comb(p, k) // p)) % p for k in range(1, p)]


def witt_carry_closed_form(a: FqElem, b: FqElem, ctx: LocalRingCtx) -> FqElem:
    """Carry digit for e = 1 as a polynomial in (a^{p^{f-1}}, b^{p^{f-1}})."""
    fq = ctx.field.fq
    p, f = ctx.p, ctx.f
    x = a ** (p ** (f - 1)) if a else a
    y = b ** (p ** (f - 1)) if b else b
    coeffs = _carry_poly_coeffs(p)
    total = fq.zero
    for k in range(1, p):
        c = fq.from_int(coeffs[k - 1])
        total = total + c * (x**k) * (y ** (p - k))
    return total


def witt_carry(a: FqElem, b: FqElem, ctx: LocalRingCtx, carries: int = 1) -> DigitString:
    """Digit string of [a]+[b] through the first `carries` carry positions.

    Positions 1..e-1 vanish; position e holds the first carry polynomial.
    """
    need = ctx.e * carries + 1
    if ctx.N < need:
        raise PrecisionExhausted(f"need precision {need}, ctx has {ctx.N}")
    s = teichmuller(a, ctx) + teichmuller(b, ctx)
    return digits(s, need)
