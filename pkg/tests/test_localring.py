import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from indgl2.errors import NotDivisible, PrecisionExhausted
from indgl2.localring import (
    DigitString,
    LocalRingCtx,
    RingElem,
    digits,
    divide_by_uniformizer,
    from_digits,
    make_digits,
    residue,
    ring_arith,
    teichmuller,
    truncate_digits,
    witt_carry,
    witt_carry_closed_form,
)


@pytest.fixture(scope="module")
def q3():
    return LocalRingCtx(3, 1, 1, N=4)


@pytest.fixture(scope="module")
def ram3():
    # ramified quadratic over Q_3, ϖ^2 = 3
    return LocalRingCtx(3, 1, 2, N=5)


@pytest.fixture(scope="module")
def unram9():
    return LocalRingCtx(3, 2, 1, N=3)


def test_coefficient_precision_guard():
    ctx = LocalRingCtx(3, 1, 2, N=5)
    assert ctx.M == 4  # ⌈5/2⌉+1
    assert ctx.e * ctx.M >= ctx.N + 1


def test_eisenstein_validation():
    with pytest.raises(ValueError):
        LocalRingCtx(3, 1, 2, E=[-9, 0, 1])  # constant coeff divisible by p^2
    with pytest.raises(ValueError):
        LocalRingCtx(3, 1, 2, E=[-3, 1, 1])  # middle coeff not divisible by p
    LocalRingCtx(3, 1, 2, E=[-3, 3, 1])  # valid: x^2 + 3x - 3


def test_defining_relation(ram3):
    pi = ram3.uniformizer()
    assert pi * pi == ram3.from_int(3)


def test_custom_eisenstein_relation():
    ctx = LocalRingCtx(3, 1, 2, E=[-3, 3, 1], N=4)
    pi = ctx.uniformizer()
    # ϖ^2 + 3ϖ - 3 = 0
    assert pi * pi + ctx.from_int(3) * pi == ctx.from_int(3)


class TestTeichmuller:
    def test_idempotents(self, q3):
        fq = q3.field.fq
        assert teichmuller(fq.zero, q3) == q3.zero()
        assert teichmuller(fq.one, q3) == q3.one()

    def test_minus_one_odd_p(self):
        # oracle: [-1] = -1 for odd p, so teichmuller(2) = 8 mod 9
        ctx = LocalRingCtx(3, 1, 1, N=2)
        t = teichmuller(ctx.field.fq.elem(2), ctx)
        assert int(ctx.canon(t.vec, 2)[0, 0]) == 8

    def test_fixed_point_q4(self):
        ctx = LocalRingCtx(2, 2, 1, N=2)
        for lam in ctx.field.enumerate_field("Fq"):
            t = teichmuller(lam, ctx)
            assert t**4 == t

    @pytest.mark.parametrize("p,f,e", [(3, 1, 1), (2, 2, 1), (3, 2, 1), (3, 1, 2), (2, 2, 2)])
    def test_defining_property_and_multiplicativity(self, p, f, e):
        ctx = LocalRingCtx(p, f, e, N=2 * e + 1)
        els = ctx.field.enumerate_field("Fq")
        for a in els:
            t = teichmuller(a, ctx)
            assert t ** ctx.q == t
            assert residue(t) == a
        for a in els:
            for b in els:
                assert teichmuller(a, ctx) * teichmuller(b, ctx) == teichmuller(a * b, ctx)


class TestDigits:
    def test_zero(self, q3):
        assert digits(q3.zero(), 3).codes == (0, 0, 0)

    def test_two_in_q3(self):
        # oracle: 2 = [2] + 3·1 + 9·0 since [2] = -1 mod 27 and (2+1)/3 = 1 = [1]
        ctx = LocalRingCtx(3, 1, 1, N=3)
        assert digits(ctx.from_int(2), 3).codes == (2, 1, 0)

    def test_ramified_conventions(self, ram3):
        # 3 = ϖ^2 has all-zero digits at level 2; ϖ itself is (0, 1)
        assert digits(ram3.from_int(3), 2).codes == (0, 0)
        assert digits(ram3.uniformizer(), 2).codes == (0, 1)

    def test_roundtrip_exhaustive_small(self, q3):
        for n in range(0, 4):
            for val in range(3**n):
                a = q3.from_int(val)
                d = digits(a, n)
                assert (from_digits(d) - a).is_zero(n)

    @pytest.mark.parametrize("p,f,e,N", [(3, 1, 2, 5), (2, 2, 2, 5), (3, 2, 1, 3), (2, 1, 1, 6)])
    def test_roundtrip_random(self, p, f, e, N):
        rng = np.random.default_rng(7)
        ctx = LocalRingCtx(p, f, e, N=N)
        for _ in range(40):
            vec = rng.integers(0, ctx.pM, size=(e, f))
            a = RingElem(ctx, vec.astype(np.int64), N)
            for n in range(N + 1):
                assert (from_digits(digits(a, n)) - a).is_zero(n)

    def test_unique_representative(self, ram3):
        # distinct digit strings name distinct classes mod ϖ^n
        seen = {}
        for c0 in range(3):
            for c1 in range(3):
                d = make_digits(ram3, (c0, c1))
                a = from_digits(d)
                key = ram3.canon(a.vec, 2).tobytes()
                assert key not in seen
                seen[key] = d

    def test_precision_exceeded(self, q3):
        a = q3.from_int(5).at_precision(2)
        with pytest.raises(PrecisionExhausted):
            digits(a, 3)

    def test_truncate(self, q3):
        d = make_digits(q3, (2, 1, 0))
        assert truncate_digits(d, 2).codes == (2, 1)
        assert truncate_digits(d, 0).codes == ()
        with pytest.raises(ValueError):
            truncate_digits(d, 4)


class TestDivision:
    def test_section_of_multiplication(self, ram3):
        pi = ram3.uniformizer()
        for c in (1, 2, 4, 5):
            u = ram3.from_int(c)
            assert divide_by_uniformizer(pi * u) == u.at_precision(ram3.N - 1)

    def test_worked_example_mod9(self):
        # 2 - [2] = 2 - 8 = -6 ≡ 3 mod 9; dividing by 3 gives 1 mod 3
        ctx = LocalRingCtx(3, 1, 1, N=2)
        val = ctx.from_int(2) - teichmuller(ctx.field.fq.elem(2), ctx)
        q = divide_by_uniformizer(val)
        assert q.prec == 1
        assert residue(q).code == 1

    def test_rejects_units(self, q3):
        with pytest.raises(NotDivisible):
            divide_by_uniformizer(q3.one())

    def test_precision_floor(self, q3):
        a = (q3.uniformizer()).at_precision(1)
        with pytest.raises(PrecisionExhausted):
            divide_by_uniformizer(a)

    def test_ramified_division_chain(self, ram3):
        # 3/ϖ = ϖ (up to the tracked precision)
        q = divide_by_uniformizer(ram3.from_int(3))
        assert q == ram3.uniformizer().at_precision(q.prec)


class TestResidue:
    def test_basics(self, ram3):
        assert residue(ram3.uniformizer()).code == 0
        assert residue(ram3.one() + ram3.uniformizer()).code == 1
        for lam in ram3.field.enumerate_field("Fq"):
            assert residue(teichmuller(lam, ram3)) == lam

    def test_is_ring_hom(self, unram9):
        rng = np.random.default_rng(3)
        for _ in range(30):
            a = RingElem(unram9, rng.integers(0, unram9.pM, size=(1, 2)).astype(np.int64), unram9.N)
            b = RingElem(unram9, rng.integers(0, unram9.pM, size=(1, 2)).astype(np.int64), unram9.N)
            assert residue(a + b) == residue(a) + residue(b)
            assert residue(a * b) == residue(a) * residue(b)


class TestWittCarry:
    def test_p3_example(self):
        # oracle: [1]+[1] = 2 mod 9 has digits (2, 1); F(1,1) = (2-8)/3 = -2 ≡ 1
        ctx = LocalRingCtx(3, 1, 1, N=2)
        w = witt_carry(ctx.field.fq.elem(1), ctx.field.fq.elem(1), ctx)
        assert w.codes == (2, 1)

    def test_p2_example(self):
        ctx = LocalRingCtx(2, 1, 1, N=2)
        w = witt_carry(ctx.field.fq.elem(1), ctx.field.fq.elem(1), ctx)
        assert w.codes == (0, 1)

    @pytest.mark.parametrize("p,f", [(2, 2), (3, 2)])
    def test_closed_form_all_pairs_unramified(self, p, f):
        ctx = LocalRingCtx(p, f, 1, N=2)
        els = ctx.field.enumerate_field("Fq")
        for a in els:
            for b in els:
                w = witt_carry(a, b, ctx)
                assert w.codes[0] == (a + b).code
                assert w.codes[1] == witt_carry_closed_form(a, b, ctx).code

    @pytest.mark.parametrize("p", [2, 3])
    def test_ramified_no_carry_mod_pi2(self, p):
        # [a]+[b] ≡ [a+b] mod ϖ^2 whenever e ≥ 2
        ctx = LocalRingCtx(p, 1, 2, N=3)
        els = ctx.field.enumerate_field("Fq")
        for a in els:
            for b in els:
                w = witt_carry(a, b, ctx)
                assert w.codes[0] == (a + b).code
                assert w.codes[1] == 0

    def test_mixed_ramified_no_carry(self):
        ctx = LocalRingCtx(2, 2, 2, N=3)
        els = ctx.field.enumerate_field("Fq")
        for a in els:
            for b in els:
                assert witt_carry(a, b, ctx).codes[1] == 0

    def test_second_carry_needs_precision(self):
        ctx = LocalRingCtx(3, 1, 1, N=2)
        with pytest.raises(PrecisionExhausted):
            witt_carry(ctx.field.fq.elem(1), ctx.field.fq.elem(1), ctx, carries=2)
        ctx2 = LocalRingCtx(3, 1, 1, N=3)
        w = witt_carry(ctx2.field.fq.elem(1), ctx2.field.fq.elem(1), ctx2, carries=2)
        assert len(w.codes) == 3


def test_ring_arith_dispatch(q3):
    a, b = q3.from_int(4), q3.from_int(7)
    assert ring_arith("add", a, b) == q3.from_int(11)
    assert ring_arith("sub", a, b) == q3.from_int(-3)
    assert ring_arith("mul", a, b) == q3.from_int(28)
    with pytest.raises(ValueError):
        ring_arith("div", a, b)


def test_equality_respects_min_precision(q3):
    a = q3.from_int(1)
    b = q3.from_int(1 + 27).at_precision(3)
    assert a == b  # agree mod 3^3
    assert not (q3.from_int(1) == q3.from_int(2))


@given(st.integers(0, 80), st.integers(0, 80), st.integers(0, 80))
@settings(max_examples=50, deadline=None)
def test_ring_axioms_random(x, y, z):
    ctx = LocalRingCtx(3, 1, 2, N=4)
    a, b, c = ctx.from_int(x), ctx.from_int(y), ctx.from_int(z)
    assert (a + b) * c == a * c + b * c
    assert a * (b * c) == (a * b) * c
    assert a + b == b + a


@given(st.lists(st.integers(0, 8), min_size=0, max_size=4))
@settings(max_examples=60, deadline=None)
def test_digit_addition_associative(codes):
    # I_n addition with carries, via roundtrip: from_digits is a bijection onto O/ϖ^n
    ctx = LocalRingCtx(3, 2, 1, N=6)
    n = len(codes)
    d = make_digits(ctx, codes)
    a = from_digits(d)
    assert digits(a, n).codes == tuple(codes)
