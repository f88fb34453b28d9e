import random
from fractions import Fraction
from math import gcd

import pytest

from dedesum.characters import CharacterPair, enumerate_primitive, parse_label
from dedesum.cyclotomic import CyclotomicNumber
from dedesum.dedekind import EVALUATORS, DedekindContext, classical_sum, nonintegrality_scan
from dedesum.errors import CoprimalityError, DivisibilityError, MembershipError, PositivityError
from dedesum.modgroup import I, T, SL2Matrix, complete_column, random_gamma0, random_gamma1
from dedesum.numtheory import sawtooth


def ctx_of(l1, l2, **kw):
    return DedekindContext(CharacterPair(parse_label(l1), parse_label(l2)), **kw)


def definition(ctx, a, c):
    """sum_{j mod c} sum_{n mod q1} conj chi2(j) conj chi1(n) B1(j/c) B1(n/q1 + a j/c)."""
    chi1, chi2 = ctx.pair.chi1.conjugate(), ctx.pair.chi2.conjugate()
    m = ctx.m
    total = CyclotomicNumber.zero(m)
    for j in range(c):
        v2 = chi2(j, m)
        if v2.is_zero():
            continue
        bj = sawtooth(Fraction(j, c))
        for n in range(ctx.q1):
            v1 = chi1(n, m)
            if v1.is_zero():
                continue
            total = total + v2 * v1 * (bj * sawtooth(Fraction(n, ctx.q1) + Fraction(a * j, c)))
    return total


PAIRS = [("3.2", "7.6"), ("5.4", "8.5"), ("5.4", "7.2"), ("5.2", "5.3"), ("7.6", "11.10"), ("4.3", "3.2")]


@pytest.fixture(scope="module")
def q37():
    return ctx_of("3.2", "7.6")


def test_definition_on_3_7(q37):
    for a in range(21):
        if gcd(a, 21) != 1:
            continue
        expected = definition(q37, a, 21)
        for f in EVALUATORS:
            assert q37.eval_ac(a, 21, f) == expected, (a, f)


def test_regression_value(q37):
    # S(1, 21) for the quadratic pair mod 3, 7, established by the defining sum
    v0 = definition(q37, 1, 21)
    assert v0 == 0
    assert q37.eval_ac(1, 21) == v0
    assert q37.eval(SL2Matrix(1, 0, 21, 1)) == v0
    assert q37.eval_ac(2, 21) == definition(q37, 2, 21) == Fraction(2, 3)


def test_depends_on_a_mod_c(q37):
    for t in (-3, 1, 5):
        for k in (1, 5):
            c = 21 * k
            assert q37.eval_ac(22 + c * t, c) == q37.eval_ac(22, c)


def test_random_formula_agreement():
    rng = random.Random("agreement")
    for l1, l2 in PAIRS[:5]:
        ctx = ctx_of(l1, l2)
        for _ in range(40):
            g = random_gamma0(ctx.N, rng, max_r=5)
            a, c = g.a, abs(g.c)
            values = {f: ctx.eval_ac(a, c, f) for f in EVALUATORS}
            assert len(set(values.values())) == 1, (ctx.pair.label, a, c, values)
            r = c // ctx.N
            assert (values["floor"] * (r * ctx.q1)).is_integral()


def test_definition_oracle_random():
    rng = random.Random("oracle")
    for l1, l2 in PAIRS:
        ctx = ctx_of(l1, l2)
        for _ in range(3):
            g = random_gamma0(ctx.N, rng, max_r=2)
            assert ctx.eval_ac(g.a, abs(g.c)) == definition(ctx, g.a, abs(g.c))


def test_vanishing_and_nonintegrality():
    rng = random.Random("vanish")
    for l1, l2 in PAIRS:
        ctx = ctx_of(l1, l2)
        for _ in range(10):
            g = random_gamma0(ctx.N, rng)
            assert ctx.vanishing_sum(g.a, abs(g.c)).is_zero()
            assert nonintegrality_scan(ctx.q1, ctx.q2, g.a, abs(g.c)) == []


def test_eval_conventions(q37):
    assert q37.eval(T) == 0
    assert q37.eval(I) == 0
    rng = random.Random(5)
    for _ in range(20):
        g = random_gamma0(21, rng)
        assert q37.eval(g) == q37.eval(-g)


def test_errors(q37):
    with pytest.raises(PositivityError):
        q37.eval_ac(1, 0)
    with pytest.raises(PositivityError):
        q37.eval_ac(1, -21)
    with pytest.raises(DivisibilityError):
        q37.eval_ac(1, 20)
    with pytest.raises(CoprimalityError):
        q37.eval_ac(3, 21)
    with pytest.raises(MembershipError):
        q37.eval(SL2Matrix(1, 0, 1, 1))
    assert issubclass(PositivityError, DivisibilityError)


def test_classical_sum():
    assert classical_sum(1, 3) == Fraction(1, 18)
    assert all(classical_sum(h, 1) == 0 for h in range(-5, 6))
    rng = random.Random("classical")
    for _ in range(500):
        k = rng.randint(1, 100)
        h = rng.randint(-1000, 1000)
        while gcd(h, k) != 1:
            h = rng.randint(-1000, 1000)
        s = classical_sum(h, k)
        assert (s * 2 * k * gcd(3, k)).denominator == 1
        if k <= 30:
            assert s == sum(sawtooth(Fraction(j, k)) * sawtooth(Fraction(h * j, k)) for j in range(k))


def test_crossed_homomorphism(q37):
    rng = random.Random("crossed")
    for _ in range(100):
        g1, g2 = random_gamma0(21, rng, max_r=3), random_gamma0(21, rng, max_r=3)
        assert q37.crossed_hom_defect(g1, g2) == 0
        assert q37.crossed_hom_defect(g1, I) == 0
        h1, h2 = random_gamma1(21, rng, max_r=3), random_gamma1(21, rng, max_r=3)
        assert q37.eval(h1 @ h2) == q37.eval(h1) + q37.eval(h2)


def test_crossed_homomorphism_higher_order():
    ctx = ctx_of("5.2", "5.3")
    rng = random.Random("crossed-i")
    for _ in range(40):
        g1, g2 = random_gamma0(25, rng, max_r=2), random_gamma0(25, rng, max_r=2)
        assert ctx.crossed_hom_defect(g1, g2) == 0


def test_psi():
    ctx = ctx_of("7.6", "11.10")
    rng = random.Random("psi")
    for _ in range(30):
        assert ctx.psi(random_gamma1(77, rng)) == 1
        g1, g2 = random_gamma0(77, rng), random_gamma0(77, rng)
        assert ctx.psi(g1) in (1, -1)
        assert ctx.psi(g1 @ g2) == ctx.psi(g1) * ctx.psi(g2)


def test_even_reciprocity():
    ctx = ctx_of("5.4", "8.5")
    assert ctx.pair.parity == 1
    rng = random.Random("even")
    for _ in range(100):
        g = random_gamma0(40, rng)
        g = g if g.c > 0 else -g
        assert ctx.reciprocity_defect(g) == 0
    with pytest.raises(ValueError):
        ctx.reciprocity_constant(rng)


@pytest.mark.parametrize("l2, expected", [("11.10", 1), ("23.22", 3)])
def test_odd_quadratic_reciprocity_constant(l2, expected):
    ctx = ctx_of("7.6", l2)
    C = ctx.reciprocity_constant(random.Random(l2))
    assert C == expected == ctx.class_number_constant()
    assert C == ctx.reciprocity_constant_closed_form()


def test_reciprocity_with_b_zero():
    # gamma = (1, 0; rN, 1) has dual (1, -r; 0, 1) with lower-left entry 0
    for l1, l2 in [("3.2", "7.6"), ("7.6", "11.10"), ("5.4", "8.5")]:
        ctx = ctx_of(l1, l2)
        for r in (1, 2, 5):
            g = SL2Matrix(1, 0, r * ctx.N, 1)
            assert ctx.reciprocity_defect(g) == 0  # psi(g) = 1 here


def test_reciprocity_constant_non_quadratic():
    # odd characters of order 4 mod 5 and order 6 mod 7: closed form vs the analytic value
    odd5 = [c for c in enumerate_primitive(5) if not c.is_even and c.order == 4][0]
    odd7 = [c for c in enumerate_primitive(7) if not c.is_even and c.order == 6][0]
    ctx = DedekindContext(CharacterPair(odd5, odd7))
    C = ctx.reciprocity_constant(random.Random("nq"), confirm=2)
    assert C == ctx.reciprocity_constant_closed_form()
    assert abs(ctx.reciprocity_constant_analytic() - C.to_complex()) < 1e-8
    rng = random.Random("nq-defect")
    for _ in range(10):
        g = random_gamma0(35, rng)
        g = g if g.c > 0 else -g
        assert ctx.reciprocity_defect(g) == (1 - ctx.psi(g)) * C


def test_denominator_reports():
    ctx = ctx_of("3.2", "7.6")
    rng = random.Random("den")
    for _ in range(50):
        rep = ctx.denominator_report(random_gamma1(21, rng))
        assert rep.condition == "gamma1" and rep.integral_ok and rep.ok
    ctx = ctx_of("5.4", "8.5")
    assert not ctx.satisfies_gamma0_condition()
    g = complete_column(3, 40)
    rep = ctx.denominator_report(g)
    assert rep.condition is None and rep.gcd_bound_ok is None and rep.rq1_ok


def test_gamma0_bound_for_odd_quadratics():
    ctx = ctx_of("7.6", "11.10")
    assert ctx.satisfies_gamma0_condition()
    rng = random.Random("g0")
    for _ in range(50):
        rep = ctx.denominator_report(random_gamma0(77, rng))
        assert rep.ok and rep.gcd_bound_ok


def test_paranoid_mode():
    ctx = ctx_of("5.4", "7.2", paranoid=True)
    rng = random.Random("paranoid")
    for _ in range(5):
        g = random_gamma0(35, rng)
        ctx.eval(g)
