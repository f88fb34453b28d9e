import math
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dedesum.numtheory import (
    class_number,
    divisors,
    egcd,
    factorint,
    floor_sum,
    floor_sum_literal,
    fractional,
    is_squarefree,
    mobius,
    reduced_forms,
    sawtooth,
    unit_group,
)

rationals = st.fractions(min_value=-1000, max_value=1000, max_denominator=50)


def test_sawtooth_examples():
    assert sawtooth(0) == 0
    assert sawtooth(Fraction(1, 2)) == 0
    assert sawtooth(Fraction(-1, 3)) == Fraction(1, 6)


def test_fractional_examples():
    assert fractional(Fraction(7, 3)) == Fraction(1, 3)
    assert fractional(Fraction(-1, 4)) == Fraction(3, 4)


@given(rationals)
def test_sawtooth_odd_and_periodic(x):
    assert sawtooth(x) + sawtooth(-x) == 0
    assert sawtooth(x + 1) == sawtooth(x)


@given(rationals)
def test_fractional_reflection(x):
    if x.denominator != 1:
        assert fractional(-x) == 1 - fractional(x)


def test_floor_sum_examples():
    assert floor_sum(Fraction(3, 2), 3, 5) == 5
    assert floor_sum_literal(Fraction(3, 2), 3, 5) == 0 + 0 + 1 + 2 + 2
    assert floor_sum(0, 1, 1) == 0


def test_floor_sum_matches_literal_random():
    rng = random.Random("floor_sum")
    for _ in range(1000):
        N = rng.randint(1, 200)
        a = rng.choice([N, 2 * N, rng.randint(1, 400)])
        x = Fraction(rng.randint(-5000, 5000), rng.randint(1, 40))
        assert floor_sum(x, a, N) == floor_sum_literal(x, a, N), (x, a, N)


def test_floor_sum_a_equals_n():
    rng = random.Random("a=N")
    for _ in range(100):
        N = rng.randint(1, 150)
        x = Fraction(rng.randint(-3000, 3000), rng.randint(1, 30))
        assert floor_sum(x, N, N) == floor_sum_literal(x, N, N)


def test_factor_helpers():
    assert factorint(360) == ((2, 3), (3, 2), (5, 1))
    assert divisors(12) == [1, 2, 3, 4, 6, 12]
    assert [mobius(n) for n in range(1, 11)] == [1, -1, -1, 0, -1, 1, -1, 0, 0, 1]
    assert is_squarefree(30) and not is_squarefree(12)
    g, x, y = egcd(240, 46)
    assert g == 2 and 240 * x + 46 * y == 2


def test_unit_group_examples():
    G = unit_group(5)
    assert G.orders == (4,)
    assert pow(G.generators[0], 2, 5) != 1
    G = unit_group(8)
    assert G.orders == (2, 2)
    assert set(G.generators) == {7, 5}
    assert unit_group(1).order == 1


@pytest.mark.parametrize("q", range(1, 501))
def test_unit_group_generates(q):
    G = unit_group(q)
    phi = sum(1 for n in range(q) if math.gcd(n, q) == 1)
    assert G.order == phi
    # generated subgroup, by closure from the generators
    seen = {1 % q}
    frontier = [1 % q]
    while frontier:
        x = frontier.pop()
        for g in G.generators:
            y = x * g % q
            if y not in seen:
                seen.add(y)
                frontier.append(y)
    assert len(seen) == phi
    # log inverts element on units
    if q <= 100:
        for n in range(q):
            e = G.log(n)
            if math.gcd(n, q) == 1:
                assert G.element(e) == n % q
            else:
                assert e is None


def brute_class_number(q):
    # primitive reduced forms of discriminant -q, by direct search with a <= sqrt(q/3)
    D = -q
    count = 0
    a = 1
    while 3 * a * a <= q:
        for b in range(-a + 1, a + 1):
            if (b * b - D) % (4 * a):
                continue
            c = (b * b - D) // (4 * a)
            if c < a or (b < 0 and (a == c)) or math.gcd(math.gcd(a, b), c) != 1:
                continue
            count += 1
        a += 1
    return count


def test_class_number_examples():
    assert class_number(7) == 1
    assert class_number(23) == 3
    assert class_number(11) == 1


def test_class_number_one_list():
    qs = [q for q in range(5, 201) if q % 4 == 3 and is_squarefree(q)]
    ones = [q for q in qs if class_number(q) == 1]
    assert ones == [7, 11, 19, 43, 67, 163]
    for q in qs:
        assert class_number(q) == brute_class_number(q) >= 1


def test_reduced_forms_are_reduced():
    for a, b, c in reduced_forms(-23):
        assert b * b - 4 * a * c == -23
        assert abs(b) <= a <= c


def test_class_number_preconditions():
    for bad in (3, 4, 5, 12, 27):
        with pytest.raises(ValueError):
            class_number(bad)
