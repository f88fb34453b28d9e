"""Elementary exact number theory shared by the other modules."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import floor, gcd, lcm

__all__ = [
    "sawtooth",
    "fractional",
    "floor_sum",
    "floor_sum_literal",
    "factorint",
    "divisors",
    "mobius",
    "egcd",
    "UnitGroupStructure",
    "unit_group",
    "class_number",
    "is_squarefree",
    "reduced_forms",
]


def sawtooth(x) -> Fraction:
    """B_1(x): 0 on the integers, otherwise x - floor(x) - 1/2."""
    x = Fraction(x)
    if x.denominator == 1:
        return Fraction(0)
    return x - floor(x) - Fraction(1, 2)


def fractional(x) -> Fraction:
    x = Fraction(x)
    return x - floor(x)


def floor_sum(x, a: int, N: int) -> Fraction:
    """Closed form of sum_{k=0}^{N-1} floor((x + a*k)/N) for a, N >= 1."""
    if a < 1 or N < 1:
        raise ValueError("floor_sum needs a, N >= 1")
    x = Fraction(x)
    d = gcd(a, N)
    return d * floor(x / d) + Fraction((a - 1) * (N - 1), 2) + Fraction(d - 1, 2)


def floor_sum_literal(x, a: int, N: int) -> int:
    x = Fraction(x)
    return sum(floor((x + a * k) / N) for k in range(N))


@lru_cache(maxsize=4096)
def factorint(n: int) -> tuple[tuple[int, int], ...]:
    """Prime factorisation of n >= 1 as ((p, e), ...) with p ascending."""
    if n < 1:
        raise ValueError(f"cannot factor {n}")
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        p += 1 if p == 2 else 2
    if n > 1:
        out.append((n, 1))
    return tuple(out)


def divisors(n: int) -> list[int]:
    divs = [1]
    for p, e in factorint(n):
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def mobius(n: int) -> int:
    fs = factorint(n)
    if any(e > 1 for _, e in fs):
        return 0
    return -1 if len(fs) % 2 else 1


def is_squarefree(n: int) -> bool:
    return n >= 1 and all(e == 1 for _, e in factorint(n))


def egcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with a*x + b*y = g = gcd(a, b) >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def _crt_lift(residue: int, modulus: int, q: int) -> int:
    # the unit of (Z/q)^x that is `residue` mod `modulus` and 1 mod q/modulus
    other = q // modulus
    if other == 1:
        return residue % q
    _, u, v = egcd(modulus, other)
    # modulus*u + other*v = 1
    return (residue * other * v + modulus * u) % q


def _conrey_generator(p: int) -> int:
    """Least g that is a primitive root modulo every power of the odd prime p."""
    phi = p - 1
    primes = [r for r, _ in factorint(phi)]
    g = 2
    while True:
        if g % p and all(pow(g, phi // r, p) != 1 for r in primes):
            if pow(g, phi, p * p) != 1:
                return g
        g += 1


@dataclass(frozen=True)
class UnitGroupStructure:
    """(Z/q)^x as a product of cyclic factors.

    One factor per odd prime power (Conrey generator), one factor {-1} for
    4 | q, and the pair {-1, 5} for 8 | q.  ``local_moduli[i]`` is the
    prime power the i-th factor lives on; ``generators`` are CRT lifts to
    units mod q that are 1 on the other prime-power components.
    """

    modulus: int
    generators: tuple[int, ...]
    orders: tuple[int, ...]
    local_moduli: tuple[int, ...]
    local_generators: tuple[int, ...]

    @property
    def order(self) -> int:
        out = 1
        for o in self.orders:
            out *= o
        return out

    @property
    def exponent(self) -> int:
        return lcm(*self.orders) if self.orders else 1

    def element(self, exponents) -> int:
        out = 1
        for g, e in zip(self.generators, exponents):
            out = out * pow(g, e, self.modulus) % self.modulus
        return out % self.modulus if self.modulus > 1 else 0

    def log(self, n: int) -> tuple[int, ...] | None:
        """Exponent vector of n on the generators, or None for non-units."""
        return _log_table(self.modulus)[n % self.modulus]


@lru_cache(maxsize=None)
def unit_group(q: int) -> UnitGroupStructure:
    if q < 1:
        raise ValueError(f"modulus must be positive, got {q}")
    gens, orders, mods, local = [], [], [], []
    for p, e in factorint(q):
        pe = p**e
        if p == 2:
            if e >= 2:
                gens.append(_crt_lift(pe - 1, pe, q))
                orders.append(2)
                mods.append(pe)
                local.append(pe - 1)
            if e >= 3:
                gens.append(_crt_lift(5, pe, q))
                orders.append(2 ** (e - 2))
                mods.append(pe)
                local.append(5)
        else:
            g = _conrey_generator(p)
            gens.append(_crt_lift(g, pe, q))
            orders.append(pe - pe // p)
            mods.append(pe)
            local.append(g)
    return UnitGroupStructure(q, tuple(gens), tuple(orders), tuple(mods), tuple(local))


@lru_cache(maxsize=64)
def _log_table(q: int) -> tuple:
    """Discrete logs of every residue mod q on the unit_group generators."""
    ug = unit_group(q)
    table: list = [None] * q
    if q == 1:
        table[0] = ()
        return tuple(table)
    # per-factor logs: residue mod its local modulus -> exponent
    factor_logs = []
    for i, (pe, g, order) in enumerate(zip(ug.local_moduli, ug.local_generators, ug.orders)):
        if pe % 2 == 0 and g == 5:
            # 2-adic: n = +-5^k; log of the {5} factor ignores the sign
            logs = {}
            x = 1
            for k in range(order):
                logs[x] = k
                logs[(-x) % pe] = k
                x = x * 5 % pe
        elif pe % 2 == 0:
            # the {-1} factor for 4 | q: sign of n mod 4
            logs = {r: (0 if r % 4 == 1 else 1) for r in range(1, pe, 2)}
        else:
            logs = {}
            x = 1
            for k in range(order):
                logs[x] = k
                x = x * g % pe
        factor_logs.append((pe, logs))
    for n in range(q):
        if gcd(n, q) != 1:
            continue
        table[n] = tuple(logs[n % pe] for pe, logs in factor_logs)
    return tuple(table)


def reduced_forms(disc: int) -> list[tuple[int, int, int]]:
    """Reduced positive definite primitive forms (a, b, c) of discriminant disc < 0."""
    if disc >= 0 or disc % 4 not in (0, 1):
        raise ValueError(f"not a negative discriminant: {disc}")
    D = -disc
    forms = []
    a = 1
    while 3 * a * a <= D:
        for b in range(-a + 1, a + 1):
            num = b * b + D
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a:
                continue
            if b < 0 and a == c:
                continue
            if gcd(gcd(a, b), c) != 1:
                continue
            forms.append((a, b, c))
        a += 1
    return forms


def class_number(q: int) -> int:
    """h(-q) for squarefree q = 3 mod 4, q > 4, counted by reduced forms."""
    if q <= 4 or q % 4 != 3 or not is_squarefree(q):
        raise ValueError(f"class_number needs squarefree q = 3 (mod 4), q > 4; got {q}")
    return len(reduced_forms(-q))

