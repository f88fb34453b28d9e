"""Dirichlet characters, labelled by exponent vectors or Conrey indices.

A character mod q is fixed by its exponent vector on the unit_group(q)
generators: chi(g_i) = zeta_{o_i}^{e_i}.  The generators follow Conrey's
choices, so the exponent vector of the Conrey character q.n is just the
discrete log of n, and the two labellings convert into each other freely.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from math import gcd, lcm

from .cyclotomic import CyclotomicNumber, root_of_unity
from .errors import CharacterError, ParityError
from .numtheory import divisors, unit_group

__all__ = [
    "DirichletCharacter",
    "CharacterPair",
    "parse_label",
    "enumerate_primitive",
    "valid_pairs",
    "gauss_sum",
    "bernoulli_b1",
]


@dataclass(frozen=True)
class DirichletCharacter:
    modulus: int
    exponents: tuple[int, ...]

    def __post_init__(self):
        if self.modulus < 1:
            raise CharacterError(f"modulus must be positive, got {self.modulus}")
        orders = unit_group(self.modulus).orders
        if len(self.exponents) != len(orders):
            raise CharacterError(
                f"modulus {self.modulus} needs {len(orders)} exponents, got {len(self.exponents)}"
            )
        reduced = tuple(int(e) % o for e, o in zip(self.exponents, orders))
        object.__setattr__(self, "exponents", reduced)

    # labels

    @classmethod
    def from_conrey(cls, q: int, n: int) -> DirichletCharacter:
        if q < 1 or gcd(n, q) != 1:
            raise CharacterError(f"Conrey label {q}.{n} needs gcd(n, q) = 1")
        log = unit_group(q).log(n)
        return cls(q, log)

    @property
    def conrey_index(self) -> int:
        ug = unit_group(self.modulus)
        if self.modulus == 1:
            return 1
        # Conrey's n is the unit whose discrete log equals the exponent vector
        return ug.element(self.exponents)

    @property
    def label(self) -> str:
        return f"{self.modulus}.{self.conrey_index}"

    @property
    def vector_label(self) -> str:
        return f"{self.modulus}:[" + ",".join(map(str, self.exponents)) + "]"

    def __str__(self) -> str:
        return self.label

    # invariants

    @cached_property
    def _value_exponents(self) -> tuple:
        """chi(n) = zeta_order^table[n], None where chi(n) = 0."""
        ug = unit_group(self.modulus)
        L = ug.exponent
        weights = [e * (L // o) for e, o in zip(self.exponents, ug.orders)]
        d = self.order
        step = L // d
        table = []
        for n in range(self.modulus):
            log = ug.log(n)
            if log is None:
                table.append(None)
            else:
                table.append((sum(w * k for w, k in zip(weights, log)) % L) // step)
        return tuple(table)

    @cached_property
    def order(self) -> int:
        ug = unit_group(self.modulus)
        return lcm(*(o // gcd(o, e) for e, o in zip(self.exponents, ug.orders))) if ug.orders else 1

    def value_exponent(self, n: int) -> int | None:
        return self._value_exponents[n % self.modulus]

    def value_exponents(self, m: int) -> tuple:
        """Exponents of chi(n) as powers of zeta_m (order | m), None for zeros."""
        if m % self.order:
            raise CharacterError(f"order {self.order} does not divide {m}")
        k = m // self.order
        return tuple(None if e is None else e * k for e in self._value_exponents)

    def __call__(self, n: int, m: int | None = None) -> CyclotomicNumber:
        """chi(n) as an element of Q(zeta_m), m defaulting to the order."""
        m = self.order if m is None else m
        e = self.value_exponents(m)[n % self.modulus]
        if e is None:
            return CyclotomicNumber.zero(m)
        return root_of_unity(e, m)

    evaluate = __call__

    @property
    def parity(self) -> int:
        if self.modulus <= 2:
            return 1
        e = self.value_exponent(-1)
        return 1 if e == 0 else -1

    @property
    def is_even(self) -> bool:
        return self.parity == 1

    @property
    def is_trivial(self) -> bool:
        return not any(self.exponents)

    @cached_property
    def conductor(self) -> int:
        q = self.modulus
        for f in divisors(q):
            if all(
                self.value_exponent(n) == 0
                for n in range(1, q, f)
                if gcd(n, q) == 1
            ):
                return f
        return q

    @property
    def is_primitive(self) -> bool:
        return self.conductor == self.modulus

    def conjugate(self) -> DirichletCharacter:
        return DirichletCharacter(self.modulus, tuple(-e for e in self.exponents))

    def __mul__(self, other: DirichletCharacter) -> DirichletCharacter:
        if other.modulus != self.modulus:
            raise CharacterError("characters must share a modulus to multiply")
        return DirichletCharacter(
            self.modulus, tuple(a + b for a, b in zip(self.exponents, other.exponents))
        )

    def __pow__(self, k: int) -> DirichletCharacter:
        return DirichletCharacter(self.modulus, tuple(k * e for e in self.exponents))

    def primitive_part(self) -> DirichletCharacter:
        """The primitive character mod the conductor that induces self."""
        f = self.conductor
        q = self.modulus
        ug = unit_group(f)
        d = self.order
        exps = []
        for g, o in zip(ug.generators, ug.orders):
            n = g
            while gcd(n, q) != 1:
                n += f
            e = self.value_exponent(n)
            # chi(n) = zeta_d^e has order dividing o
            exps.append((e * o) // d)
        return DirichletCharacter(f, tuple(exps))

    def induce(self, q: int) -> DirichletCharacter:
        """The character mod q (a multiple of the modulus) induced by self."""
        if q % self.modulus:
            raise CharacterError(f"{self.modulus} does not divide {q}")
        ug = unit_group(q)
        d = self.order
        exps = []
        for g, o in zip(ug.generators, ug.orders):
            e = self.value_exponent(g)
            exps.append((e * o) // d)
        return DirichletCharacter(q, tuple(exps))


_CONREY_RE = re.compile(r"^\s*(\d+)\.(\d+)\s*$")
_VECTOR_RE = re.compile(r"^\s*(\d+)\s*:\s*\[([-\d,\s]*)\]\s*$")


def parse_label(text: str) -> DirichletCharacter:
    """Parse "q.n" (Conrey) or "q:[e1,e2,...]" (exponent vector)."""
    m = _CONREY_RE.match(text)
    if m:
        return DirichletCharacter.from_conrey(int(m.group(1)), int(m.group(2)))
    m = _VECTOR_RE.match(text)
    if m:
        body = m.group(2).strip()
        exps = tuple(int(x) for x in body.split(",")) if body else ()
        return DirichletCharacter(int(m.group(1)), exps)
    raise CharacterError(f"unrecognised character label {text!r}")


def enumerate_characters(q: int) -> list[DirichletCharacter]:
    orders = unit_group(q).orders
    return [DirichletCharacter(q, exps) for exps in product(*(range(o) for o in orders))]


def enumerate_primitive(q: int) -> list[DirichletCharacter]:
    """All primitive characters mod q, lexicographic in the exponent vector."""
    return [chi for chi in enumerate_characters(q) if chi.is_primitive]


@dataclass(frozen=True)
class CharacterPair:
    """A pair (chi1, chi2) of nontrivial primitive characters of equal parity.

    ``bar1[n]`` / ``bar2[n]`` hold the exponents of conj(chi1)(n), conj(chi2)(n)
    as powers of zeta_m, m = lcm of the two orders; None marks a zero value.
    """

    chi1: DirichletCharacter
    chi2: DirichletCharacter
    m: int = field(init=False)
    bar1: tuple = field(init=False, repr=False, compare=False)
    bar2: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        for name, chi in (("chi1", self.chi1), ("chi2", self.chi2)):
            if chi.is_trivial:
                raise CharacterError(f"{name} = {chi.label} is trivial")
            if not chi.is_primitive:
                raise CharacterError(
                    f"{name} = {chi.label} is not primitive (conductor {chi.conductor})"
                )
        if self.chi1.parity * self.chi2.parity != 1:
            raise ParityError(
                f"chi1({self.chi1.label})(-1) * chi2({self.chi2.label})(-1) = -1; parities must agree"
            )
        m = lcm(self.chi1.order, self.chi2.order)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "bar1", _conj_exponents(self.chi1, m))
        object.__setattr__(self, "bar2", _conj_exponents(self.chi2, m))

    @property
    def q1(self) -> int:
        return self.chi1.modulus

    @property
    def q2(self) -> int:
        return self.chi2.modulus

    @property
    def level(self) -> int:
        return self.q1 * self.q2

    @property
    def label(self) -> str:
        return f"{self.chi1.label}x{self.chi2.label}"

    @property
    def parity(self) -> int:
        return self.chi1.parity

    def swapped(self) -> CharacterPair:
        return CharacterPair(self.chi2, self.chi1)

    def psi_exponent(self, d: int) -> int:
        """Exponent of chi1(d) * conj(chi2)(d) as a power of zeta_m."""
        e1 = self.chi1.value_exponents(self.m)[d % self.q1]
        e2 = self.bar2[d % self.q2]
        if e1 is None or e2 is None:
            raise CharacterError(f"psi is undefined at d = {d} (not a unit mod {self.level})")
        return (e1 + e2) % self.m


def _conj_exponents(chi: DirichletCharacter, m: int) -> tuple:
    return tuple(None if e is None else (-e) % m for e in chi.value_exponents(m))


def valid_pairs(q1: int, q2: int, orders: tuple[int | None, int | None] = (None, None)) -> list[CharacterPair]:
    """Every (chi1 mod q1, chi2 mod q2) primitive, nontrivial, of equal parity.

    ``orders`` optionally restricts the character orders, e.g. (2, 2) for
    quadratic pairs.
    """
    if q1 < 3 or q2 < 3:
        return []
    o1, o2 = orders
    firsts = [c for c in enumerate_primitive(q1) if o1 is None or c.order == o1]
    seconds = [c for c in enumerate_primitive(q2) if o2 is None or c.order == o2]
    return [
        CharacterPair(a, b)
        for a in firsts
        for b in seconds
        if a.parity == b.parity
    ]


def gauss_sum(chi: DirichletCharacter) -> CyclotomicNumber:
    """tau(chi) = sum_n chi(n) zeta_q^n in Q(zeta_lcm(order, q))."""
    if not chi.is_primitive:
        raise CharacterError(f"{chi.label} is not primitive")
    q = chi.modulus
    M = lcm(chi.order, q)
    exps = chi.value_exponents(M)
    counts = [0] * M
    step = M // q
    for n in range(q):
        e = exps[n]
        if e is not None:
            counts[(e + n * step) % M] += 1
    return CyclotomicNumber.from_exponent_counts(M, counts)


def bernoulli_b1(chi: DirichletCharacter) -> CyclotomicNumber:
    """B_{1,chi} = (1/q) sum_{a=0}^{q-1} chi(a) a, in Q(zeta_order)."""
    if chi.is_trivial:
        raise CharacterError("B_{1,chi} is only taken for nontrivial chi")
    q = chi.modulus
    d = chi.order
    counts = [0] * d
    for a in range(q):
        e = chi.value_exponent(a)
        if e is not None:
            counts[e] += a
    return CyclotomicNumber.from_exponent_counts(d, counts, q)
