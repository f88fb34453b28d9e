"""Exact arithmetic in the cyclotomic field Q(zeta_m).

Elements are stored in the power basis 1, z, ..., z^(phi(m)-1) of
Q[x]/(Phi_m).  Because that basis is an integral basis of Z[zeta_m],
an element is an algebraic integer exactly when all its coordinates are
integers.
"""

from __future__ import annotations

import cmath
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm
from numbers import Rational
from typing import Iterable, Sequence

__all__ = [
    "CyclotomicNumber",
    "CyclotomicPolynomial",
    "ModulusMismatchError",
    "cyclotomic_polynomial",
    "root_of_unity",
    "power_table",
    "euler_phi",
]


class ModulusMismatchError(ValueError):
    """Raised when combining elements of different cyclotomic fields."""


def euler_phi(n: int) -> int:
    result, k, p = n, n, 2
    while p * p <= k:
        if k % p == 0:
            while k % p == 0:
                k //= p
            result -= result // p
        p += 1
    if k > 1:
        result -= result // k
    return result


@dataclass(frozen=True)
class CyclotomicPolynomial:
    index: int
    coeffs: tuple[int, ...]  # constant term first

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __str__(self) -> str:
        terms = []
        for k in range(self.degree, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            mono = "" if k == 0 else ("x" if k == 1 else f"x^{k}")
            if mono and abs(c) == 1:
                body = mono
            else:
                body = f"{abs(c)}{mono}"
            sign = "-" if c < 0 else "+"
            terms.append((sign, body))
        if not terms:
            return "0"
        first_sign, first = terms[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out


def _poly_divexact(num: list[int], den: Sequence[int]) -> list[int]:
    # Both monic-compatible integer polynomials, constant term first.
    num = list(num)
    dn = len(den) - 1
    lead = den[-1]
    out = [0] * (len(num) - dn)
    for k in range(len(out) - 1, -1, -1):
        q, rem = divmod(num[k + dn], lead)
        if rem:
            raise ArithmeticError("polynomial division is not exact")
        out[k] = q
        if q:
            for i, c in enumerate(den):
                num[k + i] -= q * c
    if any(num[:dn]):
        raise ArithmeticError("polynomial division is not exact")
    return out


@lru_cache(maxsize=None)
def cyclotomic_polynomial(m: int) -> CyclotomicPolynomial:
    """Phi_m by exact division of x^m - 1 by Phi_d for the proper divisors d."""
    if m < 1:
        raise ValueError(f"cyclotomic index must be positive, got {m}")
    poly = [-1] + [0] * (m - 1) + [1]
    for d in range(1, m):
        if m % d == 0:
            poly = _poly_divexact(poly, cyclotomic_polynomial(d).coeffs)
    return CyclotomicPolynomial(m, tuple(poly))


@lru_cache(maxsize=None)
def power_table(m: int) -> tuple[tuple[int, ...], ...]:
    """Integer power-basis coordinates of zeta_m^k for k = 0..m-1."""
    phi = cyclotomic_polynomial(m)
    n = phi.degree
    rows = []
    cur = [0] * n
    cur[0] = 1
    for _ in range(m):
        rows.append(tuple(cur))
        # multiply by x, then reduce x^n = -(c_0 + ... + c_{n-1} x^{n-1})
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            for i in range(n):
                cur[i] -= top * phi.coeffs[i]
    return tuple(rows)


def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    raise TypeError(f"cannot use {type(x).__name__} as an exact rational")


_TEXT_RE = re.compile(r"^\s*(\d+)\s*:\s*\[(.*)\]\s*$")


class CyclotomicNumber:
    """An immutable element of Q(zeta_m) in the power basis mod Phi_m."""

    __slots__ = ("m", "coeffs", "_hash")

    def __init__(self, m: int, coeffs: Iterable):
        if m < 1:
            raise ValueError(f"cyclotomic index must be positive, got {m}")
        cs = tuple(_to_fraction(c) for c in coeffs)
        n = cyclotomic_polynomial(m).degree
        if len(cs) != n:
            raise ValueError(f"expected {n} coefficients for m={m}, got {len(cs)}")
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "coeffs", cs)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("CyclotomicNumber is immutable")

    def __reduce__(self):
        return (CyclotomicNumber, (self.m, self.coeffs))

    # construction helpers

    @classmethod
    def zero(cls, m: int) -> CyclotomicNumber:
        return cls(m, [0] * cyclotomic_polynomial(m).degree)

    @classmethod
    def rational(cls, value, m: int = 1) -> CyclotomicNumber:
        n = cyclotomic_polynomial(m).degree
        return cls(m, [value] + [0] * (n - 1))

    @classmethod
    def from_exponent_counts(cls, m: int, counts: Sequence[int], denominator: int = 1) -> CyclotomicNumber:
        """Build (sum_k counts[k] * zeta_m^k) / denominator.

        ``counts`` is indexed by exponent mod m (an element of Z[C_m]); this
        is how the Dedekind-sum kernels hand back their integer tallies.
        """
        table = power_table(m)
        n = len(table[0])
        acc = [0] * n
        for k, w in enumerate(counts):
            if w:
                row = table[k % m]
                for i in range(n):
                    if row[i]:
                        acc[i] += w * row[i]
        return cls(m, [Fraction(v, denominator) for v in acc])

    # basic queries

    @property
    def degree(self) -> int:
        return len(self.coeffs)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    def denominator(self) -> int:
        return lcm(*(c.denominator for c in self.coeffs))

    def coordinates(self) -> tuple[Fraction, ...]:
        return self.coeffs

    def __iter__(self):
        return iter(self.coeffs)

    # arithmetic

    def _coerce(self, other) -> CyclotomicNumber:
        if isinstance(other, CyclotomicNumber):
            if other.m != self.m:
                raise ModulusMismatchError(
                    f"cannot combine elements of Q(zeta_{self.m}) and Q(zeta_{other.m}); lift first"
                )
            return other
        if isinstance(other, (int, Rational)):
            return CyclotomicNumber.rational(other, self.m)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CyclotomicNumber(self.m, [x + y for x, y in zip(self.coeffs, other.coeffs)])

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CyclotomicNumber(self.m, [x - y for x, y in zip(self.coeffs, other.coeffs)])

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __neg__(self):
        return CyclotomicNumber(self.m, [-x for x in self.coeffs])

    def __pos__(self):
        return self

    def __mul__(self, other):
        if isinstance(other, (int, Rational)) and not isinstance(other, CyclotomicNumber):
            f = _to_fraction(other)
            return CyclotomicNumber(self.m, [x * f for x in self.coeffs])
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        n = self.degree
        prod = [Fraction(0)] * (2 * n - 1)
        for i, x in enumerate(self.coeffs):
            if x:
                for j, y in enumerate(other.coeffs):
                    if y:
                        prod[i + j] += x * y
        table = power_table(self.m)
        acc = list(prod[:n])
        for k in range(n, 2 * n - 1):
            w = prod[k]
            if w:
                row = table[k % self.m]
                for i in range(n):
                    if row[i]:
                        acc[i] += w * row[i]
        return CyclotomicNumber(self.m, acc)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Rational)) and not isinstance(other, CyclotomicNumber):
            f = _to_fraction(other)
            return CyclotomicNumber(self.m, [x / f for x in self.coeffs])
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def norm(self) -> Fraction:
        """Field norm down to Q: the product of all Galois conjugates."""
        return (self * self._other_conjugates()).coeffs[0]

    def _other_conjugates(self) -> CyclotomicNumber:
        out = CyclotomicNumber.rational(1, self.m)
        for k in range(2, self.m):
            if gcd(k, self.m) == 1:
                out = out * self.galois(k)
        return out

    def inverse(self) -> CyclotomicNumber:
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        rest = self._other_conjugates()
        return rest / (self * rest).coeffs[0]

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result = CyclotomicNumber.rational(1, self.m)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, CyclotomicNumber):
            return self.m == other.m and self.coeffs == other.coeffs
        if isinstance(other, (int, Rational)):
            return self.is_rational() and self.coeffs[0] == other
        return NotImplemented

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash((self.m, self.coeffs))
            object.__setattr__(self, "_hash", h)
        return h

    # Galois action and embeddings

    def galois(self, k: int) -> CyclotomicNumber:
        """Image under zeta -> zeta^k, gcd(k, m) = 1."""
        if gcd(k, self.m) != 1:
            raise ValueError(f"{k} is not a unit modulo {self.m}")
        table = power_table(self.m)
        n = self.degree
        acc = [Fraction(0)] * n
        for i, x in enumerate(self.coeffs):
            if x:
                row = table[(i * k) % self.m]
                for t in range(n):
                    if row[t]:
                        acc[t] += x * row[t]
        return CyclotomicNumber(self.m, acc)

    def conjugate(self) -> CyclotomicNumber:
        return self.galois(-1)

    def lift(self, m2: int) -> CyclotomicNumber:
        """The same field element written in Q(zeta_m2); requires m | m2."""
        if m2 % self.m:
            raise ModulusMismatchError(f"Q(zeta_{self.m}) does not embed in Q(zeta_{m2})")
        step = m2 // self.m
        table = power_table(m2)
        n = len(table[0])
        acc = [Fraction(0)] * n
        for i, x in enumerate(self.coeffs):
            if x:
                row = table[(i * step) % m2]
                for t in range(n):
                    if row[t]:
                        acc[t] += x * row[t]
        return CyclotomicNumber(m2, acc)

    def to_complex(self) -> complex:
        z = cmath.exp(2j * cmath.pi / self.m)
        acc = 0j
        for c in reversed(self.coeffs):
            acc = acc * z + float(c)
        return acc

    # text form "m:[c0,c1,...]"

    def to_text(self) -> str:
        return f"{self.m}:[" + ",".join(str(c) for c in self.coeffs) + "]"

    @classmethod
    def from_text(cls, text: str) -> CyclotomicNumber:
        match = _TEXT_RE.match(text)
        if not match:
            raise ValueError(f"malformed cyclotomic text form: {text!r}")
        m = int(match.group(1))
        body = match.group(2).strip()
        parts = [Fraction(p.strip()) for p in body.split(",")] if body else []
        return cls(m, parts)

    def __str__(self) -> str:
        terms = []
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            if k == 0:
                terms.append(str(c))
            else:
                mono = "z" if k == 1 else f"z^{k}"
                terms.append(mono if c == 1 else ("-" + mono if c == -1 else f"{c}*{mono}"))
        body = " + ".join(terms).replace("+ -", "- ") if terms else "0"
        return body if self.m <= 2 else f"{body}  (z = zeta_{self.m})"

    def __repr__(self) -> str:
        return f"CyclotomicNumber.from_text({self.to_text()!r})"


def root_of_unity(k: int, m: int) -> CyclotomicNumber:
    """zeta_m^k in the power basis of Q(zeta_m)."""
    return CyclotomicNumber(m, power_table(m)[k % m])
