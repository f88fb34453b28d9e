"""Newform Dedekind sums S_{chi1,chi2}(a, c) and the identities they satisfy.

Four evaluators are provided.  Three are literal transcriptions of the
known formulas (sawtooth product, fractional-part product, floor form with
the 1/(r q1) prefactor) and serve as mutual oracles.  The fourth,
``eval_fast``, is the floor form regrouped so that the inner n-sum becomes
a table lookup: writing a*j = c*t + s with 0 <= s < c,

    floor(a j / c + n / q1) = t + [n >= ceil(q1 (c - s) / c)],

and the t-part dies against sum_n conj(chi1)(n) = 0.  What remains is an
integer tally indexed by (exponent of conj(chi2)(j), threshold), which
numpy accumulates in one pass over j.

All kernels tally integers against powers of zeta_m and only convert to
the power basis at the end, so nothing inexact ever enters.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import numpy as np

from .characters import CharacterPair, bernoulli_b1, gauss_sum
from .cyclotomic import CyclotomicNumber, root_of_unity
from .errors import (
    CoprimalityError,
    CrossCheckError,
    DivisibilityError,
    InconclusiveError,
    MembershipError,
    PositivityError,
)
from .modgroup import SL2Matrix, complete_column, dual_gamma, is_gamma0, is_gamma1
from .numtheory import class_number

__all__ = [
    "DedekindContext",
    "SumValue",
    "DenominatorReport",
    "classical_sum",
    "EVALUATORS",
]

EVALUATORS = ("fast", "floor", "fractional", "bernoulli")

# below this c the numpy float bincount is exact (tallies stay under 2**53)
_BINCOUNT_EXACT_C = 50_000_000
_NUMPY_MAX_C = 2**31


@dataclass(frozen=True)
class SumValue:
    value: CyclotomicNumber
    formula: str
    a: int
    c: int
    level: int

    @property
    def r(self) -> int:
        return self.c // self.level


@dataclass(frozen=True)
class DenominatorReport:
    value: CyclotomicNumber
    r: int
    rq1_ok: bool  # r*q1*S integral
    q1_bound_ok: bool | None  # q1*S integral
    q2_bound_ok: bool | None  # q2*S integral
    gcd_bound_ok: bool | None  # gcd(q1,q2)*S integral; None if no theorem applies
    integral_ok: bool | None  # S integral, only asserted when gcd(q1,q2) = 1
    condition: str | None  # "gamma1", "gamma0-quadratic-odd" or None

    @property
    def ok(self) -> bool:
        return all(v is not False for v in (self.rq1_ok, self.q1_bound_ok, self.q2_bound_ok,
                                             self.gcd_bound_ok, self.integral_ok))


class DedekindContext:
    """A validated character pair plus an evaluation policy.

    ``evaluator`` picks the default formula for :meth:`eval`; ``paranoid``
    re-evaluates every sum with the sawtooth definition and raises
    CrossCheckError on any disagreement.
    """

    def __init__(self, pair: CharacterPair, evaluator: str = "fast", paranoid: bool = False):
        if evaluator not in EVALUATORS:
            raise ValueError(f"unknown evaluator {evaluator!r}; choose from {EVALUATORS}")
        self.pair = pair
        self.evaluator = evaluator
        self.paranoid = paranoid
        self.q1 = pair.q1
        self.q2 = pair.q2
        self.N = pair.level
        self.m = pair.m
        self._units1 = [(n, e) for n, e in enumerate(pair.bar1) if e is not None]
        self._bar2 = pair.bar2
        self._bar2_arr = np.array([-1 if e is None else e for e in pair.bar2], dtype=np.int64)
        # tails[k][e] = #{n >= k : conj(chi1)(n) = zeta_m^e}
        tails = np.zeros((self.q1 + 1, self.m), dtype=np.int64)
        for n in range(self.q1 - 1, -1, -1):
            tails[n] = tails[n + 1]
            e = pair.bar1[n]
            if e is not None:
                tails[n, e] += 1
        self._tails = tails
        self._swapped = None

    @classmethod
    def from_characters(cls, chi1, chi2, **kw) -> DedekindContext:
        return cls(CharacterPair(chi1, chi2), **kw)

    def __repr__(self) -> str:
        return f"DedekindContext({self.pair.label}, evaluator={self.evaluator!r})"

    def swapped(self) -> DedekindContext:
        """Context for S_{chi2,chi1} (same level, n now runs mod q2)."""
        if self._swapped is None:
            self._swapped = DedekindContext(self.pair.swapped(), self.evaluator, self.paranoid)
        return self._swapped

    # preconditions

    def _check(self, a: int, c: int) -> None:
        if c <= 0:
            raise PositivityError(f"c must be positive, got {c}")
        if c % self.N:
            raise DivisibilityError(f"c = {c} is not a multiple of q1*q2 = {self.N}")
        if gcd(a, c) != 1:
            raise CoprimalityError(f"gcd(a, c) = gcd({a}, {c}) != 1")

    def _finish(self, counts, den: int) -> CyclotomicNumber:
        return CyclotomicNumber.from_exponent_counts(self.m, counts, den)

    # the literal formulas

    def eval_bernoulli(self, a: int, c: int) -> CyclotomicNumber:
        """sum_j sum_n conj(chi2)(j) conj(chi1)(n) B1(j/c) B1(n/q1 + a j/c)."""
        self._check(a, c)
        q1, q2, m = self.q1, self.q2, self.m
        cq1 = c * q1
        counts = [0] * m
        for j in range(1, c):
            e2 = self._bar2[j % q2]
            bj = 2 * j - c
            if e2 is None or bj == 0:
                continue
            ajq = a * j * q1
            for n, e1 in self._units1:
                u = (ajq + n * c) % cq1
                if u:
                    counts[(e1 + e2) % m] += bj * (2 * u - cq1)
        return self._finish(counts, 4 * c * cq1)

    def eval_fractional(self, a: int, c: int) -> CyclotomicNumber:
        """sum_j sum_n conj(chi2)(j) conj(chi1)(n) {j/c} {a j/c + n/q1}."""
        self._check(a, c)
        q1, q2, m = self.q1, self.q2, self.m
        cq1 = c * q1
        counts = [0] * m
        for j in range(1, c):
            e2 = self._bar2[j % q2]
            if e2 is None:
                continue
            ajq = a * j * q1
            for n, e1 in self._units1:
                counts[(e1 + e2) % m] += j * ((ajq + n * c) % cq1)
        return self._finish(counts, c * cq1)

    def eval_floor(self, a: int, c: int) -> CyclotomicNumber:
        """-(1/(r q1)) sum_j sum_n conj(chi2)(j) conj(chi1)(n) floor(j/q2) floor(a j/c + n/q1)."""
        self._check(a, c)
        q1, q2, m = self.q1, self.q2, self.m
        r = c // self.N
        cq1 = c * q1
        counts = [0] * m
        for j in range(q2, c):
            e2 = self._bar2[j % q2]
            if e2 is None:
                continue
            w = j // q2
            ajq = a * j * q1
            for n, e1 in self._units1:
                counts[(e1 + e2) % m] += w * ((ajq + n * c) // cq1)
        return self._finish(counts, -r * q1)

    def vanishing_sum(self, a: int, c: int) -> CyclotomicNumber:
        """Z = sum_j sum_n conj(chi2)(j) conj(chi1)(n) {a j/c + n/q1}, which is 0."""
        self._check(a, c)
        q1, q2, m = self.q1, self.q2, self.m
        cq1 = c * q1
        counts = [0] * m
        for j in range(c):
            e2 = self._bar2[j % q2]
            if e2 is None:
                continue
            ajq = a * j * q1
            for n, e1 in self._units1:
                counts[(e1 + e2) % m] += (ajq + n * c) % cq1
        return self._finish(counts, cq1)

    # the production kernel

    def eval_fast(self, a: int, c: int) -> CyclotomicNumber:
        self._check(a, c)
        q1, q2, m = self.q1, self.q2, self.m
        r = c // self.N
        a %= c
        if c < _NUMPY_MAX_C:
            weights = self._threshold_tally_numpy(a, c)
        else:
            weights = self._threshold_tally_python(a, c)
        counts = [0] * m
        tails = self._tails
        for e2, row in weights.items():
            # sum_k W[e2, k] * tails[k, :], rotated by e2
            acc = [0] * m
            for k, w in row:
                t = tails[k]
                for e in range(m):
                    if t[e]:
                        acc[e] += w * int(t[e])
            for e in range(m):
                if acc[e]:
                    counts[(e + e2) % m] += acc[e]
        return self._finish(counts, -r * q1)

    def _threshold_tally_numpy(self, a: int, c: int) -> dict:
        q1, q2, m = self.q1, self.q2, self.m
        j = np.arange(q2, c, dtype=np.int64)
        e2 = self._bar2_arr[j % q2]
        keep = e2 >= 0
        j = j[keep]
        e2 = e2[keep]
        s = (a * j) % c
        k = (q1 * (c - s) + c - 1) // c
        w = j // q2
        idx = e2 * (q1 + 1) + k
        size = m * (q1 + 1)
        if c < _BINCOUNT_EXACT_C:
            tally = np.rint(np.bincount(idx, weights=w.astype(np.float64), minlength=size)).astype(np.int64)
        else:
            tally = np.zeros(size, dtype=np.int64)
            np.add.at(tally, idx, w)
        tally = tally.reshape(m, q1 + 1)
        out = {}
        for e in range(m):
            row = tally[e]
            nz = np.nonzero(row[:q1])[0]
            if len(nz):
                out[e] = [(int(k_), int(row[k_])) for k_ in nz]
        return out

    def _threshold_tally_python(self, a: int, c: int) -> dict:
        q1, q2 = self.q1, self.q2
        tally: dict = {}
        for j in range(q2, c):
            e2 = self._bar2[j % q2]
            if e2 is None:
                continue
            s = (a * j) % c
            k = (q1 * (c - s) + c - 1) // c
            if k < q1:
                key = (e2, k)
                tally[key] = tally.get(key, 0) + j // q2
        out: dict = {}
        for (e2, k), w in sorted(tally.items()):
            out.setdefault(e2, []).append((k, w))
        return out

    # dispatch

    def eval_ac(self, a: int, c: int, formula: str | None = None) -> CyclotomicNumber:
        formula = formula or self.evaluator
        value = getattr(self, "eval_" + formula)(a, c)
        if self.paranoid and formula != "bernoulli":
            check = self.eval_bernoulli(a, c)
            if check != value:
                raise CrossCheckError(
                    f"{formula} and bernoulli disagree at (a, c) = ({a}, {c}) for {self.pair.label}"
                )
        return value

    def eval(self, g: SL2Matrix, formula: str | None = None) -> CyclotomicNumber:
        """S(g) for g in Gamma0(q1 q2); S = 0 when c = 0 and S(g) = S(-g)."""
        if not is_gamma0(g, self.N):
            raise MembershipError(f"{g} is not in Gamma0({self.N})")
        if g.c == 0:
            return CyclotomicNumber.zero(self.m)
        if g.c < 0:
            g = -g
        return self.eval_ac(g.a, g.c, formula)

    def sum_value(self, g: SL2Matrix, formula: str | None = None) -> SumValue:
        value = self.eval(g, formula)
        return SumValue(value, formula or self.evaluator, g.a, g.c, self.N)

    # identities

    def psi(self, g: SL2Matrix) -> CyclotomicNumber:
        """psi(g) = chi1(d) conj(chi2)(d) for g in Gamma0(q1 q2)."""
        if not is_gamma0(g, self.N):
            raise MembershipError(f"{g} is not in Gamma0({self.N})")
        return root_of_unity(self.pair.psi_exponent(g.d), self.m)

    def crossed_hom_defect(self, g1: SL2Matrix, g2: SL2Matrix) -> CyclotomicNumber:
        """S(g1 g2) - S(g1) - psi(g1) S(g2); identically zero."""
        for g in (g1, g2):
            if not is_gamma0(g, self.N):
                raise MembershipError(f"{g} is not in Gamma0({self.N})")
        return self.eval(g1 @ g2) - self.eval(g1) - self.psi(g1) * self.eval(g2)

    def reciprocity_defect(self, g: SL2Matrix) -> CyclotomicNumber:
        """S(g) - S'(g') for even pairs, S(g) + S'(g') for odd ones.

        S' is the sum with the characters swapped and g' = dual_gamma(g).
        Even pairs give 0; odd pairs give (1 - psi(g)) * reciprocity constant.
        """
        if not is_gamma0(g, self.N):
            raise MembershipError(f"{g} is not in Gamma0({self.N})")
        if g.c <= 0:
            raise PositivityError(f"reciprocity needs c >= 1, got c = {g.c}")
        dual = dual_gamma(g, self.N)
        other = self.swapped().eval(dual)
        if self.pair.parity == 1:
            return self.eval(g) - other
        return self.eval(g) + other

    def reciprocity_constant(self, rng, budget: int = 10_000, confirm: int = 5, max_r: int = 3):
        """The constant C with odd-pair reciprocity defect = (1 - psi(g)) * C.

        Found from the first sampled g with psi(g) != 1 and confirmed on
        ``confirm`` further samples; raises InconclusiveError if the budget
        runs out first.
        """
        if self.pair.parity != -1:
            raise ValueError("the reciprocity constant only exists for odd pairs")
        if all(self.pair.psi_exponent(u) == 0 for u in range(1, self.N) if gcd(u, self.N) == 1):
            raise InconclusiveError(f"psi is trivial on Gamma0({self.N}); the defect is identically 0")
        found = None
        confirmed = 0
        for _ in range(budget):
            g = _sample_gamma0(self.N, rng, max_r)
            psi = self.psi(g)
            if psi == 1:
                continue
            value = self.reciprocity_defect(g) / (1 - psi)
            if found is None:
                found = value
            elif value != found:
                raise CrossCheckError(
                    f"reciprocity defect is not (1 - psi) * const for {self.pair.label}: {found} vs {value}"
                )
            else:
                confirmed += 1
            if confirmed >= confirm:
                return found
        if found is None:
            raise InconclusiveError(f"no g with psi(g) != 1 found in {budget} draws")
        return found

    def reciprocity_constant_closed_form(self) -> CyclotomicNumber:
        """B_{1,conj chi1} * B_{1,conj chi2}, lifted to Q(zeta_m).

        Equal to tau(conj chi1) tau(conj chi2) L(1,chi1) L(1,chi2) / (pi i)^2
        for odd primitive chi1, chi2; for odd quadratic characters of
        conductor q > 4 each factor is -h(-q).
        """
        if self.pair.parity != -1:
            raise ValueError("the reciprocity constant only exists for odd pairs")
        b1 = bernoulli_b1(self.pair.chi1.conjugate()).lift(self.m)
        b2 = bernoulli_b1(self.pair.chi2.conjugate()).lift(self.m)
        return b1 * b2

    def reciprocity_constant_analytic(self) -> complex:
        """Floating-point tau tau L L / (pi i)^2 with L(1, chi) from the digamma function."""
        from scipy.special import digamma

        chi1, chi2 = self.pair.chi1, self.pair.chi2

        def L1(chi):
            q = chi.modulus
            total = 0j
            for a in range(1, q):
                v = chi(a).to_complex()
                if v:
                    total += v * digamma(a / q)
            return -total / q

        t1 = gauss_sum(chi1.conjugate()).to_complex()
        t2 = gauss_sum(chi2.conjugate()).to_complex()
        return t1 * t2 * L1(chi1) * L1(chi2) / (cmath.pi * 1j) ** 2

    def class_number_constant(self) -> int | None:
        """h(-q1) h(-q2) when both characters are odd quadratic with q > 4, else None."""
        p = self.pair
        if p.parity != -1 or p.chi1.order != 2 or p.chi2.order != 2:
            return None
        if self.q1 <= 4 or self.q2 <= 4 or self.q1 % 2 == 0 or self.q2 % 2 == 0:
            return None
        return class_number(self.q1) * class_number(self.q2)

    # denominators

    def satisfies_gamma0_condition(self) -> bool:
        """Quadratic characters with odd conductors q1, q2 > 4."""
        p = self.pair
        return (
            p.chi1.order == 2 and p.chi2.order == 2
            and self.q1 > 4 and self.q2 > 4
            and self.q1 % 2 == 1 and self.q2 % 2 == 1
        )

    def denominator_report(self, g: SL2Matrix) -> DenominatorReport:
        value = self.eval(g)
        c = abs(g.c)
        r = c // self.N
        rq1 = (value * (r * self.q1)).is_integral() if r else True
        if is_gamma1(g, self.N):
            condition = "gamma1"
        elif self.satisfies_gamma0_condition():
            condition = "gamma0-quadratic-odd"
        else:
            condition = None
        if condition is None:
            return DenominatorReport(value, r, rq1, None, None, None, None, None)
        g12 = gcd(self.q1, self.q2)
        return DenominatorReport(
            value,
            r,
            rq1,
            (value * self.q1).is_integral(),
            (value * self.q2).is_integral(),
            (value * g12).is_integral(),
            value.is_integral() if g12 == 1 else None,
            condition,
        )


def _sample_gamma0(N: int, rng, max_r: int) -> SL2Matrix:
    r = rng.randint(1, max_r)
    c = r * N
    while True:
        a = rng.randint(-2 * c, 2 * c)
        if gcd(a, c) == 1:
            return complete_column(a, c)


def classical_sum(h: int, k: int) -> Fraction:
    """s(h, k) = sum_{j mod k} B1(j/k) B1(h j/k)."""
    if k <= 0:
        raise PositivityError(f"k must be positive, got {k}")
    if gcd(h, k) != 1:
        raise CoprimalityError(f"gcd({h}, {k}) != 1")
    total = 0
    for j in range(1, k):
        u = (h * j) % k
        total += (2 * j - k) * (2 * u - k)
    return Fraction(total, 4 * k * k)


def nonintegrality_scan(q1: int, q2: int, a: int, c: int) -> list[tuple[int, int]]:
    """All (j, n) with q2 not dividing j and a j/c + n/q1 an integer (expected empty)."""
    bad = []
    cq1 = c * q1
    for j in range(c):
        if j % q2 == 0:
            continue
        for n in range(q1):
            if (a * j * q1 + n * c) % cq1 == 0:
                bad.append((j, n))
    return bad

