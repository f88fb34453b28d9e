"""Randomised and exhaustive verification suites.

Every suite draws from its own ``random.Random`` seeded with the string
"<seed>:<suite>:<pair label>", so adding or reordering suites never
perturbs the samples of another one.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from .cyclotomic import CyclotomicNumber
from .dedekind import EVALUATORS, DedekindContext, classical_sum, nonintegrality_scan
from .errors import InconclusiveError
from .modgroup import T, random_gamma0, random_gamma1
from .numtheory import floor_sum, floor_sum_literal

__all__ = ["SuiteResult", "PAIR_SUITES", "GLOBAL_SUITES", "substream", "run_pair_suite", "run_global_suite"]

ANALYTIC_TOL = 1e-8


def substream(seed: int, *labels) -> random.Random:
    return random.Random(":".join([str(seed), *map(str, labels)]))


@dataclass
class SuiteResult:
    suite: str
    pair: str | None
    checks: int = 0
    failures: int = 0
    messages: list = field(default_factory=list)
    info: dict = field(default_factory=dict)

    def check(self, ok: bool, message: str) -> None:
        self.checks += 1
        if not ok:
            self.failures += 1
            if len(self.messages) < 5:
                self.messages.append(message)

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def to_json(self) -> dict:
        out = {"suite": self.suite, "pair": self.pair, "checks": self.checks,
               "failures": self.failures, "passed": self.passed}
        if self.messages:
            out["messages"] = self.messages
        if self.info:
            out["info"] = self.info
        return out


def _positive(g):
    return g if g.c > 0 else -g


def suite_formulas(ctx: DedekindContext, rng, samples: int, max_r: int = 4) -> SuiteResult:
    """All evaluators agree, and r*q1*S is integral."""
    res = SuiteResult("formulas", ctx.pair.label)
    for _ in range(samples):
        g = _positive(random_gamma0(ctx.N, rng, max_r=max_r))
        a, c = g.a, g.c
        values = [ctx.eval_ac(a, c, f) for f in EVALUATORS]
        res.check(all(v == values[0] for v in values),
                  f"formula mismatch at (a, c) = ({a}, {c}): " + ", ".join(v.to_text() for v in values))
        r = c // ctx.N
        res.check((values[0] * (r * ctx.q1)).is_integral(),
                  f"r*q1*S not integral at ({a}, {c}): {values[0].to_text()}")
    return res


def suite_vanishing(ctx: DedekindContext, rng=None, samples: int = 0, max_c: int = 200) -> SuiteResult:
    """Exhaustive over c = r*N <= max_c and every a mod c coprime to c:
    the Z-sum vanishes and a j/c + n/q1 is never an integer when q2 does not divide j."""
    res = SuiteResult("vanishing", ctx.pair.label)
    c = ctx.N
    while c <= max_c:
        for a in range(c):
            if gcd(a, c) != 1:
                continue
            res.check(ctx.vanishing_sum(a, c).is_zero(), f"Z != 0 at ({a}, {c})")
            bad = nonintegrality_scan(ctx.q1, ctx.q2, a, c)
            res.check(not bad, f"integral a j/c + n/q1 at (a, c) = ({a}, {c}): {bad[:3]}")
        c += ctx.N
    return res


def suite_homomorphism(ctx: DedekindContext, rng, samples: int, max_r: int = 3) -> SuiteResult:
    """Crossed homomorphism on Gamma0 and plain additivity on Gamma1."""
    res = SuiteResult("homomorphism", ctx.pair.label)
    zero = CyclotomicNumber.zero(ctx.m)
    for _ in range(samples):
        g1 = random_gamma0(ctx.N, rng, max_r=max_r)
        g2 = random_gamma0(ctx.N, rng, max_r=max_r)
        d = ctx.crossed_hom_defect(g1, g2)
        res.check(d == zero, f"crossed-hom defect {d.to_text()} for {g1} / {g2}")
        h1 = random_gamma1(ctx.N, rng, max_r=max_r)
        h2 = random_gamma1(ctx.N, rng, max_r=max_r)
        lhs = ctx.eval(h1 @ h2)
        res.check(lhs == ctx.eval(h1) + ctx.eval(h2), f"S not additive on {h1} / {h2}")
    return res


def suite_invariance(ctx: DedekindContext, rng, samples: int, max_r: int = 3) -> SuiteResult:
    """S(T^k g) = S(g T^k) = S(g) = S(-g)."""
    res = SuiteResult("invariance", ctx.pair.label)
    for _ in range(samples):
        g = random_gamma0(ctx.N, rng, max_r=max_r)
        k = rng.randint(-5, 5)
        v = ctx.eval(g)
        res.check(ctx.eval((T ** k) @ g) == v, f"S(T^{k} g) != S(g) for {g}")
        res.check(ctx.eval(g @ (T ** k)) == v, f"S(g T^{k}) != S(g) for {g}")
        res.check(ctx.eval(-g) == v, f"S(-g) != S(g) for {g}")
    return res


def suite_reciprocity(ctx: DedekindContext, rng, samples: int, max_r: int = 3) -> SuiteResult:
    res = SuiteResult("reciprocity", ctx.pair.label)
    zero = CyclotomicNumber.zero(ctx.m)
    if ctx.pair.parity == 1:
        for _ in range(samples):
            g = _positive(random_gamma0(ctx.N, rng, max_r=max_r))
            d = ctx.reciprocity_defect(g)
            res.check(d == zero, f"even reciprocity defect {d.to_text()} at {g}")
        return res
    closed = ctx.reciprocity_constant_closed_form()
    try:
        C = ctx.reciprocity_constant(rng, confirm=1, max_r=max_r)
    except InconclusiveError as exc:
        # psi == 1 on all of Gamma0 (e.g. chi1 = chi2): the defect must then vanish
        res.info["constant"] = "inconclusive"
        res.info["reason"] = str(exc)
        C = None
    else:
        res.info["constant"] = C.to_text()
        res.check(C == closed, f"constant {C.to_text()} != B1*B1 = {closed.to_text()}")
        analytic = ctx.reciprocity_constant_analytic()
        res.check(abs(analytic - C.to_complex()) < ANALYTIC_TOL,
                  f"analytic constant {analytic} != {C.to_complex()}")
        h = ctx.class_number_constant()
        if h is not None:
            res.info["class_numbers"] = h
            res.check(C == h, f"constant {C.to_text()} != h(-q1) h(-q2) = {h}")
    for _ in range(samples):
        g = _positive(random_gamma0(ctx.N, rng, max_r=max_r))
        d = ctx.reciprocity_defect(g)
        expected = (1 - ctx.psi(g)) * (closed if C is None else C)
        res.check(d == expected, f"odd reciprocity defect {d.to_text()} != (1 - psi) C at {g}")
    return res


def suite_denominators(ctx: DedekindContext, rng, samples: int, max_r: int = 4) -> SuiteResult:
    """r q1 S integral always; the gcd(q1, q2) bound on Gamma1, and on Gamma0
    for quadratic characters with odd conductors > 4."""
    res = SuiteResult("denominators", ctx.pair.label)
    draws = [("gamma1", random_gamma1)]
    if ctx.satisfies_gamma0_condition():
        draws.append(("gamma0", random_gamma0))
    for name, draw in draws:
        for _ in range(samples):
            g = draw(ctx.N, rng, max_r=max_r)
            rep = ctx.denominator_report(g)
            res.check(rep.ok, f"denominator bound failed ({name}) at {g}: {rep}")
            res.check(rep.gcd_bound_ok is True, f"no theorem condition recognised for {name} sample {g}")
    return res


def suite_orthogonality(ctx: DedekindContext, rng, samples: int) -> SuiteResult:
    """Character sums vanish; separable double sums vanish."""
    res = SuiteResult("orthogonality", ctx.pair.label)
    chi1, chi2 = ctx.pair.chi1, ctx.pair.chi2
    for chi in (chi1, chi2):
        total = sum((chi(n, ctx.m) for n in range(chi.modulus)), CyclotomicNumber.zero(ctx.m))
        res.check(total.is_zero(), f"sum of {chi.label} is {total.to_text()}")
    for _ in range(samples):
        f1 = [Fraction(rng.randint(-50, 50), rng.randint(1, 9)) for _ in range(chi1.modulus)]
        f2 = [Fraction(rng.randint(-50, 50), rng.randint(1, 9)) for _ in range(chi2.modulus)]
        counts = [Fraction(0)] * ctx.m
        for mm in range(chi1.modulus):
            e1 = chi1.value_exponents(ctx.m)[mm]
            if e1 is None:
                continue
            for nn in range(chi2.modulus):
                e2 = chi2.value_exponents(ctx.m)[nn]
                if e2 is None:
                    continue
                counts[(e1 + e2) % ctx.m] += f1[mm] + f2[nn]
        den = 1
        for x in counts:
            den = den * x.denominator // gcd(den, x.denominator)
        total = CyclotomicNumber.from_exponent_counts(ctx.m, [int(x * den) for x in counts], den)
        res.check(total.is_zero(), f"separable double sum is {total.to_text()}")
    return res


def suite_floor_sum(rng, samples: int) -> SuiteResult:
    res = SuiteResult("floor_sum", None)
    for _ in range(samples):
        N = rng.randint(1, 200)
        if rng.random() < 0.3:
            a = N * rng.randint(1, 3) if rng.random() < 0.5 else N
        else:
            a = rng.randint(1, 300)
        x = Fraction(rng.randint(-10_000, 10_000), rng.randint(1, 60))
        closed = floor_sum(x, a, N)
        literal = floor_sum_literal(x, a, N)
        res.check(closed == literal, f"floor sum mismatch at x={x}, a={a}, N={N}: {closed} vs {literal}")
    return res


def suite_classical(rng, samples: int) -> SuiteResult:
    res = SuiteResult("classical", None)
    res.check(classical_sum(1, 3) == Fraction(1, 18), "s(1, 3) != 1/18")
    for _ in range(samples):
        k = rng.randint(1, 100)
        h = rng.randint(-500, 500)
        while gcd(h, k) != 1:
            h = rng.randint(-500, 500)
        s = classical_sum(h, k)
        res.check((s * 2 * k * gcd(3, k)).denominator == 1,
                  f"2k gcd(3,k) s({h},{k}) = {s * 2 * k * gcd(3, k)} not integral")
    return res


PAIR_SUITES = {
    "formulas": suite_formulas,
    "vanishing": suite_vanishing,
    "homomorphism": suite_homomorphism,
    "invariance": suite_invariance,
    "reciprocity": suite_reciprocity,
    "denominators": suite_denominators,
    "orthogonality": suite_orthogonality,
}

GLOBAL_SUITES = {
    "floor_sum": suite_floor_sum,
    "classical": suite_classical,
}


def run_pair_suite(name: str, ctx: DedekindContext, seed: int, samples: int) -> SuiteResult:
    rng = substream(seed, name, ctx.pair.label)
    return PAIR_SUITES[name](ctx, rng, samples)


def run_global_suite(name: str, seed: int, samples: int) -> SuiteResult:
    rng = substream(seed, name)
    return GLOBAL_SUITES[name](rng, samples)
