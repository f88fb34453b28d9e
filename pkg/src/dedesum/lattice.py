"""Z-lattices inside Q(zeta_m) and the image S(Gamma1(q1 q2)).

A lattice is stored as (1/D) * rowspan(B) with B in row Hermite normal
form: pivots positive, strictly increasing pivot columns, entries above a
pivot reduced into [0, pivot).  D is made minimal, so two lattices are
equal exactly when (n, D, B) agree.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import Callable, Iterable, Sequence

from .characters import CharacterPair, parse_label
from .cyclotomic import CyclotomicNumber, ModulusMismatchError, euler_phi, power_table
from .dedekind import DedekindContext
from .modgroup import (
    gamma0_generators,
    gamma1_transversal_in_gamma0,
    random_gamma1,
    reduce_generator,
    schreier_generators,
)
from .numtheory import egcd

__all__ = [
    "hnf",
    "IntegerLattice",
    "lattice_from_values",
    "ring_lattice",
    "ImageReport",
    "image_lattice",
]


class _HNFBuilder:
    """Incremental row HNF; rows keyed by pivot column."""

    def __init__(self, n: int):
        self.n = n
        self.rows: dict[int, list[int]] = {}

    def add(self, vec: Sequence[int]) -> bool:
        v = list(vec)
        rows = self.rows
        changed = False
        for j in range(self.n):
            x = v[j]
            if not x:
                continue
            row = rows.get(j)
            if row is None:
                if x < 0:
                    v = [-t for t in v]
                rows[j] = v
                changed = True
                break
            p = row[j]
            if x % p == 0:
                q = x // p
                for t in range(j, self.n):
                    v[t] -= q * row[t]
                continue
            g, s, t_ = egcd(p, x)
            new = [s * row[t] + t_ * v[t] for t in range(self.n)]
            pg, xg = p // g, x // g
            v = [pg * v[t] - xg * row[t] for t in range(self.n)]
            rows[j] = new
            changed = True
        if changed:
            self._reduce()
        return changed

    def _reduce(self) -> None:
        rows = self.rows
        pivots = sorted(rows)
        for j in reversed(pivots):
            row = rows[j]
            if row[j] < 0:
                rows[j] = row = [-t for t in row]
        for idx, j in enumerate(pivots):
            row = rows[j]
            for k in pivots[idx + 1:]:
                p = rows[k][k]
                q = row[k] // p
                if q:
                    other = rows[k]
                    for t in range(k, self.n):
                        row[t] -= q * other[t]

    def contains(self, vec: Sequence[int]) -> bool:
        v = list(vec)
        for j in range(self.n):
            x = v[j]
            if not x:
                continue
            row = self.rows.get(j)
            if row is None or x % row[j]:
                return False
            q = x // row[j]
            for t in range(j, self.n):
                v[t] -= q * row[t]
        return True

    def basis(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(self.rows[j]) for j in sorted(self.rows))


def hnf(rows: Iterable[Sequence[int]]) -> list[list[int]]:
    """Row Hermite normal form of the integer row span (zero rows dropped)."""
    rows = [list(r) for r in rows]
    if not rows:
        return []
    b = _HNFBuilder(len(rows[0]))
    for r in rows:
        if len(r) != b.n:
            raise ValueError("rows must all have the same length")
        b.add(r)
    return [list(r) for r in b.basis()]


@dataclass(frozen=True)
class IntegerLattice:
    """(1/denominator) * rowspan(basis) inside Q^ambient_rank = Q(zeta_m)."""

    m: int
    denominator: int
    basis: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        D = self.denominator
        g = D
        for row in self.basis:
            for x in row:
                g = gcd(g, x)
        if g > 1:
            object.__setattr__(self, "denominator", D // g)
            object.__setattr__(self, "basis", tuple(tuple(x // g for x in row) for row in self.basis))

    @property
    def ambient_rank(self) -> int:
        return euler_phi(self.m)

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def is_full_rank(self) -> bool:
        return self.rank == self.ambient_rank

    def basis_elements(self) -> list[CyclotomicNumber]:
        return [CyclotomicNumber(self.m, [Fraction(x, self.denominator) for x in row]) for row in self.basis]

    def _scaled(self, x: CyclotomicNumber) -> list[int] | None:
        if x.m != self.m:
            raise ModulusMismatchError(f"lattice lives in Q(zeta_{self.m}), element in Q(zeta_{x.m})")
        out = []
        for c in x.coeffs:
            y = c * self.denominator
            if y.denominator != 1:
                return None
            out.append(y.numerator)
        return out

    def contains(self, x: CyclotomicNumber) -> bool:
        v = self._scaled(x)
        if v is None:
            return False
        b = _HNFBuilder(self.ambient_rank)
        b.rows = {next(j for j, t in enumerate(row) if t): list(row) for row in self.basis}
        return b.contains(v)

    __contains__ = contains

    def is_sublattice(self, other: IntegerLattice) -> bool:
        """self is contained in other."""
        return all(other.contains(x) for x in self.basis_elements())

    def equals(self, other: IntegerLattice) -> bool:
        return self.is_sublattice(other) and other.is_sublattice(self)

    def describe(self) -> str:
        """'2Z', '2Z[zeta_6]', '1/3Z' when the lattice is a scaled ring, else the basis."""
        n = self.ambient_rank
        if self.rank == n and self.basis:
            s = self.basis[0][0]
            if all(self.basis[i] == tuple(s if k == i else 0 for k in range(n)) for i in range(n)):
                scale = Fraction(s, self.denominator)
                ring = "Z" if self.m <= 2 else f"Z[zeta_{self.m}]"
                return (str(scale) if scale != 1 else "") + ring
        rows = ";".join(",".join(map(str, r)) for r in self.basis)
        return f"(1/{self.denominator})<{rows}>"

    def to_json(self) -> dict:
        return {"m": self.m, "D": self.denominator, "basis": [list(r) for r in self.basis]}


def _canonical(m: int, D: int, builder: _HNFBuilder) -> IntegerLattice:
    return IntegerLattice(m, D, builder.basis())


def lattice_from_values(values: Sequence[CyclotomicNumber], m: int | None = None) -> IntegerLattice:
    """The Z-span of the given field elements."""
    values = list(values)
    if m is None:
        if not values:
            raise ValueError("need m for an empty value list")
        m = values[0].m
    for v in values:
        if v.m != m:
            raise ModulusMismatchError("all values must live in the same Q(zeta_m)")
    D = lcm(1, *(v.denominator() for v in values))
    b = _HNFBuilder(euler_phi(m))
    for v in values:
        b.add([(c * D).numerator for c in v.coeffs])
    return _canonical(m, D, b)


def ring_lattice(m: int, scale=1) -> IntegerLattice:
    """scale * Z[zeta_m] for a rational scale."""
    scale = Fraction(scale)
    n = euler_phi(m)
    rows = tuple(tuple(scale.numerator if i == k else 0 for k in range(n)) for i in range(n))
    return IntegerLattice(m, scale.denominator, rows)


# image computation


@dataclass
class ImageReport:
    pair: str
    mode: str
    route: str
    generator_count: int
    lattice: IntegerLattice
    q1: int
    q2: int
    orders: tuple[int, int]
    evaluated: int = 0
    skipped: int = 0
    caveat: str | None = None
    timings: dict = field(default_factory=dict)
    cost: dict = field(default_factory=dict)

    @property
    def rank(self) -> int:
        return self.lattice.rank

    @property
    def verdicts(self) -> dict:
        L = self.lattice
        m = L.m
        g = gcd(self.q1, self.q2)
        return {
            "two_conj": L.equals(ring_lattice(m, 2)),
            "thm16": L.is_sublattice(ring_lattice(m, Fraction(1, g))),
            "integral": L.is_sublattice(ring_lattice(m, 1)),
            "full_rank": L.is_full_rank,
        }

    def to_json(self, timings: bool = False) -> dict:
        out = {
            "pair": self.pair,
            "q1": self.q1,
            "q2": self.q2,
            "orders": list(self.orders),
            "mode": self.mode,
            "route": self.route,
            "generators": self.generator_count,
            "m": self.lattice.m,
            "D": self.lattice.denominator,
            "basis": [list(r) for r in self.lattice.basis],
            "rank": self.rank,
            "image": self.lattice.describe(),
            "verdicts": self.verdicts,
            "cost": self.cost,
        }
        if self.skipped or self.caveat:
            out["skipped"] = self.skipped
            out["caveat"] = self.caveat
        if timings:
            out["timings"] = self.timings
        return out


def values_worker(args):
    """Evaluate one chunk of columns; picklable, so a process pool can run it."""
    label1, label2, evaluator, paranoid, mats = args
    ctx = DedekindContext(CharacterPair(parse_label(label1), parse_label(label2)), evaluator, paranoid)
    return [ctx.eval_ac(a, c).to_text() if c else None for a, c in mats]


def _evaluate_columns(ctx: DedekindContext, columns: list[tuple[int, int]], jobs: int,
                      mapper: Callable | None) -> list[CyclotomicNumber]:
    """S(a, c) for each (a, c) with c > 0 (or zero for c = 0).

    With a ``mapper`` (e.g. a pool's ``map``) the columns are split into
    ``jobs`` interleaved chunks; results come back in column order either way.
    """
    if mapper is None or jobs <= 1 or len(columns) < 2 * jobs:
        zero = CyclotomicNumber.zero(ctx.m)
        return [ctx.eval_ac(a, c) if c else zero for a, c in columns]
    chunks = [columns[i::jobs] for i in range(jobs)]
    p = ctx.pair
    args = [(p.chi1.label, p.chi2.label, ctx.evaluator, ctx.paranoid, ch) for ch in chunks]
    parts = list(mapper(values_worker, args))
    out: list = [None] * len(columns)
    zero = CyclotomicNumber.zero(ctx.m)
    for i, part in enumerate(parts):
        for k, text in enumerate(part):
            out[i + k * jobs] = zero if text is None else CyclotomicNumber.from_text(text)
    return out


def _cost(cols) -> dict:
    # evaluating S(a, c) costs O(c), so the c values are the cost profile
    cs = [c for _, c in cols]
    return {"sums": len(cs), "max_c": max(cs, default=0), "total_c": sum(cs)}


def _column(g) -> tuple[int, int]:
    g = reduce_generator(g)
    return (g.a, g.c)


def image_lattice(
    ctx: DedekindContext,
    mode: str = "exact",
    route: str = "auto",
    sample_budget: int = 200,
    rng=None,
    max_c: int | None = None,
    max_r: int = 24,
    jobs: int = 1,
    mapper: Callable | None = None,
) -> ImageReport:
    """S(Gamma1(q1 q2)) as a lattice.

    mode="exact" spans S over a generating set of Gamma1(N), which yields
    the whole image because S is a homomorphism there.  Two generating
    sets are available:

    * route="schreier": Schreier generators of Gamma1(N) in SL2(Z) from
      the S/T coset table, each evaluated directly;
    * route="tower": Schreier generators of Gamma0(N) together with a
      transversal rho_u of Gamma1(N) in Gamma0(N); the Gamma1 Schreier
      generator rho_u g rho_v^-1 then has value
      S(rho_u) + psi(u) S(g) - S(rho_v), so only |gens| + phi(N) sums
      are ever evaluated.

    "auto" picks schreier up to N = 60 and tower beyond.  mode="sampled"
    spans S over random Gamma1 elements with c = r*N, r <= max_r, a lower
    bound for the image (small r alone can miss directions: for 5.4x7.2,
    r <= 6 spans only a rank-1 sublattice).
    ``mapper`` and ``jobs`` let a caller fan evaluations out to workers.
    """
    N = ctx.N
    m = ctx.m
    pair = ctx.pair
    timings: dict = {}
    t0 = time.perf_counter()
    n = euler_phi(m)
    if mode == "sampled":
        if rng is None:
            raise ValueError("sampled mode needs an rng")
        cols = []
        skipped = 0
        for _ in range(sample_budget):
            g = random_gamma1(N, rng, max_r=max_r)
            col = _column(g)
            if max_c is not None and col[1] > max_c:
                skipped += 1
                continue
            cols.append(col)
        values = _evaluate_columns(ctx, cols, jobs, mapper)
        lat = lattice_from_values(values, m)
        timings["evaluate"] = time.perf_counter() - t0
        caveat = "lower bound: spanned by sampled elements only"
        return ImageReport(pair.label, mode, "sampled", len(cols), lat, pair.q1, pair.q2,
                           (pair.chi1.order, pair.chi2.order), len(cols), skipped, caveat, timings, _cost(cols))
    if mode != "exact":
        raise ValueError(f"unknown mode {mode!r}")
    if route == "auto":
        route = "schreier" if N <= 60 else "tower"
    if route == "schreier":
        gens = schreier_generators(N)
        cols = [_column(g) for g in gens]
        timings["generators"] = time.perf_counter() - t0
        values = _evaluate_columns(ctx, cols, jobs, mapper)
        timings["evaluate"] = time.perf_counter() - t0 - timings["generators"]
        lat = lattice_from_values(values, m)
        return ImageReport(pair.label, mode, route, len(gens), lat, pair.q1, pair.q2,
                           (pair.chi1.order, pair.chi2.order), len(cols), 0, None, timings, _cost(cols))
    if route != "tower":
        raise ValueError(f"unknown route {route!r}")
    gens = gamma0_generators(N)
    reps = gamma1_transversal_in_gamma0(N)
    units = sorted(reps)
    timings["generators"] = time.perf_counter() - t0
    cols = [_column(g) for g in gens] + [_column(reps[u]) for u in units]
    values = _evaluate_columns(ctx, cols, jobs, mapper)
    timings["evaluate"] = time.perf_counter() - t0 - timings["generators"]
    gen_vals = values[: len(gens)]
    rep_vals = dict(zip(units, values[len(gens):]))
    D = lcm(1, *(v.denominator() for v in values))

    def ints(v: CyclotomicNumber) -> tuple[int, ...]:
        return tuple((c * D).numerator for c in v.coeffs)

    table = power_table(m)
    # multiplication by zeta^e on the power basis, applied to integer vectors
    mult = [_mult_matrix(table, e, n) for e in range(m)]
    A = {u: ints(v) for u, v in rep_vals.items()}
    B = [ints(v) for v in gen_vals]
    rotB: dict = {}
    seen = set()
    builder = _HNFBuilder(n)
    count = 0
    for u in units:
        e = pair.psi_exponent(u)
        Au = A[u]
        for gi, g in enumerate(gens):
            key = (e, gi)
            Bg = rotB.get(key)
            if Bg is None:
                Bg = rotB[key] = _apply(mult[e], B[gi])
            v = (u * g.d) % N
            Av = A[v]
            vec = tuple(Au[t] + Bg[t] - Av[t] for t in range(n))
            count += 1
            if vec in seen:
                continue
            seen.add(vec)
            if any(vec):
                builder.add(vec)
    timings["assemble"] = time.perf_counter() - t0 - timings["generators"] - timings["evaluate"]
    lat = _canonical(m, D, builder)
    return ImageReport(pair.label, mode, route, count, lat, pair.q1, pair.q2,
                       (pair.chi1.order, pair.chi2.order), len(cols), 0, None, timings, _cost(cols))


def _mult_matrix(table, e: int, n: int) -> list[list[int]]:
    # column k = coordinates of zeta^(e + k)
    m = len(table)
    return [[table[(e + k) % m][i] for k in range(n)] for i in range(n)]


def _apply(M, v) -> tuple[int, ...]:
    return tuple(sum(M[i][k] * v[k] for k in range(len(v)) if v[k]) for i in range(len(M)))
