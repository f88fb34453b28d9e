"""SL2(Z) matrices, Gamma0/Gamma1 membership, coset tables and Schreier generators."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from math import gcd

from .errors import CoprimalityError, DivisibilityError, MembershipError, PositivityError
from .numtheory import egcd, factorint

__all__ = [
    "SL2Matrix",
    "S",
    "T",
    "I",
    "is_gamma0",
    "is_gamma1",
    "complete_column",
    "dual_gamma",
    "CosetTable",
    "coset_table",
    "gamma1_index",
    "gamma0_index",
    "schreier_generators",
    "reduce_generator",
    "gamma0_generators",
    "gamma1_transversal_in_gamma0",
    "random_gamma0",
    "random_gamma1",
]


@dataclass(frozen=True)
class SL2Matrix:
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.a * self.d - self.b * self.c != 1:
            raise ValueError(f"determinant of {self} is {self.a * self.d - self.b * self.c}, not 1")

    def __matmul__(self, o: SL2Matrix) -> SL2Matrix:
        return SL2Matrix(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )

    def inverse(self) -> SL2Matrix:
        return SL2Matrix(self.d, -self.b, -self.c, self.a)

    def __neg__(self) -> SL2Matrix:
        return SL2Matrix(-self.a, -self.b, -self.c, -self.d)

    def __pow__(self, k: int) -> SL2Matrix:
        base = self if k >= 0 else self.inverse()
        k = abs(k)
        out = I
        while k:
            if k & 1:
                out = out @ base
            base = base @ base
            k >>= 1
        return out

    def __str__(self) -> str:
        return f"{self.a},{self.b},{self.c},{self.d}"

    def to_list(self) -> list[int]:
        return [self.a, self.b, self.c, self.d]

    @classmethod
    def parse(cls, text: str) -> SL2Matrix:
        parts = [int(p) for p in text.replace(" ", "").split(",")]
        if len(parts) != 4:
            raise ValueError(f"matrix text form is 'a,b,c,d', got {text!r}")
        return cls(*parts)


I = SL2Matrix(1, 0, 0, 1)
S = SL2Matrix(0, -1, 1, 0)
T = SL2Matrix(1, 1, 0, 1)


def is_gamma0(g: SL2Matrix, N: int) -> bool:
    return g.c % N == 0


def is_gamma1(g: SL2Matrix, N: int) -> bool:
    return g.c % N == 0 and (g.a - 1) % N == 0 and (g.d - 1) % N == 0


def complete_column(a: int, c: int) -> SL2Matrix:
    """A matrix (a, b; c, d) of determinant 1, with 0 <= d < |c| when c != 0."""
    g, x, y = egcd(a, c)
    if g != 1:
        raise CoprimalityError(f"gcd({a}, {c}) = {g}; the column cannot be completed")
    if c == 0:
        # a = +-1
        return SL2Matrix(a, 0, 0, a)
    # a*x + c*y = 1  ->  d = x, b = -y
    d = x % abs(c)
    b = (a * d - 1) // c
    return SL2Matrix(a, b, c, d)


def dual_gamma(g: SL2Matrix, level: int) -> SL2Matrix:
    """The reciprocity partner (d, -r; -b*level, a) of g with c = r*level."""
    if g.c <= 0:
        raise PositivityError(f"dual_gamma needs c >= 1, got c = {g.c}")
    if g.c % level:
        raise DivisibilityError(f"c = {g.c} is not a multiple of {level}")
    r = g.c // level
    return SL2Matrix(g.d, -r, -g.b * level, g.a)


def reduce_generator(g: SL2Matrix) -> SL2Matrix:
    """T^k @ g with the top-left entry reduced into (-|c|/2, |c|/2], and c >= 0.

    Left multiplication by T^k keeps c and d, shifts a by k*c, so Gamma1
    membership is preserved; the Dedekind sum only sees (a mod c, c).
    """
    if g.c < 0:
        g = -g
    if g.c == 0:
        return g
    c = g.c
    k = -(g.a // c)
    a = g.a + k * c
    if 2 * a > c:
        a -= c
        k -= 1
    return SL2Matrix(a, g.b + k * g.d, c, g.d)


def gamma1_index(N: int) -> int:
    out = N * N
    for p, _ in factorint(N):
        out = out * (p * p - 1) // (p * p)
    return out


def gamma0_index(N: int) -> int:
    out = N
    for p, _ in factorint(N):
        out = out * (p + 1) // p
    return out


def _p1_label(c: int, d: int, N: int, units: tuple[int, ...]) -> tuple[int, int]:
    # least (u*c mod N, u*d mod N) over units u
    return min(((u * c) % N, (u * d) % N) for u in units)


@dataclass(frozen=True)
class CosetTable:
    """Right cosets H\\SL2(Z) for H = Gamma1(N) (or Gamma0(N)).

    Labels are bottom rows (c, d) mod N; for Gamma0 they are projective
    points, canonicalised as the least scalar multiple.  ``reps[i]`` is a
    BFS-tree representative with bottom row in class ``labels[i]``;
    ``action[g][i]`` is the label index of reps[i] @ g, g in ("S", "T").
    """

    level: int
    group: str
    labels: tuple[tuple[int, int], ...]
    reps: tuple[SL2Matrix, ...]
    action: dict

    @property
    def index(self) -> int:
        return len(self.labels)

    def label_of(self, g: SL2Matrix) -> tuple[int, int]:
        N = self.level
        if self.group == "gamma1":
            return (g.c % N, g.d % N)
        return _p1_label(g.c, g.d, N, _units(N))

    def position(self, g: SL2Matrix) -> int:
        return self._positions[self.label_of(g)]

    @property
    def _positions(self) -> dict:
        pos = self.__dict__.get("_pos_cache")
        if pos is None:
            pos = {lab: i for i, lab in enumerate(self.labels)}
            object.__setattr__(self, "_pos_cache", pos)
        return pos


@lru_cache(maxsize=None)
def _units(N: int) -> tuple[int, ...]:
    return tuple(u for u in range(1, N + 1) if gcd(u, N) == 1)


@lru_cache(maxsize=8)
def coset_table(N: int, group: str = "gamma1") -> CosetTable:
    """BFS enumeration of the cosets of Gamma1(N) (or Gamma0(N)) under S, T."""
    if group not in ("gamma1", "gamma0"):
        raise ValueError(f"unknown group {group!r}")
    if group == "gamma1" and N < 3:
        raise ValueError("coset_table for Gamma1 needs N >= 3 so that -I is not in the group")
    if N < 1:
        raise ValueError("level must be positive")
    units = _units(N)

    def label(g: SL2Matrix):
        if group == "gamma1":
            return (g.c % N, g.d % N)
        return _p1_label(g.c, g.d, N, units)

    labels = [label(I)]
    reps = [I]
    pos = {labels[0]: 0}
    act = {"S": [], "T": []}
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for name, gen in (("S", S), ("T", T)):
            h = reps[i] @ gen
            lab = label(h)
            j = pos.get(lab)
            if j is None:
                j = len(labels)
                pos[lab] = j
                labels.append(lab)
                reps.append(h)
                queue.append(j)
            act[name].append((i, j))
    action = {}
    for name, pairs in act.items():
        perm = [0] * len(labels)
        for i, j in pairs:
            perm[i] = j
        action[name] = tuple(perm)
    table = CosetTable(N, group, tuple(labels), tuple(reps), action)
    object.__setattr__(table, "_pos_cache", pos)
    return table


@lru_cache(maxsize=8)
def schreier_generators(N: int, group: str = "gamma1") -> tuple[SL2Matrix, ...]:
    """rep(i) @ g @ rep(i.g)^-1 for every coset i and g in {S, T}, identities dropped."""
    table = coset_table(N, group)
    gens = []
    for name, gen in (("S", S), ("T", T)):
        perm = table.action[name]
        for i, rep in enumerate(table.reps):
            h = rep @ gen @ table.reps[perm[i]].inverse()
            if h != I:
                gens.append(h)
    return tuple(gens)


def _small_lift(c: int, d: int, N: int) -> SL2Matrix:
    """A small-entry matrix whose bottom row is congruent to (c, d) mod N."""
    c %= N
    d %= N
    if c == 0:
        # (0, d) with d a unit: the class is represented by a matrix with c = N
        # only when N > 1; (0 : 1) itself is the identity coset
        c = N
    k = 0
    while True:
        for dd in (d + k * N, d - (k + 1) * N):
            if gcd(c, dd) == 1:
                _, x, y = egcd(c, dd)
                # c*x + dd*y = 1 ; take (a, b) = (y, -x)
                return SL2Matrix(y, -x, c, dd)
        k += 1


@lru_cache(maxsize=8)
def gamma0_generators(N: int) -> tuple[SL2Matrix, ...]:
    """Schreier generators of Gamma0(N) from a small-entry transversal.

    Each projective point (c : d) of P^1(Z/N) gets a representative whose
    bottom row is a small lift of (c, d); Schreier's lemma with generators
    S, T then yields rep(i) @ g @ rep(i.g)^-1, kept small by reducing the
    top row against the bottom row.
    """
    units = _units(N)
    table = coset_table(N, "gamma0")
    reps = []
    for lab in table.labels:
        if lab == table.labels[0]:
            reps.append(I)
        else:
            reps.append(_small_lift(lab[0], lab[1], N))
    pos = {lab: i for i, lab in enumerate(table.labels)}
    gens = []
    seen = set()
    for gen in (S, T):
        for rep in reps:
            h = rep @ gen
            j = pos[_p1_label(h.c, h.d, N, units)]
            g = h @ reps[j].inverse()
            if g.c < 0 or (g.c == 0 and g.a < 0):
                g = -g
            g = reduce_generator(g)
            if g != I and g not in seen:
                seen.add(g)
                gens.append(g)
    # -I lies in Gamma0(N) and is needed to generate it when it is not produced
    if -I not in seen:
        gens.append(-I)
    return tuple(gens)


def gamma1_transversal_in_gamma0(N: int) -> dict[int, SL2Matrix]:
    """For each unit u mod N a matrix in Gamma0(N) with d = u (mod N)."""
    out = {}
    for u in _units(N):
        u %= N
        if u == 1 % N:
            out[u] = I
            continue
        a = pow(u, -1, N)
        b = (a * u - 1) // N
        out[u] = SL2Matrix(a, b, N, u)
    return out


def random_gamma0(N: int, rng, max_r: int = 4, max_a: int | None = None) -> SL2Matrix:
    """A random element of Gamma0(N) with c = r*N, 1 <= r <= max_r."""
    return _random_column(N, rng, max_r, max_a, gamma1=False)


def random_gamma1(N: int, rng, max_r: int = 4, max_a: int | None = None) -> SL2Matrix:
    """A random element of Gamma1(N) with c = r*N, 1 <= r <= max_r."""
    return _random_column(N, rng, max_r, max_a, gamma1=True)


def _random_column(N, rng, max_r, max_a, gamma1):
    r = rng.randint(1, max_r)
    c = r * N
    bound = max_a if max_a is not None else 2 * c
    while True:
        if gamma1:
            a = 1 + N * rng.randint(-(bound // N) - 1, bound // N + 1)
        else:
            a = rng.randint(-bound, bound)
        if gcd(a, c) == 1:
            break
    g = complete_column(a, c)
    # g @ T^k keeps the first column and, since N | c, d mod N
    g = g @ (T ** rng.randint(-3, 3))
    if not gamma1 and rng.random() < 0.5:
        g = -g
    return g
