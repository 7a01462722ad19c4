"""Finite truncations of profinite objects.

A :class:`FiniteTower` is a finite directed poset of finite carriers with
transition maps ``level_j -> level_i`` for ``i <= j``, stored as index tuples.
"""
from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from math import factorial
from typing import Sequence

from .config import DEFAULTS
from .grp import GroupHom, cyclic_group
from .numfield import NumberField, Subfield, compositum, pointwise_stabilizer


class TowerStructureError(ValueError):
    pass


@dataclass
class FiniteTower:
    carriers: list                       # per level, list of element labels
    leq: set                             # pairs (i, j) with i <= j, reflexive
    maps: dict                           # (i, j) -> tuple, element index of level j -> level i
    groups: list | None = None           # optional FiniteGroup per level
    names: list = field(default_factory=list)

    def __post_init__(self):
        k = len(self.carriers)
        for i in range(k):
            self.leq.add((i, i))
            self.maps.setdefault((i, i), tuple(range(len(self.carriers[i]))))
        if not self.names:
            self.names = [str(i) for i in range(k)]

    @property
    def size(self) -> int:
        return len(self.carriers)

    def upper_bounds(self, i: int, j: int) -> list[int]:
        return [k for k in range(self.size) if (i, k) in self.leq and (j, k) in self.leq]

    def is_directed(self) -> bool:
        return all(self.upper_bounds(i, j) for i in range(self.size) for j in range(self.size))

    def top(self) -> int | None:
        tops = [k for k in range(self.size) if all((i, k) in self.leq for i in range(self.size))]
        return tops[0] if tops else None

    def check(self) -> None:
        """Functoriality, plus homomorphism checks for group towers."""
        k = self.size
        for (i, j) in self.leq:
            if (i, j) not in self.maps:
                raise TowerStructureError(f"missing map {j} -> {i}")
            m = self.maps[(i, j)]
            if len(m) != len(self.carriers[j]) or any(not 0 <= x < len(self.carriers[i]) for x in m):
                raise TowerStructureError(f"map {j} -> {i} has the wrong shape")
        for i, j, l in itertools.product(range(k), repeat=3):
            if (i, j) in self.leq and (j, l) in self.leq:
                if (i, l) not in self.leq:
                    raise TowerStructureError("order is not transitive")
                mij, mjl, mil = self.maps[(i, j)], self.maps[(j, l)], self.maps[(i, l)]
                if any(mij[mjl[x]] != mil[x] for x in range(len(self.carriers[l]))):
                    raise TowerStructureError(f"maps do not compose at {(i, j, l)}")
        if self.groups is not None:
            for (i, j) in self.leq:
                GroupHom(self.groups[j], self.groups[i], self.maps[(i, j)])
        if not self.is_directed():
            raise TowerStructureError("order is not directed")

    def surjective(self) -> bool:
        return all(len(set(self.maps[p])) == len(self.carriers[p[0]]) for p in self.leq)


def linear_tower(carriers: Sequence[Sequence], steps: Sequence[Sequence[int]],
                 groups=None, names=None) -> FiniteTower:
    """Chain ``0 <= 1 <= ...`` from maps ``steps[i]: level i+1 -> level i``."""
    k = len(carriers)
    if len(steps) != max(k - 1, 0):
        raise TowerStructureError("need one map per consecutive pair")
    maps = {}
    for j in range(k):
        maps[(j, j)] = tuple(range(len(carriers[j])))
        for i in range(j - 1, -1, -1):
            step = steps[i]
            maps[(i, j)] = tuple(step[x] for x in maps[(i + 1, j)])
    leq = {(i, j) for i in range(k) for j in range(i, k)}
    return FiniteTower([list(c) for c in carriers], leq, maps, groups, list(names or []))


def limit_element(t: FiniteTower) -> list:
    """A compatible family: the smallest element of the top level pushed down."""
    for i, c in enumerate(t.carriers):
        if not c:
            raise TowerStructureError("empty level")
    t.check()
    top = t.top()
    if top is None:
        raise TowerStructureError("order is not directed")
    fam = [t.maps[(i, top)][0] for i in range(t.size)]
    for (i, j) in t.leq:
        if t.maps[(i, j)][fam[j]] != fam[i]:
            raise AssertionError("family is not compatible")
    return [t.carriers[i][x] for i, x in enumerate(fam)]


def compatible_families(t: FiniteTower) -> int:
    """Number of compatible families, by backtracking over the levels."""
    order = sorted(range(t.size), key=lambda i: -sum((j, i) in t.leq for j in range(t.size)))
    count = 0
    fam: dict = {}

    def rec(pos):
        nonlocal count
        if pos == len(order):
            count += 1
            return
        j = order[pos]
        for x in range(len(t.carriers[j])):
            if all(t.maps[(i, j)][x] == fam[i] for i in fam if (i, j) in t.leq) and \
               all(t.maps[(j, i)][fam[i]] == x for i in fam if (j, i) in t.leq):
                fam[j] = x
                rec(pos + 1)
                del fam[j]

    rec(0)
    return count


def zhat_truncation(n: int) -> FiniteTower:
    """``Z/1! <- Z/2! <- ... <- Z/n!`` with reduction maps."""
    if n < 1:
        raise ValueError("n must be positive")
    orders = [factorial(k) for k in range(1, n + 1)]
    groups = [cyclic_group(m) for m in orders]
    carriers = [list(range(m)) for m in orders]
    steps = [tuple(x % orders[i] for x in range(orders[i + 1])) for i in range(n - 1)]
    t = linear_tower(carriers, steps, groups, [f"Z/{m}" for m in orders])
    t.check()
    return t


def mu_tower_maps(n: int, A: NumberField) -> list:
    """Hopf maps ``mu_hopf((k-1)!) -> mu_hopf(k!)``, ``t -> t^k``, for k = 2..n."""
    from .hopf import HopfError, HopfMorphism, mu_hopf

    out = []
    for k in range(2, n + 1):
        lo, hi = factorial(k - 1), factorial(k)
        src, tgt = mu_hopf(lo, A), mu_hopf(hi, A)
        M = [[A.zero()] * lo for _ in range(hi)]
        for e in range(lo):
            M[(k * e) % hi][e] = A.one()
        phi = HopfMorphism(src, tgt, M)
        rep = phi.check()
        if not rep.ok:
            raise HopfError(f"tower map at level {k} is not a Hopf map:\n{rep}")
        out.append(phi)
    return out


# ---------------------------------------------------------------------------
# shift obstruction


@dataclass
class ShiftResult:
    w: int
    n: int
    count: int
    count_other_convention: int
    witness: str


def _windows(w: int) -> list[tuple[int, int]]:
    """For each x in F_2^(w+1): (index of x_1..x_w, index of x_0..x_{w-1}).

    Constant sequences come first, so the witness constraint is tested first.
    """
    xs = list(itertools.product((0, 1), repeat=w + 1))
    xs.sort(key=lambda x: (len(set(x)) != 1, x))
    out = []
    for x in xs:
        hi = int("".join(map(str, x[1:])), 2)
        lo = int("".join(map(str, x[:-1])), 2)
        out.append((hi, lo))
    return out


def _count_chunk(args) -> int:
    w, n, offset, first, convention = args
    cons = _windows(w)
    if convention != "left":
        # s(x)_i = x_{i-1}: the roles of the two windows swap
        cons = [(b, a) for a, b in cons]
    cnt = 0
    size = 1 << w
    for rest in itertools.product(range(n), repeat=size - 1):
        g = (first,) + rest
        if all(g[a] == (g[b] + offset) % n for a, b in cons):
            cnt += 1
    return cnt


def shift_count(w: int, n: int, offset: int = 1, convention: str = "left",
                jobs: int = 1, bound: int | None = None) -> int:
    """Number of g: F_2^w -> Z/n with g(shifted window) = g(window) + offset."""
    if w < 1 or n < 2:
        raise ValueError("need w >= 1 and n >= 2")
    bound = DEFAULTS.shift_bound if bound is None else bound
    if n ** (1 << w) > bound:
        raise ValueError("window too large")
    tasks = [(w, n, offset, f, convention) for f in range(n)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return sum(ex.map(_count_chunk, tasks))
    return sum(_count_chunk(t) for t in tasks)


def shift_obstruction(w: int, n: int, jobs: int = 1, bound: int | None = None) -> ShiftResult:
    left = shift_count(w, n, 1, "left", jobs, bound)
    right = shift_count(w, n, 1, "right", jobs, bound)
    zeros = "0" * w
    witness = f"x = constant 0: g({zeros}) = g({zeros}) + 1 in Z/{n}"
    return ShiftResult(w, n, left, right, witness)


# ---------------------------------------------------------------------------
# subfield towers


@dataclass
class CompositumTower:
    tower: FiniteTower
    subfields: list
    joins: dict                 # (i, j) -> index of the compositum
    added: list                 # indices of joins not among the inputs
    minimal: bool


def compositum_tower(L: NumberField, action: Sequence, subfields: Sequence[Subfield]
                     ) -> CompositumTower:
    """Subfields closed under composita, ordered by inclusion.

    The carrier of E is the set of its embeddings into L (cosets of the
    pointwise stabilizer, named by smallest representatives); maps restrict.
    """
    fields = []
    for E in subfields:
        if E not in fields:
            fields.append(E)
    n_input = len(fields)
    joins: dict = {}
    changed = True
    while changed:
        changed = False
        for a in range(len(fields)):
            for b in range(len(fields)):
                if (a, b) in joins:
                    continue
                J = compositum(L, fields[a], fields[b])
                if J not in fields:
                    fields.append(J)
                    changed = True
                joins[(a, b)] = fields.index(J)
    k = len(fields)
    leq = {(a, b) for a in range(k) for b in range(k) if fields[b].contains_subfield(fields[a])}
    order = len(action)
    carriers, cos = [], []
    for E in fields:
        H = set(pointwise_stabilizer(E, action))
        key_of = {}
        reps = []
        for g in range(order):
            key = tuple(action[g].apply_coords(v) for v in E.basis)
            if key not in key_of:
                key_of[key] = len(reps)
                reps.append(g)
        if len(reps) * len(H) != order:
            raise AssertionError("embedding count does not match the stabilizer")
        carriers.append(reps)
        cos.append(key_of)
    maps = {}
    for (a, b) in leq:
        Ea = fields[a]
        maps[(a, b)] = tuple(
            cos[a][tuple(action[g].apply_coords(v) for v in Ea.basis)] for g in carriers[b])
    t = FiniteTower(carriers, leq, maps, None, [f"deg {E.degree}" for E in fields])
    t.check()
    minimal = True
    for (a, b), j in joins.items():
        J = fields[j]
        for c in range(k):
            if (a, c) in leq and (b, c) in leq:
                if not fields[c].contains_subfield(J) or fields[c].degree < J.degree:
                    minimal = False
    added = list(range(n_input, k))
    return CompositumTower(t, fields, joins, added, minimal)


# ---------------------------------------------------------------------------
# etale algebras


@dataclass
class EtaleAlgebra:
    base: NumberField
    factors: list

    def __post_init__(self):
        for F in self.factors:
            if not F.is_prefix(self.base) or F.degree % self.base.degree:
                raise ValueError("factor does not contain the base field")

    def dimension(self) -> int:
        return sum(F.degree // self.base.degree for F in self.factors)


def sections(A: EtaleAlgebra) -> int:
    """Number of K-algebra maps A -> K.

    A map from a product of fields to K factors through one factor F, and a
    K-map F -> K is injective, so it exists (uniquely, the identity) only
    when [F:K] = 1.
    """
    K = A.base
    count = 0
    for F in A.factors:
        if F.degree == K.degree:
            if any(F.mult[i][j] != K.mult[i][j] for i in range(K.degree) for j in range(K.degree)):
                raise AssertionError("degree-one factor differs from the base")
            count += 1
    return count


def is_trivial_etale(A: EtaleAlgebra) -> tuple[bool, int | None]:
    trivial = all(F.degree == A.base.degree for F in A.factors)
    count = sections(A)
    if trivial != (count == A.dimension()):
        raise AssertionError("section count disagrees with the factor test")
    return trivial, (len(A.factors) if trivial else None)
