"""Finite groups as multiplication tables.

Elements are the integers ``0 .. order-1``.  Permutation generators compose
left to right: ``(g*h)(x) = h(g(x))``.  All derived data (class and coset
representatives) use the smallest element index.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

from .config import DEFAULTS


class GroupError(ValueError):
    pass


@dataclass(frozen=True)
class FiniteGroup:
    table: tuple
    identity: int
    inverse: tuple
    labels: tuple | None = None
    generators: tuple = ()

    def __post_init__(self):
        n = len(self.table)
        if n == 0:
            raise GroupError("empty group")
        full = set(range(n))
        for row in self.table:
            if len(row) != n or set(row) != full:
                raise GroupError("table is not a Latin square")
        for j in range(n):
            if {self.table[i][j] for i in range(n)} != full:
                raise GroupError("table is not a Latin square")
        e = self.identity
        if any(self.table[e][g] != g or self.table[g][e] != g for g in range(n)):
            raise GroupError("identity row/column not fixed")
        if any(self.table[g][self.inverse[g]] != e for g in range(n)):
            raise GroupError("bad inverse array")
        gens = self.generators or tuple(_greedy_generators(self.table, e))
        object.__setattr__(self, "generators", gens)
        # Light's test: associativity against a generating set suffices
        t = self.table
        for a in gens:
            for x in range(n):
                xa = t[x][a]
                row_x = t[x]
                for y in range(n):
                    if t[xa][y] != row_x[t[a][y]]:
                        raise GroupError(f"not associative at ({x}, {a}, {y})")

    @classmethod
    def from_table(cls, table: Sequence[Sequence[int]], labels=None) -> "FiniteGroup":
        table = tuple(tuple(int(x) for x in row) for row in table)
        n = len(table)
        ids = [e for e in range(n) if all(table[e][g] == g for g in range(n))]
        if not ids:
            raise GroupError("no identity element")
        e = ids[0]
        inv = []
        for g in range(n):
            hs = [h for h in range(n) if table[g][h] == e]
            if not hs:
                raise GroupError(f"element {g} has no inverse")
            inv.append(hs[0])
        return cls(table, e, tuple(inv), labels)

    @property
    def order(self) -> int:
        return len(self.table)

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return self.inverse[a]

    def conj(self, h: int, g: int) -> int:
        """``h g h^-1``."""
        t = self.table
        return t[t[h][g]][self.inverse[h]]

    def prod(self, *elems: int) -> int:
        out = self.identity
        for x in elems:
            out = self.table[out][x]
        return out

    def power(self, g: int, k: int) -> int:
        if k < 0:
            g, k = self.inverse[g], -k
        out = self.identity
        for _ in range(k):
            out = self.table[out][g]
        return out

    def element_order(self, g: int) -> int:
        k, x = 1, g
        while x != self.identity:
            x = self.table[x][g]
            k += 1
        return k

    def is_abelian(self) -> bool:
        t = self.table
        return all(t[a][b] == t[b][a] for a in range(self.order) for b in range(a))

    def is_subgroup(self, elems: Sequence[int]) -> bool:
        s = set(elems)
        if self.identity not in s:
            return False
        return all(self.table[a][b] in s for a in s for b in s)

    def check_subgroup(self, elems: Sequence[int]) -> list[int]:
        if not self.is_subgroup(elems):
            raise GroupError("not a subgroup")
        return sorted(set(elems))

    def subgroup_generated(self, elems: Sequence[int]) -> list[int]:
        seen = {self.identity}
        queue = deque([self.identity])
        while queue:
            x = queue.popleft()
            for g in elems:
                y = self.table[x][g]
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return sorted(seen)

    def is_normal(self, elems: Sequence[int]) -> bool:
        s = set(elems)
        return all(self.conj(h, n) in s for h in range(self.order) for n in s)

    def opposite(self) -> "FiniteGroup":
        """The same set with ``a*b := b*a`` (the other composition convention)."""
        n = self.order
        t = tuple(tuple(self.table[b][a] for b in range(n)) for a in range(n))
        return FiniteGroup(t, self.identity, self.inverse, self.labels)

    def class_sizes(self) -> list[int]:
        return conjugacy_classes(self).class_sizes


def _greedy_generators(table, e) -> list[int]:
    n = len(table)
    gens: list[int] = []
    span = {e}
    for g in range(n):
        if g in span:
            continue
        gens.append(g)
        queue = deque(span)
        span = set(span)
        while queue:
            x = queue.popleft()
            for h in gens:
                for y in (table[x][h], table[h][x]):
                    if y not in span:
                        span.add(y)
                        queue.append(y)
        if len(span) == n:
            break
    return gens


# ---------------------------------------------------------------------------
# constructors


def cycles_to_perm(n_points: int, cycles: Sequence[Sequence[int]]) -> tuple:
    """Cycle notation on points ``1..n`` to a 0-based image tuple."""
    img = list(range(n_points))
    seen = set()
    for cyc in cycles:
        pts = [int(p) - 1 for p in cyc]
        for p in pts:
            if not 0 <= p < n_points or p in seen:
                raise GroupError(f"bad cycle {cyc!r} on {n_points} points")
            seen.add(p)
        for a, b in zip(pts, pts[1:] + pts[:1]):
            img[a] = b
    return tuple(img)


def perm_to_cycles(p: Sequence[int]) -> list[list[int]]:
    seen, out = set(), []
    for i in range(len(p)):
        if i in seen or p[i] == i:
            continue
        cyc, j = [], i
        while j not in seen:
            seen.add(j)
            cyc.append(j + 1)
            j = p[j]
        out.append(cyc)
    return out


def group_from_generators(n_points: int, generators: Sequence[Sequence[int]],
                          order_bound: int | None = None) -> FiniteGroup:
    """Closure of permutation generators (0-based image tuples).

    Elements are listed breadth-first from the identity, generators tried in
    input order.
    """
    bound = DEFAULTS.order_bound if order_bound is None else order_bound
    gens = [tuple(g) for g in generators]
    for g in gens:
        if sorted(g) != list(range(n_points)):
            raise GroupError(f"{g!r} is not a permutation of {n_points} points")
    ident = tuple(range(n_points))
    elems = [ident]
    index = {ident: 0}
    queue = deque([ident])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = tuple(g[x[i]] for i in range(n_points))
            if y not in index:
                if len(elems) >= bound:
                    raise GroupError("group too large")
                index[y] = len(elems)
                elems.append(y)
                queue.append(y)
    table = tuple(
        tuple(index[tuple(b[a[i]] for i in range(n_points))] for b in elems)
        for a in elems
    )
    inv = []
    for a in elems:
        ai = [0] * n_points
        for i, j in enumerate(a):
            ai[j] = i
        inv.append(index[tuple(ai)])
    gen_idx = tuple(dict.fromkeys(index[g] for g in gens if g != ident))
    return FiniteGroup(table, 0, tuple(inv), tuple(elems), gen_idx)


def cyclic_group(n: int) -> FiniteGroup:
    """``Z/n`` with element ``j`` the residue ``j``."""
    table = tuple(tuple((a + b) % n for b in range(n)) for a in range(n))
    inv = tuple((-a) % n for a in range(n))
    return FiniteGroup(table, 0, inv, tuple(range(n)), (1 % n,) if n > 1 else ())


def trivial_group() -> FiniteGroup:
    return cyclic_group(1)


# ---------------------------------------------------------------------------
# homomorphisms


@dataclass(frozen=True)
class GroupHom:
    source: FiniteGroup
    target: FiniteGroup
    map: tuple

    def __post_init__(self):
        s, t, f = self.source, self.target, self.map
        if len(f) != s.order:
            raise GroupError("map has wrong length")
        if f[s.identity] != t.identity:
            raise GroupError("map does not preserve the identity")
        for a in range(s.order):
            for b in range(s.order):
                if f[s.table[a][b]] != t.table[f[a]][f[b]]:
                    raise GroupError(f"not a homomorphism at ({a}, {b})")

    def __call__(self, g: int) -> int:
        return self.map[g]

    def is_surjective(self) -> bool:
        return len(set(self.map)) == self.target.order

    def is_injective(self) -> bool:
        return len(set(self.map)) == self.source.order

    def kernel(self) -> list[int]:
        return [g for g in range(self.source.order) if self.map[g] == self.target.identity]


def find_isomorphism(G: FiniteGroup, H: FiniteGroup) -> GroupHom | None:
    """Brute-force search for an isomorphism, driven by G's generators."""
    if G.order != H.order or sorted(G.class_sizes()) != sorted(H.class_sizes()):
        return None
    gens = list(G.generators)
    if not gens:
        return GroupHom(G, H, (H.identity,))
    # express each element of G as a word: BFS over generators
    word_parent = {G.identity: None}
    order_list = [G.identity]
    queue = deque([G.identity])
    while queue:
        x = queue.popleft()
        for k, g in enumerate(gens):
            y = G.table[x][g]
            if y not in word_parent:
                word_parent[y] = (x, k)
                order_list.append(y)
                queue.append(y)
    cands = [[h for h in range(H.order) if H.element_order(h) == G.element_order(g)]
             for g in gens]

    def attempt(images):
        f = {G.identity: H.identity}
        for y in order_list[1:]:
            x, k = word_parent[y]
            f[y] = H.table[f[x]][images[k]]
        mp = tuple(f[g] for g in range(G.order))
        if len(set(mp)) != G.order:
            return None
        try:
            return GroupHom(G, H, mp)
        except GroupError:
            return None

    def rec(i, images):
        if i == len(gens):
            return attempt(images)
        for h in cands[i]:
            res = rec(i + 1, images + [h])
            if res is not None:
                return res
        return None

    return rec(0, [])


# ---------------------------------------------------------------------------
# classes and cosets


@dataclass(frozen=True)
class ConjClassData:
    reps: list
    class_of: list
    class_sizes: list
    centralizers: list
    members: list = field(default_factory=list)


def conjugacy_classes(G: FiniteGroup) -> ConjClassData:
    n = G.order
    class_of = [-1] * n
    reps, sizes, cents, members = [], [], [], []
    for g in range(n):
        if class_of[g] != -1:
            continue
        k = len(reps)
        orbit = sorted({G.conj(h, g) for h in range(n)})
        for x in orbit:
            class_of[x] = k
        reps.append(g)
        sizes.append(len(orbit))
        members.append(orbit)
        cents.append([h for h in range(n) if G.table[h][g] == G.table[g][h]])
    for c, s in zip(cents, sizes):
        if len(c) * s != n:
            raise AssertionError("orbit-stabilizer failed")
    return ConjClassData(reps, class_of, sizes, cents, members)


def centralizer(G: FiniteGroup, g: int) -> list[int]:
    return [h for h in range(G.order) if G.table[h][g] == G.table[g][h]]


@dataclass(frozen=True)
class DoubleCosetData:
    left: list
    right: list
    reps: list
    coset_of: list
    coset_sizes: list


def double_cosets(G: FiniteGroup, H: Sequence[int], K: Sequence[int]) -> DoubleCosetData:
    H = G.check_subgroup(H)
    K = G.check_subgroup(K)
    n = G.order
    coset_of = [-1] * n
    reps, sizes = [], []
    for g in range(n):
        if coset_of[g] != -1:
            continue
        orbit = {G.table[G.table[h][g]][k] for h in H for k in K}
        for x in orbit:
            coset_of[x] = len(reps)
        reps.append(g)
        sizes.append(len(orbit))
    return DoubleCosetData(H, K, reps, coset_of, sizes)


def product_class_set(G: FiniteGroup, a: int, b: int,
                      classes: ConjClassData | None = None) -> set[int]:
    """Classes met by ``{g1 a g1^-1 g2 b g2^-1}``."""
    cd = classes or conjugacy_classes(G)
    ca = cd.members[cd.class_of[a]]
    cb = cd.members[cd.class_of[b]]
    raw = {G.table[x][y] for x in ca for y in cb}
    out = {cd.class_of[z] for z in raw}
    covered = sum(cd.class_sizes[c] for c in out)
    if covered != len(raw):
        raise AssertionError("product set is not a union of classes")
    return out


def quotient(G: FiniteGroup, N: Sequence[int]) -> tuple[FiniteGroup, GroupHom]:
    N = G.check_subgroup(N)
    if not G.is_normal(N):
        raise GroupError("not normal")
    n = G.order
    coset_of = [-1] * n
    reps = []
    for g in range(n):
        if coset_of[g] != -1:
            continue
        for x in N:
            coset_of[G.table[g][x]] = len(reps)
        reps.append(g)
    table = tuple(tuple(coset_of[G.table[a][b]] for b in reps) for a in reps)
    Q = FiniteGroup.from_table(table, labels=tuple(reps))
    return Q, GroupHom(G, Q, tuple(coset_of))
