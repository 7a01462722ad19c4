"""Finite-dimensional commutative Hopf algebras by structure constants.

Tensors are stored sparsely: ``mult[i][j]`` maps ``k`` to the coefficient of
``b_k`` in ``b_i b_j``; ``comult[i]`` maps ``(j, k)`` to the coefficient of
``b_j (x) b_k`` in ``Delta(b_i)``; ``antipode[i]`` maps ``j`` to the
coefficient of ``b_j`` in ``S(b_i)``.  Scalars are :class:`FieldElement`
values of the base field.  Dense views follow the lexicographic convention
``b_j (x) b_k -> j * dim + k``.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import linalg
from .grp import FiniteGroup, cyclic_group
from .numfield import FieldElement, NumberField

Vec = dict  # sparse vector: index -> scalar


class HopfError(ValueError):
    pass


def _acc(d: dict, key, val) -> None:
    cur = d.get(key)
    s = val if cur is None else cur + val
    if s.is_zero():
        d.pop(key, None)
    else:
        d[key] = s


def _clean(d: dict) -> dict:
    return {k: v for k, v in d.items() if not v.is_zero()}


@dataclass
class CommAlgebra:
    base: NumberField
    dim: int
    mult: list
    unit: dict
    basis_labels: list = field(default_factory=list)

    def __post_init__(self):
        if not self.basis_labels:
            self.basis_labels = [f"b{i}" for i in range(self.dim)]

    def zero(self) -> FieldElement:
        return self.base.zero()

    def mul(self, x: Vec, y: Vec) -> Vec:
        out: dict = {}
        for i, a in x.items():
            row = self.mult[i]
            for j, b in y.items():
                ab = a * b
                for k, c in row[j].items():
                    _acc(out, k, ab * c)
        return out

    def basis_vec(self, i: int) -> Vec:
        return {i: self.base.one()}

    def dense(self, v: Vec) -> list:
        z = self.zero()
        return [v.get(i, z) for i in range(self.dim)]

    def sparse(self, v: Sequence) -> Vec:
        return {i: a for i, a in enumerate(v) if not a.is_zero()}


@dataclass
class HopfAlgebra:
    algebra: CommAlgebra
    comult: list
    counit: list
    antipode: list

    @property
    def dim(self) -> int:
        return self.algebra.dim

    @property
    def base(self) -> NumberField:
        return self.algebra.base

    @property
    def basis_labels(self) -> list:
        return self.algebra.basis_labels

    # dense views --------------------------------------------------------

    def mult_tensor(self) -> list:
        n, z = self.dim, self.base.zero()
        return [[[self.algebra.mult[i][j].get(k, z) for k in range(n)] for j in range(n)]
                for i in range(n)]

    def comult_tensor(self) -> list:
        n, z = self.dim, self.base.zero()
        return [[self.comult[i].get((j, k), z) for j in range(n) for k in range(n)]
                for i in range(n)]

    def antipode_matrix(self) -> list:
        n, z = self.dim, self.base.zero()
        return [[self.antipode[c].get(r, z) for c in range(n)] for r in range(n)]

    def unit_vector(self) -> list:
        return self.algebra.dense(self.algebra.unit)

    # maps -----------------------------------------------------------------

    def apply_antipode(self, v: Vec) -> Vec:
        out: dict = {}
        for i, a in v.items():
            for j, c in self.antipode[i].items():
                _acc(out, j, a * c)
        return out

    def apply_counit(self, v: Vec) -> FieldElement:
        s = self.base.zero()
        for i, a in v.items():
            s = s + a * self.counit[i]
        return s

    def apply_comult(self, v: Vec) -> dict:
        out: dict = {}
        for i, a in v.items():
            for key, c in self.comult[i].items():
                _acc(out, key, a * c)
        return out

    def copy(self) -> "HopfAlgebra":
        alg = self.algebra
        return HopfAlgebra(
            CommAlgebra(alg.base, alg.dim, [[dict(m) for m in row] for row in alg.mult],
                        dict(alg.unit), list(alg.basis_labels)),
            [dict(c) for c in self.comult], list(self.counit), [dict(s) for s in self.antipode])

    def base_change(self, L: NumberField) -> "HopfAlgebra":
        """Extend scalars along the prefix embedding ``base -> L``."""
        e = L.embed
        alg = self.algebra
        mult = [[{k: e(c) for k, c in m.items()} for m in row] for row in alg.mult]
        return HopfAlgebra(
            CommAlgebra(L, alg.dim, mult, {k: e(c) for k, c in alg.unit.items()},
                        list(alg.basis_labels)),
            [{k: e(c) for k, c in d.items()} for d in self.comult],
            [e(c) for c in self.counit],
            [{k: e(c) for k, c in d.items()} for d in self.antipode])


def hopf_from_dense(base: NumberField, labels, mult, unit, comult, counit, antipode) -> HopfAlgebra:
    n = len(labels)

    def sc(x):
        if isinstance(x, FieldElement):
            return x
        return base.scalar(x)

    m = [[{k: sc(mult[i][j][k]) for k in range(n) if not sc(mult[i][j][k]).is_zero()}
          for j in range(n)] for i in range(n)]
    u = {i: sc(a) for i, a in enumerate(unit) if not sc(a).is_zero()}
    cm = [{(j, k): sc(comult[i][j * n + k]) for j in range(n) for k in range(n)
           if not sc(comult[i][j * n + k]).is_zero()} for i in range(n)]
    S = [{r: sc(antipode[r][c]) for r in range(n) if not sc(antipode[r][c]).is_zero()}
         for c in range(n)]
    return HopfAlgebra(CommAlgebra(base, n, m, u, list(labels)), cm, [sc(x) for x in counit], S)


# ---------------------------------------------------------------------------
# verification


@dataclass
class HopfReport:
    results: dict

    @property
    def ok(self) -> bool:
        return all(r[0] for r in self.results.values())

    def failures(self) -> list[str]:
        return [k for k, r in self.results.items() if not r[0]]

    def __str__(self):
        lines = []
        for k, (ok, w) in self.results.items():
            lines.append(f"  {k:<22} {'ok' if ok else 'FAIL at ' + repr(w)}")
        return "\n".join(lines)


def _tensor_mul(alg: CommAlgebra, X: dict, Y: dict) -> dict:
    """Product in A (x) A of sparse tensors keyed by (j, k)."""
    # group by first index to reuse second-factor products
    left: dict = {}
    for (p, q), a in X.items():
        left.setdefault(p, {})[q] = a
    right: dict = {}
    for (r, s), b in Y.items():
        right.setdefault(r, {})[s] = b
    out: dict = {}
    for p, up in left.items():
        for r, ur in right.items():
            first = alg.mult[p][r]
            if not first:
                continue
            second = alg.mul(up, ur)
            if not second:
                continue
            for u, c1 in first.items():
                for v, c2 in second.items():
                    _acc(out, (u, v), c1 * c2)
    return out


def verify_hopf(H: HopfAlgebra, stop_early: bool = False) -> HopfReport:
    """Check every Hopf axiom on basis elements; residuals must vanish exactly."""
    alg = H.algebra
    n = H.dim
    one = H.base.one()
    res: dict = {}

    def record(name, witness):
        res[name] = (witness is None, witness)

    def first(gen):
        for w in gen:
            return w
        return None

    def commutative():
        for i in range(n):
            for j in range(i):
                if _clean(alg.mult[i][j]) != _clean(alg.mult[j][i]):
                    yield (i, j)

    def associative():
        for i in range(n):
            for j in range(n):
                bij = alg.mult[i][j]
                for k in range(n):
                    lhs = alg.mul(bij, alg.basis_vec(k))
                    rhs = alg.mul(alg.basis_vec(i), alg.mult[j][k])
                    if lhs != rhs:
                        yield (i, j, k)

    def unital():
        for i in range(n):
            if alg.mul(alg.unit, alg.basis_vec(i)) != {i: one}:
                yield (i,)

    def comult_hom():
        unit_t = {}
        for i, a in alg.unit.items():
            for j, b in alg.unit.items():
                _acc(unit_t, (i, j), a * b)
        if H.apply_comult(alg.unit) != unit_t:
            yield ("unit",)
        for i in range(n):
            for j in range(i, n):
                lhs = H.apply_comult(alg.mult[i][j])
                rhs = _tensor_mul(alg, H.comult[i], H.comult[j])
                if lhs != rhs:
                    yield (i, j)

    def counit_hom():
        if H.apply_counit(alg.unit) != one:
            yield ("unit",)
        for i in range(n):
            for j in range(i, n):
                if H.apply_counit(alg.mult[i][j]) != H.counit[i] * H.counit[j]:
                    yield (i, j)

    def coassociative():
        for i in range(n):
            lhs: dict = {}
            rhs: dict = {}
            for (j, k), c in H.comult[i].items():
                for (p, q), d in H.comult[j].items():
                    _acc(lhs, (p, q, k), c * d)
                for (p, q), d in H.comult[k].items():
                    _acc(rhs, (j, p, q), c * d)
            if lhs != rhs:
                yield (i,)

    def counit_ax():
        for i in range(n):
            left: dict = {}
            right: dict = {}
            for (j, k), c in H.comult[i].items():
                if not H.counit[j].is_zero():
                    _acc(left, k, c * H.counit[j])
                if not H.counit[k].is_zero():
                    _acc(right, j, c * H.counit[k])
            if left != {i: one} or right != {i: one}:
                yield (i,)

    def antipode_ax():
        for i in range(n):
            target = {k: v * H.counit[i] for k, v in alg.unit.items()}
            target = _clean(target)
            left: dict = {}
            right: dict = {}
            for (j, k), c in H.comult[i].items():
                for t, v in alg.mul(H.antipode[j], alg.basis_vec(k)).items():
                    _acc(left, t, c * v)
                for t, v in alg.mul(alg.basis_vec(j), H.antipode[k]).items():
                    _acc(right, t, c * v)
            if left != target or right != target:
                yield (i,)

    checks = [("commutative", commutative), ("associative", associative),
              ("unital", unital), ("counit", counit_ax), ("coassociative", coassociative),
              ("antipode", antipode_ax), ("counit_multiplicative", counit_hom),
              ("comult_multiplicative", comult_hom)]
    for name, fn in checks:
        record(name, first(fn()))
        if stop_early and not res[name][0]:
            break
    return HopfReport(res)


def perturb(H: HopfAlgebra, rng: random.Random) -> tuple[HopfAlgebra, tuple]:
    """Copy of H with one structure constant shifted by a nonzero rational."""
    n = H.dim
    sizes = [("mult", n ** 3), ("comult", n ** 3), ("counit", n), ("antipode", n * n)]
    total = sum(s for _, s in sizes)
    pick = rng.randrange(total)
    num = rng.choice([-3, -2, -1, 1, 2, 3])
    delta = Fraction(num, rng.randint(1, 3))
    G = H.copy()
    z = H.base.zero()
    for name, s in sizes:
        if pick < s:
            break
        pick -= s
    if name == "mult":
        i, j, k = pick // (n * n), (pick // n) % n, pick % n
        d = G.algebra.mult[i][j]
        d[k] = d.get(k, z) + delta
        where = (name, i, j, k)
    elif name == "comult":
        i, j, k = pick // (n * n), (pick // n) % n, pick % n
        d = G.comult[i]
        d[(j, k)] = d.get((j, k), z) + delta
        where = (name, i, j, k)
    elif name == "counit":
        G.counit[pick] = G.counit[pick] + delta
        where = (name, pick)
    else:
        c, r = pick // n, pick % n
        d = G.antipode[c]
        d[r] = d.get(r, z) + delta
        where = (name, r, c)
    # drop explicit zeros introduced by the shift
    G.algebra.mult = [[_clean(m) for m in row] for row in G.algebra.mult]
    G.comult = [_clean(c) for c in G.comult]
    G.antipode = [_clean(s) for s in G.antipode]
    return G, where


def mutation_sensitivity(H: HopfAlgebra, count: int = 20, seed: int = 0) -> list[tuple]:
    """Perturbations that left every axiom intact (should be empty)."""
    rng = random.Random(seed)
    survivors = []
    for _ in range(count):
        G, where = perturb(H, rng)
        if verify_hopf(G, stop_early=True).ok:
            survivors.append(where)
    return survivors


# ---------------------------------------------------------------------------
# constructions


def trivial_bundle_hopf(G: FiniteGroup, A: NumberField) -> HopfAlgebra:
    """Functions on G with values in A; basis of point indicators ``delta_g``."""
    n = G.order
    one = A.one()
    mult = [[({i: one} if i == j else {}) for j in range(n)] for i in range(n)]
    unit = {i: one for i in range(n)}
    comult = [dict() for _ in range(n)]
    for h in range(n):
        for k in range(n):
            comult[G.table[h][k]][(h, k)] = one
    counit = [one if g == G.identity else A.zero() for g in range(n)]
    antipode = [{G.inverse[g]: one} for g in range(n)]
    labels = [f"d[{g}]" for g in range(n)]
    return HopfAlgebra(CommAlgebra(A, n, mult, unit, labels), comult, counit, antipode)


def mu_hopf(n: int, A: NumberField) -> HopfAlgebra:
    """``A[t]/(t^n - 1)`` with t grouplike."""
    if n < 1:
        raise HopfError("n must be positive")
    one = A.one()
    mult = [[{(i + j) % n: one} for j in range(n)] for i in range(n)]
    comult = [{(k, k): one} for k in range(n)]
    counit = [one] * n
    antipode = [{(-k) % n: one} for k in range(n)]
    labels = [f"t^{k}" for k in range(n)]
    return HopfAlgebra(CommAlgebra(A, n, mult, {0: one}, labels), comult, counit, antipode)


# ---------------------------------------------------------------------------
# morphisms


@dataclass
class HopfMorphism:
    """Linear map source -> target; ``matrix[r][c]`` is the coefficient of
    target basis ``r`` in the image of source basis ``c``."""

    source: HopfAlgebra
    target: HopfAlgebra
    matrix: list

    def image(self, c: int) -> Vec:
        return {r: row[c] for r, row in enumerate(self.matrix) if not row[c].is_zero()}

    def apply(self, v: Vec) -> Vec:
        out: dict = {}
        for c, a in v.items():
            for r, m in self.image(c).items():
                _acc(out, r, a * m)
        return out

    def apply_tensor(self, X: dict) -> dict:
        imgs = [self.image(c) for c in range(self.source.dim)]
        out: dict = {}
        for (j, k), a in X.items():
            for p, x in imgs[j].items():
                ax = a * x
                for q, y in imgs[k].items():
                    _acc(out, (p, q), ax * y)
        return out

    def check(self) -> HopfReport:
        S, T = self.source, self.target
        n = S.dim
        imgs = [self.image(c) for c in range(n)]
        res = {}

        def first(gen):
            for w in gen:
                return w
            return None

        def alg_hom():
            if self.apply(S.algebra.unit) != T.algebra.unit:
                yield ("unit",)
            for i in range(n):
                for j in range(i, n):
                    if self.apply(S.algebra.mult[i][j]) != T.algebra.mul(imgs[i], imgs[j]):
                        yield (i, j)

        def comult():
            for i in range(n):
                if T.apply_comult(imgs[i]) != self.apply_tensor(S.comult[i]):
                    yield (i,)

        def counit():
            for i in range(n):
                if T.apply_counit(imgs[i]) != S.counit[i]:
                    yield (i,)

        def antipode():
            for i in range(n):
                if T.apply_antipode(imgs[i]) != self.apply(S.antipode[i]):
                    yield (i,)

        for name, fn in [("algebra_hom", alg_hom), ("comult", comult),
                         ("counit", counit), ("antipode", antipode)]:
            w = first(fn())
            res[name] = (w is None, w)
        return HopfReport(res)

    def is_invertible(self) -> bool:
        if self.source.dim != self.target.dim:
            return False
        return linalg.rank_over(self.matrix, self.source.dim) == self.source.dim

    def inverse(self) -> "HopfMorphism":
        B = self.target.base
        inv = linalg.inverse_over(self.matrix, B.one(), B.zero())
        return HopfMorphism(self.target, self.source, inv)

    def compose(self, other: "HopfMorphism") -> "HopfMorphism":
        """``self o other``."""
        B = self.target.base
        return HopfMorphism(other.source, self.target,
                            linalg.matmul_over(self.matrix, other.matrix, B.zero()))


def is_identity_matrix(M: Sequence[Sequence[FieldElement]]) -> bool:
    return all((M[i][j] == 1) if i == j else M[i][j].is_zero()
               for i in range(len(M)) for j in range(len(M)))


def cartier_iso(n: int, A: NumberField, zeta: FieldElement) -> HopfMorphism:
    """``mu_hopf(n, A) -> trivial_bundle_hopf(Z/n, A)``, ``t^k -> (j -> zeta^(kj))``."""
    if not zeta ** n == 1:
        raise HopfError("not a primitive root")
    for k in range(1, n):
        if zeta ** k == 1:
            raise HopfError("not a primitive root")
    src = mu_hopf(n, A)
    tgt = trivial_bundle_hopf(cyclic_group(n), A)
    powers = [zeta ** e for e in range(n)]
    matrix = [[powers[(k * j) % n] for k in range(n)] for j in range(n)]
    phi = HopfMorphism(src, tgt, matrix)
    rep = phi.check()
    if not rep.ok:
        raise AssertionError(f"character matrix is not a Hopf map:\n{rep}")
    if not phi.is_invertible():
        raise AssertionError("character matrix is singular")
    return phi


def find_primitive_root(A: NumberField, n: int) -> FieldElement:
    """Search +-b_i and +-(b_i)^k style candidates for a primitive n-th root."""
    cands = [A.scalar(1), A.scalar(-1)]
    for i in range(1, A.degree):
        b = A.basis_element(i)
        cands += [b, -b]
    for z in cands:
        if z ** n == 1 and all(not z ** k == 1 for k in range(1, n)):
            return z
    raise HopfError(f"no primitive root of unity of order {n} among the basis candidates; pass one explicitly")


# ---------------------------------------------------------------------------
# grouplike points


@dataclass
class FactorData:
    """Simple-factor decomposition of a Hopf algebra with its points.

    ``idempotents[i]`` is a dense vector over the base; ``points[i]`` lists
    algebra maps through factor ``i``, each given by its values (in
    ``overfield``) on the basis.
    """

    overfield: NumberField
    idempotents: list
    points: list

    def all_points(self) -> list:
        return [p for ps in self.points for p in ps]


def _check_decomposition(H: HopfAlgebra, data: FactorData) -> None:
    alg = H.algebra
    Om = data.overfield
    es = [alg.sparse(e) for e in data.idempotents]
    total: dict = {}
    for i, e in enumerate(es):
        if alg.mul(e, e) != e:
            raise HopfError("bad decomposition")
        for f in es[i + 1:]:
            if alg.mul(e, f):
                raise HopfError("bad decomposition")
        for k, v in e.items():
            _acc(total, k, v)
    if total != _clean(dict(alg.unit)):
        raise HopfError("bad decomposition")
    n = H.dim
    emb = Om.embed
    for e, pts in zip(es, data.points):
        # factor rank over the base
        cols = [H.algebra.dense(alg.mul(e, alg.basis_vec(j))) for j in range(n)]
        r = linalg.rank_over([list(c) for c in cols], n)
        if len(pts) != r:
            raise HopfError("bad decomposition")
        for phi in pts:
            if sum((emb(a) * phi[k] for k, a in e.items()), Om.zero()) != 1:
                raise HopfError("bad decomposition")
            if sum((emb(a) * phi[k] for k, a in alg.unit.items()), Om.zero()) != 1:
                raise HopfError("bad decomposition")
            for i in range(n):
                for j in range(i, n):
                    lhs = sum((emb(a) * phi[k] for k, a in alg.mult[i][j].items()), Om.zero())
                    if lhs != phi[i] * phi[j]:
                        raise HopfError("bad decomposition")
    flat = [tuple(x.c for x in p) for p in data.all_points()]
    if len(set(flat)) != len(flat):
        raise HopfError("bad decomposition")


def convolve(H: HopfAlgebra, Om: NumberField, phi: Sequence, psi: Sequence) -> list:
    emb = Om.embed
    out = []
    for i in range(H.dim):
        s = Om.zero()
        for (j, k), c in H.comult[i].items():
            s = s + emb(c) * phi[j] * psi[k]
        out.append(s)
    return out


def grouplike_points(H: HopfAlgebra, data: FactorData) -> FiniteGroup:
    """Points of H with values in the overfield, multiplied by convolution."""
    _check_decomposition(H, data)
    Om = data.overfield
    pts = data.all_points()
    key = {tuple(x.c for x in p): i for i, p in enumerate(pts)}
    table = []
    for p in pts:
        row = []
        for q in pts:
            r = tuple(x.c for x in convolve(H, Om, p, q))
            if r not in key:
                raise HopfError("comultiplication not grouplike-compatible")
            row.append(key[r])
        table.append(row)
    counit = tuple(Om.embed(c).c for c in H.counit)
    if counit not in key:
        raise HopfError("comultiplication not grouplike-compatible")
    return FiniteGroup.from_table(table)


def trivial_bundle_factor_data(G: FiniteGroup, A: NumberField) -> FactorData:
    n = G.order
    idem = [[A.one() if h == g else A.zero() for h in range(n)] for g in range(n)]
    pts = [[[A.one() if h == g else A.zero() for h in range(n)]] for g in range(n)]
    return FactorData(A, idem, pts)


def mu_factor_data(n: int, A: NumberField, zeta: FieldElement) -> FactorData:
    """Factors of ``A[t]/(t^n-1)`` from the inverse character matrix."""
    phi = cartier_iso(n, A, zeta)
    inv = phi.inverse().matrix
    idem = [[inv[k][j] for k in range(n)] for j in range(n)]
    pts = [[[zeta ** ((j * k) % n) for k in range(n)]] for j in range(n)]
    return FactorData(A, idem, pts)


# ---------------------------------------------------------------------------
# character bookkeeping


@dataclass
class CharacterData:
    group: FiniteGroup
    dims: list
    galois_orbits: list


@dataclass
class SchurReport:
    total: int
    blocks: list
    ok: bool


def schur_block_check(cd: CharacterData) -> SchurReport:
    if sum(d * d for d in cd.dims) != cd.group.order:
        raise HopfError("bad character data")
    flat = sorted(i for orb in cd.galois_orbits for i in orb)
    if flat != list(range(len(cd.dims))):
        raise HopfError("bad character data")
    blocks = [sum(cd.dims[i] ** 2 for i in orb) for orb in cd.galois_orbits]
    if sum(blocks) != cd.group.order:
        raise HopfError("bad character data")
    return SchurReport(cd.group.order, blocks, True)
