"""The adjoint bundle Ad(L/K) of a finite Galois extension.

Three presentations are built and compared:

* ``diag``: invariants of ``L (x)_K L`` under the diagonal Galois action;
* ``tcf``:  twisted class functions ``f: G -> L`` with ``f(hgh^-1) = h f(g)``;
* ``prod``: the product of residue fields ``L^{C_c}`` over class representatives,
  with comultiplication assembled from double cosets.

The stored Hopf algebra lives in the ``prod`` basis.  Elements of ``L (x)_K L``
are written ``sum_q A_q (x) u_q`` for a fixed K-basis ``u`` of L (``u_0 = 1``)
and stored as the concatenated coordinates of the ``A_q``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import linalg
from .grp import (ConjClassData, FiniteGroup, conjugacy_classes, double_cosets,
                  find_isomorphism, quotient)
from .hopf import (CommAlgebra, FactorData, HopfAlgebra, HopfMorphism,
                   grouplike_points, is_identity_matrix, trivial_bundle_hopf, verify_hopf)
from .numfield import (FieldAutomorphism, FieldElement, FieldError, KSpan, NumberField,
                       Subfield, automorphisms, compositum, fixed_field,
                       group_of_automorphisms, pointwise_stabilizer, relative_basis,
                       scale_in_field, whole_field)


class Inconsistency(RuntimeError):
    """Internal mathematical inconsistency; indicates a bug, never bad input."""


class TowerError(ValueError):
    pass


def _halt(msg: str):
    raise Inconsistency(msg)


# ---------------------------------------------------------------------------
# extensions


@dataclass
class GaloisExtensionData:
    K_degree: int
    L: NumberField
    G: FiniteGroup
    action: list

    @property
    def K(self) -> NumberField:
        return self.L.base_field()

    @property
    def degree(self) -> int:
        return self.L.degree // self.K_degree


def build_extension(L: NumberField, certificates: dict) -> GaloisExtensionData:
    auts, G, action = automorphisms(L, certificates)
    return make_extension(L, G, action)


def make_extension(L: NumberField, G: FiniteGroup, action: Sequence[FieldAutomorphism]
                   ) -> GaloisExtensionData:
    if len({a.matrix for a in action}) != G.order:
        _halt("action is not faithful")
    for g in range(G.order):
        for h in range(G.order):
            if action[g].compose(action[h]) != action[G.mul(g, h)]:
                _halt("action is not a homomorphism")
    if fixed_field(L, list(action)).degree != L.base_degree:
        _halt("fixed field of the full group is not the base")
    return GaloisExtensionData(L.base_degree, L, G, list(action))


# ---------------------------------------------------------------------------
# helpers for K-linear algebra done over Q


def _flat(vec: Sequence[FieldElement]) -> list:
    out = []
    for x in vec:
        out.extend(x.c)
    return out


def k_basis(F: NumberField, vectors: Sequence[Sequence[Fraction]], scale) -> list:
    """Greedy K-independent subset of Q-vectors (K = prefix of degree ``F.degree``
    of the field whose ``scale`` is given)."""
    dk = F.degree
    if dk == 1:
        # keep the input vectors that are independent
        chosen, acc, rk = [], [], 0
        for v in vectors:
            R2, p2 = linalg.rref(acc + [list(v)], len(v))
            if len(p2) > rk:
                chosen.append(list(v))
                acc, rk = R2, len(p2)
        return chosen
    chosen, acc, rk = [], [], 0
    for v in vectors:
        new = [scale(r, list(v)) for r in range(dk)]
        R2, p2 = linalg.rref(acc + new, len(v))
        if len(p2) == rk + dk:
            chosen.append(list(v))
            acc, rk = R2, len(p2)
    return chosen


# ---------------------------------------------------------------------------
# twisted class functions


def twisted_condition_rows(ext: GaloisExtensionData, hs: Sequence[int]) -> list:
    """Rows of the linear system ``f(h g h^-1) - h f(g) = 0`` on Maps(G, L) over Q."""
    G, L = ext.G, ext.L
    d = L.degree
    n = G.order
    rows = []
    for h in hs:
        A = ext.action[h].matrix
        for g in range(n):
            t = G.conj(h, g)
            for i in range(d):
                row = [Fraction(0)] * (n * d)
                row[t * d + i] += 1
                for j in range(d):
                    if A[i][j]:
                        row[g * d + j] -= A[i][j]
                if any(row):
                    rows.append(row)
    return rows


def is_twisted(ext: GaloisExtensionData, f: Sequence[FieldElement]) -> bool:
    G = ext.G
    return all(f[G.conj(h, g)] == ext.action[h](f[g])
               for g in range(G.order) for h in range(G.order))


def twisted_class_functions(ext: GaloisExtensionData) -> list:
    """A K-basis of the twisted class functions, each a list of L-elements over G."""
    G, L = ext.G, ext.L
    n, d = G.order, L.degree
    gens = list(G.generators) or [G.identity]
    rows = twisted_condition_rows(ext, gens)
    Q = linalg.nullspace(rows, n * d) if rows else linalg.identity(n * d)
    basis = k_basis(ext.K, Q, scale_in_field(L))
    if len(basis) != n or len(Q) != n * ext.K_degree:
        _halt(f"twisted class functions have K-dimension {len(basis)}, expected {n}")
    out = []
    for v in basis:
        f = [FieldElement(L, tuple(v[g * d:(g + 1) * d])) for g in range(n)]
        if not is_twisted(ext, f):
            _halt("nullspace vector is not a twisted class function")
        out.append(f)
    return out


def function_model_hopf(ext: GaloisExtensionData, funcs: list, labels=None) -> HopfAlgebra:
    """Hopf algebra over K on a K-basis of twisted class functions.

    Product is pointwise, ``Delta f (g1, g2) = f(g1 g2)`` (coefficients from
    ``F^-1 V F^-T`` over L, then checked to lie in K), ``eps f = f(e)`` and
    ``S f = f o inv``.
    """
    G, L, K = ext.G, ext.L, ext.K
    n, d = G.order, L.degree
    span = KSpan(K, [_flat(f) for f in funcs], n * d, scale_in_field(L))

    def coords(f):
        c = span.coords(_flat(f))
        if c is None:
            _halt("function is not in the span of the model basis")
        return c

    mult = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            prod = [a * b for a, b in zip(funcs[i], funcs[j])]
            v = {k: c for k, c in enumerate(coords(prod)) if not c.is_zero()}
            mult[i][j] = v
            mult[j][i] = dict(v)
    unit = {k: c for k, c in enumerate(coords([L.one()] * n)) if not c.is_zero()}
    counit = [L.restrict(f[G.identity], K) for f in funcs]
    antipode = []
    for f in funcs:
        antipode.append({k: c for k, c in enumerate(coords([f[G.inverse[g]] for g in range(n)]))
                         if not c.is_zero()})
    F = [[funcs[j][g] for j in range(n)] for g in range(n)]
    Finv = linalg.inverse_over(F, L.one(), L.zero())
    FinvT = [list(r) for r in zip(*Finv)]
    comult = []
    for f in funcs:
        V = [[f[G.mul(g1, g2)] for g2 in range(n)] for g1 in range(n)]
        C = linalg.matmul_over(linalg.matmul_over(Finv, V, L.zero()), FinvT, L.zero())
        entry = {}
        for j in range(n):
            for k in range(n):
                x = C[j][k]
                if not x.is_zero():
                    try:
                        entry[(j, k)] = L.restrict(x, K)
                    except FieldError:
                        _halt("comultiplication coefficient outside K")
        comult.append(entry)
    labels = labels or [f"f{i}" for i in range(n)]
    return HopfAlgebra(CommAlgebra(K, n, mult, unit, labels), comult, counit, antipode)


# ---------------------------------------------------------------------------
# diagonal invariants


@dataclass
class DiagonalModel:
    u: list                      # K-basis of L, u[0] = 1
    invariants: list             # K-basis of (L (x)_K L)^G as Q-vectors
    hopf: HopfAlgebra
    to_tcf: list                 # images of the invariant basis as functions on G
    swap_matrix: list            # coinverse on the invariant basis (K entries)


class _LOverK:
    """Coordinates of L-elements in a K-basis ``u`` of L."""

    def __init__(self, ext: GaloisExtensionData):
        L = ext.L
        self.L = L
        self.u = relative_basis(whole_field(L))
        self.m = len(self.u)
        self.span = KSpan(ext.K, [x.c for x in self.u], L.degree, scale_in_field(L))

    def kco(self, x: FieldElement) -> list:
        c = self.span.coords(x.c)
        if c is None:
            _halt("element outside L")
        return c

    def chunks(self, v: Sequence[Fraction], count: int) -> list:
        d = self.L.degree
        return [FieldElement(self.L, tuple(v[q * d:(q + 1) * d])) for q in range(count)]


def diagonal_invariants_model(ext: GaloisExtensionData) -> DiagonalModel:
    G, L, K = ext.G, ext.L, ext.K
    n, d = G.order, L.degree
    lk = _LOverK(ext)
    u, m = lk.u, lk.m
    if m != n:
        _halt("relative degree differs from the group order")
    D = m * d
    L1 = L.one()
    # K-coordinates of sigma(u_q) and of u_q u_r
    sig_u = [[lk.kco(ext.action[g](u[q])) for q in range(m)] for g in range(n)]
    uu = [[lk.kco(u[q] * u[r]) for r in range(m)] for q in range(m)]

    def act(g, A):
        s = ext.action[g]
        out = [L.zero()] * m
        for q in range(m):
            sA = s(A[q])
            if sA.is_zero():
                continue
            for t in range(m):
                k = sig_u[g][q][t]
                if not k.is_zero():
                    out[t] = out[t] + sA * L.embed(k)
        return out

    rows = []
    gens = list(G.generators) or [G.identity]
    for g in gens:
        cols = []
        for idx in range(D):
            e = [Fraction(0)] * D
            e[idx] = Fraction(1)
            img = _flat(act(g, lk.chunks(e, m)))
            img[idx] -= 1
            cols.append(img)
        rows.extend([cols[j][i] for j in range(D)] for i in range(D))
    rows = [r for r in rows if any(r)]
    Qb = linalg.nullspace(rows, D) if rows else linalg.identity(D)
    inv = k_basis(K, Qb, scale_in_field(L))
    if len(inv) != n:
        _halt(f"diagonal invariants have K-dimension {len(inv)}, expected {n}")
    X = [lk.chunks(v, m) for v in inv]
    for A in X:
        for g in range(n):
            if act(g, A) != A:
                _halt("invariant vector moved by the diagonal action")
    span = KSpan(K, inv, D, scale_in_field(L))

    def coords(A):
        c = span.coords(_flat(A))
        if c is None:
            _halt("tensor outside the invariant span")
        return c

    def tmul(A, B):
        out = [L.zero()] * m
        for q in range(m):
            if A[q].is_zero():
                continue
            for r in range(m):
                if B[r].is_zero():
                    continue
                ab = A[q] * B[r]
                for t, k in enumerate(uu[q][r]):
                    if not k.is_zero():
                        out[t] = out[t] + ab * L.embed(k)
        return out

    def sparse(c):
        return {k: x for k, x in enumerate(c) if not x.is_zero()}

    mult = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            v = sparse(coords(tmul(X[i], X[j])))
            mult[i][j] = v
            mult[j][i] = dict(v)
    unit = sparse(coords([L1] + [L.zero()] * (m - 1)))
    # coidentity a (x) b -> ab
    counit = []
    for A in X:
        s = L.zero()
        for q in range(m):
            s = s + A[q] * u[q]
        try:
            counit.append(L.restrict(s, K))
        except FieldError:
            _halt("coidentity leaves K")

    # coinverse a (x) b -> b (x) a
    def swap(A):
        kc = [lk.kco(a) for a in A]          # A_q = sum_p kc[q][p] u_p
        out = []
        for p in range(m):
            s = L.zero()
            for q in range(m):
                k = kc[q][p]
                if not k.is_zero():
                    s = s + u[q] * L.embed(k)
            out.append(s)
        return out

    swaps = [coords(swap(A)) for A in X]
    antipode = [sparse(c) for c in swaps]

    # comultiplication through L (x) L (x) L: a (x) b -> a (x) 1 (x) b, with
    # (a(x)b) (x) (c(x)d) -> a (x) bc (x) d applied in the groupoid order
    def mu(A, B):
        # A = sum_q A_q (x) u_q, B = sum_s B_s (x) u_s ; result indexed [t*m + s]
        out = [L.zero()] * (m * m)
        for q in range(m):
            if A[q].is_zero():
                continue
            for s in range(m):
                if B[s].is_zero():
                    continue
                beta = lk.kco(u[q] * B[s])
                for t, k in enumerate(beta):
                    if not k.is_zero():
                        out[t * m + s] = out[t * m + s] + A[q] * L.embed(k)
        return out

    pairs = [(j, k) for j in range(n) for k in range(n)]
    tri = KSpan(K, [_flat(mu(X[k], X[j])) for j, k in pairs], m * m * d, scale_in_field(L))
    comult = []
    for A in X:
        iota = [L.zero()] * (m * m)
        for q in range(m):
            iota[q] = A[q]  # middle index 0 (u_0 = 1), last index q
        c = tri.coords(_flat(iota))
        if c is None:
            _halt("comultiplication not solvable in the triple tensor")
        comult.append({pairs[p]: x for p, x in enumerate(c) if not x.is_zero()})

    labels = [f"x{i}" for i in range(n)]
    hopf = HopfAlgebra(CommAlgebra(K, n, mult, unit, labels), comult, counit, antipode)
    # a (x) b -> (g -> a g(b))
    to_tcf = []
    for A in X:
        f = []
        for g in range(n):
            s = L.zero()
            for q in range(m):
                if not A[q].is_zero():
                    s = s + A[q] * ext.action[g](u[q])
            f.append(s)
        if not is_twisted(ext, f):
            _halt("image of an invariant is not a twisted class function")
        to_tcf.append(f)
    swap_matrix = [[swaps[c][r] for c in range(n)] for r in range(n)]
    return DiagonalModel(u, inv, hopf, to_tcf, swap_matrix)


# ---------------------------------------------------------------------------
# the product-of-residue-fields model


@dataclass
class PointData:
    class_index: int
    rep: int
    size: int
    centralizer: list
    residue: Subfield
    degree: int


@dataclass
class AdjointBundle:
    ext: GaloisExtensionData
    hopf: HopfAlgebra
    classes: ConjClassData
    points: list
    residue_bases: list          # per class, K-basis of L^{C_c} (L-elements, first is 1)
    index: list                  # basis index -> (class, r)
    tcf_basis: list = field(default_factory=list)
    tcf_hopf: HopfAlgebra | None = None
    diag: DiagonalModel | None = None
    models: dict = field(default_factory=dict)
    gprime_checked: int = 0

    @property
    def dim(self) -> int:
        return self.hopf.dim

    def function_of_basis(self, i: int) -> list:
        """The twisted class function of basis element ``i``."""
        G, L = self.ext.G, self.ext.L
        c, r = self.index[i]
        x = self.residue_bases[c][r]
        rep = self.classes.reps[c]
        f = [L.zero()] * G.order
        for h in range(G.order):
            t = G.conj(h, rep)
            if f[t].is_zero():
                f[t] = self.ext.action[h](x)
        return f

    def function_of(self, vec: Sequence[FieldElement]) -> list:
        L = self.ext.L
        out = [L.zero()] * self.ext.G.order
        for i, a in enumerate(vec):
            if a.is_zero():
                continue
            f = self.function_of_basis(i)
            ea = L.embed(a)
            out = [o + ea * v for o, v in zip(out, f)]
        return out

    def coords_of_function(self, f: Sequence[FieldElement]) -> list:
        """K-coordinates of a twisted class function in the product basis."""
        if not is_twisted(self.ext, f):
            _halt("not a twisted class function")
        out = []
        for c, rep in enumerate(self.classes.reps):
            kc = self._spans[c].coords(f[rep].c)
            if kc is None:
                _halt("class value outside the residue field")
            out.extend(kc)
        return out


def _residue_spans(ext, bases):
    L = ext.L
    return [KSpan(ext.K, [x.c for x in b], L.degree, scale_in_field(L)) for b in bases]


def _smallest_gprime(G: FiniteGroup, rep_c: int, t: int) -> list[int]:
    return [h for h in range(G.order) if G.conj(h, rep_c) == t]


def build_adjoint(ext: GaloisExtensionData, models: bool = True) -> AdjointBundle:
    G, L, K = ext.G, ext.L, ext.K
    n = G.order
    cd = conjugacy_classes(G)
    points, bases = [], []
    for ci, rep in enumerate(cd.reps):
        E = fixed_field(L, [ext.action[h] for h in cd.centralizers[ci]])
        b = relative_basis(E)
        points.append(PointData(ci, rep, cd.class_sizes[ci], cd.centralizers[ci], E, len(b)))
        bases.append(b)
    if sum(p.degree for p in points) != n:
        _halt("residue degrees do not sum to the group order")
    e_class = cd.class_of[G.identity]
    if points[e_class].degree != 1:
        _halt("residue field of the identity class is not K")
    index = [(c, r) for c in range(len(bases)) for r in range(len(bases[c]))]
    pos = {key: i for i, key in enumerate(index)}
    spans = _residue_spans(ext, bases)

    def kc(c, x):
        v = spans[c].coords(x.c)
        if v is None:
            _halt("element outside the residue field")
        return v

    # algebra: product of fields
    mult = [[{} for _ in range(n)] for _ in range(n)]
    for c, b in enumerate(bases):
        for r in range(len(b)):
            for s in range(r, len(b)):
                v = {pos[(c, t)]: x for t, x in enumerate(kc(c, b[r] * b[s])) if not x.is_zero()}
                mult[pos[(c, r)]][pos[(c, s)]] = v
                mult[pos[(c, s)]][pos[(c, r)]] = dict(v)
    unit = {pos[(c, 0)]: K.one() for c in range(len(bases))}

    # counit: projection to the identity class, L^G = K
    counit = [K.zero()] * n
    counit[pos[(e_class, 0)]] = L.restrict(bases[e_class][0], K)

    # antipode: (S x)_c = f(c^-1)
    antipode = [{} for _ in range(n)]
    for c, rep in enumerate(cd.reps):
        t = G.inverse[rep]
        c2 = cd.class_of[t]
        hs = _smallest_gprime(G, cd.reps[c2], t)
        for r, x in enumerate(bases[c2]):
            val = ext.action[hs[0]](x)
            for s, y in enumerate(kc(c, val)):
                if not y.is_zero():
                    antipode[pos[(c2, r)]][pos[(c, s)]] = y

    # comultiplication from double cosets
    comult = [{} for _ in range(n)]
    checked = 0
    for a, ra in enumerate(cd.reps):
        for b, rb in enumerate(cd.reps):
            dc = double_cosets(G, cd.centralizers[a], cd.centralizers[b])
            vecs = []
            for r, x in enumerate(bases[a]):
                for s, y in enumerate(bases[b]):
                    vecs.append(_flat([x * ext.action[g](y) for g in dc.reps]))
            span = KSpan(K, vecs, len(dc.reps) * L.degree, scale_in_field(L))
            rs = [(r, s) for r in range(len(bases[a])) for s in range(len(bases[b]))]
            targets = [G.prod(ra, G.conj(g, rb)) for g in dc.reps]
            for c in range(len(bases)):
                if all(cd.class_of[t] != c for t in targets):
                    continue
                for tt, z in enumerate(bases[c]):
                    vals = []
                    for t in targets:
                        if cd.class_of[t] != c:
                            vals.append(L.zero())
                            continue
                        hs = _smallest_gprime(G, cd.reps[c], t)
                        if not hs:
                            _halt("no conjugating element for a required component")
                        v0 = ext.action[hs[0]](z)
                        for h in hs[1:]:
                            if ext.action[h](z) != v0:
                                _halt("comultiplication depends on the choice of g'")
                            checked += 1
                        vals.append(v0)
                    coeffs = span.coords(_flat(vals))
                    if coeffs is None:
                        _halt("component value outside the tensor product")
                    entry = comult[pos[(c, tt)]]
                    for (r, s), x in zip(rs, coeffs):
                        if not x.is_zero():
                            entry[(pos[(a, r)], pos[(b, s)])] = x

    labels = []
    for c, b in enumerate(bases):
        for x in b:
            labels.append(f"c{c}:{points[c].residue._label(x.c)}")
    hopf = HopfAlgebra(CommAlgebra(K, n, mult, unit, labels), comult, counit, antipode)
    ad = AdjointBundle(ext, hopf, cd, points, bases, index, gprime_checked=checked)
    ad._spans = spans
    if models:
        attach_models(ad)
    return ad


def attach_models(ad: AdjointBundle) -> None:
    """Build the twisted-class-function and diagonal models and the isomorphisms."""
    ext = ad.ext
    L, K = ext.L, ext.K
    n, d = ext.G.order, L.degree
    tcf = twisted_class_functions(ext)
    ad.tcf_basis = tcf
    ad.tcf_hopf = function_model_hopf(ext, tcf)
    ad.diag = diagonal_invariants_model(ext)
    span = KSpan(K, [_flat(f) for f in tcf], n * d, scale_in_field(L))

    def to_tcf_matrix(funcs):
        cols = []
        for f in funcs:
            c = span.coords(_flat(f))
            if c is None:
                _halt("model image is not a twisted class function")
            cols.append(c)
        return [[cols[j][i] for j in range(len(cols))] for i in range(n)]

    prod_to_tcf = to_tcf_matrix([ad.function_of_basis(i) for i in range(n)])
    diag_to_tcf = to_tcf_matrix(ad.diag.to_tcf)
    tcf_to_prod = linalg.inverse_over(prod_to_tcf, K.one(), K.zero())
    diag_to_prod = linalg.matmul_over(tcf_to_prod, diag_to_tcf, K.zero())
    ad.models = {"prod->tcf": prod_to_tcf, "diag->tcf": diag_to_tcf,
                 "diag->prod": diag_to_prod, "tcf->prod": tcf_to_prod}


def model_isomorphisms(ad: AdjointBundle) -> dict:
    """The three pairwise model isomorphisms as checked Hopf morphisms."""
    if not ad.models:
        attach_models(ad)
    return {
        "prod->tcf": HopfMorphism(ad.hopf, ad.tcf_hopf, ad.models["prod->tcf"]),
        "diag->tcf": HopfMorphism(ad.diag.hopf, ad.tcf_hopf, ad.models["diag->tcf"]),
        "diag->prod": HopfMorphism(ad.diag.hopf, ad.hopf, ad.models["diag->prod"]),
    }


# ---------------------------------------------------------------------------
# base change and the fiber


@dataclass
class Trivialization:
    source: HopfAlgebra        # ad.hopf (x)_K L
    target: HopfAlgebra        # Maps(G, L)
    morphism: HopfMorphism
    inverse: list


def base_change_trivialization(ad: AdjointBundle) -> Trivialization:
    ext = ad.ext
    L, G = ext.L, ext.G
    n = G.order
    src = ad.hopf.base_change(L)
    tgt = trivial_bundle_hopf(G, L)
    funcs = [ad.function_of_basis(i) for i in range(n)]
    matrix = [[funcs[i][g] for i in range(n)] for g in range(n)]
    phi = HopfMorphism(src, tgt, matrix)
    rep = phi.check()
    if not rep.ok:
        _halt(f"evaluation map is not a Hopf morphism:\n{rep}")
    try:
        inv = linalg.inverse_over(matrix, L.one(), L.zero())
    except linalg.SingularMatrixError:
        _halt("evaluation map is not invertible")
    return Trivialization(src, tgt, phi, inv)


@dataclass
class FiberResult:
    group: FiniteGroup
    evaluation_is_iso: bool
    iso: object


def fiber_group(ad: AdjointBundle, triv: Trivialization | None = None) -> FiberResult:
    ext = ad.ext
    L, G = ext.L, ext.G
    n = G.order
    triv = triv or base_change_trivialization(ad)
    idem = [[triv.inverse[i][g] for i in range(n)] for g in range(n)]
    pts = [[[triv.morphism.matrix[g][i] for i in range(n)]] for g in range(n)]
    data = FactorData(L, idem, pts)
    F = grouplike_points(triv.source, data)
    same = F.table == G.table
    iso = find_isomorphism(G, F)
    if iso is None or not same:
        _halt("fiber group is not the Galois group")
    return FiberResult(F, same, iso)


# ---------------------------------------------------------------------------
# abelian collapse


def abelian_collapse(ad: AdjointBundle) -> HopfMorphism:
    """For abelian G: the isomorphism Ad(L/K) -> Maps(G, K) sending the class of g to delta_g."""
    G = ad.ext.G
    if not G.is_abelian():
        raise ValueError("group is not abelian")
    K = ad.hopf.base
    n = G.order
    tgt = trivial_bundle_hopf(G, K)
    M = [[K.zero()] * n for _ in range(n)]
    for i, (c, r) in enumerate(ad.index):
        M[ad.classes.reps[c]][i] = K.one()
        if not ad.residue_bases[c][r] == 1:
            _halt("residue basis of an abelian group is not trivial")
    phi = HopfMorphism(ad.hopf, tgt, M)
    rep = phi.check()
    if not rep.ok or not phi.is_invertible():
        _halt(f"abelian collapse failed:\n{rep}")
    return phi


# ---------------------------------------------------------------------------
# double cosets versus points of tensor products of residue fields


def tensor_point_counts(ad: AdjointBundle) -> dict:
    """For each pair of classes: (number of points of L^{C_a} (x)_K L^{C_b},
    number of double cosets, dimension identity holds)."""
    ext = ad.ext
    L, G = ext.L, ext.G
    out = {}
    for a, pa in enumerate(ad.points):
        for b, pb in enumerate(ad.points):
            Ea, Eb = pa.residue, pb.residue
            # embeddings of E_b into L, up to post-composition by C_a
            emb = {}
            for g in range(G.order):
                key = tuple(ext.action[g].apply_coords(v) for v in Eb.basis)
                emb.setdefault(key, g)
            seen, orbits = set(), []
            for key, g in sorted(emb.items(), key=lambda kv: kv[1]):
                if key in seen:
                    continue
                orbit = {tuple(ext.action[h].apply_coords(v) for v in Eb.basis)
                         for h in (G.mul(u, g) for u in pa.centralizer)}
                seen |= orbit
                orbits.append(g)
            degs = [compositum(L, Ea, Eb.image(ext.action[g])).degree // ext.K_degree
                    for g in orbits]
            dcount = len(double_cosets(G, pa.centralizer, pb.centralizer).reps)
            out[(a, b)] = (len(orbits), dcount, sum(degs) == pa.degree * pb.degree)
    return out


# ---------------------------------------------------------------------------
# towers


@dataclass
class TowerData:
    outer: GaloisExtensionData
    mid: Subfield
    N: list
    quotient: FiniteGroup
    projection: object
    inner: GaloisExtensionData       # M/K
    mid_level: int


def restrict_extension(ext: GaloisExtensionData, M: Subfield) -> TowerData:
    L, G = ext.L, ext.G
    for a in ext.action:
        if M.image(a) != M:
            raise TowerError("tower not Galois")
    K_sub = Subfield(L, [L.basis_element(i).c for i in range(ext.K_degree)], check=False)
    if not M.contains_subfield(K_sub):
        raise TowerError("tower not Galois")
    N = pointwise_stabilizer(M, ext.action)
    if not G.is_subgroup(N) or not G.is_normal(N):
        raise TowerError("tower not Galois")
    Q, pi = quotient(G, N)
    Mf = M.as_field()
    if Mf.base_degree != ext.K_degree:
        raise TowerError("base field is not a prefix of the middle field")
    P = linalg.Projector(M.basis, L.degree)
    auts = []
    for g in Q.labels:
        cols = [P.coords(ext.action[g].apply_coords(v)) for v in M.basis]
        auts.append(FieldAutomorphism(Mf, [[cols[j][i] for j in range(M.degree)]
                                           for i in range(M.degree)]))
    if group_of_automorphisms(auts).table != Q.table:
        _halt("restricted automorphisms do not form the quotient group")
    inner = make_extension(Mf, Q, auts)
    if len(N) * M.degree != L.degree:
        _halt("tower degrees do not multiply")
    return TowerData(ext, M, N, Q, pi, inner, M.degree)


@dataclass
class TowerResult:
    pullback: HopfMorphism
    injective: bool
    kernel: HopfAlgebra
    kernel_index: list          # product-basis indices of Ad(L/K) spanning the kernel
    kernel_classes: list        # class indices of Ad(L/K) surviving in the kernel
    ideal: list                 # K-basis of the ideal (dense K-vectors)
    projection: list            # per Ad(L/K) basis element, its kernel coordinates
    dims: tuple                 # (dim kernel, dim Ad(M/K), dim Ad(L/K))
    inner: AdjointBundle
    outer: AdjointBundle


def _kflat(vec):
    return _flat(vec)


def tower_maps(tower: TowerData, outer: AdjointBundle | None = None) -> TowerResult:
    ext = tower.outer
    G = ext.G
    outer = outer or build_adjoint(ext, models=False)
    inner = build_adjoint(tower.inner, models=False)
    K = outer.hopf.base
    n, nm = outer.dim, inner.dim
    M = tower.mid
    pi = tower.projection
    # pullback along G -> G/N
    cols = []
    for i in range(nm):
        fm = inner.function_of_basis(i)
        f = [M.to_ambient(fm[pi(g)].c) for g in range(G.order)]
        cols.append(outer.coords_of_function(f))
    P = [[cols[j][i] for j in range(nm)] for i in range(n)]
    pull = HopfMorphism(inner.hopf, outer.hopf, P)
    rep = pull.check()
    if not rep.ok:
        _halt(f"pullback is not a Hopf morphism:\n{rep}")
    injective = linalg.rank_over(P, nm) == nm
    if not injective:
        _halt("pullback is not injective")

    alg = outer.hopf.algebra
    gens = []
    for j in range(nm):
        z = {i: P[i][j] for i in range(n) if not P[i][j].is_zero()}
        eps = inner.hopf.counit[j]
        for k, u in alg.unit.items():
            z[k] = z.get(k, K.zero()) - eps * u
        gens.append(z)
    ideal_q = []
    for z in gens:
        for b in range(n):
            v = alg.dense(alg.mul(z, alg.basis_vec(b)))
            if any(not x.is_zero() for x in v):
                ideal_q.append(_kflat(v))
    scale = scale_in_field(K)
    Ib = k_basis(K, ideal_q, scale) if ideal_q else []
    dk = K.degree
    # quotient basis: standard vectors independent of the ideal
    acc = [scale(r, v) for v in Ib for r in range(dk)]
    rk = len(linalg.rref(acc, n * dk)[1]) if acc else 0
    qidx = []
    for i in range(n):
        e = _kflat(alg.dense(alg.basis_vec(i)))
        new = [scale(r, e) for r in range(dk)]
        R2, p2 = linalg.rref(acc + new, n * dk)
        if len(p2) == rk + dk:
            qidx.append(i)
            acc, rk = R2, len(p2)
    dim_k = len(qidx)
    if dim_k != len(tower.N):
        _halt(f"kernel has dimension {dim_k}, expected |N| = {len(tower.N)}")
    if dim_k * nm != n:
        _halt("dimensions are not multiplicative along the tower")
    span = KSpan(K, [_kflat(alg.dense(alg.basis_vec(i))) for i in qidx] + Ib, n * dk, scale)

    def proj_dense(v):
        c = span.coords(_kflat(v))
        if c is None:
            _halt("projection failed")
        return c[:dim_k], c[dim_k:]

    def proj(vs):
        return {k: x for k, x in enumerate(proj_dense(alg.dense(vs))[0]) if not x.is_zero()}

    projection = [proj_dense(alg.dense(alg.basis_vec(i)))[0] for i in range(n)]

    def proj_tensor(T):
        out = {}
        for (j, k), c in T.items():
            for p, x in enumerate(projection[j]):
                if x.is_zero():
                    continue
                for q, y in enumerate(projection[k]):
                    if not y.is_zero():
                        s = out.get((p, q), K.zero()) + c * x * y
                        if s.is_zero():
                            out.pop((p, q), None)
                        else:
                            out[(p, q)] = s
        return out

    H = outer.hopf
    # Hopf ideal checks
    for v in Ib:
        z = {i: FieldElement(K, tuple(v[i * dk:(i + 1) * dk])) for i in range(n)}
        z = {i: x for i, x in z.items() if not x.is_zero()}
        if not H.apply_counit(z).is_zero():
            _halt("ideal not in the augmentation ideal")
        if proj_tensor(H.apply_comult(z)):
            _halt("ideal is not a coideal")
        if proj(H.apply_antipode(z)):
            _halt("ideal is not stable under the antipode")
    kmult = [[proj(alg.mult[i][j]) for j in qidx] for i in qidx]
    kunit = proj(alg.unit)
    kcomult = [proj_tensor(H.comult[i]) for i in qidx]
    kcounit = [H.counit[i] for i in qidx]
    kanti = [proj(H.antipode[i]) for i in qidx]
    labels = [alg.basis_labels[i] for i in qidx]
    kernel = HopfAlgebra(CommAlgebra(K, dim_k, kmult, kunit, labels), kcomult, kcounit, kanti)
    # surviving classes: factor idempotents not in the ideal
    cd = outer.classes
    pos = {key: i for i, key in enumerate(outer.index)}
    surv = []
    for c in range(len(cd.reps)):
        if any(not x.is_zero() for x in projection[pos[(c, 0)]]):
            surv.append(c)
    expected = [c for c in range(len(cd.reps)) if cd.reps[c] in set(tower.N)]
    if surv != expected:
        _halt("kernel points are not the classes inside N")
    return TowerResult(pull, injective, kernel, qidx, surv, Ib, projection,
                       (dim_k, nm, n), inner, outer)


@dataclass
class SplittingReport:
    dims: tuple
    iso: HopfMorphism
    ok: bool


def pullback_splitting_check(tower: TowerData, result: TowerResult) -> SplittingReport:
    """kernel (x)_K M is isomorphic to Ad(L/M), compatibly with restriction to N."""
    ext = tower.outer
    L = ext.L
    m = tower.mid_level
    if tower.mid.basis != tuple(L.basis_element(i).c for i in range(m)) or \
            m not in L.tower_degrees() + [L.degree]:
        raise TowerError("middle field must be a tower level")
    Lm = L.with_base(m)
    N = list(tower.N)
    auts = [FieldAutomorphism(Lm, ext.action[g].matrix) for g in N]
    GN = group_of_automorphisms(auts)
    ad_LM = build_adjoint(make_extension(Lm, GN, auts), models=False)
    Mf = ad_LM.hopf.base
    outer = result.outer
    n = outer.dim
    # restriction to N: Ad(L/K) (x) M -> Ad(L/M)
    R_cols = []
    for i in range(n):
        f = outer.function_of_basis(i)
        fn = [FieldElement(Lm, f[g].c) for g in N]
        R_cols.append(ad_LM.coords_of_function(fn))
    R = [[R_cols[j][i] for j in range(n)] for i in range(len(N))]
    # R kills the ideal and factors through the projection
    dk = outer.hopf.base.degree
    for v in result.ideal:
        for row in R:
            s = Mf.zero()
            for i in range(n):
                z = FieldElement(Mf, tuple(v[i * dk:(i + 1) * dk]) + (Fraction(0),) * (m - dk))
                if not z.is_zero():
                    s = s + z * row[i]
            if not s.is_zero():
                _halt("restriction does not vanish on the kernel ideal")
    Rq = [[row[i] for i in result.kernel_index] for row in R]
    for i in range(n):
        for r, row in enumerate(R):
            s = Mf.zero()
            for q, x in enumerate(result.projection[i]):
                if not x.is_zero():
                    s = s + Mf.embed(x) * Rq[r][q]
            if s != row[i]:
                _halt("restriction does not factor through the kernel")
    src = result.kernel.base_change(Mf)
    iso = HopfMorphism(src, ad_LM.hopf, Rq)
    rep = iso.check()
    ok = rep.ok and iso.is_invertible()
    if not ok:
        _halt(f"pullback splitting failed:\n{rep}")
    return SplittingReport((result.kernel.dim, ad_LM.dim), iso, ok)


@dataclass
class ActionReport:
    table: list               # table[q][k]: index in N of g n_k g^-1, q running over G/N
    cyclotomic: dict          # k -> bool (sigma_k acts on N as multiplication by k)
    ok: bool


def kernel_action(tower: TowerData, zeta: FieldElement | None = None,
                  alpha: FieldElement | None = None, n: int | None = None) -> ActionReport:
    """Conjugation action of G/N on the abelian kernel N, and for Kummer towers
    the comparison with the cyclotomic character."""
    ext = tower.outer
    G = ext.G
    N = list(tower.N)
    if any(G.mul(a, b) != G.mul(b, a) for a in N for b in N):
        raise TowerError("kernel not abelian")
    pos = {x: i for i, x in enumerate(N)}
    table = [[pos[G.conj(g, x)] for x in N] for g in tower.quotient.labels]
    cyc = {}
    ok = True
    if zeta is not None:
        act = ext.action
        taus = [t for t in N if act[t](alpha) == zeta * alpha]
        if len(taus) != 1:
            _halt("no unique Kummer generator in N")
        tau = taus[0]
        powers = [zeta ** k for k in range(n)]
        for g in tower.quotient.labels:
            img = act[g](zeta)
            ks = [k for k in range(n) if powers[k] == img]
            if len(ks) != 1:
                _halt("Galois element does not send zeta to a power of zeta")
            k = ks[0]
            good = G.conj(g, tau) == G.power(tau, k)
            cyc[k] = good
            ok = ok and good
    return ActionReport(table, cyc, ok)


# ---------------------------------------------------------------------------
# full invariant suite for one extension


def verify_adjoint(ad: AdjointBundle) -> dict:
    """Named exact checks; values are (ok, detail)."""
    out = {}
    ext = ad.ext
    n = ext.G.order
    out["dimension_law"] = (sum(p.degree for p in ad.points) == n == ad.dim,
                            [p.degree for p in ad.points])
    out["twisted_basis"] = (all(is_twisted(ext, f) for f in ad.tcf_basis), len(ad.tcf_basis))
    rep = verify_hopf(ad.hopf)
    out["hopf_axioms"] = (rep.ok, rep.failures())
    out["tcf_hopf_axioms"] = (verify_hopf(ad.tcf_hopf).ok, None)
    out["diag_hopf_axioms"] = (verify_hopf(ad.diag.hopf).ok, None)
    for name, phi in model_isomorphisms(ad).items():
        r = phi.check()
        out[f"model {name}"] = (r.ok and phi.is_invertible(), r.failures())
    S = ad.diag.swap_matrix
    K = ad.hopf.base
    out["coinverse_involution"] = (is_identity_matrix(linalg.matmul_over(S, S, K.zero())), None)
    out["gprime_independent"] = (True, ad.gprime_checked)
    counts = tensor_point_counts(ad)
    out["double_coset_points"] = (all(p == d and ok for p, d, ok in counts.values()),
                                  {f"{a},{b}": v[:2] for (a, b), v in counts.items()})
    if ext.G.is_abelian():
        abelian_collapse(ad)
        out["abelian_collapse"] = (True, None)
    return out
