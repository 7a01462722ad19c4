"""Number fields over Q by exact structure constants.

A field is a Q-basis ``b_0 = 1, b_1, ...`` with a multiplication tensor.
Fields are built as towers: extending ``F`` by a monic ``p(x)`` gives the
basis ``b_i x^p`` stored at index ``p * deg(F) + i``, so every tower level
(and in particular the designated base subfield ``K``) occupies a prefix of
the basis.  Splitting data is never discovered: automorphisms come from
root certificates that are checked exactly.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iproduct
from typing import Sequence

from . import linalg
from .config import DEFAULTS
from .grp import FiniteGroup


class FieldError(ValueError):
    pass


@dataclass(frozen=True)
class TowerStep:
    label: str
    minpoly: tuple  # ascending coefficients, each a coordinate tuple over the level below
    below_degree: int

    @property
    def degree(self) -> int:
        return len(self.minpoly) - 1


class NumberField:
    """Finite extension of Q given by structure constants.

    ``mult[i][j][k]`` is the coefficient of ``b_k`` in ``b_i b_j``.
    """

    def __init__(self, mult, basis_labels=None, tower=(), base_degree: int = 1,
                 check: bool = True):
        d = len(mult)
        self.degree = d
        self.mult = tuple(tuple(tuple(Fraction(c) for c in mult[i][j]) for j in range(d))
                          for i in range(d))
        self.basis_labels = tuple(basis_labels or [f"b{i}" for i in range(d)])
        self.tower = tuple(tower)
        self.base_degree = base_degree
        self._sparse = [[tuple((k, c) for k, c in enumerate(self.mult[i][j]) if c)
                         for j in range(d)] for i in range(d)]
        if d % base_degree:
            raise FieldError("base degree does not divide the degree")
        if check:
            self._check_algebra()

    # -- structure ---------------------------------------------------------

    def __repr__(self):
        return f"NumberField(degree={self.degree}, labels={list(self.basis_labels)})"

    def __eq__(self, other):
        return (isinstance(other, NumberField) and self.degree == other.degree
                and self.mult == other.mult and self.base_degree == other.base_degree)

    def __hash__(self):
        return hash((self.degree, self.mult[1:2] if self.degree > 1 else ()))

    def same_field(self, other: "NumberField") -> bool:
        return self.degree == other.degree and self.mult == other.mult

    def _check_algebra(self):
        d = self.degree
        for i in range(d):
            row = self.mult[0][i]
            if any(row[k] != (1 if k == i else 0) for k in range(d)):
                raise FieldError("b_0 is not the identity")
            for j in range(i):
                if self.mult[i][j] != self.mult[j][i]:
                    raise FieldError("multiplication is not commutative")
        basis = [self.basis_element(i) for i in range(d)]
        for i, j, k in iproduct(range(d), repeat=3):
            if (basis[i] * basis[j]) * basis[k] != basis[i] * (basis[j] * basis[k]):
                raise FieldError(f"multiplication is not associative at {(i, j, k)}")
        for i in range(d):
            if linalg.rank(self.mult_matrix(basis[i].c), d) != d:
                raise FieldError("reducible minimal polynomial")
        if d > 1 and not _is_field(self):
            raise FieldError("reducible minimal polynomial")

    # -- elements ------------------------------------------------------------

    def elem(self, coords) -> "FieldElement":
        coords = tuple(linalg.parse_rational(c) for c in coords)
        if len(coords) != self.degree:
            raise FieldError(f"expected {self.degree} coordinates, got {len(coords)}")
        return FieldElement(self, coords)

    def scalar(self, q) -> "FieldElement":
        return FieldElement(self, (Fraction(q),) + (Fraction(0),) * (self.degree - 1))

    def zero(self) -> "FieldElement":
        return self.scalar(0)

    def one(self) -> "FieldElement":
        return self.scalar(1)

    def basis_element(self, i: int) -> "FieldElement":
        c = [Fraction(0)] * self.degree
        c[i] = Fraction(1)
        return FieldElement(self, tuple(c))

    def gen(self, step: int) -> "FieldElement":
        """Generator adjoined at tower step ``step``."""
        below = self.tower[step].below_degree
        if self.tower[step].degree == 1:
            c = self.tower[step].minpoly[0]
            return -self.embed_coords(c)
        return self.basis_element(below)

    def mul_coords(self, x: Sequence[Fraction], y: Sequence[Fraction]) -> tuple:
        d = self.degree
        if d == 1:
            return (x[0] * y[0],)
        out = [Fraction(0)] * d
        sp = self._sparse
        ynz = [(j, b) for j, b in enumerate(y) if b]
        for i, a in enumerate(x):
            if not a:
                continue
            row = sp[i]
            for j, b in ynz:
                ab = a * b
                for k, c in row[j]:
                    out[k] += ab * c
        return tuple(out)

    def mult_matrix(self, x: Sequence[Fraction]) -> list:
        """Matrix of ``y -> x*y``; column ``j`` holds ``x*b_j``."""
        d = self.degree
        cols = [self.mul_coords(x, self.basis_element(j).c) for j in range(d)]
        return [[cols[j][i] for j in range(d)] for i in range(d)]

    def inverse_coords(self, x: Sequence[Fraction]) -> tuple:
        if not any(x):
            raise ZeroDivisionError("division by zero")
        if self.degree == 1:
            return (1 / x[0],)
        one = [[Fraction(1)]] + [[Fraction(0)] for _ in range(self.degree - 1)]
        sol = linalg.solve(self.mult_matrix(x), one)
        if sol is None:
            raise ZeroDivisionError("element is not invertible")
        return tuple(r[0] for r in sol)

    # -- subfields given by prefixes -------------------------------------------

    def tower_degrees(self) -> list[int]:
        """Cumulative degrees of the tower levels, starting with 1."""
        out = [1]
        for st in self.tower:
            out.append(out[-1] * st.degree)
        return out

    def prefix_field(self, d: int) -> "NumberField":
        cache = self.__dict__.setdefault("_prefix_cache", {})
        if d in cache:
            return cache[d]
        if d == self.degree:
            F = self if self.base_degree == 1 else self.with_base(1)
        else:
            for i, j in iproduct(range(d), repeat=2):
                if any(self.mult[i][j][k] for k in range(d, self.degree)):
                    raise FieldError(f"first {d} basis elements do not span a subfield")
            levels = self.tower_degrees()
            tower = self.tower[:levels.index(d)] if d in levels else ()
            F = NumberField([[self.mult[i][j][:d] for j in range(d)] for i in range(d)],
                            self.basis_labels[:d], tower, 1, check=False)
        cache[d] = F
        return F

    def base_field(self) -> "NumberField":
        return self.prefix_field(self.base_degree)

    def with_base(self, base_degree: int) -> "NumberField":
        """The same field with a different designated base level."""
        if base_degree not in self.tower_degrees() and base_degree not in (1, self.degree):
            raise FieldError("base must be a tower level")
        F = NumberField.__new__(NumberField)
        F.__dict__.update({k: v for k, v in self.__dict__.items() if not k.startswith("_prefix")})
        F.base_degree = base_degree
        return F

    def is_prefix(self, F: "NumberField") -> bool:
        d = F.degree
        if d > self.degree:
            return False
        return all(self.mult[i][j][:d] == F.mult[i][j] and not any(self.mult[i][j][d:])
                   for i in range(d) for j in range(d))

    def embed_coords(self, coords: Sequence[Fraction]) -> "FieldElement":
        """Embed coordinates of a prefix subfield element."""
        c = tuple(coords) + (Fraction(0),) * (self.degree - len(coords))
        return FieldElement(self, c)

    def embed(self, x: "FieldElement") -> "FieldElement":
        if x.field is self:
            return x
        key = id(x.field)
        ok = self.__dict__.setdefault("_embed_ok", {})
        if key not in ok:
            ok[key] = self.is_prefix(x.field)
        if not ok[key]:
            raise FieldError("field is not a prefix subfield")
        return self.embed_coords(x.c)

    def restrict(self, x: "FieldElement", F: "NumberField") -> "FieldElement":
        """Inverse of :meth:`embed` for elements lying in the prefix ``F``."""
        if any(x.c[F.degree:]):
            raise FieldError("element does not lie in the subfield")
        return FieldElement(F, x.c[:F.degree])

    def random_element(self, rng: random.Random, bound: int = 5) -> "FieldElement":
        return FieldElement(self, tuple(Fraction(rng.randint(-bound, bound))
                                        for _ in range(self.degree)))


class FieldElement:
    """Element of a :class:`NumberField` as a rational coordinate vector."""

    __slots__ = ("field", "c")

    def __init__(self, field: NumberField, coords: tuple):
        self.field = field
        self.c = coords

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.field is not self.field and other.field.degree != self.field.degree:
                return self.field.embed(other) if other.field.degree < self.field.degree else None
            return other
        if isinstance(other, (int, Fraction)):
            return self.field.scalar(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FieldElement(self.field, tuple(a + b for a, b in zip(self.c, o.c)))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FieldElement(self.field, tuple(a - b for a, b in zip(self.c, o.c)))

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return FieldElement(self.field, tuple(-a for a in self.c))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return FieldElement(self.field, tuple(a * other for a in self.c))
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FieldElement(self.field, self.field.mul_coords(self.c, o.c))

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        return FieldElement(self.field, self.field.inverse_coords(self.c))

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return FieldElement(self.field, tuple(a / other for a in self.c))
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = self.field.one()
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            if other.field.degree != self.field.degree:
                try:
                    other = self._coerce(other)
                except FieldError:
                    return False
                if other is None:
                    return False
            return self.c == other.c
        if isinstance(other, (int, Fraction)):
            return self.c[0] == other and not any(self.c[1:])
        return NotImplemented

    def __hash__(self):
        return hash(self.c)

    def __bool__(self):
        return any(self.c)

    def is_zero(self) -> bool:
        return not any(self.c)

    def bit_size(self) -> int:
        return sum(a.numerator.bit_length() + a.denominator.bit_length() for a in self.c if a)

    def is_rational(self) -> bool:
        return not any(self.c[1:])

    def __repr__(self):
        if self.field.degree == 1:
            return str(self.c[0])
        terms = [f"{a}*{lab}" for a, lab in zip(self.c, self.field.basis_labels) if a]
        return " + ".join(terms) if terms else "0"


# ---------------------------------------------------------------------------
# field test


def charpoly(A: list) -> list[Fraction]:
    """Characteristic polynomial (ascending, monic) by Faddeev-LeVerrier."""
    n = len(A)
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    M = linalg.zeros(n, n)
    for k in range(1, n + 1):
        AM = linalg.matmul(A, M)
        for i in range(n):
            AM[i][i] += coeffs[n - k + 1]
        M = AM
        AM2 = linalg.matmul(A, M)
        coeffs[n - k] = -sum(AM2[i][i] for i in range(n)) / k
    return coeffs


def _is_field(F: NumberField, attempts: int = 30) -> bool:
    """Exact field test via a primitive element.

    A commutative Q-algebra is a field iff some element has a squarefree,
    Q-irreducible characteristic polynomial of full degree.  A non-reduced
    algebra never produces a squarefree one, so repeated failure means the
    algebra is not a field.
    """
    import sympy

    x = sympy.Symbol("x")
    rng = random.Random(20090613)
    cands = [F.basis_element(i) for i in range(1, F.degree)]
    while len(cands) < attempts:
        cands.append(F.random_element(rng, 3))
    for theta in cands:
        cp = charpoly(F.mult_matrix(theta.c))
        poly = sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in reversed(cp)],
                          x, domain="QQ")
        if sympy.degree(sympy.gcd(poly, poly.diff(x))) > 0:
            continue
        return poly.is_irreducible
    return False


# ---------------------------------------------------------------------------
# construction


def base_rationals() -> NumberField:
    return NumberField([[[1]]], ["1"], (), 1, check=False)


def _coeff_coords(F: NumberField, c) -> tuple:
    if isinstance(c, (list, tuple)):
        v = tuple(linalg.parse_rational(a) for a in c)
        if len(v) != F.degree:
            raise FieldError("coefficient has the wrong number of coordinates")
        return v
    return F.scalar(linalg.parse_rational(c)).c


def _mono_label(lab: str, gen: str, p: int) -> str:
    if p == 0:
        return lab
    g = gen if p == 1 else f"{gen}^{p}"
    return g if lab == "1" else f"{lab}*{g}"


def extend(F: NumberField, minpoly: Sequence, label: str = "x",
           degree_bound: int | None = None, check: bool = True) -> NumberField:
    """Adjoin a root of the monic ``minpoly`` (ascending coefficients over F)."""
    bound = DEFAULTS.degree_bound if degree_bound is None else degree_bound
    coeffs = [_coeff_coords(F, c) for c in minpoly]
    m = len(coeffs) - 1
    if m < 1:
        raise FieldError("minimal polynomial must have degree >= 1")
    if coeffs[-1] != F.one().c:
        raise FieldError("minimal polynomial must be monic")
    dF = F.degree
    d = dF * m
    if d > bound:
        raise FieldError(f"degree {d} exceeds the bound {bound}")
    zero = F.zero().c
    # x^e reduced mod p, as m coefficients over F
    red = []
    for e in range(2 * m - 1):
        if e < m:
            v = [zero] * m
            v[e] = F.one().c
        else:
            prev = red[e - 1]
            top = prev[m - 1]
            v = [zero] + list(prev[:m - 1])
            for k in range(m):
                t = F.mul_coords(top, coeffs[k])
                v[k] = tuple(a - b for a, b in zip(v[k], t))
        red.append(v)
    mult = [[None] * d for _ in range(d)]
    for p, i in iproduct(range(m), range(dF)):
        for q, j in iproduct(range(m), range(dF)):
            bij = F.mult[i][j]
            out = [Fraction(0)] * d
            for k in range(m):
                ck = F.mul_coords(bij, red[p + q][k])
                for t, a in enumerate(ck):
                    if a:
                        out[k * dF + t] += a
            mult[p * dF + i][q * dF + j] = out
    labels = [_mono_label(F.basis_labels[i], label, p) for p in range(m) for i in range(dF)]
    tower = F.tower + (TowerStep(label, tuple(coeffs), dF),)
    return NumberField(mult, labels, tower, F.base_degree, check=check)


def build_tower(steps: Sequence[tuple[str, Sequence]], base_degree: int = 1,
                degree_bound: int | None = None) -> NumberField:
    F = base_rationals()
    for label, poly in steps:
        F = extend(F, poly, label, degree_bound, check=False)
    F = NumberField(F.mult, F.basis_labels, F.tower, 1, check=True)
    if base_degree != 1:
        F = F.with_base(base_degree)
    return F


# ---------------------------------------------------------------------------
# automorphisms


class FieldAutomorphism:
    """Q-linear field automorphism; column ``j`` of ``matrix`` is the image of ``b_j``."""

    def __init__(self, field: NumberField, matrix, check: bool = True):
        self.field = field
        self.matrix = tuple(tuple(Fraction(a) for a in row) for row in matrix)
        if check:
            self.check()

    def image(self, j: int) -> tuple:
        return tuple(row[j] for row in self.matrix)

    def __call__(self, x: FieldElement) -> FieldElement:
        return FieldElement(self.field, tuple(linalg.matvec(self.matrix, x.c)))

    def apply_coords(self, c: Sequence[Fraction]) -> tuple:
        return tuple(linalg.matvec(self.matrix, c))

    def compose(self, other: "FieldAutomorphism") -> "FieldAutomorphism":
        """``self o other``."""
        return FieldAutomorphism(self.field, linalg.matmul(self.matrix, other.matrix), check=False)

    def __eq__(self, other):
        return isinstance(other, FieldAutomorphism) and self.matrix == other.matrix

    def __hash__(self):
        return hash(self.matrix)

    def is_identity(self) -> bool:
        return self.matrix == tuple(tuple(linalg.identity(self.field.degree)[i])
                                    for i in range(self.field.degree))

    def check(self):
        L = self.field
        d = L.degree
        if self.image(0) != L.one().c:
            raise FieldError("automorphism does not fix 1")
        for j in range(L.base_degree):
            if self.image(j) != L.basis_element(j).c:
                raise FieldError("automorphism moves the base field")
        imgs = [self.image(j) for j in range(d)]
        for i in range(d):
            for j in range(i, d):
                lhs = self.apply_coords(L.mult[i][j])
                if lhs != L.mul_coords(imgs[i], imgs[j]):
                    raise FieldError("map is not multiplicative")
        if linalg.rank(self.matrix, d) != d:
            raise FieldError("map is not invertible")


def _eval_poly(L: NumberField, coeffs: Sequence[tuple], r: FieldElement) -> FieldElement:
    acc = L.zero()
    for c in reversed(coeffs):
        acc = acc * r + L.elem(c)
    return acc


def automorphisms(L: NumberField, certificates: dict):
    """All automorphisms of L over its base, from certified roots.

    ``certificates`` maps a tower step index to the list of roots (in L) of
    that step's minimal polynomial.  Returns ``(auts, group, action)`` with
    ``action[g]`` the automorphism of group element ``g`` and the group law
    ``g*h <-> action[g] o action[h]``.
    """
    levels = L.tower_degrees()
    if L.base_degree not in levels:
        raise FieldError("base degree is not a tower level")
    kb = levels.index(L.base_degree)
    roots: dict[int, list[FieldElement]] = {}
    for k in range(kb, len(L.tower)):
        step = L.tower[k]
        raw = certificates.get(k, certificates.get(str(k)))
        if raw is None:
            raise FieldError(f"missing root certificate for step {k}")
        rs = [r if isinstance(r, FieldElement) else L.elem(r) for r in raw]
        coeffs = [L.embed_coords(c).c for c in step.minpoly]
        for r in rs:
            if _eval_poly(L, coeffs, r) != 0:
                raise FieldError(f"bad root certificate at step {k}")
        if len(set(r.c for r in rs)) != len(rs) or len(rs) != step.degree:
            raise FieldError(f"step {k}: need {step.degree} distinct roots, got {len(rs)}")
        roots[k] = rs

    found = []

    def rec(k, images, choice):
        # images: images of the basis of level k (length levels[k])
        if k == len(L.tower):
            found.append((tuple(choice), images))
            return
        step = L.tower[k]
        if k < kb:
            base = [L.basis_element(i) for i in range(levels[k + 1])]
            rec(k + 1, base, choice)
            return
        # sigma applied to the coefficients of the step polynomial
        sig_coeffs = []
        for c in step.minpoly:
            acc = L.zero()
            for i, a in enumerate(c):
                if a:
                    acc = acc + images[i] * a
            sig_coeffs.append(acc.c)
        for idx, r in enumerate(roots[k]):
            if _eval_poly(L, sig_coeffs, r) != 0:
                continue
            new = []
            rp = L.one()
            for _ in range(step.degree):
                new.extend(im * rp for im in images)
                rp = rp * r
            rec(k + 1, new, choice + [idx])

    rec(0, [L.one()], [])
    auts = []
    keys = []
    for choice, images in found:
        M = [[images[j].c[i] for j in range(L.degree)] for i in range(L.degree)]
        try:
            a = FieldAutomorphism(L, M)
        except FieldError:
            continue
        auts.append(a)
        keys.append((not a.is_identity(), tuple(reversed(choice))))
    order = sorted(range(len(auts)), key=lambda i: keys[i])
    auts = [auts[i] for i in order]
    if L.degree % L.base_degree or len(auts) != L.degree // L.base_degree:
        raise FieldError("extension not Galois over base")
    group = group_of_automorphisms(auts)
    return auts, group, auts


def group_of_automorphisms(auts: Sequence[FieldAutomorphism]) -> FiniteGroup:
    index = {a.matrix: i for i, a in enumerate(auts)}
    table = []
    for a in auts:
        row = []
        for b in auts:
            m = a.compose(b).matrix
            if m not in index:
                raise FieldError("not a subgroup of automorphisms")
            row.append(index[m])
        table.append(row)
    return FiniteGroup.from_table(table)


# ---------------------------------------------------------------------------
# subfields


class Subfield:
    """Q-subspace of an ambient field closed under multiplication, in RREF."""

    def __init__(self, field: NumberField, vectors, check: bool = True):
        self.field = field
        R, piv = linalg.rref([list(v) for v in vectors], field.degree)
        self.basis = tuple(tuple(r) for r in R)
        self.pivots = tuple(piv)
        if check:
            self.check()

    @property
    def degree(self) -> int:
        return len(self.basis)

    def __repr__(self):
        return f"Subfield(degree={self.degree} in {self.field.degree})"

    def __eq__(self, other):
        return isinstance(other, Subfield) and self.basis == other.basis

    def __hash__(self):
        return hash(self.basis)

    def contains(self, x) -> bool:
        c = x.c if isinstance(x, FieldElement) else x
        return linalg.in_span(self.basis, list(self.pivots), c)

    def contains_subfield(self, E: "Subfield") -> bool:
        return all(self.contains(v) for v in E.basis)

    def elements(self) -> list[FieldElement]:
        return [FieldElement(self.field, v) for v in self.basis]

    def check(self):
        if not self.contains(self.field.one()):
            raise FieldError("subfield does not contain 1")
        els = self.elements()
        for i, a in enumerate(els):
            for b in els[i:]:
                if not self.contains(a * b):
                    raise FieldError("subspace is not closed under multiplication")

    def image(self, sigma: FieldAutomorphism) -> "Subfield":
        return Subfield(self.field, [sigma.apply_coords(v) for v in self.basis], check=False)

    def relative_degree(self) -> int:
        return self.degree // self.field.base_degree

    def as_field(self) -> NumberField:
        """This subfield as a standalone field in its RREF basis.

        When the ambient base is a tower prefix contained here, the base keeps
        its prefix position (RREF rows of a space containing ``b_0..b_{k-1}``
        start with exactly those unit vectors).
        """
        P = linalg.Projector(self.basis, self.field.degree)
        els = self.elements()
        d = self.degree
        mult = [[P.coords((els[i] * els[j]).c) for j in range(d)] for i in range(d)]
        base = self.field.base_degree
        if not all(self.basis[i] == self.field.basis_element(i).c for i in range(base)):
            base = 1
        labels = [self._label(v) for v in self.basis]
        return NumberField(mult, labels, (), base, check=False)

    def _label(self, v) -> str:
        terms = [(a, lab) for a, lab in zip(v, self.field.basis_labels) if a]
        if len(terms) == 1 and terms[0][0] == 1:
            return terms[0][1]
        return "(" + " + ".join(f"{a}*{lab}" for a, lab in terms) + ")"

    def to_ambient(self, coords: Sequence[Fraction]) -> FieldElement:
        out = [Fraction(0)] * self.field.degree
        for a, v in zip(coords, self.basis):
            if a:
                for i, x in enumerate(v):
                    out[i] += a * x
        return FieldElement(self.field, tuple(out))


def whole_field(L: NumberField) -> Subfield:
    return Subfield(L, linalg.identity(L.degree), check=False)


def base_subfield(L: NumberField) -> Subfield:
    return Subfield(L, [L.basis_element(i).c for i in range(L.base_degree)], check=False)


def fixed_field(L: NumberField, auts: Sequence[FieldAutomorphism]) -> Subfield:
    """``L^H`` for a group H of automorphisms, as the kernel of the maps ``sigma - id``."""
    group_of_automorphisms(auts)  # closure check
    d = L.degree
    rows = []
    for a in auts:
        for i in range(d):
            row = list(a.matrix[i])
            row[i] -= 1
            if any(row):
                rows.append(row)
    E = Subfield(L, linalg.nullspace(rows, d) if rows else linalg.identity(d))
    if E.degree * len(auts) != d:
        raise AssertionError("fixed field has the wrong degree")
    return E


def saturate(L: NumberField, vectors) -> Subfield:
    """Smallest subfield containing the given vectors (iterated span of products)."""
    vecs = [L.one().c] + [tuple(v) for v in vectors]
    R, piv = linalg.rref(vecs, L.degree)
    while True:
        els = [FieldElement(L, tuple(r)) for r in R]
        prods = [(a * b).c for i, a in enumerate(els) for b in els[i:]]
        R2, piv2 = linalg.rref(list(R) + prods, L.degree)
        if len(piv2) == len(piv):
            return Subfield(L, R2, check=True)
        R, piv = R2, piv2


def compositum(L: NumberField, E1: Subfield, E2: Subfield) -> Subfield:
    prods = [(a * b).c for a in E1.elements() for b in E2.elements()]
    return saturate(L, prods)


def generated_subfield(L: NumberField, elements) -> Subfield:
    return saturate(L, [x.c if isinstance(x, FieldElement) else x for x in elements])


def pointwise_stabilizer(E: Subfield, action: Sequence[FieldAutomorphism]) -> list[int]:
    return [g for g, a in enumerate(action)
            if all(a.apply_coords(v) == v for v in E.basis)]


# ---------------------------------------------------------------------------
# linear algebra over the base field K (a tower prefix of L)


class KSpan:
    """K-coordinates with respect to K-independent vectors of a K-module.

    The module is a Q-space of dimension ``dim``; ``scale(r, v)`` multiplies
    ``v`` by the r-th basis element of K.  All solving happens over Q.
    """

    def __init__(self, K: NumberField, vectors, dim: int, scale):
        self.K = K
        self.n = len(vectors)
        cols = [scale(r, v) for v in vectors for r in range(K.degree)]
        self.proj = linalg.Projector(cols, dim)

    def coords(self, w, check: bool = True) -> list[FieldElement] | None:
        x = self.proj.coords(list(w), check)
        if x is None:
            return None
        dk = self.K.degree
        return [FieldElement(self.K, tuple(x[j * dk:(j + 1) * dk])) for j in range(self.n)]


def scale_in_field(L: NumberField):
    """Scaling by the prefix basis element ``b_r`` on vectors of L-elements."""
    d = L.degree

    def scale(r, v):
        if r == 0:
            return list(v)
        k = L.basis_element(r).c
        out = []
        for s in range(0, len(v), d):
            out.extend(L.mul_coords(k, v[s:s + d]))
        return out
    return scale


def relative_basis(E: Subfield) -> list[FieldElement]:
    """K-basis of a subfield E containing the base K of its ambient field, starting with 1."""
    L = E.field
    dk = L.base_degree
    scale = scale_in_field(L)
    chosen = []
    rows: list = []
    rk = 0
    for v in E.basis:
        new = [scale(r, list(v)) for r in range(dk)]
        r2 = linalg.rank(rows + new, L.degree)
        if r2 == rk + dk:
            chosen.append(FieldElement(L, tuple(v)))
            rows = rows + new
            rk = r2
    if rk != E.degree:
        raise FieldError("subfield does not contain the base field")
    return chosen
