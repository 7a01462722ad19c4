"""Corpus-driven verification suite.

Every top-level ``*.json`` file of a corpus directory is a case whose
``kind`` selects a runner.  Each runner returns a list of named checks;
exceptions become failed checks so one broken case never aborts the rest.
"""
from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import formats
from .adjoint import (abelian_collapse, base_change_trivialization,
                      build_adjoint, build_extension, fiber_group, kernel_action,
                      pullback_splitting_check, restrict_extension, tower_maps,
                      verify_adjoint)
from .grp import conjugacy_classes, double_cosets, product_class_set
from .hopf import (cartier_iso, grouplike_points, is_identity_matrix, mu_factor_data,
                   mutation_sensitivity, schur_block_check, trivial_bundle_factor_data,
                   trivial_bundle_hopf, verify_hopf)
from .numfield import base_rationals
from .profinite import (compatible_families, compositum_tower, is_trivial_etale,
                        limit_element, mu_tower_maps, shift_obstruction, zhat_truncation)

MUTATIONS = 20
INPUT_ERRORS = (formats.CorpusError, OSError, KeyError)


@dataclass
class CheckResult:
    case: str
    check: str
    ok: bool
    detail: str = ""
    seconds: float = 0.0


@dataclass
class Report:
    results: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    input_errors: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results) and not self.input_errors

    @property
    def exit_code(self) -> int:
        if self.input_errors:
            return 2
        return 0 if self.ok else 1

    def failed_cases(self) -> list[str]:
        return sorted({r.case for r in self.results if not r.ok})

    def text(self, timings: bool = True) -> str:
        lines = [f"warning: {w}" for w in self.warnings]
        for r in self.results:
            t = f"  [{r.seconds:.2f}s]" if timings else ""
            d = f"  {r.detail}" if r.detail else ""
            lines.append(f"{'PASS' if r.ok else 'FAIL'}  {r.case} :: {r.check}{d}{t}")
        n_ok = sum(r.ok for r in self.results)
        lines.append(f"{n_ok}/{len(self.results)} checks passed; "
                     f"{len(self.failed_cases())} failing cases; "
                     f"{len(self.input_errors)} input errors")
        return "\n".join(lines) + "\n"


class _Collector:
    def __init__(self, case: str):
        self.case = case
        self.out: list[CheckResult] = []

    def run(self, name: str, fn, *args):
        """Run ``fn``; it returns ok or (ok, detail).  Exceptions fail the check."""
        t0 = time.perf_counter()
        try:
            res = fn(*args)
            ok, detail = (res if isinstance(res, tuple) else (bool(res), ""))
        except Exception as exc:  # a failed check, recorded not raised
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        self.out.append(CheckResult(self.case, name, bool(ok), str(detail),
                                    time.perf_counter() - t0))
        return ok

    def add(self, name, ok, detail=""):
        self.out.append(CheckResult(self.case, name, bool(ok), str(detail)))


def _golden_check(col: _Collector, text: str, rel, where: Path, golden_dir):
    if rel is None:
        return
    path = Path(golden_dir) / Path(rel).name if golden_dir else where / rel
    if not path.exists():
        col.add("golden", False, f"missing golden file {path}")
        return
    col.add("golden", path.read_text() == text, str(path.name))


# ---------------------------------------------------------------------------
# runners


def run_extension_case(case: formats.CorpusCase, golden_dir=None) -> list[CheckResult]:
    col = _Collector(case.name)
    doc, exp = case.doc, case.expected
    L, certs = formats.field_from_json(formats._resolve(doc["extension"], case.where))
    state: dict = {}

    def ext_step():
        state["ext"] = build_extension(L, certs)
        G = state["ext"].G
        ok = "group_order" not in exp or G.order == exp["group_order"]
        if "class_sizes" in exp:
            ok = ok and conjugacy_classes(G).class_sizes == exp["class_sizes"]
        return ok, f"|G| = {G.order}"

    if not col.run("build_extension", ext_step):
        return col.out
    ext = state["ext"]

    def adj_step():
        state["ad"] = ad = build_adjoint(ext)
        degs = [p.degree for p in ad.points]
        ok = "residue_degrees" not in exp or degs == exp["residue_degrees"]
        ok = ok and ("points" not in exp or len(degs) == exp["points"])
        return ok, f"points {len(degs)}, residue degrees {degs}, dim {ad.dim}"

    if not col.run("build_adjoint", adj_step):
        return col.out
    ad = state["ad"]

    checks = verify_adjoint(ad)
    for name, (ok, detail) in checks.items():
        col.add(name, ok, "" if ok else detail)

    def triv():
        state["triv"] = base_change_trivialization(ad)
        return True, f"{ad.dim}x{ad.dim} over L"

    col.run("base_change_trivialization", triv)

    def fiber():
        fr = fiber_group(ad, state.get("triv"))
        return fr.evaluation_is_iso, f"order {fr.group.order}"

    col.run("fiber_group", fiber)
    if exp.get("abelian_collapse"):
        col.run("abelian_collapse_iso", lambda: abelian_collapse(ad).is_invertible())

    def mutations():
        surv = mutation_sensitivity(ad.hopf, MUTATIONS, seed=sum(map(ord, case.name)))
        return not surv, f"{MUTATIONS - len(surv)}/{MUTATIONS} perturbations detected"

    col.run("mutation_sensitivity", mutations)

    if "mid" in doc:
        def tower():
            M = formats.subfield_from_spec(L, doc["mid"])
            T = restrict_extension(ext, M)
            res = tower_maps(T, ad)
            state["tower"] = (T, res)
            ok = verify_hopf(res.kernel).ok
            sizes = [ad.classes.class_sizes[c] for c in res.kernel_classes]
            if "kernel_dim" in exp:
                ok = ok and res.dims[0] == exp["kernel_dim"]
            if "kernel_class_sizes" in exp:
                ok = ok and sizes == exp["kernel_class_sizes"]
            ok = ok and res.dims[0] * res.dims[1] == res.dims[2]
            return ok, f"dims (kernel, Ad(M/K), Ad(L/K)) = {res.dims}, kernel class sizes {sizes}"

        if col.run("tower_maps", tower):
            T, res = state["tower"]
            col.run("pullback_splitting",
                    lambda: (pullback_splitting_check(T, res).ok, ""))
            col.run("kernel_mutation_sensitivity",
                    lambda: not mutation_sensitivity(res.kernel, MUTATIONS, seed=7))

            def action():
                k = doc.get("kummer")
                if k:
                    rep = kernel_action(T, L.elem(k["zeta"]), L.elem(k["alpha"]), int(k["n"]))
                    want = {int(a): True for a in exp.get("cyclotomic_units", rep.cyclotomic)}
                    return rep.ok and rep.cyclotomic == want, f"k -> ok: {rep.cyclotomic}"
                rep = kernel_action(T)
                return True, f"table {rep.table}"

            col.run("kernel_action", action)

    if "characters" in doc:
        def schur():
            cd = formats.characters_from_json(formats._resolve(doc["characters"], case.where),
                                              ext.G)
            rep = schur_block_check(cd)
            ok = "schur_blocks" not in exp or rep.blocks == exp["schur_blocks"]
            return ok, f"blocks {rep.blocks}, total {rep.total}"

        col.run("schur_block_check", schur)

    if "subfields" in doc:
        def lattice():
            subs = [formats.subfield_from_spec(L, s) for s in doc["subfields"]]
            ct = compositum_tower(L, ext.action, subs)
            fam = limit_element(ct.tower)
            ok = ct.minimal and compatible_families(ct.tower) == len(
                ct.tower.carriers[ct.tower.top()])
            if "lattice_nodes" in exp:
                ok = ok and len(ct.subfields) == exp["lattice_nodes"]
            return ok, f"{len(ct.subfields)} nodes, joins added {ct.added}, family {fam}"

        col.run("compositum_tower", lattice)

    if "golden" in doc:
        _golden_check(col, formats.dumps(formats.adjoint_dump(ad)), doc["golden"],
                      case.where, golden_dir)
    return col.out


def run_cartier_case(case: formats.CorpusCase, golden_dir=None) -> list[CheckResult]:
    col = _Collector(case.name)
    doc = case.doc
    n = int(doc["n"])
    if "field" in doc:
        A, _ = formats.field_from_json(formats._resolve(doc["field"], case.where))
    else:
        A = base_rationals()
    zeta = A.elem(doc["zeta"])
    state = {}

    def iso():
        phi = state["phi"] = cartier_iso(n, A, zeta)
        comp = phi.inverse().compose(phi)
        return is_identity_matrix(comp.matrix) and phi.check().ok, f"n = {n}"

    if not col.run("cartier_iso", iso):
        return col.out
    phi = state["phi"]
    col.run("mu_hopf_axioms", lambda: verify_hopf(phi.source).ok)
    col.run("trivial_bundle_axioms", lambda: verify_hopf(phi.target).ok)

    def points():
        Gp = grouplike_points(phi.source, mu_factor_data(n, A, zeta))
        return Gp.order == n and Gp.is_abelian() and any(
            Gp.element_order(g) == n for g in range(n)), f"cyclic of order {Gp.order}"

    col.run("grouplike_points", points)
    col.run("mutation_sensitivity",
            lambda: not mutation_sensitivity(phi.source, MUTATIONS, seed=n))
    if "golden" in doc:
        _golden_check(col, formats.dumps(formats.cartier_dump(n, zeta, phi)), doc["golden"],
                      case.where, golden_dir)
    return col.out


def run_hopf_case(case: formats.CorpusCase, golden_dir=None) -> list[CheckResult]:
    col = _Collector(case.name)
    H = formats.hopf_from_dump(formats._resolve(case.doc["dump"], case.where))

    def axioms():
        rep = verify_hopf(H)
        return rep.ok, ", ".join(rep.failures())

    col.run("hopf_axioms", axioms)
    col.run("mutation_sensitivity", lambda: not mutation_sensitivity(H, MUTATIONS, seed=1))
    return col.out


def run_trivial_bundle_case(case: formats.CorpusCase, golden_dir=None) -> list[CheckResult]:
    col = _Collector(case.name)
    G = formats.group_from_json(formats._resolve(case.doc["group"], case.where))
    A = (formats.field_from_json(formats._resolve(case.doc["base"], case.where))[0]
         if "base" in case.doc else base_rationals())
    H = trivial_bundle_hopf(G, A)
    col.run("hopf_axioms", lambda: verify_hopf(H).ok)

    def points():
        P = grouplike_points(H, trivial_bundle_factor_data(G, A))
        return P.table == G.table, f"order {P.order}"

    col.run("grouplike_points", points)

    def duality():
        # transpose of the comultiplication against evaluation covectors
        n = G.order
        for g in range(n):
            for h in range(n):
                hits = [i for i in range(n) if (g, h) in H.comult[i]]
                if hits != [G.mul(g, h)]:
                    return False
        return True

    col.run("duality_consistency", duality)
    col.run("mutation_sensitivity", lambda: not mutation_sensitivity(H, MUTATIONS, seed=2))
    return col.out


def run_group_case(case: formats.CorpusCase, golden_dir=None) -> list[CheckResult]:
    col = _Collector(case.name)
    G = formats.group_from_json(formats._resolve(case.doc["group"], case.where))
    exp = case.expected

    def classes():
        cd = conjugacy_classes(G)
        ok = sum(cd.class_sizes) == G.order and all(
            len(c) * s == G.order for c, s in zip(cd.centralizers, cd.class_sizes))
        if "class_sizes" in exp:
            ok = ok and sorted(cd.class_sizes) == sorted(exp["class_sizes"])
        return ok, f"class sizes {cd.class_sizes}"

    col.run("classes", classes)

    def products():
        cd = conjugacy_classes(G)
        op = G.opposite()
        cdo = conjugacy_classes(op)
        for a in cd.reps:
            for b in cd.reps:
                if product_class_set(G, a, b, cd) != product_class_set(op, a, b, cdo):
                    return False, f"convention dependence at {(a, b)}"
        return True, "class-closed and convention independent"

    col.run("product_class_sets", products)

    def cosets():
        cd = conjugacy_classes(G)
        for Ca in cd.centralizers:
            for Cb in cd.centralizers:
                dc = double_cosets(G, Ca, Cb)
                if sum(dc.coset_sizes) != G.order or any(
                        (len(Ca) * len(Cb)) % s for s in dc.coset_sizes):
                    return False
        return True

    col.run("double_cosets", cosets)
    return col.out


def run_etale_case(case: formats.CorpusCase, golden_dir=None) -> list[CheckResult]:
    col = _Collector(case.name)
    ref = case.doc["algebra"]
    where = case.where if isinstance(ref, dict) else (case.where / ref).parent
    A = formats.etale_from_json(formats._resolve(ref, case.where), where)

    def triv():
        t, k = is_trivial_etale(A)
        ok = t == case.expected.get("trivial", t) and k == case.expected.get("sections", k)
        return ok, f"trivial={t}, sections={k}"

    col.run("is_trivial_etale", triv)
    return col.out


def run_settower_case(case: formats.CorpusCase, golden_dir=None) -> list[CheckResult]:
    col = _Collector(case.name)
    t = formats.settower_from_json(case.doc["tower"])

    def lim():
        fam = limit_element(t)
        return compatible_families(t) >= 1, f"family {fam}"

    col.run("limit_element", lim)
    return col.out


RUNNERS = {
    "case": run_extension_case,
    "cartier": run_cartier_case,
    "hopf": run_hopf_case,
    "trivial_bundle": run_trivial_bundle_case,
    "group": run_group_case,
    "etale": run_etale_case,
    "settower": run_settower_case,
}


def profinite_suite() -> list[CheckResult]:
    col = _Collector("profinite")

    def zhat():
        for n in range(1, 7):
            t = zhat_truncation(n)
            if not t.surjective():
                return False, f"n = {n}"
        return True, "n <= 6 functorial and surjective"

    col.run("zhat_truncation", zhat)

    def zhat_limit():
        return limit_element(zhat_truncation(4)) == [0, 0, 0, 0]

    col.run("zhat_limit_element", zhat_limit)

    def shift():
        for w in range(1, 4):
            for n in range(2, 5):
                r = shift_obstruction(w, n)
                if r.count or r.count_other_convention:
                    return False, f"solutions at {(w, n)}"
        return True, "0 solutions for w <= 3, n <= 4, both conventions"

    col.run("shift_obstruction", shift)
    col.run("mu_tower_maps", lambda: (len(mu_tower_maps(4, base_rationals())) == 3,
                                      "t_(k-1)! -> t_k!^k Hopf maps"))
    return col.out


# ---------------------------------------------------------------------------
# driver


def _run_one(args):
    path, golden_dir = args
    try:
        case = formats.load_case(path)
    except INPUT_ERRORS as exc:
        return ("input", Path(path).stem, f"{exc}")
    runner = RUNNERS.get(case.kind)
    if runner is None:
        return ("input", case.name, f"unknown case kind {case.kind!r}")
    try:
        return ("ok", case.name, runner(case, golden_dir))
    except INPUT_ERRORS as exc:
        return ("input", case.name, f"{type(exc).__name__}: {exc}")
    except Exception as exc:  # mathematical failure outside a check
        detail = f"{type(exc).__name__}: {exc}"
        return ("ok", case.name, [CheckResult(case.name, "case", False, detail)])


def run_suite(directory, golden_dir=None, jobs: int = 1, profinite: bool = True) -> Report:
    directory = Path(directory)
    report = Report()
    if not directory.is_dir():
        report.input_errors.append(f"{directory}: not a directory")
        return report
    files = sorted(directory.glob("*.json"))
    if not files:
        report.warnings.append(f"no corpus files in {directory}")
    tasks = [(str(p), golden_dir) for p in files]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            outs = list(ex.map(_run_one, tasks))
    else:
        outs = [_run_one(t) for t in tasks]
    results = []
    for status, name, payload in outs:
        if status == "input":
            report.input_errors.append(f"{name}: {payload}")
            results.append(CheckResult(name, "parse", False, payload))
        else:
            results.extend(payload)
    if profinite and files:
        results.extend(profinite_suite())
    results.sort(key=lambda r: r.case)  # stable: check order kept within a case
    report.results = results
    return report
