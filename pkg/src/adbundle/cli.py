"""Command-line front end.

Exit codes: 0 all checks pass, 1 mathematical failure, 2 input or parse error.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import config, formats
from .adjoint import (Inconsistency, TowerError, build_adjoint, build_extension, fiber_group,
                      kernel_action, pullback_splitting_check, restrict_extension, tower_maps)
from .grp import GroupError, conjugacy_classes, perm_to_cycles
from .hopf import (HopfError, cartier_iso, find_primitive_root, trivial_bundle_hopf,
                   verify_hopf)
from .numfield import FieldError, base_rationals
from .profinite import (TowerStructureError, compositum_tower, is_trivial_etale,
                        limit_element, shift_obstruction, zhat_truncation)
from .suite import run_suite

INPUT_ERRORS = (formats.CorpusError, FieldError, GroupError, HopfError, TowerError,
                TowerStructureError, OSError, KeyError, ValueError)


class Failure(Exception):
    """A check did not pass (exit code 1)."""


def _out(text: str, path: str | None = None):
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _ext(path):
    L, certs = formats.load_field(path)
    return L, build_extension(L, certs)


# ---------------------------------------------------------------------------
# commands


def cmd_grp_classes(a):
    G = formats.load_group(a.file)
    cd = conjugacy_classes(G)
    print(f"order {G.order}, {len(cd.reps)} classes")
    for rep, size, cent in zip(cd.reps, cd.class_sizes, cd.centralizers):
        lab = ""
        if G.labels and isinstance(G.labels[rep], tuple):
            lab = " " + ("".join("(" + " ".join(map(str, c)) + ")"
                                 for c in perm_to_cycles(G.labels[rep])) or "()")
        print(f"  rep {rep}{lab}: size {size}, centralizer order {len(cent)}")


def cmd_field_info(a):
    L, certs = formats.load_field(a.file)
    print(f"degree {L.degree}, base degree {L.base_degree}")
    for st in L.tower:
        print(f"  step {st.label}: degree {st.degree} over degree {st.below_degree}")
    if certs or L.base_degree == L.degree:
        ext = build_extension(L, certs)
        cd = conjugacy_classes(ext.G)
        print(f"Galois group order {ext.G.order}, class sizes {cd.class_sizes}")


def cmd_hopf_trivial(a):
    G = formats.load_group(a.groupfile)
    A = formats.load_field(a.base)[0] if a.base else base_rationals()
    H = trivial_bundle_hopf(G, A)
    _out(formats.dumps(formats.hopf_dump(H)), a.output)


def cmd_hopf_cartier(a):
    A, _ = formats.load_field(a.fieldfile)
    zeta = A.elem(a.zeta.split(",")) if a.zeta else find_primitive_root(A, a.n)
    phi = cartier_iso(a.n, A, zeta)
    _out(formats.dumps(formats.cartier_dump(a.n, zeta, phi)), a.output)


def cmd_hopf_verify(a):
    H = formats.hopf_from_dump(formats.read_json(a.dumpfile))
    rep = verify_hopf(H)
    print(f"dimension {H.dim}")
    print(rep)
    if not rep.ok:
        raise Failure("Hopf axioms fail")


def cmd_adjoint_build(a):
    L, ext = _ext(a.extfile)
    ad = build_adjoint(ext, models=False)
    rep = verify_hopf(ad.hopf)
    if a.output:
        _out(formats.dumps(formats.adjoint_dump(ad)), a.output)
    print(f"|G| = {ext.G.order}, {len(ad.points)} points, dim {ad.dim}")
    for p in ad.points:
        print(f"  class rep {p.rep} (size {p.size}): residue degree {p.degree}")
    print(rep)
    if not rep.ok:
        raise Failure("Hopf axioms fail")


def cmd_adjoint_fiber(a):
    L, ext = _ext(a.extfile)
    fr = fiber_group(build_adjoint(ext, models=False))
    cd = conjugacy_classes(fr.group)
    print(f"fiber group order {fr.group.order}, class sizes {cd.class_sizes}, "
          f"table matches Galois group: {fr.evaluation_is_iso}")


def cmd_adjoint_tower(a):
    L, ext = _ext(a.extfile)
    M = formats.subfield_from_spec(L, a.mid)
    T = restrict_extension(ext, M)
    res = tower_maps(T)
    sizes = [res.outer.classes.class_sizes[c] for c in res.kernel_classes]
    print(f"|N| = {len(T.N)}; dims (kernel, Ad(M/K), Ad(L/K)) = {res.dims}")
    print(f"kernel point classes (sizes): {sizes}")
    print(f"kernel Hopf axioms: {verify_hopf(res.kernel).ok}")
    try:
        print(f"pullback splitting: {pullback_splitting_check(T, res).ok}")
    except TowerError as exc:
        print(f"pullback splitting skipped: {exc}")
    try:
        act = kernel_action(T)
        print(f"G/N action on N: {act.table}")
    except TowerError as exc:
        print(f"action skipped: {exc}")


def cmd_adjoint_verify(a):
    doc = {"kind": "case", "name": Path(a.extfile).stem, "extension": str(Path(a.extfile).resolve())}
    if a.mid:
        doc["mid"] = a.mid
    case = formats.CorpusCase(doc["name"], Path(a.extfile), "case", doc, {})
    from .suite import Report, run_extension_case
    rep = Report(run_extension_case(case))
    _out(rep.text(timings=not a.no_timings))
    if not rep.ok:
        raise Failure("checks failed")


def cmd_profinite_zhat(a):
    t = zhat_truncation(a.n)
    t.check()  # raises on a non-composing or non-homomorphic map
    print(" <- ".join(t.names))
    print(f"functorial: True, surjective: {t.surjective()}, limit element: {limit_element(t)}")
    if not t.surjective():
        raise Failure("transition maps not surjective")


def cmd_profinite_shift(a):
    r = shift_obstruction(a.w, a.n, jobs=config.DEFAULTS.jobs)
    print(f"w={r.w} n={r.n}: {r.count} solutions "
          f"({r.count_other_convention} with the opposite shift)")
    print(f"witness: {r.witness}")
    if r.count or r.count_other_convention:
        raise Failure("obstruction has solutions")


def cmd_profinite_tower(a):
    L, ext = _ext(a.extfile)
    subs = formats.subfields_from_spec(L, a.subfields)
    ct = compositum_tower(L, ext.action, subs)
    for i, E in enumerate(ct.subfields):
        tag = " (join added)" if i in ct.added else ""
        print(f"  node {i}: degree {E.degree}, {len(ct.tower.carriers[i])} embeddings{tag}")
    print(f"joins minimal: {ct.minimal}; limit element: {limit_element(ct.tower)}")
    if not ct.minimal:
        raise Failure("join minimality fails")


def cmd_profinite_trivial(a):
    doc = formats.read_json(a.algfile)
    A = formats.etale_from_json(doc.get("algebra", doc), Path(a.algfile).parent)
    t, k = is_trivial_etale(A)
    print(f"trivial: {t}, sections: {k if t else '-'}")


def cmd_suite_run(a):
    rep = run_suite(a.dir, a.golden, jobs=config.DEFAULTS.jobs)
    _out(rep.text(timings=not a.no_timings), a.output)
    return rep.exit_code


def cmd_dump(a):
    sel = a.selector
    kind, _, rest = sel.partition(":")
    parts = rest.split(":") if rest else []
    if kind == "rationals":
        obj = formats.field_dump(base_rationals())
    elif kind == "field":
        obj = formats.field_dump(formats.load_field(parts[0])[0])
    elif kind == "trivial":
        G = formats.load_group(parts[0])
        A = formats.load_field(parts[1])[0] if len(parts) > 1 else base_rationals()
        obj = formats.hopf_dump(trivial_bundle_hopf(G, A))
    elif kind == "cartier":
        n = int(parts[0])
        A = formats.load_field(parts[1])[0] if len(parts) > 1 else base_rationals()
        zeta = A.elem(parts[2].split(",")) if len(parts) > 2 else find_primitive_root(A, n)
        obj = formats.cartier_dump(n, zeta, cartier_iso(n, A, zeta))
    elif kind == "adjoint":
        L, ext = _ext(parts[0])
        obj = formats.adjoint_dump(build_adjoint(ext, models=False))
    else:
        raise formats.CorpusError(f"unknown selector {sel!r}")
    _out(formats.dumps(obj), a.output)


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="adbundle", description=__doc__.splitlines()[0])
    p.add_argument("--order-bound", type=int)
    p.add_argument("--degree-bound", type=int)
    p.add_argument("--jobs", type=int)
    sub = p.add_subparsers(dest="group", required=True)

    def leaf(parent, name, fn, *args):
        q = parent.add_parser(name)
        q.set_defaults(fn=fn)
        for spec in args:
            flags, kw = spec
            q.add_argument(*flags, **kw)
        return q

    out = (["-o", "--output"], {})
    g = sub.add_parser("grp").add_subparsers(dest="cmd", required=True)
    leaf(g, "classes", cmd_grp_classes, (["file"], {}))
    f = sub.add_parser("field").add_subparsers(dest="cmd", required=True)
    leaf(f, "info", cmd_field_info, (["file"], {}))
    h = sub.add_parser("hopf").add_subparsers(dest="cmd", required=True)
    leaf(h, "trivial", cmd_hopf_trivial, (["groupfile"], {}), (["--base"], {}), out)
    leaf(h, "cartier", cmd_hopf_cartier, (["n"], {"type": int}), (["fieldfile"], {}),
         (["--zeta"], {"help": "comma-separated coordinates"}), out)
    leaf(h, "verify", cmd_hopf_verify, (["dumpfile"], {}))
    ad = sub.add_parser("adjoint").add_subparsers(dest="cmd", required=True)
    leaf(ad, "build", cmd_adjoint_build, (["extfile"], {}), out)
    leaf(ad, "fiber", cmd_adjoint_fiber, (["extfile"], {}))
    leaf(ad, "tower", cmd_adjoint_tower, (["extfile"], {}),
         (["--mid"], {"required": True, "help": "level:k or gen:c0,c1,..."}))
    leaf(ad, "verify", cmd_adjoint_verify, (["extfile"], {}), (["--mid"], {}),
         (["--no-timings"], {"action": "store_true"}))
    pr = sub.add_parser("profinite").add_subparsers(dest="cmd", required=True)
    leaf(pr, "zhat", cmd_profinite_zhat, (["n"], {"type": int}))
    leaf(pr, "shift", cmd_profinite_shift, (["w"], {"type": int}), (["n"], {"type": int}))
    leaf(pr, "tower", cmd_profinite_tower, (["extfile"], {}),
         (["--subfields"], {"required": True, "help": "specs separated by ';'"}))
    leaf(pr, "trivial", cmd_profinite_trivial, (["algfile"], {}))
    s = sub.add_parser("suite").add_subparsers(dest="cmd", required=True)
    leaf(s, "run", cmd_suite_run, (["dir"], {}), (["--golden"], {}),
         (["--no-timings"], {"action": "store_true"}), out)
    leaf(sub, "dump", cmd_dump, (["selector"], {}), out)
    return p


def apply_bounds(a) -> None:
    b = config.Bounds.from_env()
    for name in ("order_bound", "degree_bound", "jobs"):
        v = getattr(a, name)
        if v is not None:
            setattr(b, name, v)
    for name in ("order_bound", "degree_bound", "shift_bound", "jobs"):
        setattr(config.DEFAULTS, name, getattr(b, name))


def main(argv=None) -> int:
    parser = build_parser()
    a = parser.parse_args(argv)
    apply_bounds(a)
    try:
        code = a.fn(a)
        return 0 if code is None else int(code)
    except Failure as exc:
        print(f"FAIL: {exc}", file=sys.stderr)
        return 1
    except Inconsistency as exc:
        print(f"internal inconsistency: {exc}", file=sys.stderr)
        return 1
    except INPUT_ERRORS as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
