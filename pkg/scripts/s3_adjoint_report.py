"""Print the adjoint bundle of Q(omega, 2^(1/3))/Q: points, residue fields and
the nonzero comultiplication components, with the g' independence count."""
import argparse
from pathlib import Path

from adbundle import formats
from adbundle.adjoint import build_adjoint, build_extension, verify_adjoint

ROOT = Path(__file__).resolve().parent.parent


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--field", default=str(ROOT / "corpus" / "fields" / "s3.json"))
    ap.add_argument("--components", action="store_true", help="print every comult term")
    a = ap.parse_args()
    L, certs = formats.load_field(a.field)
    ad = build_adjoint(build_extension(L, certs))
    G = ad.ext.G
    for p in ad.points:
        lab = G.labels[p.rep] if G.labels else p.rep
        print(f"class of {lab}: size {p.size}, |C| = {len(p.centralizer)}, "
              f"residue degree {p.degree}")
    H = ad.hopf
    print(f"basis: {H.basis_labels}")
    terms = sum(len(c) for c in H.comult)
    print(f"{terms} nonzero comultiplication coefficients; "
          f"{ad.gprime_checked} alternative g' choices rechecked")
    if a.components:
        for i, c in enumerate(H.comult):
            for (j, k), v in sorted(c.items()):
                print(f"  Delta({H.basis_labels[i]}) += {formats.scalar_out(v)} "
                      f"{H.basis_labels[j]} (x) {H.basis_labels[k]}")
    for name, (ok, _) in verify_adjoint(ad).items():
        print(f"  {name:22s} {'ok' if ok else 'FAIL'}")


if __name__ == "__main__":
    main()
