"""Build and verify every corpus extension; write a CSV of wall times."""
import csv
import sys
import time
from pathlib import Path

from adbundle import formats
from adbundle.adjoint import (base_change_trivialization, build_adjoint, build_extension,
                              fiber_group, verify_adjoint)

ROOT = Path(__file__).resolve().parent.parent


def timed(fn, *args):
    t0 = time.perf_counter()
    out = fn(*args)
    return out, time.perf_counter() - t0


def main(out=None):
    rows = []
    for path in sorted((ROOT / "corpus" / "fields").glob("*.json")):
        L, certs = formats.load_field(path)
        if not certs and L.base_degree != L.degree:
            continue
        ext, t_ext = timed(build_extension, L, certs)
        ad, t_ad = timed(build_adjoint, ext)
        checks, t_ver = timed(verify_adjoint, ad)
        triv, t_tr = timed(base_change_trivialization, ad)
        _, t_fib = timed(fiber_group, ad, triv)
        rows.append({"field": path.stem, "order": ext.G.order, "degree": L.degree,
                     "extension_s": f"{t_ext:.3f}", "adjoint_s": f"{t_ad:.3f}",
                     "verify_s": f"{t_ver:.3f}", "fiber_s": f"{t_tr + t_fib:.3f}",
                     "all_ok": all(ok for ok, _ in checks.values())})
    fh = open(out, "w", newline="") if out else sys.stdout
    w = csv.DictWriter(fh, fieldnames=list(rows[0]))
    w.writeheader()
    w.writerows(rows)
    if out:
        fh.close()


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else None)
