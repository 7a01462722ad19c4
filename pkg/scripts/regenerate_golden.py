"""Rewrite the golden dumps under corpus/golden. Review the diff before committing."""
from pathlib import Path

from adbundle.cli import main

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"

main(["dump", f"adjoint:{CORPUS / 'fields' / 's3.json'}",
      "-o", str(CORPUS / "golden" / "adjoint_s3.json")])
main(["dump", f"cartier:3:{CORPUS / 'fields' / 'q_omega.json'}:0,1",
      "-o", str(CORPUS / "golden" / "cartier_3.json")])
