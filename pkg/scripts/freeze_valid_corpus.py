"""Confirm the validity corpus with the brute-force F-model oracle and
freeze the verdicts to tests/fixtures/valid_corpus.json.

Run from the repository root:  python scripts/freeze_valid_corpus.py
"""

import json
import sys
import time
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))

from oracles import fmodel_countermodel  # noqa: E402

from kgtab.formula import parse  # noqa: E402

CORPUS = [
    "p -> p",
    "(inv inv p) <-> p",
    "p & q -> p",
    "p -> (q -> p)",
    "delta p -> p",
    "(p -< q) -> p",
    "snot p -> (p -> q)",
    "box(p -> p)",
    "box(p & q) -> box p",
    "box p & box q -> box(p & q)",
    "box(p -> q) -> box p -> box q",
    "dia(p & q) -> dia p",
    "dia(p or q) -> dia p or dia q",
    "box(box p & p) -> box box p",
]
# sanity rows: the oracle must find countermodels here
REFUTABLE = ["p -> box p", "dia p -> box p", "box p -> inv dia inv p"]


def main():
    rows = []
    for text in CORPUS + REFUTABLE:
        start = time.perf_counter()
        cm, examined = fmodel_countermodel(parse(text))
        rows.append({
            "formula": text,
            "logic": "kginv",
            "verdict": "INVALID" if cm else "VALID",
            "models_examined": int(examined),
            "countermodel": cm,
        })
        print(f"{rows[-1]['verdict']:7} {examined:>11} models "
              f"{time.perf_counter() - start:6.1f}s  {text}")
    out = ROOT / "tests" / "fixtures" / "valid_corpus.json"
    out.write_text(json.dumps({"grid": "k/6", "max_worlds": 2, "rows": rows}, indent=1) + "\n")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
