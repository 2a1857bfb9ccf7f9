"""Cross-check prover verdicts on random KGINV formulas.

INVALID verdicts are backed by an extracted countermodel that is evaluated
again here.  VALID verdicts on small formulas are compared with a
brute-force search over F-models with at most two worlds and values k/6.

    python3 scripts/soundness_sweep.py [--count 100] [--seed 0] [--oracle-size 7]
"""

import argparse
import random
import sys
import time
from dataclasses import dataclass
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

from oracles import fmodel_countermodel  # noqa: E402

from kgtab import formula as F  # noqa: E402
from kgtab.constraints import ResourceLimit  # noqa: E402
from kgtab.formula import Logic  # noqa: E402
from kgtab.generate import random_formula  # noqa: E402
from kgtab.kripke import eval_fmodel  # noqa: E402
from kgtab.tableau import SearchConfig, search  # noqa: E402


@dataclass
class SweepConfig:
    count: int = 100
    seed: int = 0
    max_size: int = 6
    oracle_size: int = 7          # only formulas up to this size go to the oracle
    max_branches: int = 5_000


def run(cfg):
    rng = random.Random(cfg.seed)
    scfg = SearchConfig(max_branches=cfg.max_branches, keep_trace=False)
    tally = dict(valid=0, invalid=0, limit=0, oracle_checked=0, problems=0)
    start = time.perf_counter()
    for _ in range(cfg.count):
        f = random_formula(rng, Logic.KGINV, max_size=cfg.max_size, max_modal=1,
                           variables=("p", "q"))
        try:
            results = search(f, Logic.KGINV, scfg)
        except ResourceLimit:
            tally["limit"] += 1
            continue
        last = results[-1]
        if last.closed:
            tally["valid"] += 1
            if F.size(f) <= cfg.oracle_size:
                tally["oracle_checked"] += 1
                cm, _ = fmodel_countermodel(f)
                if cm is not None:
                    tally["problems"] += 1
                    print(f"  oracle refutes {F.to_text(f)}: {cm}")
        else:
            tally["invalid"] += 1
            rep = last.report
            got = eval_fmodel(rep.model, f, rep.root, Logic.KGINV)
            if got.pos >= 1:
                tally["problems"] += 1
                print(f"  countermodel does not refute {F.to_text(f)}")
    print(f"{tally} in {time.perf_counter() - start:.1f}s")
    return tally["problems"]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--oracle-size", type=int, default=7)
    args = ap.parse_args()
    sys.exit(1 if run(SweepConfig(args.count, args.seed, oracle_size=args.oracle_size)) else 0)


if __name__ == "__main__":
    main()
