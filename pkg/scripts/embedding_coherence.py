"""Compare prover verdicts on random formulas with verdicts on their embeddings.

For each KGINV2 formula the verdict must match the verdict on its KGBL
embedding, and likewise in the other direction.

    python3 scripts/embedding_coherence.py [--count 200] [--seed 0]
"""

import argparse
import random
import time
from dataclasses import dataclass

from kgtab.constraints import ResourceLimit
from kgtab.formula import Logic, to_text
from kgtab.generate import random_formula
from kgtab.tableau import SearchConfig, is_valid
from kgtab.translate import embed_bl_to_inv, embed_inv_to_bl


@dataclass
class CoherenceConfig:
    count: int = 200
    seed: int = 0
    max_size: int = 6
    max_modal: int = 1
    max_branches: int = 5_000


DIRECTIONS = [
    (Logic.KGINV2, Logic.KGBL, embed_inv_to_bl),
    (Logic.KGBL, Logic.KGINV2, embed_bl_to_inv),
]


def run(cfg):
    rng = random.Random(cfg.seed)
    scfg = SearchConfig(max_branches=cfg.max_branches, keep_trace=False)
    for src, dst, embed in DIRECTIONS:
        tally = {"agree": 0, "disagree": 0, "limit": 0, "valid": 0}
        start = time.perf_counter()
        for _ in range(cfg.count):
            f = random_formula(rng, src, max_size=cfg.max_size, max_modal=cfg.max_modal)
            try:
                a = is_valid(f, src, scfg)
                b = is_valid(embed(f), dst, scfg)
            except ResourceLimit:
                tally["limit"] += 1
                continue
            tally["valid"] += a
            if a == b:
                tally["agree"] += 1
            else:
                tally["disagree"] += 1
                print(f"  DISAGREE {src.value}={a} {dst.value}={b}: {to_text(f)}")
        print(f"{src.value} -> {dst.value}: {tally} in {time.perf_counter() - start:.1f}s")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--max-branches", type=int, default=5_000)
    args = ap.parse_args()
    run(CoherenceConfig(count=args.count, seed=args.seed, max_branches=args.max_branches))


if __name__ == "__main__":
    main()
