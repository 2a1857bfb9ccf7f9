"""Time the prover on a fixed corpus under several search configurations.

    python3 scripts/bench_prover.py [--repeat 3] [--logic kginv]
"""

import argparse
import statistics
import time
from dataclasses import dataclass, replace

from kgtab.constraints import ResourceLimit
from kgtab.formula import Logic, parse
from kgtab.tableau import SearchConfig, search

CORPUS = {
    Logic.KGINV: [
        "p -> p",
        "box(p & q) -> box p",
        "box p & box q -> box(p & q)",
        "box(p -> q) -> box p -> box q",
        "dia(p or q) -> dia p or dia q",
        "box(box p & p) -> box box p",
        "box p -> inv dia inv p",
        "dia p -> box p",
    ],
    Logic.KGINV2: [
        "box1(p & q) -> box1 p",
        "box2(p -> q) -> box2 p -> box2 q",
        "box1 p -> dia2 p",
    ],
    Logic.KGBL: [
        "box(p & q) -> box p",
        "ibox(p -> q) -> ibox p -> ibox q",
        "p iimpl p",
    ],
}


@dataclass
class BenchConfig:
    repeat: int = 3
    max_branches: int = 20_000
    logics: tuple = tuple(Logic)


VARIANTS = {
    "default": SearchConfig(),
    "no-backjump": SearchConfig(backjump=False),
    "prune-order": SearchConfig(pruning="order"),
    "prune-full": SearchConfig(pruning="full"),
    "bounds": SearchConfig(strategy="bounds"),
}


def run(cfg):
    print(f"{'variant':12} {'logic':6} {'verdict':7} {'exp':>6} {'br':>6} {'ms':>9}  formula")
    for name, base in VARIANTS.items():
        scfg = replace(base, max_branches=cfg.max_branches, keep_trace=False)
        for logic in cfg.logics:
            for text in CORPUS[logic]:
                f = parse(text)
                times = []
                for _ in range(cfg.repeat):
                    start = time.perf_counter()
                    try:
                        results = search(f, logic, scfg)
                        verdict = "VALID" if all(r.closed for r in results) else "INVALID"
                        exp = sum(r.expansions for r in results)
                        br = sum(r.branches for r in results)
                    except ResourceLimit:
                        verdict, exp, br = "LIMIT", -1, -1
                    times.append(time.perf_counter() - start)
                ms = 1000 * statistics.median(times)
                print(f"{name:12} {logic.value:6} {verdict:7} {exp:>6} {br:>6} {ms:9.1f}  {text}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--max-branches", type=int, default=20_000)
    ap.add_argument("--logic", choices=[l.value for l in Logic], action="append")
    args = ap.parse_args()
    logics = tuple(Logic(x) for x in args.logic) if args.logic else tuple(Logic)
    run(BenchConfig(args.repeat, args.max_branches, logics))


if __name__ == "__main__":
    main()
