"""Enumerate open branches of a refutable formula and print each countermodel.

    python3 scripts/open_branches.py ["box p -> inv dia inv p"] [--leaves 8]
"""

import argparse
from dataclasses import dataclass

from kgtab.formula import Logic, parse
from kgtab.kripke import eval_fmodel
from kgtab.tableau import SearchConfig, search


@dataclass
class DemoConfig:
    formula: str = "box p -> inv dia inv p"
    logic: Logic = Logic.KGINV
    leaves: int = 8
    root_le: bool = True


def show_model(fm):
    base = fm.base
    for (src, dst), x in sorted(base.rel_plus.items()):
        print(f"    R+({src},{dst}) = {x}")
    for (p, w), x in sorted(base.v1.items()):
        print(f"    v({p},{w}) = {x}")
    for w in base.worlds:
        inner = sorted(fm.T1[w] - {0, 1})
        if inner:
            print(f"    T({w}) \\ {{0,1}} = {{{', '.join(map(str, inner))}}}")


def run(cfg):
    f = parse(cfg.formula)
    for strategy in ("bounds", "value"):
        scfg = SearchConfig(strategy=strategy, collect_open=cfg.leaves, root_le=cfg.root_le)
        results = search(f, cfg.logic, scfg)
        last = results[-1]
        print(f"== strategy {strategy}: {len(last.open_leaves)} open leaves, "
              f"{sum(r.expansions for r in results)} expansions")
        for k, (branch, witness, report) in enumerate(last.open_leaves):
            got = eval_fmodel(report.model, f, report.root, cfg.logic)
            print(f"  leaf {k}: {len(branch.constraints)} constraints, value at root {got.pos}")
            show_model(report.model)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("formula", nargs="?", default=DemoConfig.formula)
    ap.add_argument("--logic", default="kginv", choices=[l.value for l in Logic])
    ap.add_argument("--leaves", type=int, default=8)
    ap.add_argument("--strict-root", action="store_true")
    args = ap.parse_args()
    run(DemoConfig(args.formula, Logic(args.logic), args.leaves, not args.strict_root))


if __name__ == "__main__":
    main()
