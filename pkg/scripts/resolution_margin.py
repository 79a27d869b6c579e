"""How many extra pd-degrees the multiply-and-resolve torsion check needs.

Cocycles of K(M (x) P_{<=D_inner}) are multiplied by c = rho_K (zeta_p - 1) and
resolved inside K(M (x) P_{<=D}). This script runs the check for every inner
degree, so the output shows where resolution starts to succeed next to the
margin that torsion_margin predicts.

    python scripts/resolution_margin.py --D 12
"""

import argparse
import random
from dataclasses import dataclass

from simpson_lab.chart import ChartParams
from simpson_lab.cohomology import torsion_check, torsion_margin
from simpson_lab.instances import random_higgs
from simpson_lab.ring import ring_for


@dataclass(frozen=True)
class MarginConfig:
    D: int = 12
    d: int = 1
    rank: int = 2
    min_vpi: int = 2
    seed: int = 0


def main(cfg: MarginConfig) -> None:
    R = ring_for()
    H = random_higgs(R, ChartParams(d=cfg.d, r=min(cfg.d, 1)), cfg.rank, random.Random(cfg.seed),
                     min_vpi=cfg.min_vpi)
    predicted = cfg.D - torsion_margin(H)
    print(f"d={cfg.d} rank={cfg.rank} D={cfg.D}: predicted D_inner = {predicted}")
    for inner in range(0, cfg.D + 1):
        rep = torsion_check(H, cfg.D, inner)
        flag = "resolved" if rep.ok else "NOT resolved"
        mark = "  <- predicted" if inner == predicted else ""
        print(f"  D_inner={inner:2d}: {flag}{mark}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--D", type=int, default=12)
    ap.add_argument("--d", type=int, default=1)
    ap.add_argument("--rank", type=int, default=2)
    ap.add_argument("--min-vpi", type=int, default=2)
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args()
    main(MarginConfig(D=a.D, d=a.d, rank=a.rank, min_vpi=a.min_vpi, seed=a.seed))
