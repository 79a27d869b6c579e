"""Round-trip agreement of the correspondence as the precision and guard vary.

For each (e, g) the script converts seeded Higgs modules to representations and
back, and records the smallest p-adic agreement exponent reached, next to the
promised e - g.

    python scripts/precision_sweep.py --instances 20
"""

import argparse
import random
from dataclasses import dataclass, field

from simpson_lab.chart import ChartParams
from simpson_lab.higgs import GammaRep, higgs_from_rep, mat_eq_mod, rep_from_higgs
from simpson_lab.instances import random_higgs
from simpson_lab.ring import ring_for


@dataclass(frozen=True)
class SweepConfig:
    precisions: tuple = (4, 6, 8, 10)
    guards: tuple = (0, 1, 2)
    cells: tuple = ((1, 1), (1, 2), (2, 1), (2, 2))
    instances: int = 20
    seed: int = 0
    extra: dict = field(default_factory=dict)


def agreement(A, B, N):
    """Largest k <= N (uniformizer units) with A == B mod pi^k."""
    for k in range(N, -1, -1):
        if all(mat_eq_mod(x, y, None) if k == N else _eq_pi(x, y, k) for x, y in zip(A, B)):
            return k
    return 0


def _eq_pi(X, Y, k):
    for rx, ry in zip(X, Y):
        for a, b in zip(rx, ry):
            v = (a - b).vpi()
            if v is not None and v < k:
                return False
    return True


def main(cfg: SweepConfig) -> None:
    print(f"{'e':>3} {'g':>3} {'promised':>9} {'worst agreement (p-digits)':>28}")
    for e in cfg.precisions:
        for g in cfg.guards:
            if g >= e:
                continue
            R = ring_for(3, 1, e, g)
            worst = R.N
            for d, n in cfg.cells:
                rng = random.Random(f"{cfg.seed}:{e}:{g}:{d}:{n}")
                for _ in range(cfg.instances):
                    H = random_higgs(R, ChartParams(d=d, r=min(d, 1)), n, rng)
                    M = rep_from_higgs(H)
                    back = higgs_from_rep(GammaRep(M.chart, M.rank, M.A), use_witness=False)
                    worst = min(worst, agreement(H.theta, back.theta, R.N))
            print(f"{e:3d} {g:3d} {e - g:9d} {worst / R.phi:28.1f}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--instances", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    main(SweepConfig(instances=args.instances, seed=args.seed))
