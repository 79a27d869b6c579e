"""Run every property suite once and write one report per suite.

    python scripts/run_all_suites.py --seed 0 --out reports/
"""

import argparse
import time
from dataclasses import dataclass
from pathlib import Path

from simpson_lab.ring import CyclotomicParams
from simpson_lab.suites import SUITES, SuiteConfig, run_suite


@dataclass(frozen=True)
class RunAllConfig:
    seed: int = 0
    out: Path = Path("reports")
    ring: CyclotomicParams = CyclotomicParams()
    D: int = 12


def main(cfg: RunAllConfig) -> int:
    cfg.out.mkdir(parents=True, exist_ok=True)
    worst = 0
    for suite in SUITES:
        start = time.perf_counter()
        report = run_suite(SuiteConfig(suite, ring=cfg.ring, D=cfg.D, seed=cfg.seed))
        elapsed = time.perf_counter() - start
        (cfg.out / f"{suite}.json").write_text(report.render(), encoding="utf-8")
        s = report.summary()
        print(f"{suite:15s} pass {s['pass']:4d} fail {s['fail']:3d} precision {s['precision']:3d} "
              f"exit {report.exit_code} {elapsed:6.1f}s")
        worst = max(worst, report.exit_code)
    return worst


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", type=Path, default=Path("reports"))
    ap.add_argument("--D", type=int, default=12)
    args = ap.parse_args()
    raise SystemExit(main(RunAllConfig(seed=args.seed, out=args.out, D=args.D)))
