"""Run a (p, q) grid scan and tabulate shooting outcome against classification.

    python scripts/run_scan.py [config] [--workers N]
"""

import argparse
from collections import Counter
from pathlib import Path

from liouville_lab.scan import ScanConfig, run_scan

HERE = Path(__file__).parent


def main():
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("config", nargs="?", default=HERE / "grid_n3_m1.cfg")
    parser.add_argument("--workers", type=int, default=None)
    args = parser.parse_args()
    overrides = {} if args.workers is None else {"workers": args.workers}
    config = ScanConfig.from_file(args.config, **overrides)
    records = run_scan(config)
    table = Counter((r.classification, r.shoot.get("kind")) for r in records)
    print(f"{len(records)} cells -> {config.output_path}")
    print(f"{'classification':<15} {'outcome':<15} cells")
    for (cls, kind), count in sorted(table.items()):
        print(f"{cls:<15} {kind:<15} {count}")
    residuals = [r.pohozaev_residual for r in records if r.pohozaev_residual is not None]
    if residuals:
        print(f"worst Pohozaev residual at R = 1: {max(residuals):.2e}")


if __name__ == "__main__":
    main()
