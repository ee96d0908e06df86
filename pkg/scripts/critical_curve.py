"""Write the critical hyperbola q(p) for a few (n, m, a, b) as CSV files."""

from fractions import Fraction
from pathlib import Path

from liouville_lab.scan import emit_curve

CURVES = [(3, 1, 0, 0), (5, 1, 0, 0), (5, 2, 0, 0), (7, 2, 1, 2), (9, 3, 0, 0)]


def main(out_dir=Path("curves")):
    out_dir.mkdir(exist_ok=True)
    for n, m, a, b in CURVES:
        path = out_dir / f"critical_n{n}_m{m}_a{a}_b{b}.csv"
        emit_curve(n, m, a, b, (Fraction(1), Fraction(20)), 77, path)
        print(path)


if __name__ == "__main__":
    main()
