"""Pohozaev residual against integration tolerance, orders m = 1, 2, 3.

The residual should track the integrator's accuracy: about one decade per
decade of rtol until rounding takes over.
"""

import numpy as np

from liouville_lab.params import ProblemParams
from liouville_lab.pohozaev import residual
from liouville_lab.radial_ode import InitialData, integrate

CASES = [
    ProblemParams(5, 1, 1, 2, 2, 3),
    ProblemParams(7, 2, 0, 0, 5, 5),
    ProblemParams(9, 3, 1, 2, 2, 2),
]
RTOLS = (1e-6, 1e-8, 1e-10, 1e-12)


def main():
    rng = np.random.default_rng(0)
    print(f"{'params':<50}" + "".join(f"{t:>11.0e}" for t in RTOLS))
    for params in CASES:
        m = params.m
        init = InitialData(tuple(rng.uniform(0.1, 1, m)), tuple(rng.uniform(0.1, 1, m))).rescaled(params, 1 / 3)
        row = []
        for rtol in RTOLS:
            traj = integrate(params, init, r_max=5.05, rtol=rtol, atol=1e-30)
            lam = (params.n - 2 * m) / 2
            row.append(max(residual(params, traj, R, lam).residual for R in (1.0, 2.0, 5.0)))
        print(f"{str(params):<50}" + "".join(f"{x:11.2e}" for x in row))


if __name__ == "__main__":
    main()
