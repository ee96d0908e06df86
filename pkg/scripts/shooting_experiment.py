"""Shooting on both sides of the critical hyperbola (second-order system).

Subcritical (n=3, p=q=2): every bisection midpoint changes sign, and the
radius at which positivity is lost grows along the bisection without
becoming infinite.  Supercritical (n=5, p=q=5): the separatrix shot stays
positive to r = 1e4 and decays like r^(-1/2).
"""

from liouville_lab.params import ProblemParams, classify
from liouville_lab.radial_ode import shoot_system_m1


def report(params, r_max):
    outcome = shoot_system_m1(params, r_max=r_max)
    print(f"\n{params}  [{classify(params)}]")
    print(f"{'v(0)':>22}  outcome")
    for s, res in outcome.trace:
        if res.kind == "SignChange":
            desc = f"{res.component} vanishes at r = {res.r:.6g}"
        elif res.kind == "PositiveToRmax":
            desc = f"positive to r_max, slopes {res.slope_u:.5f}, {res.slope_v:.5f}"
        else:
            desc = f"blow-up at r = {res.r:.6g}"
        print(f"{s:22.16f}  {desc}")
    return outcome


if __name__ == "__main__":
    report(ProblemParams(3, 1, 0, 0, 2, 2), r_max=1e3)
    report(ProblemParams(5, 1, 0, 0, 5, 5), r_max=1e4)
