"""Growth and decay estimates for positive radial solutions, checked on trajectories.

Three pieces:

* ``choose_test_exponents`` picks cutoff powers ``(s, t)`` for the
  test-function argument behind the integral growth bounds;
* ``mass_growth_fit`` measures how fast ``∫_{B_R} |x|^a v^p`` and
  ``∫_{B_R} |x|^b u^q`` grow and compares with the cap ``R^{n-2m-α}``;
* ``pointwise_decay_check`` evaluates the flux, Harnack-type and chained
  decay inequalities rung by rung at every positive checkpoint.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateExponents, NotPositive
from .params import ProblemParams, scaling_exponents
from .radial_ode import Trajectory

DECAY_RTOL = 1e-9
GROWTH_MARGIN = 0.1


@dataclass(frozen=True)
class TestExponents:
    """Cutoff powers with ``t <= (s-2m) p`` and ``s <= (t-2m) q``."""

    __test__ = False  # keep pytest from collecting this as a test class

    s: float
    t: float

    def feasible(self, m: int, p: float, q: float, rtol: float = 1e-12) -> bool:
        tol = rtol * max(1.0, abs(self.s), abs(self.t))
        return (
            self.s >= 2 * m - tol
            and self.t >= 2 * m - tol
            and self.t <= (self.s - 2 * m) * p + tol
            and self.s <= (self.t - 2 * m) * q + tol
        )


def choose_test_exponents(m: int, p: float, q: float) -> TestExponents:
    """``s`` one above the feasibility bound ``2mq(p+1)/(pq-1)``, ``t`` mid-interval.

    The margin makes ``2m + s/q < (s-2m) p`` strict, so the interval for ``t``
    has positive length.
    """
    p, q = float(p), float(q)
    if p * q == 1:
        raise DegenerateExponents("pq = 1")
    if p * q < 1:
        raise DegenerateExponents(f"pq = {p * q} < 1: no feasible cutoff powers")
    s = 2 * m * q * (p + 1) / (p * q - 1) + 1
    t = 0.5 * ((2 * m + s / q) + (s - 2 * m) * p)
    return TestExponents(s, t)


@dataclass(frozen=True)
class MassGrowthFit:
    slope_a: float
    slope_b: float
    cap_a: float
    cap_b: float
    radii: tuple

    @property
    def within_cap(self) -> bool:
        return self.slope_a <= self.cap_a + GROWTH_MARGIN and self.slope_b <= self.cap_b + GROWTH_MARGIN

    def as_dict(self) -> dict:
        return {
            "slope_a": self.slope_a,
            "slope_b": self.slope_b,
            "cap_a": self.cap_a,
            "cap_b": self.cap_b,
            "within_cap": self.within_cap,
        }


def mass_growth_fit(params: ProblemParams, trajectory: Trajectory, radii) -> MassGrowthFit:
    """Log-log slopes of the ball masses ``Pa(R)``, ``Pb(R)`` over ``radii``.

    ``Pa`` is capped by ``n - 2m - α_u`` and ``Pb`` by ``n - 2m - α_v`` for a
    positive entire solution; ``within_cap`` allows a 0.1 fitting margin.
    """
    radii = np.sort(np.asarray(radii, dtype=float))
    if len(radii) < 4 or radii[0] <= 0 or radii[-1] < 10 * radii[0]:
        raise ValueError("need at least 4 positive radii spanning a decade")
    if radii[-1] > trajectory.r_end:
        raise NotPositive(f"trajectory ends at {trajectory.r_end:g} before R = {radii[-1]:g}")
    j = trajectory.positive_prefix()
    if j < len(trajectory.r) and trajectory.r[j] <= radii[-1]:
        raise NotPositive(f"trajectory not positive up to R = {radii[-1]:g}")
    pa = np.array([trajectory.state_at(R).Pa for R in radii])
    pb = np.array([trajectory.state_at(R).Pb for R in radii])
    if np.any(pa <= 0) or np.any(pb <= 0):
        raise NotPositive("ball mass vanishes")
    log_r = np.log(radii)
    ex = scaling_exponents(params)
    base = params.n - 2 * params.m
    return MassGrowthFit(
        float(np.polyfit(log_r, np.log(pa), 1)[0]),
        float(np.polyfit(log_r, np.log(pb), 1)[0]),
        float(base - ex.alpha_u),
        float(base - ex.alpha_v),
        tuple(float(r) for r in radii),
    )


@dataclass
class DecayCheckReport:
    """Worst signed slack per inequality over the positive checkpoints.

    Slack is ``(bound - value) / scale``, so a negative number is a violation.
    Keys are ``"u<i>"`` / ``"v<i>"`` rungs; a rung with no positive checkpoint
    reports ``+inf`` (vacuous).
    """

    flux: dict = field(default_factory=dict)
    flux_weighted: dict = field(default_factory=dict)
    harnack: dict = field(default_factory=dict)
    chained: dict = field(default_factory=dict)
    derivative: dict = field(default_factory=dict)
    constants: dict = field(default_factory=dict)
    checkpoints: int = 0
    r_positive: float = 0.0
    tolerance: float = DECAY_RTOL

    def _ok(self, slacks: dict) -> bool:
        return all(s >= -self.tolerance for s in slacks.values())

    @property
    def flux_ok(self) -> bool:
        return self._ok(self.flux)

    @property
    def flux_weighted_ok(self) -> bool:
        return self._ok(self.flux_weighted)

    @property
    def harnack_ok(self) -> bool:
        return self._ok(self.harnack)

    @property
    def chained_ok(self) -> bool:
        return self._ok(self.chained)

    @property
    def derivative_ok(self) -> bool | None:
        """Derivative decay; ``None`` unless the Harnack bound held (it is derived from it)."""
        return self._ok(self.derivative) if self.harnack_ok else None

    def as_dict(self) -> dict:
        return {
            "checkpoints": self.checkpoints,
            "r_positive": self.r_positive,
            "flux_ok": self.flux_ok,
            "flux_weighted_ok": self.flux_weighted_ok,
            "harnack_ok": self.harnack_ok,
            "chained_ok": self.chained_ok,
            "derivative_ok": self.derivative_ok,
            "flux": dict(self.flux),
            "flux_weighted": dict(self.flux_weighted),
            "harnack": dict(self.harnack),
            "chained": dict(self.chained),
            "derivative": dict(self.derivative),
            "constants": dict(self.constants),
        }


def _worst(bound: np.ndarray, value: np.ndarray) -> float:
    if bound.size == 0:
        return float("inf")
    scale = np.maximum(np.maximum(np.abs(bound), np.abs(value)), np.finfo(float).tiny)
    return float(np.min((bound - value) / scale))


def pointwise_decay_check(params: ProblemParams, trajectory: Trajectory, tolerance: float = DECAY_RTOL) -> DecayCheckReport:
    """Evaluate the rung-by-rung decay inequalities while every component is positive.

    With ``w_i = (-Δ)^i u`` and ``w_m = r^a v^p`` (likewise ``z_i`` for v):

    flux
        ``r w_{i+1} <= -n w_i'`` for ``i < m``, exactly as derived for the
        unweighted problem.
    flux_weighted
        Same, but the top rung uses ``n + a`` (``n + b`` for v).  The literal
        form assumes ``w_{i+1}`` is nonincreasing, which fails for
        ``r^a v^p`` near the origin when ``a > 0``.
    harnack
        ``-r w_i' <= (n-2) w_i`` for ``i < m``; a property of entire solutions only.
    chained
        ``w_i <= (n(n-2))^{i + m(p+1)/(pq-1)} r^{-2i-α_u}`` for ``i <= m``.
    derivative
        ``|w_i'| <= (n-2)(n(n-2))^{i + m(p+1)/(pq-1)} r^{-2i-1-α_u}`` for ``i < m``.

    The last three are diagnostics: a finite trajectory may violate them.
    """
    n, m = params.n, params.m
    if n < 3:
        raise ValueError("decay estimates need n >= 3")
    a, b, p, q = float(params.a), float(params.b), float(params.p), float(params.q)
    ex = scaling_exponents(params)
    j = trajectory.positive_prefix()
    r = trajectory.r[:j]
    y = trajectory.y[:j]
    nn = n * (n - 2.0)
    pq1 = p * q - 1
    report = DecayCheckReport(checkpoints=int(j), r_positive=float(r[-1]) if j else 0.0, tolerance=tolerance)
    report.constants = {
        "flux": float(n),
        "flux_weighted_u": n + a,
        "flux_weighted_v": n + b,
        "harnack": n - 2.0,
        "chained_u": [nn ** (i + m * (p + 1) / pq1) for i in range(m + 1)],
        "chained_v": [nn ** (i + m * (q + 1) / pq1) for i in range(m + 1)],
    }
    for name, off, off_other, weight, power, alpha, mexp in (
        ("u", 0, 2 * m, a, p, ex.alpha_u, m * (p + 1) / pq1),
        ("v", 2 * m, 0, b, q, ex.alpha_v, m * (q + 1) / pq1),
    ):
        vals = y[:, off : off + m]
        ders = y[:, off + m : off + 2 * m]
        other = y[:, off_other]
        top = r**weight * other**power if j else np.empty(0)
        for i in range(m):
            key = f"{name}{i}"
            nxt = vals[:, i + 1] if i + 1 < m else top
            flux_const = n + weight if i + 1 == m else n
            report.flux[key] = _worst(-n * ders[:, i], r * nxt)
            report.flux_weighted[key] = _worst(-flux_const * ders[:, i], r * nxt)
            report.harnack[key] = _worst((n - 2.0) * vals[:, i], -r * ders[:, i])
            c = nn ** (i + mexp)
            report.chained[key] = _worst(c * r ** (-2 * i - alpha), vals[:, i])
            report.derivative[key] = _worst((n - 2.0) * c * r ** (-2 * i - 1 - alpha), np.abs(ders[:, i]))
        c = nn ** (m + mexp)
        report.chained[f"{name}{m}"] = _worst(c * r ** (-2 * m - alpha), top)
    return report
