"""Radial Pohozaev identity for the polyharmonic system and its residual.

For ``λ + γ = n - 2m`` every solution satisfies, on each ball B_R,

    ((n+a)/(p+1) - λ) ∫ |x|^a v^{p+1} + ((n+b)/(q+1) - γ) ∫ |x|^b u^{q+1}
        = (boundary terms on ∂B_R)

with one boundary expression for odd ``m = 2k+1`` and another for even
``m = 2k``.  In radial form every surface integral is ``ω R^{n-1}`` times
the integrand at R, ``∂_ν = d/dr``, ``x·∇ = r d/dr`` and ``∇f·∇g = f'g'``.

Plain Laplacian powers are recovered from the stored ones as
``Δ^i u = (-1)^i (-Δ)^i u``.  The transcription below is checked against
integrated solutions by the residual tests; it needed no sign corrections.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import OutOfDomain
from .params import ProblemParams
from .radial_ode import RadialState, Trajectory, sphere_area

RESIDUAL_FLOOR = 1e-300


@dataclass(frozen=True)
class PohozaevReport:
    R: float
    lam: float
    gamma: float
    lhs: float
    terms: dict = field(default_factory=dict)
    rhs: float = 0.0
    residual: float = 0.0

    @property
    def term_scale(self) -> float:
        return max((abs(v) for v in self.terms.values()), default=0.0)

    def as_dict(self) -> dict:
        return {
            "R": self.R,
            "lambda": self.lam,
            "gamma": self.gamma,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "residual": self.residual,
            "terms": dict(self.terms),
        }

    def table(self) -> str:
        rows = [f"Pohozaev identity at R = {self.R:g}  (lambda = {self.lam:g}, gamma = {self.gamma:g})"]
        width = max([len(k) for k in self.terms] + [12])
        for name, val in self.terms.items():
            rows.append(f"  {name:<{width}}  {val: .12e}")
        rows.append(f"  {'boundary sum':<{width}}  {self.rhs: .12e}")
        rows.append(f"  {'volume side':<{width}}  {self.lhs: .12e}")
        rows.append(f"  {'residual':<{width}}  {self.residual: .3e}")
        return "\n".join(rows)


def gamma_for(params: ProblemParams, lam: float) -> float:
    return params.n - 2 * params.m - lam


def _check_pair(params: ProblemParams, lam, gamma):
    if gamma is None:
        return float(lam), float(gamma_for(params, lam))
    target = params.n - 2 * params.m
    if not math.isclose(lam + gamma, target, rel_tol=1e-12, abs_tol=1e-12):
        raise ValueError(f"lambda + gamma = {lam + gamma}, must equal n - 2m = {target}")
    return float(lam), float(gamma)


def _state(trajectory: Trajectory, R: float) -> RadialState:
    if not trajectory.r_start <= R <= trajectory.r_end:
        raise OutOfDomain(f"R={R} outside the trajectory domain [{trajectory.r_start}, {trajectory.r_end}]")
    return trajectory.state_at(R)


def lhs(params: ProblemParams, trajectory: Trajectory, R: float, lam: float, gamma: float | None = None) -> float:
    """Volume side of the identity from the ball accumulators at R."""
    lam, gamma = _check_pair(params, lam, gamma)
    st = _state(trajectory, R)
    n, a, b, p, q = params.n, float(params.a), float(params.b), float(params.p), float(params.q)
    coef_v = (n + a) / (p + 1) - lam
    coef_u = (n + b) / (q + 1) - gamma
    return coef_v * st.Qa + coef_u * st.Qb


def _I(lap_x, dlap_x, lap_y, dlap_y, m, k):
    # sum_{i<k} Δ^i y (Δ^{m-i-1} x)' - Δ^{m-i-1} x (Δ^i y)'
    return sum(lap_y(i) * dlap_x(m - i - 1) - lap_x(m - i - 1) * dlap_y(i) for i in range(k))


def _J(lap_x, dlap_x, lap_y, dlap_y, ddlap_y, m, k, R):
    # Δ^i(x·∇y) = 2i Δ^i y + R (Δ^i y)'; its normal derivative is (2i+1)(Δ^i y)' + R (Δ^i y)''
    total = 0.0
    for i in range(k):
        inner = 2 * i * lap_y(i) + R * dlap_y(i)
        inner_normal = (2 * i + 1) * dlap_y(i) + R * ddlap_y(i)
        total += inner * dlap_x(m - i - 1) - lap_x(m - i - 1) * inner_normal
    return total


def boundary_terms(params: ProblemParams, state: RadialState, lam: float, gamma: float | None = None) -> dict:
    """Signed boundary contributions at ``R = state.r``; their sum is the identity's right side."""
    lam, gamma = _check_pair(params, lam, gamma)
    n, m, k = params.n, params.m, params.k
    a, b, p, q = float(params.a), float(params.b), float(params.p), float(params.q)
    R = state.r
    surf = sphere_area(n) * R ** (n - 1)

    def lu(i):
        return state.lap("u", i, params)

    def lv(i):
        return state.lap("v", i, params)

    def du(i):
        return state.lap_deriv("u", i)

    def dv(i):
        return state.lap_deriv("v", i)

    # (Δ^i f)'' from the radial Laplacian: Δ^{i+1} f - (n-1)/R (Δ^i f)'
    def ddu(i):
        return lu(i + 1) - (n - 1) / R * du(i)

    def ddv(i):
        return lv(i + 1) - (n - 1) / R * dv(i)

    u0, v0 = float(state.w[0]), float(state.z[0])
    terms = {
        "v^(p+1) surface": surf * R ** (1 + a) * v0 ** (p + 1) / (p + 1),
        "u^(q+1) surface": surf * R ** (1 + b) * u0 ** (q + 1) / (q + 1),
    }
    I_uv = surf * _I(lu, du, lv, dv, m, k)
    I_vu = surf * _I(lv, dv, lu, du, m, k)
    J_uv = surf * _J(lu, du, lv, dv, ddv, m, k, R)
    J_vu = surf * _J(lv, dv, lu, du, ddu, m, k, R)
    if m % 2 == 1:
        grad = surf * R * du(k) * dv(k)
        terms["-grad.grad x.nu"] = -grad
        terms["(lambda+m-1) flux"] = (lam + m - 1) * surf * lv(k) * du(k)
        terms["(gamma+m-1) flux"] = (gamma + m - 1) * surf * lu(k) * dv(k)
        terms["du_nu x.grad v"] = grad
        terms["dv_nu x.grad u"] = grad
        terms["lambda I(u,v)"] = lam * I_uv
        terms["gamma I(v,u)"] = gamma * I_vu
        terms["J(u,v)"] = J_uv
        terms["J(v,u)"] = J_vu
    else:
        terms["-lap^k u lap^k v x.nu"] = -surf * R * lu(k) * lv(k)
        terms["-lambda I(u,v)"] = -lam * I_uv
        terms["-gamma I(v,u)"] = -gamma * I_vu
        terms["-J(u,v)"] = -J_uv
        terms["-J(v,u)"] = -J_vu
    return terms


def residual(params: ProblemParams, trajectory: Trajectory, R: float, lam: float, gamma: float | None = None) -> PohozaevReport:
    """Both sides of the identity at R and their normalized mismatch.

    The mismatch is divided by the largest of ``|lhs|``, ``|rhs|`` and the
    individual term magnitudes, since at criticality the volume side can
    vanish identically.
    """
    lam, gamma = _check_pair(params, lam, gamma)
    left = lhs(params, trajectory, R, lam, gamma)
    terms = boundary_terms(params, _state(trajectory, R), lam, gamma)
    right = math.fsum(terms.values())
    scale = max([abs(left), abs(right), RESIDUAL_FLOOR] + [abs(v) for v in terms.values()])
    return PohozaevReport(float(R), lam, gamma, float(left), terms, float(right), abs(left - right) / scale)


def lambda_invariance_check(params: ProblemParams, trajectory: Trajectory, R: float, lambda1: float, lambda2: float) -> float:
    """Worst residual over two admissible ``λ`` choices (γ inferred for each)."""
    return max(
        residual(params, trajectory, R, lambda1).residual,
        residual(params, trajectory, R, lambda2).residual,
    )
