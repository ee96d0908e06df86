"""Closed-form radial solutions of the second-order problem, used as ground truth.

Three families, all for ``m = 1`` with ``p = q``, ``a = b`` (so ``v ≡ u``):

``"bubble"``
    ``u = (n(n-2))^{(n-2)/4} (1+r²)^{-(n-2)/2}`` solving ``-Δu = u^{(n+2)/(n-2)}``.
``"henon_bubble"``
    ``u = C (1+r^{2+a})^{-(n-2)/(2+a)}`` with ``C^{P-1} = (n-2)(n+a)`` solving
    ``-Δu = r^a u^P``, ``P = (n+2+2a)/(n-2)``.  Reduces to ``"bubble"`` at a = 0.
``"singular"``
    ``U = A r^{-θ}``, ``θ = (2+a)/(p-1)``, ``A^{p-1} = θ(n-2-θ)``, solving
    ``-ΔU = r^a U^p`` away from the origin; needs ``θ < n-2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..errors import UnsupportedKind
from ..params import ProblemParams
from .integrator import Trajectory
from .state import InitialData, RadialState, vector_field

KINDS = ("bubble", "henon_bubble", "singular")


@dataclass(frozen=True)
class ExactSolution:
    kind: str
    params: ProblemParams
    u: Callable
    du: Callable
    d2u: Callable
    regular: bool

    def initial_data(self) -> InitialData:
        if not self.regular:
            raise UnsupportedKind(f"{self.kind} is singular at the origin")
        return InitialData.scalar([float(self.u(0.0))])

    def state(self, r: float) -> RadialState:
        u, du = float(self.u(r)), float(self.du(r))
        one = np.array
        return RadialState(r, one([u]), one([du]), one([u]), one([du]))

    def ode_residual(self, r: float) -> float:
        """Relative mismatch between the closed-form ``u''`` and the vector field's."""
        field = vector_field(self.params, self.state(r))
        predicted = field[1]
        exact = float(self.d2u(r))
        n, a, p = self.params.n, float(self.params.a), float(self.params.p)
        scale = max(abs(exact), abs((n - 1) / r * self.du(r)), r**a * abs(self.u(r)) ** p)
        return abs(predicted - exact) / scale

    def sample_trajectory(self, radii) -> Trajectory:
        """A checkpoint-only trajectory built from the closed form (no interpolants)."""
        radii = np.asarray(radii, dtype=float)
        m = 1
        y = np.zeros((len(radii), 4 * m + 4))
        y[:, 0] = y[:, 2] = self.u(radii)
        y[:, 1] = y[:, 3] = self.du(radii)
        y[:, 4:] = np.nan
        return Trajectory(self.params, radii, y, np.zeros(len(radii), bool))


def _require(cond, msg):
    if not cond:
        raise UnsupportedKind(msg)


def exact_solution_oracle(kind: str, params: ProblemParams) -> ExactSolution:
    if kind not in KINDS:
        raise UnsupportedKind(f"unknown kind {kind!r}; choose from {KINDS}")
    n, m = params.n, params.m
    a, p = float(params.a), float(params.p)
    _require(m == 1, f"{kind} needs m = 1")
    _require(params.p == params.q and params.a == params.b, f"{kind} needs p = q and a = b")
    _require(n >= 3, f"{kind} needs n >= 3")

    if kind in ("bubble", "henon_bubble"):
        if kind == "bubble":
            _require(a == 0, "bubble needs a = 0; use henon_bubble")
        crit = (n + 2 + 2 * a) / (n - 2)
        _require(math.isclose(p, crit, rel_tol=1e-12), f"{kind} needs p = {crit}")
        s = 2 + a
        beta = (n - 2) / s
        C = ((n - 2) * (n + a)) ** (1 / (p - 1))

        def u(r):
            return C * (1 + np.asarray(r, dtype=float) ** s) ** (-beta)

        def du(r):
            r = np.asarray(r, dtype=float)
            return -C * (n - 2) * r ** (1 + a) * (1 + r**s) ** (-beta - 1)

        def d2u(r):
            r = np.asarray(r, dtype=float)
            rs = r**s
            return -C * (n - 2) * r**a * (1 + rs) ** (-beta - 2) * ((1 + a) * (1 + rs) - (n + a) * rs)

        return ExactSolution(kind, params, u, du, d2u, True)

    theta = (2 + a) / (p - 1)
    _require(theta < n - 2, f"singular solution needs (2+a)/(p-1) < n-2, got {theta}")
    A = (theta * (n - 2 - theta)) ** (1 / (p - 1))

    def u(r):
        return A * np.asarray(r, dtype=float) ** (-theta)

    def du(r):
        return -theta * A * np.asarray(r, dtype=float) ** (-theta - 1)

    def d2u(r):
        return theta * (theta + 1) * A * np.asarray(r, dtype=float) ** (-theta - 2)

    return ExactSolution(kind, params, u, du, d2u, False)

