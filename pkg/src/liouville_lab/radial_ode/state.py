"""Radial state layout and the first-order vector field.

The state at radius r stores ``w_i = (-Δ)^i u`` and ``z_i = (-Δ)^i v`` for
``i = 0..m-1`` with their r-derivatives, plus four running integrals over the
ball B_r used by the Pohozaev and growth diagnostics.  Flat vector layout::

    [w_0..w_{m-1}, w'_0..w'_{m-1}, z_0..z_{m-1}, z'_0..z'_{m-1}, Qa, Qb, Pa, Pb]

Each rung obeys ``w_i'' + (n-1)/r w_i' = -w_{i+1}`` with the top rung closed by
``w_m = r^a z_0^p`` (and ``z_m = r^b w_0^q``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import NegativeBase
from ..params import ProblemParams, scaling_exponents


def sphere_area(n: int) -> float:
    """Area of the unit sphere S^{n-1}, ``2 π^{n/2} / Γ(n/2)``.

    Γ(n/2) comes from the integer / half-integer recursion, no special functions.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if n % 2 == 0:
        gamma_half_n = float(math.factorial(n // 2 - 1))
    else:
        gamma_half_n = math.sqrt(math.pi)
        x = 0.5
        while x < n / 2:
            gamma_half_n *= x
            x += 1.0
    return 2.0 * math.pi ** (n / 2) / gamma_half_n


def state_size(m: int) -> int:
    return 4 * m + 4


def component_labels(m: int) -> list[str]:
    """Labels of the sign-checked components, in the order detection reports them."""
    return [f"w{i}" for i in range(m)] + [f"z{i}" for i in range(m)]


def component_index(m: int) -> np.ndarray:
    return np.r_[0:m, 2 * m : 3 * m]


@dataclass(frozen=True)
class InitialData:
    """Values of ``(-Δ)^i u`` and ``(-Δ)^i v`` at the origin (derivatives vanish there)."""

    w0: tuple[float, ...]
    z0: tuple[float, ...]

    def __post_init__(self):
        w0 = tuple(float(x) for x in np.atleast_1d(self.w0))
        z0 = tuple(float(x) for x in np.atleast_1d(self.z0))
        if len(w0) != len(z0) or not w0:
            raise ValueError("w0 and z0 must have the same nonzero length")
        if not all(math.isfinite(x) and x >= 0 for x in w0 + z0):
            raise ValueError("initial values must be finite and nonnegative")
        object.__setattr__(self, "w0", w0)
        object.__setattr__(self, "z0", z0)

    @property
    def m(self) -> int:
        return len(self.w0)

    @classmethod
    def scalar(cls, w0) -> InitialData:
        """Symmetric data ``v ≡ u``, the reduction used for the single equation."""
        return cls(tuple(np.atleast_1d(w0)), tuple(np.atleast_1d(w0)))

    def rescaled(self, params: ProblemParams, lam: float) -> InitialData:
        """Data of ``(λ^{α_u} u(λr), λ^{α_v} v(λr))``."""
        ex = scaling_exponents(params)
        w = tuple(lam ** (ex.alpha_u + 2 * i) * x for i, x in enumerate(self.w0))
        z = tuple(lam ** (ex.alpha_v + 2 * i) * x for i, x in enumerate(self.z0))
        return InitialData(w, z)


@dataclass(frozen=True)
class RadialState:
    r: float
    w: np.ndarray
    wp: np.ndarray
    z: np.ndarray
    zp: np.ndarray
    Qa: float = 0.0
    Qb: float = 0.0
    Pa: float = 0.0
    Pb: float = 0.0

    @property
    def m(self) -> int:
        return len(self.w)

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.w, self.wp, self.z, self.zp, [self.Qa, self.Qb, self.Pa, self.Pb]])

    @classmethod
    def from_vector(cls, r: float, y, m: int) -> RadialState:
        y = np.asarray(y, dtype=float)
        if y.shape != (state_size(m),):
            raise ValueError(f"expected state of length {state_size(m)}, got {y.shape}")
        return cls(
            float(r),
            y[0:m].copy(),
            y[m : 2 * m].copy(),
            y[2 * m : 3 * m].copy(),
            y[3 * m : 4 * m].copy(),
            *(float(x) for x in y[4 * m :]),
        )

    def lap(self, which: str, i: int, params: ProblemParams) -> float:
        """Plain ``Δ^i`` of u (``which='u'``) or v, for ``0 <= i <= m``."""
        m = self.m
        if i == m:
            top = self.r**params.a * _pow(self.z[0], params.p) if which == "u" else self.r**params.b * _pow(self.w[0], params.q)
            return (-1) ** m * top
        vals = self.w if which == "u" else self.z
        return (-1) ** i * float(vals[i])

    def lap_deriv(self, which: str, i: int) -> float:
        """``(Δ^i u)'`` or ``(Δ^i v)'`` for ``0 <= i < m``."""
        vals = self.wp if which == "u" else self.zp
        return (-1) ** i * float(vals[i])


def _is_int(x) -> bool:
    return float(x).is_integer()


def _pow(x: float, e) -> float:
    if _is_int(e):
        return float(x) ** int(e)
    if x < 0:
        raise NegativeBase(f"{x}**{e}: integrate only up to the sign change")
    return float(x) ** float(e)


class RadialField:
    """Right-hand side ``f(r, y)`` of the radial system.

    With ``extend=True`` non-integer powers of negative values use the odd
    extension ``sign(x)|x|^e``; the integrator needs that to step across a zero
    before it truncates the trajectory there.  Integer powers are always the
    natural ones, so for integer exponents trajectories continue through sign
    changes and every integral identity still holds.
    """

    def __init__(self, params: ProblemParams, extend: bool = False):
        self.params = params
        self.n = params.n
        self.m = params.m
        self.a = float(params.a)
        self.b = float(params.b)
        self.p = float(params.p)
        self.q = float(params.q)
        self.p_int = _is_int(params.p)
        self.q_int = _is_int(params.q)
        self.extend = extend
        self.omega = sphere_area(params.n)

    def power(self, x: float, e: float, is_int: bool) -> float:
        if is_int:
            return x ** int(e)
        if x < 0:
            if not self.extend:
                raise NegativeBase(f"{x}**{e}: integrate only up to the sign change")
            return -((-x) ** e)
        return x**e

    def __call__(self, r: float, y: np.ndarray) -> np.ndarray:
        m, n = self.m, self.n
        w0 = y[0]
        z0 = y[2 * m]
        zpow = self.power(z0, self.p, self.p_int)
        wpow = self.power(w0, self.q, self.q_int)
        dy = np.empty_like(y)
        dy[0:m] = y[m : 2 * m]
        dy[2 * m : 3 * m] = y[3 * m : 4 * m]
        if r > 0:
            ra, rb = r**self.a, r**self.b
            c = (n - 1) / r
            dy[m : 2 * m - 1] = -c * y[m : 2 * m - 1] - y[1:m]
            dy[2 * m - 1] = -c * y[2 * m - 1] - ra * zpow
            dy[3 * m : 4 * m - 1] = -c * y[3 * m : 4 * m - 1] - y[2 * m + 1 : 3 * m]
            dy[4 * m - 1] = -c * y[4 * m - 1] - rb * wpow
            sa = self.omega * r ** (n - 1 + self.a)
            sb = self.omega * r ** (n - 1 + self.b)
        else:
            # regularized limit: w'' + (n-1)/r w' -> n w''(0)
            dy[m : 2 * m - 1] = -y[1:m] / n
            dy[2 * m - 1] = -(zpow if self.a == 0 else 0.0) / n
            dy[3 * m : 4 * m - 1] = -y[2 * m + 1 : 3 * m] / n
            dy[4 * m - 1] = -(wpow if self.b == 0 else 0.0) / n
            sa = self.omega if n - 1 + self.a == 0 else 0.0
            sb = self.omega if n - 1 + self.b == 0 else 0.0
        dy[4 * m] = sa * zpow * z0
        dy[4 * m + 1] = sb * wpow * w0
        dy[4 * m + 2] = sa * zpow
        dy[4 * m + 3] = sb * wpow
        return dy


def vector_field(params: ProblemParams, state: RadialState) -> np.ndarray:
    """Derivative of ``state`` (flat layout); raises NegativeBase past a sign change."""
    if state.m != params.m:
        raise ValueError("state order does not match params.m")
    if state.r < 0:
        raise ValueError("radius must be nonnegative")
    return RadialField(params)(state.r, state.as_vector())


def series_start(params: ProblemParams, init: InitialData, r0: float) -> RadialState:
    """Truncated Taylor data at small ``r0`` that sidesteps the 1/r singularity.

    Lower rungs get ``-w_{i+1}(0) r0²/(2n)``; the top rung gets the weighted
    particular solution ``-c r0^{2+a}/((2+a)(n+a))`` of ``w'' + (n-1)/r w' = -c r^a``.
    Discarded terms are O(r0^4) relative.
    """
    if not 0 < r0 <= 1e-3:
        raise ValueError("r0 must lie in (0, 1e-3]")
    m, n = params.m, params.n
    if init.m != m:
        raise ValueError(f"initial data has order {init.m}, params.m = {m}")
    a, b = float(params.a), float(params.b)
    W0, Z0 = np.array(init.w0), np.array(init.z0)
    cz = _pow(Z0[0], params.p)
    cw = _pow(W0[0], params.q)
    w, wp, z, zp = W0.copy(), np.zeros(m), Z0.copy(), np.zeros(m)
    w[:-1] -= W0[1:] * r0**2 / (2 * n)
    wp[:-1] = -W0[1:] * r0 / n
    z[:-1] -= Z0[1:] * r0**2 / (2 * n)
    zp[:-1] = -Z0[1:] * r0 / n
    w[-1] -= cz * r0 ** (2 + a) / ((2 + a) * (n + a))
    wp[-1] = -cz * r0 ** (1 + a) / (n + a)
    z[-1] -= cw * r0 ** (2 + b) / ((2 + b) * (n + b))
    zp[-1] = -cw * r0 ** (1 + b) / (n + b)
    omega = sphere_area(n)
    va, vb = omega * r0 ** (n + a) / (n + a), omega * r0 ** (n + b) / (n + b)
    return RadialState(r0, w, wp, z, zp, va * cz * Z0[0], vb * cw * W0[0], va * cz, vb * cw)
