"""Shooting from the origin, and log-log decay fits of the outcome."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import InvalidBracket, InvalidParams, NotPositiveOnWindow, UnsupportedOrder
from ..params import ProblemParams, scaling_exponents
from .integrator import ATOL, R_MAX, RTOL, BlowUp, PositiveToRmax, ShootResult, SignChange, Trajectory, integrate
from .state import InitialData


def decay_fit(trajectory: Trajectory, window: tuple[float, float] | None = None) -> tuple[float, float]:
    """Least-squares slopes of ``log u`` and ``log v`` against ``log r``.

    Uses every checkpoint inside ``window`` (default ``[r_end/10, r_end]``).
    """
    if window is None:
        window = (trajectory.r_end / 10, trajectory.r_end)
    lo, hi = window
    sel = (trajectory.r >= lo) & (trajectory.r <= hi)
    if sel.sum() < 2:
        raise NotPositiveOnWindow(f"fewer than two checkpoints in [{lo:g}, {hi:g}]")
    u, v = trajectory.u[sel], trajectory.v[sel]
    if np.any(u <= 0) or np.any(v <= 0):
        raise NotPositiveOnWindow(f"trajectory not positive on [{lo:g}, {hi:g}]")
    log_r = np.log(trajectory.r[sel])
    slope_u = np.polyfit(log_r, np.log(u), 1)[0]
    slope_v = np.polyfit(log_r, np.log(v), 1)[0]
    return float(slope_u), float(slope_v)


def probe(params: ProblemParams, init: InitialData, r_max=R_MAX, rtol=RTOL, atol=ATOL) -> tuple[ShootResult, Trajectory]:
    """One shot: integrate until the first sign change, blow-up or ``r_max``."""
    traj = integrate(params, init, r_max, rtol, atol, stop_on_sign_change=True)
    for ev in traj.events:
        if isinstance(ev, (SignChange, BlowUp)):
            return ev, traj
    return PositiveToRmax(*decay_fit(traj)), traj


@dataclass(frozen=True)
class ShootOutcome:
    result: ShootResult
    parameter: float | tuple
    trace: tuple  # ((parameter, result), ...) in evaluation order
    trajectory: Trajectory | None = None


def lagging_component(traj: Trajectory, labels) -> str:
    """Component that decays fastest relative to its scaling rate at ``r_end``.

    For ``w_i`` the reference rate is ``r^{-(alpha_u + 2i)}`` (``alpha_v`` for
    ``z_i``); the one with the most negative ``r c'/c + rate`` is heading for
    zero first.  Used to place shots that stay positive up to ``r_max``.
    """
    ex = scaling_exponents(traj.params)
    state = traj.state(-1)
    best, best_val = None, math.inf
    for label in labels:
        i = int(label[1:])
        vals, ders, alpha = (state.w, state.wp, ex.alpha_u) if label[0] == "w" else (state.z, state.zp, ex.alpha_v)
        drift = state.r * ders[i] / vals[i] + alpha + 2 * i
        if drift < best_val:
            best, best_val = label, drift
    return best


def _label(res, traj, labels):
    if isinstance(res, SignChange):
        return res.component
    if isinstance(res, PositiveToRmax):
        return lagging_component(traj, labels)
    return None


def _bisect(make_init, params, lo, hi, labels, target, r_max, rtol, atol, max_iter, rel_width) -> ShootOutcome:
    """Geometric bisection on a positive scalar shooting parameter.

    Each shot is labelled by the component that vanishes first (or, for shots
    positive up to ``r_max``, the one lagging its scaling rate); the side of
    the bracket is ``label == target``.  The endpoints must disagree.  A
    blow-up ends the search.
    """
    if not 0 < lo < hi:
        raise InvalidBracket(f"need 0 < lo < hi, got ({lo}, {hi})")
    trace = []
    ends = []
    for s in (lo, hi):
        res, traj = probe(params, make_init(s), r_max, rtol, atol)
        trace.append((s, res))
        if not isinstance(res, SignChange):
            raise InvalidBracket(f"endpoint {s} gave {res}; move the bracket")
        ends.append(res.component == target)
    if ends[0] == ends[1]:
        raise InvalidBracket(f"both endpoints give the same outcome ({trace[0][1].component}); widen the bracket")
    res = traj = mid = None
    for _ in range(max_iter):
        mid = math.sqrt(lo * hi)
        res, traj = probe(params, make_init(mid), r_max, rtol, atol)
        trace.append((mid, res))
        label = _label(res, traj, labels)
        if label is None:
            break
        if (label == target) == ends[0]:
            lo = mid
        else:
            hi = mid
        if (hi - lo) <= rel_width * mid:
            break
    return ShootOutcome(res, mid, tuple(trace), traj)


def shoot_system_m1(
    params: ProblemParams,
    s_lo: float = 0.1,
    s_hi: float = 10.0,
    r_max: float = R_MAX,
    rtol: float = RTOL,
    atol: float = ATOL,
    max_iter: int = 60,
    rel_width: float = 1e-12,
) -> ShootOutcome:
    """Second-order system: fix ``u(0) = 1`` and bisect on ``v(0) = s``.

    The predicate is which of u, v hits zero first; the separatrix between
    the two is where a positive entire solution would sit.
    """
    if params.m != 1:
        raise UnsupportedOrder("shoot_system_m1 needs m = 1")
    return _bisect(
        lambda s: InitialData((1.0,), (s,)),
        params, s_lo, s_hi,
        ("w0", "z0"), "w0",
        r_max, rtol, atol, max_iter, rel_width,
    )


def shoot_scalar(
    params: ProblemParams,
    r_max: float = R_MAX,
    bracket: tuple[float, float] = (1e-3, 1e3),
    rtol: float = RTOL,
    atol: float = ATOL,
    max_iter: int = 60,
    rel_width: float = 1e-12,
) -> ShootOutcome:
    """Single equation ``(-Δ)^m u = |x|^a u^p``, run as the symmetric system.

    ``u(0) = 1``; for m = 2 bisect on ``(-Δu)(0)``, for m = 3 nest a bisection
    on ``(Δ²u)(0)`` inside the one on ``(-Δu)(0)``.
    """
    if params.p != params.q or params.a != params.b:
        raise InvalidParams("scalar shooting needs p = q and a = b")
    m = params.m
    if m > 3:
        raise UnsupportedOrder(f"m = {m}: only m <= 3 is supported")
    if m == 1:
        res, traj = probe(params, InitialData.scalar([1.0]), r_max, rtol, atol)
        return ShootOutcome(res, (), ((), res), traj)
    lo, hi = bracket
    if m == 2:
        return _bisect(
            lambda s: InitialData.scalar([1.0, s]),
            params, lo, hi,
            ("w0", "w1"), "w0",
            r_max, rtol, atol, max_iter, rel_width,
        )

    # m = 3: inner search on w2(0) for each w1(0), outer search on w1(0)
    inner_iter = min(max_iter, 30)
    outer_trace = []

    def inner(s1):
        try:
            out = _bisect(
                lambda s2: InitialData.scalar([1.0, s1, s2]),
                params, bracket[0], bracket[1],
                ("w0", "w1", "w2"), "w2",
                r_max, rtol, atol, inner_iter, 1e-8,
            )
        except InvalidBracket:
            # no w2 separatrix at this w1(0): the same component wins across the
            # whole inner bracket, and that component is what the outer search needs
            res, traj = probe(params, InitialData.scalar([1.0, s1, bracket[0]]), r_max, rtol, atol)
            out = ShootOutcome(res, bracket[0], ((bracket[0], res),), traj)
        outer_trace.append(((s1, out.parameter), out.result))
        return out

    ends = []
    for s1 in (lo, hi):
        out = inner(s1)
        label = _label(out.result, out.trajectory, ("w0", "w1"))
        if label is None:
            return ShootOutcome(out.result, (s1, out.parameter), tuple(outer_trace), out.trajectory)
        ends.append(label == "w0")
    if ends[0] == ends[1]:
        raise InvalidBracket("outer endpoints agree; widen the bracket")
    out = None
    for _ in range(min(max_iter, 20)):
        s1 = math.sqrt(lo * hi)
        out = inner(s1)
        label = _label(out.result, out.trajectory, ("w0", "w1"))
        if label is None:
            break
        if (label == "w0") == ends[0]:
            lo = s1
        else:
            hi = s1
        if hi - lo <= 1e-8 * s1:
            break
    return ShootOutcome(out.result, (s1, out.parameter), tuple(outer_trace), out.trajectory)
