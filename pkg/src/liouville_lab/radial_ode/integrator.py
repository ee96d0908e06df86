"""Adaptive integration of the radial system with sign-change and blow-up events."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.integrate import DOP853

from ..errors import OutOfDomain, StepUnderflow
from ..params import ProblemParams
from .state import (
    InitialData,
    RadialField,
    RadialState,
    component_index,
    component_labels,
    series_start,
    state_size,
)

R0 = 1e-3
RTOL = 1e-10
ATOL = 1e-12
R_MAX = 1e4
BLOWUP = 1e12
STEP_FLOOR = 1e-14
BISECT_RTOL = 1e-10


@dataclass(frozen=True)
class SignChange:
    r: float
    component: str

    kind = "SignChange"

    def as_dict(self):
        return {"kind": self.kind, "r": self.r, "component": self.component}


@dataclass(frozen=True)
class BlowUp:
    r: float

    kind = "BlowUp"

    def as_dict(self):
        return {"kind": self.kind, "r": self.r}


@dataclass(frozen=True)
class PositiveToRmax:
    slope_u: float
    slope_v: float

    kind = "PositiveToRmax"

    def as_dict(self):
        return {"kind": self.kind, "slope_u": self.slope_u, "slope_v": self.slope_v}


ShootResult = SignChange | PositiveToRmax | BlowUp


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Checkpointed solution plus the per-step dense interpolants.

    ``r``/``y`` hold every accepted step endpoint merged with geometric
    checkpoints ``r0 10^{k/8}``; ``is_step`` marks the former.  ``segments``
    are ``(r_lo, r_hi, interpolant)`` triples covering ``[r[0], r[-1]]``.
    """

    params: ProblemParams
    r: np.ndarray
    y: np.ndarray
    is_step: np.ndarray
    events: tuple = ()
    segments: tuple = field(default=(), repr=False)

    def __post_init__(self):
        for arr in (self.r, self.y, self.is_step):
            arr.setflags(write=False)

    @property
    def m(self) -> int:
        return self.params.m

    @property
    def r_start(self) -> float:
        return float(self.r[0])

    @property
    def r_end(self) -> float:
        return float(self.r[-1])

    def __len__(self):
        return len(self.r)

    def column(self, label: str) -> np.ndarray:
        """Checkpoint values of ``w<i>``, ``wp<i>``, ``z<i>``, ``zp<i>`` or an accumulator."""
        m = self.m
        acc = {"Qa": 4 * m, "Qb": 4 * m + 1, "Pa": 4 * m + 2, "Pb": 4 * m + 3}
        if label in acc:
            return self.y[:, acc[label]]
        offsets = {"wp": m, "zp": 3 * m, "w": 0, "z": 2 * m}
        for prefix in ("wp", "zp", "w", "z"):
            if label.startswith(prefix) and label[len(prefix) :].isdigit():
                i = int(label[len(prefix) :])
                if i < m:
                    return self.y[:, offsets[prefix] + i]
        raise KeyError(label)

    @property
    def u(self) -> np.ndarray:
        return self.y[:, 0]

    @property
    def v(self) -> np.ndarray:
        return self.y[:, 2 * self.m]

    def state(self, idx: int) -> RadialState:
        return RadialState.from_vector(self.r[idx], self.y[idx], self.m)

    def states(self):
        for idx in range(len(self.r)):
            yield self.state(idx)

    def vector_at(self, r: float) -> np.ndarray:
        if not self.r_start <= r <= self.r_end:
            raise OutOfDomain(f"r={r} outside [{self.r_start}, {self.r_end}]")
        idx = np.searchsorted(self.r, r)
        if idx < len(self.r) and self.r[idx] == r:
            return self.y[idx].copy()
        if not self.segments:
            raise OutOfDomain(f"no interpolant stored; r={r} is not a checkpoint")
        lows = [seg[0] for seg in self.segments]
        j = max(int(np.searchsorted(lows, r, side="right")) - 1, 0)
        return np.asarray(self.segments[j][2](r), dtype=float)

    def state_at(self, r: float) -> RadialState:
        """State at any radius in the domain, from the stepper's own interpolant."""
        return RadialState.from_vector(r, self.vector_at(r), self.m)

    def positive_prefix(self) -> int:
        """Number of leading checkpoints where every ``w_i``, ``z_i`` is positive."""
        vals = self.y[:, component_index(self.m)]
        bad = np.any(vals <= 0, axis=1)
        return int(np.argmax(bad)) if bad.any() else len(self.r)


class _TruncatedInterpolant:
    """A step interpolant restricted to the part of the step that was kept."""

    def __init__(self, dense, r_hi, y_hi):
        self.dense, self.r_hi, self.y_hi = dense, r_hi, y_hi

    def __call__(self, r):
        return self.y_hi.copy() if r >= self.r_hi else self.dense(r)


def _bisect_crossing(dense, lo: float, hi: float, is_bad) -> float:
    while hi - lo > BISECT_RTOL * hi:
        mid = 0.5 * (lo + hi)
        if is_bad(dense(mid)):
            hi = mid
        else:
            lo = mid
    return float(hi)


def _checkpoint_value(fun, r_from: float, y_from: np.ndarray, r_to: float, rtol: float, atol: float) -> np.ndarray:
    """State at ``r_to`` by a fresh integration from the enclosing step's start.

    DOP853's dense output is not error-controlled, and near the origin, where
    steps run to several times r, it can miss a component by far more than the
    tolerance.
    """
    solver = DOP853(fun, r_from, y_from, r_to, rtol=rtol, atol=atol)
    while solver.status == "running":
        solver.step()
    if solver.status == "failed":
        raise StepUnderflow(f"checkpoint integration failed at r={solver.t}")
    return solver.y.copy()


def integrate(
    params: ProblemParams,
    init: InitialData,
    r_max: float = R_MAX,
    rtol: float = RTOL,
    atol: float = ATOL,
    *,
    r0: float = R0,
    stop_on_sign_change: bool = False,
    checkpoints_per_decade: int = 8,
) -> Trajectory:
    """Integrate from the series start at ``r0`` out to ``r_max``.

    Stepping is Dormand–Prince 8(5,3) with its 7th-order dense output.  The
    run stops early at the first sign change when ``stop_on_sign_change`` is
    set, or when ``u`` or ``v`` would go negative under a non-integer power.
    A solution component above ``1e12`` in magnitude records a BlowUp event
    and ends the run.
    """
    if not r_max > r0:
        raise ValueError(f"r_max={r_max} must exceed r0={r0}")
    if rtol <= 0 or atol <= 0:
        raise ValueError("tolerances must be positive")
    m = params.m
    fun = RadialField(params, extend=True)
    start = series_start(params, init, r0)
    y0 = start.as_vector()
    comps = component_index(m)
    needs_positive = np.array([0, 2 * m]) if not (fun.p_int and fun.q_int) else None

    def crossed(y):
        if stop_on_sign_change and np.any(y[comps] <= 0):
            return True
        return needs_positive is not None and np.any(y[needs_positive] < 0)

    step_r, step_y, segments = [r0], [y0], []
    events: list = []
    if crossed(y0):
        events.append(SignChange(r0, _first_bad_label(y0, m)))
    else:
        solver = DOP853(fun, r0, y0, r_max, rtol=rtol, atol=atol)
        while solver.status == "running":
            message = solver.step()
            if solver.status == "failed":
                raise StepUnderflow(f"stepper failed at r={solver.t}: {message}")
            r_old, r_new = solver.t_old, solver.t
            if r_new < r_max and (r_new - r_old) < STEP_FLOOR * r_new:
                raise StepUnderflow(f"step {r_new - r_old:g} below floor at r={r_new}")
            dense = solver.dense_output()
            y_new = solver.y.copy()
            if crossed(y_new):
                r_hit = _bisect_crossing(dense, r_old, r_new, crossed)
                y_hit = np.asarray(dense(r_hit), dtype=float)
                segments.append((r_old, r_hit, _TruncatedInterpolant(dense, r_hit, y_hit)))
                step_r.append(r_hit)
                step_y.append(y_hit)
                events.append(SignChange(r_hit, _first_bad_label(y_hit, m)))
                break
            segments.append((r_old, r_new, dense))
            step_r.append(r_new)
            step_y.append(y_new)
            if np.max(np.abs(y_new[: 4 * m])) > BLOWUP:
                events.append(BlowUp(float(r_new)))
                break

    r_end = step_r[-1]
    k_max = int(math.floor(checkpoints_per_decade * math.log10(r_end / r0) + 1e-9))
    geo = r0 * 10.0 ** (np.arange(1, k_max + 1) / checkpoints_per_decade)
    geo = geo[(geo < r_end) & ~np.isin(geo, step_r)]
    lows = np.array(step_r[:-1])
    geo_y = []
    for rc in geo:
        j = max(int(np.searchsorted(lows, rc, side="right")) - 1, 0)
        geo_y.append(_checkpoint_value(fun, step_r[j], step_y[j], rc, rtol, atol))

    r_all = np.concatenate([np.array(step_r), geo])
    y_all = np.vstack([np.array(step_y)] + ([np.array(geo_y)] if geo_y else [])).reshape(-1, state_size(m))
    is_step = np.concatenate([np.ones(len(step_r), bool), np.zeros(len(geo), bool)])
    order = np.argsort(r_all, kind="stable")
    traj = Trajectory(params, r_all[order], y_all[order], is_step[order], (), tuple(segments))

    if not any(isinstance(ev, SignChange) for ev in events):
        found = detect_sign_change(traj)
        if found is not None:
            events.insert(0, found)
    return replace(traj, events=tuple(events))


def _first_bad_label(y: np.ndarray, m: int) -> str:
    vals = y[component_index(m)]
    return component_labels(m)[int(np.argmin(vals))]


def detect_sign_change(trajectory: Trajectory) -> SignChange | None:
    """First radius where some ``w_i`` or ``z_i`` is ``<= 0``.

    The crossing is refined by bisection on the interpolant of the bracketing
    checkpoint interval to relative width 1e-10.  A trajectory that starts at
    zero reports a degenerate crossing at its first radius.
    """
    m = trajectory.m
    comps = component_index(m)
    j = trajectory.positive_prefix()
    if j == len(trajectory.r):
        return None
    if j == 0 or not trajectory.segments:
        r = float(trajectory.r[j])
        return SignChange(r, _first_bad_label(trajectory.y[j], m))
    lo, hi = float(trajectory.r[j - 1]), float(trajectory.r[j])
    r_hit = _bisect_crossing(trajectory.vector_at, lo, hi, lambda y: bool(np.any(y[comps] <= 0)))
    return SignChange(r_hit, _first_bad_label(trajectory.vector_at(r_hit), m))


def rk4_reference(params: ProblemParams, init: InitialData, r_max: float, h: float, r0: float = R0):
    """Fixed-step classical RK4 from the same series start; cross-check only.

    Returns ``(r, y)`` arrays.  No events and no error control.
    """
    fun = RadialField(params, extend=True)
    y = series_start(params, init, r0).as_vector()
    steps = int(math.ceil((r_max - r0) / h))
    h = (r_max - r0) / steps
    rs = r0 + h * np.arange(steps + 1)
    out = np.empty((steps + 1, len(y)))
    out[0] = y
    for k in range(steps):
        r = rs[k]
        k1 = fun(r, y)
        k2 = fun(r + h / 2, y + h / 2 * k1)
        k3 = fun(r + h / 2, y + h / 2 * k2)
        k4 = fun(r + h, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        out[k + 1] = y
    return rs, out
