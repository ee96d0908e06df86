"""Parallel (p, q) grid scans with ordered JSON-lines output, and critical-curve CSVs.

Each grid cell is classified, shot from the origin and, when the shot reaches
``R = 1``, checked against the Pohozaev identity.  Cells run independently in
a process pool; an ordered writer holds finished cells in a reorder buffer
and writes them in grid order, so the file does not depend on worker count or
completion order.
"""

from __future__ import annotations

import csv
import contextlib
import json
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import InvalidConfig, LabError, NoSolution
from .params import ProblemParams, classify, criticality_gap, hyperbola_q, parse_number
from .pohozaev import residual as pohozaev_residual
from .radial_ode import shoot_scalar, shoot_system_m1

OUT_ENV = "LIOUVILLE_LAB_OUT"
POHOZAEV_RADIUS = 1.0

CONFIG_HELP = """\
Scan config file: one `key = value` per line, `#` starts a comment.

  n, m            dimension and order (integers)               required
  a, b            weights (default 0)
  p_range         `lo, hi` for p, lo < hi                      required
  q_range         `lo, hi` for q, lo < hi                      required
  resolution      grid points per axis (>= 2); or set
  p_resolution, q_resolution separately
  r_max           shooting radius (> 1, default 1000)
  rtol, atol      integrator tolerances (default 1e-8, 1e-12)
  workers         process count (default 1)
  output          JSON-lines output path (default scan.jsonl); the
                  directory is replaced by $LIOUVILLE_LAB_OUT when set
  resume          true/false: skip cells already in the output

Output: one JSON object per line, in grid order (p index major), fields
  grid_index          [i, j] with p = p_values[i], q = q_values[j]
  params              {n, m, a, b, p, q}
  classification      Subcritical | Critical | Supercritical
  gap                 (n+a)/(p+1) + (n+b)/(q+1) - (n-2m)
  shoot               {kind: SignChange, r, component, parameter}
                      | {kind: PositiveToRmax, slope_u, slope_v, parameter}
                      | {kind: BlowUp, r, parameter}
                      | {kind: Error, error, message}
  pohozaev_residual   relative residual at R = 1 on the shot, or null
"""


@dataclass(frozen=True)
class ScanConfig:
    n: int
    m: int
    p_range: tuple[float, float]
    q_range: tuple[float, float]
    p_resolution: int = 10
    q_resolution: int = 10
    a: float = 0
    b: float = 0
    r_max: float = 1e3
    rtol: float = 1e-8
    atol: float = 1e-12
    workers: int = 1
    output: str = "scan.jsonl"
    resume: bool = False

    def __post_init__(self):
        for name in ("p_range", "q_range"):
            lo, hi = getattr(self, name)
            if not lo < hi:
                raise InvalidConfig(f"{name} = ({lo}, {hi}) is empty")
            if lo < 1:
                raise InvalidConfig(f"{name} must lie in [1, inf)")
        if self.p_resolution < 2 or self.q_resolution < 2:
            raise InvalidConfig("resolution must be >= 2 on each axis")
        if not self.r_max > 1:
            raise InvalidConfig(f"r_max = {self.r_max} must exceed 1")
        if self.rtol <= 0 or self.atol <= 0:
            raise InvalidConfig("tolerances must be positive")
        if self.workers < 1:
            raise InvalidConfig("workers must be >= 1")
        try:
            ProblemParams(self.n, self.m, self.a, self.b, 2, 2)
        except LabError as exc:
            raise InvalidConfig(str(exc)) from exc

    @classmethod
    def from_text(cls, text: str, **overrides) -> ScanConfig:
        raw = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InvalidConfig(f"line {lineno}: expected `key = value`")
            key, value = (s.strip() for s in line.split("=", 1))
            raw[key] = value
        kwargs = {}
        try:
            for key, value in raw.items():
                if key in ("n", "m", "workers", "p_resolution", "q_resolution"):
                    kwargs[key] = int(value)
                elif key == "resolution":
                    kwargs.setdefault("p_resolution", int(value))
                    kwargs.setdefault("q_resolution", int(value))
                elif key in ("a", "b"):
                    kwargs[key] = parse_number(value)
                elif key in ("p_range", "q_range"):
                    parts = [float(parse_number(x)) for x in value.split(",")]
                    if len(parts) != 2:
                        raise InvalidConfig(f"{key} needs `lo, hi`")
                    kwargs[key] = tuple(parts)
                elif key in ("r_max", "rtol", "atol"):
                    kwargs[key] = float(value)
                elif key == "output":
                    kwargs[key] = value
                elif key == "resume":
                    kwargs[key] = value.lower() in ("1", "true", "yes", "on")
                else:
                    raise InvalidConfig(f"unknown key {key!r}")
        except ValueError as exc:
            if isinstance(exc, InvalidConfig):
                raise
            raise InvalidConfig(str(exc)) from exc
        kwargs.update(overrides)
        missing = [k for k in ("n", "m", "p_range", "q_range") if k not in kwargs]
        if missing:
            raise InvalidConfig(f"missing keys: {', '.join(missing)}")
        return cls(**kwargs)

    @classmethod
    def from_file(cls, path, **overrides) -> ScanConfig:
        return cls.from_text(Path(path).read_text(), **overrides)

    @property
    def p_values(self) -> np.ndarray:
        return np.linspace(*self.p_range, self.p_resolution)

    @property
    def q_values(self) -> np.ndarray:
        return np.linspace(*self.q_range, self.q_resolution)

    @property
    def output_path(self) -> Path:
        path = Path(self.output)
        override = os.environ.get(OUT_ENV)
        return Path(override) / path.name if override else path

    def cells(self):
        for i, p in enumerate(self.p_values):
            for j, q in enumerate(self.q_values):
                yield (i, j), ProblemParams(self.n, self.m, self.a, self.b, float(p), float(q))


@dataclass(frozen=True)
class ScanRecord:
    grid_index: tuple[int, int]
    params: dict
    classification: str
    gap: float
    shoot: dict = field(default_factory=dict)
    pohozaev_residual: float | None = None

    def to_json(self) -> str:
        data = asdict(self)
        data["grid_index"] = list(self.grid_index)
        return json.dumps(data)

    @classmethod
    def from_json(cls, line: str) -> ScanRecord:
        data = json.loads(line)
        names = {f.name for f in fields(cls)}
        if set(data) != names:
            raise ValueError(f"record fields {sorted(data)} != {sorted(names)}")
        data["grid_index"] = tuple(data["grid_index"])
        return cls(**data)


def _shoot(params: ProblemParams, config: ScanConfig):
    opts = dict(r_max=config.r_max, rtol=config.rtol, atol=config.atol)
    if params.m == 1:
        return shoot_system_m1(params, rel_width=1e-10, **opts)
    return shoot_scalar(params, **opts)


def compute_cell(index: tuple[int, int], params: ProblemParams, config: ScanConfig) -> ScanRecord:
    """Classify and shoot one cell; numerical failures land in the ``shoot`` field."""
    gap = float(criticality_gap(params))
    residual = None
    try:
        outcome = _shoot(params, config)
        shoot = {**outcome.result.as_dict(), "parameter": _json_param(outcome.parameter)}
        traj = outcome.trajectory
        if traj is not None and traj.r_end >= POHOZAEV_RADIUS:
            lam = (params.n - 2 * params.m) / 2
            residual = pohozaev_residual(params, traj, POHOZAEV_RADIUS, lam).residual
    except LabError as exc:
        shoot = {"kind": "Error", "error": type(exc).__name__, "message": str(exc)}
    shoot = {k: float(v) if isinstance(v, np.floating) else v for k, v in shoot.items()}
    return ScanRecord(index, params.as_dict(), str(classify(params)), gap, shoot, residual)


def _json_param(x):
    if isinstance(x, tuple):
        return [float(v) for v in x]
    return float(x)


def _existing(path: Path) -> dict:
    records = {}
    if not path.exists():
        return records
    with path.open() as fh:
        for line in fh:
            try:
                rec = ScanRecord.from_json(line)
            except (ValueError, TypeError, KeyError):
                continue  # a truncated last line from an interrupted run
            records[rec.grid_index] = line.rstrip("\n")
    return records


def _computed(todo, config: ScanConfig):
    """Yield ``(index, record)`` in completion order."""
    if config.workers == 1 or len(todo) <= 1:
        for index, params in todo:
            yield index, compute_cell(index, params, config)
        return
    with ProcessPoolExecutor(max_workers=config.workers) as pool:
        futures = {pool.submit(compute_cell, index, params, config): index for index, params in todo}
        try:
            for fut in as_completed(futures):
                yield futures[fut], fut.result()
        except BaseException:
            for fut in futures:
                fut.cancel()
            raise


def run_scan(config: ScanConfig) -> list[ScanRecord]:
    """Run every grid cell and write the JSON-lines file in grid order.

    With ``resume`` set, cells already present in the output are reused as
    written; if none are missing the file is left untouched.
    """
    path = config.output_path
    path.parent.mkdir(parents=True, exist_ok=True)
    cells = list(config.cells())
    order = [index for index, _ in cells]
    done = _existing(path) if config.resume else {}
    todo = [(index, params) for index, params in cells if index not in done]
    if not todo:
        return [ScanRecord.from_json(done[index]) for index in order]

    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    records = []
    buffer: dict = {}
    pos = 0
    try:
        with os.fdopen(fd, "w") as out:

            def drain():
                nonlocal pos
                while pos < len(order):
                    index = order[pos]
                    if index in done:
                        line = done[index]
                    elif index in buffer:
                        line = buffer.pop(index).to_json()
                    else:
                        return
                    out.write(line + "\n")
                    out.flush()
                    records.append(ScanRecord.from_json(line))
                    pos += 1

            drain()
            for index, record in _computed(todo, config):
                buffer[index] = record
                drain()
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise
    return records


def _exact_linspace(lo, hi, num: int):
    if num == 1:
        return [lo]
    if all(isinstance(x, (int, Fraction)) for x in (lo, hi)):
        lo, hi = Fraction(lo), Fraction(hi)
        return [lo + (hi - lo) * k / (num - 1) for k in range(num)]
    return [float(x) for x in np.linspace(float(lo), float(hi), num)]


def _fmt(x) -> str:
    if isinstance(x, Fraction) and x.denominator == 1:
        return str(x.numerator)
    if isinstance(x, int):
        return str(x)
    return repr(float(x))


def curve_rows(n: int, m: int, a, b, p_range, resolution: int) -> list:
    """``(p, q)`` on the critical hyperbola, or ``(p, None)`` where it has no point."""
    if n <= 2 * m:
        raise InvalidConfig(f"the critical curve needs n > 2m (n={n}, m={m})")
    lo, hi = p_range
    if hi < lo or resolution < 1 or (resolution == 1 and lo != hi):
        raise InvalidConfig("need lo <= hi and resolution >= 1 (1 only when lo == hi)")
    rows = []
    for p in _exact_linspace(lo, hi, resolution):
        try:
            rows.append((p, hyperbola_q(n, m, a, b, p)))
        except NoSolution:
            rows.append((p, None))
    return rows


def emit_curve(n: int, m: int, a, b, p_range, resolution: int, output) -> list:
    """Write ``p,q_critical`` CSV rows; points with no q become ``#`` comment rows."""
    rows = curve_rows(n, m, a, b, p_range, resolution)
    with open(output, "w", newline="") if isinstance(output, (str, os.PathLike)) else contextlib.nullcontext(output) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["p", "q_critical"])
        for p, q in rows:
            if q is None:
                fh.write(f"# p={_fmt(p)}: no q on the critical curve\n")
            else:
                writer.writerow([_fmt(p), _fmt(q)])
    return rows

