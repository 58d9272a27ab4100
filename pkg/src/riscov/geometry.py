"""Samplers for the spatial model: BS/handset PPPs, the Poisson line
process of roads, Cox processes on the lines, and the typical line.

All samplers generate points outward from a reference (the origin, or
the foot of the perpendicular on a line) by accumulating exponential
gaps. A larger window therefore only appends points, and the points of a
1-D process are split into bands of fixed intensity so that raising the
density only adds points. Both properties are what make paired-seed
comparisons in the Monte Carlo engine meaningful.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from numba import njit

from . import rng
from .rng import TYPICAL, Stream, stream_id, uniform_pair

BAND_DENSITY = 1e-3  # points per metre carried by one band (1/km)
ANGLE_MODES = ("isotropic", "manhattan")


@dataclass(frozen=True)
class Line:
    r: float  # signed perpendicular distance from the origin, m
    theta: float  # angle with the x-axis, [0, pi)

    @property
    def normal(self):
        return np.array([-math.sin(self.theta), math.cos(self.theta)])

    @property
    def direction(self):
        return np.array([math.cos(self.theta), math.sin(self.theta)])

    def point_at(self, s):
        """Point at signed arc position ``s`` from the foot of the perpendicular."""
        s = np.asarray(s, dtype=float)
        return self.r * self.normal + s[..., None] * self.direction


@dataclass
class ScenarioRealization:
    bs_points: np.ndarray  # (n, 2)
    lines: list[Line]
    ris_points: np.ndarray  # (m, 2)
    ris_line_index: np.ndarray  # (m,), -1 for the typical line
    typical_line: Line | None
    window_radius: float
    vehicle_points: np.ndarray = field(default_factory=lambda: np.empty((0, 2)))
    vehicle_line_index: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int64))
    handset_points: np.ndarray = field(default_factory=lambda: np.empty((0, 2)))


# --- jitted kernels (shared with the Monte Carlo engine) ---------------------


@njit(cache=True)
def _disk_ppp(key0, key1, sid, trial, lam, radius, extra=0):
    """PPP on a disk, returned sorted by distance: (x, y, r)."""
    if lam <= 0.0 or radius <= 0.0:
        e = np.empty(0)
        return e, e.copy(), e.copy()
    target = math.pi * lam * radius * radius
    cap = int(target + 6.0 * math.sqrt(target) + 16.0)
    xs = np.empty(cap)
    ys = np.empty(cap)
    rs = np.empty(cap)
    acc = 0.0
    n = 0
    while True:
        u, v = uniform_pair(key0, key1, n, sid, trial, extra)
        acc += -math.log(u)
        if acc >= target:
            break
        if n == cap:
            cap *= 2
            xs2 = np.empty(cap)
            ys2 = np.empty(cap)
            rs2 = np.empty(cap)
            xs2[:n] = xs[:n]
            ys2[:n] = ys[:n]
            rs2[:n] = rs[:n]
            xs, ys, rs = xs2, ys2, rs2
        r = math.sqrt(acc / (math.pi * lam))
        phi = 2.0 * math.pi * v
        xs[n] = r * math.cos(phi)
        ys[n] = r * math.sin(phi)
        rs[n] = r
        n += 1
    return xs[:n], ys[:n], rs[:n]


@njit(cache=True)
def _angle(v, manhattan):
    if manhattan:
        return 0.0 if v < 0.5 else 0.5 * math.pi
    return math.pi * v


@njit(cache=True)
def _line_process(key0, key1, sid, trial, lam_l, radius, manhattan):
    """Lines hitting the disk, ordered by |r|: (r, theta)."""
    if lam_l <= 0.0 or radius <= 0.0:
        e = np.empty(0)
        return e, e.copy()
    target = 2.0 * lam_l * radius
    cap = int(target + 6.0 * math.sqrt(target) + 16.0)
    rs = np.empty(cap)
    ths = np.empty(cap)
    acc = 0.0
    n = 0
    while True:
        u, v = uniform_pair(key0, key1, 2 * n, sid, trial, 0)
        acc += -math.log(u)
        if acc >= target:
            break
        if n == cap:
            cap *= 2
            rs2 = np.empty(cap)
            ths2 = np.empty(cap)
            rs2[:n] = rs[:n]
            ths2[:n] = ths[:n]
            rs, ths = rs2, ths2
        w, _ = uniform_pair(key0, key1, 2 * n + 1, sid, trial, 0)
        mag = acc / (2.0 * lam_l)
        rs[n] = mag if w < 0.5 else -mag
        ths[n] = _angle(v, manhattan)
        n += 1
    return rs[:n], ths[:n]


@njit(cache=True)
def _line_points(key0, key1, tag, cls, line_id, trial, half_len, density):
    """1-D PPP on |s| < half_len: (s, band_side, index).

    The process is the union of bands of intensity BAND_DENSITY; the last
    band is thinned by a uniform mark to reach ``density``.
    """
    x = density / BAND_DENSITY
    full = int(math.floor(x))
    frac = x - full
    nbands = full + (1 if frac > 1e-12 else 0)
    if nbands == 0 or half_len <= 0.0:
        return np.empty(0), np.empty(0, np.int64), np.empty(0, np.int64)
    expect = 2.0 * density * half_len
    cap = int(expect + 6.0 * math.sqrt(expect) + 16.0)
    ss = np.empty(cap)
    bsd = np.empty(cap, np.int64)
    idx = np.empty(cap, np.int64)
    n = 0
    for b in range(nbands):
        keep = 1.0 if b < full else frac
        for side in range(2):
            sid = stream_id(tag, cls, line_id, (b << 1) | side)
            pos = 0.0
            j = 0
            while True:
                u, v = uniform_pair(key0, key1, j, sid, trial, 0)
                pos += -math.log(u) / BAND_DENSITY
                if pos >= half_len:
                    break
                if v < keep:
                    if n == cap:
                        cap *= 2
                        ss2 = np.empty(cap)
                        bsd2 = np.empty(cap, np.int64)
                        idx2 = np.empty(cap, np.int64)
                        ss2[:n] = ss[:n]
                        bsd2[:n] = bsd[:n]
                        idx2[:n] = idx[:n]
                        ss, bsd, idx = ss2, bsd2, idx2
                    ss[n] = pos if side == 0 else -pos
                    bsd[n] = (b << 1) | side
                    idx[n] = j
                    n += 1
                j += 1
    return ss[:n], bsd[:n], idx[:n]


@njit(cache=True)
def _typical_theta(key0, key1, tag, trial, manhattan):
    v, _ = uniform_pair(key0, key1, 0, stream_id(tag, TYPICAL, 0, 0), trial, 0)
    return _angle(v, manhattan)


# --- Python-facing samplers ---------------------------------------------------


def _check_mode(angle_mode):
    if angle_mode not in ANGLE_MODES:
        raise ValueError(f"angle_mode must be one of {ANGLE_MODES}")
    return angle_mode == "manhattan"


def _check_density(name, value):
    if not value >= 0:
        raise ValueError(f"{name} must be nonnegative")
    if value / BAND_DENSITY >= rng.MAX_BAND:
        raise ValueError(f"{name} above {rng.MAX_BAND} per km is not supported")


def sample_bs(lambda_bs: float, radius: float, stream: Stream, cls: int = rng.BS) -> np.ndarray:
    """PPP of intensity ``lambda_bs`` (per m^2) on the disk; rows sorted by distance."""
    if not lambda_bs >= 0:
        raise ValueError("lambda_bs must be nonnegative")
    if not radius > 0:
        raise ValueError("radius must be positive")
    k0, k1 = stream.key
    xs, ys, _ = _disk_ppp(k0, k1, stream_id(stream.tag, cls, 0, 0), stream.trial, lambda_bs, radius)
    return np.column_stack([xs, ys])


def sample_lines(lambda_l: float, radius: float, angle_mode: str, stream: Stream) -> list[Line]:
    """Poisson lines (length intensity ``lambda_l`` per m) hitting the disk."""
    manhattan = _check_mode(angle_mode)
    if not lambda_l >= 0:
        raise ValueError("lambda_l must be nonnegative")
    if not radius > 0:
        raise ValueError("radius must be positive")
    k0, k1 = stream.key
    rs, ths = _line_process(
        k0, k1, stream_id(stream.tag, rng.LINES, 0, 0), stream.trial, lambda_l, radius, manhattan
    )
    if len(rs) > rng.MAX_LINE_ID:
        raise ValueError("too many lines in the window")
    return [Line(float(r), float(t)) for r, t in zip(rs, ths)]


def sample_cox_on_lines(
    lines: list[Line], mu: float, window_radius: float, stream: Stream, cls: int = rng.RIS
):
    """Points of intensity ``mu`` (per m) on each line's chord inside the window.

    Returns ``(points, line_index)``. Line ``k`` of the input list uses
    random stream ``k + 1``; stream 0 belongs to the typical line.
    """
    _check_density("mu", mu)
    k0, k1 = stream.key
    pts, owner = [], []
    for k, line in enumerate(lines):
        half = math.sqrt(max(window_radius**2 - line.r**2, 0.0))
        s, _, _ = _line_points(k0, k1, stream.tag, cls, k + 1, stream.trial, half, mu)
        if len(s):
            pts.append(line.point_at(s))
            owner.append(np.full(len(s), k, dtype=np.int64))
    if not pts:
        return np.empty((0, 2)), np.empty(0, dtype=np.int64)
    return np.concatenate(pts), np.concatenate(owner)


def typical_line(angle_mode: str, stream: Stream) -> Line:
    """Line through the origin carrying the typical vehicle user."""
    manhattan = _check_mode(angle_mode)
    k0, k1 = stream.key
    return Line(0.0, float(_typical_theta(k0, k1, stream.tag, stream.trial, manhattan)))


def sample_typical_line_points(line: Line, mu: float, half_length: float, stream: Stream, cls=rng.RIS):
    _check_density("mu", mu)
    k0, k1 = stream.key
    s, _, _ = _line_points(k0, k1, stream.tag, cls, 0, stream.trial, half_length, mu)
    return line.point_at(s)


def sample_scenario(params, window_radius: float, stream: Stream, angle_mode="isotropic",
                    with_typical_line=False, with_users=True) -> ScenarioRealization:
    """One snapshot of every element class inside a disk, for plotting and checks."""
    lines = sample_lines(params.lambda_l, window_radius, angle_mode, stream)
    ris, ris_owner = sample_cox_on_lines(lines, params.mu, window_radius, stream)
    typ = None
    if with_typical_line:
        typ = typical_line(angle_mode, stream)
        extra = sample_typical_line_points(typ, params.mu, window_radius, stream)
        ris = np.concatenate([ris, extra])
        ris_owner = np.concatenate([ris_owner, np.full(len(extra), -1, dtype=np.int64)])
    scene = ScenarioRealization(
        bs_points=sample_bs(params.lambda_bs, window_radius, stream),
        lines=lines,
        ris_points=ris,
        ris_line_index=ris_owner,
        typical_line=typ,
        window_radius=window_radius,
    )
    if with_users:
        _check_density("nu", params.nu)
        scene.vehicle_points, scene.vehicle_line_index = sample_cox_on_lines(
            lines, params.nu, window_radius, stream, cls=rng.VEHICLE
        )
        scene.handset_points = sample_bs(params.lambda_2, window_radius, stream, cls=rng.HANDSET)
    return scene


def write_scene(scene: ScenarioRealization, out_dir) -> list[Path]:
    """Dump one CSV per element class into ``out_dir``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    def points(name, kind, pts, owner=None):
        path = out_dir / f"{name}.csv"
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["kind", "x_m", "y_m", "line_index"])
            for i, (x, y) in enumerate(pts):
                w.writerow([kind, repr(float(x)), repr(float(y)), "" if owner is None else int(owner[i])])
        written.append(path)

    points("bs", "bs", scene.bs_points)
    points("ris", "ris", scene.ris_points, scene.ris_line_index)
    points("vehicles", "vehicle", scene.vehicle_points, scene.vehicle_line_index)
    points("handsets", "handset", scene.handset_points)

    path = out_dir / "lines.csv"
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["kind", "r_m", "theta_rad"])
        for line in scene.lines:
            w.writerow(["line", repr(line.r), repr(line.theta)])
        if scene.typical_line is not None:
            w.writerow(["typical_line", repr(scene.typical_line.r), repr(scene.typical_line.theta)])
    written.append(path)
    return written
