"""Scaling-limit objects of the tangent method.

Everything is closed form over the piecewise-linear profile: a segment of
slope ``s`` with alpha-range ``[lo, hi]`` contributes
``(1/s) log|(t - lo)/(t - hi)|`` to ``I(t)``, which is already the principal
value when ``lo < t < hi``.  The tangent line with intercept ``t`` is
``x(t) Y + (1 - x(t)) (X - t) = 0``, and the arctic curve is its envelope.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np
from scipy.optimize import brentq

from .combinatorics import PortionKind
from .profile import AlphaProfile, FreezingInterval, FreezingKind, detect_freezing

OUTER = "outer"
Kind = Union[PortionKind, str]

ENDPOINT_MARGIN = 1e-6
TAU_MAX = 1.0 - 1e-4
_HIT_TOL = 1e-13


class SingularPoint(ValueError):
    """``t`` sits on a breakpoint of the profile where ``I`` has a log singularity."""

    limit = math.nan

    def __init__(self, t: float, msg: str = ""):
        super().__init__(msg or f"I(t) is singular at t={t}")
        self.t = t


class DivergesToMinusInfinity(SingularPoint):
    limit = -math.inf


class DivergesToPlusInfinity(SingularPoint):
    limit = math.inf


class NotDefined(SingularPoint):
    """Closed endpoint of a gap: the one-sided limits of ``I`` are infinite."""


# --- I(t) and x(t) ----------------------------------------------------------

def _segment_arrays(profile: AlphaProfile):
    segs = profile.segments
    lo = np.array([s.alpha_lo for s in segs])
    hi = np.array([s.alpha_hi for s in segs])
    inv_s = np.array([1.0 / s.slope for s in segs])
    width = np.array([s.width for s in segs])
    return lo, hi, inv_s, width


def _breakpoints(profile: AlphaProfile) -> dict[float, float]:
    """Map each alpha-endpoint value to its log coefficient ``kappa``."""
    kappa: dict[float, float] = {}
    for s in profile.segments:
        kappa[s.alpha_lo] = kappa.get(s.alpha_lo, 0.0) + 1.0 / s.slope
        kappa[s.alpha_hi] = kappa.get(s.alpha_hi, 0.0) - 1.0 / s.slope
    return kappa


def _gap_ends(profile: AlphaProfile) -> set[float]:
    ends = set()
    for iv in detect_freezing(profile):
        if iv.kind is FreezingKind.FLAT:
            ends.update((iv.t_lo, iv.t_hi))
    return ends


def check_regular(profile: AlphaProfile, t: float) -> None:
    """Raise the appropriate :class:`SingularPoint` if ``I`` blows up at ``t``."""
    for v, kappa in _breakpoints(profile).items():
        if abs(t - v) > _HIT_TOL * max(1.0, abs(v)) or abs(kappa) < 1e-12:
            continue
        if v in _gap_ends(profile):
            err = NotDefined(t, f"t={t} is a closed endpoint of a gap")
            err.limit = -math.copysign(math.inf, kappa)
            raise err
        if kappa > 0:
            raise DivergesToMinusInfinity(t)
        raise DivergesToPlusInfinity(t)


def _I_core(profile: AlphaProfile, t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    lo, hi, inv_s, _ = _segment_arrays(profile)
    tt = t[..., None]
    d_lo = tt - lo
    d_hi = tt - hi
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = d_lo / d_hi
        outside = ratio > 0
        # log1p form keeps precision far away from the segment
        term = np.where(outside, np.log1p(np.where(outside, (hi - lo) / d_hi, 0.0)),
                        np.log(np.abs(d_lo)) - np.log(np.abs(d_hi)))
        # removable breakpoints (kappa = 0): drop the colliding logs
        term = np.where(d_lo == 0, -np.log(np.abs(d_hi)), term)
        term = np.where(d_hi == 0, np.log(np.abs(d_lo)), term)
    return (inv_s * term).sum(axis=-1)


def _dI_core(profile: AlphaProfile, t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    lo, hi, _, width = _segment_arrays(profile)
    tt = t[..., None]
    with np.errstate(divide="ignore", invalid="ignore"):
        prod = (tt - lo) * (tt - hi)
        term = np.where(prod == 0, 0.0, -width / prod)
    return term.sum(axis=-1)


def _sign(profile: AlphaProfile, t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    lo, hi, _, _ = _segment_arrays(profile)
    tt = t[..., None]
    inside = ((tt >= lo) & (tt <= hi)).any(axis=-1)
    return np.where(inside, -1.0, 1.0)


def integral_I(profile: AlphaProfile, t: float) -> float:
    check_regular(profile, t)
    return float(_I_core(profile, t))


def dI_dt(profile: AlphaProfile, t: float) -> float:
    check_regular(profile, t)
    return float(_dI_core(profile, t))


def x_of_t(profile: AlphaProfile, t: float) -> float:
    """``exp(-I)`` off the image of alpha, ``-exp(-I)`` on it."""
    check_regular(profile, t)
    return float(_sign(profile, t) * np.exp(-_I_core(profile, t)))


def dx_dt(profile: AlphaProfile, t: float) -> float:
    check_regular(profile, t)
    x = _sign(profile, t) * np.exp(-_I_core(profile, t))
    return float(-x * _dI_core(profile, t))


def x_and_derivative(profile: AlphaProfile, t) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised ``(x, x')`` with no singularity checks."""
    x = _sign(profile, t) * np.exp(-_I_core(profile, t))
    return x, -x * _dI_core(profile, t)


# --- portions ---------------------------------------------------------------

def _root_bracket(f, lo: float, hi: float) -> tuple[float, float]:
    """Shrink toward the open ends until ``f`` has the expected signs
    (positive near ``lo``, negative near ``hi``)."""
    width = hi - lo
    eps = 1e-3
    while True:
        a, b = lo + eps * width, hi - eps * width
        if f(a) > 0 and f(b) < 0:
            return a, b
        eps *= 1e-2
        if eps < 1e-300:
            raise RuntimeError("could not bracket the root")


def find_t1(profile: AlphaProfile, interval: FreezingInterval) -> float:
    """Root of ``I(t) = 0`` strictly inside the gap (``x(t1) = 1``)."""
    if interval.kind is not FreezingKind.FLAT:
        raise ValueError("t1 is defined for flat intervals only")

    def f(t):
        return float(_I_core(profile, t))

    a, b = _root_bracket(f, interval.t_lo, interval.t_hi)
    return brentq(f, a, b, xtol=1e-13, rtol=4 * np.finfo(float).eps, maxiter=500)


def portion_range(profile: AlphaProfile, interval: FreezingInterval,
                  kind: PortionKind) -> tuple[float, float]:
    if kind is PortionKind.R:
        if interval.kind is not FreezingKind.SAWTOOTH:
            raise ValueError("R portions live above sawtooth intervals")
        return interval.t_lo, interval.t_hi
    if interval.kind is not FreezingKind.FLAT:
        raise ValueError("F and U portions live above flat intervals")
    t1 = find_t1(profile, interval)
    return (interval.t_lo, t1) if kind is PortionKind.F else (t1, interval.t_hi)


def interval_for(profile: AlphaProfile, t: float, kind: PortionKind) -> FreezingInterval:
    want = FreezingKind.SAWTOOTH if kind is PortionKind.R else FreezingKind.FLAT
    for iv in detect_freezing(profile):
        if iv.kind is want and iv.t_lo <= t <= iv.t_hi:
            return iv
    raise ValueError(f"t={t} is not above a {want.value} interval")


def _in_range(t: float, lo: float, hi: float) -> bool:
    tol = 1e-12 * max(1.0, abs(lo), abs(hi))
    return lo - tol <= t <= hi + tol


def z_of_t(profile: AlphaProfile, t: float, kind: PortionKind,
           interval: FreezingInterval | None = None) -> float:
    """Depth of the displaced starting point whose tangent has intercept ``t``."""
    iv = interval or interval_for(profile, t, kind)
    lo, hi = portion_range(profile, iv, kind)
    if not _in_range(t, lo, hi):
        raise ValueError(f"t={t} outside the {kind.value}-portion range [{lo}, {hi}]")
    x = x_of_t(profile, t)
    if kind is PortionKind.F:
        return (iv.t_hi - t) * (1 - x) / x
    if kind is PortionKind.U:
        return (t - iv.t_lo) * (x - 1)
    return (iv.t_hi - t) * (1 - x)


@dataclass(frozen=True)
class TangentLine:
    t: float
    x_t: float
    z: float
    kind: Kind

    @property
    def slope(self) -> float:
        # dY/dX of x Y + (1 - x)(X - t) = 0
        return -(1.0 - self.x_t) / self.x_t

    def residual(self, X: float, Y: float) -> float:
        return self.x_t * Y + (1.0 - self.x_t) * (X - self.t)

    def anchor(self, profile: AlphaProfile, interval: FreezingInterval | None = None
               ) -> tuple[float, float]:
        """The displaced starting point the line passes through, at depth ``-z``."""
        if self.kind == OUTER:
            return self.t + self.z * self.x_t / (1.0 - self.x_t), -self.z
        iv = interval or interval_for(profile, self.t, self.kind)
        if self.kind is PortionKind.F:
            return iv.t_hi, -self.z
        if self.kind is PortionKind.U:
            return iv.t_lo - self.z, -self.z
        return iv.t_hi - self.z, -self.z


def is_outer(profile: AlphaProfile, t: float) -> bool:
    return t < profile.segments[0].alpha_lo or t > profile.alpha_end


def tangent_line(profile: AlphaProfile, t: float, kind: Kind,
                 interval: FreezingInterval | None = None, depth: float = 1.0) -> TangentLine:
    """Member of the tangent family.  Outer lines get the fixed ``depth``."""
    if kind == OUTER:
        if not is_outer(profile, t):
            raise ValueError(f"t={t} is not in an outer range")
        return TangentLine(t, x_of_t(profile, t), float(depth), OUTER)
    return TangentLine(t, x_of_t(profile, t), z_of_t(profile, t, kind, interval), kind)


# --- the curve --------------------------------------------------------------

@dataclass(frozen=True)
class CurvePoint:
    t: float
    X: float
    Y: float
    x_t: float
    dx_dt: float
    portion: str = ""


def _generic_ranges(profile: AlphaProfile) -> list[tuple[float, float]]:
    return [(s.alpha_lo, s.alpha_hi) for s in profile.segments if abs(s.slope - 1.0) > 1e-12]


def on_curve(profile: AlphaProfile, t: float) -> bool:
    """True if the tangent with intercept ``t`` touches the physical curve:
    outer ranges, gaps and sawtooth images, but not the image of a stretch
    of intermediate density."""
    return not any(lo < t < hi for lo, hi in _generic_ranges(profile))


def _point(t, x, dx, label="") -> CurvePoint:
    X = t - x * (1.0 - x) / dx
    Y = (1.0 - x) ** 2 / dx
    return CurvePoint(float(t), float(X), float(Y), float(x), float(dx), label)


def curve_point(profile: AlphaProfile, t: float) -> CurvePoint:
    """Envelope point ``X = t - x(1-x)/x'``, ``Y = (1-x)^2/x'``."""
    check_regular(profile, t)
    if not on_curve(profile, t):
        raise ValueError(f"t={t} lies in the image of a stretch of intermediate density")
    x, dx = x_and_derivative(profile, t)
    if dx == 0:
        raise ValueError(f"x'(t)=0 at t={t}: degenerate envelope")
    return _point(t, x, dx, _label(profile, t))


def _label(profile: AlphaProfile, t: float) -> str:
    if is_outer(profile, t):
        return OUTER
    for iv in detect_freezing(profile):
        if iv.t_lo <= t <= iv.t_hi:
            if iv.kind is FreezingKind.SAWTOOTH:
                return PortionKind.R.value
            return PortionKind.F.value if t <= find_t1(profile, iv) else PortionKind.U.value
    return ""


def spaced(lo: float, hi: float, k: int, margin: float = ENDPOINT_MARGIN,
           keep_lo: bool = False, keep_hi: bool = False) -> np.ndarray:
    """``k`` points clustered toward both ends (cosine spacing), kept
    ``margin * (hi - lo)`` away from any end that is not kept."""
    s = 0.5 * (1.0 - np.cos(np.pi * np.linspace(0.0, 1.0, k)))
    a = 0.0 if keep_lo else margin
    b = 1.0 if keep_hi else 1.0 - margin
    return lo + (hi - lo) * (a + (b - a) * s)


@dataclass
class Portion:
    label: str
    interval: FreezingInterval | None
    points: list[CurvePoint]

    def xy(self) -> np.ndarray:
        return np.array([(p.X, p.Y) for p in self.points])


def _portion(profile, label, ts, interval=None) -> Portion:
    x, dx = x_and_derivative(profile, ts)
    pts = [_point(t, xi, di, label) for t, xi, di in zip(ts, x, dx)]
    return Portion(label, interval, pts)


def curve_portions(profile: AlphaProfile, samples: int = 200,
                   margin: float = ENDPOINT_MARGIN) -> list[Portion]:
    """Sampled portions in increasing ``t``: outer-left, the freezing
    portions, outer-right."""
    out = []
    tau = spaced(0.0, TAU_MAX, samples, margin, keep_lo=False, keep_hi=True)
    a0 = profile.segments[0].alpha_lo
    left = a0 - tau / (1.0 - tau)
    out.append(_portion(profile, OUTER, left[::-1]))
    for iv in detect_freezing(profile):
        if iv.kind is FreezingKind.FLAT:
            t1 = find_t1(profile, iv)
            tf = spaced(iv.t_lo, t1, samples, margin, keep_hi=True)
            tu = spaced(t1, iv.t_hi, samples, margin, keep_lo=True)
            tf[-1] = tu[0] = t1
            out.append(_portion(profile, PortionKind.F.value, tf, iv))
            out.append(_portion(profile, PortionKind.U.value, tu, iv))
        else:
            ts = spaced(iv.t_lo, iv.t_hi, samples, margin)
            out.append(_portion(profile, PortionKind.R.value, ts, iv))
    right = profile.alpha_end + tau / (1.0 - tau)
    out.append(_portion(profile, OUTER, right))
    return out


def full_curve(profile: AlphaProfile, samples: int = 200,
               margin: float = ENDPOINT_MARGIN) -> list[CurvePoint]:
    pts: list[CurvePoint] = []
    for p in curve_portions(profile, samples, margin):
        pts.extend(p.points)
    return pts


def frozen_regions(profile: AlphaProfile, samples: int = 400) -> list[tuple[str, np.ndarray]]:
    """Closed polygons ``(label, vertices)`` bounded by a freezing portion and
    the segment of the lower boundary under it."""
    out = []
    for p in curve_portions(profile, samples):
        if p.label == OUTER:
            continue
        xy = p.xy()
        out.append((p.label, np.vstack([xy, [xy[-1, 0], 0.0], [xy[0, 0], 0.0]])))
    return out


CSV_COLUMNS = ("t", "X", "Y", "x_t", "dx_dt", "portion")


def curve_csv(points: Iterable[CurvePoint]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for p in points:
        w.writerow([f"{p.t:.12g}", f"{p.X:.12g}", f"{p.Y:.12g}", f"{p.x_t:.12g}",
                    f"{p.dx_dt:.12g}", p.portion])
    return buf.getvalue()
