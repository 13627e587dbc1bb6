"""Defect distributions at finite size and in the scaling limit.

A finite configuration is a strictly increasing sequence of starting columns
``0 = a_0 < a_1 < ... < a_n``.  Its scaling limit is a piecewise-linear,
non-decreasing function ``alpha`` on ``[0, 1]`` with ``alpha(i/n) ~ a_i/n``.
Segments of slope 1 are tightly packed (sawtooth) stretches; jumps are
macroscopic gaps (flat stretches of the lower boundary).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

_EDGE_TOL = 1e-12
_SLOPE_TOL = 1e-12

JUMP_THRESHOLD = 0.05


@dataclass(frozen=True)
class DefectSequence:
    """Starting columns ``a_1 < ... < a_n`` (``a_0 = 0`` is implicit)."""

    a: tuple[int, ...]

    def __post_init__(self):
        a = tuple(int(v) for v in self.a)
        object.__setattr__(self, "a", a)
        if len(a) < 1:
            raise ValueError("a defect sequence needs at least one path")
        prev = 0
        for v in a:
            if v <= prev:
                raise ValueError(f"starting points must satisfy 0 < a_1 < a_2 < ...; got {a}")
            prev = v

    @property
    def n(self) -> int:
        return len(self.a)

    @property
    def full(self) -> tuple[int, ...]:
        """``(a_0, a_1, ..., a_n)`` with the origin path included."""
        return (0,) + self.a

    def __getitem__(self, i: int) -> int:
        # 0-based access into ``full``: seq[0] is the origin, seq[i] = a_i
        return self.full[i]

    def gaps(self) -> np.ndarray:
        return np.diff(np.asarray(self.full, dtype=np.int64))


@dataclass(frozen=True)
class Segment:
    u_lo: float
    u_hi: float
    alpha_lo: float
    slope: float

    @property
    def alpha_hi(self) -> float:
        return self.alpha_lo + self.slope * (self.u_hi - self.u_lo)

    @property
    def width(self) -> float:
        return self.u_hi - self.u_lo

    def value(self, u: float) -> float:
        return self.alpha_lo + self.slope * (u - self.u_lo)


@dataclass(frozen=True)
class AlphaProfile:
    """Piecewise-linear rescaled defect profile.

    Jumps sit between segments: ``delta_k = segments[k+1].alpha_lo -
    segments[k].alpha_hi``.  At a jump the value of the profile is the left
    limit.
    """

    segments: tuple[Segment, ...]

    def __post_init__(self):
        segs = tuple(s if isinstance(s, Segment) else Segment(*map(float, s)) for s in self.segments)
        object.__setattr__(self, "segments", segs)
        if not segs:
            raise ValueError("profile needs at least one segment")
        if abs(segs[0].u_lo) > _EDGE_TOL or abs(segs[-1].u_hi - 1.0) > _EDGE_TOL:
            raise ValueError("segments must cover [0, 1]")
        if segs[0].alpha_lo < 0:
            raise ValueError("alpha(0) must be >= 0")
        for k, s in enumerate(segs):
            if s.u_hi - s.u_lo <= _EDGE_TOL:
                raise ValueError(f"segment {k} has non-positive width")
            if s.slope < 1.0 - _SLOPE_TOL:
                raise ValueError(f"segment {k} has slope {s.slope} < 1 (density above 1)")
            if k and abs(s.u_lo - segs[k - 1].u_hi) > _EDGE_TOL:
                raise ValueError(f"segments {k - 1} and {k} do not share an endpoint")
            if k and s.alpha_lo < segs[k - 1].alpha_hi - 1e-12:
                raise ValueError(f"alpha decreases at u={s.u_lo}")

    @classmethod
    def build(cls, widths: Sequence[float], slopes: Sequence[float],
              jumps: Sequence[float] | None = None, alpha0: float = 0.0) -> "AlphaProfile":
        """Chain segments of the given u-widths and slopes.

        ``jumps[k]`` is the jump between segment ``k`` and ``k+1``.
        """
        if len(widths) != len(slopes):
            raise ValueError("widths and slopes differ in length")
        jumps = list(jumps) if jumps is not None else [0.0] * (len(widths) - 1)
        if len(jumps) != len(widths) - 1:
            raise ValueError("need one jump value per interior breakpoint")
        total = float(sum(widths))
        segs = []
        u, a = 0.0, float(alpha0)
        for k, (w, s) in enumerate(zip(widths, slopes)):
            u_hi = 1.0 if k == len(widths) - 1 else u + w / total
            segs.append(Segment(u, u_hi, a, float(s)))
            a = a + s * (u_hi - u)
            if k < len(jumps):
                a += jumps[k]
            u = u_hi
        return cls(tuple(segs))

    @classmethod
    def from_dict(cls, data: dict) -> "AlphaProfile":
        if "segments" in data:
            return cls(tuple(Segment(*map(float, s)) for s in data["segments"]))
        return cls.build(data["widths"], data["slopes"], data.get("jumps"), data.get("alpha0", 0.0))

    def to_dict(self) -> dict:
        return {"segments": [[s.u_lo, s.u_hi, s.alpha_lo, s.slope] for s in self.segments]}

    @property
    def alpha_end(self) -> float:
        return self.segments[-1].alpha_hi

    def jump_after(self, k: int) -> float:
        return self.segments[k + 1].alpha_lo - self.segments[k].alpha_hi

    def image_ranges(self) -> list[tuple[float, float]]:
        return [(s.alpha_lo, s.alpha_hi) for s in self.segments]

    def in_image(self, t: float) -> bool:
        return any(lo <= t <= hi for lo, hi in self.image_ranges())

    def first_moment(self) -> float:
        """Integral of alpha over [0, 1]."""
        return sum(s.width * 0.5 * (s.alpha_lo + s.alpha_hi) for s in self.segments)

    def __call__(self, u):
        return alpha_values(self, u)


class FreezingKind(enum.Enum):
    FLAT = "flat"
    SAWTOOTH = "sawtooth"


@dataclass(frozen=True)
class FreezingInterval:
    """A gap (``FLAT``: extent is the jump delta) or a tightly packed stretch
    (``SAWTOOTH``: extent is the u-length of the slope-1 segment)."""

    kind: FreezingKind
    u1: float
    extent: float
    alpha_u1: float
    q: int | None = None
    m: int | None = None

    @property
    def t_lo(self) -> float:
        return self.alpha_u1

    @property
    def t_hi(self) -> float:
        # slope is 1 on a sawtooth, so the alpha-range has the same length
        return self.alpha_u1 + self.extent


def alpha_eval(profile: AlphaProfile, u: float) -> tuple[float, float, float]:
    """Return ``(alpha(u), left_slope, right_slope)``.

    One-sided slopes that do not exist (at ``u=0`` on the left, ``u=1`` on the
    right) are ``nan``.  At a jump the value is the left limit.
    """
    if not (-_EDGE_TOL <= u <= 1.0 + _EDGE_TOL):
        raise ValueError(f"u={u} outside [0, 1]")
    segs = profile.segments
    for k, s in enumerate(segs):
        if u < s.u_hi - _EDGE_TOL:
            if u > s.u_lo + _EDGE_TOL:
                return s.value(u), s.slope, s.slope
            # at the left edge of segment k
            if k == 0:
                return s.alpha_lo, math.nan, s.slope
            prev = segs[k - 1]
            return prev.alpha_hi, prev.slope, s.slope
    last = segs[-1]
    return last.alpha_hi, last.slope, math.nan


def alpha_values(profile: AlphaProfile, u) -> np.ndarray:
    """Vectorised alpha(u) using the left-limit convention at jumps."""
    u = np.asarray(u, dtype=float)
    out = np.empty_like(u)
    segs = profile.segments
    for k, s in enumerate(segs):
        lo = -np.inf if k == 0 else s.u_lo + _EDGE_TOL
        hi = s.u_hi + _EDGE_TOL if k < len(segs) - 1 else np.inf
        sel = (u > lo) & (u <= hi) if k else (u <= hi)
        out[sel] = s.alpha_lo + s.slope * (u[sel] - s.u_lo)
    return out


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def discretize(profile: AlphaProfile, n: int, tolerance: float = 2.0) -> DefectSequence:
    """``a_i = round(n alpha(i/n))`` followed by a left-to-right repair pass.

    Raises if the repair has to push a point more than ``tolerance`` lattice
    units away from its target.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    a = []
    prev = 0
    for i in range(1, n + 1):
        target = _round_half_up(n * alpha_eval(profile, i / n)[0])
        v = max(target, prev + 1)
        if v - target > tolerance:
            raise ValueError(
                f"profile cannot be discretised at n={n}: a_{i} pushed {v - target} units")
        a.append(v)
        prev = v
    return DefectSequence(tuple(a))


def rescale(seq: DefectSequence, jump_threshold: float = JUMP_THRESHOLD) -> AlphaProfile:
    """Piecewise-linear interpolation of ``(i/n, a_i/n)``.

    A lattice step of size ``d`` becomes a jump when its excess over the
    neighbouring step size is at least 2 lattice units and at least
    ``jump_threshold * n``; the jump is placed at the left end of the step and
    the step keeps the neighbouring slope.  The first step never becomes a
    jump, so that ``alpha(0) = 0`` always holds.
    """
    n = seq.n
    d = seq.gaps().tolist()

    def carrier(i):
        nb = [d[j] for j in (i - 1, i + 1) if 0 <= j < n]
        return min(nb) if nb else 1

    steps = []  # (slope, jump_before)
    for i, di in enumerate(d):
        c = carrier(i)
        excess = di - c
        if i > 0 and excess >= 2 and excess / n >= jump_threshold:
            steps.append((c, excess / n))
        else:
            steps.append((di, 0.0))

    segs: list[Segment] = []
    for i, (slope, jump) in enumerate(steps):
        u_lo = i / n
        u_hi = (i + 1) / n
        alpha_lo = seq[i] / n + jump
        if segs and jump == 0.0 and segs[-1].slope == slope:
            prev = segs[-1]
            segs[-1] = Segment(prev.u_lo, u_hi, prev.alpha_lo, prev.slope)
        else:
            segs.append(Segment(u_lo, u_hi, alpha_lo, float(slope)))
    segs[-1] = Segment(segs[-1].u_lo, 1.0, segs[-1].alpha_lo, segs[-1].slope)
    return AlphaProfile(tuple(segs))


def _merged_runs(profile: AlphaProfile) -> list[tuple[int, int]]:
    """Group consecutive continuous segments of equal slope: (first, last)."""
    segs = profile.segments
    runs = []
    start = 0
    for k in range(1, len(segs) + 1):
        if (k == len(segs) or abs(segs[k].slope - segs[start].slope) > _SLOPE_TOL
                or profile.jump_after(k - 1) > _EDGE_TOL):
            runs.append((start, k - 1))
            start = k
    return runs


def detect_freezing(profile: AlphaProfile) -> list[FreezingInterval]:
    """Flat intervals at the jumps of alpha and sawtooth intervals on the
    maximal slope-1 stretches, sorted by position."""
    segs = profile.segments
    if segs[0].alpha_lo > _EDGE_TOL:
        raise ValueError("a gap adjacent to the origin path is not supported")
    out = []
    for k in range(len(segs) - 1):
        delta = profile.jump_after(k)
        if delta > _EDGE_TOL:
            out.append(FreezingInterval(FreezingKind.FLAT, segs[k].u_hi, delta, segs[k].alpha_hi))
    runs = _merged_runs(profile)
    for first, last in runs:
        if abs(segs[first].slope - 1.0) > _SLOPE_TOL:
            continue
        u1 = segs[first].u_lo
        u2 = segs[last].u_hi - u1
        out.append(FreezingInterval(FreezingKind.SAWTOOTH, u1, u2, segs[first].alpha_lo))
    out.sort(key=lambda iv: (iv.u1, iv.kind.value))

    flats = [iv for iv in out if iv.kind is FreezingKind.FLAT]
    for a, b in zip(flats, flats[1:]):
        if b.u1 - a.u1 <= _EDGE_TOL:
            raise ValueError(f"adjacent jumps at u={a.u1}: zero density on both sides of a gap")
    for iv in flats:
        _, left, right = alpha_eval(profile, iv.u1)
        if abs(left - 1.0) <= _SLOPE_TOL or abs(right - 1.0) <= _SLOPE_TOL:
            raise ValueError(f"gap at u={iv.u1} is adjacent to a tightly packed stretch")
    return out


def locate_discrete(seq: DefectSequence, interval: FreezingInterval) -> FreezingInterval:
    """Find the lattice description ``(q, m)`` of a freezing interval in a
    discretised sequence.

    Flat: ``a_{q+1} - a_q = m`` is the widest gap near ``u1 n``.  Sawtooth:
    ``a_{i+1} - a_i = 1`` for ``i = q..q+m-1``, the maximal run covering the
    middle of the interval.
    """
    n = seq.n
    d = seq.gaps()
    if interval.kind is FreezingKind.FLAT:
        q0 = _round_half_up(interval.u1 * n)
        cand = [q for q in (q0 - 1, q0, q0 + 1) if 0 <= q < n]
        q = max(cand, key=lambda j: (d[j], -abs(j - q0)))
        if d[q] < 2:
            raise ValueError("no gap found near the flat interval")
        return FreezingInterval(interval.kind, interval.u1, interval.extent, interval.alpha_u1,
                                q=q, m=int(d[q]))
    mid = min(max(int((interval.u1 + interval.extent / 2) * n), 0), n - 1)
    if d[mid] != 1:
        raise ValueError("no tightly packed run found in the sawtooth interval")
    lo = mid
    while lo > 0 and d[lo - 1] == 1:
        lo -= 1
    hi = mid
    while hi + 1 < n and d[hi + 1] == 1:
        hi += 1
    return FreezingInterval(interval.kind, interval.u1, interval.extent, interval.alpha_u1,
                            q=lo, m=hi - lo + 1)


def profile_points(profile: AlphaProfile) -> Iterable[tuple[float, float]]:
    """Breakpoints ``(u, alpha)`` including both sides of each jump."""
    for s in profile.segments:
        yield s.u_lo, s.alpha_lo
        yield s.u_hi, s.alpha_hi
