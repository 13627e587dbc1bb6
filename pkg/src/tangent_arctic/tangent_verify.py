"""Finite-size check of the tangent method.

A path started at depth ``r`` below the boundary enters the domain at a
point ``ell`` along a freezing interval with weight ``Y_{r,ell} H_ell``.  For
``n -> oo`` with ``r = z n`` and ``ell = xi n`` the weight behaves like
``exp(n (S0 + S1))`` and the maximiser ``xi*`` is the one read off from the
depth function ``z(t)`` of :mod:`tangent_arctic.arctic`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import brentq

from . import arctic
from .combinatorics import (PortionKind, h_flat, h_sawtooth, log_h_flat_all,
                            log_h_sawtooth_all, log_y_count, y_count)
from .profile import (AlphaProfile, DefectSequence, FreezingInterval, FreezingKind,
                      detect_freezing, discretize, locate_discrete, rescale)


def _xlogx(v: float) -> float:
    return 0.0 if v == 0 else v * math.log(v)


def action_S0(kind: PortionKind, z: float, xi: float, extent: float) -> float:
    """Rate of the strip count: ``log Y_{r,ell} ~ n S0``."""
    if z < 0 or xi < 0:
        raise ValueError("z and xi must be non-negative")
    if kind is PortionKind.F:
        d = extent - xi
        if d < 0:
            raise ValueError("xi beyond the end of the gap")
        return _xlogx(d + z) - _xlogx(d) - _xlogx(z)
    if kind is PortionKind.U:
        return _xlogx(z + xi) - _xlogx(xi) - _xlogx(z)
    if kind is PortionKind.R:
        k = z + xi - extent
        if k < -1e-15 or xi > extent:
            raise ValueError("R-kind needs extent - z <= xi <= extent")
        return _xlogx(z) - _xlogx(max(k, 0.0)) - _xlogx(extent - xi)
    raise TypeError(kind)


def _F(w: np.ndarray) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(w == 0, 0.0, w * np.log(np.abs(w)) - w)


def _pieces(profile: AlphaProfile, u_lo: float, u_hi: float):
    """Segments of alpha restricted to ``[u_lo, u_hi]``: ``(alpha_a, alpha_b, slope)``."""
    out = []
    for s in profile.segments:
        a, b = max(u_lo, s.u_lo), min(u_hi, s.u_hi)
        if b > a:
            out.append((s.value(a), s.value(b), s.slope))
    return out


def log_integral(profile: AlphaProfile, c: float, u_lo: float = 0.0, u_hi: float = 1.0) -> float:
    """``int log|alpha(u) - c| du`` over ``[u_lo, u_hi]``."""
    return float(sum((_F(b - c) - _F(a - c)) / s for a, b, s in _pieces(profile, u_lo, u_hi)))


def cauchy_double_integral(profile: AlphaProfile, u_range, v_range) -> float:
    """``int int du dv / (alpha(u) - alpha(v))`` over a product of ranges,
    with ``alpha(u) >= alpha(v)`` throughout."""
    total = 0.0
    for pa, pb, su in _pieces(profile, *u_range):
        for ra, rb, sv in _pieces(profile, *v_range):
            total += float(_F(pb - ra) - _F(pa - ra) - _F(pb - rb) + _F(pa - rb)) / (su * sv)
    return total


def action_S1(profile: AlphaProfile, kind: PortionKind, xi: float,
              interval: FreezingInterval) -> float:
    """Rate of the one-point function: ``log H_ell ~ n S1``."""
    if not 0 <= xi <= interval.extent + 1e-15:
        raise ValueError(f"xi={xi} outside [0, {interval.extent}]")
    if kind in (PortionKind.F, PortionKind.U):
        if interval.kind is not FreezingKind.FLAT:
            raise ValueError("F/U actions need a flat interval")
        A = interval.t_hi
        return log_integral(profile, interval.alpha_u1 + xi) - log_integral(profile, A)
    if interval.kind is not FreezingKind.SAWTOOTH:
        raise ValueError("R action needs a sawtooth interval")
    w = interval.u1 + xi
    B = interval.u1 + interval.extent
    return (cauchy_double_integral(profile, (w, B), (0.0, w))
            - cauchy_double_integral(profile, (B, 1.0), (w, B)))


@dataclass
class EntryPointResult:
    n: int
    r: int
    q: int
    m: int
    kind: PortionKind
    ell_star: int
    ells: np.ndarray
    log_weights: np.ndarray
    xi_star_pred: float
    z: float
    tie: bool = False
    tied_ells: tuple[int, ...] = field(default_factory=tuple)


def _admissible(kind: PortionKind, m: int, r: int) -> np.ndarray:
    if kind is PortionKind.R:
        return np.arange(max(0, m - r), m + 1)
    return np.arange(1, m + 1)


def log_weights(seq: DefectSequence, q: int, m: int, r: int,
                kind: PortionKind) -> tuple[np.ndarray, np.ndarray]:
    """Float ``log Y + log H`` over the admissible ``ell``."""
    if r < 1:
        raise ValueError("r must be >= 1")
    ells = _admissible(kind, m, r)
    if kind is PortionKind.R:
        all_ells, logh = log_h_sawtooth_all(seq, q, m)
    else:
        if seq[q + 1] - seq[q] != m:
            raise ValueError(f"a_(q+1) - a_q != m = {m}")
        all_ells, logh = log_h_flat_all(seq, q)
    logh = logh[np.searchsorted(all_ells, ells)]
    return ells, log_y_count(kind, r, ells, m) + logh


def exact_weight(seq: DefectSequence, q: int, m: int, r: int, kind: PortionKind,
                 ell: int) -> Fraction:
    y = y_count(kind, r, ell, m)
    h = h_sawtooth(seq, q, m, ell) if kind is PortionKind.R else h_flat(seq, q, ell)
    return y * h.fraction


def _match_interval(profile: AlphaProfile, seq: DefectSequence, q: int,
                    kind: PortionKind) -> FreezingInterval:
    want = FreezingKind.SAWTOOTH if kind is PortionKind.R else FreezingKind.FLAT
    cands = [iv for iv in detect_freezing(profile) if iv.kind is want]
    if not cands:
        raise ValueError(f"profile has no {want.value} interval")
    return min(cands, key=lambda iv: abs(iv.u1 - q / seq.n))


def finite_size_argmax(seq: DefectSequence, q: int, m: int, r: int, kind: PortionKind,
                       profile: AlphaProfile | None = None,
                       interval: FreezingInterval | None = None) -> EntryPointResult:
    """Most likely entry point of the displaced path.

    Near-ties in floating point are re-examined with exact rationals; exact
    ties are broken toward the smaller ``ell`` and flagged.  ``xi_star_pred``
    is NaN when the rescaled profile has no interval of the needed kind,
    which happens for very small sequences.
    """
    ells, lw = log_weights(seq, q, m, r, kind)
    best = lw.max()
    close = ells[lw >= best - 1e-9 * max(1.0, abs(best))]
    tied: tuple[int, ...] = ()
    if len(close) == 1:
        ell_star = int(close[0])
    else:
        exact = {int(e): exact_weight(seq, q, m, r, kind, int(e)) for e in close}
        top = max(exact.values())
        winners = sorted(e for e, w in exact.items() if w == top)
        ell_star = winners[0]
        tied = tuple(winners) if len(winners) > 1 else ()

    z = r / seq.n
    if profile is None:
        profile = rescale(seq)
    if interval is None:
        try:
            interval = _match_interval(profile, seq, q, kind)
        except ValueError:
            interval = None
    xi_pred = math.nan if interval is None else predicted_xi_star(profile, interval, kind, z)
    return EntryPointResult(seq.n, r, q, m, kind, ell_star, ells, lw, xi_pred, z,
                            tie=bool(tied), tied_ells=tied)


def predicted_xi_star(profile: AlphaProfile, interval: FreezingInterval,
                      kind: PortionKind, z: float) -> float:
    """Solve ``z(t) = z`` on the portion's range; return ``t - alpha(u1)``."""
    if z <= 0:
        raise ValueError("z must be positive")
    lo, hi = arctic.portion_range(profile, interval, kind)

    def g(t):
        return arctic.z_of_t(profile, t, kind, interval) - z

    # z runs from +oo to 0 (F, R) or 0 to +oo (U); only t1 is a regular end
    width = hi - lo
    eps = 1e-3
    while True:
        a = lo if kind is PortionKind.U else lo + eps * width
        b = hi if kind is PortionKind.F else hi - eps * width
        ga, gb = g(a), g(b)
        if ga * gb <= 0:
            break
        eps *= 1e-2
        if eps < 1e-300:
            raise ValueError(f"z={z} not attained on the {kind.value}-portion")
    t = brentq(g, a, b, xtol=1e-12, rtol=4 * np.finfo(float).eps, maxiter=500)
    return t - interval.alpha_u1


@dataclass
class ConvergenceTable:
    rows: list[tuple[int, float, float, float]]
    fit: tuple[float, float]  # deviation ~ c0 + c1/n

    def deviations(self) -> np.ndarray:
        return np.array([row[3] for row in self.rows])

    def to_csv(self) -> str:
        lines = ["n,ell_star_over_n,xi_star,deviation"]
        for n, e, x, d in self.rows:
            lines.append(f"{n},{e:.12g},{x:.12g},{d:.12g}")
        lines.append(f"# fit: deviation = {self.fit[0]:.12g} + {self.fit[1]:.12g}/n")
        return "\n".join(lines) + "\n"


def convergence_table(profile: AlphaProfile, interval: FreezingInterval | None,
                      kind: PortionKind, z: float, n_list) -> ConvergenceTable:
    if interval is None:
        raise ValueError("profile has no freezing interval to test")
    n_list = list(n_list)
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ValueError("n_list must be increasing")
    xi_star = predicted_xi_star(profile, interval, kind, z)
    rows = []
    for n in n_list:
        seq = discretize(profile, n)
        loc = locate_discrete(seq, interval)
        r = max(1, round(z * n))
        res = finite_size_argmax(seq, loc.q, loc.m, r, kind, profile, interval)
        rows.append((n, res.ell_star / n, xi_star, abs(res.ell_star / n - xi_star)))
    inv = np.array([1.0 / row[0] for row in rows])
    dev = np.array([row[3] for row in rows])
    if len(rows) >= 2:
        c1, c0 = np.polyfit(inv, dev, 1)
    else:
        c0, c1 = float(dev[0]), 0.0
    return ConvergenceTable(rows, (float(c0), float(c1)))


def default_interval(profile: AlphaProfile, kind: PortionKind) -> FreezingInterval | None:
    want = FreezingKind.SAWTOOTH if kind is PortionKind.R else FreezingKind.FLAT
    for iv in detect_freezing(profile):
        if iv.kind is want:
            return iv
    return None
