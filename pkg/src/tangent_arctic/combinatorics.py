"""Exact finite-size counting of non-intersecting north/west path systems.

Path ``i`` runs from ``(a_i, 0)`` to ``(0, i)``; the origin carries a
single-site path.  The number of configurations is the Gelfand-Tsetlin
product ``prod_{0<=s<i<=n} (a_i - a_s)/(i - s)``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

import numpy as np

from .profile import DefectSequence


class PortionKind(enum.Enum):
    F = "F"
    U = "U"
    R = "R"


@dataclass(frozen=True)
class CountRatio:
    numerator: int
    denominator: int

    @classmethod
    def from_fraction(cls, f: Fraction) -> "CountRatio":
        if f <= 0:
            raise ValueError("count ratios are positive")
        return cls(f.numerator, f.denominator)

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    @property
    def log_value(self) -> float:
        return math.log(self.numerator) - math.log(self.denominator)

    def __float__(self) -> float:
        return float(self.fraction)


def gt_product(row: Sequence[int]) -> int:
    """Number of strict interlacing arrays below a strictly increasing top row.

    This is the Gelfand-Tsetlin dimension of the row; it is invariant under
    translation.
    """
    row = [int(v) for v in row]
    num = 1
    den = 1
    for i in range(len(row)):
        for s in range(i):
            diff = row[i] - row[s]
            if diff <= 0:
                raise ValueError("row must be strictly increasing")
            num *= diff
            den *= i - s
    q, r = divmod(num, den)
    assert r == 0, "Gelfand-Tsetlin product is not integral"
    return q


def gt_count(seq: DefectSequence) -> int:
    """Exact number of path configurations (equivalently tilings)."""
    return gt_product(seq.full)


def _paths_avoiding(start, end_y, blocked):
    """All north/west vertex lists from ``start`` to ``(0, end_y)`` that avoid
    ``blocked``."""
    x0, y0 = start
    out = []
    path = [start]

    def walk(x, y):
        if x == 0 and y == end_y:
            out.append(tuple(path))
            return
        if x > 0 and (x - 1, y) not in blocked:
            path.append((x - 1, y))
            walk(x - 1, y)
            path.pop()
        if y < end_y and (x, y + 1) not in blocked:
            path.append((x, y + 1))
            walk(x, y + 1)
            path.pop()

    if start not in blocked:
        walk(x0, y0)
    return out


def brute_force_count(seq: DefectSequence, max_n: int = 6, max_a: int = 12) -> int:
    """Count configurations by explicit enumeration with vertex-disjointness.

    Guarded to ``n <= max_n`` and ``a_n <= max_a``.
    """
    if seq.n > max_n or seq.a[-1] > max_a:
        raise ValueError(f"instance too large for enumeration (n={seq.n}, a_n={seq.a[-1]})")
    a = seq.a

    def place(i, occupied):
        if i > seq.n:
            return 1
        total = 0
        for p in _paths_avoiding((a[i - 1], 0), i, occupied):
            total += place(i + 1, occupied | frozenset(p))
        return total

    return place(1, frozenset({(0, 0)}))


def _check_flat(seq: DefectSequence, q: int, ell: int) -> int:
    if not 0 <= q < seq.n:
        raise ValueError(f"q={q} out of range")
    m = seq[q + 1] - seq[q]
    if m < 2:
        raise ValueError(f"a_(q+1) - a_q = {m}: not a gap")
    if not 1 <= ell <= m:
        raise ValueError(f"ell={ell} outside 1..{m}")
    return m


def h_flat(seq: DefectSequence, q: int, ell: int) -> CountRatio:
    """``Z(a')/Z(a)`` with ``a'_{q+1} = a_q + ell`` (entry point moved into a gap)."""
    m = _check_flat(seq, q, ell)
    a = seq.full
    shift = m - ell
    h = Fraction(1)
    for i in range(seq.n + 1):
        if i == q + 1:
            continue
        # 1 + (m - ell)/(a_i - a_{q+1})
        h *= Fraction(a[i] - a[q + 1] + shift, a[i] - a[q + 1])
    return CountRatio.from_fraction(h)


def _check_sawtooth(seq: DefectSequence, q: int, m: int, ell: int) -> None:
    a = seq.full
    n = seq.n
    if m < 1 or q < 0 or q + m > n:
        raise ValueError(f"(q={q}, m={m}) does not fit in n={n}")
    if any(a[i + 1] - a[i] != 1 for i in range(q, q + m)):
        raise ValueError("points a_q..a_(q+m) are not tightly packed")
    if not 0 <= ell <= m:
        raise ValueError(f"ell={ell} outside 0..{m}")
    if ell < m and q + m < n and a[q + m + 1] - a[q + m] < 2:
        raise ValueError("no room to shift a_(q+m) one unit to the right")


def h_sawtooth(seq: DefectSequence, q: int, m: int, ell: int) -> CountRatio:
    """``Z(a')/Z(a)`` with ``a_{q+ell+1}, ..., a_{q+m}`` shifted right by one."""
    _check_sawtooth(seq, q, m, ell)
    a = seq.full
    n = seq.n
    h = Fraction(1)
    for i in range(q + ell + 1, q + m + 1):
        for s in range(q + ell + 1):
            d = a[i] - a[s]
            h *= Fraction(d + 1, d)
    for i in range(q + m + 1, n + 1):
        for s in range(q + ell + 1, q + m + 1):
            d = a[i] - a[s]
            h *= Fraction(d - 1, d)
    return CountRatio.from_fraction(h)


def y_count(kind: PortionKind, r: int, ell: int, m: int) -> int:
    """Number of strip paths from the displaced start to the entry point."""
    if r < 1 or ell < 0 or m < 0:
        raise ValueError("negative or empty arguments")
    if kind is PortionKind.F:
        if not 1 <= ell <= m:
            raise ValueError(f"ell={ell} outside 1..{m}")
        return math.comb(m - ell + r - 1, m - ell)
    if kind is PortionKind.U:
        return math.comb(r + ell - 1, ell)
    if kind is PortionKind.R:
        if ell > m:
            raise ValueError(f"ell={ell} > m={m}")
        if ell < m - r:
            return 0
        return math.comb(r, r + ell - m)
    raise TypeError(kind)


def log_y_count(kind: PortionKind, r: int, ell: np.ndarray, m: int) -> np.ndarray:
    """Natural log of :func:`y_count` for an array of ``ell`` (``-inf`` where zero)."""
    ell = np.asarray(ell, dtype=float)
    lg = np.vectorize(math.lgamma, otypes=[float])
    if kind is PortionKind.F:
        k = m - ell
        return lg(k + r) - lg(k + 1) - lg(r)
    if kind is PortionKind.U:
        return lg(r + ell) - lg(ell + 1) - lg(r)
    k = r + ell - m
    out = np.full(ell.shape, -np.inf)
    ok = k >= 0
    out[ok] = lg(r + 1) - lg(k[ok] + 1) - lg(r - k[ok] + 1)
    return out


def log_h_flat_all(seq: DefectSequence, q: int) -> tuple[np.ndarray, np.ndarray]:
    """``(ells, log H_ell)`` for ``ell = 1..m`` as sums of logs of the factors."""
    a = np.asarray(seq.full, dtype=float)
    m = _check_flat(seq, q, 1)
    ells = np.arange(1, m + 1)
    others = np.delete(a, q + 1)
    num = (a[q] + ells)[:, None] - others[None, :]
    den = a[q + 1] - others
    return ells, np.log(np.abs(num)).sum(axis=1) - np.log(np.abs(den)).sum()


def log_h_sawtooth_all(seq: DefectSequence, q: int, m: int) -> tuple[np.ndarray, np.ndarray]:
    """``(ells, log H_ell)`` for ``ell = 0..m`` in O(n m) per ell."""
    _check_sawtooth(seq, q, m, m)
    if q + m < seq.n and seq[q + m + 1] - seq[q + m] < 2:
        raise ValueError("no room to shift a_(q+m) one unit to the right")
    a = np.asarray(seq.full, dtype=float)
    n = seq.n
    block = np.arange(q + 1, q + m + 1)
    diff = a[block][:, None] - a[None, : q + m + 1]
    with np.errstate(divide="ignore", invalid="ignore"):
        up = np.where(diff > 0, np.log1p(1.0 / np.where(diff > 0, diff, 1.0)), 0.0)
    # prefix over s so that row sums up to s = q+ell are O(1)
    up_cum = np.cumsum(up, axis=1)
    right = a[q + m + 1:]
    if right.size:
        d2 = right[:, None] - a[None, block]
        down_cols = np.log1p(-1.0 / d2).sum(axis=0)
    else:
        down_cols = np.zeros(m)
    ells = np.arange(0, m + 1)
    out = np.empty(m + 1)
    for ell in ells:
        rows = slice(ell, m)  # i = q+ell+1 .. q+m
        t1 = up_cum[rows, q + ell].sum()
        t2 = down_cols[ell:].sum()
        out[ell] = t1 + t2
    return ells, out


def strip_paths_f(r: int, m: int) -> dict[int, int]:
    """Enumerate west/north paths from ``(m, -r)`` into row 0 at columns
    ``1..m`` whose last step is north (oracle for the F-kind counts)."""
    counts: dict[int, int] = {}

    def walk(x, y):
        if y == -1:
            counts[x] = counts.get(x, 0) + 1  # final north step into (x, 0)
        if x > 1:
            walk(x - 1, y)
        if y < -1:
            walk(x, y + 1)

    walk(m, -r)
    return counts


def strip_paths_u(r: int, max_ell: int) -> dict[int, int]:
    """Enumerate east/north-east paths from ``(-r, -r)`` to row 0 at ``(ell, 0)``
    with a final north-east step."""
    counts: dict[int, int] = {}

    def walk(x, y):
        if y == -1 and x + 1 <= max_ell:
            counts[x + 1] = counts.get(x + 1, 0) + 1
        if y < -1:
            walk(x + 1, y + 1)
        if x + 1 <= max_ell:
            walk(x + 1, y)

    walk(-r, -r)
    return counts


def strip_paths_r(r: int, m: int) -> dict[int, int]:
    """Enumerate north/north-east paths of ``r`` steps from ``(m - r, -r)``."""
    counts: dict[int, int] = {}
    for ne in range(r + 1):
        for _ in combinations(range(r), ne):
            ell = m - r + ne
            if 0 <= ell <= m:
                counts[ell] = counts.get(ell, 0) + 1
    return counts
