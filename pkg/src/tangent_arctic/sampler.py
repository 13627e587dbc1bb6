"""Uniform random path configurations and their tilings.

A configuration is stored as the columns ``c_i(y)`` of the north steps from
level ``y`` to ``y + 1`` (paths ``i = y+1 .. n``).  With row ``-1`` set to
``(a_0, ..., a_n)`` the rows interlace half-openly,
``c_{i-1}(y-1) < c_i(y) <= c_i(y-1)``, i.e. they form a Gelfand-Tsetlin
pattern.  Small instances are sampled exactly row by row; larger ones with
single-entry Metropolis moves (compiled with numba).
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from itertools import product

import numba
import numpy as np

from .combinatorics import gt_product
from .profile import DefectSequence

U, R, F, OUTSIDE = 0, 1, 2, 3
TILE_NAMES = {U: "U", R: "R", F: "F", OUTSIDE: "outside"}

_BIG = np.int64(1) << 40
_CHUNK = 1 << 22


@dataclass(frozen=True)
class TilingState:
    """``rows[y]`` holds ``(c_{y+1}(y), ..., c_n(y))`` for ``y = 0..n-1``."""

    seq: DefectSequence
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(int(v) for v in r) for r in self.rows)
        object.__setattr__(self, "rows", rows)

    @property
    def n(self) -> int:
        return self.seq.n

    def c(self, i: int, y: int) -> int:
        """Column of the north step of path ``i`` at level ``y`` (``y=-1`` gives ``a_i``)."""
        if y == -1:
            return self.seq[i]
        return self.rows[y][i - y - 1]

    def violations(self) -> list[str]:
        out = []
        n = self.n
        if len(self.rows) != n:
            return [f"expected {n} rows, got {len(self.rows)}"]
        prev = self.seq.full
        for y, row in enumerate(self.rows):
            if len(row) != n - y:
                out.append(f"row {y} has length {len(row)}")
                continue
            for k, v in enumerate(row):
                i = y + 1 + k
                lo, hi = prev[k], prev[k + 1]  # c_{i-1}(y-1), c_i(y-1)
                if not lo < v <= hi:
                    out.append(f"c_{i}({y})={v} violates {lo} < c <= {hi}")
            prev = row
        return out

    def is_valid(self) -> bool:
        return not self.violations()

    def to_text(self) -> str:
        return "\n".join(" ".join(str(v) for v in row) for row in self.rows) + "\n"

    @classmethod
    def from_text(cls, seq: DefectSequence, text: str) -> "TilingState":
        rows = [tuple(int(v) for v in line.split()) for line in text.strip().splitlines()]
        return cls(seq, tuple(rows))

    def to_array(self) -> np.ndarray:
        return _pack(self)


def minimal_state(seq: DefectSequence) -> TilingState:
    """Every path turns north as early as possible: ``c_i(y) = a_{i-y-1} + y + 1``."""
    a = seq.full
    n = seq.n
    return TilingState(seq, tuple(tuple(a[i - y - 1] + y + 1 for i in range(y + 1, n + 1))
                                  for y in range(n)))


def maximal_state(seq: DefectSequence) -> TilingState:
    """Every path goes north first: ``c_i(y) = a_i``."""
    a = seq.full
    n = seq.n
    return TilingState(seq, tuple(tuple(a[i] for i in range(y + 1, n + 1)) for y in range(n)))


def all_states(seq: DefectSequence, limit: int = 100_000) -> list[TilingState]:
    """Enumerate the whole state space (small instances only)."""
    out: list[tuple] = []

    def rec(prev, rows):
        if len(prev) == 1:
            out.append(tuple(rows))
            if len(out) > limit:
                raise ValueError("state space too large to enumerate")
            return
        ranges = [range(prev[k] + 1, prev[k + 1] + 1) for k in range(len(prev) - 1)]
        for row in product(*ranges):
            rows.append(row)
            rec(row, rows)
            rows.pop()

    rec(seq.full, [])
    return [TilingState(seq, rows) for rows in out]


# --- exact sampling ---------------------------------------------------------

def _candidates(prev: tuple[int, ...]) -> np.ndarray:
    axes = [np.arange(prev[k] + 1, prev[k + 1] + 1) for k in range(len(prev) - 1)]
    grids = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def _vandermonde(rows: np.ndarray) -> np.ndarray:
    w = np.ones(rows.shape[0])
    k = rows.shape[1]
    for j in range(k):
        for l in range(j + 1, k):
            w *= (rows[:, l] - rows[:, j]).astype(float)
    return w


def sample_exact(seq: DefectSequence, rng: np.random.Generator,
                 max_n: int = 10, max_a: int = 40) -> TilingState:
    """Exactly uniform sample, drawing each row given the one above with
    probability proportional to the number of completions below it."""
    if seq.n > max_n or seq.a[-1] > max_a:
        raise ValueError(f"instance too large for exact sampling (n={seq.n}, a_n={seq.a[-1]})")
    prev = seq.full
    rows = []
    while len(prev) > 1:
        cand = _candidates(prev)
        w = _vandermonde(cand)
        k = rng.choice(len(cand), p=w / w.sum())
        prev = tuple(int(v) for v in cand[k])
        rows.append(prev)
    return TilingState(seq, tuple(rows))


# --- Metropolis dynamics ----------------------------------------------------

def _pack(state: TilingState) -> np.ndarray:
    """Padded table: ``P[0] = a``, ``P[y+1, i] = c_i(y)``; missing cells to the
    lower left hold ``-BIG`` and column ``n+1`` holds ``+BIG``."""
    n = state.n
    P = np.full((n + 2, n + 2), -_BIG, dtype=np.int64)
    P[:, n + 1] = _BIG
    P[0, : n + 1] = state.seq.full
    for y, row in enumerate(state.rows):
        P[y + 1, y + 1: n + 1] = row
    return P


def _unpack(seq: DefectSequence, P: np.ndarray) -> TilingState:
    n = seq.n
    return TilingState(seq, tuple(tuple(int(v) for v in P[y + 1, y + 1: n + 1]) for y in range(n)))


def _entries(n: int) -> tuple[np.ndarray, np.ndarray]:
    ys, cols = [], []
    for y in range(n):
        for i in range(y + 1, n + 1):
            ys.append(y)
            cols.append(i)
    return np.array(ys, dtype=np.int64), np.array(cols, dtype=np.int64)


@numba.njit(cache=True)
def _metropolis(flat, base, stride, words, count):
    """Apply ``count`` proposals, two per 64-bit word (one per 32-bit half):
    the top 31 bits of a half pick an entry, its low bit the direction."""
    E = np.uint64(base.shape[0])
    accepted = 0
    for j in range(count):
        w = words[j >> 1]
        h = (w >> np.uint64(32)) if (j & 1) == 0 else (w & np.uint64(0xFFFFFFFF))
        b = base[np.int64(((h >> np.uint64(1)) * E) >> np.uint64(31))]
        v = flat[b]
        if h & np.uint64(1):
            v += 1
            if v <= flat[b - stride] and v < flat[b + stride + 1]:
                flat[b] = v
                accepted += 1
        else:
            v -= 1
            if v > flat[b - stride - 1] and v >= flat[b + stride]:
                flat[b] = v
                accepted += 1
    return accepted


@dataclass
class Chain:
    """A Metropolis chain with its own generator; proposals are drawn in
    chunks of raw 64-bit words."""

    seq: DefectSequence
    rng: np.random.Generator
    P: np.ndarray = field(init=False)
    proposals: int = 0
    accepted: int = 0

    def __post_init__(self):
        self.P = _pack(minimal_state(self.seq))
        ys, cols = _entries(self.seq.n)
        self._base = (ys + 1) * self.P.shape[1] + cols

    @classmethod
    def from_state(cls, state: TilingState, rng: np.random.Generator) -> "Chain":
        ch = cls(state.seq, rng)
        ch.P = _pack(state)
        return ch

    @property
    def entries(self) -> int:
        return len(self._base)

    def run(self, sweeps: int) -> "Chain":
        total = int(sweeps) * self.entries
        flat = self.P.reshape(-1)  # a view: updates land in P
        stride = self.P.shape[1]
        bg = self.rng.bit_generator
        while total > 0:
            k = min(total, 2 * _CHUNK)
            words = np.asarray(bg.random_raw((k + 1) // 2), dtype=np.uint64)
            self.accepted += _metropolis(flat, self._base, stride, words, k)
            self.proposals += k
            total -= k
        return self

    def state(self) -> TilingState:
        return _unpack(self.seq, self.P)


def mcmc_sweep(state: TilingState, rng: np.random.Generator) -> TilingState:
    """One sweep: as many single-entry proposals as there are entries."""
    return Chain.from_state(state, rng).run(1).state()


def sample_mcmc(seq: DefectSequence, sweeps: int | None = None,
                rng: np.random.Generator | None = None) -> TilingState:
    """State after ``sweeps`` sweeps (default ``50 n^2``) from the minimal state."""
    if sweeps is None:
        sweeps = 50 * seq.n ** 2
    if sweeps < 1:
        raise ValueError("sweeps must be >= 1")
    rng = rng if rng is not None else np.random.default_rng()
    return Chain(seq, rng).run(sweeps).state()


def transition_matrix(seq: DefectSequence) -> tuple[list[TilingState], np.ndarray]:
    """Exact one-proposal transition matrix over the enumerated state space."""
    states = all_states(seq, limit=5000)
    index = {s.rows: k for k, s in enumerate(states)}
    ys, cols = _entries(seq.n)
    E = len(ys)
    T = np.zeros((len(states), len(states)))
    for k, s in enumerate(states):
        P = _pack(s)
        for y, i in zip(ys, cols):
            for d in (1, -1):
                Q = P.copy()
                Q[y + 1, i] += d
                new = _unpack(seq, Q)
                j = index.get(new.rows) if new.is_valid() else None
                T[k, k if j is None else j] += 0.5 / E
    return states, T


def integrated_autocorrelation(series: np.ndarray, max_lag: int | None = None) -> float:
    """Integrated autocorrelation time with the initial-positive-sequence cut."""
    x = np.asarray(series, dtype=float)
    x = x - x.mean()
    var = x.var()
    if var == 0:
        return 1.0
    n = len(x)
    max_lag = max_lag or n // 4
    f = np.fft.rfft(x, 2 * n)
    acf = np.fft.irfft(f * np.conj(f))[:n] / (var * np.arange(n, 0, -1))
    tau = 1.0
    for lag in range(1, max_lag):
        if acf[lag] <= 0:
            break
        tau += 2 * acf[lag]
    return tau


# --- tiles ------------------------------------------------------------------

@dataclass(frozen=True)
class TileGrid:
    """Tile type per cell: ``tiles[y, x-1]`` for ``x = 1..a_n``, ``y = 0..n``."""

    tiles: np.ndarray

    @property
    def width(self) -> int:
        return self.tiles.shape[1]

    @property
    def height(self) -> int:
        return self.tiles.shape[0]

    def count(self, kind: int) -> int:
        return int((self.tiles == kind).sum())

    def cells(self):
        """Iterate ``(x, y, kind)``."""
        for y in range(self.height):
            for x in range(1, self.width + 1):
                yield x, y, int(self.tiles[y, x - 1])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("x", "y", "type"))
        for x, y, k in self.cells():
            w.writerow((x, y, TILE_NAMES[k]))
        return buf.getvalue()


def tile_classify(state: TilingState) -> TileGrid:
    """R at every north step, U along every west run, F elsewhere."""
    seq = state.seq
    n = seq.n
    width = seq.a[-1]
    T = np.full((n + 1, width), F, dtype=np.int8)
    for y in range(n + 1):
        if y >= 1:
            # terminal west run of path y into (0, y)
            T[y, : state.c(y, y - 1)] = U
        for i in range(y + 1, n + 1):
            c = state.c(i, y)
            top = state.c(i, y - 1)
            T[y, c: top] = U  # cells c+1 .. top
            T[y, c - 1] = R
    return TileGrid(T)


def tile_polygon(x: int, y: int, kind: int) -> list[tuple[float, float]]:
    """Tile outline in the sheared plane: U spans (1,0),(1,1); R spans (1,1),(0,1);
    F is a unit square."""
    if kind == U:
        return [(x - 1, y), (x, y), (x + 1, y + 1), (x, y + 1)]
    if kind == R:
        return [(x, y), (x + 1, y + 1), (x + 1, y + 2), (x, y + 1)]
    if kind == F:
        return [(x, y), (x + 1, y), (x + 1, y + 1), (x, y + 1)]
    raise ValueError("outside cells have no tile")


def deterministic_cells(seq: DefectSequence) -> np.ndarray:
    """Cells whose tile is the same in every configuration, as a boolean grid.

    Each entry ``c_i(y)`` ranges over ``[min, max]`` given by the minimal and
    maximal states.  A cell is forced R when some entry is pinned to it,
    forced U when some west run covers it in both extreme states, forced F
    when no R or U can reach it.
    """
    lo, hi = minimal_state(seq), maximal_state(seq)
    n = seq.n
    width = seq.a[-1]
    can_r = np.zeros((n + 1, width), bool)
    can_u = np.zeros((n + 1, width), bool)
    forced = np.zeros((n + 1, width), bool)
    for y in range(n + 1):
        if y >= 1:
            can_u[y, : hi.c(y, y - 1)] = True
            forced[y, : lo.c(y, y - 1)] = True
        for i in range(y + 1, n + 1):
            cmin, cmax = lo.c(i, y), hi.c(i, y)
            can_r[y, cmin - 1: cmax] = True
            if cmin == cmax:
                forced[y, cmin - 1] = True
            can_u[y, cmin: hi.c(i, y - 1)] = True
            # covered by the run in every state: cmax < x <= min c_i(y-1)
            forced[y, cmax: lo.c(i, y - 1)] = True
    forced |= ~(can_r | can_u)
    return forced


@dataclass
class DensityAccumulator:
    """Running per-cell tile counts over many states of the same sequence."""

    seq: DefectSequence
    counts: np.ndarray = field(init=False)
    samples: int = 0

    def __post_init__(self):
        self.counts = np.zeros((3, self.seq.n + 1, self.seq.a[-1]), dtype=np.int64)

    def add(self, state: TilingState) -> None:
        if state.seq != self.seq:
            raise ValueError("state belongs to a different defect sequence")
        T = tile_classify(state).tiles
        for k in (U, R, F):
            self.counts[k] += T == k
        self.samples += 1

    def density(self) -> np.ndarray:
        if not self.samples:
            raise ValueError("no states accumulated")
        return self.counts / self.samples

    def majority(self) -> np.ndarray:
        return np.argmax(self.counts, axis=0)


def empirical_density(states, cell_resolution: int = 1) -> np.ndarray:
    """Frequency of each tile type per cell, shape ``(3, n+1, a_n)`` indexed by
    ``U, R, F``; ``cell_resolution > 1`` averages over square blocks."""
    states = list(states)
    if not states:
        raise ValueError("need at least one state")
    acc = DensityAccumulator(states[0].seq)
    for s in states:
        acc.add(s)
    d = acc.density()
    k = int(cell_resolution)
    if k > 1:
        h, w = d.shape[1] // k * k, d.shape[2] // k * k
        d = d[:, :h, :w].reshape(3, h // k, k, w // k, k).mean(axis=(2, 4))
    return d


def cell_points(seq: DefectSequence) -> np.ndarray:
    """Rescaled coordinates ``(x/n, y/n)`` of every cell, shape ``(n+1, a_n, 2)``."""
    n = seq.n
    ys, xs = np.mgrid[0: n + 1, 1: seq.a[-1] + 1]
    return np.stack([xs / n, ys / n], axis=-1)


def log_count(seq: DefectSequence) -> float:
    return math.log(gt_product(seq.full))
