"""Experiment configuration (JSON) and the reference profiles."""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any

from .combinatorics import PortionKind
from .profile import (AlphaProfile, DefectSequence, FreezingKind, detect_freezing,
                      discretize, rescale)

PRESETS: dict[str, dict] = {
    # one defect every second site, a gap of length n in the middle
    "gap": {"widths": [0.5, 0.5], "slopes": [2, 2], "jumps": [1.0]},
    # three equal thirds, the middle one tightly packed
    "sawtooth": {"widths": [1, 1, 1], "slopes": [2, 1, 2]},
    "uniform": {"widths": [1.0], "slopes": [2.0]},
}


@dataclass
class ExperimentConfig:
    profile: dict | None = None
    a: list[int] | None = None
    n: int = 32
    seed: int = 0
    sweeps: int | None = None
    samples: int = 1
    method: str = "auto"
    curve_samples: int = 200
    kind: str = "F"
    z: float = 0.25
    n_list: list[int] = field(default_factory=lambda: [20, 40, 80, 160])
    scale: float = 8.0
    outline: bool = True
    overlay: bool = True
    out: str | None = None
    svg: str | None = None
    state: str | None = None

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ExperimentConfig":
        data = dict(data)
        preset = data.pop("preset", None)
        if preset is not None:
            if preset not in PRESETS:
                raise ValueError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
            data.setdefault("profile", PRESETS[preset])
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown configuration keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def load(cls, path: str | os.PathLike) -> "ExperimentConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def validate(self, need_interval: bool = False) -> None:
        if self.profile is None and self.a is None:
            raise ValueError("configuration needs either 'profile' or 'a'")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if self.sweeps is not None and self.sweeps < 1:
            raise ValueError("sweeps must be >= 1")
        if self.method not in ("auto", "exact", "mcmc"):
            raise ValueError("method must be auto, exact or mcmc")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        for p in (self.out, self.svg, self.state):
            if p is not None:
                parent = Path(p).resolve().parent
                if not parent.is_dir() or not os.access(parent, os.W_OK):
                    raise ValueError(f"cannot write to {p}")
        if need_interval:
            kind = self.portion_kind()
            want = FreezingKind.SAWTOOTH if kind is PortionKind.R else FreezingKind.FLAT
            if not any(iv.kind is want for iv in detect_freezing(self.alpha_profile())):
                raise ValueError(f"profile has no {want.value} interval for kind {kind.value}")

    def portion_kind(self) -> PortionKind:
        return PortionKind(self.kind)

    def alpha_profile(self) -> AlphaProfile:
        if self.profile is not None:
            return AlphaProfile.from_dict(self.profile)
        return rescale(self.sequence())

    def sequence(self) -> DefectSequence:
        if self.a is not None:
            return DefectSequence(tuple(self.a))
        return discretize(self.alpha_profile(), self.n)
