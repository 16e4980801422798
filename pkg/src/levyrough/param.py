"""Fictitious-time parametrisation of càdlàg paths.

Each registered jump ``j`` at ``t_n`` is replaced by a straight traversal
from the left limit to the right value lasting ``delta * |j|^p`` units of
extended time, so ``tau(t) = t + delta * sum_{t_n <= t} |j(t_n)|^p``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .paths import Jump, SamplePath
from .pvar import powp

__all__ = ["Parametrisation", "Segment", "deparametrise", "parametrise"]


@dataclass(frozen=True)
class Segment:
    ext_start: float
    ext_end: float
    jump_index: int  # index of the jump in the original path
    start_idx: int  # extended-path index of the left limit
    end_idx: int  # extended-path index of the right value

    @property
    def length(self) -> float:
        return self.ext_end - self.ext_start


@dataclass(frozen=True, eq=False)
class Parametrisation:
    delta: float
    p: float
    orig_times: np.ndarray
    tau: np.ndarray  # extended time of each original (right) value
    ext_index: np.ndarray  # extended-path index of each original value
    segments: tuple[Segment, ...]
    ext_times: np.ndarray

    @property
    def horizon(self) -> float:
        return float(self.orig_times[-1])

    @property
    def ext_horizon(self) -> float:
        return float(self.ext_times[-1])

    @property
    def fictitious_time(self) -> float:
        return float(sum(s.length for s in self.segments))

    def step_map(self) -> np.ndarray:
        """Extended step index of each original step ``k -> k+1``.

        A step ending at a jump ends at the segment's left limit.
        """
        seg_start = {s.jump_index: s.start_idx for s in self.segments}
        ends = np.array([seg_start.get(k, self.ext_index[k]) for k in range(1, len(self.orig_times))])
        starts = self.ext_index[:-1]
        if np.any(ends - starts != 1):
            raise AssertionError("original steps must map to single extended steps")
        return starts

    def to_dict(self) -> dict:
        return {
            "delta": self.delta,
            "p": self.p,
            "orig_times": self.orig_times.tolist(),
            "tau": self.tau.tolist(),
            "ext_index": self.ext_index.tolist(),
            "ext_times": self.ext_times.tolist(),
            "segments": [[s.ext_start, s.ext_end, s.jump_index, s.start_idx, s.end_idx] for s in self.segments],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Parametrisation":
        segs = tuple(Segment(float(a), float(b), int(j), int(i0), int(i1)) for a, b, j, i0, i1 in d["segments"])
        return cls(float(d["delta"]), float(d["p"]), np.asarray(d["orig_times"], dtype=float),
                   np.asarray(d["tau"], dtype=float), np.asarray(d["ext_index"], dtype=int), segs,
                   np.asarray(d["ext_times"], dtype=float))

    def save(self, file) -> None:
        with open(file, "w") as fh:
            json.dump(self.to_dict(), fh, indent=1)

    @classmethod
    def load(cls, file) -> "Parametrisation":
        with open(file) as fh:
            return cls.from_dict(json.load(fh))


def parametrise(path: SamplePath, delta: float = 1.0, p: float = 1.0, h: float | None = None):
    """Continuous path on extended time plus the bookkeeping to undo it.

    Each segment gets ``max(2, ceil(length / h))`` steps, ``h`` defaulting
    to the median grid step, so integrators see the linear traversal.
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    if not p >= 1:
        raise ValueError("p must be >= 1")
    times, values = path.times, path.values
    if h is None:
        h = float(np.median(np.diff(times))) if len(path) > 1 else 1.0
    jm = path.jump_map()
    ext_t, ext_x = [], []
    tau = np.empty(len(path))
    ext_index = np.empty(len(path), dtype=int)
    segs = []
    offset = 0.0
    for i in range(len(path)):
        j = jm.get(i)
        if j is not None:
            length = delta * float(powp(j.magnitude, p))
            m = max(2, int(np.ceil(length / h)))
            t0 = times[i] + offset
            start = len(ext_t)
            for k in range(m):
                ext_t.append(t0 + length * k / m)
                ext_x.append(j.left + (k / m) * j.size)
            offset += length
            segs.append(Segment(t0, times[i] + offset, i, start, start + m))
        tau[i] = times[i] + offset
        ext_index[i] = len(ext_t)
        ext_t.append(tau[i])
        ext_x.append(values[i])
    ext_t = np.asarray(ext_t)
    par = Parametrisation(float(delta), float(p), np.array(times), tau, ext_index, tuple(segs), ext_t)
    return SamplePath(ext_t, np.asarray(ext_x)), par


def deparametrise(extended: SamplePath, par: Parametrisation) -> SamplePath:
    """Read a càdlàg path off an extended-time path.

    Values at original times are taken at ``tau(t)``; the left limit at a
    jump is the value at the segment start. Segment interiors are ignored.
    """
    if len(extended) != len(par.ext_times):
        raise ValueError("extended path does not match the parametrisation grid")
    if not np.isclose(extended.horizon, par.ext_horizon, rtol=1e-12, atol=0.0):
        raise ValueError(f"mismatched horizons: {extended.horizon} vs {par.ext_horizon}")
    values = np.array(extended.values[par.ext_index])
    jumps = []
    for s in par.segments:
        left = extended.values[s.start_idx]
        right = values[s.jump_index]
        if not np.array_equal(left, right):
            jumps.append(Jump(s.jump_index, left, right))
    return SamplePath(par.orig_times, values, tuple(jumps))
