"""Discrete càdlàg paths with an explicit jump registry.

A :class:`SamplePath` stores the right-continuous value at every timestamp.
Where the path jumps, the registry keeps the left limit as well, so the
continuous increment into a jump time and the jump itself stay separate.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = ["Jump", "SamplePath", "read_csv", "write_csv"]


@dataclass(frozen=True, eq=False)
class Jump:
    index: int
    left: np.ndarray
    right: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "left", np.asarray(self.left, dtype=float).reshape(-1))
        object.__setattr__(self, "right", np.asarray(self.right, dtype=float).reshape(-1))

    @property
    def size(self) -> np.ndarray:
        return self.right - self.left

    @property
    def magnitude(self) -> float:
        return float(np.linalg.norm(self.size))


def _registry_order(jumps, times):
    # largest first; ties go to the earlier time
    return sorted(jumps, key=lambda j: (-j.magnitude, times[j.index]))


@dataclass(frozen=True, eq=False)
class SamplePath:
    """Càdlàg path sampled at strictly increasing times starting at 0.

    ``values[i]`` is the right limit at ``times[i]``. Each registered
    :class:`Jump` carries the left limit at its index; the registry is kept
    sorted by jump magnitude, largest first.
    """

    times: np.ndarray
    values: np.ndarray
    jumps: tuple[Jump, ...] = field(default=())

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float).reshape(-1)
        values = np.asarray(self.values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        if values.ndim != 2 or values.shape[0] != times.shape[0]:
            raise ValueError("values must have one row per timestamp")
        if times.size == 0:
            raise ValueError("empty path")
        if times[0] != 0.0:
            raise ValueError("path must start at time 0")
        if np.any(np.diff(times) <= 0):
            raise ValueError("times must be strictly increasing")
        seen = set()
        for j in self.jumps:
            if not 1 <= j.index < times.size:
                raise ValueError(f"jump index {j.index} out of range")
            if j.index in seen:
                raise ValueError(f"two jumps registered at index {j.index}")
            seen.add(j.index)
            if j.left.shape != (values.shape[1],):
                raise ValueError("jump dimension mismatch")
            if not np.array_equal(j.right, values[j.index]):
                raise ValueError("jump right value must equal the stored path value")
            if np.array_equal(j.left, j.right):
                raise ValueError("registered jump has zero size")
        times.flags.writeable = False
        values.flags.writeable = False
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "jumps", tuple(_registry_order(self.jumps, times)))

    @classmethod
    def from_left_limits(cls, times, values, left_values, atol=0.0):
        """Build a path, registering a jump wherever the left limit differs."""
        values = np.asarray(values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        left_values = np.asarray(left_values, dtype=float).reshape(values.shape)
        jumps = []
        for i in range(1, values.shape[0]):
            if np.linalg.norm(values[i] - left_values[i]) > atol:
                jumps.append(Jump(i, left_values[i].copy(), values[i].copy()))
        return cls(times, values, tuple(jumps))

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    @property
    def horizon(self) -> float:
        return float(self.times[-1])

    def __len__(self) -> int:
        return self.times.shape[0]

    @property
    def is_continuous(self) -> bool:
        return not self.jumps

    def jump_at(self, index: int) -> Jump | None:
        for j in self.jumps:
            if j.index == index:
                return j
        return None

    def jump_map(self) -> dict[int, Jump]:
        return {j.index: j for j in self.jumps}

    def jump_sizes(self) -> np.ndarray:
        """Jump vectors in registry order (largest first), shape (m, d)."""
        if not self.jumps:
            return np.zeros((0, self.dim))
        return np.stack([j.size for j in self.jumps])

    def left_values(self) -> np.ndarray:
        out = np.array(self.values)
        for j in self.jumps:
            out[j.index] = j.left
        return out

    def skeleton(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Point sequence seen by partition sums.

        Left limits are inserted (at the same timestamp) before each jump
        value. Returns ``(times, points, right_index)`` where ``right_index[i]``
        is the skeleton position of ``values[i]``.
        """
        jm = self.jump_map()
        if not jm:
            return self.times.copy(), np.array(self.values), np.arange(len(self))
        ts, pts, pos = [], [], np.empty(len(self), dtype=int)
        for i in range(len(self)):
            j = jm.get(i)
            if j is not None:
                ts.append(self.times[i])
                pts.append(j.left)
            pos[i] = len(pts)
            ts.append(self.times[i])
            pts.append(self.values[i])
        return np.asarray(ts), np.asarray(pts), pos

    def value_at(self, t) -> np.ndarray:
        """Right-continuous piecewise-linear evaluation at arbitrary times.

        Between samples the path moves linearly from ``values[i]`` to the
        left limit at ``i + 1``; at sample times the stored value is returned.
        """
        t = np.atleast_1d(np.asarray(t, dtype=float))
        if np.any(t < 0) or np.any(t > self.horizon * (1 + 1e-14)):
            raise ValueError("evaluation time outside [0, T]")
        left = self.left_values()
        i = np.searchsorted(self.times, t, side="right") - 1
        i = np.clip(i, 0, len(self) - 1)
        out = np.array(self.values[i])
        inner = i < len(self) - 1
        ii = i[inner]
        w = (t[inner] - self.times[ii]) / (self.times[ii + 1] - self.times[ii])
        out[inner] = self.values[ii] + w[:, None] * (left[ii + 1] - self.values[ii])
        return out

    def restrict(self, i0: int, i1: int) -> "SamplePath":
        """Sub-path on indices ``i0..i1`` with time shifted to start at 0.

        The sub-path starts from the right value at ``i0``; jumps strictly
        after ``i0`` are kept.
        """
        if not 0 <= i0 < i1 < len(self):
            raise ValueError("need 0 <= i0 < i1 < len(path)")
        jumps = tuple(
            Jump(j.index - i0, j.left, j.right) for j in self.jumps if i0 < j.index <= i1
        )
        return SamplePath(self.times[i0 : i1 + 1] - self.times[i0], self.values[i0 : i1 + 1], jumps)

    def reversed(self) -> "SamplePath":
        """Time reversal ``s -> x(T - s)``; continuous paths only."""
        if self.jumps:
            raise ValueError("time reversal of a path with jumps is not càdlàg; parametrise first")
        return SamplePath(self.horizon - self.times[::-1], self.values[::-1])

    def shifted(self, offset) -> "SamplePath":
        offset = np.asarray(offset, dtype=float).reshape(1, -1)
        jumps = tuple(Jump(j.index, j.left + offset[0], j.right + offset[0]) for j in self.jumps)
        return SamplePath(self.times, self.values + offset, jumps)


def write_csv(path: SamplePath, file) -> None:
    """Write ``t,x1..xd[,jump_left_1..d]``; jump rows carry the left limit too."""
    d = path.dim
    header = ["t"] + [f"x{k + 1}" for k in range(d)]
    if path.jumps:
        header += [f"jump_left_{k + 1}" for k in range(d)]
    jm = path.jump_map()
    with open(file, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for i, t in enumerate(path.times):
            row = [_fmt(t)] + [_fmt(v) for v in path.values[i]]
            if path.jumps:
                j = jm.get(i)
                row += [_fmt(v) for v in j.left] if j is not None else [""] * d
            w.writerow(row)


def read_csv(file) -> SamplePath:
    with open(file, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{file}: empty CSV")
    header = rows[0]
    if not header or header[0] != "t":
        raise ValueError(f"{file}: first column must be 't'")
    xs = [h for h in header[1:] if h.startswith("x")]
    d = len(xs)
    if xs != [f"x{k + 1}" for k in range(d)] or d == 0:
        raise ValueError(f"{file}: malformed value columns {header[1:]}")
    extra = header[1 + d :]
    has_jumps = bool(extra)
    if has_jumps and extra != [f"jump_left_{k + 1}" for k in range(d)]:
        raise ValueError(f"{file}: malformed jump columns {extra}")
    times, values, jumps = [], [], []
    for n, row in enumerate(rows[1:]):
        times.append(float(row[0]))
        values.append([float(v) for v in row[1 : 1 + d]])
        if has_jumps and any(c.strip() for c in row[1 + d :]):
            jumps.append((n, [float(v) for v in row[1 + d : 1 + 2 * d]]))
    times = np.asarray(times)
    if np.any(np.diff(times) <= 0):
        raise ValueError(f"{file}: timestamps are not strictly increasing")
    values = np.asarray(values)
    return SamplePath(times, values, tuple(Jump(i, left, values[i]) for i, left in jumps))


def _fmt(x: float) -> str:
    return format(float(x), ".17g")
