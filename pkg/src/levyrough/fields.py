"""Vector fields ``f : R^n -> L(R^d, R^n)`` with declared Lip(alpha) bounds.

Norms are Frobenius norms: ``|f(y)|`` of the n x d matrix and ``|Df(y)|``
of the n x d x n derivative tensor. These dominate the operator norms
used in the jump and flow estimates.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "AffineTruncatedField",
    "CallableField",
    "ConstantField",
    "TrigField",
    "VectorField",
    "constant_field",
    "from_preset",
    "linear_field",
    "rotation_field",
    "soft_clip",
    "trig_field",
]


def soft_clip(u, radius: float, width: float):
    """Identity on ``|u| <= radius``, then ``radius + width tanh((|u|-radius)/width)``.

    C^2 with bounded third derivative; values stay below ``radius + width``.
    Returns ``(psi(u), psi'(u))``.
    """
    u = np.asarray(u, dtype=float)
    a = np.abs(u)
    out = np.array(u)
    d = np.ones_like(u)
    big = a > radius
    if np.any(big):
        z = np.tanh((a[big] - radius) / width)
        out[big] = np.sign(u[big]) * (radius + width * z)
        d[big] = 1.0 - z**2
    return out, d


class VectorField:
    """Base class: subclasses supply ``eval_batch`` and ``jacobian_batch``."""

    n: int
    d: int
    lip_alpha: float
    name: str = "field"

    @property
    def state_dim(self) -> int:
        return self.n

    def eval(self, y) -> np.ndarray:
        return self.eval_batch(np.asarray(y, dtype=float).reshape(1, -1))[0]

    def jacobian(self, y) -> np.ndarray:
        """``J[i, j, k] = d f_ij / d y_k``."""
        return self.jacobian_batch(np.asarray(y, dtype=float).reshape(1, -1))[0]

    def eval_batch(self, ys: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def jacobian_batch(self, ys: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def bounds(self) -> tuple[float, float]:
        """Declared ``(sup |f|, sup |Df|)``."""
        raise NotImplementedError

    @property
    def lip_norm(self) -> float:
        """``|f|_inf + |Df|_inf``, used as the Lip(alpha) norm in estimates."""
        b0, b1 = self.bounds()
        return b0 + b1

    def params(self) -> dict:
        return {}

    def second_order(self, ys: np.ndarray) -> np.ndarray:
        """``(Df f)[i, l, j] = sum_m d_m f_ij f_ml`` at each state, shape (N, n, d, d)."""
        F = self.eval_batch(ys)
        J = self.jacobian_batch(ys)
        return np.einsum("kijm,kml->kilj", J, F)


class CallableField(VectorField):
    """Field from batch callables; ``state_dim`` may differ from the row count.

    With ``state_dim != n`` it is a one-form to integrate, not a field to solve.
    """

    def __init__(self, f, df, n: int, d: int, state_dim: int | None = None, bounds=(np.inf, np.inf),
                 lip_alpha: float = np.inf, name: str = "callable"):
        self._f, self._df = f, df
        self.n, self.d = n, d
        self._state_dim = n if state_dim is None else state_dim
        self._bounds = tuple(map(float, bounds))
        self.lip_alpha = lip_alpha
        self.name = name

    @property
    def state_dim(self) -> int:
        return self._state_dim

    def eval_batch(self, ys):
        return np.asarray(self._f(ys), dtype=float)

    def jacobian_batch(self, ys):
        return np.asarray(self._df(ys), dtype=float)

    def bounds(self):
        return self._bounds


class ConstantField(VectorField):
    def __init__(self, C):
        self.C = np.atleast_2d(np.asarray(C, dtype=float))
        self.n, self.d = self.C.shape
        self.lip_alpha = np.inf
        self.name = "constant"

    def eval_batch(self, ys):
        return np.broadcast_to(self.C, (ys.shape[0],) + self.C.shape).copy()

    def jacobian_batch(self, ys):
        return np.zeros((ys.shape[0], self.n, self.d, self.n))

    def bounds(self):
        return float(np.linalg.norm(self.C)), 0.0

    def params(self):
        return {"C": self.C.tolist()}


class AffineTruncatedField(VectorField):
    """``f(y)[:, j] = c_j + T[:, j, :] psi(y)`` with coordinatewise soft clipping."""

    def __init__(self, T, c=None, radius: float = 10.0, width: float = 1.0, name: str = "affine"):
        self.T = np.asarray(T, dtype=float)
        if self.T.ndim != 3 or self.T.shape[0] != self.T.shape[2]:
            raise ValueError("T must have shape (n, d, n)")
        self.n, self.d = self.T.shape[:2]
        self.c = np.zeros((self.n, self.d)) if c is None else np.asarray(c, dtype=float).reshape(self.n, self.d)
        if radius <= 0 or width <= 0:
            raise ValueError("truncation radius and width must be positive")
        self.radius, self.width = float(radius), float(width)
        self.lip_alpha = 3.0
        self.name = name

    def eval_batch(self, ys):
        psi, _ = soft_clip(ys, self.radius, self.width)
        return self.c[None] + np.einsum("ijk,Nk->Nij", self.T, psi)

    def jacobian_batch(self, ys):
        _, dpsi = soft_clip(ys, self.radius, self.width)
        return np.einsum("ijk,Nk->Nijk", self.T, dpsi)

    def bounds(self):
        tn = float(np.linalg.norm(self.T))
        return float(np.linalg.norm(self.c)) + tn * np.sqrt(self.n) * (self.radius + self.width), tn

    def params(self):
        return {"T": self.T.tolist(), "c": self.c.tolist(), "radius": self.radius, "width": self.width}


class TrigField(VectorField):
    """``f_ij(y) = a_ij sin(<b_ij, y> + c_ij)``: smooth, bounded, non-commuting."""

    def __init__(self, a, b, c):
        self.a = np.asarray(a, dtype=float)
        self.n, self.d = self.a.shape
        self.b = np.asarray(b, dtype=float).reshape(self.n, self.d, self.n)
        self.c = np.asarray(c, dtype=float).reshape(self.n, self.d)
        self.lip_alpha = np.inf
        self.name = "trig"

    def _phase(self, ys):
        return np.einsum("ijk,Nk->Nij", self.b, ys) + self.c[None]

    def eval_batch(self, ys):
        return self.a[None] * np.sin(self._phase(ys))

    def jacobian_batch(self, ys):
        return (self.a[None] * np.cos(self._phase(ys)))[..., None] * self.b[None]

    def bounds(self):
        return float(np.linalg.norm(self.a)), float(np.sqrt(np.sum(self.a[..., None] ** 2 * self.b**2)))

    def params(self):
        return {"a": self.a.tolist(), "b": self.b.tolist(), "c": self.c.tolist()}


# ------------------------------------------------------------------ presets

def constant_field(C) -> ConstantField:
    return ConstantField(C)


def linear_field(M, radius: float = 10.0, width: float = 1.0) -> AffineTruncatedField:
    """``f(y) = M y`` (M of shape (n, d, n)) clipped smoothly outside ``radius``."""
    M = np.asarray(M, dtype=float)
    if M.ndim == 0:
        M = M.reshape(1, 1, 1)
    elif M.ndim == 2:  # n x n acting for a scalar driver
        M = M[:, None, :]
    return AffineTruncatedField(M, None, radius, width, name="linear")


def rotation_field(d: int = 1, speeds=None, radius: float = 10.0, width: float = 1.0) -> AffineTruncatedField:
    """Planar rotations ``f(y)[:, j] = s_j J psi(y)``; commuting, so area-blind."""
    s = np.ones(d) if speeds is None else np.asarray(speeds, dtype=float)
    J = np.array([[0.0, -1.0], [1.0, 0.0]])
    T = np.stack([sj * J for sj in s], axis=1)
    return AffineTruncatedField(T, None, radius, width, name="rotation")


def trig_field(n: int, d: int, rng: np.random.Generator, scale: float = 1.0, freq: float = 1.0) -> TrigField:
    a = scale * rng.standard_normal((n, d)) / np.sqrt(n * d)
    b = freq * rng.standard_normal((n, d, n)) / np.sqrt(n)
    c = rng.uniform(0, 2 * np.pi, (n, d))
    return TrigField(a, b, c)


def from_preset(name: str, n: int, d: int, params: dict | None = None, rng=None) -> VectorField:
    """Build a field from a preset name and parameters (as found in configs)."""
    params = dict(params or {})
    rng = np.random.default_rng(0) if rng is None else rng
    if name == "constant":
        C = params.pop("C", None)
        C = np.eye(n, d) if C is None else C
        out = ConstantField(C)
    elif name in ("linear", "linear-truncated"):
        M = params.pop("M", None)
        if M is None:
            M = rng.standard_normal((n, d, n)) / np.sqrt(n * d)
        out = linear_field(M, params.pop("radius", 10.0), params.pop("width", 1.0))
    elif name == "rotation":
        if n != 2:
            raise ValueError("rotation preset needs a 2-dimensional state")
        out = rotation_field(d, params.pop("speeds", None), params.pop("radius", 10.0), params.pop("width", 1.0))
    elif name == "trig":
        out = trig_field(n, d, rng, params.pop("scale", 1.0), params.pop("freq", 1.0))
    elif name == "tabulated":
        out = AffineTruncatedField(params.pop("T"), params.pop("c", None), params.pop("radius", 10.0),
                                   params.pop("width", 1.0), name="tabulated")
    else:
        raise ValueError(f"unknown field preset {name!r}")
    if params:
        raise ValueError(f"unknown field parameters {sorted(params)}")
    if (out.n, out.d) != (n, d):
        raise ValueError(f"preset gives a {out.n}x{out.d} field, expected {n}x{d}")
    return out
