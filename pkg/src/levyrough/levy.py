"""Lévy driving paths and Lévy-measure indices.

Paths are drift + Brownian part + compensated jumps of size in (eps, 1] +
uncompensated jumps of size > 1. Jumps of size <= eps are dropped (their
compensated contribution has mean zero). Every retained jump is placed at
its exact time and registered on the returned :class:`SamplePath`.

Radial measures (the eta example, isotropic stable laws, tabulated
densities) are described by a magnitude measure ``rho(dr)`` on ``r > 0``
with a uniformly distributed direction; in one dimension this is the
symmetric measure with density ``rho(|x|)/2`` on each side.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gamma as gamma_fn
from math import cos, pi

import numpy as np
from scipy import integrate, stats

from .paths import Jump, SamplePath

__all__ = [
    "IndeterminateIndex",
    "LevyMeasureSpec",
    "LevyModel",
    "bg_index",
    "eta_bands",
    "eta_measure",
    "eta_partial_integrals",
    "eta_partial_sums",
    "rng_stream",
    "sample_coupled_paths",
    "sample_path",
    "stable_cms",
    "stable_marginal",
]

BIG_JUMP = 1.0


def rng_stream(seed: int, *stream: int) -> np.random.Generator:
    """Counter-based generator for ``(seed, *stream)``; one stream per path.

    ``seed`` may itself be a tuple such as ``(seed, trial)``.
    """
    if seed is None:
        raise ValueError("an explicit seed is required")
    words = [int(w) & 0xFFFFFFFFFFFFFFFF for w in _flatten((seed, *stream))]
    ss = np.random.SeedSequence(words)
    return np.random.Generator(np.random.Philox(ss))


def _flatten(items):
    for it in items:
        if isinstance(it, (tuple, list)):
            yield from _flatten(it)
        else:
            yield it


class IndeterminateIndex(RuntimeError):
    pass


# --------------------------------------------------------------------- eta

def eta_bands(m: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``k, log(lo_k), log(hi_k)`` for ``J_k = ((k+1)^{-3(k+1)}, k^{-3k}]``."""
    k = np.arange(1, m + 1, dtype=float)
    return k, -3.0 * (k + 1) * np.log(k + 1), -3.0 * k * np.log(k)


def _band_moments(k, log_lo, log_hi, alpha: float) -> np.ndarray:
    """``2 * int_{J_k} r^alpha r^{-3+1/k} dr`` per band, overflow -> inf."""
    e = alpha - 2.0 + 1.0 / k
    out = np.empty_like(k)
    small = np.abs(e) < 1e-12
    out[small] = 2.0 * (log_hi[small] - log_lo[small])
    es, lo, hi = e[~small], log_lo[~small], log_hi[~small]
    with np.errstate(over="ignore"):
        # [r^e / e]_{lo}^{hi}, written to stay finite as long as possible
        pos = es > 0
        val = np.empty_like(es)
        val[pos] = np.exp(es[pos] * hi[pos]) * -np.expm1(es[pos] * (lo[pos] - hi[pos])) / es[pos]
        neg = ~pos
        val[neg] = np.exp(es[neg] * lo[neg]) * -np.expm1(es[neg] * (hi[neg] - lo[neg])) / -es[neg]
    out[~small] = 2.0 * val
    return out


def eta_partial_sums(m: int, alpha: float) -> np.ndarray:
    """``S_1..S_m`` with ``S_j = int |x|^alpha eta_j(dx)`` (closed form)."""
    k, lo, hi = eta_bands(m)
    with np.errstate(over="ignore", invalid="ignore"):
        return np.cumsum(_band_moments(k, lo, hi, alpha))


def eta_partial_integrals(m: int, alpha: float) -> float:
    """``int_{|x|<=1} |x|^alpha eta_m(dx)`` via the antiderivative brackets."""
    if m < 1:
        raise ValueError("m >= 1")
    return float(eta_partial_sums(m, alpha)[-1])


# --------------------------------------------------------------- measures

_KINDS = ("zero", "alpha_stable", "compound_poisson", "eta_example", "tabulated")
_LAWS = ("uniform_ball", "gaussian", "point_masses")


@dataclass(frozen=True)
class LevyMeasureSpec:
    kind: str
    dimension: int = 1
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown measure kind {self.kind!r}")
        if self.dimension < 1:
            raise ValueError("dimension >= 1")
        p = self.params
        if self.kind == "alpha_stable":
            if not 0 < p["alpha"] < 2:
                raise ValueError("stable index must lie in (0, 2)")
            if p.get("scale", 1.0) <= 0:
                raise ValueError("stable scale must be positive")
        elif self.kind == "compound_poisson":
            if not p["rate"] > 0:
                raise ValueError("compound Poisson rate must be positive")
            if p.get("law", "uniform_ball") not in _LAWS:
                raise ValueError(f"unknown jump law {p.get('law')!r}")
            if p.get("law") == "point_masses":
                atoms = np.asarray(p["atoms"], dtype=float).reshape(-1, self.dimension)
                w = np.asarray(p.get("weights", np.ones(len(atoms))), dtype=float)
                if w.shape != (atoms.shape[0],) or np.any(w < 0) or w.sum() <= 0:
                    raise ValueError("point-mass weights must be nonnegative, one per atom")
        elif self.kind == "eta_example":
            if int(p.get("m_max", 100_000)) < 1:
                raise ValueError("m_max >= 1")
        elif self.kind == "tabulated":
            r = np.asarray(p["radii"], dtype=float)
            g = np.asarray(p["density"], dtype=float)
            if r.ndim != 1 or r.shape != g.shape or r.size < 2:
                raise ValueError("tabulated density needs matching 1-d radii and values")
            if r[0] <= 0 or np.any(np.diff(r) <= 0) or np.any(g < 0):
                raise ValueError("radii must be positive increasing, density nonnegative")

    # constructors -------------------------------------------------------
    @classmethod
    def zero(cls, dimension: int = 1):
        return cls("zero", dimension)

    @classmethod
    def alpha_stable(cls, alpha: float, scale: float = 1.0, dimension: int = 1, isotropic: bool = False):
        """Symmetric stable measure: density ``scale |x|^{-1-alpha}`` per side.

        Non-isotropic means independent coordinates (mass on the axes).
        """
        return cls("alpha_stable", dimension, {"alpha": float(alpha), "scale": float(scale), "isotropic": bool(isotropic)})

    @classmethod
    def compound_poisson(cls, rate: float, law: str = "uniform_ball", dimension: int = 2, **law_params):
        return cls("compound_poisson", dimension, {"rate": float(rate), "law": law, **law_params})

    @classmethod
    def eta_example(cls, m_max: int = 100_000, dimension: int = 1):
        return cls("eta_example", dimension, {"m_max": int(m_max)})

    @classmethod
    def tabulated(cls, radii, density, dimension: int = 1):
        return cls("tabulated", dimension, {"radii": tuple(map(float, radii)), "density": tuple(map(float, density))})

    # structure -----------------------------------------------------------
    @property
    def is_radial(self) -> bool:
        return self.kind in ("eta_example", "tabulated") or (
            self.kind == "alpha_stable" and (self.params["isotropic"] or self.dimension == 1)
        )

    @property
    def has_big_jumps(self) -> bool:
        """Whether the measure charges ``|x| > 1``."""
        if self.kind == "zero" or self.kind == "eta_example":
            return False
        if self.kind == "alpha_stable":
            return True
        if self.kind == "tabulated":
            return self.params["radii"][-1] > BIG_JUMP
        law = self.params.get("law", "uniform_ball")
        if law == "uniform_ball":
            return self.params.get("radius", 1.0) > BIG_JUMP
        if law == "gaussian":
            return True
        atoms = np.asarray(self.params["atoms"], dtype=float).reshape(-1, self.dimension)
        return bool(np.any(np.linalg.norm(atoms, axis=1) > BIG_JUMP))

    def _radial_pieces(self, eps: float):
        """Pieces ``(mass, sampler)`` of ``rho`` restricted to ``r > eps``."""
        p = self.params
        pieces = []
        if self.kind == "eta_example":
            k, llo, lhi = eta_bands(int(p["m_max"]))
            lo, hi = np.exp(llo), np.exp(lhi)
            for kk, a, b in zip(k, lo, hi):
                if b <= eps:
                    break
                a = max(a, eps)
                expo = 3.0 - 1.0 / kk
                pieces.append((2.0 * _powerlaw_mass(a, b, expo), _powerlaw_sampler(a, b, expo)))
        elif self.kind == "alpha_stable":
            alpha, c = p["alpha"], p.get("scale", 1.0)
            pieces.append((2.0 * c * eps**-alpha / alpha, _powerlaw_sampler(eps, np.inf, 1.0 + alpha)))
        elif self.kind == "tabulated":
            r = np.asarray(p["radii"])
            g = np.asarray(p["density"])
            if r[-1] > eps:
                r, g = _clip_table(r, g, eps)
                cell = 0.5 * (g[1:] + g[:-1]) * np.diff(r)
                pieces.append((float(cell.sum()), _table_sampler(r, g, cell)))
        return pieces

    def jump_rate(self, eps: float) -> float:
        """Mass of ``{|x| > eps}``."""
        if self.kind == "zero":
            return 0.0
        if self.kind == "compound_poisson":
            return self.params["rate"] * self._law_tail(eps)
        mass = sum(m for m, _ in self._radial_pieces(eps))
        if self.kind == "alpha_stable" and not self.is_radial:
            mass *= self.dimension
        return float(mass)

    def _law_tail(self, eps: float) -> float:
        p, d = self.params, self.dimension
        law = p.get("law", "uniform_ball")
        if law == "uniform_ball":
            R = p.get("radius", 1.0)
            return 1.0 - min(1.0, eps / R) ** d
        if law == "gaussian":
            s = p.get("sigma", 0.3)
            return float(stats.chi2.sf((eps / s) ** 2, d))
        atoms = np.asarray(p["atoms"], dtype=float).reshape(-1, d)
        w = np.asarray(p.get("weights", np.ones(len(atoms))), dtype=float)
        w = w / w.sum()
        return float(w[np.linalg.norm(atoms, axis=1) > eps].sum())

    def sample_jumps(self, horizon: float, eps: float, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
        """Times and sizes of all jumps with ``|x| > eps`` on ``[0, horizon]``."""
        d = self.dimension
        if self.kind == "zero":
            return np.zeros(0), np.zeros((0, d))
        if self.kind == "compound_poisson":
            n = rng.poisson(self.params["rate"] * horizon)
            times = np.sort(rng.uniform(0.0, horizon, n))
            sizes = self._sample_law(n, rng)
            keep = np.linalg.norm(sizes, axis=1) > eps
            return times[keep], sizes[keep]
        pieces = self._radial_pieces(eps)
        masses = np.array([m for m, _ in pieces])
        total = masses.sum() * (d if self.kind == "alpha_stable" and not self.is_radial else 1)
        n = rng.poisson(total * horizon)
        times = np.sort(rng.uniform(0.0, horizon, n))
        which = rng.choice(len(pieces), size=n, p=masses / masses.sum()) if n else np.zeros(0, dtype=int)
        r = np.empty(n)
        for i, (_, sampler) in enumerate(pieces):
            sel = which == i
            r[sel] = sampler(rng, int(sel.sum()))
        if self.kind == "alpha_stable" and not self.is_radial:
            axis = rng.integers(0, d, n)
            sign = rng.choice([-1.0, 1.0], n)
            sizes = np.zeros((n, d))
            sizes[np.arange(n), axis] = sign * r
        else:
            sizes = _uniform_directions(rng, n, d) * r[:, None]
        return times, sizes

    def _sample_law(self, n: int, rng) -> np.ndarray:
        p, d = self.params, self.dimension
        law = p.get("law", "uniform_ball")
        if law == "uniform_ball":
            R = p.get("radius", 1.0)
            return _uniform_directions(rng, n, d) * (R * rng.uniform(size=n) ** (1.0 / d))[:, None]
        if law == "gaussian":
            return p.get("sigma", 0.3) * rng.standard_normal((n, d))
        atoms = np.asarray(p["atoms"], dtype=float).reshape(-1, d)
        w = np.asarray(p.get("weights", np.ones(len(atoms))), dtype=float)
        return atoms[rng.choice(len(atoms), size=n, p=w / w.sum())]

    def compensator(self, eps: float) -> np.ndarray:
        """``int_{eps < |x| <= 1} x nu(dx)``."""
        d = self.dimension
        if self.kind != "compound_poisson" or self.params.get("law") != "point_masses":
            return np.zeros(d)  # symmetric measures
        atoms = np.asarray(self.params["atoms"], dtype=float).reshape(-1, d)
        w = np.asarray(self.params.get("weights", np.ones(len(atoms))), dtype=float)
        w = self.params["rate"] * w / w.sum()
        r = np.linalg.norm(atoms, axis=1)
        sel = (r > eps) & (r <= BIG_JUMP)
        return (w[sel, None] * atoms[sel]).sum(axis=0)

    def radial_moment(self, alpha: float, lo: float = 0.0, hi: float = 1.0, rtol: float = 1e-10) -> float:
        """``int_{lo < r <= hi} r^alpha rho(dr)`` by adaptive quadrature."""
        if not self.is_radial:
            raise ValueError("radial moment needs a radial measure")
        p = self.params
        if self.kind == "alpha_stable":
            c, a = p.get("scale", 1.0), p["alpha"]
            f, breaks = (lambda r: 2 * c * r ** (alpha - 1 - a)), []
        elif self.kind == "eta_example":
            k, llo, lhi = eta_bands(int(p["m_max"]))
            total = 0.0
            for kk, a, b in zip(k, np.exp(llo), np.exp(lhi)):
                a, b = max(a, lo), min(b, hi)
                if a < b:
                    e = alpha - 3.0 + 1.0 / kk
                    # substitute r = exp(u) so narrow bands near 0 stay resolved
                    val, _ = integrate.quad(lambda u: 2.0 * np.exp((e + 1.0) * u), np.log(a), np.log(b),
                                            epsabs=0.0, epsrel=rtol, limit=200)
                    total += val
            return total
        else:
            r = np.asarray(p["radii"])
            g = np.asarray(p["density"])
            lo, hi = max(lo, r[0]), min(hi, r[-1])
            if lo >= hi:
                return 0.0
            f = lambda x: x**alpha * np.interp(x, r, g)  # noqa: E731
            breaks = [x for x in r if lo < x < hi]
        if lo <= 0 and self.kind == "alpha_stable" and alpha <= p["alpha"]:
            return np.inf
        val, _ = integrate.quad(f, lo, hi, points=breaks[:100] or None, epsabs=0.0, epsrel=rtol, limit=400)
        return float(val)

    def second_moments(self, rtol: float = 1e-10) -> np.ndarray:
        """``int_{|x| <= 1} x x^T nu(dx)`` as a d x d matrix."""
        d, p = self.dimension, self.params
        if self.kind == "zero":
            return np.zeros((d, d))
        if self.kind == "compound_poisson":
            law, rate = p.get("law", "uniform_ball"), p["rate"]
            if law == "uniform_ball":
                R = p.get("radius", 1.0)
                m2 = R**2 / (d + 2) if R <= 1 else 1.0 / ((d + 2) * R**d)
                return rate * m2 * np.eye(d)
            if law == "gaussian":
                s = p.get("sigma", 0.3)
                return rate * s**2 * stats.chi2.cdf(1.0 / s**2, d + 2) * np.eye(d)
            atoms = np.asarray(p["atoms"], dtype=float).reshape(-1, d)
            w = np.asarray(p.get("weights", np.ones(len(atoms))), dtype=float)
            w = rate * w / w.sum()
            sel = np.linalg.norm(atoms, axis=1) <= 1
            return np.einsum("k,ki,kj->ij", w[sel], atoms[sel], atoms[sel])
        if self.kind == "alpha_stable" and not self.is_radial:
            a, c = p["alpha"], p.get("scale", 1.0)
            return 2 * c / (2 - a) * np.eye(d)
        return self.radial_moment(2.0, rtol=rtol) / d * np.eye(d)


def eta_measure(m_max: int = 100_000, dimension: int = 1) -> LevyMeasureSpec:
    return LevyMeasureSpec.eta_example(m_max, dimension)


def _powerlaw_mass(a: float, b: float, expo: float) -> float:
    # int_a^b r^{-expo} dr, expo > 1
    return (a ** (1 - expo) - (0.0 if np.isinf(b) else b ** (1 - expo))) / (expo - 1)


def _powerlaw_sampler(a: float, b: float, expo: float):
    ea = a ** (1 - expo)
    eb = 0.0 if np.isinf(b) else b ** (1 - expo)

    def draw(rng, n):
        u = rng.uniform(size=n)
        return (ea + u * (eb - ea)) ** (1.0 / (1 - expo))

    return draw


def _clip_table(r, g, eps):
    if r[0] >= eps:
        return r, g
    ge = np.interp(eps, r, g)
    keep = r > eps
    return np.concatenate([[eps], r[keep]]), np.concatenate([[ge], g[keep]])


def _table_sampler(r, g, cell):
    cdf = np.concatenate([[0.0], np.cumsum(cell)])

    def draw(rng, n):
        u = rng.uniform(size=n) * cdf[-1]
        i = np.clip(np.searchsorted(cdf, u, side="right") - 1, 0, len(cell) - 1)
        h = r[i + 1] - r[i]
        g0, s = g[i], (g[i + 1] - g[i]) / h
        m = u - cdf[i]
        # solve g0 x + s x^2 / 2 = m on [0, h]
        with np.errstate(divide="ignore", invalid="ignore"):
            x = np.where(np.abs(s) * h < 1e-12 * np.maximum(g0, 1e-300),
                         m / np.maximum(g0, 1e-300),
                         2 * m / (g0 + np.sqrt(np.maximum(g0**2 + 2 * s * m, 0.0))))
        return r[i] + np.clip(x, 0.0, h)

    return draw


def _uniform_directions(rng, n, d):
    if d == 1:
        return rng.choice([-1.0, 1.0], size=(n, 1))
    z = rng.standard_normal((n, d))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


# -------------------------------------------------------------------- model

@dataclass(frozen=True, eq=False)
class LevyModel:
    drift: np.ndarray
    gaussian_cov: np.ndarray
    levy_measure: LevyMeasureSpec
    big_jump_threshold: float = BIG_JUMP

    def __post_init__(self):
        d = self.levy_measure.dimension
        drift = np.asarray(self.drift, dtype=float).reshape(-1)
        cov = np.asarray(self.gaussian_cov, dtype=float)
        if drift.shape != (d,) or cov.shape != (d, d):
            raise ValueError("drift/covariance dimension does not match the Lévy measure")
        if not np.allclose(cov, cov.T, atol=1e-12):
            raise ValueError("Gaussian covariance must be symmetric")
        ev = np.linalg.eigvalsh(cov)
        if ev.min() < -1e-12 * max(1.0, ev.max()):
            raise ValueError("Gaussian covariance must be positive semidefinite")
        if self.big_jump_threshold != BIG_JUMP:
            raise ValueError("the big-jump threshold is fixed at 1")
        object.__setattr__(self, "drift", drift)
        object.__setattr__(self, "gaussian_cov", cov)

    @property
    def dimension(self) -> int:
        return self.levy_measure.dimension

    @classmethod
    def brownian(cls, dimension: int = 2, cov=None):
        cov = np.eye(dimension) if cov is None else cov
        return cls(np.zeros(dimension), cov, LevyMeasureSpec.zero(dimension))

    @classmethod
    def pure_jump(cls, measure: LevyMeasureSpec, drift=None):
        d = measure.dimension
        return cls(np.zeros(d) if drift is None else drift, np.zeros((d, d)), measure)

    @property
    def is_centred_small_jump_form(self) -> bool:
        """No drift and no jumps above 1: the compensated-martingale form."""
        return not np.any(self.drift) and not self.levy_measure.has_big_jumps

    def total_covariance(self) -> np.ndarray:
        """Gaussian covariance plus ``int_{|x|<=1} x x^T nu(dx)`` per unit time."""
        return self.gaussian_cov + self.levy_measure.second_moments()


def _gaussian_factor(cov):
    w, v = np.linalg.eigh(cov)
    return v * np.sqrt(np.clip(w, 0.0, None))


def sample_coupled_paths(model: LevyModel, horizon: float, grid_points: int, eps_list, seed) -> list[SamplePath]:
    """Paths for several cutoffs sharing the Brownian part and big jumps.

    Jumps are drawn once at the smallest cutoff; the path for a larger
    cutoff keeps the subset above it (thinning), with its own compensator.
    """
    eps_list = [float(e) for e in eps_list]
    if any(not 0 < e <= 1 for e in eps_list):
        raise ValueError("small-jump cutoff must lie in (0, 1]")
    if grid_points < 2:
        raise ValueError("need at least two grid points")
    d = model.dimension
    rng = rng_stream(seed)
    jt, js = model.levy_measure.sample_jumps(horizon, min(eps_list), rng)
    grid = np.linspace(0.0, horizon, grid_points)
    all_t = np.union1d(grid, jt)
    dt = np.diff(all_t)
    factor = _gaussian_factor(model.gaussian_cov)
    bm = np.zeros((all_t.size, d))
    if np.any(factor):
        bm[1:] = np.cumsum(rng.standard_normal((dt.size, d)) @ factor.T * np.sqrt(dt)[:, None], axis=0)
    mags = np.linalg.norm(js, axis=1)
    out = []
    for eps in eps_list:
        keep = mags > eps
        t_keep, s_keep = jt[keep], js[keep]
        times = np.union1d(grid, t_keep)
        pos = np.searchsorted(all_t, times)
        drift = model.drift - model.levy_measure.compensator(eps)
        cont = bm[pos] + times[:, None] * drift[None, :]
        jidx = np.searchsorted(times, t_keep)
        jumps_cum = np.zeros((times.size, d))
        np.add.at(jumps_cum, jidx, s_keep)
        jumps_cum = np.cumsum(jumps_cum, axis=0)
        values = cont + jumps_cum
        # several jumps at one timestamp (float ties) are merged into one
        uniq = np.unique(jidx)
        reg = []
        for i in uniq:
            tot = values[i] - (cont[i] + (jumps_cum[i - 1] if i > 0 else 0.0))
            if i > 0 and np.any(tot != 0):
                reg.append(Jump(int(i), values[i] - tot, values[i]))
        out.append(SamplePath(times, values, tuple(reg)))
    return out


def sample_path(model: LevyModel, horizon: float, grid_points: int, small_jump_cutoff: float, seed) -> SamplePath:
    """One Lévy path on ``grid_points`` uniform times plus its jump times."""
    if small_jump_cutoff <= 0:
        raise ValueError("small-jump cutoff eps must be positive (infinite activity is unresolvable)")
    return sample_coupled_paths(model, horizon, grid_points, [small_jump_cutoff], seed)[0]


# -------------------------------------------------------------- stable laws

def stable_cms(alpha: float, size, rng: np.random.Generator) -> np.ndarray:
    """Chambers-Mallows-Stuck draw of a symmetric stable law, ``E e^{iuZ} = e^{-|u|^alpha}``."""
    v = rng.uniform(-pi / 2, pi / 2, size)
    w = rng.exponential(1.0, size)
    if alpha == 1.0:
        return np.tan(v)
    return np.sin(alpha * v) / np.cos(v) ** (1 / alpha) * (np.cos((1 - alpha) * v) / w) ** ((1 - alpha) / alpha)


def stable_marginal(spec: LevyMeasureSpec, t: float, size: int, rng: np.random.Generator) -> np.ndarray:
    """Exact draws of ``X_t`` for a non-isotropic symmetric stable measure."""
    if spec.kind != "alpha_stable" or spec.is_radial and spec.dimension > 1:
        raise ValueError("stable_marginal handles coordinate-wise symmetric stable measures")
    a, c = spec.params["alpha"], spec.params.get("scale", 1.0)
    sig_a = c * pi if a == 1.0 else 2 * c * gamma_fn(1 - a) * cos(pi * a / 2) / a
    z = stable_cms(a, (size, spec.dimension), rng)
    return (t * sig_a) ** (1 / a) * z


# ------------------------------------------------------------------- index

def _classify(sums: np.ndarray, threshold: float, tol: float) -> str:
    """Classify decade-spaced truncated integrals: converge/diverge/indeterminate."""
    if not np.all(np.isfinite(sums)) or sums[-1] > threshold:
        return "diverge"
    inc = np.diff(sums)
    if inc[-1] <= 1e-15 * max(sums[-1], 1e-300):
        return "converge"
    if inc[-2] <= 0:
        return "indeterminate"
    slope = np.log10(inc[-1] / inc[-2])
    if slope < -tol:
        return "converge"
    if slope > tol:
        return "diverge"
    return "indeterminate"


def _truncated_integrals(spec: LevyMeasureSpec, alpha: float, decades: int) -> np.ndarray:
    if spec.kind == "eta_example":
        m = int(spec.params["m_max"])
        marks = np.unique(np.clip(np.logspace(0, np.log10(m), decades + 1).astype(int), 1, m))
        return eta_partial_sums(m, alpha)[marks - 1]
    r = np.asarray(spec.params["radii"])
    top = min(1.0, r[-1])
    if r[0] >= top:
        return np.zeros(3)
    cuts = np.exp(np.linspace(np.log(top), np.log(r[0]), decades + 1))
    pieces = [spec.radial_moment(alpha, lo=cuts[i + 1], hi=cuts[i], rtol=1e-9) for i in range(decades)]
    return np.cumsum(pieces)


def bg_index(spec: LevyMeasureSpec, *, threshold: float = 1e12, tol: float = 0.02,
             decades: int = 6, bisection_steps: int = 40) -> float:
    """Blumenthal-Getoor index ``inf{alpha > 0 : int_{|y|<=1} |y|^alpha nu(dy) < inf}``.

    Analytic for stable and compound Poisson measures; otherwise bisection
    on ``alpha`` in ``[0, 2]``, classifying each exponent by how the
    truncated integrals grow over successive truncation decades.
    """
    if spec.kind == "zero" or spec.kind == "compound_poisson":
        return 0.0
    if spec.kind == "alpha_stable":
        return float(spec.params["alpha"])
    if spec.kind == "eta_example":
        decades = max(2, min(decades, int(np.log10(spec.params["m_max"]))))
    cls = lambda a: _classify(_truncated_integrals(spec, a, decades), threshold, tol)  # noqa: E731
    top = cls(2.0)
    if top == "diverge":
        raise ValueError("int |x|^2 nu(dx) diverges: not a Lévy measure")
    if top == "indeterminate":
        raise IndeterminateIndex("truncated integrals at alpha = 2 neither converge nor diverge")
    bottom = cls(1e-9)
    if bottom == "converge":
        return 0.0
    if bottom == "indeterminate":
        raise IndeterminateIndex("truncated integrals at alpha -> 0 are indeterminate")
    lo, hi = 0.0, 2.0
    for _ in range(bisection_steps):
        mid = 0.5 * (lo + hi)
        c = cls(mid)
        if c == "converge":
            hi = mid
        elif c == "diverge":
            lo = mid
        else:
            break
    return 0.5 * (lo + hi)
