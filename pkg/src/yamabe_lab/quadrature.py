"""Seeded Monte-Carlo and adaptive radial quadrature.

Sampling is organized in fixed-size blocks. Block ``b`` of a run with
master seed ``s`` draws from ``numpy.random.SeedSequence(s, spawn_key=(part, b))``
where ``part`` distinguishes the pieces of a split region. Each block is
reduced to ``(count, mean, M2)`` and blocks are merged in index order, so an
estimate is bit-for-bit the same whatever the number of worker threads.
The worker count is capped by the ``YBL_THREADS`` environment variable.
"""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from .errors import BadDensity, ToleranceNotMet

__all__ = [
    "QuadratureEstimate",
    "RegionSpec",
    "RadialDensity",
    "RadialMixture",
    "Moments",
    "agree",
    "sphere_mc",
    "ball_mc",
    "radial_quad",
    "product_integrate",
    "DEFAULT_BLOCK",
]

DEFAULT_BLOCK = 8192
ABS_FLOOR = 1e-12


def _sphere_area(n: int) -> float:
    return math.exp(math.log(2.0) + 0.5 * n * math.log(math.pi) - math.lgamma(0.5 * n))


@dataclass(frozen=True)
class QuadratureEstimate:
    """A numerical integral with its standard error.

    ``value`` and ``std_err`` are floats for scalar integrands and arrays of
    matching shape for tensor-valued ones.
    """

    value: float | np.ndarray
    std_err: float | np.ndarray
    samples: int
    seed: int

    def to_dict(self) -> dict:
        conv = lambda v: v.tolist() if isinstance(v, np.ndarray) else float(v)
        return {"value": conv(self.value), "std_err": conv(self.std_err),
                "samples": int(self.samples), "seed": int(self.seed)}

    def agrees_with(self, reference, k: float = 4.0, floor: float = ABS_FLOOR) -> bool:
        """``|value - reference| <= k * std_err + floor`` entrywise."""
        return bool(np.all(np.abs(np.asarray(self.value) - reference)
                           <= k * np.asarray(self.std_err) + floor))

    def z_score(self, reference):
        diff = np.abs(np.asarray(self.value) - reference)
        std = np.asarray(self.std_err)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(std > 0, diff / std, np.where(diff > 0, np.inf, 0.0))


def agree(a: QuadratureEstimate, b: QuadratureEstimate, k: float = 4.0,
          floor: float = ABS_FLOOR) -> bool:
    """Two independent estimates agree within ``k`` combined standard errors."""
    comb = np.sqrt(np.asarray(a.std_err) ** 2 + np.asarray(b.std_err) ** 2)
    return bool(np.all(np.abs(np.asarray(a.value) - np.asarray(b.value)) <= k * comb + floor))


@dataclass
class Moments:
    """Running ``(count, mean, M2)`` of per-sample estimator values."""

    count: int = 0
    mean: np.ndarray | float = 0.0
    m2: np.ndarray | float = 0.0

    @classmethod
    def of(cls, values: np.ndarray) -> "Moments":
        values = np.asarray(values, dtype=float)
        if values.shape[0] == 0:
            return cls()
        mean = values.mean(axis=0)
        dev = values - mean
        return cls(values.shape[0], mean, np.sum(dev * dev, axis=0))

    def merge(self, other: "Moments") -> "Moments":
        if other.count == 0:
            return self
        if self.count == 0:
            return other
        n = self.count + other.count
        delta = other.mean - self.mean
        mean = self.mean + delta * (other.count / n)
        m2 = self.m2 + other.m2 + delta * delta * (self.count * other.count / n)
        return Moments(n, mean, m2)

    def std_err(self):
        if self.count < 2:
            return np.zeros_like(np.asarray(self.mean, dtype=float))
        var = np.asarray(self.m2) / (self.count - 1)
        return np.sqrt(var / self.count)


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("YBL_THREADS", "1")))
    except ValueError:
        return 1


def _block_sizes(samples: int, block: int) -> list[int]:
    full, rest = divmod(samples, block)
    return [block] * full + ([rest] if rest else [])


def _run_blocks(sample_fn: Callable[[np.random.Generator, int], np.ndarray],
                samples: int, seed: int, part: int = 0, block: int = DEFAULT_BLOCK,
                workers: int | None = None) -> Moments:
    """Evaluate ``sample_fn`` over deterministic blocks and merge in order."""
    sizes = _block_sizes(samples, block)

    def one(b):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(part, b)))
        return Moments.of(sample_fn(rng, sizes[b]))

    workers = workers or _workers()
    if workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(one, range(len(sizes))))
    else:
        parts = [one(b) for b in range(len(sizes))]
    total = Moments()
    for m in parts:
        total = total.merge(m)
    return total


def _to_estimate(m: Moments, samples: int, seed: int) -> QuadratureEstimate:
    value, err = m.mean, m.std_err()
    if np.ndim(value) == 0:
        value, err = float(value), float(err)
    return QuadratureEstimate(value=value, std_err=err, samples=samples, seed=seed)


def _uniform_directions(rng: np.random.Generator, count: int, n: int) -> np.ndarray:
    g = rng.standard_normal((count, n))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def _apply_batched(f, x: np.ndarray, batch: int | None) -> np.ndarray:
    if batch is None or x.shape[0] <= batch:
        return np.asarray(f(x), dtype=float)
    return np.concatenate([np.asarray(f(x[i:i + batch]), dtype=float)
                           for i in range(0, x.shape[0], batch)], axis=0)


def _weighted(vals: np.ndarray, w: np.ndarray) -> np.ndarray:
    return vals * w.reshape((-1,) + (1,) * (vals.ndim - 1))


def sphere_mc(f: Callable[[np.ndarray], np.ndarray], n: int, r: float = 1.0,
              samples: int = 100_000, seed: int = 42, *, block: int = DEFAULT_BLOCK,
              batch: int | None = None, workers: int | None = None) -> QuadratureEstimate:
    """Estimate ``int_{dB_r(0)} f`` with uniform points on the sphere.

    ``f`` receives an ``(m, n)`` array of points of norm ``r`` and returns an
    array whose leading axis has length ``m``.
    """
    if samples < 2:
        raise ValueError("samples must be >= 2")
    area = _sphere_area(n) * r ** (n - 1)

    def sample_fn(rng, count):
        x = r * _uniform_directions(rng, count, n)
        return area * _apply_batched(f, x, batch)

    return _to_estimate(_run_blocks(sample_fn, samples, seed, block=block, workers=workers),
                        samples, seed)


@dataclass(frozen=True)
class RegionSpec:
    """Integration region centred at ``center`` (origin by default).

    ``kind`` is one of ``sphere_radius_r`` (``params=(r,)``), ``ball_radius_r``
    (``(r,)``), ``annulus`` (``(r0, r1)``, ``r1`` may be ``inf``) and
    ``full_space_radial_split`` (``(r_split,)``: a ball plus its exterior).
    """

    kind: str
    n: int
    params: tuple = ()
    center: tuple | None = None

    def __post_init__(self):
        kinds = ("sphere_radius_r", "ball_radius_r", "annulus", "full_space_radial_split")
        if self.kind not in kinds:
            raise ValueError(f"unknown region kind {self.kind!r}")
        p = tuple(float(v) for v in self.params)
        object.__setattr__(self, "params", p)
        if any(v < 0 for v in p) or (self.kind != "annulus" and any(v <= 0 for v in p)):
            raise ValueError("radii must be positive")
        if self.kind == "annulus" and p[0] > p[1]:
            raise ValueError("annulus needs r0 <= r1")

    @classmethod
    def ball(cls, n, r, center=None):
        return cls("ball_radius_r", n, (r,), center)

    @classmethod
    def annulus(cls, n, r0, r1, center=None):
        return cls("annulus", n, (r0, r1), center)

    @classmethod
    def full_space(cls, n, r_split=1.0, center=None):
        return cls("full_space_radial_split", n, (r_split,), center)

    def radial_pieces(self) -> list[tuple[float, float]]:
        if self.kind == "ball_radius_r":
            return [(0.0, self.params[0])]
        if self.kind == "annulus":
            return [(self.params[0], self.params[1])]
        if self.kind == "full_space_radial_split":
            return [(0.0, self.params[0]), (self.params[0], math.inf)]
        raise ValueError("a sphere is not a solid region")


@dataclass(frozen=True)
class RadialDensity:
    """Radial proposal ``q(r) ∝ (scale + r)^(-gamma)`` on an interval."""

    scale: float = 1.0
    gamma: float = 2.0

    def _check(self, r0, r1):
        if self.scale <= 0:
            raise BadDensity("scale must be positive")
        if math.isinf(r1) and self.gamma <= 1:
            raise BadDensity(f"gamma={self.gamma} is not normalizable on [{r0}, inf)")

    def normalizer(self, r0: float, r1: float) -> float:
        self._check(r0, r1)
        lam, g = self.scale, self.gamma
        if g == 1:
            return math.log((lam + r1) / (lam + r0))
        top = 0.0 if math.isinf(r1) else (lam + r1) ** (1 - g)
        return ((lam + r0) ** (1 - g) - top) / (g - 1)

    def sample(self, rng, count, r0, r1) -> tuple[np.ndarray, np.ndarray]:
        """Draw radii by inverse CDF; return ``(r, q(r))`` with exact normalization."""
        Z = self.normalizer(r0, r1)
        lam, g = self.scale, self.gamma
        u = rng.random(count)
        if g == 1:
            r = (lam + r0) * np.exp(u * Z) - lam
        else:
            r = ((lam + r0) ** (1 - g) - u * (g - 1) * Z) ** (1.0 / (1 - g)) - lam
        r = np.clip(r, r0, r1)
        return r, (lam + r) ** (-g) / Z

    def density(self, r, r0: float, r1: float) -> np.ndarray:
        return (self.scale + np.asarray(r)) ** (-self.gamma) / self.normalizer(r0, r1)


@dataclass(frozen=True)
class RadialMixture:
    """Mixture of :class:`RadialDensity` proposals with fixed weights.

    Each draw picks a component, then the weight uses the full mixture
    density, so every component keeps the estimate unbiased.
    """

    components: tuple
    weights: tuple

    def __post_init__(self):
        if len(self.components) != len(self.weights) or not self.components:
            raise BadDensity("components and weights must have equal nonzero length")
        w = np.asarray(self.weights, dtype=float)
        if np.any(w <= 0):
            raise BadDensity("mixture weights must be positive")
        object.__setattr__(self, "weights", tuple(float(v) for v in w / w.sum()))

    def _check(self, r0, r1):
        for c in self.components:
            c._check(r0, r1)

    def density(self, r, r0: float, r1: float) -> np.ndarray:
        return sum(w * c.density(r, r0, r1) for c, w in zip(self.components, self.weights))

    def sample(self, rng, count, r0, r1) -> tuple[np.ndarray, np.ndarray]:
        pick = rng.choice(len(self.components), size=count, p=self.weights)
        r = np.empty(count)
        for k, c in enumerate(self.components):
            sel = pick == k
            if np.any(sel):
                r[sel] = c.sample(rng, int(sel.sum()), r0, r1)[0]
        return r, self.density(r, r0, r1)


def ball_mc(f: Callable[[np.ndarray], np.ndarray], n: int, region: RegionSpec,
            samples: int = 100_000, seed: int = 42, importance: RadialDensity | RadialMixture | None = None,
            *, block: int = DEFAULT_BLOCK, batch: int | None = None,
            workers: int | None = None) -> QuadratureEstimate:
    """Estimate ``int_region f`` with uniform directions and a radial proposal.

    Without ``importance`` radii are drawn uniformly in volume, which
    requires a bounded region. For ``full_space_radial_split`` the samples
    are divided evenly between the inner ball and the exterior.
    """
    if region.kind == "sphere_radius_r":
        return sphere_mc(f, n, region.params[0], samples, seed, block=block, batch=batch,
                         workers=workers)
    center = np.zeros(n) if region.center is None else np.asarray(region.center, dtype=float)
    pieces = region.radial_pieces()
    area = _sphere_area(n)
    counts = _split_count(samples, len(pieces))
    value, var = 0.0, 0.0
    for part, ((r0, r1), count) in enumerate(zip(pieces, counts)):
        if r1 <= r0:
            continue
        if importance is None and math.isinf(r1):
            raise BadDensity("an unbounded region needs an importance density")
        if importance is not None:
            importance._check(r0, r1)

        def sample_fn(rng, m, r0=r0, r1=r1):
            theta = _uniform_directions(rng, m, n)
            if importance is None:
                u = rng.random(m)
                r = (r0 ** n + u * (r1 ** n - r0 ** n)) ** (1.0 / n)
                w = np.full(m, (r1 ** n - r0 ** n) / n * area)
            else:
                r, q = importance.sample(rng, m, r0, r1)
                with np.errstate(divide="ignore"):
                    w = area * np.exp((n - 1) * np.log(r)) / q
            x = center + r[:, None] * theta
            return _weighted(_apply_batched(f, x, batch), w)

        m = _run_blocks(sample_fn, count, seed, part=part, block=block, workers=workers)
        value = value + m.mean
        var = var + np.asarray(m.std_err()) ** 2
    if np.ndim(value) == 0:
        return QuadratureEstimate(float(value), float(np.sqrt(var)), samples, seed)
    return QuadratureEstimate(np.asarray(value), np.sqrt(var), samples, seed)


def _split_count(samples, k):
    base, rest = divmod(samples, k)
    return [base + (1 if i < rest else 0) for i in range(k)]


def radial_quad(f: Callable[[np.ndarray], np.ndarray], tolerance: float = 1e-10,
                limit: int = 500) -> float:
    """``int_0^inf f(r) dr`` by adaptive Gauss-Kronrod after ``r = t / (1 - t)``.

    Raises :class:`ToleranceNotMet` when the reported error exceeds
    ``tolerance`` relative to the value.
    """

    def g(t):
        if t >= 1.0:
            return 0.0
        r = t / (1.0 - t)
        return float(f(np.asarray(r))) / (1.0 - t) ** 2

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(g, 0.0, 1.0, epsabs=0.0, epsrel=tolerance, limit=limit)
    if not math.isfinite(val) or err > tolerance * abs(val) + 1e-300:
        raise ToleranceNotMet(f"radial quadrature error {err:.3g} for value {val:.6g}")
    return val


def product_integrate(radial: Callable | Sequence[Callable], spherical: Callable, n: int,
                      tolerance: float = 1e-10, samples: int = 100_000, seed: int = 42, *,
                      block: int = DEFAULT_BLOCK, batch: int | None = None,
                      workers: int | None = None) -> QuadratureEstimate:
    """Integrate ``sum_k f_k(|x|) P_k(x/|x|)`` over ``R^n``.

    Each ``f_k`` is the full radial weight, Jacobian ``r^(n-1)`` included,
    and is integrated with :func:`radial_quad`. ``spherical`` maps an
    ``(m, n)`` array of unit vectors to ``(m, K, ...)`` (or ``(m, ...)`` for a
    single radial factor). The standard error comes from the sphere average.
    """
    single = callable(radial)
    radials = [radial] if single else list(radial)
    R = np.array([radial_quad(fk, tolerance) for fk in radials])
    area = _sphere_area(n)

    def sample_fn(rng, count):
        theta = _uniform_directions(rng, count, n)
        P = _apply_batched(spherical, theta, batch)
        if single:
            P = P[:, None]
        return area * np.einsum("mk...,k->m...", P, R)

    return _to_estimate(_run_blocks(sample_fn, samples, seed, block=block, workers=workers),
                        samples, seed)
