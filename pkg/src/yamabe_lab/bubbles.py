"""Standard bubbles u_(xi, eps), their translation/dilation kernels, and the region Omega."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import betaln

from .calculus import sphere_area, yamabe_constant
from .errors import DomainEmpty, IndexOutOfRange
from .quadrature import QuadratureEstimate, RadialDensity, RegionSpec, ball_mc

__all__ = [
    "BubbleParams",
    "OmegaDomain",
    "bubble",
    "bubble_mass",
    "bubble_mass_from_yamabe",
    "phi",
    "phi_norm",
    "omega_contains",
]


@dataclass(frozen=True)
class BubbleParams:
    n: int
    xi: tuple
    eps: float

    def __post_init__(self):
        xi = tuple(float(v) for v in np.broadcast_to(np.asarray(self.xi, dtype=float), (self.n,)))
        object.__setattr__(self, "xi", xi)
        if not self.eps > 0:
            raise ValueError("eps must be positive")

    @classmethod
    def centered(cls, n: int, eps: float) -> "BubbleParams":
        return cls(n, (0.0,) * n, eps)

    def scaled(self, lam: float) -> "BubbleParams":
        return BubbleParams(self.n, tuple(lam * v for v in self.xi), lam * self.eps)


@dataclass(frozen=True)
class OmegaDomain:
    """``{|xi| < 1, (n-8)/(3(n+4)) < eps^2 < 2(n-8)/(3(n+4))}``."""

    n: int

    def __post_init__(self):
        if self.n < 9:
            raise DomainEmpty(f"Omega is empty for n={self.n} < 9")

    @property
    def eps2_bounds(self) -> tuple[float, float]:
        n = self.n
        return (n - 8) / (3 * (n + 4)), 2 * (n - 8) / (3 * (n + 4))

    def contains(self, xi, eps: float) -> bool:
        lo, hi = self.eps2_bounds
        return bool(np.linalg.norm(xi) < 1 and lo < eps * eps < hi)


def omega_contains(n: int, xi, eps: float) -> bool:
    return OmegaDomain(n).contains(xi, eps)


def _offsets(params: BubbleParams, x):
    x = np.asarray(x, dtype=float)
    d = x - np.asarray(params.xi)
    s = params.eps**2 + np.sum(d * d, axis=-1)
    return d, s


def bubble(params: BubbleParams, x, order: int = 2):
    """Jet of ``u = (eps / (eps^2 + |x - xi|^2))^((n-2)/2)``.

    Returns ``(u, grad, hess)`` (truncated to ``order``). Works on a single
    point or a batch of shape ``(m, n)``.
    """
    n = params.n
    d, s = _offsets(params, x)
    u = (params.eps / s) ** (0.5 * (n - 2))
    if order == 0:
        return u
    g = -(n - 2) * (u / s)[..., None] * d
    if order == 1:
        return u, g
    c = -(n - 2) * u / s
    hess = c[..., None, None] * (np.eye(n) - n * d[..., :, None] * d[..., None, :] / s[..., None, None])
    return u, g, hess


def bubble_mass(n: int) -> float:
    """``int u^(2n/(n-2)) = |S^(n-1)| B(n/2, n/2) / 2``."""
    if n < 3:
        raise ValueError("n must be >= 3")
    return sphere_area(n) * 0.5 * np.exp(betaln(0.5 * n, 0.5 * n))


def bubble_mass_from_yamabe(n: int) -> float:
    """``(Y(S^n) / (4 n (n-1)))^(n/2)``."""
    return (yamabe_constant(n) / (4 * n * (n - 1))) ** (0.5 * n)


def phi(params: BubbleParams, k: int, x):
    """Kernel ``phi_(xi, eps, k)``: dilation for ``k = 0``, translations for ``1 <= k <= n``.

    ``k`` counts coordinates from one, so ``phi(p, 1, x)`` uses ``x_1 - xi_1``
    (array index 0).
    """
    n = params.n
    if not 0 <= k <= n:
        raise IndexOutOfRange(f"k must lie in [0, {n}], got {k}")
    d, s = _offsets(params, x)
    base = (params.eps / s) ** (0.5 * (n + 2))
    if k == 0:
        return base * (params.eps**2 - (s - params.eps**2)) / s
    return base * 2 * params.eps * d[..., k - 1] / s


def phi_norm(params: BubbleParams, k: int, samples: int = 200_000, seed: int = 42,
             gamma: float = 2.0) -> QuadratureEstimate:
    """Monte-Carlo ``L^(2n/(n+2))`` norm of ``phi_(xi, eps, k)`` over ``R^n``.

    Sampling is centred at ``xi`` with radial proposal ``(eps + r)^(-gamma)``;
    the standard error of the norm follows from the delta method.
    """
    n = params.n
    p = 2 * n / (n + 2)
    region = RegionSpec.full_space(n, r_split=params.eps, center=params.xi)
    est = ball_mc(lambda x: np.abs(phi(params, k, x)) ** p, n, region, samples, seed,
                  importance=RadialDensity(params.eps, gamma))
    norm = est.value ** (1 / p)
    err = norm / (p * est.value) * est.std_err if est.value > 0 else 0.0
    return QuadratureEstimate(float(norm), float(err), est.samples, est.seed)
