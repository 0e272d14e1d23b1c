"""Closed-form integrals, sphere moments and the critical-point analysis of F(0, eps).

Radial integrals of the form ``int_0^inf (1 + r^2)^(-alpha) r^beta dr`` are
evaluated through the Beta function in log space. Everything that decides
whether ``(0, eps_*)`` is a certified local minimum is settled in exact
rational arithmetic; floating-point values are reported alongside.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Mapping

import numpy as np
from scipy.special import betaln

from .errors import (
    DimensionTooSmall,
    Divergent,
    NoRealCriticalPoint,
    UnknownKind,
    UnsupportedDegree,
)
from .weyl import H_jet, Hbar_field, M_matrix, WeylForm, random_weyl, weyl_quadratic_norm

__all__ = [
    "RadialIntegralSpec",
    "radial_integral",
    "radial_recurrences_check",
    "sphere_area",
    "sphere_moment",
    "homogeneous_sphere_integral",
    "identity_rhs",
    "identity_integrand",
    "IDENTITY_KINDS",
    "discriminant",
    "discriminant_exact",
    "eps_star",
    "eps_star_squared_bounds",
    "reduced_bracket",
    "F0",
    "dF0_deps",
    "d2F0_deps2",
    "hessian_brackets",
    "hessian_xi_closed",
    "hessian_xi_integral",
    "yamabe_constant",
    "CriticalPointReport",
    "certify_minimum",
    "dimension_scan",
    "SCAN_CSV_HEADER",
]


# --------------------------------------------------------------------------
# radial integrals and spheres


@dataclass(frozen=True)
class RadialIntegralSpec:
    """Integrand ``(1 + r^2)^(-alpha) r^beta`` on ``[0, inf)``."""

    alpha: float
    beta: float

    @property
    def convergent(self) -> bool:
        return self.beta + 1 > 0 and 2 * self.alpha > self.beta + 1


def radial_integral(spec: RadialIntegralSpec | float, beta: float | None = None) -> float:
    """``int_0^inf (1+r^2)^(-alpha) r^beta dr = B((beta+1)/2, alpha-(beta+1)/2) / 2``.

    Accepts either a :class:`RadialIntegralSpec` or ``(alpha, beta)``.
    """
    if not isinstance(spec, RadialIntegralSpec):
        spec = RadialIntegralSpec(float(spec), float(beta))
    if not spec.convergent:
        raise Divergent(f"(1+r^2)^-{spec.alpha} r^{spec.beta} is not integrable on [0, inf)")
    a = 0.5 * (spec.beta + 1.0)
    b = spec.alpha - a
    return 0.5 * math.exp(betaln(a, b))


def radial_recurrences_check(alpha: float, beta: float) -> tuple[float, float]:
    """Ratios lhs/rhs of the two integration-by-parts identities.

    1. ``I(alpha-1, beta) = (2 alpha - 2)/(2 alpha - beta - 3) I(alpha, beta)``
    2. ``I(alpha, beta+2) = (beta + 1)/(2 alpha - beta - 3) I(alpha, beta)``

    Both ratios equal one whenever ``2 alpha - 2 > beta + 1 > 0``.
    """
    if not (2 * alpha - 2 > beta + 1 > 0):
        raise Divergent(f"recurrences need 2*alpha - 2 > beta + 1 > 0, got alpha={alpha}, beta={beta}")
    base = radial_integral(alpha, beta)
    denom = 2 * alpha - beta - 3
    lower_alpha = radial_integral(alpha - 1, beta) / ((2 * alpha - 2) / denom * base)
    raise_beta = radial_integral(alpha, beta + 2) / ((beta + 1) / denom * base)
    return lower_alpha, raise_beta


def sphere_area(m: int) -> float:
    """Area of the unit sphere ``S^(m-1)`` in ``R^m``: ``2 pi^(m/2) / Gamma(m/2)``."""
    if m < 1:
        raise ValueError("m must be >= 1")
    return math.exp(math.log(2.0) + 0.5 * m * math.log(math.pi) - math.lgamma(0.5 * m))


def _pairings(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for k in range(len(rest)):
        for tail in _pairings(rest[:k] + rest[k + 1:]):
            yield [(first, rest[k])] + tail


def sphere_moment(n: int, indices) -> float:
    """``int_{S^(n-1)} x_{i1} ... x_{id}`` for a multi-index of coordinate labels.

    Uses the delta expansion: the sum over perfect pairings of products of
    Kronecker deltas, divided by ``n (n+2) ... (n+d-2)``.
    """
    indices = tuple(int(i) for i in indices)
    d = len(indices)
    if d > 6:
        raise UnsupportedDegree(f"degree {d} > 6")
    if any(i < 0 or i >= n for i in indices):
        raise IndexError("coordinate label out of range")
    if d % 2:
        return 0.0
    matches = sum(all(indices[a] == indices[b] for a, b in p) for p in _pairings(list(range(d))))
    denom = 1
    for j in range(d // 2):
        denom *= n + 2 * j
    return sphere_area(n) * matches / denom


def _laplacian(poly: Mapping[tuple, Fraction]) -> dict[tuple, Fraction]:
    out: dict[tuple, Fraction] = {}
    for exps, c in poly.items():
        for i, e in enumerate(exps):
            if e >= 2:
                new = exps[:i] + (e - 2,) + exps[i + 1:]
                out[new] = out.get(new, Fraction(0)) + c * e * (e - 1)
    return {k: v for k, v in out.items() if v != 0}


def homogeneous_sphere_integral(p: Mapping[tuple, float], n: int, exact: bool = False):
    """Integrate a polynomial over the unit sphere by repeated Laplacian reduction.

    ``p`` maps exponent tuples (length ``n``) to coefficients. Each homogeneous
    part of degree ``d`` is reduced with ``int p = int(Laplace p) / (d (n + d - 2))``
    until degree zero. With ``exact=True`` the rational multiple of
    ``|S^(n-1)|`` is returned as a :class:`Fraction`.
    """
    parts: dict[int, dict[tuple, Fraction]] = {}
    for exps, c in p.items():
        exps = tuple(int(e) for e in exps)
        if len(exps) != n:
            raise ValueError(f"exponent tuple {exps} does not have length {n}")
        c = Fraction(c) if not isinstance(c, Fraction) else c
        if c == 0:
            continue
        d = sum(exps)
        parts.setdefault(d, {})
        parts[d][exps] = parts[d].get(exps, Fraction(0)) + c

    total = Fraction(0)
    for d, poly in parts.items():
        factor = Fraction(1)
        while d > 0 and poly:
            factor /= d * (n + d - 2)
            poly = _laplacian(poly)
            d -= 2
        if d == 0 and poly:
            total += factor * sum(poly.values())
    if exact:
        return total
    return float(total) * sphere_area(n)


# --------------------------------------------------------------------------
# sphere integral identities for H and Hbar

IDENTITY_KINDS = ("grad_H", "H_sq", "grad_Hbar", "grad_Hbar_total", "Hbar_pair")


def identity_rhs(kind: str, W: WeylForm, r: float, p: int | None = None, q: int | None = None):
    """Closed-form value of a sphere integral over ``dB_r(0)``.

    ==================  ===================================================
    ``grad_H``          ``int sum (d_l H_ik)^2 x_p x_q``
    ``H_sq``            ``int sum H_ik^2 x_p x_q``
    ``grad_Hbar``       ``int sum (d_l Hbar_ik)^2 x_p x_q``
    ``grad_Hbar_total`` ``int sum (d_l Hbar_ik)^2`` (scalar)
    ``Hbar_pair``       ``int sum_l Hbar_pl Hbar_ql``
    ==================  ===================================================

    Matrix-valued kinds return the full ``n x n`` matrix unless ``p`` and
    ``q`` are given.
    """
    if kind not in IDENTITY_KINDS:
        raise UnknownKind(kind)
    n = W.n
    S = sphere_area(n)
    N = weyl_quadratic_norm(W)
    if kind == "grad_Hbar_total":
        br = r ** (n + 1) - 2 * (n + 4) / (n + 2) * r ** (n + 3) + (n + 8) / (n + 2) * r ** (n + 5)
        return S * N * br / n
    M = M_matrix(W)
    I = np.eye(n)
    if kind == "grad_H":
        out = (2 * M + N * I) * S * r ** (n + 3) / (n * (n + 2))
    elif kind == "H_sq":
        out = (2 * M + 0.5 * N * I) * S * r ** (n + 5) / (n * (n + 2) * (n + 4))
    elif kind == "grad_Hbar":
        m_br = r ** (n + 3) - 2 * (n + 8) / (n + 4) * r ** (n + 5) + (n + 16) / (n + 4) * r ** (n + 7)
        d_br = r ** (n + 3) - 2 * (n + 6) / (n + 4) * r ** (n + 5) + (n + 10) / (n + 4) * r ** (n + 7)
        out = (2 * M * m_br + N * I * d_br) * S / (n * (n + 2))
    else:  # Hbar_pair
        out = M * S * r ** (n + 3) * (1 - r * r) ** 2 / (2 * n * (n + 2))
    if p is not None and q is not None:
        return float(out[p, q])
    return out


def identity_integrand(kind: str, W: WeylForm, x) -> np.ndarray:
    """Pointwise integrand of :func:`identity_rhs` on a batch of points ``(m, n)``."""
    if kind not in IDENTITY_KINDS:
        raise UnknownKind(kind)
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if kind in ("grad_H", "H_sq"):
        H, dH = H_jet(W, x, order=1)
        w = np.einsum("mikl,mikl->m", dH, dH) if kind == "grad_H" else np.einsum("mik,mik->m", H, H)
        return w[:, None, None] * x[:, :, None] * x[:, None, :]
    Hb, dHb = Hbar_field(W, x, with_gradient=True)
    if kind == "Hbar_pair":
        return np.einsum("mpl,mql->mpq", Hb, Hb)
    w = np.einsum("mikl,mikl->m", dHb, dHb)
    if kind == "grad_Hbar_total":
        return w
    return w[:, None, None] * x[:, :, None] * x[:, None, :]


# --------------------------------------------------------------------------
# F(0, eps) and its critical scale


def _check_F_dimension(n: int) -> None:
    if n <= 10:
        raise DimensionTooSmall(f"F(0, eps) needs n > 10, got n={n}")


def _coeffs(n: int) -> tuple[Fraction, Fraction]:
    """Coefficients ``a = (n-8)/(n+4)`` and ``b = (n+8)/(n-10)`` of the reduced bracket."""
    return Fraction(n - 8, n + 4), Fraction(n + 8, n - 10)


def discriminant_exact(n: int) -> Fraction:
    """``9 - 8 (n+8)(n-8) / ((n+4)(n-10))`` as an exact rational."""
    _check_F_dimension(n)
    return 9 - Fraction(8 * (n + 8) * (n - 8), (n + 4) * (n - 10))


def discriminant(n: int) -> float:
    return float(discriminant_exact(n))


def eps_star(n: int) -> float:
    """Critical scale from ``(3 + sqrt(D)) eps^2 = 2 (n-8)/(n+4)``.

    This is the smaller root ``t = eps^2`` of ``2 b t^2 - 3 t + a = 0``,
    written without the subtractive branch of the quadratic formula.
    """
    D = discriminant_exact(n)
    if D < 0:
        raise NoRealCriticalPoint(f"discriminant {float(D):.6g} < 0 for n={n}")
    a, _ = _coeffs(n)
    return math.sqrt(float(2 * a) / (3.0 + math.sqrt(float(D))))


def eps_star_squared_bounds(n: int) -> tuple[float, float]:
    """Open interval for ``eps^2`` defining the admissible region."""
    return (n - 8) / (3 * (n + 4)), 2 * (n - 8) / (3 * (n + 4))


def reduced_bracket(n: int, eps: float, order: int = 0) -> float:
    """``B(eps) = a eps^4 - 2 eps^6 + b eps^8`` or its ``order``-th eps-derivative."""
    a, b = (float(c) for c in _coeffs(n))
    e = eps
    if order == 0:
        return a * e**4 - 2 * e**6 + b * e**8
    if order == 1:
        return 4 * a * e**3 - 12 * e**5 + 8 * b * e**7
    if order == 2:
        return 12 * a * e**2 - 60 * e**4 + 56 * b * e**6
    raise ValueError("order must be 0, 1 or 2")


def _weyl_norm(W) -> float:
    if isinstance(W, WeylForm):
        return weyl_quadratic_norm(W)
    return float(W)


def _F0_prefactor(n: int, W) -> float:
    """Positive constant K with ``F(0, eps) = -K B(eps)``."""
    _check_F_dimension(n)
    return ((n - 2) * (n + 4) / (16 * n * (n - 1) * (n + 2)) * sphere_area(n)
            * _weyl_norm(W) * radial_integral(n - 2, n + 3))


def F0(n: int, W, eps: float) -> float:
    """Closed form of ``F(0, eps)``.

    ``W`` is a :class:`WeylForm` or its precomputed quadratic norm.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    return -_F0_prefactor(n, W) * reduced_bracket(n, eps)


def dF0_deps(n: int, W, eps: float) -> float:
    return -_F0_prefactor(n, W) * reduced_bracket(n, eps, 1)


def d2F0_deps2(n: int, W, eps: float) -> float:
    return -_F0_prefactor(n, W) * reduced_bracket(n, eps, 2)


# --------------------------------------------------------------------------
# xi-Hessian at (0, eps)


def hessian_brackets(n: int, eps: float) -> tuple[float, float]:
    """``(eps^4 - 3(n+6)/(2(n-8)) eps^6, eps^4 - (n+7)/(n-8) eps^6)``."""
    e2 = eps * eps
    return (e2 * e2 - 3 * (n + 6) / (2 * (n - 8)) * e2**3,
            e2 * e2 - (n + 7) / (n - 8) * e2**3)


def _hessian_coeffs(n: int) -> tuple[float, float, float]:
    if n <= 8:
        raise DimensionTooSmall(f"the xi-Hessian formula needs n > 8, got n={n}")
    c1 = 4 * (n - 2) ** 2 * sphere_area(n) / (n * (n + 2) * (n + 4))
    return c1, 0.25 * c1, radial_integral(n, n + 5)


def hessian_xi_closed(n: int, W: WeylForm, eps: float) -> np.ndarray:
    """Closed-form ``d^2 F / d xi_p d xi_q`` at ``(0, eps)``."""
    c1, c2, I = _hessian_coeffs(n)
    b1, b2 = hessian_brackets(n, eps)
    M = M_matrix(W)
    N = weyl_quadratic_norm(W)
    return c1 * b1 * I * M + c2 * N * b2 * I * np.eye(n)


def hessian_xi_integral(n: int, W: WeylForm, eps: float, samples: int = 100_000,
                        seed: int = 42, tolerance: float = 1e-10,
                        target_rel_err: float | None = None):
    """Three-integral representation of the xi-Hessian, evaluated numerically.

    Each term factors into a radial profile times a function of the
    direction ``theta``. Radial factors go through adaptive quadrature and
    the direction averages through Monte-Carlo sphere sampling; all terms
    share the same direction samples, so the returned standard errors
    account for their correlation.

    ``target_rel_err`` bounds the largest entrywise ``std_err`` relative to
    the largest absolute entry; :class:`OracleBudgetExceeded` is raised when
    the sample budget does not reach it.
    """
    from .quadrature import product_integrate
    from .errors import OracleBudgetExceeded
    from .weyl import H_jet

    if n <= 8:
        raise DimensionTooSmall(f"n must exceed 8, got {n}")
    log_eps = math.log(eps)

    def radial(power: int, k_shift: int, poly):
        # pref * (eps^2 + r^2)^(-(n - k_shift)) * poly(r) * r^(n - 1 + power)
        def f(r):
            r = np.asarray(r, dtype=float)
            with np.errstate(divide="ignore"):
                lr = np.log(r)
            logw = ((n - 2) * log_eps - (n - k_shift) * np.log(eps * eps + r * r)
                    + (n - 1 + power) * lr)
            return (n - 2) ** 2 * poly(r) * np.exp(logw)
        return f

    one = lambda r: np.ones_like(r)
    s1 = lambda r: (1 - r * r) ** 2
    s2 = lambda r: -4 * (1 - r * r)
    c3 = 1.0 / (8 * (n - 1))

    # Term 1: sum_l Hbar_pl Hbar_ql = (1-r^2)^2 r^4 (H H^T)(theta)
    # Term 2: -(1/4) sum (d Hbar)^2 x_p x_q, with
    #   sum (d Hbar)^2 (r theta) = (1-r^2)^2 r^2 A1 - 4 (1-r^2) r^4 A2 + 4 r^6 A3
    #   A1 = |dH|^2, A2 = sum H_ik theta_l d_l H_ik, A3 = |H|^2 (all at theta)
    # Term 3: + c3 (eps^2 + r^2)^(1-n) sum (d Hbar)^2 delta_pq
    radials = [
        radial(4, 0, s1),                                   # HH^T
        radial(4, 0, lambda r: -0.25 * (1 - r * r) ** 2),   # A1 theta theta
        radial(6, 0, lambda r: -0.25 * s2(r)),              # A2 theta theta
        radial(8, 0, lambda r: -0.25 * 4 * one(r)),         # A3 theta theta
        radial(2, 1, lambda r: c3 * (1 - r * r) ** 2),      # A1 delta
        radial(4, 1, lambda r: c3 * s2(r)),                 # A2 delta
        radial(6, 1, lambda r: c3 * 4 * one(r)),            # A3 delta
    ]
    eye = np.eye(n)

    def spherical(theta):
        H, dH = H_jet(W, theta, order=1)
        HHt = H @ H.transpose(0, 2, 1)
        A1 = np.einsum("mikl,mikl->m", dH, dH)
        A2 = np.einsum("mik,ml,mikl->m", H, theta, dH)
        A3 = np.einsum("mik,mik->m", H, H)
        tt = theta[:, :, None] * theta[:, None, :]
        return np.stack([
            HHt,
            A1[:, None, None] * tt,
            A2[:, None, None] * tt,
            A3[:, None, None] * tt,
            A1[:, None, None] * eye,
            A2[:, None, None] * eye,
            A3[:, None, None] * eye,
        ], axis=1)

    est = product_integrate(radials, spherical, n, tolerance=tolerance,
                            samples=samples, seed=seed)
    # identical samples and a symmetric integrand: symmetrize away rounding noise
    value = 0.5 * (est.value + est.value.T)
    std = 0.5 * (est.std_err + est.std_err.T)
    est = type(est)(value=value, std_err=std, samples=est.samples, seed=est.seed)
    if target_rel_err is not None:
        scale = float(np.max(np.abs(value)))
        if scale > 0 and float(np.max(std)) > target_rel_err * scale:
            raise OracleBudgetExceeded(
                f"max std_err {float(np.max(std)):.3g} exceeds {target_rel_err:g} x {scale:.3g} "
                f"with {samples} samples")
    return est


# --------------------------------------------------------------------------
# Yamabe constant


def yamabe_constant(n: int) -> float:
    """``Y(S^n) = n (n-1) |S^n|^(2/n)``."""
    if n < 3:
        raise ValueError("n must be >= 3")
    log_area = math.log(sphere_area(n + 1))
    return n * (n - 1) * math.exp(2.0 * log_area / n)


# --------------------------------------------------------------------------
# certification


@dataclass
class CriticalPointReport:
    n: int
    discriminant: float
    eps_star: float | None
    F_at_star: float | None
    d2F_deps2: float | None
    hessian_brackets: tuple[float, float] | None
    hessian_eigen_min: float | None
    in_omega: bool
    certified_min: bool
    dF_deps: float | None = None
    sufficient_inequality: bool | None = None
    weyl_norm: float = 1.0
    eigen_min_kind: str = "seeded"

    def to_dict(self) -> dict:
        d = asdict(self)
        if d["hessian_brackets"] is not None:
            d["hessian_brackets"] = list(d["hessian_brackets"])
        return d

    def csv_row(self) -> list:
        b = self.hessian_brackets or (None, None)
        return [self.n, self.discriminant, self.eps_star, self.F_at_star, self.d2F_deps2,
                b[0], b[1], self.hessian_eigen_min, int(self.certified_min)]


SCAN_CSV_HEADER = ["n", "discriminant", "eps_star", "F_at_star", "d2F",
                   "bracket1", "bracket2", "eig_min", "certified"]


def _sqrt_greater(x: Fraction, D: Fraction) -> bool:
    """Exact test of ``sqrt(D) > x`` for ``D >= 0``."""
    return x < 0 or x * x < D


def _t_below(a: Fraction, D: Fraction, c: Fraction) -> bool:
    """Exact test of ``2a / (3 + sqrt(D)) < c`` for ``c > 0``."""
    return _sqrt_greater(2 * a / c - 3, D)


def _exact_conditions(n: int) -> dict[str, bool]:
    """Sign conditions at ``eps_*`` decided in rational arithmetic.

    With ``t = eps_*^2`` and the critical relation ``2 b t^2 = 3 t - a``:
    ``B''(eps_*) / eps_*^2 = 24 t - 16 a`` and ``B(eps_*) / t^2 = (a - t) / 2``.
    """
    D = discriminant_exact(n)
    a, _ = _coeffs(n)
    if D <= 0:
        return {"real": D == 0, "d2F_positive": False, "F_negative": False,
                "bracket1_positive": False, "bracket2_positive": False,
                "in_omega": False, "sufficient_inequality": False}
    return {
        "real": True,
        "d2F_positive": _t_below(a, D, Fraction(2, 3) * a),
        "F_negative": _t_below(a, D, a),
        "bracket1_positive": _t_below(a, D, Fraction(2 * (n - 8), 3 * (n + 6))),
        "bracket2_positive": _t_below(a, D, Fraction(n - 8, n + 7)),
        "in_omega": (not _t_below(a, D, a / 3)) and _t_below(a, D, Fraction(2, 3) * a),
        "sufficient_inequality": _sqrt_greater(Fraction(6, n + 4), D),
    }


def _report(n: int, N: float, M: np.ndarray | None, grad_tol: float) -> CriticalPointReport:
    D = discriminant_exact(n)
    if D < 0:
        return CriticalPointReport(n=n, discriminant=float(D), eps_star=None, F_at_star=None,
                                   d2F_deps2=None, hessian_brackets=None,
                                   hessian_eigen_min=None, in_omega=False,
                                   certified_min=False, weyl_norm=N,
                                   eigen_min_kind="seeded" if M is not None else "bound")
    exact = _exact_conditions(n)
    e = eps_star(n)
    F = F0(n, N, e)
    dF = dF0_deps(n, N, e)
    d2F = d2F0_deps2(n, N, e)
    b1, b2 = hessian_brackets(n, e)
    c1, c2, I = _hessian_coeffs(n)
    if M is not None:
        H = c1 * b1 * I * M + c2 * N * b2 * I * np.eye(n)
        eig = float(np.linalg.eigvalsh(H)[0])
        kind = "seeded"
    else:
        # M is PSD with trace N, so its spectrum lies in [0, N]; worst case over all W
        eig = I * (c1 * min(b1, 0.0) * N + c2 * N * b2)
        kind = "bound"
    grad_ok = abs(reduced_bracket(n, e, 1)) < grad_tol
    eig_ok = (eig > 0) if M is not None else (exact["bracket1_positive"] and exact["bracket2_positive"])
    certified = (D > 0 and grad_ok and exact["d2F_positive"] and exact["F_negative"]
                 and eig_ok and d2F > 0 and F < 0 and eig > 0)
    return CriticalPointReport(
        n=n, discriminant=float(D), eps_star=e, F_at_star=F, d2F_deps2=d2F,
        hessian_brackets=(b1, b2), hessian_eigen_min=eig, in_omega=exact["in_omega"],
        certified_min=bool(certified), dF_deps=dF,
        sufficient_inequality=exact["sufficient_inequality"] if n >= 52 else None,
        weyl_norm=N, eigen_min_kind=kind)


def certify_minimum(n: int, W: WeylForm, grad_tol: float = 1e-10) -> CriticalPointReport:
    """Check that ``(0, eps_*)`` is a strict local minimum of ``F`` for this ``W``."""
    _check_F_dimension(n)
    if W.n != n:
        raise ValueError(f"W has dimension {W.n}, expected {n}")
    N = weyl_quadratic_norm(W)
    if not N > 0:
        raise ValueError("W has zero quadratic norm; the Hessian vanishes identically")
    return _report(n, N, M_matrix(W), grad_tol)


def dimension_scan(n_min: int, n_max: int, w_seed: int | None = None,
                   grad_tol: float = 1e-10) -> list[CriticalPointReport]:
    """One :class:`CriticalPointReport` per dimension in ``[n_min, n_max]``.

    Without ``w_seed`` the rows are normalized to unit quadratic norm and
    ``hessian_eigen_min`` is the worst case over all Weyl forms, which needs
    no dense rank-4 array. With ``w_seed`` a seeded form is built in every
    dimension (memory grows like ``n^4``).
    """
    if not 11 <= n_min <= n_max:
        raise ValueError(f"need 11 <= n_min <= n_max, got [{n_min}, {n_max}]")
    rows = []
    for n in range(n_min, n_max + 1):
        if w_seed is None:
            rows.append(_report(n, 1.0, None, grad_tol))
        else:
            rows.append(certify_minimum(n, random_weyl(n, w_seed), grad_tol))
    return rows


def monomials(n: int, degree: int):
    """Exponent tuples of all monomials of exact ``degree`` in ``n`` variables."""
    for combo in itertools.combinations_with_replacement(range(n), degree):
        exps = [0] * n
        for i in combo:
            exps[i] += 1
        yield tuple(exps)
