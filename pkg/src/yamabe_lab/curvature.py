"""Pointwise Riemannian geometry of metrics ``g = exp(h)`` built from Weyl forms.

Jets of a symmetric matrix field ``T`` follow the convention of
:mod:`yamabe_lab.weyl`: ``dT[..., i, j, l] = d_l T_ij`` and
``d2T[..., i, j, l, m] = d_l d_m T_ij``. Every evaluator accepts a single
point ``(n,)`` or a batch ``(m, n)``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .bubbles import BubbleParams, OmegaDomain, bubble
from .errors import OutsideOmega, SingularMetric, ToleranceNotMet
from .quadrature import (QuadratureEstimate, RadialDensity, RadialMixture, RegionSpec, ball_mc,
                         product_integrate)
from .weyl import H_jet, Hbar_jet, WeylForm, random_weyl, scalar_times_jet

__all__ = [
    "MetricJet",
    "sym_exp_jet",
    "scalar_curvature_exact",
    "scalar_curvature_approx",
    "cutoff",
    "SymTensorField",
    "HbarTensorField",
    "PatchParams",
    "PatchField",
    "patch_field",
    "GluedFieldParams",
    "GluedField",
    "glued_field",
    "SmallnessReport",
    "smallness_parameters",
    "log_smallness",
    "ErrorFieldSample",
    "error_fields",
    "error_norms",
    "error_proposal",
    "quadratic_energy",
    "F_partial",
    "F_zero_quadrature",
    "fit_exponent",
    "PolynomialSymField",
    "random_sym_field",
    "remainder_order_fit",
    "T_GRID",
]

SERIES_CUTOFF = 1e-17
MAX_SERIES_TERMS = 60


@dataclass(frozen=True, eq=False)
class MetricJet:
    """Value and first two derivatives of a symmetric matrix field at points."""

    g: np.ndarray
    dg: np.ndarray
    d2g: np.ndarray
    ginv: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self.g.shape[-1]

    def det(self) -> np.ndarray:
        return np.linalg.det(self.g)


def _matmul_left(A, B):
    """``sum_a A[..., i, a] B[..., a, j, ...]`` for jets with trailing derivative axes."""
    extra = B.ndim - A.ndim
    if extra == 0:
        return A @ B
    n = A.shape[-1]
    lead = A.shape[:-2]
    return (A @ B.reshape(lead + (n, -1))).reshape(B.shape)


def _matmul_right(B, A):
    """``sum_a B[..., i, a, ...] A[..., a, j]`` with derivative axes after ``(i, a)``."""
    extra = B.ndim - A.ndim
    if extra == 0:
        return B @ A
    k = A.ndim - 2
    # (..., i, a, d...) -> (..., i, d..., a), multiply, move j back after i
    Bt = np.moveaxis(B, k + 1, -1)
    out = (Bt.reshape(A.shape[:-2] + (-1, A.shape[-1])) @ A).reshape(Bt.shape)
    return np.moveaxis(out, -1, k + 1)


def _outer_pair(dT, dh):
    """``sum_a dT[..., i, a, l] dh[..., a, j, m]`` arranged as ``[..., i, j, l, m]``."""
    n = dT.shape[-1]
    k = dT.ndim - 3
    X = np.swapaxes(dT, -1, -2).reshape(dT.shape[:k] + (n * n, n))
    Y = dh.reshape(dh.shape[:k] + (n, n * n))
    out = (X @ Y).reshape(dT.shape[:k] + (n, n, n, n))  # [i, l, j, m]
    return np.swapaxes(out, -3, -2)


def _max_abs(a) -> float:
    return max(float(a.max(initial=0.0)), -float(a.min(initial=0.0)))


def _series_exp_jet(h, dh=None, d2h=None, start: int = 0):
    """Jet of ``sum_{k >= start} h^k / k!`` by the product rule applied term by term.

    Terms are generated as ``T_k = T_(k-1) h / k``; summation stops once the
    max-norm of the newest term (and of its derivatives) drops below
    ``SERIES_CUTOFF``.
    """
    n = h.shape[-1]
    T = np.broadcast_to(np.eye(n), h.shape).copy()
    dT = None if dh is None else np.zeros(dh.shape)
    d2T = None if d2h is None else np.zeros(d2h.shape)
    S = T.copy() if start == 0 else np.zeros(h.shape)
    dS = None if dh is None else np.zeros(dh.shape)
    d2S = None if d2h is None else np.zeros(d2h.shape)
    for k in range(1, MAX_SERIES_TERMS):
        if d2h is not None:
            cross = _outer_pair(dT, dh)
            new = _matmul_right(d2T, h)
            new += cross
            new += np.swapaxes(cross, -1, -2)
            new += _matmul_left(T, d2h)
            new *= 1.0 / k
            d2T = new
        if dh is not None:
            new = _matmul_right(dT, h)
            new += _matmul_left(T, dh)
            new *= 1.0 / k
            dT = new
        T = T @ h / k
        if k >= start:
            S += T
            if dS is not None:
                dS += dT
            if d2S is not None:
                d2S += d2T
        if k >= start and all(a is None or _max_abs(a) < SERIES_CUTOFF for a in (T, dT, d2T)):
            return S, dS, d2S
    raise ToleranceNotMet("matrix exponential series did not converge; is |h| <= 1?")


def sym_exp_jet(h, dh, d2h, sign: float = 1.0) -> MetricJet:
    """Jet of ``g = exp(sign * h)`` from the jet of ``h``.

    Parameters
    ----------
    h, dh, d2h : ndarray
        Jet of the symmetric field ``h``.
    sign : float
        ``-1`` yields the inverse metric ``exp(-h)``.

    Returns
    -------
    MetricJet
        With ``ginv`` filled from the series for ``exp(-h)``.
    """
    h, dh, d2h = (sign * np.asarray(a, dtype=float) for a in (h, dh, d2h))
    g, dg, d2g = _series_exp_jet(h, dh, d2h)
    ginv, _, _ = _series_exp_jet(-h)
    return MetricJet(g, dg, d2g, ginv)


def _inverse(jet: MetricJet) -> np.ndarray:
    try:
        np.linalg.cholesky(jet.g)
    except np.linalg.LinAlgError as exc:
        raise SingularMetric("metric is not positive definite") from exc
    return np.linalg.inv(jet.g) if jet.ginv is None else jet.ginv


def _christoffel(jet: MetricJet, ginv):
    dg, d2g = jet.dg, jet.d2g
    # lowered symbols G[a, j, k] = (d_j g_ak + d_k g_aj - d_a g_jk) / 2
    Gl = 0.5 * (dg.swapaxes(-1, -2) + dg - np.moveaxis(dg, -1, -3))
    G = _matmul_left(ginv, Gl)
    dginv = -np.einsum("...ib,...bcm,...ca->...iam", ginv, dg, ginv)
    # d_m of the lowered symbols, as [a, j, k, m]
    dGl = 0.5 * (np.swapaxes(d2g, -3, -2)
                 + d2g
                 - np.moveaxis(d2g, -2, -4))
    # T1[j, k] = sum_i d_i G^i_jk, T2[j, k] = sum_i d_j G^i_ik
    T1 = (np.einsum("...iai,...ajk->...jk", dginv, Gl)
          + np.einsum("...ia,...ajki->...jk", ginv, dGl))
    T2 = (np.einsum("...iaj,...aik->...jk", dginv, Gl)
          + np.einsum("...ia,...aikj->...jk", ginv, dGl))
    return G, dginv, T1, T2


def scalar_curvature_exact(jet: MetricJet, check: bool = True, return_both: bool = False):
    """Scalar curvature from Christoffel symbols.

    The generic formula ``g^jk (d_i G^i_jk - d_j G^i_ik + G^l_jk G^i_il - G^l_ik G^i_jl)``
    is returned. When ``det g = 1`` the shortcut
    ``d_i (g^jk G^i_jk) + g^jk G^l_ik G^i_jl`` is evaluated too and, with
    ``check``, required to agree to ``1e-10`` relative to the size of the
    individual terms.

    Raises
    ------
    SingularMetric
        If ``g`` is not positive definite.
    ToleranceNotMet
        If the two formulas disagree.
    """
    ginv = _inverse(jet)
    G, dginv, T1, T2 = _christoffel(jet, ginv)
    trG = np.einsum("...iil->...l", G)
    quad_a = np.einsum("...ljk,...l->...jk", G, trG)
    quad_b = np.einsum("...lik,...ijl->...jk", G, G)
    generic = np.einsum("...jk,...jk->...", ginv, T1 - T2 + quad_a - quad_b)
    unit_det = np.all(np.abs(np.linalg.slogdet(jet.g)[1]) < 1e-10)
    if not unit_det:
        if return_both:
            return generic, None
        return generic
    short = (np.einsum("...jki,...ijk->...", dginv, G)
             + np.einsum("...jk,...jk->...", ginv, T1 + quad_b))
    if check:
        scale = (np.abs(np.einsum("...jk,...jk->...", ginv, T1))
                 + np.abs(np.einsum("...jk,...jk->...", ginv, quad_b)) + 1e-300)
        worst = np.max(np.abs(generic - short) / np.maximum(scale, 1.0))
        if worst > 1e-10:
            raise ToleranceNotMet(f"curvature formulas disagree by {worst:.3g}")
    if return_both:
        return generic, short
    return generic


def scalar_curvature_approx(h, dh, d2h):
    """Quadratic model ``d_i d_k h_ik - d_i(h_il d_k h_kl) + (1/2) d_i h_il d_k h_kl - (1/4)(d_l h_ik)^2``."""
    h, dh, d2h = (np.asarray(a, dtype=float) for a in (h, dh, d2h))
    lin = np.einsum("...ikik->...", d2h)
    div = np.einsum("...kll->...k", dh)  # div_l = sum_k d_k h_kl (h symmetric)
    # d_i (h_il div_l) = (d_i h_il) div_l + h_il d_i div_l
    ddiv = np.einsum("...kllm->...km", d2h)  # d_m div_k
    term2 = np.einsum("...l,...l->...", div, div) + np.einsum("...il,...li->...", h, ddiv)
    return (lin - term2 + 0.5 * np.einsum("...l,...l->...", div, div)
            - 0.25 * np.einsum("...ikl,...ikl->...", dh, dh))


# ---------------------------------------------------------------------------
# cutoff and tensor fields
# ---------------------------------------------------------------------------

def _sigma(t, order):
    t = np.asarray(t, dtype=float)
    pos = t > 0
    safe = np.where(pos, t, 1.0)
    s = np.where(pos, np.exp(-1.0 / safe), 0.0)
    if order == 0:
        return s
    s1 = s / safe**2
    s2 = s * (1.0 / safe**4 - 2.0 / safe**3)
    return s, s1, s2


def cutoff(t, order: int = 0):
    """Smooth step ``eta(t)``: 1 for ``t <= 1``, 0 for ``t >= 2``.

    ``eta(t) = s(2 - t)`` with ``s(u) = sigma(u) / (sigma(u) + sigma(1 - u))`` and
    ``sigma(u) = exp(-1/u)`` for ``u > 0``. With ``order = 2`` returns
    ``(eta, eta', eta'')``.
    """
    u = 2.0 - np.asarray(t, dtype=float)
    f, f1, f2 = _sigma(u, 2)
    g, g1, g2 = _sigma(1.0 - u, 2)
    D = f + g
    s = f / D
    if order == 0:
        return s
    # derivatives in u; d/du sigma(1 - u) = -sigma'(1 - u)
    N = f1 * g + f * g1
    D1 = f1 - g1
    s1 = N / D**2
    N1 = f2 * g - f * g2
    s2 = N1 / D**2 - 2.0 * N * D1 / D**3
    return s, -s1, s2


def _radial_cutoff_jet(x, center, inner, outer):
    """Jet of ``eta(1 + (|x - c| - inner) / (outer - inner))`` (exactly 1 for ``|x - c| <= inner``)."""
    d = np.atleast_2d(x) - center
    r = np.linalg.norm(d, axis=-1)
    m, n = d.shape
    eta = np.ones(m)
    deta = np.zeros((m, n))
    d2eta = np.zeros((m, n, n))
    mask = r > inner
    if np.any(mask):
        rm, dm = r[mask], d[mask]
        k = 1.0 / (outer - inner)
        e0, e1, e2 = cutoff(1.0 + (rm - inner) * k, order=2)
        unit = dm / rm[:, None]
        eta[mask] = e0
        deta[mask] = (e1 * k)[:, None] * unit
        proj = np.eye(n) - unit[:, :, None] * unit[:, None, :]
        d2eta[mask] = ((e2 * k * k)[:, None, None] * unit[:, :, None] * unit[:, None, :]
                       + (e1 * k / rm)[:, None, None] * proj)
    return eta, deta, d2eta


class SymTensorField:
    """A trace-free symmetric matrix field with analytic jets."""

    n: int

    def jet(self, x):
        raise NotImplementedError

    def __call__(self, x):
        return self.jet(x)[0]


@dataclass(frozen=True, eq=False)
class HbarTensorField(SymTensorField):
    """``Hbar(x) = (1 - |x|^2) H(x)`` on all of ``R^n``."""

    W: WeylForm

    @property
    def n(self) -> int:
        return self.W.n

    def jet(self, x):
        return Hbar_jet(self.W, x)


@dataclass(frozen=True)
class PatchParams:
    """Amplitude ``mu``, scale ``lam``, radius ``rho`` and outer cutoff radius."""

    mu: float
    lam: float
    rho: float
    cutoff_outer: float | None = None

    def __post_init__(self):
        c = self.cutoff_outer
        if c is None:
            c = min(2.0 * self.rho, 1.0)
            object.__setattr__(self, "cutoff_outer", c)
        if not (0 < self.lam <= self.rho < c <= 1):
            raise ValueError("need 0 < lam <= rho < cutoff_outer <= 1")
        if not 0 <= self.mu <= 1:
            raise ValueError("mu must lie in [0, 1]")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True, eq=False)
class PatchField(SymTensorField):
    """``h = eta * mu (lam^2 - |x|^2) H(x)``, polynomial inside ``rho``, zero beyond the cutoff."""

    W: WeylForm
    params: PatchParams

    @property
    def n(self) -> int:
        return self.W.n

    def polynomial_jet(self, x):
        p = self.params
        x = np.asarray(x, dtype=float)
        H, dH, d2H = H_jet(self.W, x)
        s = p.mu * (p.lam**2 - np.sum(x * x, axis=-1))
        ds = -2.0 * p.mu * x
        d2s = -2.0 * p.mu * np.broadcast_to(np.eye(x.shape[-1]), x.shape[:-1] + (x.shape[-1],) * 2)
        return scalar_times_jet(s, ds, d2s, H, dH, d2H)

    def jet(self, x):
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        out = self.jet_and_polynomial(np.atleast_2d(x))[0]
        return tuple(o[0] for o in out) if single else out

    def jet_and_polynomial(self, X):
        """Jets of ``h`` and of the uncut polynomial, plus the cutoff values, on a batch."""
        P = self.polynomial_jet(X)
        p = self.params
        eta = _radial_cutoff_jet(X, 0.0, p.rho, p.cutoff_outer)
        if np.all(eta[0] == 1.0):
            return P, P, eta[0]
        return scalar_times_jet(*eta, *P), P, eta[0]


def patch_field(W: WeylForm, params: PatchParams) -> PatchField:
    return PatchField(W, params)


@dataclass(frozen=True)
class GluedFieldParams:
    """Patches ``N = N0 .. N_max`` centred at ``y_N = (1/N, 0, ..., 0)``."""

    N0: int
    N_max: int
    W: WeylForm

    def __post_init__(self):
        if self.N0 < 3:
            raise ValueError("N0 must be >= 3")
        if self.N_max < self.N0:
            raise ValueError("N_max must be >= N0")

    def center(self, N: int) -> np.ndarray:
        y = np.zeros(self.W.n)
        y[0] = 1.0 / N
        return y

    def to_dict(self) -> dict:
        return {"N0": self.N0, "N_max": self.N_max, "n": self.W.n}


@dataclass(frozen=True, eq=False)
class GluedField(SymTensorField):
    """``sum_N eta(4 N^2 |x - y_N|) 2^-N (2^-N - |x - y_N|^2) H(x - y_N)``."""

    params: GluedFieldParams

    @property
    def n(self) -> int:
        return self.params.W.n

    def single_patch_jet(self, N: int, x):
        """Pure polynomial term of patch ``N`` (no cutoff)."""
        d = np.atleast_2d(np.asarray(x, dtype=float)) - self.params.center(N)
        mu = 2.0 ** -N
        H, dH, d2H = H_jet(self.params.W, d)
        s = mu * (mu - np.sum(d * d, axis=-1))
        ds = -2.0 * mu * d
        d2s = -2.0 * mu * np.broadcast_to(np.eye(d.shape[-1]), d.shape + (d.shape[-1],))
        return scalar_times_jet(s, ds, d2s, H, dH, d2H)

    def jet(self, x):
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        X = np.atleast_2d(x)
        m, n = X.shape
        h = np.zeros((m, n, n))
        dh = np.zeros((m, n, n, n))
        d2h = np.zeros((m, n, n, n, n))
        for N in range(self.params.N0, self.params.N_max + 1):
            y = self.params.center(N)
            near = np.linalg.norm(X - y, axis=-1) < 1.0 / (2 * N * N)
            if not np.any(near):
                continue
            Xn = X[near]
            P = self.single_patch_jet(N, Xn)
            # eta(4 N^2 r): 1 up to r = 1/(4N^2), 0 from r = 1/(2N^2)
            eta = _radial_cutoff_jet(Xn, y, 1.0 / (4 * N * N), 1.0 / (2 * N * N))
            a, b, c = scalar_times_jet(*eta, *P)
            h[near] += a
            dh[near] += b
            d2h[near] += c
        return (h[0], dh[0], d2h[0]) if single else (h, dh, d2h)


def glued_field(params: GluedFieldParams) -> GluedField:
    return GluedField(params)


# ---------------------------------------------------------------------------
# smallness, error fields and energies
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SmallnessReport:
    alpha_proxy: float
    log_combination: float

    @property
    def combination(self) -> float:
        return math.exp(self.log_combination) if self.log_combination < 709 else math.inf


def log_smallness(mu: float, lam: float, rho: float, n: int) -> float:
    """``log(rho^(2-n) mu^(-2) lam^(n-10))``."""
    return (2 - n) * math.log(rho) - 2 * math.log(mu) + (n - 10) * math.log(lam)


def smallness_parameters(p: PatchParams, n: int, W: WeylForm | None = None,
                         samples: int = 2000, seed: int = 42) -> SmallnessReport:
    """Sampled sup of ``|h| + |dh| + |d2h|`` over ``B_1`` and the smallness combination.

    ``W`` defaults to the seeded random form; pass ``samples=0`` to skip the
    sup-norm proxy (reported as ``nan``).
    """
    alpha = math.nan
    if samples > 0:
        W = random_weyl(n, seed) if W is None else W
        rng = np.random.default_rng(seed)
        g = rng.standard_normal((samples, n))
        x = g / np.linalg.norm(g, axis=1, keepdims=True) * rng.random(samples)[:, None] ** (1 / n)
        field = PatchField(W, p)
        alpha = 0.0
        for i in range(0, samples, 256):
            h, dh, d2h = field.jet(x[i:i + 256])
            size = (np.abs(h).max(axis=(1, 2)) + np.abs(dh).max(axis=(1, 2, 3))
                    + np.abs(d2h).max(axis=(1, 2, 3, 4)))
            alpha = max(alpha, float(size.max()))
    return SmallnessReport(alpha, log_smallness(p.mu, p.lam, p.rho, n))


@dataclass(frozen=True)
class ErrorFieldSample:
    """Pointwise error fields; ``A12`` is ``A1 + A2`` assembled without cancellation."""

    A1: np.ndarray | float
    A2: np.ndarray | float
    A12: np.ndarray | float


def _check_omega(n, p: PatchParams, b: BubbleParams):
    xi = np.asarray(b.xi) / p.lam
    if not OmegaDomain(n).contains(xi, b.eps / p.lam):
        raise OutsideOmega("(xi / lam, eps / lam) lies outside Omega")


def error_fields(W: WeylForm, p: PatchParams, b: BubbleParams, x, method: str = "stable",
                 check_omega: bool = True) -> ErrorFieldSample:
    """``A1 = Delta_g u - c_n R_g u + n(n-2) u^((n+2)/(n-2))`` and ``A2 = P_ik d_i d_k u``.

    ``P = mu (lam^2 - |x|^2) H`` is the uncut patch polynomial and
    ``c_n = (n-2)/(4(n-1))``. With ``method="stable"`` the flat equation
    ``Delta u + n(n-2) u^((n+2)/(n-2)) = 0`` is used to remove the exactly
    cancelling part, so ``A1 = d_i(E_ij d_j u) - c_n R u`` with
    ``E = exp(-h) - I``; ``A1 + A2`` is likewise assembled from
    ``exp(-h) - I + h`` so that no first-order cancellation happens in floating
    point. ``method="literal"`` evaluates the defining expression directly.
    """
    n = W.n
    if check_omega:
        _check_omega(n, p, b)
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    X = np.atleast_2d(x)
    (h, dh, d2h), (P, _, _), eta = PatchField(W, p).jet_and_polynomial(X)
    u, du, d2u = bubble(b, X)
    c = (n - 2) / (4 * (n - 1))

    R = scalar_curvature_exact(sym_exp_jet(h, dh, d2h))
    A2 = np.einsum("...ik,...ik->...", P, d2u)
    if method == "literal":
        Ginv, dGinv, _ = _series_exp_jet(-h, -dh)
        lap = (np.einsum("...ij,...ij->...", Ginv, d2u)
               + np.einsum("...iji,...j->...", dGinv, du))
        A1 = lap - c * R * u + n * (n - 2) * u ** ((n + 2) / (n - 2))
        A12 = A1 + A2
    elif method == "stable":
        E2, dE2, _ = _series_exp_jet(-h, -dh, start=2)
        div_h = np.einsum("...iji->...j", dh)
        div_E2 = np.einsum("...iji->...j", dE2)
        curv = c * R * u
        second = (np.einsum("...j,...j->...", div_E2, du)
                  + np.einsum("...ij,...ij->...", E2, d2u))
        A1 = second - np.einsum("...j,...j->...", div_h, du) \
            - np.einsum("...ij,...ij->...", h, d2u) - curv
        A12 = (second - np.einsum("...j,...j->...", div_h, du)
               + np.einsum("...ij,...ij->...", (1.0 - eta)[:, None, None] * P, d2u) - curv)
    else:
        raise ValueError(f"unknown method {method!r}")
    if single:
        return ErrorFieldSample(float(A1[0]), float(A2[0]), float(A12[0]))
    return ErrorFieldSample(A1, A2, A12)


def _lp_norm(est: QuadratureEstimate, p: float) -> QuadratureEstimate:
    if est.value <= 0:
        return QuadratureEstimate(0.0, est.std_err, est.samples, est.seed)
    norm = est.value ** (1 / p)
    return QuadratureEstimate(float(norm), float(norm / (p * est.value) * est.std_err),
                              est.samples, est.seed)


def error_proposal(n: int, eps: float) -> RadialMixture:
    """Radial proposal around the bubble centre for the error-field norms.

    Components: ``(eps + r)^-(n+1)`` for the core, ``(eps + r)^-1`` spreading
    samples evenly over scales, and ``(eps + r)^5`` for the outer part of
    the ball where ``|A1 + A2|^(2n/(n+2)) r^(n-1)`` grows for small ``n``.
    """
    return RadialMixture((RadialDensity(eps, n + 1.0), RadialDensity(eps, 1.0),
                          RadialDensity(eps, -5.0)), (0.4, 0.3, 0.3))


def error_norms(W: WeylForm, p: PatchParams, b: BubbleParams, which="A1",
                region: RegionSpec | None = None, samples: int = 100_000, seed: int = 42,
                importance: RadialDensity | RadialMixture | None = None, batch: int = 16,
                workers: int | None = None):
    """``L^(2n/(n+2))`` norm of ``A1``, ``A2`` or ``A1 + A2`` (``which="A12"``) over ``B_rho``.

    ``which`` may also be a tuple of names; the fields then share one set
    of samples and a dict of estimates is returned. By default points are
    drawn in the ball of radius ``rho + |xi|`` around the bubble centre
    ``xi`` with :func:`error_proposal` and masked to ``|x| < rho``. An
    explicit ``region`` replaces the ball (the mask still applies).
    """
    n = W.n
    _check_omega(n, p, b)
    names = (which,) if isinstance(which, str) else tuple(which)
    if not set(names) <= {"A1", "A2", "A12"}:
        raise ValueError("fields must be among A1, A2, A12")
    q = 2 * n / (n + 2)
    xi = np.asarray(b.xi)
    if region is None:
        region = RegionSpec.ball(n, p.rho + float(np.linalg.norm(xi)), center=xi)
        if importance is None:
            importance = error_proposal(n, b.eps)

    def f(x):
        out = np.zeros((x.shape[0], len(names)))
        inside = np.sum(x * x, axis=-1) < p.rho**2
        if np.any(inside):
            s = error_fields(W, p, b, x[inside], check_omega=False)
            out[inside] = np.stack([np.abs(getattr(s, k)) ** q for k in names], axis=-1)
        return out

    est = ball_mc(f, n, region, samples, seed, importance, batch=batch, workers=workers)
    res = {k: _lp_norm(QuadratureEstimate(float(est.value[i]), float(est.std_err[i]),
                                          est.samples, est.seed), q)
           for i, k in enumerate(names)}
    return res[which] if isinstance(which, str) else res


def _energy_density(h_jet, b: BubbleParams, X):
    h, dh, _ = h_jet
    u, du = bubble(b, X, order=1)
    n = b.n
    hdu = np.einsum("...kl,...k->...l", h, du)
    first = 0.5 * np.einsum("...l,...l->...", hdu, hdu)
    second = -(n - 2) / (16 * (n - 1)) * np.einsum("...ikl,...ikl->...", dh, dh) * u * u
    return np.stack([first, second], axis=-1)


def quadratic_energy(h: SymTensorField | None, b: BubbleParams, region: RegionSpec,
                     samples: int = 100_000, seed: int = 42,
                     importance: RadialDensity | None = None, parts: bool = False,
                     batch: int = 512, workers: int | None = None) -> QuadratureEstimate:
    """Monte-Carlo ``Q = int (1/2) |h du|^2 - (n-2)/(16(n-1)) |dh|^2 u^2``.

    ``h=None`` stands for the zero field. With ``parts`` the estimate holds
    the two terms separately, otherwise their sum.
    """
    n = b.n
    if h is None:
        zero = np.zeros(2) if parts else 0.0
        return QuadratureEstimate(zero, zero, samples, seed)

    def f(x):
        dens = _energy_density(h.jet(x), b, x)
        return dens if parts else dens.sum(axis=-1)

    return ball_mc(f, n, region, samples, seed, importance, batch=batch, workers=workers)


def F_partial(W: WeylForm, xi, eps: float, samples: int = 100_000, seed: int = 42,
              mirror: bool = False, gamma: float = 3.0, parts: bool = False,
              batch: int = 512, workers: int | None = None) -> QuadratureEstimate:
    """The two quadratic terms of ``F(xi, eps)`` with ``h`` replaced by ``Hbar``, over ``R^n``.

    Points are drawn around ``xi`` with proposal ``(eps + r)^(-gamma)``.
    ``mirror=True`` evaluates the integrand at ``xi - y`` instead of
    ``xi + y`` for each draw ``y``, so ``F_partial(-xi, mirror=True)`` visits
    exactly the negatives of the points used by ``F_partial(xi)``.
    """
    n = W.n
    if n <= 10:
        raise ValueError("the integrals converge only for n > 10")
    xi = np.broadcast_to(np.asarray(xi, dtype=float), (n,))
    b = BubbleParams(n, xi, eps)
    field = HbarTensorField(W)
    sign = -1.0 if mirror else 1.0

    def f(y):
        x = xi + sign * y
        dens = _energy_density(field.jet(x), b, x)
        return dens if parts else dens.sum(axis=-1)

    region = RegionSpec.full_space(n, r_split=eps)
    return ball_mc(f, n, region, samples, seed, RadialDensity(eps, gamma),
                   batch=batch, workers=workers)


def F_zero_quadrature(n: int, W: WeylForm, eps: float, samples: int = 20_000, seed: int = 42,
                      tolerance: float = 1e-10, batch: int = 64,
                      workers: int | None = None) -> QuadratureEstimate:
    """``F(0, eps) = -(n-2)/(16(n-1)) int |dHbar|^2 u^2`` by radial quadrature times sphere MC.

    On ``x = r theta``,
    ``|dHbar|^2 = (1-r^2)^2 r^2 A + -4 (1-r^2) r^4 B + 4 r^6 C`` with
    ``A = |dH(theta)|^2``, ``B = sum H(theta) theta_l d_l H(theta)`` and
    ``C = |H(theta)|^2``, and ``u^2 = (eps / (eps^2 + r^2))^(n-2)``.
    """
    if n <= 10:
        raise ValueError("the integral converges only for n > 10")
    c = (n - 2) / (16 * (n - 1))
    log_eps = math.log(eps)

    def radial(poly_and_power):
        coeffs, power = poly_and_power

        def f(r):
            r = np.asarray(r, dtype=float)
            with np.errstate(divide="ignore"):
                lr = np.log(r)
            base = (n - 2) * (log_eps - np.log(eps * eps + r * r)) + (n - 1 + power) * lr
            poly = sum(ck * r ** (2 * k) for k, ck in enumerate(coeffs))
            return np.where(r > 0, poly * np.exp(base), 0.0)

        return f

    radials = [radial(([1.0, -2.0, 1.0], 2)), radial(([-4.0, 4.0], 4)), radial(([4.0], 6))]

    def spherical(theta):
        H, dH = H_jet(W, theta, order=1)
        A = np.einsum("mikl,mikl->m", dH, dH)
        B = np.einsum("mik,mikl,ml->m", H, dH, theta)
        C = np.einsum("mik,mik->m", H, H)
        return -c * np.stack([A, B, C], axis=-1)

    return product_integrate(radials, spherical, n, tolerance, samples, seed, batch=batch,
                             workers=workers)


def fit_exponent(params, values) -> float:
    """Least-squares slope of ``log(values)`` against ``log(params)``."""
    x = np.log(np.asarray(params, dtype=float))
    y = np.log(np.asarray(values, dtype=float))
    return float(np.polyfit(x, y, 1)[0])


T_GRID = tuple(10.0 ** -e for e in (1.0, 1.5, 2.0, 2.5, 3.0))


@dataclass(frozen=True, eq=False)
class PolynomialSymField(SymTensorField):
    """``h_ij(x) = A_ij + B_ijl x_l + C_ijlm x_l x_m`` with trace-free coefficients."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray

    @property
    def n(self) -> int:
        return self.A.shape[0]

    def jet(self, x):
        x = np.asarray(x, dtype=float)
        h = self.A + np.einsum("ijl,...l->...ij", self.B, x) \
            + np.einsum("ijlm,...l,...m->...ij", self.C, x, x)
        dh = self.B + 2.0 * np.einsum("ijlm,...m->...ijl", self.C, x)
        d2h = np.broadcast_to(2.0 * self.C, x.shape[:-1] + self.C.shape)
        return h, dh, d2h


def random_sym_field(n: int, seed: int = 42, scale: float = 0.1) -> PolynomialSymField:
    """Seeded quadratic trace-free symmetric field with entries of size ``scale``."""
    rng = np.random.default_rng(seed)
    I = np.eye(n)

    def clean(T):
        T = 0.5 * (T + T.swapaxes(0, 1))
        tr = np.einsum("ii...->...", T)
        return T - I.reshape(I.shape + (1,) * (T.ndim - 2)) * tr / n

    A = clean(rng.uniform(-1, 1, (n, n)))
    B = clean(rng.uniform(-1, 1, (n, n, n)))
    C = rng.uniform(-1, 1, (n, n, n, n))
    C = clean(0.5 * (C + C.swapaxes(2, 3)))
    return PolynomialSymField(scale * A, scale * B, scale * C)


def remainder_order_fit(field: SymTensorField, x, ts=T_GRID) -> tuple[float, np.ndarray]:
    """Fitted order of ``|R_exact - R_approx|`` for ``h = t * field`` as ``t -> 0``."""
    h, dh, d2h = field.jet(np.asarray(x, dtype=float))
    diffs = []
    for t in ts:
        jet = (t * h, t * dh, t * d2h)
        diffs.append(abs(scalar_curvature_exact(sym_exp_jet(*jet)) - scalar_curvature_approx(*jet)))
    diffs = np.asarray(diffs, dtype=float)
    return fit_exponent(ts, diffs), diffs
