"""Algebraic Weyl forms and the quadratic tensor fields they generate.

A Weyl form is a rank-4 array ``W[i, j, k, l]`` with the symmetries of the
Weyl curvature tensor. It seeds the quadratic field

    H_ik(x) = sum_pq W[i, p, k, q] x_p x_q

and its damped companion ``Hbar(x) = (1 - |x|^2) H(x)``.

Field evaluators accept a single point of shape ``(n,)`` or a batch of shape
``(m, n)``. Jets are returned with the derivative indices trailing: the
first derivative of ``T_ik`` is stored as ``dT[..., i, k, l]`` and the
second as ``d2T[..., i, k, l, m]``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DimensionTooSmall

__all__ = [
    "WeylForm",
    "project_to_weyl",
    "random_weyl",
    "weyl_quadratic_norm",
    "M_matrix",
    "H_field",
    "H_jet",
    "Hbar_field",
    "Hbar_jet",
    "scalar_times_jet",
    "weyl_residuals",
]


@dataclass(frozen=True, eq=False)
class WeylForm:
    """Rank-4 tensor carrying all algebraic Weyl symmetries.

    Construct through :func:`project_to_weyl` or :func:`random_weyl`; the
    constructor itself does not enforce the symmetries.
    """

    n: int
    entries: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=float)
        if entries.shape != (self.n,) * 4:
            raise ValueError(f"entries must have shape {(self.n,) * 4}, got {entries.shape}")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    def residuals(self) -> dict[str, float]:
        return weyl_residuals(self.entries)

    def rotated(self, Q: np.ndarray) -> "WeylForm":
        """Return the form expressed in the frame ``x -> Q x``."""
        W = np.einsum("ai,bj,ck,dl,ijkl->abcd", Q, Q, Q, Q, self.entries, optimize=True)
        return WeylForm(self.n, W)

    def to_dict(self) -> dict:
        return {"n": int(self.n), "entries": self.entries.ravel().tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "WeylForm":
        n = int(data["n"])
        entries = np.asarray(data["entries"], dtype=float)
        if entries.size != n**4:
            raise ValueError(f"expected {n**4} entries for n={n}, got {entries.size}")
        return cls(n, entries.reshape((n,) * 4))

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict()))

    @classmethod
    def load(cls, path) -> "WeylForm":
        return cls.from_dict(json.loads(Path(path).read_text()))


def _entries(W) -> np.ndarray:
    return W.entries if isinstance(W, WeylForm) else np.asarray(W, dtype=float)


def weyl_residuals(W) -> dict[str, float]:
    """Maximum absolute violation of each Weyl symmetry."""
    W = _entries(W)
    return {
        "antisymmetry_first": float(np.max(np.abs(W + W.transpose(1, 0, 2, 3)))),
        "antisymmetry_second": float(np.max(np.abs(W + W.transpose(0, 1, 3, 2)))),
        "pair_symmetry": float(np.max(np.abs(W - W.transpose(2, 3, 0, 1)))),
        "bianchi": float(np.max(np.abs(
            W + np.einsum("iklj->ijkl", W) + np.einsum("iljk->ijkl", W)))),
        "trace": float(np.max(np.abs(np.einsum("ijil->jl", W)))),
    }


def project_to_weyl(T, n: int | None = None) -> WeylForm:
    """Orthogonal projection of a rank-4 array onto algebraic Weyl tensors.

    The steps are antisymmetrization of both index pairs, symmetrization
    under pair exchange, removal of the totally antisymmetric (first
    Bianchi) part, and removal of the Ricci part via the Kulkarni-Nomizu
    product with the identity.
    """
    T = np.asarray(T, dtype=float)
    if n is None:
        n = T.shape[0]
    if n < 4:
        raise DimensionTooSmall(f"no nonzero Weyl-symmetric tensor exists for n={n} < 4")
    if T.shape != (n,) * 4:
        raise ValueError(f"T must have shape {(n,) * 4}, got {T.shape}")
    if not np.all(np.isfinite(T)):
        raise ValueError("T must be finite")

    A = 0.5 * (T - T.transpose(1, 0, 2, 3))
    A = 0.5 * (A - A.transpose(0, 1, 3, 2))
    S = 0.5 * (A + A.transpose(2, 3, 0, 1))
    del A
    R = S - (S + np.einsum("iklj->ijkl", S) + np.einsum("iljk->ijkl", S)) / 3.0
    del S

    ric = np.einsum("ijil->jl", R)
    scal = np.trace(ric)
    P = (ric - scal / (2.0 * (n - 1)) * np.eye(n)) / (n - 2)
    I = np.eye(n)
    # Kulkarni-Nomizu product P (.) g, subtracted term by term to limit temporaries.
    R -= np.einsum("ik,jl->ijkl", P, I)
    R -= np.einsum("jl,ik->ijkl", P, I)
    R += np.einsum("il,jk->ijkl", P, I)
    R += np.einsum("jk,il->ijkl", P, I)
    return WeylForm(n, R)


def random_weyl(n: int, seed: int = 42, scale: float = 1.0) -> WeylForm:
    """Project a seeded uniform[-1, 1] array onto the Weyl subspace."""
    rng = np.random.default_rng(seed)
    T = rng.uniform(-1.0, 1.0, size=(n,) * 4)
    W = project_to_weyl(T, n)
    if scale != 1.0:
        W = WeylForm(n, scale * W.entries)
    return W


def weyl_quadratic_norm(W) -> float:
    """Sum over all indices of ``(W_ijkl + W_ilkj)^2``."""
    W = _entries(W)
    X = W + np.einsum("ilkj->ijkl", W)
    return float(np.sum(X * X))


def M_matrix(W) -> np.ndarray:
    """``M_pq = sum_ikl (W_ipkl + W_ilkp)(W_iqkl + W_ilkq)``."""
    W = _entries(W)
    n = W.shape[0]
    A = W + np.einsum("ilkp->ipkl", W)
    A = np.ascontiguousarray(A.transpose(1, 0, 2, 3)).reshape(n, -1)
    M = A @ A.T
    return 0.5 * (M + M.T)


def _contract_last(W: np.ndarray, x: np.ndarray) -> np.ndarray:
    """``sum_q W[..., q] x[m, q]`` for a batch of points, result ``(m, n, n, n)``."""
    n = W.shape[0]
    out = x @ W.reshape(-1, n).T
    return out.reshape(x.shape[0], n, n, n)


def H_jet(W, x, order: int = 2):
    """Value and derivatives of ``H`` at ``x``.

    Returns ``(H, dH, d2H)`` with ``d2H`` constant in ``x`` (broadcast view
    for batches). ``order`` limits how many pieces are computed.
    """
    W = _entries(W)
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    X = np.atleast_2d(x)
    # Wx[m, i, p, k] = sum_q W_ipkq x_q
    Wx = _contract_last(W, X)
    H = np.einsum("mipk,mp->mik", Wx, X)
    out = [H]
    if order >= 1:
        # d_l H_ik = sum_q W_ilkq x_q + sum_p W_ipkl x_p
        dH = Wx.transpose(0, 1, 3, 2) + np.einsum("mkli->mikl", Wx)
        out.append(dH)
    if order >= 2:
        d2 = W.transpose(0, 2, 1, 3) + W.transpose(0, 2, 3, 1)
        out.append(d2 if single else np.broadcast_to(d2, (X.shape[0],) + d2.shape))
    if single:
        out = [o[0] for o in out[:2]] + out[2:]
    return tuple(out) if order > 0 else out[0]


def H_field(W, x) -> np.ndarray:
    """``H_ik(x) = sum_pq W_ipkq x_p x_q``."""
    return H_jet(W, x, order=0)


def scalar_times_jet(s, ds, d2s, T, dT, d2T):
    """Product rule jet of ``s(x) * T(x)`` for a scalar ``s`` and a matrix field ``T``.

    Scalars carry a leading batch axis (or none); ``ds`` is ``(..., n)``
    and ``d2s`` is ``(..., n, n)``.
    """
    s = np.asarray(s)[..., None, None]
    ds = np.asarray(ds)
    d2s = np.asarray(d2s)
    val = s * T
    d1 = s[..., None] * dT + ds[..., None, None, :] * T[..., None]
    d2 = (s[..., None, None] * d2T
          + d2s[..., None, None, :, :] * T[..., None, None]
          + ds[..., None, None, :, None] * dT[..., None, :]
          + ds[..., None, None, None, :] * dT[..., :, None])
    return val, d1, d2


def Hbar_jet(W, x):
    """Jet ``(Hbar, dHbar, d2Hbar)`` of ``Hbar(x) = (1 - |x|^2) H(x)``."""
    x = np.asarray(x, dtype=float)
    H, dH, d2H = H_jet(W, x, order=2)
    s = 1.0 - np.sum(x * x, axis=-1)
    ds = -2.0 * x
    d2s = -2.0 * np.broadcast_to(np.eye(x.shape[-1]), x.shape[:-1] + (x.shape[-1],) * 2)
    return scalar_times_jet(s, ds, d2s, H, dH, d2H)


def Hbar_field(W, x, with_gradient: bool = False):
    """``Hbar(x) = (1 - |x|^2) H(x)``, optionally with its first derivative.

    The first derivative follows ``d_l Hbar_ik = (1 - |x|^2) d_l H_ik - 2 H_ik x_l``.
    """
    x = np.asarray(x, dtype=float)
    if not with_gradient:
        s = 1.0 - np.sum(x * x, axis=-1)
        return np.asarray(s)[..., None, None] * H_field(W, x)
    H, dH = H_jet(W, x, order=1)
    s = 1.0 - np.sum(x * x, axis=-1)
    s = np.asarray(s)[..., None, None]
    return s * H, s[..., None] * dH - 2.0 * H[..., None] * x[..., None, None, :]
