"""Adapted-frame constructor and first-order contact calculus.

Builds, at batches of chart points: the Reeb field (least-squares solution of
θ(T) = 1, dθ(T, ·) = 0 with iterative refinement), a Levi-orthonormal complex
frame (Gram–Schmidt in the Hermitian Levi inner product, normalized so the
realified frame is Webster-orthonormal), the realified adapted frame
(T, X_1..X_n, JX_1..JX_n), the coordinate matrices of J and the Webster
metric, plus Lie brackets/derivatives and the infinitesimal pseudohermitian
symmetry checker.

Conventions: g(X,Y) = dθ(X, JY) on H(M), g(T,T) = 1, g(T, H) = 0;
Ω = −dθ; L(Z, W̄) = −i dθ(Z, W̄).  The complex frame is normalized to
L(T'_α, T'_β̄) = δ_{αβ}/2 so that X_α = T'_α + T̄'_α has unit Webster length.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (DegenerateContact, InvalidArgument,
                     NotStrictlyPseudoconvex)
from .jets import as_field, default_step, fd_first
from .symjets import as_batch

__all__ = ["FramePacket", "reeb_field", "frame_packet", "levi_matrix",
           "orthonormal_frame_func", "anchored_cr_frame_func",
           "lie_bracket", "lie_derivative_form", "is_infinitesimal_psh",
           "heisenberg_symmetry_candidates", "J_FRAME"]

_COND_LIMIT = 1e10


# --------------------------------------------------------------------------
# Reeb field
# --------------------------------------------------------------------------

def _reeb_from_jets(theta: np.ndarray, K: np.ndarray):
    """Solve the overdetermined defining pair via refined normal equations."""
    B, m = theta.shape
    A = np.concatenate([K, theta[:, None, :]], axis=1)          # (B, m+1, m)
    G = np.einsum("bri,brj->bij", A, A)
    cond = np.linalg.cond(G)
    if np.any(~np.isfinite(cond)) or np.any(cond > _COND_LIMIT):
        raise DegenerateContact(
            f"Reeb system condition number {np.max(cond):.3e} exceeds 1e10 "
            "(contact condition failing?)"
        )
    T = np.linalg.solve(G, theta[..., None])[..., 0]
    # one step of iterative refinement on the rectangular system
    r = -np.einsum("bri,bi->br", A, T)
    r[:, m] += 1.0
    T = T + np.linalg.solve(G, np.einsum("bri,br->bi", A, r)[..., None])[..., 0]
    resid = -np.einsum("bri,bi->br", A, T)
    resid[:, m] += 1.0
    return T, np.max(np.abs(resid), axis=1)


def reeb_field(model, pts, return_residual: bool = False):
    """Reeb vector T with θ(T) = 1, dθ(T, ·) = 0 at each point."""
    pts2d, single = as_batch(pts, model.m)
    th, d1 = model.theta_jets(pts2d, order=1)
    K = d1 - np.swapaxes(d1, -2, -1)
    T, resid = _reeb_from_jets(th, K)
    if np.any(resid > 1e-10):
        raise DegenerateContact(
            f"Reeb defining-pair residual {np.max(resid):.3e} exceeds 1e-10 "
            f"on {model.label}"
        )
    if single:
        T, resid = T[0], resid[0]
    return (T, resid) if return_residual else T


# --------------------------------------------------------------------------
# Levi form and orthonormal frames
# --------------------------------------------------------------------------

def _levi_inner(K: np.ndarray, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """L(u, v̄) = −i dθ(u, v̄) for complex chart vectors u, v (batched rows)."""
    return -1j * np.einsum("bi,bij,bj->b", u, K, v.conj())


def levi_matrix(model, pts, frame=None) -> np.ndarray:
    """Hermitian matrix L[α,β] = −i dθ(T_α, T̄_β) in the given (or raw) frame."""
    pts2d, single = as_batch(pts, model.m)
    K = model.dtheta(pts2d)
    Tc = model.cr_frame(pts2d) if frame is None else np.asarray(frame, dtype=complex)
    L = -1j * np.einsum("bai,bij,bcj->bac", Tc, K, Tc.conj())
    return L[0] if single else L


def _gram_schmidt_levi(K: np.ndarray, Tc: np.ndarray, label: str) -> np.ndarray:
    """Orthonormalize frame rows to L(U_α, U_β̄) = δ_{αβ}/2."""
    B, n, m = Tc.shape
    U = np.empty_like(Tc)
    for a in range(n):
        v = Tc[:, a].copy()
        for b in range(a):
            coef = 2.0 * _levi_inner(K, v, U[:, b])
            v -= coef[:, None] * U[:, b]
        nrm2 = _levi_inner(K, v, v).real
        if np.any(nrm2 <= 1e-13):
            raise NotStrictlyPseudoconvex(
                f"Levi form fails positivity during orthonormalization on {label} "
                f"(pivot {np.min(nrm2):.3e})"
            )
        U[:, a] = v / np.sqrt(2.0 * nrm2)[:, None]
    return U


def _j_frame(n: int) -> np.ndarray:
    m = 2 * n + 1
    Jf = np.zeros((m, m))
    for a in range(n):
        Jf[1 + n + a, 1 + a] = 1.0      # J X_α = X_{n+α}
        Jf[1 + a, 1 + n + a] = -1.0     # J X_{n+α} = −X_α
    return Jf


J_FRAME = _j_frame  # exported for the curvature layer


@dataclass
class FramePacket:
    """Adapted frame data at a batch of points (all arrays carry the batch axis).

    ``e`` has the frame vectors as columns in the order (T, X_1..X_n,
    JX_1..JX_n); ``f = e^{-1}`` converts coordinate components to frame
    components.  ``g`` and ``J`` are coordinate matrices; ``Omega = −dθ``.
    """
    point: np.ndarray          # (B, m)
    theta: np.ndarray          # (B, m)
    K: np.ndarray              # (B, m, m) exterior derivative matrix of θ
    Omega: np.ndarray          # (B, m, m)
    T: np.ndarray              # (B, m) Reeb
    Tc: np.ndarray             # (B, n, m) Levi-orthonormal complex frame
    H: np.ndarray              # (B, 2n, m) rows X_1..X_n, JX_1..JX_n
    e: np.ndarray              # (B, m, m) frame columns
    f: np.ndarray              # (B, m, m) inverse
    J: np.ndarray              # (B, m, m)
    g: np.ndarray              # (B, m, m) Webster metric
    n: int
    label: str


def _orthonormal_core(model, pts2d: np.ndarray, anchor, rotate):
    th, d1 = model.theta_jets(pts2d, order=1)
    K = d1 - np.swapaxes(d1, -2, -1)
    T, _ = _reeb_from_jets(th, K)
    Tc = model.cr_frame(pts2d, anchor=anchor)
    if Tc.ndim == 2:
        Tc = Tc[None]
    U = _gram_schmidt_levi(K, Tc, model.label)
    if rotate is not None:
        R = np.asarray(rotate, dtype=complex)
        U = np.einsum("ab,xbm->xam", R, U)
    X = (U + U.conj()).real                      # (B, n, m)
    Y = (1j * (U - U.conj())).real               # (B, n, m) rows J X_α
    B, n, m = U.shape
    e = np.empty((B, m, m))
    e[:, :, 0] = T
    e[:, :, 1:1 + n] = np.swapaxes(X, 1, 2)
    e[:, :, 1 + n:] = np.swapaxes(Y, 1, 2)
    return th, K, T, U, X, Y, e


def frame_packet(model, pts, anchor=None, rotate=None) -> FramePacket:
    """Adapted orthonormal frame packet at a batch of points.

    ``anchor`` fixes the gauge of solved CR frames (see
    ``ChartModel.cr_anchor_basis``); ``rotate`` applies a constant n×n unitary
    to the complex frame after orthonormalization (covariance testing).
    """
    pts2d, _ = as_batch(pts, model.m)
    th, K, T, U, X, Y, e = _orthonormal_core(model, pts2d, anchor, rotate)
    cond = np.linalg.cond(e)
    if np.any(~np.isfinite(cond)) or np.any(cond > _COND_LIMIT):
        raise DegenerateContact(
            f"adapted frame is numerically degenerate on {model.label} "
            f"(condition {np.max(cond):.3e})"
        )
    f = np.linalg.inv(e)
    Jf = _j_frame(model.n)
    J = np.einsum("bij,jk,bkl->bil", e, Jf, f)
    g = np.einsum("bki,bkj->bij", f, f)
    H = np.concatenate([X, Y], axis=1)
    return FramePacket(point=pts2d, theta=th, K=K, Omega=-K, T=T, Tc=U, H=H,
                       e=e, f=f, J=J, g=g, n=model.n, label=model.label)


# --------------------------------------------------------------------------
# frame fields for finite differencing
# --------------------------------------------------------------------------

def anchored_cr_frame_func(model, base_pts: np.ndarray):
    """Callable q → CR frame rows with the gauge anchored at ``base_pts``.

    The callable accepts stencil batches whose flattened layout keeps the base
    point as the fastest-varying index (the layout produced by ``fd_first``),
    so each shifted copy is projected onto the gauge of its own base point.
    """
    base_pts = np.atleast_2d(np.asarray(base_pts, dtype=float))
    B = base_pts.shape[0]
    anchor = model.cr_anchor_basis(base_pts)

    def func(q: np.ndarray) -> np.ndarray:
        q = np.atleast_2d(q)
        if anchor is None:
            return model.cr_frame(q)
        idx = np.arange(q.shape[0]) % B
        return model.cr_frame(q, anchor=anchor[idx])

    return func, anchor


def orthonormal_frame_func(model, base_pts: np.ndarray, rotate=None):
    """Callable q → adapted frame matrix e(q), smooth near ``base_pts``.

    Uses one anchored gauge per base point so the orthonormal frame is a
    differentiable field on each stencil cloud; returns (func, anchor).
    """
    base_pts = np.atleast_2d(np.asarray(base_pts, dtype=float))
    B = base_pts.shape[0]
    anchor = model.cr_anchor_basis(base_pts)

    def func(q: np.ndarray) -> np.ndarray:
        q = np.atleast_2d(q)
        anc = None if anchor is None else anchor[np.arange(q.shape[0]) % B]
        _, _, _, _, _, _, e = _orthonormal_core(model, q, anc, rotate)
        return e

    return func, anchor


# --------------------------------------------------------------------------
# Lie calculus
# --------------------------------------------------------------------------

def lie_bracket(V, W, pts, m: int | None = None, scale: float = 1.0) -> np.ndarray:
    """[V, W]^k = V^i ∂_i W^k − W^i ∂_i V^k via jets of both fields."""
    pts = np.asarray(pts, dtype=float)
    mm = m if m is not None else pts.shape[-1]
    Vf, Wf = as_field(V, mm, scale), as_field(W, mm, scale)
    pts2d, single = as_batch(pts, mm)
    Vv, dV = Vf.jet(pts2d, 1)[:2]
    Wv, dW = Wf.jet(pts2d, 1)[:2]
    out = np.einsum("bi,bik->bk", Vv, dW) - np.einsum("bi,bik->bk", Wv, dV)
    return out[0] if single else out


def lie_derivative_form(V, omega, pts, m: int | None = None,
                        scale: float = 1.0) -> np.ndarray:
    """(ℒ_V ω)_j = V^i ∂_i ω_j + ω_i ∂_j V^i (Cartan identity, jets of V and ω)."""
    pts = np.asarray(pts, dtype=float)
    mm = m if m is not None else pts.shape[-1]
    Vf, Of = as_field(V, mm, scale), as_field(omega, mm, scale)
    pts2d, single = as_batch(pts, mm)
    Vv, dV = Vf.jet(pts2d, 1)[:2]
    Ov, dO = Of.jet(pts2d, 1)[:2]
    out = np.einsum("bi,bij->bj", Vv, dO) + np.einsum("bi,bji->bj", Ov, dV)
    return out[0] if single else out


# --------------------------------------------------------------------------
# infinitesimal pseudohermitian symmetry checker
# --------------------------------------------------------------------------

def _span_residual(vectors: np.ndarray, basis: np.ndarray) -> np.ndarray:
    """Max norm of the component of each row of ``vectors`` off the row span."""
    G = np.einsum("blm,bkm->bkl", basis, basis.conj())
    rhs = np.einsum("bnm,bkm->bkn", vectors, basis.conj())
    coef = np.linalg.solve(G, rhs)                       # (B, K, n)
    proj = np.einsum("bkn,bkm->bnm", coef, basis)
    return np.max(np.abs(vectors - proj), axis=(1, 2))


def is_infinitesimal_psh(model, X, points, tol: float = 1e-7) -> dict:
    """Check whether X generates pseudohermitian transformations infinitesimally.

    Tests (a) ℒ_X θ = 0 and (b) [X, T_α] stays inside span{T_1..T_n, T}
    (bracket-invariance of the CR structure among contact fields) at each
    point; returns max residuals and the verdict at ``tol``.
    """
    pts2d, _ = as_batch(points, model.m)
    B = pts2d.shape[0]
    scale = model.fd_scale
    Xf = as_field(X, model.m, scale)
    Xv, dX = [np.asarray(a, dtype=complex) for a in Xf.jet(pts2d, 1)[:2]]

    th, d1 = model.theta_jets(pts2d, order=1)
    lie_theta = (np.einsum("bi,bij->bj", Xv.real, d1)
                 + np.einsum("bi,bji->bj", th, dX.real))
    res_theta = float(np.max(np.abs(lie_theta)))

    frame_func, _ = anchored_cr_frame_func(model, pts2d)
    Tc = frame_func(pts2d)                               # (B, n, m)
    dTc = fd_first(frame_func, pts2d, default_step(1, scale))   # (B, m, n, m)
    # [X, T_α]^k = X^i ∂_i T_α^k − T_α^i ∂_i X^k
    brackets = (np.einsum("bi,biak->bak", Xv, dTc)
                - np.einsum("bai,bik->bak", Tc, dX))
    T = reeb_field(model, pts2d)
    basis = np.concatenate([Tc, T[:, None, :].astype(complex)], axis=1)
    res_cr = float(np.max(_span_residual(brackets, basis)))

    return {
        "lie_theta_max": res_theta,
        "cr_span_max": res_cr,
        "passes": bool(res_theta <= tol and res_cr <= tol),
        "tolerance": tol,
        "points": B,
    }


def heisenberg_symmetry_candidates(model) -> list[tuple[str, object]]:
    """Named candidate symmetry fields on the Heisenberg group (n = 1).

    The first four span the expected (n+1)² = 4 dimensional symmetry algebra;
    the bare translation ∂_x fails the contact condition and serves as the
    negative control.
    """
    import sympy as sp
    from .jets import AnalyticField
    from .symjets import JetTable
    if model.family != "heisenberg" or model.n != 1:
        raise InvalidArgument("candidate list is defined for heisenberg:n=1")
    x, y, _t = model.coords
    zero = sp.Integer(0)
    fields = [
        ("reeb-translation", [zero, zero, sp.Integer(1)]),
        ("rotation", [-y, x, zero]),
        ("corrected-translation-x", [sp.Integer(1), zero, -2 * y]),
        ("corrected-translation-y", [zero, sp.Integer(1), 2 * x]),
        ("bare-translation-x", [sp.Integer(1), zero, zero]),
    ]
    out = []
    for name, comps in fields:
        table = JetTable(model.coords, comps, max_order=2)
        out.append((name, AnalyticField(table)))
    return out
