"""Complexified frame calculus and conformal transformation laws.

The adapted orthonormal frame (T, X_1..X_n, JX_1..JX_n) realifies the
Gram-Schmidt holomorphic frame T_a = (X_a - i JX_a)/2.  This module changes
connection data into that complex frame (a constant linear change of frame),
computes covariant derivatives of a scalar rescaling field u in complex
indices, and verifies the transformation laws of the Tanaka-Webster
connection and of holomorphic sectional curvature under the conformal change
of contact form theta_hat = e^{2u} theta.

Complex index order: 0 is the Reeb direction, 1..n the holomorphic frame
vectors T_a, n+1..2n their conjugates.  Index raising/lowering uses the
hermitian pairing of the holomorphic frame, under which u^a = 4 conj(u_a).
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
import sympy as sp

from .connection import solve_connection, coordinate_to_frame
from .curvature import curvature_packet, sectional_H, sample_horizontal_unit
from .errors import InvalidArgument, PreconditionFailed
from .jets import as_batch
from .models import ChartModel, conformal_rescale, decode_scalar_field
from .symjets import JetTable

__all__ = [
    "complex_basis", "complexify_connection", "scalar_complex_jets",
    "conformal_connection_rows", "conformal_curvature_rows",
    "homothety_rows", "conformal_check",
    "conformal_coefficients_check", "conformal_curvature_check",
    "pluriharmonic_hessian_check",
]

DEFAULT_COEFFICIENT_TOL = 1e-6
DEFAULT_CURVATURE_TOL = 1e-5
DEFAULT_HOMOTHETY_TOL = 1e-8


@lru_cache(maxsize=8)
def complex_basis(n: int):
    """Constant change-of-frame matrices between real and complex frames.

    Returns (Q, Qinv) with Q[i, A] the component of the complex frame vector
    T_A along the real frame vector E_i, so real components v = Q @ vc and
    complex components vc = Qinv @ v.
    """
    m = 2 * n + 1
    Q = np.zeros((m, m), dtype=complex)
    Q[0, 0] = 1.0
    for a in range(n):
        Q[1 + a, 1 + a] = 0.5
        Q[1 + n + a, 1 + a] = -0.5j
        Q[1 + a, 1 + n + a] = 0.5
        Q[1 + n + a, 1 + n + a] = 0.5j
    return Q, np.linalg.inv(Q)


def complexify_connection(gamma_frame: np.ndarray, n: int) -> np.ndarray:
    """Connection coefficients over the complex frame (constant frame change).

    Input and output follow the layout Gamma[b, out, direction, argument].
    """
    Q, Qinv = complex_basis(n)
    return np.einsum("Al,xlij,iB,jC->xABC", Qinv, gamma_frame, Q, Q)


def _u_table(model: ChartModel, u_expr: sp.Expr) -> JetTable:
    extraneous = sp.sympify(u_expr).free_symbols - set(model.coords)
    if extraneous:
        raise InvalidArgument(f"rescaling field uses unknown symbols {extraneous}")
    return JetTable(model.coords, [sp.sympify(u_expr)], max_order=2)


def scalar_complex_jets(model: ChartModel, conn, u_expr: sp.Expr,
                        pts: np.ndarray):
    """First and second covariant derivatives of u over the complex frame.

    Returns (u, uc, nabla_u, Gc) with uc[x, A] = T_A(u) and
    nabla_u[x, A, B] = (nabla_{T_B} du)(T_A) = T_B(T_A(u)) - Gamma^C_{BA} u_C,
    both in the complex frame of the connection packet ``conn``.
    """
    n = model.n
    pts2d, _ = as_batch(pts, model.m)
    Q, _ = complex_basis(n)
    e, de = conn.frame.e, conn.de
    Tc = np.einsum("xkj,jA->xkA", e, Q)          # coordinate comps of T_A
    dTc = np.einsum("xikv,vA->xikA", de, Q)      # d_i of the above
    u, du, d2u = [a[..., 0] for a in _u_table(model, u_expr).eval(pts2d, order=2)]
    uc = np.einsum("xkA,xk->xA", Tc, du)
    second = (np.einsum("xkB,xkjA,xj->xAB", Tc, dTc, du)
              + np.einsum("xkB,xjA,xkj->xAB", Tc, Tc, d2u))
    Gc = complexify_connection(conn.Gamma_frame, n)
    nabla_u = second - np.einsum("xCBA,xC->xAB", Gc, uc)
    return u, uc, nabla_u, Gc


def _row(rid: str, residual: float, tol: float, note: str = "") -> dict:
    out = {"id": rid, "residual": float(residual), "tolerance": float(tol),
           "passed": bool(residual <= tol)}
    if note:
        out["note"] = note
    return out


def _resolve_u(base: ChartModel, u) -> tuple[sp.Expr, str]:
    if isinstance(u, str):
        return decode_scalar_field(u, base.coords), u
    expr = sp.sympify(u)
    return expr, sp.srepr(expr)


def conformal_connection_rows(base: ChartModel, u, pts: np.ndarray,
                              tol: float = DEFAULT_COEFFICIENT_TOL) -> list[dict]:
    """Transformation law of the connection coefficients under e^{2u}theta.

    Verifies, over the complex frame of the base structure:

    * holomorphic block:   Ghat^a_{cb} = G^a_{cb} + 2(u_c d^a_b + u_b d^a_c)
    * mixed block:         Ghat^a_{cbar b} = G^a_{cbar b} - 2 conj(u_a) d_{bc}
    * rescaled-Reeb block: e^{2u} Ghat^c_{That a} = G^c_{0a} + 2 u_0 d^c_a
        + i (4 nabla_{cbar} u_a - 8 u_a conj(u_c)
             + 4 u_r G^c_{rbar a} - 4 conj(u_r) G^c_{r a})
    * commutation:  nabla_{bbar} u_a - nabla_a u_{bbar} = (i/2) d_{ab} u_0

    The hatted coefficients are computed from the rescaled model's
    chart-level connection re-expressed in the base frame, so the comparison
    is independent of the rescaled model's own frame gauge.
    """
    u_expr, u_tag = _resolve_u(base, u)
    n, m = base.n, base.m
    pts2d, _ = as_batch(pts, m)
    hat = conformal_rescale(base, u_expr, u_tag=u_tag)

    conn_b = solve_connection(base, pts2d)
    conn_h = solve_connection(hat, pts2d)
    e_b, f_b, de_b = conn_b.frame.e, conn_b.frame.f, conn_b.de

    uval, uc, nabla_u, Gc = scalar_complex_jets(base, conn_b, u_expr, pts2d)
    gh_frame = coordinate_to_frame(conn_h.Gamma_coord, e_b, f_b, de_b)
    Gch = complexify_connection(gh_frame, n)

    hol = slice(1, n + 1)
    bar = slice(n + 1, 2 * n + 1)
    u_hol = uc[:, hol]
    delta = np.eye(n)

    # holomorphic block
    shift = 2.0 * (np.einsum("xc,ab->xacb", u_hol, delta)
                   + np.einsum("xb,ac->xacb", u_hol, delta))
    res_hol = np.max(np.abs(Gch[:, hol, hol, hol] - Gc[:, hol, hol, hol] - shift))

    # mixed block
    shift_m = -2.0 * np.einsum("xa,bc->xacb", np.conj(u_hol), delta)
    res_mix = np.max(np.abs(Gch[:, hol, bar, hol] - Gc[:, hol, bar, hol] - shift_m))

    # rescaled-Reeb block
    t_hat_real = np.einsum("xij,xj->xi", f_b, conn_h.frame.T)
    _, Qinv = complex_basis(n)
    t_hat = np.einsum("AB,xB->xA", Qinv, t_hat_real.astype(complex))
    lhs = np.exp(2.0 * uval)[:, None, None] * np.einsum(
        "xB,xcBa->xca", t_hat, Gch)[:, hol, hol]
    nrm_ba = nabla_u[:, hol, bar]                     # nabla_{bbar} u_a at [x,a,b]
    rhs = (Gc[:, hol, 0, hol]
           + 2.0 * uc[:, 0][:, None, None] * delta[None]
           + 1j * (4.0 * nrm_ba.swapaxes(1, 2)
                   - 8.0 * np.einsum("xa,xc->xca", u_hol, np.conj(u_hol))
                   + 4.0 * np.einsum("xr,xcra->xca", u_hol, Gc[:, hol, bar, hol])
                   - 4.0 * np.einsum("xr,xcra->xca", np.conj(u_hol),
                                     Gc[:, hol, hol, hol])))
    res_reeb = np.max(np.abs(lhs - rhs))

    # commutation of second derivatives
    comm = (nabla_u[:, hol, bar] - nabla_u[:, bar, hol].swapaxes(1, 2)
            - 0.5j * uc[:, 0][:, None, None] * delta[None])
    res_comm = np.max(np.abs(comm))

    return [
        _row("conformal-coefficient-holomorphic", res_hol, tol),
        _row("conformal-coefficient-mixed", res_mix, tol),
        _row("conformal-coefficient-reeb", res_reeb, tol),
        _row("conformal-commutation", res_comm, tol),
    ]


def conformal_curvature_rows(base: ChartModel, u, pts: np.ndarray,
                             samples: int = 12, seed: int = 5,
                             tol: float = DEFAULT_CURVATURE_TOL) -> list[dict]:
    """Transformation law of holomorphic sectional curvature.

    For a unit horizontal v with holomorphic plane components
    xi^a = v^a + i v^{n+a}:

        e^{2u} Hhat(sigma) = H(sigma)
            + Re{ 2i u_0 - 8 sum |u_a|^2 - 8 nabla_{bbar} u_a xi^a conj(xi^b) }

    The bracket is real once the commutation identity holds; its imaginary
    part is reported as a separate consistency row.
    """
    u_expr, u_tag = _resolve_u(base, u)
    n, m = base.n, base.m
    pts2d, _ = as_batch(pts, m)
    hat = conformal_rescale(base, u_expr, u_tag=u_tag)

    pk_b = curvature_packet(base, pts2d)
    pk_h = curvature_packet(hat, pts2d)
    uval, uc, nabla_u, _ = scalar_complex_jets(base, pk_b.conn, u_expr, pts2d)

    hol = slice(1, n + 1)
    bar = slice(n + 1, 2 * n + 1)
    V = sample_horizontal_unit(n, samples, seed=seed)
    xi = V[:, 1:n + 1] + 1j * V[:, n + 1:]
    H_b = sectional_H(pk_b, V)
    H_h = sectional_H(pk_h, V)

    M = nabla_u[:, hol, bar]                    # [x, a, b] = nabla_{bbar} u_a
    quad = np.einsum("xab,ca,cb->xc", M, xi, np.conj(xi))
    bracket = (2j * uc[:, 0][:, None]
               - 8.0 * np.sum(np.abs(uc[:, hol]) ** 2, axis=1)[:, None]
               - 8.0 * quad)
    res = np.max(np.abs(np.exp(2.0 * uval)[:, None] * H_h - H_b
                        - np.real(bracket)))
    res_im = np.max(np.abs(np.imag(bracket)))
    return [
        _row("conformal-sectional", res, tol),
        _row("conformal-reality", res_im, tol),
    ]


def homothety_rows(model: ChartModel, pts: np.ndarray, a: float = 2.0,
                   samples: int = 8, seed: int = 9,
                   tol: float = DEFAULT_HOMOTHETY_TOL) -> list[dict]:
    """Constant rescaling theta_hat = theta / a multiplies H by a exactly."""
    if a <= 0:
        raise InvalidArgument(f"homothety factor must be positive, got {a}")
    pts2d, _ = as_batch(pts, model.m)
    hat = conformal_rescale(model, -sp.log(sp.nsimplify(a, rational=False)) / 2,
                            u_tag=f"homothety:{a}")
    pk = curvature_packet(model, pts2d)
    pk_h = curvature_packet(hat, pts2d)
    V = sample_horizontal_unit(model.n, samples, seed=seed)
    H = sectional_H(pk, V)
    H_h = sectional_H(pk_h, V)
    if np.min(np.abs(H)) < 1e-8:
        raise InvalidArgument(
            f"homothety ratio check needs nonvanishing H; got |H| down to "
            f"{np.min(np.abs(H)):.2e} on {model.label}"
        )
    ratio = H_h / H
    return [_row("homothety-ratio", np.max(np.abs(ratio - a)), tol,
                 note=f"mean ratio {np.mean(ratio):.12f}, factor {a}")]


def conformal_check(base: ChartModel, u, pts: np.ndarray,
                    coefficient_tol: float = DEFAULT_COEFFICIENT_TOL,
                    curvature_tol: float = DEFAULT_CURVATURE_TOL,
                    samples: int = 12, seed: int = 5) -> list[dict]:
    """All conformal transformation rows for one base model and one u."""
    rows = conformal_connection_rows(base, u, pts, tol=coefficient_tol)
    rows += conformal_curvature_rows(base, u, pts, samples=samples, seed=seed,
                                     tol=curvature_tol)
    return rows


def conformal_coefficients_check(base_model: ChartModel, u, point,
                                 tol: float = DEFAULT_COEFFICIENT_TOL) -> list[dict]:
    """Dual-path check of the connection-coefficient transformation laws.

    Solves the connection on ``conformal_rescale(base_model, u)`` directly
    and compares against the closed-form corrections of the base connection
    in the complex frame (holomorphic, mixed and rescaled-Reeb blocks plus
    the commutation identity).  ``point`` may be a single point or a batch.
    """
    return conformal_connection_rows(base_model, u, point, tol=tol)


def conformal_curvature_check(base: ChartModel, u, points, planes=None,
                              seed: int = 5,
                              tol: float = DEFAULT_CURVATURE_TOL) -> list[dict]:
    """Transformation law of holomorphic sectional curvature at ``points``.

    ``planes`` is the number of sampled holomorphic planes per point
    (default 12); sampling is seeded and deterministic.
    """
    samples = 12 if planes is None else int(planes)
    return conformal_curvature_rows(base, u, points, samples=samples,
                                    seed=seed, tol=tol)


def pluriharmonic_hessian_check(model: ChartModel, u, v, points,
                                tol: float = 1e-6,
                                cr_tol: float = 1e-7) -> list[dict]:
    """Complex-Hessian collapse for the real part of a CR function.

    For f = u + iv satisfying the tangential Cauchy-Riemann equations
    (T_b̄ f = 0 for every antiholomorphic frame direction), the mixed
    covariant Hessian of u degenerates to a multiple of the Levi form.  In
    the Levi-orthonormal complex frame used here (pairing δ/2) the closed
    form reads

        ∇_b̄ u_a = (i u_0 − v_0) · δ_{ab} / 4 ,

    the normalization being fixed by the same frame convention that gives
    the verified commutation defect ∇_b̄ u_a − ∇_a u_b̄ = (i/2) δ_{ab} u_0.
    (Check it on the Heisenberg group with f = t + i|z|²: that f is CR in
    this chart, u_0 = 1, v_0 = 0, and a direct frame computation gives
    ∇_1̄ u_1 = i/4.)

    Raises :class:`PreconditionFailed` when f is not CR at the requested
    tolerance; otherwise returns rows for the Hessian identity and for the
    commutation identity applied to both u and v.
    """
    pts2d, _ = as_batch(points, model.m)
    u_expr, u_tag = _resolve_u(model, u)
    v_expr, v_tag = _resolve_u(model, v)
    conn = solve_connection(model, pts2d)
    n = model.n
    _, uc, hess_u, _ = scalar_complex_jets(model, conn, u_expr, pts2d)
    _, vc, hess_v, _ = scalar_complex_jets(model, conn, v_expr, pts2d)

    anti = slice(1 + n, 1 + 2 * n)
    cr_residual = float(np.max(np.abs(uc[:, anti] + 1j * vc[:, anti])))
    if cr_residual > cr_tol:
        raise PreconditionFailed(
            f"u + iv (u = {u_tag}, v = {v_tag}) is not a CR function on "
            f"{model.label}: tangential Cauchy-Riemann residual "
            f"{cr_residual:.3e} exceeds {cr_tol:g}")

    holo = slice(1, 1 + n)
    # nabla_u[x, A, B] = (∇_{T_B} du)(T_A): argument slot first.
    mixed = hess_u[:, holo, anti]                      # ∇_b̄ u_a, a row index
    factor = 0.25 * (1j * uc[:, 0] - vc[:, 0])
    target = factor[:, None, None] * np.eye(n)[None]
    rows = [_row("pluriharmonic-hessian",
                 float(np.max(np.abs(mixed - target))), tol,
                 f"u = {u_tag}, v = {v_tag}, CR residual {cr_residual:.2e}")]
    for tag, hess, scalar in (("u", hess_u, uc), ("v", hess_v, vc)):
        comm = (hess[:, holo, anti]
                - np.swapaxes(hess[:, anti, holo], -2, -1)
                - 0.5j * scalar[:, 0][:, None, None] * np.eye(n)[None])
        rows.append(_row(f"hessian-commutation-{tag}",
                         float(np.max(np.abs(comm))), tol))
    return rows
