"""Catalog of explicit pseudohermitian manifolds presented in analytic charts.

Every model is a single chart with an explicit validity domain.  The contact
form is registered symbolically, so exact partial derivatives are available
to third order.  CR frames are either closed-form (Heisenberg group, quadrics)
or computed pointwise as the intersection of the complexified tangent space
with the ambient holomorphic tangent space (sphere family), in which case
their derivatives are produced by the finite-difference engine downstream.

Conventions used throughout the package:

* chart coordinates are ordered ``(x^1, y^1, ..., x^n, y^n, t-like)`` with the
  transverse coordinate last;
* ambient space C^N is realised as R^{2N} with interleaved layout
  ``(X_1, Y_1, ..., X_N, Y_N)``, ``z_j = X_j + i Y_j``;
* the exterior derivative carries no 1/2 factor:
  ``(dθ)_{ij} = ∂_i θ_j − ∂_j θ_i``, and ``dθ(U,V) = Σ_{ij} K_{ij} U^i V^j``;
* the Levi form is ``L(Z, W̄) = −i dθ(Z, W̄)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
import sympy as sp
from scipy.stats import qmc

from .errors import DomainError, InvalidArgument
from .symjets import JetTable, as_batch, pullback_oneform

__all__ = [
    "ChartModel", "Domain", "ImmersionMap",
    "model_heisenberg", "model_sphere", "model_quadric",
    "model_weighted_sphere", "conformal_rescale", "immersion_standard",
    "model_from_id", "list_models", "decode_scalar_field",
]


# --------------------------------------------------------------------------
# chart domains
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Domain:
    """Sampling box plus a validity predicate for chart coordinates.

    ``box`` bounds where quasi-random test points are drawn; ``predicate``
    is the hard validity condition of the chart (None means all of R^m).
    """
    box: np.ndarray                       # (m, 2) lo/hi per coordinate
    predicate: Callable[[np.ndarray], np.ndarray] | None = None
    label: str = ""

    def contains(self, pts) -> np.ndarray:
        pts2d, single = as_batch(pts, self.box.shape[0])
        ok = np.ones(pts2d.shape[0], dtype=bool)
        if self.predicate is not None:
            ok &= np.asarray(self.predicate(pts2d), dtype=bool)
        return ok[0] if single else ok


def _halton_sample(domain: Domain, count: int, seed: int, margin: float) -> np.ndarray:
    """Quasi-random points in the (optionally shrunk) box, filtered by predicate."""
    if not 0.0 <= margin < 1.0:
        raise InvalidArgument(f"margin must lie in [0, 1), got {margin}")
    m = domain.box.shape[0]
    center = domain.box.mean(axis=1)
    half = (domain.box[:, 1] - domain.box[:, 0]) / 2.0 * (1.0 - margin)
    engine = qmc.Halton(d=m, scramble=True, seed=seed)
    rows: list[np.ndarray] = []
    have = 0
    for _ in range(64):
        raw = engine.random(max(4 * count, 64))
        pts = center + (2.0 * raw - 1.0) * half
        ok = domain.contains(pts)
        good = pts[ok]
        rows.append(good)
        have += good.shape[0]
        if have >= count:
            break
    else:
        raise DomainError(
            f"could not draw {count} valid chart points from {domain.label or 'domain'}"
        )
    return np.concatenate(rows, axis=0)[:count]


# --------------------------------------------------------------------------
# the chart model
# --------------------------------------------------------------------------

class ChartModel:
    """A strictly pseudoconvex pseudohermitian manifold in one analytic chart."""

    def __init__(self, *, label: str, family: str, n: int,
                 coords: Sequence[sp.Symbol], theta_sym: Sequence[sp.Expr],
                 domain: Domain, params: dict | None = None,
                 frame_table: JetTable | None = None,
                 ambient_table: JetTable | None = None,
                 ambient_complex_dim: int | None = None,
                 base: "ChartModel | None" = None,
                 u_sym: sp.Expr | None = None,
                 fd_scale: float = 1.0):
        if n < 1:
            raise InvalidArgument(f"CR dimension must be >= 1, got {n}")
        self.label = label
        self.family = family
        self.n = int(n)
        self.m = 2 * self.n + 1
        if len(coords) != self.m or len(theta_sym) != self.m:
            raise InvalidArgument("coords/theta must have length 2n+1")
        self.coords = tuple(coords)
        self.theta_sym = [sp.sympify(e) for e in theta_sym]
        self.domain = domain
        self.params = dict(params or {})
        self.fd_scale = float(fd_scale)
        self._theta_table = JetTable(self.coords, self.theta_sym, max_order=3)
        self._frame_table = frame_table
        self._ambient_table = ambient_table
        self.ambient_complex_dim = ambient_complex_dim
        self.base = base
        self.u_sym = u_sym
        self._u_table = (JetTable(self.coords, [u_sym], max_order=3)
                         if u_sym is not None else None)
        if frame_table is None and ambient_table is None and base is None:
            raise InvalidArgument("model needs a frame table, an ambient map, or a base model")

    # -- basic descriptors --------------------------------------------------

    @property
    def has_analytic_frame(self) -> bool:
        if self._frame_table is not None:
            return True
        if self.base is not None:
            return self.base.has_analytic_frame
        return False

    def describe(self) -> str:
        kind = "closed-form frame" if self.has_analytic_frame else "solved frame"
        return f"{self.label}  (CR dim {self.n}, chart dim {self.m}, {kind})"

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"ChartModel({self.label!r})"

    # -- domain handling ----------------------------------------------------

    def sample_points(self, count: int, seed: int = 0, margin: float = 0.0) -> np.ndarray:
        return _halton_sample(self.domain, count, seed, margin)

    def assert_in_domain(self, pts, context: str = "") -> None:
        ok = np.atleast_1d(self.domain.contains(pts))
        if not bool(np.all(ok)):
            bad = int(np.argmin(ok))
            raise DomainError(
                f"point outside the {self.label} chart domain"
                + (f" during {context}" if context else "")
                + f" (first offender index {bad})"
            )

    # -- contact form -------------------------------------------------------

    def theta_jets(self, pts, order: int = 1):
        """[θ, ∂θ, ...] with θ of shape (B, m) and ∂^k θ of shape (B, m^k, m)."""
        return self._theta_table.eval(pts, order=order)

    def theta(self, pts) -> np.ndarray:
        return self._theta_table.eval(pts, order=0)[0]

    def dtheta(self, pts) -> np.ndarray:
        """K with K[..., i, j] = ∂_i θ_j − ∂_j θ_i, so dθ(U,V) = U^i K_{ij} V^j."""
        d1 = self._theta_table.eval(pts, order=1)[1]
        return d1 - np.swapaxes(d1, -2, -1)

    def contact_volume(self, pts) -> np.ndarray:
        """|θ ∧ (dθ)^n| relative to the coordinate volume form (must be nonzero).

        Computed as n! · |Pf(B)| via det(B) = Pf(B)^2 of the bordered
        antisymmetric matrix B = [[0, θ], [−θ^T, dθ]].
        """
        pts2d, single = as_batch(pts, self.m)
        th, d1 = self._theta_table.eval(pts2d, order=1)
        K = d1 - np.swapaxes(d1, -2, -1)
        nb = pts2d.shape[0]
        B = np.zeros((nb, self.m + 1, self.m + 1))
        B[:, 0, 1:] = th
        B[:, 1:, 0] = -th
        B[:, 1:, 1:] = K
        det = np.linalg.det(B)
        vol = math.factorial(self.n) * np.sqrt(np.maximum(det, 0.0))
        return vol[0] if single else vol

    # -- scalar rescaling data (conformal models) ---------------------------

    def u_jets(self, pts, order: int = 2):
        if self._u_table is None:
            raise InvalidArgument(f"model {self.label} carries no rescaling field")
        return [a[..., 0] for a in self._u_table.eval(pts, order=order)]

    # -- CR frame -----------------------------------------------------------

    def ambient_map(self, pts, order: int = 0):
        if self._ambient_table is None:
            if self.base is not None:
                return self.base.ambient_map(pts, order=order)
            raise InvalidArgument(f"model {self.label} has no ambient presentation")
        return self._ambient_table.eval(pts, order=order)

    def antiholomorphic_matrix(self, pts) -> np.ndarray:
        """M(q) with rows M[j,:] = d(X_j)−i·d(Y_j): ker M = T_{1,0} in chart basis."""
        d1 = self.ambient_map(pts, order=1)[1]          # (B, m, 2N)
        M = d1[..., 0::2] - 1j * d1[..., 1::2]          # (B, m, N)
        return np.swapaxes(M, -2, -1)                   # (B, N, m)

    def cr_anchor_basis(self, pts) -> np.ndarray | None:
        """Deterministic pointwise T_{1,0} basis (gauge for nearby evaluations).

        Returns None for closed-form frames (no gauge needed).  Otherwise the
        rows of the (B, n, m) result span the kernel of the antiholomorphic
        matrix, with a deterministic phase fix per row.
        """
        if self._frame_table is not None:
            return None
        if self._ambient_table is None:
            return self.base.cr_anchor_basis(pts)
        pts2d, single = as_batch(pts, self.m)
        M = self.antiholomorphic_matrix(pts2d)
        N = M.shape[1]
        _, s, vh = np.linalg.svd(M)
        if np.any(s[:, -1] <= 1e-10 * s[:, 0]):
            raise DomainError(
                f"ambient tangency system is rank deficient on {self.label}"
            )
        basis = vh[:, N:, :].conj()                     # (B, n, m)
        mag = np.abs(basis)
        idx = np.argmax(mag, axis=-1)                   # (B, n)
        lead = np.take_along_axis(basis, idx[..., None], axis=-1)[..., 0]
        phase = np.conj(lead) / np.abs(lead)
        basis = basis * phase[..., None]
        return basis[0] if single else basis

    def cr_frame(self, pts, anchor=None) -> np.ndarray:
        """Rows T_α of a T_{1,0} spanning set at each point, shape (B, n, m).

        For solved frames, passing ``anchor`` (a (n, m) or (B, n, m) basis from
        ``cr_anchor_basis``) projects that fixed basis onto the kernel at each
        point, which yields a smooth frame field near the anchor point.
        """
        pts2d, single = as_batch(pts, self.m)
        if self._frame_table is not None:
            val = self._frame_table.eval(pts2d, order=0)[0]
            out = val.reshape(pts2d.shape[0], self.n, self.m)
            return out[0] if single else out
        if self._ambient_table is None:
            out = self.base.cr_frame(pts2d, anchor=anchor)
            return out[0] if single else out
        if anchor is None:
            out = self.cr_anchor_basis(pts2d)
            return out[0] if single else out
        anchor = np.asarray(anchor, dtype=complex)
        if anchor.ndim == 2:
            anchor = np.broadcast_to(anchor, (pts2d.shape[0],) + anchor.shape)
        M = self.antiholomorphic_matrix(pts2d)
        Ma = np.einsum("bNm,bnm->bNn", M, anchor)
        MMH = np.einsum("bNm,bKm->bNK", M, M.conj())
        try:
            X = np.linalg.solve(MMH, Ma)
        except np.linalg.LinAlgError as exc:
            raise DomainError(
                f"tangency projection degenerate on {self.label}: {exc}"
            ) from None
        corr = np.einsum("bNm,bNn->bnm", M.conj(), X)
        out = anchor - corr
        return out[0] if single else out

    def cr_frame_jets(self, pts, order: int = 1):
        """Exact frame derivatives for closed-form frames.

        Returns [T, ∂T, ...] with T of shape (B, n, m) and ∂^k T of shape
        (B, m^k, n, m) (derivative axes first).  Solved frames differentiate
        numerically through the frame-calculus layer instead.
        """
        if self._frame_table is None:
            raise InvalidArgument(
                f"model {self.label} has a solved frame; use the numeric engine"
            )
        pts2d, single = as_batch(pts, self.m)
        tables = self._frame_table.eval(pts2d, order=order)
        out = [a.reshape(a.shape[:-1] + (self.n, self.m)) for a in tables]
        return [a[0] for a in out] if single else out


# --------------------------------------------------------------------------
# coordinate/symbol helpers
# --------------------------------------------------------------------------

def _plane_coords(n: int, transverse: str) -> tuple[sp.Symbol, ...]:
    syms: list[sp.Symbol] = []
    for a in range(1, n + 1):
        syms.append(sp.Symbol(f"x{a}", real=True))
        syms.append(sp.Symbol(f"y{a}", real=True))
    syms.append(sp.Symbol(transverse, real=True))
    return tuple(syms)


def _fmt(v: float) -> str:
    return f"{v:g}"


def _nsimp(v) -> sp.Expr:
    return sp.nsimplify(sp.sympify(v), rational=True)


# --------------------------------------------------------------------------
# builders
# --------------------------------------------------------------------------

def model_heisenberg(n: int = 1) -> ChartModel:
    """Heisenberg group H_n: θ = dt + 2 Σ (x^j dy^j − y^j dx^j), frame closed-form."""
    if n < 1:
        raise InvalidArgument(f"CR dimension must be >= 1, got {n}")
    coords = _plane_coords(n, "t")
    m = 2 * n + 1
    theta = [sp.Integer(0)] * m
    for a in range(n):
        x, y = coords[2 * a], coords[2 * a + 1]
        theta[2 * a] = -2 * y
        theta[2 * a + 1] = 2 * x
    theta[m - 1] = sp.Integer(1)
    frame_exprs: list[sp.Expr] = []
    for a in range(n):
        x, y = coords[2 * a], coords[2 * a + 1]
        comps = [sp.Integer(0)] * m
        comps[2 * a] = sp.Rational(1, 2)
        comps[2 * a + 1] = -sp.I / 2
        comps[m - 1] = sp.I * x + y
        frame_exprs.extend(comps)
    box = np.repeat(np.array([[-1.0, 1.0]]), m, axis=0)
    return ChartModel(
        label=f"heisenberg:n={n}", family="heisenberg", n=n, coords=coords,
        theta_sym=theta, domain=Domain(box=box, label="heisenberg"),
        params={"n": n},
        frame_table=JetTable(coords, frame_exprs, max_order=2, complex_valued=True),
    )


def _sphere_chart(n: int):
    """Rational chart of S^{2n+1} minus one point, ambient layout interleaved."""
    m = 2 * n + 1
    coords = _plane_coords(n, "s")
    xi = list(coords)
    r2 = sum(c ** 2 for c in xi)
    den = 1 + r2
    F = [2 * c / den for c in xi] + [(1 - r2) / den]     # (2N,) with N = n+1
    return coords, [sp.together(f) for f in F]


def model_sphere(n: int = 1) -> ChartModel:
    """Unit sphere S^{2n+1} with θ = (i/2)(z·dz̄ − z̄·dz) = Σ (X_j dY_j − Y_j dX_j)."""
    if n < 1:
        raise InvalidArgument(f"CR dimension must be >= 1, got {n}")
    N = n + 1
    coords, F = _sphere_chart(n)
    m = 2 * n + 1
    amb = [sp.Symbol(f"w{j}", real=True) for j in range(2 * N)]
    form = [sp.Integer(0)] * (2 * N)
    for j in range(N):
        form[2 * j] = -amb[2 * j + 1]                    # coeff of dX_j is −Y_j
        form[2 * j + 1] = amb[2 * j]                     # coeff of dY_j is  X_j
    theta = pullback_oneform(form, F, amb, coords)
    box = np.repeat(np.array([[-0.8, 0.8]]), m, axis=0)

    def inside(pts: np.ndarray) -> np.ndarray:
        return np.sum(pts ** 2, axis=1) <= 100.0

    return ChartModel(
        label=f"sphere:n={n}", family="sphere", n=n, coords=coords,
        theta_sym=theta, domain=Domain(box=box, predicate=inside, label="sphere"),
        params={"n": n},
        ambient_table=JetTable(coords, F, max_order=2),
        ambient_complex_dim=N,
    )


def model_quadric(n: int = 1, c: float = 0.5, sign: str = "+",
                  g: np.ndarray | None = None) -> ChartModel:
    """Quadric {g_{αβ̄} z^α z̄^β ± (w w̄ − c) = 0} in the chart (z, φ), w = ρ e^{iφ}.

    θ_± = i g_{αβ̄}(z^α dz̄^β − z̄^β dz^α) ± i (w dw̄ − w̄ dw); in the chart the
    w-part contributes exactly ±2ρ² dφ with ρ² = c − z*gz (sign +) or
    ρ² = c + z*gz (sign −).
    """
    if n < 1:
        raise InvalidArgument(f"CR dimension must be >= 1, got {n}")
    if not (isinstance(c, (int, float)) and c > 0):
        raise InvalidArgument(f"quadric scale c must be positive, got {c}")
    if sign not in ("+", "-"):
        raise InvalidArgument(f"sign must be '+' or '-', got {sign!r}")
    if g is None:
        g_mat = np.eye(n, dtype=complex)
        g_tag = None
    else:
        g_mat = np.asarray(g, dtype=complex)
        if g_mat.shape != (n, n):
            raise InvalidArgument(f"g must be {n}x{n}, got {g_mat.shape}")
        if not np.allclose(g_mat, g_mat.conj().T, atol=1e-12):
            raise InvalidArgument("g must be Hermitian")
        if np.min(np.linalg.eigvalsh(g_mat)) <= 0:
            raise InvalidArgument("g must be positive definite")
        g_tag = np.array2string(g_mat, precision=3)
    coords = _plane_coords(n, "phi")
    m = 2 * n + 1
    z = [coords[2 * a] + sp.I * coords[2 * a + 1] for a in range(n)]
    G = [[_nsimp(g_mat[a, b].real) + sp.I * _nsimp(g_mat[a, b].imag)
          for b in range(n)] for a in range(n)]
    c_sym = _nsimp(c)
    # A_γ = Σ_α g_{αγ̄} z^α ;  θ_{x_γ} = −2 Im A_γ,  θ_{y_γ} = 2 Re A_γ
    theta = [sp.Integer(0)] * m
    for gamma in range(n):
        A = sum(G[alpha][gamma] * z[alpha] for alpha in range(n))
        theta[2 * gamma] = sp.expand(-2 * sp.im(A))
        theta[2 * gamma + 1] = sp.expand(2 * sp.re(A))
    zgz = sp.expand(sp.re(sum(G[a][b] * z[a] * sp.conjugate(z[b])
                              for a in range(n) for b in range(n))))
    sgn = 1 if sign == "+" else -1
    rho2 = sp.expand(c_sym - zgz) if sign == "+" else sp.expand(c_sym + zgz)
    theta[m - 1] = sp.expand(sgn * 2 * rho2)

    # closed-form holomorphic frame: T_μ = ∂_{z^μ} − (i/2) (∂_{z^μ} ρ²)/ρ² ∂_φ
    frame_exprs: list[sp.Expr] = []
    for mu in range(n):
        dz_rho2 = (sp.diff(rho2, coords[2 * mu]) - sp.I * sp.diff(rho2, coords[2 * mu + 1])) / 2
        comps = [sp.Integer(0)] * m
        comps[2 * mu] = sp.Rational(1, 2)
        comps[2 * mu + 1] = -sp.I / 2
        comps[m - 1] = sp.together(-sp.I * dz_rho2 / (2 * rho2))
        frame_exprs.extend(comps)

    lam_max = float(np.max(np.linalg.eigvalsh(g_mat)))
    half = 0.3 * math.sqrt(c / (n * lam_max))
    box = np.repeat(np.array([[-half, half]]), m, axis=0)
    box[m - 1] = [-3.0, 3.0]
    if sign == "+":
        fn = sp.lambdify(coords[:-1], zgz, modules="numpy")

        def inside(pts: np.ndarray) -> np.ndarray:
            vals = np.asarray(fn(*[pts[:, i] for i in range(m - 1)]))
            vals = np.broadcast_to(vals, (pts.shape[0],))
            return vals < 0.75 * c
        predicate = inside
    else:
        predicate = None
    params = {"n": n, "c": float(c), "sign": sign}
    if g_tag is not None:
        params["g"] = g_tag
    return ChartModel(
        label=f"quadric:{sign},c={_fmt(c)},n={n}", family="quadric", n=n,
        coords=coords, theta_sym=theta,
        domain=Domain(box=box, predicate=predicate, label="quadric"),
        params=params,
        frame_table=JetTable(coords, frame_exprs, max_order=2, complex_valued=True),
    )


def model_weighted_sphere(a: Sequence[float]) -> ChartModel:
    """Sphere chart with θ_A = (Σ_j a_j |z_j|²)^{-1} θ_0 (weights nondecreasing)."""
    weights = [float(v) for v in a]
    if len(weights) < 2:
        raise InvalidArgument("need n+1 >= 2 weights")
    if any(w <= 0 for w in weights):
        raise InvalidArgument(f"weights must be positive, got {weights}")
    if any(weights[j] > weights[j + 1] for j in range(len(weights) - 1)):
        raise InvalidArgument(f"weights must be nondecreasing, got {weights}")
    n = len(weights) - 1
    base = model_sphere(n)
    coords = base.coords
    F = base._ambient_table.exprs
    W = sp.cancel(sum(_nsimp(weights[j]) * (F[2 * j] ** 2 + F[2 * j + 1] ** 2)
                      for j in range(n + 1)))
    if W == 1:
        theta = list(base.theta_sym)
        u = sp.Integer(0)
    else:
        theta = [sp.together(sp.cancel(t / W)) for t in base.theta_sym]
        u = -sp.log(W) / 2
    label = "weighted-sphere:a=" + "|".join(_fmt(w) for w in weights)
    return ChartModel(
        label=label, family="weighted-sphere", n=n, coords=coords,
        theta_sym=theta, domain=base.domain,
        params={"a": weights},
        ambient_table=base._ambient_table,
        ambient_complex_dim=base.ambient_complex_dim,
        base=base, u_sym=u,
    )


def conformal_rescale(base: ChartModel, u, u_tag: str | None = None) -> ChartModel:
    """New model with θ̂ = e^{2u} θ on the same CR structure (same frame source)."""
    u_expr = sp.sympify(u)
    extraneous = u_expr.free_symbols - set(base.coords)
    if extraneous:
        raise InvalidArgument(f"rescaling field uses unknown symbols {extraneous}")
    factor = sp.exp(2 * u_expr)
    theta = [sp.together(factor * t) for t in base.theta_sym]
    tag = u_tag if u_tag is not None else sp.srepr(u_expr)
    label = f"conformal:{base.label},u={tag}"
    total_u = u_expr if base.u_sym is None else sp.expand(base.u_sym + u_expr)
    return ChartModel(
        label=label, family="conformal", n=base.n, coords=base.coords,
        theta_sym=theta, domain=base.domain,
        params={**base.params, "base": base.label, "u": tag},
        frame_table=base._frame_table,
        ambient_table=base._ambient_table,
        ambient_complex_dim=base.ambient_complex_dim,
        base=base, u_sym=total_u,
        fd_scale=base.fd_scale,
    )


# --------------------------------------------------------------------------
# standard immersions
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ImmersionMap:
    """A chart-level immersion with constant (linear) differential."""
    source: ChartModel
    target: ChartModel
    matrix: np.ndarray          # (m_target, m_source)
    label: str

    def phi(self, pts) -> np.ndarray:
        pts2d, single = as_batch(pts, self.source.m)
        out = pts2d @ self.matrix.T
        return out[0] if single else out

    def dphi(self, pts=None) -> np.ndarray:
        return self.matrix


def _zero_padding_matrix(m_src: int, m_tgt: int) -> np.ndarray:
    """Insert zeros before the last (transverse) coordinate."""
    P = np.zeros((m_tgt, m_src))
    for i in range(m_src - 1):
        P[i, i] = 1.0
    P[m_tgt - 1, m_src - 1] = 1.0
    return P


def immersion_standard(m: int, n: int, family: str) -> ImmersionMap:
    """Equatorial sphere-in-sphere or Heisenberg (z,t) ↦ (z,0,t), CR dims m < n."""
    if not (1 <= m < n):
        raise InvalidArgument(f"need 1 <= source dim < target dim, got {m}, {n}")
    if family == "sphere-in-sphere":
        src, tgt = model_sphere(m), model_sphere(n)
    elif family == "heisenberg-in-heisenberg":
        src, tgt = model_heisenberg(m), model_heisenberg(n)
    else:
        raise InvalidArgument(
            f"unknown immersion family {family!r}; "
            "use 'sphere-in-sphere' or 'heisenberg-in-heisenberg'"
        )
    P = _zero_padding_matrix(src.m, tgt.m)
    return ImmersionMap(source=src, target=tgt, matrix=P,
                        label=f"{family}:{m}->{n}")


# --------------------------------------------------------------------------
# registry
# --------------------------------------------------------------------------

def decode_scalar_field(spec: str, coords: Sequence[sp.Symbol]) -> sp.Expr:
    """Decode a CLI/config rescaling-field preset into a sympy expression.

    Accepted forms: "0"; "x1" (first chart coordinate); "const:<v>" (u ≡ v);
    "homothety:<a>" (u = −ln(a)/2, so θ̂ = θ/a); or a bare float.
    """
    spec = str(spec).strip()
    if spec == "0":
        return sp.Integer(0)
    if spec == "x1":
        return coords[0]
    if spec.startswith("const:"):
        return sp.Float(float(spec.split(":", 1)[1]))
    if spec.startswith("homothety:"):
        a = float(spec.split(":", 1)[1])
        if a <= 0:
            raise InvalidArgument(f"homothety factor must be positive, got {a}")
        return -sp.log(_nsimp(a)) / 2
    try:
        return sp.Float(float(spec))
    except ValueError:
        raise InvalidArgument(f"unknown rescaling-field preset {spec!r}") from None


def _parse_tokens(body: str) -> dict:
    params: dict = {}
    for token in filter(None, (t.strip() for t in body.split(","))):
        if token in ("+", "-"):
            params["sign"] = token
        elif "=" in token:
            key, val = token.split("=", 1)
            params[key.strip()] = val.strip()
        else:
            params["base"] = token
    return params


_FAMILY_KEYS = {
    "heisenberg": {"n"},
    "sphere": {"n"},
    "quadric": {"n", "c", "sign"},
    "weighted-sphere": {"a"},
}


def _check_keys(family: str, params: dict) -> None:
    extra = set(params) - _FAMILY_KEYS[family]
    if extra:
        raise InvalidArgument(
            f"model family {family!r} does not accept "
            f"{', '.join(sorted(map(repr, extra)))}; "
            f"accepted: {', '.join(sorted(_FAMILY_KEYS[family]))}")


def _build_from_params(family: str, params: dict) -> ChartModel:
    try:
        return _dispatch_family(family, params)
    except InvalidArgument:
        raise
    except (TypeError, ValueError) as exc:
        raise InvalidArgument(
            f"bad parameters for model family {family!r}: {exc}") from None


def _dispatch_family(family: str, params: dict) -> ChartModel:
    if family == "heisenberg":
        _check_keys(family, params)
        return model_heisenberg(int(params.get("n", 1)))
    if family == "sphere":
        _check_keys(family, params)
        return model_sphere(int(params.get("n", 1)))
    if family == "quadric":
        _check_keys(family, params)
        return model_quadric(n=int(params.get("n", 1)),
                             c=float(params.get("c", 0.5)),
                             sign=params.get("sign", "+"))
    if family == "weighted-sphere":
        _check_keys(family, params)
        raw = params.get("a", "1|2")
        if isinstance(raw, str):
            weights = [float(v) for v in raw.split("|")]
        else:
            weights = [float(v) for v in raw]
        return model_weighted_sphere(weights)
    if family == "conformal":
        base_family = params.get("base")
        if base_family is None:
            raise InvalidArgument("conformal id must name a base model, "
                                  "e.g. conformal:heisenberg,n=1,u=x1")
        base_params = {k: v for k, v in params.items() if k not in ("base", "u")}
        base = _build_from_params(base_family, base_params)
        u_spec = params.get("u", "0")
        return conformal_rescale(base, decode_scalar_field(u_spec, base.coords),
                                 u_tag=u_spec)
    raise InvalidArgument(f"unknown model family {family!r}")


@lru_cache(maxsize=64)
def model_from_id(model_id: str) -> ChartModel:
    """Build a registered model from its string id, e.g. "quadric:-,c=0.5"."""
    model_id = model_id.strip()
    family, _, body = model_id.partition(":")
    return _build_from_params(family.strip(), _parse_tokens(body))


def list_models() -> list[dict]:
    """Registry contents: family, parameter signature, and an example id."""
    return [
        {"family": "heisenberg", "signature": "n:int>=1",
         "example": "heisenberg:n=1",
         "note": "Heisenberg group, θ = dt + 2Σ(x dy − y dx), flat and torsion-free"},
        {"family": "sphere", "signature": "n:int>=1",
         "example": "sphere:n=1",
         "note": "unit sphere S^{2n+1}, θ = (i/2)(z·dz̄ − z̄·dz), H ≡ 1"},
        {"family": "quadric", "signature": "sign:+|-, c:float>0, n:int>=1",
         "example": "quadric:-,c=0.5",
         "note": "quadric {z*gz ± (|w|²−c) = 0}, H ≡ ±1/(2c)"},
        {"family": "weighted-sphere", "signature": "a:w1|w2|... (n+1 weights)",
         "example": "weighted-sphere:a=1|2",
         "note": "sphere with θ_A = θ0 / Σ a_j |z_j|², non-constant H"},
        {"family": "conformal", "signature": "base-family, base params, u:preset",
         "example": "conformal:heisenberg,n=1,u=x1",
         "note": "θ̂ = e^{2u}θ over a base model; u presets: 0, x1, const:<v>, homothety:<a>"},
    ]
