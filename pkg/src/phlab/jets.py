"""Pointwise differentiation engine.

Two kinds of fields flow through the package: analytic registrations (symbolic
tables from :mod:`phlab.symjets`, differentiated exactly) and plain callables
(differentiated by 4th-order central finite differences with one Richardson
refinement level and an attached error estimate).  This module provides the
uniform ``Jet`` interface plus the batched stencil primitives reused by the
frame/connection/curvature pipelines.

Stencil conventions: first derivatives use offsets (−2h, −h, +h, +2h) with
weights (1, −8, 8, −1)/(12h); higher orders nest that stencil with a
level-dependent step ``h_k = ε^{1/(4+k)}·scale`` chosen to balance truncation
against roundoff for the k-th derivative.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InvalidArgument
from .symjets import JetTable, as_batch

__all__ = ["Jet", "AnalyticField", "NumericField", "as_field", "jet_of",
           "fd_first", "fd_nested", "default_step"]

_EPS = float(np.finfo(float).eps)
_OFFSETS = np.array([-2.0, -1.0, 1.0, 2.0])
_WEIGHTS = np.array([1.0, -8.0, 8.0, -1.0]) / 12.0


def default_step(level: int, scale: float = 1.0) -> float:
    """Balanced central-difference step for the ``level``-th derivative."""
    return _EPS ** (1.0 / (4.0 + level)) * scale


def fd_first(func, pts: np.ndarray, h) -> np.ndarray:
    """4th-order central first derivatives, batched into one field evaluation.

    ``func`` maps (B, m) -> (B, ...); the result has shape (B, m, ...) with the
    derivative axis directly after the batch axis.
    """
    pts = np.asarray(pts, dtype=float)
    B, m = pts.shape
    hv = np.broadcast_to(np.asarray(h, dtype=float), (m,))
    shifts = _OFFSETS[:, None, None, None] * (np.eye(m) * hv[:, None])[None, :, None, :]
    big = (pts[None, None] + shifts).reshape(4 * m * B, m)
    vals = np.asarray(func(big))
    comp = vals.shape[1:]
    vals = vals.reshape(4, m, B, *comp)
    d = np.einsum("o,om...->m...", _WEIGHTS, vals)
    d = d / hv.reshape((m,) + (1,) * (d.ndim - 1))
    return np.moveaxis(d, 0, 1)


def fd_nested(func, pts: np.ndarray, order: int, steps) -> list[np.ndarray]:
    """[f, ∂f, ∂∂f, ...] up to ``order`` by nesting first-derivative stencils.

    ``steps[k-1]`` is the step used for every stencil level of the k-th
    derivative.  Derivative axes lead (after batch): ∂^k f has shape
    (B, m, ..., m, comp...) with axis ordering ∂_{i_1} ∂_{i_2} ... f.
    """
    pts = np.asarray(pts, dtype=float)
    out = [np.asarray(func(pts))]
    for k in range(1, order + 1):
        h = steps[k - 1]

        def level(q, depth=k, h=h):
            if depth == 1:
                return fd_first(func, q, h)
            return fd_first(lambda r: level(r, depth - 1, h), q, h)

        out.append(level(pts))
    return out


# --------------------------------------------------------------------------
# field protocol
# --------------------------------------------------------------------------

class AnalyticField:
    """Field with exact symbolic jets (wraps a JetTable)."""

    is_exact = True

    def __init__(self, table: JetTable, comp_shape: tuple[int, ...] | None = None):
        self.table = table
        self.m = table.m
        self.comp_shape = comp_shape

    def _reshape(self, arr):
        if self.comp_shape is None:
            return arr
        return arr.reshape(arr.shape[:-1] + self.comp_shape)

    def value(self, pts):
        return self._reshape(self.table.eval(pts, order=0)[0])

    def jet(self, pts, order: int):
        return [self._reshape(a) for a in self.table.eval(pts, order=order)]


class NumericField:
    """Field defined by a callable (B, m) -> (B, comp...), differentiated by FD."""

    is_exact = False

    def __init__(self, func, m: int, scale: float = 1.0):
        self.func = func
        self.m = m
        self.scale = float(scale)

    def value(self, pts):
        pts2d, single = as_batch(pts, self.m)
        out = np.asarray(self.func(pts2d))
        return out[0] if single else out

    def jet(self, pts, order: int, h=None):
        pts2d, single = as_batch(pts, self.m)
        steps = [h if h is not None else default_step(k, self.scale)
                 for k in range(1, order + 1)]
        out = fd_nested(self.func, pts2d, order, steps)
        return [a[0] for a in out] if single else out


def as_field(obj, m: int | None = None, scale: float = 1.0):
    """Coerce a JetTable, field object, or callable into the field protocol."""
    if isinstance(obj, (AnalyticField, NumericField)):
        return obj
    if isinstance(obj, JetTable):
        return AnalyticField(obj)
    if callable(obj):
        if m is None:
            raise InvalidArgument("callable fields need the chart dimension m")
        return NumericField(obj, m, scale=scale)
    raise InvalidArgument(f"cannot interpret {type(obj).__name__} as a field")


# --------------------------------------------------------------------------
# jets
# --------------------------------------------------------------------------

@dataclass
class Jet:
    """Value plus partial derivatives of a field at a point.

    ``partials[k]`` holds the k-th derivative array (symmetrized over its
    derivative axes for numeric jets); ``schwarz_residual`` records the
    largest relative mixed-partial asymmetry found before symmetrizing.
    """
    order: int
    value: np.ndarray
    partials: list = field(default_factory=list)
    error_estimate: float = 0.0
    schwarz_residual: float = 0.0
    exact: bool = False

    def partial(self, k: int) -> np.ndarray:
        return self.partials[k]

    def schwarz_ok(self, rel: float = 1e-6) -> bool:
        return self.schwarz_residual <= rel


def _symmetrize(arr: np.ndarray, k: int, batched: bool) -> tuple[np.ndarray, float]:
    """Average over derivative-axis permutations; report max relative asymmetry."""
    if k < 2:
        return arr, 0.0
    lead = 1 if batched else 0
    axes_all = list(range(arr.ndim))
    deriv = axes_all[lead:lead + k]
    acc = np.zeros_like(arr)
    count = 0
    for perm in itertools.permutations(deriv):
        order = axes_all[:lead] + list(perm) + axes_all[lead + k:]
        acc += np.transpose(arr, order)
        count += 1
    sym = acc / count
    scale = float(np.max(np.abs(sym))) + 1.0
    resid = float(np.max(np.abs(arr - sym))) / scale
    return sym, resid


def _stencil_reach(order: int, scale: float, h=None) -> float:
    reach = 0.0
    for k in range(1, order + 1):
        hk = h if h is not None else default_step(k, scale)
        reach = max(reach, 2.0 * k * hk)
    return reach


def jet_of(fld, point, order: int, *, m: int | None = None, scale: float = 1.0,
           h: float | None = None, domain=None, richardson: bool = True) -> Jet:
    """Jet of a field at a point: exact for analytic fields, FD otherwise.

    Numeric jets use one Richardson refinement (evaluating the stencil tower at
    h and h/2) to sharpen the result and attach an error estimate; the step is
    shrunk automatically near a domain boundary, failing with a step-underflow
    diagnostic when no admissible stencil fits.
    """
    if order < 0 or order > 3:
        raise InvalidArgument(f"jet order must be 0..3, got {order}")
    point = np.asarray(point, dtype=float)
    fld = as_field(fld, m=m if m is not None else point.shape[-1], scale=scale)
    batched = point.ndim == 2

    if fld.is_exact:
        tables = fld.jet(point, order)
        return Jet(order=order, value=tables[0], partials=list(tables),
                   error_estimate=0.0, schwarz_residual=0.0, exact=True)

    h_use = h
    if domain is not None:
        pts2d, _ = as_batch(point, fld.m)
        if not np.all(domain.contains(pts2d)):
            raise DomainError("jet requested outside the chart domain")
        h_use = h if h is not None else default_step(1, scale)
        for _ in range(40):
            reach = _stencil_reach(order, scale, h_use)
            probe = pts2d[:, None, :] + reach * np.concatenate(
                [np.eye(fld.m), -np.eye(fld.m)], axis=0)[None]
            if np.all(domain.contains(probe.reshape(-1, fld.m))):
                break
            h_use *= 0.5
            if h_use < 1e-12 * scale:
                raise DomainError("differentiation step underflow near domain boundary")
        else:
            raise DomainError("differentiation step underflow near domain boundary")

    coarse = fld.jet(point, order, h=h_use)
    if not richardson or order == 0:
        parts, resid = [coarse[0]], 0.0
        for k in range(1, order + 1):
            s, r = _symmetrize(coarse[k], k, batched)
            parts.append(s)
            resid = max(resid, r)
        return Jet(order=order, value=coarse[0], partials=parts,
                   error_estimate=float("nan") if order else 0.0,
                   schwarz_residual=resid, exact=False)

    fine = fld.jet(point, order,
                   h=None if h_use is None else 0.5 * h_use)
    if h_use is None:
        # distinct default steps per level: redo fine with halved default steps
        pts2d, single = as_batch(point, fld.m)
        steps = [0.5 * default_step(k, scale) for k in range(1, order + 1)]
        fine = fd_nested(fld.func, pts2d, order, steps)
        if single:
            fine = [a[0] for a in fine]

    parts = [coarse[0]]
    err = 0.0
    resid = 0.0
    for k in range(1, order + 1):
        extrap = (16.0 * fine[k] - coarse[k]) / 15.0
        sym, r = _symmetrize(extrap, k, batched)
        parts.append(sym)
        resid = max(resid, r)
        scale_k = float(np.max(np.abs(sym))) + 1.0
        err = max(err, float(np.max(np.abs(extrap - fine[k]))) / scale_k)
    return Jet(order=order, value=coarse[0], partials=parts,
               error_estimate=err, schwarz_residual=resid, exact=False)
