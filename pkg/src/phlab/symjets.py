"""Exact jet tables generated from symbolic component formulas.

Built-in models register their contact form (and, where closed-form, their CR
frame and ambient chart map) as sympy expressions.  Partial derivatives are
formed symbolically and lambdified once per order, on first use, so pointwise
evaluation returns machine-precision derivative arrays up to the requested
order.  Quantities defined by pointwise solves are differentiated numerically
elsewhere; this module is only for analytic registrations.
"""
from __future__ import annotations

import itertools
from typing import Sequence

import numpy as np
import sympy as sp


def as_batch(pts, m: int):
    """Normalize points to shape (B, m); report whether input was a single point."""
    arr = np.asarray(pts, dtype=float)
    if arr.ndim == 1:
        if arr.shape[0] != m:
            raise ValueError(f"point has dimension {arr.shape[0]}, chart has {m}")
        return arr[None, :], True
    if arr.ndim != 2 or arr.shape[1] != m:
        raise ValueError(f"points must have shape (B, {m}), got {arr.shape}")
    return arr, False


def _broadcast_column(val, nb: int, dtype) -> np.ndarray:
    """lambdify returns scalars for constant expressions; force shape (B,)."""
    arr = np.asarray(val, dtype=dtype)
    if arr.shape != (nb,):
        arr = np.broadcast_to(arr, (nb,))
    return arr


class JetTable:
    """Lambdified table of all partial derivatives of a component vector.

    Parameters
    ----------
    coords : chart coordinate symbols, length m.
    exprs : sequence of sympy expressions (the components), length p.
    max_order : highest derivative order the table will serve.
    complex_valued : evaluate into complex128 instead of float64.

    ``eval(pts, order)`` returns ``[val, d1, ..., d_order]`` with ``val`` of
    shape (B, p) and ``d_k`` of shape (B, m, ..., m, p); the k leading
    derivative axes are symmetric in their indices.  Compilation of each
    order happens lazily on first request and is cached.
    """

    def __init__(self, coords: Sequence[sp.Symbol], exprs: Sequence[sp.Expr],
                 max_order: int, complex_valued: bool = False):
        self.coords = tuple(coords)
        self.m = len(coords)
        self.exprs = [sp.sympify(e) for e in exprs]
        self.p = len(self.exprs)
        self.max_order = max_order
        self.dtype = np.complex128 if complex_valued else np.float64
        self._funcs: dict[int, object] = {}
        self._combos: dict[int, list] = {}

    def _table(self, k: int):
        if k not in self._funcs:
            combos = list(itertools.combinations_with_replacement(range(self.m), k))
            flat = []
            for combo in combos:
                for e in self.exprs:
                    d = e
                    for i in combo:
                        d = sp.diff(d, self.coords[i])
                    flat.append(d)
            self._funcs[k] = sp.lambdify(self.coords, flat, modules="numpy", cse=True)
            self._combos[k] = combos
        return self._funcs[k], self._combos[k]

    def eval(self, pts, order: int | None = None):
        if order is None:
            order = self.max_order
        if order > self.max_order:
            raise ValueError(f"table holds order <= {self.max_order}, asked for {order}")
        pts2d, single = as_batch(pts, self.m)
        nb = pts2d.shape[0]
        args = [pts2d[:, i] for i in range(self.m)]
        out = []
        for k in range(order + 1):
            fn, combos = self._table(k)
            raw = fn(*args)
            arr = np.empty((nb,) + (self.m,) * k + (self.p,), dtype=self.dtype)
            pos = 0
            for combo in combos:
                block = np.stack(
                    [_broadcast_column(raw[pos + j], nb, self.dtype) for j in range(self.p)],
                    axis=-1,
                )
                pos += self.p
                for perm in set(itertools.permutations(combo)):
                    idx = (slice(None),) + perm + (slice(None),)
                    arr[idx] = block
            out.append(arr)
        if single:
            out = [a[0] for a in out]
        return out


def pullback_oneform(ambient_form: Sequence[sp.Expr], chart_map: Sequence[sp.Expr],
                     ambient_coords: Sequence[sp.Symbol], chart_coords: Sequence[sp.Symbol]):
    """Pull a 1-form (component list over ambient coordinates) back through a chart map."""
    sub = dict(zip(ambient_coords, chart_map))
    comps = []
    for xi in chart_coords:
        total = sp.Integer(0)
        for j, form_j in enumerate(ambient_form):
            total += form_j.subs(sub) * sp.diff(chart_map[j], xi)
        comps.append(sp.together(sp.expand(total)))
    return comps
