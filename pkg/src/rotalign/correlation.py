"""Geometric cross correlation of vector fields, evaluated at zero lag.

The quantity of interest is the multivector

    integral of reverse(A(y)) B(y) dy

taken over the overlap of the supports.  For vector-valued fields the
integrand is a geometric product of two vectors, so the result carries only a
scalar part (the L2 inner product) and a bivector part (the integrated wedge).
Any odd-grade content indicates a bug or a broken field pair, so it is
measured and reported instead of silently discarded.

Linear and piecewise-constant fields integrate in closed form through box
moments.  Pairs involving a sampled field use the midpoint rule on the
sampled grid; two sampled fields must share their grid geometry exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ga3 import Multivector, PolarForm, polar_decompose
from .fields import (
    Box, LinearVectorField, PiecewiseConstantField, SampledField, VectorField,
    evaluate_many, l2_norm, support,
)


def _even_mv(scalar: float, biv: np.ndarray) -> Multivector:
    c = np.zeros(8)
    c[0] = scalar
    c[4:7] = biv
    return Multivector(c)


def _vector_product(a: np.ndarray, b: np.ndarray) -> Multivector:
    """Geometric product of two 3-vectors: dot plus wedge."""
    cross = np.cross(a, b)
    return _even_mv(float(a @ b), np.array([cross[2], -cross[1], cross[0]]))


def _pair_from_moment_matrix(m: np.ndarray) -> Multivector:
    """Fold M[i, j] = integral of A_i B_j into scalar and bivector parts."""
    biv = np.array([m[0, 1] - m[1, 0], m[0, 2] - m[2, 0], m[1, 2] - m[2, 1]])
    return _even_mv(float(np.trace(m)), biv)


def _correlate_linear_linear(a: LinearVectorField,
                             b: LinearVectorField) -> Multivector:
    overlap = a.box.intersect(b.box)
    if overlap is None:
        return Multivector.zero()
    x = overlap.second_moment_matrix()
    return _pair_from_moment_matrix(a.matrix @ x @ b.matrix.T)


def _correlate_piecewise_piecewise(a: PiecewiseConstantField,
                                   b: PiecewiseConstantField) -> Multivector:
    total = Multivector.zero()
    for box_a, va in a.cells:
        for box_b, vb in b.cells:
            overlap = box_a.intersect(box_b)
            if overlap is not None:
                total = total + overlap.volume() * _vector_product(va, vb)
    return total


def _correlate_piecewise_linear(a: PiecewiseConstantField,
                                b: LinearVectorField,
                                flipped: bool) -> Multivector:
    total = Multivector.zero()
    for box_a, va in a.cells:
        overlap = box_a.intersect(b.box)
        if overlap is None:
            continue
        vb = b.matrix @ overlap.first_moment()
        term = _vector_product(vb, va) if flipped else _vector_product(va, vb)
        total = total + term
    return total


def _correlate_on_grid(grid: SampledField, a: VectorField,
                       b: VectorField) -> Multivector:
    pts = grid.cell_centers()
    va = a.data if a is grid else evaluate_many(a, pts)
    vb = b.data if b is grid else evaluate_many(b, pts)
    return _accumulate_products(va, vb, grid.cell_volume())


def _accumulate_products(va: np.ndarray, vb: np.ndarray,
                         weight: float) -> Multivector:
    scalar = float(np.sum(va * vb))
    cross = np.sum(np.cross(va, vb), axis=0)
    return _even_mv(scalar * weight,
                    weight * np.array([cross[2], -cross[1], cross[0]]))


def _same_grid(a: SampledField, b: SampledField) -> bool:
    return a.resolution == b.resolution and a.box == b.box


def correlate_at_origin(a: VectorField, b: VectorField) -> Multivector:
    """Zero-lag geometric cross correlation, reverse(A) times B integrated.

    The first argument is the one that gets reversed; vectors are their own
    reverse, so swapping the arguments flips the sign of the bivector part.
    """
    if isinstance(a, LinearVectorField) and isinstance(b, LinearVectorField):
        return _correlate_linear_linear(a, b)
    if isinstance(a, PiecewiseConstantField) and isinstance(b, PiecewiseConstantField):
        return _correlate_piecewise_piecewise(a, b)
    if isinstance(a, PiecewiseConstantField) and isinstance(b, LinearVectorField):
        return _correlate_piecewise_linear(a, b, flipped=False)
    if isinstance(a, LinearVectorField) and isinstance(b, PiecewiseConstantField):
        return _correlate_piecewise_linear(b, a, flipped=True)
    if isinstance(a, SampledField) and isinstance(b, SampledField):
        if not _same_grid(a, b):
            raise ValueError("sampled fields must share an identical grid")
        return _accumulate_products(a.data, b.data, a.cell_volume())
    if isinstance(a, SampledField):
        return _correlate_on_grid(a, a, b)
    if isinstance(b, SampledField):
        return _correlate_on_grid(b, a, b)
    raise TypeError(
        f"cannot correlate {type(a).__name__} with {type(b).__name__}")


@dataclass(frozen=True)
class CorrelationResult:
    """Raw and norm-scaled correlation plus its polar reading.

    odd_residue is the Euclidean norm of the grade-1 and grade-3 coefficients
    of the normalized correlation; it should sit at rounding level for any
    genuine pair of vector fields.
    """

    raw: Multivector
    normalized: Multivector
    polar: PolarForm
    odd_residue: float


def normalized_correlation(a: VectorField, b: VectorField) -> CorrelationResult:
    """Correlate and scale by the product of the field norms.

    Raises ValueError when either field has zero norm, or when the
    normalized correlation sits at rounding level (below 1e-12) so that no
    meaningful polar form exists.
    """
    na, nb = l2_norm(a), l2_norm(b)
    if na < 1e-300 or nb < 1e-300:
        raise ValueError("cannot normalize the correlation of a zero field")
    raw = correlate_at_origin(a, b)
    normalized = raw / (na * nb)
    c = normalized.coeffs
    odd = math.sqrt(c[1] ** 2 + c[2] ** 2 + c[3] ** 2 + c[7] ** 2)
    even = _even_mv(c[0], c[4:7].copy())
    if even.norm() <= 1e-12:
        raise ValueError("correlation is zero; the fields are orthogonal")
    return CorrelationResult(raw=raw, normalized=normalized,
                             polar=polar_decompose(even), odd_residue=odd)


def _bounding_box(a: VectorField, b: VectorField) -> Box:
    sa, sb = support(a), support(b)
    lo = np.minimum(sa.low_array, sb.low_array)
    hi = np.maximum(sa.high_array, sb.high_array)
    return Box(tuple(lo), tuple(hi))


def quadrature_correlate(a: VectorField, b: VectorField,
                         box: Box | None = None,
                         resolution: int = 64) -> Multivector:
    """Midpoint-rule estimate of the correlation on a fresh grid.

    Independent of the closed-form path; used to cross-check it.  The grid
    covers ``box`` (default: the union bounding box of both supports) with
    ``resolution`` cells per axis, processed one x-slab at a time to bound
    memory.
    """
    box = box or _bounding_box(a, b)
    n = int(resolution)
    lo, hi = box.low_array, box.high_array
    h = (hi - lo) / n
    cell_vol = float(np.prod(h))
    ys = lo[1] + (np.arange(n) + 0.5) * h[1]
    zs = lo[2] + (np.arange(n) + 0.5) * h[2]
    yy, zz = np.meshgrid(ys, zs, indexing="ij")
    slab = np.empty((n * n, 3))
    slab[:, 1] = yy.ravel()
    slab[:, 2] = zz.ravel()
    total = Multivector.zero()
    for i in range(n):
        slab[:, 0] = lo[0] + (i + 0.5) * h[0]
        va = evaluate_many(a, slab)
        vb = evaluate_many(b, slab)
        total = total + _accumulate_products(va, vb, cell_vol)
    return total
