"""Univariate B-spline bases and tensor-product surfaces.

Cox-de Boor evaluation, analytic derivatives, Greville abscissae,
open-uniform knot construction and single knot insertion. Basis
intervals are half-open, with the final span closed at the right end of
the parameter domain so that evaluation at u = 1 is well defined. All
types are immutable after construction and every operation is a pure
function, so concurrent evaluation needs no synchronization.

Control-point and basis indices are 0-based throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidDimensionError


@dataclass(frozen=True)
class KnotVector:
    """Nondecreasing knots on [0, 1] with repeated (clamped) end knots."""

    knots: np.ndarray
    degree: int

    def __post_init__(self):
        knots = np.ascontiguousarray(self.knots, dtype=float)
        knots.setflags(write=False)
        object.__setattr__(self, "knots", knots)
        p = self.degree
        if p < 0:
            raise InvalidDimensionError("degree must be nonnegative")
        if knots.ndim != 1 or knots.size < 2 * (p + 1):
            raise InvalidDimensionError(
                f"need at least {2 * (p + 1)} knots for degree {p}, got {knots.size}"
            )
        if np.any(np.diff(knots) < 0):
            raise InvalidDimensionError("knots must be nondecreasing")
        if knots[0] < 0.0 or knots[-1] > 1.0:
            raise InvalidDimensionError("knots must lie in [0, 1]")
        if np.any(knots[: p + 1] != knots[0]) or np.any(knots[-(p + 1):] != knots[-1]):
            raise InvalidDimensionError("end knots must repeat degree+1 times")

    @property
    def num_ctrl(self) -> int:
        return self.knots.size - self.degree - 1

    @property
    def domain(self) -> tuple[float, float]:
        return float(self.knots[self.degree]), float(self.knots[self.num_ctrl])


def make_open_uniform_knots(num_ctrl: int, degree: int) -> KnotVector:
    """Open-uniform knot vector: clamped ends, uniformly spaced interior."""
    if num_ctrl < degree + 1:
        raise InvalidDimensionError(
            f"need at least degree+1={degree + 1} control points, got {num_ctrl}"
        )
    n_interior = num_ctrl - degree - 1
    interior = np.arange(1, n_interior + 1, dtype=float) / (n_interior + 1)
    knots = np.concatenate(
        [np.zeros(degree + 1), interior, np.ones(degree + 1)]
    )
    return KnotVector(knots, degree)


def _spans(kv: KnotVector, u: np.ndarray) -> np.ndarray:
    """Span indices s with knots[s] <= u < knots[s+1], clamped to valid range.

    At the right end of the domain the last nonempty span is returned, which
    makes all downstream evaluations the left-sided limit (closed endpoint).
    """
    s = np.searchsorted(kv.knots, u, side="right") - 1
    return np.clip(s, kv.degree, kv.num_ctrl - 1)


def _basis_rows(knots: np.ndarray, degree: int, spans: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Values of the degree+1 active basis functions at each u.

    Row k holds phi_{spans[k]-degree .. spans[k]}^degree(u[k]). Standard
    triangular Cox-de Boor scheme; valid spans never produce a zero
    denominator.
    """
    n = u.shape[0]
    out = np.zeros((n, degree + 1))
    out[:, 0] = 1.0
    left = np.empty((n, degree + 1))
    right = np.empty((n, degree + 1))
    for j in range(1, degree + 1):
        left[:, j] = u - knots[spans + 1 - j]
        right[:, j] = knots[spans + j] - u
        saved = np.zeros(n)
        for r in range(j):
            temp = out[:, r] / (right[:, r + 1] + left[:, j - r])
            out[:, r] = saved + right[:, r + 1] * temp
            saved = left[:, j - r] * temp
        out[:, j] = saved
    return out


def _deriv_rows(
    knots: np.ndarray, degree: int, spans: np.ndarray, u: np.ndarray, order: int
) -> np.ndarray:
    """order-th derivative of the degree+1 active degree-`degree` functions.

    Recursive form: D^k phi_i^d = d * (a_i - a_{i+1}) with
    a_i = D^{k-1} phi_i^{d-1} / (knot_{i+d} - knot_i), zero-denominator
    terms dropped. Orders above the degree vanish identically.
    """
    n = u.shape[0]
    if order == 0:
        return _basis_rows(knots, degree, spans, u)
    if degree == 0:
        return np.zeros((n, 1))
    lower = _deriv_rows(knots, degree - 1, spans, u, order - 1)
    padded = np.zeros((n, degree + 2))
    padded[:, 1:-1] = lower
    idx = spans[:, None] - degree + np.arange(degree + 1)[None, :]
    den1 = knots[idx + degree] - knots[idx]
    den2 = knots[idx + degree + 1] - knots[idx + 1]
    with np.errstate(divide="ignore", invalid="ignore"):
        a = np.where(den1 > 0, padded[:, : degree + 1] / den1, 0.0)
        b = np.where(den2 > 0, padded[:, 1:] / den2, 0.0)
    return degree * (a - b)


def _check_unit(name: str, u: np.ndarray) -> None:
    if np.any(u < 0.0) or np.any(u > 1.0):
        raise ValueError(f"{name} outside [0, 1]")


def basis_value(kv: KnotVector, i: int, u: float) -> float:
    """Value of phi_i^p(u) via the Cox-de Boor recursion."""
    if not 0 <= i < kv.num_ctrl:
        raise IndexError(f"basis index {i} out of range [0, {kv.num_ctrl})")
    arr = np.asarray([float(u)])
    _check_unit("u", arr)
    span = int(_spans(kv, arr)[0])
    offset = i - (span - kv.degree)
    if not 0 <= offset <= kv.degree:
        return 0.0
    return float(_basis_rows(kv.knots, kv.degree, np.asarray([span]), arr)[0, offset])


def basis_derivative(kv: KnotVector, i: int, u: float, order: int) -> float:
    """order-th derivative of phi_i^p at u (order 1 or 2)."""
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    if not 0 <= i < kv.num_ctrl:
        raise IndexError(f"basis index {i} out of range [0, {kv.num_ctrl})")
    arr = np.asarray([float(u)])
    _check_unit("u", arr)
    span = int(_spans(kv, arr)[0])
    offset = i - (span - kv.degree)
    if not 0 <= offset <= kv.degree:
        return 0.0
    rows = _deriv_rows(kv.knots, kv.degree, np.asarray([span]), arr, order)
    return float(rows[0, offset])


def greville_abscissae(kv: KnotVector) -> np.ndarray:
    """Greville abscissae: mean of the p knots following each control index."""
    p = kv.degree
    if p == 0:
        raise InvalidDimensionError("Greville abscissae undefined for degree 0")
    windows = np.lib.stride_tricks.sliding_window_view(kv.knots, p)
    return windows[1 : kv.num_ctrl + 1].mean(axis=1)


@dataclass(frozen=True)
class BSplineSurface:
    """Tensor-product B-spline surface with an (m, n, 3) control net."""

    knots_u: KnotVector
    knots_v: KnotVector
    ctrl: np.ndarray

    def __post_init__(self):
        ctrl = np.ascontiguousarray(self.ctrl, dtype=float)
        ctrl.setflags(write=False)
        object.__setattr__(self, "ctrl", ctrl)
        if ctrl.ndim != 3 or ctrl.shape[2] != 3:
            raise InvalidDimensionError("control net must have shape (m, n, 3)")
        m, n = ctrl.shape[:2]
        if m != self.knots_u.num_ctrl or n != self.knots_v.num_ctrl:
            raise InvalidDimensionError(
                f"control grid {m}x{n} inconsistent with knot vectors "
                f"({self.knots_u.num_ctrl}x{self.knots_v.num_ctrl})"
            )
        if m < self.degree_u + 1 or n < self.degree_v + 1:
            raise InvalidDimensionError("control grid smaller than degree+1")

    @property
    def degree_u(self) -> int:
        return self.knots_u.degree

    @property
    def degree_v(self) -> int:
        return self.knots_v.degree

    @property
    def shape(self) -> tuple[int, int]:
        return self.ctrl.shape[0], self.ctrl.shape[1]

    def with_ctrl(self, ctrl: np.ndarray) -> "BSplineSurface":
        return BSplineSurface(self.knots_u, self.knots_v, ctrl)


def _active_windows(kv: KnotVector, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    spans = _spans(kv, u)
    idx = spans[:, None] - kv.degree + np.arange(kv.degree + 1)[None, :]
    return spans, idx


def surface_eval_many(s: BSplineSurface, uv: np.ndarray) -> np.ndarray:
    """Evaluate the surface at rows of uv, accumulating only active bases."""
    uv = np.atleast_2d(np.asarray(uv, dtype=float))
    u, v = uv[:, 0], uv[:, 1]
    _check_unit("u", u)
    _check_unit("v", v)
    spans_u, iu = _active_windows(s.knots_u, u)
    spans_v, iv = _active_windows(s.knots_v, v)
    bu = _basis_rows(s.knots_u.knots, s.degree_u, spans_u, u)
    bv = _basis_rows(s.knots_v.knots, s.degree_v, spans_v, v)
    cells = s.ctrl[iu[:, :, None], iv[:, None, :]]
    return np.einsum("ki,kj,kijc->kc", bu, bv, cells)


def surface_eval(s: BSplineSurface, u: float, v: float) -> np.ndarray:
    """Point on the surface at (u, v)."""
    return surface_eval_many(s, np.asarray([[u, v]]))[0]


def surface_partials_many(
    s: BSplineSurface, uv: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """(S_u, S_v, S_uu, S_uv, S_vv) at rows of uv; exact for the spline."""
    if s.degree_u < 2 or s.degree_v < 2:
        raise InvalidDimensionError("second-order partials need bi-degree >= 2")
    uv = np.atleast_2d(np.asarray(uv, dtype=float))
    u, v = uv[:, 0], uv[:, 1]
    _check_unit("u", u)
    _check_unit("v", v)
    spans_u, iu = _active_windows(s.knots_u, u)
    spans_v, iv = _active_windows(s.knots_v, v)
    ku, kvz = s.knots_u.knots, s.knots_v.knots
    bu = [_deriv_rows(ku, s.degree_u, spans_u, u, k) for k in range(3)]
    bv = [_deriv_rows(kvz, s.degree_v, spans_v, v, k) for k in range(3)]
    cells = s.ctrl[iu[:, :, None], iv[:, None, :]]

    def contract(du, dv):
        return np.einsum("ki,kj,kijc->kc", bu[du], bv[dv], cells)

    return contract(1, 0), contract(0, 1), contract(2, 0), contract(1, 1), contract(0, 2)


def surface_partials(
    s: BSplineSurface, u: float, v: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """First and second partial derivative vectors at one (u, v)."""
    parts = surface_partials_many(s, np.asarray([[u, v]]))
    return tuple(p[0] for p in parts)


def greville_grid(s: BSplineSurface) -> tuple[np.ndarray, np.ndarray]:
    """Greville abscissae in u and v for the surface's control net."""
    return greville_abscissae(s.knots_u), greville_abscissae(s.knots_v)


def _knot_multiplicity(knots: np.ndarray, value: float) -> int:
    return int(np.count_nonzero(knots == value))


def _insert_knot_rows(kv: KnotVector, ctrl: np.ndarray, value: float):
    """Boehm insertion along the leading axis of ctrl (shape (m, ..., 3))."""
    p = kv.degree
    knots = kv.knots
    if not 0.0 < value < 1.0:
        raise ValueError("knot insertion value must lie strictly inside (0, 1)")
    if _knot_multiplicity(knots, value) >= p:
        raise InvalidDimensionError(
            f"inserting {value} would exceed multiplicity {p}"
        )
    span = int(_spans(kv, np.asarray([value]))[0])
    m = ctrl.shape[0]
    new_ctrl = np.empty((m + 1,) + ctrl.shape[1:])
    new_ctrl[: span - p + 1] = ctrl[: span - p + 1]
    for i in range(span - p + 1, span + 1):
        den = knots[i + p] - knots[i]
        alpha = (value - knots[i]) / den
        new_ctrl[i] = alpha * ctrl[i] + (1.0 - alpha) * ctrl[i - 1]
    new_ctrl[span + 1 :] = ctrl[span:]
    new_knots = np.insert(knots, span + 1, value)
    return KnotVector(new_knots, p), new_ctrl


def insert_knot(s: BSplineSurface, direction: str, value: float) -> BSplineSurface:
    """Insert one knot in direction "u" or "v"; the surface image is unchanged."""
    if direction == "u":
        kv, ctrl = _insert_knot_rows(s.knots_u, s.ctrl, float(value))
        return BSplineSurface(kv, s.knots_v, ctrl)
    if direction == "v":
        kv, ctrl = _insert_knot_rows(s.knots_v, s.ctrl.transpose(1, 0, 2), float(value))
        return BSplineSurface(s.knots_u, kv, ctrl.transpose(1, 0, 2))
    raise ValueError(f"direction must be 'u' or 'v', got {direction!r}")
