"""Dense linear maps between weighted ell_r spaces.

A :class:`LinearMap` acts by plain matrix multiplication, ``y = A @ x``.
Whenever a map is built out of vectors that are meant to be *paired*
against the argument (a tuple map f -> (<f, x_k>)_k on a dual space),
the constructor bakes the pairing weights into the matrix rows, so the
action stays a plain product everywhere downstream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .estimates import NormEstimate
from .optimize import OptimizerConfig, best_of, restart_rng
from .spaces import (
    SpaceSpec,
    dual_space,
    extreme_points_matrix,
    functional_norm,
    is_polytopal,
    norm,
    norming_vector,
    norms_rows,
    space_from_json,
    space_to_json,
)

__all__ = [
    "LinearMap",
    "adjoint",
    "operator_norm",
    "tuple_map",
    "map_to_json",
    "map_from_json",
]


@dataclass(frozen=True)
class LinearMap:
    matrix: tuple[tuple[float, ...], ...]
    domain: SpaceSpec
    codomain: SpaceSpec

    def __post_init__(self) -> None:
        a = self.array
        if a.shape != (self.codomain.dim, self.domain.dim):
            raise ValueError(
                f"matrix shape {a.shape} does not match map "
                f"{self.domain.dim} -> {self.codomain.dim}"
            )

    @staticmethod
    def from_array(a: np.ndarray, domain: SpaceSpec, codomain: SpaceSpec) -> "LinearMap":
        a = np.atleast_2d(np.asarray(a, dtype=float))
        return LinearMap(tuple(tuple(float(v) for v in row) for row in a), domain, codomain)

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.matrix, dtype=float)

    def apply(self, x: np.ndarray) -> np.ndarray:
        return self.array @ self.domain.check_point(x)


def tuple_map(vectors: np.ndarray, space: SpaceSpec, codomain: SpaceSpec) -> LinearMap:
    """The map f -> (<f, x_k>)_k on the dual of ``space``.

    ``vectors`` holds the x_k as rows; the pairing weights of ``space``
    are folded into the matrix.
    """
    vectors = np.atleast_2d(np.asarray(vectors, dtype=float))
    if vectors.shape[1] != space.dim:
        raise ValueError("vectors do not live in the announced space")
    if codomain.dim != vectors.shape[0]:
        raise ValueError("codomain dimension must equal the number of vectors")
    rows = vectors * space.weight_array
    return LinearMap.from_array(rows, dual_space(space), codomain)


def adjoint(T: LinearMap) -> LinearMap:
    """The adjoint with respect to the weighted pairings:
    pairing(T* f, x) over the domain equals pairing(f, T x) over the codomain."""
    wd = T.domain.weight_array
    wc = T.codomain.weight_array
    a = (T.array * wc[:, None]).T / wd[:, None]
    return LinearMap.from_array(a, dual_space(T.codomain), dual_space(T.domain))


def _norm_gradient(space: SpaceSpec, y: np.ndarray) -> np.ndarray:
    """A (sub)gradient of the norm of ``space`` at y, in plain coordinates."""
    y = np.asarray(y, dtype=float)
    if space.is_sup:
        j = int(np.argmax(np.abs(y)))
        g = np.zeros(space.dim)
        g[j] = math.copysign(1.0, y[j]) if y[j] != 0 else 1.0
        return g
    w = space.weight_array
    if space.r == 1:
        return w * (np.sign(y) + (y == 0.0))
    n = norm(space, y)
    if n <= 0:
        return w.copy()
    return w * np.sign(y) * np.abs(y) ** (space.r - 1.0) / n ** (space.r - 1.0)


def _ascend(T: LinearMap, x: np.ndarray, max_iter: int, tol: float) -> tuple[float, np.ndarray]:
    """Conditional-gradient ascent for the convex objective ||Tx|| on the
    unit ball: linearize at x, move to the ball point norming the
    linearization.  Monotone; each step is a closed form."""
    a = T.array
    val = norm(T.codomain, a @ x)
    for _ in range(max_iter):
        u = _norm_gradient(T.codomain, a @ x)
        g = a.T @ u
        x_new = norming_vector(T.domain, g)
        new_val = norm(T.codomain, a @ x_new)
        if new_val <= val + tol * max(1.0, val):
            if new_val > val:
                val, x = new_val, x_new
            break
        val, x = new_val, x_new
    return val, x


def operator_norm(T: LinearMap, cfg: OptimizerConfig | None = None) -> NormEstimate:
    """sup of ||Tx|| over the unit ball of the domain.

    Exact (certified on both sides) when the domain ball is a polytope
    within the enumeration cap: convexity puts the maximum at an extreme
    point.  Otherwise the lower bound is the best multistart ascent value
    (certified, it is attained at a feasible point) and the upper bound
    is the crude row-norm bound.
    """
    cfg = cfg or OptimizerConfig()
    a = T.array
    if is_polytopal(T.domain, cfg.extreme_enum_cap):
        pts = extreme_points_matrix(T.domain, cfg.extreme_enum_cap)
        vals = norms_rows(T.codomain, pts @ a.T)
        k = int(np.argmax(vals))
        val = float(vals[k])
        return NormEstimate(
            lower=val,
            upper=val,
            lower_certified=True,
            upper_certified=True,
            method=("extreme-point enumeration",),
        )

    # crude but valid upper bound: replace each row functional by its norm
    row_norms = np.array([functional_norm(T.domain, row) for row in a])
    cod = T.codomain
    if cod.is_sup:
        upper = float(np.max(row_norms))
    else:
        upper = float(np.sum(cod.weight_array * row_norms ** cod.r) ** (1.0 / cod.r))

    def candidates():
        for k in range(cfg.restarts):
            rng = restart_rng(cfg, k, salt=101)
            x0 = rng.standard_normal(T.domain.dim)
            n0 = norm(T.domain, x0)
            if n0 <= 1e-14:
                continue
            yield _ascend(T, x0 / n0, cfg.max_iter, cfg.tol)

    lower, _ = best_of(candidates())
    lower = min(float(lower), upper)
    return NormEstimate(
        lower=lower,
        upper=upper,
        lower_certified=True,
        upper_certified=True,
        method=("multistart ascent", "row-norm upper bound"),
    )


def map_to_json(T: LinearMap) -> dict:
    return {
        "matrix": [list(row) for row in T.matrix],
        "domain": space_to_json(T.domain),
        "codomain": space_to_json(T.codomain),
    }


def map_from_json(obj: dict) -> LinearMap:
    for key in ("matrix", "domain", "codomain"):
        if key not in obj:
            raise ValueError(f"linear map JSON requires field '{key}'")
    return LinearMap.from_array(
        np.asarray(obj["matrix"], dtype=float),
        space_from_json(obj["domain"]),
        space_from_json(obj["codomain"]),
    )
