"""Finite-dimensional weighted ell_r spaces, their duals and pairings.

Every space handled by this package is R^n equipped with a weighted
ell_r norm:

    ||x|| = (sum_i w_i |x_i|^r)^(1/r)      for 1 <= r < infinity,
    ||x|| = max_i |x_i|                    for r = infinity.

The weights model the atoms of a finite measure mu, so the same spec
describes ell_r^n (weights 1) and L_r(mu) (weights mu_i).  The pairing
carries the weights, <f, x> = sum_i w_i f_i x_i, which makes the dual of
L_r(mu) equal to L_{r'}(mu) *with the same weights*.  In particular the
dual of L_1(mu) is the sup-norm space L_inf(mu); the sup norm does not
see the weights (the essential supremum of a function on atoms does not
depend on the atom masses), which is exactly what makes Hoelder
saturation and the involution dual(dual(E)) = E hold simultaneously.

r = infinity is represented by ``math.inf``, never by a large float.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

__all__ = [
    "SpaceSpec",
    "Point",
    "norm",
    "dual_space",
    "pairing",
    "extreme_points_ball",
    "sample_sphere",
    "norming_functional",
    "norming_vector",
    "functional_norm",
    "space_to_json",
    "space_from_json",
    "EXTREME_ENUM_CAP",
]

# Hard cap on sign-pattern enumeration for sup-norm balls: 2**22 points
# is the laptop-minute budget.
EXTREME_ENUM_CAP = 22


def _conjugate_exponent(r: float) -> float:
    if r == 1:
        return math.inf
    if math.isinf(r):
        return 1.0
    return r / (r - 1.0)


@dataclass(frozen=True)
class SpaceSpec:
    """A finite-dimensional weighted ell_r space."""

    r: float
    dim: int
    weights: tuple[float, ...] = field(default=())

    def __post_init__(self) -> None:
        if not (self.r >= 1):
            raise ValueError(f"exponent must satisfy r >= 1, got {self.r}")
        if self.dim < 1:
            raise ValueError(f"dimension must be positive, got {self.dim}")
        w = self.weights if self.weights else tuple(1.0 for _ in range(self.dim))
        if len(w) != self.dim:
            raise ValueError(
                f"got {len(w)} weights for dimension {self.dim}"
            )
        if any(not (wi > 0) for wi in w):
            raise ValueError("all weights must be strictly positive")
        object.__setattr__(self, "weights", tuple(float(wi) for wi in w))
        object.__setattr__(self, "r", float(self.r))

    @property
    def weight_array(self) -> np.ndarray:
        return np.asarray(self.weights, dtype=float)

    @property
    def is_sup(self) -> bool:
        return math.isinf(self.r)

    def check_point(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise ValueError(
                f"point of shape {x.shape} does not live in a space of dimension {self.dim}"
            )
        return x


@dataclass(frozen=True)
class Point:
    """A vector tagged with the space it lives in."""

    coords: tuple[float, ...]
    space: SpaceSpec

    def __post_init__(self) -> None:
        if len(self.coords) != self.space.dim:
            raise ValueError("coordinate length does not match space dimension")
        object.__setattr__(self, "coords", tuple(float(c) for c in self.coords))

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=float)


def _as_array(x, space: SpaceSpec) -> np.ndarray:
    if isinstance(x, Point):
        if x.space != space:
            raise ValueError("point is tagged with a different space")
        return x.array
    return space.check_point(x)


def norm(space: SpaceSpec, x) -> float:
    """Weighted ell_r norm of ``x`` in ``space``."""
    v = _as_array(x, space)
    if space.is_sup:
        return float(np.max(np.abs(v)))
    w = space.weight_array
    if space.r == 1:
        return float(np.sum(w * np.abs(v)))
    return float(np.sum(w * np.abs(v) ** space.r) ** (1.0 / space.r))


def norms_rows(space: SpaceSpec, rows: np.ndarray) -> np.ndarray:
    """Vectorized ``norm`` over the rows of a 2-d array."""
    rows = np.asarray(rows, dtype=float)
    if space.is_sup:
        return np.max(np.abs(rows), axis=-1)
    w = space.weight_array
    if space.r == 1:
        return np.abs(rows) @ w
    return (np.abs(rows) ** space.r @ w) ** (1.0 / space.r)


def dual_space(space: SpaceSpec) -> SpaceSpec:
    """The dual space: conjugate exponent, same weights, weighted pairing."""
    return SpaceSpec(_conjugate_exponent(space.r), space.dim, space.weights)


def pairing(space: SpaceSpec, f, x) -> float:
    """The weighted duality pairing <f, x> = sum_i w_i f_i x_i.

    ``f`` lives in ``dual_space(space)``, ``x`` in ``space``.
    """
    fv = _as_array(f, dual_space(space))
    xv = _as_array(x, space)
    return float(np.sum(space.weight_array * fv * xv))


def pairing_rows(space: SpaceSpec, fs: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Pair each row of ``fs`` (functionals) against the single vector ``x``."""
    return np.asarray(fs, dtype=float) @ (space.weight_array * np.asarray(x, dtype=float))


class BallNotPolytopal(Exception):
    """The unit ball of the space is not a polytope."""


class EnumerationTooLarge(Exception):
    """A requested exact enumeration exceeds the configured cap."""


def is_polytopal(space: SpaceSpec, cap: int = EXTREME_ENUM_CAP) -> bool:
    """Whether ``extreme_points_ball`` can enumerate the ball exactly."""
    if space.r == 1:
        return True
    return space.is_sup and space.dim <= cap


def extreme_points_ball(space: SpaceSpec, cap: int = EXTREME_ENUM_CAP) -> Iterator[np.ndarray]:
    """Extreme points of the unit ball, for polytopal balls only.

    r = 1: the 2*dim points +-e_i / w_i.  r = infinity: the 2^dim sign
    patterns (the sup norm does not involve the weights).  Any other
    exponent raises :class:`BallNotPolytopal`; a sup-norm ball above the
    enumeration cap raises :class:`EnumerationTooLarge`.
    """
    if space.r == 1:
        w = space.weight_array
        for i in range(space.dim):
            e = np.zeros(space.dim)
            e[i] = 1.0 / w[i]
            yield e
            yield -e
    elif space.is_sup:
        if space.dim > cap:
            raise EnumerationTooLarge(
                f"2^{space.dim} sign patterns exceed the 2^{cap} enumeration cap"
            )
        for bits in range(1 << space.dim):
            signs = np.ones(space.dim)
            for i in range(space.dim):
                if bits & (1 << i):
                    signs[i] = -1.0
            yield signs
    else:
        raise BallNotPolytopal(f"unit ball of ell_{space.r} is not a polytope")


def extreme_points_matrix(space: SpaceSpec, cap: int = EXTREME_ENUM_CAP) -> np.ndarray:
    """All extreme points stacked as rows (vectorization helper)."""
    if space.r == 1:
        w = space.weight_array
        eye = np.diag(1.0 / w)
        return np.vstack([eye, -eye])
    if space.is_sup:
        if space.dim > cap:
            raise EnumerationTooLarge(
                f"2^{space.dim} sign patterns exceed the 2^{cap} enumeration cap"
            )
        n = space.dim
        bits = np.arange(1 << n, dtype=np.uint32)
        cols = [1.0 - 2.0 * ((bits >> i) & 1) for i in range(n)]
        return np.column_stack(cols).astype(float)
    raise BallNotPolytopal(f"unit ball of ell_{space.r} is not a polytope")


def sample_sphere(space: SpaceSpec, count: int, seed: int) -> list[np.ndarray]:
    """Deterministic points of norm exactly 1 (Gaussian directions renormalized)."""
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = np.random.default_rng(seed)
    out: list[np.ndarray] = []
    while len(out) < count:
        g = rng.standard_normal(space.dim)
        n = norm(space, g)
        if n > 1e-12:
            out.append(g / n)
    return out


def norming_functional(space: SpaceSpec, x) -> np.ndarray:
    """A functional f in the dual unit sphere with <f, x> = ||x||.

    Closed form for every weighted ell_r space.  For x = 0 returns an
    arbitrary unit functional.
    """
    v = _as_array(x, space)
    n = norm(space, v)
    if n <= 0.0:
        f = np.zeros(space.dim)
        f[0] = 1.0
        return f / norm(dual_space(space), f)
    if space.r == 1:
        # subgradient of the weighted ell_1 norm; sup-norm 1 in the dual
        return np.sign(v) + (v == 0.0)
    if space.is_sup:
        i = int(np.argmax(np.abs(v)))
        f = np.zeros(space.dim)
        f[i] = math.copysign(1.0, v[i]) / space.weights[i]
        return f
    return np.sign(v) * np.abs(v) ** (space.r - 1.0) / n ** (space.r - 1.0)


def norming_vector(space: SpaceSpec, g) -> np.ndarray:
    """A vector x in the unit sphere of ``space`` maximizing the plain
    linear form sum_i g_i x_i (no weights on g; use this to maximize a raw
    row functional over the ball)."""
    g = np.asarray(g, dtype=float)
    w = space.weight_array
    if np.all(g == 0.0):
        x = np.zeros(space.dim)
        x[0] = 1.0
        return x / norm(space, x)
    if space.is_sup:
        return np.sign(g) + (g == 0.0)
    if space.r == 1:
        # mass goes on the best cost/weight ratio
        i = int(np.argmax(np.abs(g) / w))
        x = np.zeros(space.dim)
        x[i] = math.copysign(1.0, g[i]) / w[i]
        return x
    rp = 1.0 / (space.r - 1.0)
    x = np.sign(g) * (np.abs(g) / w) ** rp
    return x / norm(space, x)


def functional_norm(space: SpaceSpec, row) -> float:
    """Norm of the *plain* linear form x -> sum_i row_i x_i on ``space``.

    The raw coefficients are converted to pairing coordinates (divide by
    the weights) and measured in the dual space.
    """
    row = np.asarray(row, dtype=float)
    return norm(dual_space(space), row / space.weight_array)


def space_to_json(space: SpaceSpec) -> dict:
    return {
        "r": "inf" if space.is_sup else space.r,
        "dim": space.dim,
        "weights": list(space.weights),
    }


def space_from_json(obj: dict) -> SpaceSpec:
    if "r" not in obj or "dim" not in obj:
        raise ValueError("space JSON requires fields 'r' and 'dim'")
    r = obj["r"]
    if isinstance(r, str):
        if r.lower() in ("inf", "infinity", "+inf"):
            r = math.inf
        else:
            r = float(r)
    weights = tuple(obj.get("weights", ()))
    return SpaceSpec(float(r), int(obj["dim"]), weights)
