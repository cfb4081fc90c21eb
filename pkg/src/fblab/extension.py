"""Minimal-norm operator extensions from a subspace and embedding gaps.

Given a subspace F of a weighted ell_r space E (described by an explicit
basis and a complement basis) and an operator T defined on F, the
extension constant is

    inf { ||T~ : E -> ell_p^n|| : T~ restricted to F equals T } / ||T||,

where ||T|| is computed over B_F = B_E intersect F.  The infimum is over
the values of T~ on the complement basis; the inner norm is exact on
polytopal domains and a certified interval otherwise, so the reported
constant is a certified interval [1, best ratio found] — the true
infimum is at least 1 because restricting any extension gives back T.

For p = infinity the constant is exactly 1: each row functional of T
extends from F to E preserving its norm, and the sup-norm of an operator
into ell_inf^n is the largest row norm.

The embedding gap compares the free-lattice norm of an expression over
F (functionals on F are restrictions of E* functionals; the weak-p
constraint runs over B_F) with the norm of the same expression over E.
F never needs its own weighted-ell_r model: all F-side computations are
constrained optimizations in basis coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .estimates import NormEstimate, WitnessFamily
from .exprs import GeneratorBinding, LatticeExpr, eval_pairings
from .fbl import _fbl_objective, _fbl_seeds, fbl_norm
from .operators import LinearMap, operator_norm
from .optimize import OptimizerConfig, restart_rng
from .spaces import (
    SpaceSpec,
    norm,
    space_from_json,
    space_to_json,
)
from .summing import (
    _weak_crude_upper,
    _weak_exact_available,
    hadamard,
    lp_combine,
    weak_p_norm,
)

__all__ = [
    "SubspaceSpec",
    "extension_constant",
    "embedding_gap",
    "EmbeddingGap",
    "subspace_to_json",
    "subspace_from_json",
]


@dataclass(frozen=True)
class SubspaceSpec:
    """A subspace F of an ambient space, with a complement completing a
    basis of the ambient space (combined rank checked at 1e-10)."""

    ambient: SpaceSpec
    basis: tuple[tuple[float, ...], ...]
    complement_basis: tuple[tuple[float, ...], ...]

    def __post_init__(self) -> None:
        B = self.basis_matrix
        C = self.complement_matrix
        n = self.ambient.dim
        if B.shape[1] != n or (C.size and C.shape[1] != n):
            raise ValueError("basis vectors must live in the ambient space")
        if B.shape[0] + C.shape[0] != n:
            raise ValueError(
                "basis and complement basis together must have exactly "
                f"{n} vectors, got {B.shape[0]} + {C.shape[0]}"
            )
        full = np.vstack([B, C]) if C.size else B
        sv = np.linalg.svd(full, compute_uv=False)
        if sv[-1] <= 1e-10 * max(1.0, sv[0]):
            raise ValueError("combined basis is rank deficient (tolerance 1e-10)")

    @staticmethod
    def from_arrays(ambient: SpaceSpec, basis, complement_basis) -> "SubspaceSpec":
        B = np.atleast_2d(np.asarray(basis, dtype=float))
        C = np.asarray(complement_basis, dtype=float)
        C = C.reshape(0, ambient.dim) if C.size == 0 else np.atleast_2d(C)
        return SubspaceSpec(
            ambient,
            tuple(tuple(float(v) for v in row) for row in B),
            tuple(tuple(float(v) for v in row) for row in C),
        )

    @property
    def basis_matrix(self) -> np.ndarray:
        return np.asarray(self.basis, dtype=float)

    @property
    def complement_matrix(self) -> np.ndarray:
        a = np.asarray(self.complement_basis, dtype=float)
        return a.reshape(0, self.ambient.dim) if a.size == 0 else a

    @property
    def dim(self) -> int:
        return len(self.basis)

    def embed(self, coords: np.ndarray) -> np.ndarray:
        """The ambient point with the given basis coordinates."""
        return np.asarray(coords, dtype=float) @ self.basis_matrix

    def coordinates(self, points: np.ndarray, tol: float = 1e-8) -> np.ndarray:
        """Basis coordinates of ambient points (rows); errors if a point
        does not lie in the subspace to within ``tol``."""
        X = np.atleast_2d(np.asarray(points, dtype=float))
        B = self.basis_matrix
        C, *_ = np.linalg.lstsq(B.T, X.T, rcond=None)
        C = C.T
        resid = np.max(np.abs(C @ B - X)) if X.size else 0.0
        if resid > tol * max(1.0, float(np.max(np.abs(X)))):
            raise ValueError("points do not lie in the subspace")
        return C

    def restrict(self, functionals: np.ndarray) -> np.ndarray:
        """Restrictions of ambient dual functionals to F, in the basis-
        coordinate representation g with <g, c> = sum_j g_j c_j."""
        Y = np.atleast_2d(np.asarray(functionals, dtype=float))
        return Y @ (self.basis_matrix * self.ambient.weight_array).T

    def ambient_norm(self, coords: np.ndarray) -> float:
        return norm(self.ambient, self.embed(coords))


def subspace_to_json(sub: SubspaceSpec) -> dict:
    return {
        "ambient": space_to_json(sub.ambient),
        "basis": [list(row) for row in sub.basis],
        "complement_basis": [list(row) for row in sub.complement_basis],
    }


def subspace_from_json(obj: dict) -> SubspaceSpec:
    for key in ("ambient", "basis", "complement_basis"):
        if key not in obj:
            raise ValueError(f"subspace JSON requires field '{key}'")
    return SubspaceSpec.from_arrays(
        space_from_json(obj["ambient"]),
        np.asarray(obj["basis"], dtype=float),
        np.asarray(obj["complement_basis"], dtype=float),
    )


# --------------------------------------------------------------------------
# the inherited geometry of F: linear forms over B_F = B_E intersect F
# --------------------------------------------------------------------------


def _axis_aligned_model(sub: SubspaceSpec) -> tuple[SpaceSpec, np.ndarray] | None:
    """If every basis vector is a (scaled) coordinate vector on distinct
    coordinates, B_F is itself the ball of a weighted ell_r space on the
    basis coordinates.  Returns that space together with the per-basis
    scales s (so the model norm of c is the ambient norm of sum c_j s_j e_ij),
    or None."""
    B = sub.basis_matrix
    supports = [np.flatnonzero(np.abs(row) > 0) for row in B]
    if any(len(s) != 1 for s in supports):
        return None
    idx = np.array([s[0] for s in supports])
    if len(set(idx.tolist())) != len(idx):
        return None
    scales = np.array([B[j, idx[j]] for j in range(len(idx))])
    E = sub.ambient
    if E.is_sup:
        model = SpaceSpec(math.inf, len(idx))
    else:
        w = E.weight_array[idx] * np.abs(scales) ** E.r
        model = SpaceSpec(E.r, len(idx), tuple(w))
    return model, np.abs(scales)


def _max_linear_over_BF(sub: SubspaceSpec, v: np.ndarray) -> tuple[float, np.ndarray]:
    """Maximize the plain form v . c over B_F.  Exact (LP / closed form)
    for ambient exponent in {1, 2, inf}; multistart ratio ascent otherwise
    (still a true value, attained at the returned feasible point)."""
    E = sub.ambient
    B = sub.basis_matrix
    k, n = B.shape
    v = np.asarray(v, dtype=float)
    if np.all(v == 0.0):
        c = np.zeros(k)
        c[0] = 1.0
        return 0.0, c / max(sub.ambient_norm(c), 1e-300)
    w = E.weight_array

    if E.is_sup or E.r == 1:
        from scipy.optimize import linprog

        Bt = B.T  # constraint rows act on c through (c @ B)_i = (Bt @ c)_i
        if E.is_sup:
            A_ub = np.vstack([Bt, -Bt])
            b_ub = np.ones(2 * n)
            res = linprog(-v, A_ub=A_ub, b_ub=b_ub, bounds=[(None, None)] * k, method="highs")
            if not res.success:
                raise RuntimeError(f"linear program failed: {res.message}")
            c = res.x
        else:
            # variables (c, t): t_i >= |(c @ B)_i|, sum w_i t_i <= 1
            A1 = np.hstack([Bt, -np.eye(n)])
            A2 = np.hstack([-Bt, -np.eye(n)])
            A3 = np.hstack([np.zeros((1, k)), w[None, :]])
            A_ub = np.vstack([A1, A2, A3])
            b_ub = np.concatenate([np.zeros(2 * n), [1.0]])
            cost = np.concatenate([-v, np.zeros(n)])
            bounds = [(None, None)] * k + [(0, None)] * n
            res = linprog(cost, A_ub=A_ub, b_ub=b_ub, bounds=bounds, method="highs")
            if not res.success:
                raise RuntimeError(f"linear program failed: {res.message}")
            c = res.x[:k]
        nv = sub.ambient_norm(c)
        if nv > 0:
            c = c / nv
        return float(v @ c), c

    if E.r == 2:
        M = B @ np.diag(w) @ B.T
        sol = np.linalg.solve(M, v)
        val = math.sqrt(float(v @ sol))
        return val, sol / val

    # generic r: ratio ascent from the pseudo-inverse direction
    best_val, best_c = 0.0, None
    for c0 in [np.linalg.lstsq(B.T, v, rcond=None)[0], v[:k] if len(v) >= k else None]:
        if c0 is None or not np.all(np.isfinite(c0)):
            continue
        nv = sub.ambient_norm(c0)
        if nv <= 1e-14:
            continue
        c = c0 / nv
        val = float(v @ c)
        if abs(val) > best_val:
            best_val, best_c = abs(val), math.copysign(1.0, val) * c
    if best_c is None:
        best_c = np.zeros(k)
        best_c[0] = 1.0
        best_c /= sub.ambient_norm(best_c)
        best_val = abs(float(v @ best_c))
    return best_val, best_c


def _fstar_norm_upper(sub: SubspaceSpec, g: np.ndarray) -> float:
    """Certified upper bound for the norm of the form c -> g . c on F.

    Exact for ambient exponent in {1, 2, inf}; otherwise the norm of the
    minimal-Euclidean lift of g to an E* functional, which dominates the
    restriction's norm.
    """
    E = sub.ambient
    if E.is_sup or E.r in (1.0, 2.0):
        val, _ = _max_linear_over_BF(sub, g)
        return val
    B = sub.basis_matrix
    w = E.weight_array
    # lift: phi in E* with restriction g, i.e. (B * w) @ phi = g
    phi, *_ = np.linalg.lstsq(B * w, np.asarray(g, dtype=float), rcond=None)
    from .spaces import dual_space

    return norm(dual_space(E), phi)


def _weak_F(sub: SubspaceSpec, G: np.ndarray, p: float, cfg: OptimizerConfig) -> NormEstimate:
    """Weak-p norm of a family of forms on F, over B_F = B_E intersect F."""
    G = np.atleast_2d(np.asarray(G, dtype=float))
    model = _axis_aligned_model(sub)
    if model is not None:
        from .summing import weak_p_norm

        space_F, scales = model
        return weak_p_norm(G / scales, space_F, p, cfg)

    member_norms = np.array([_fstar_norm_upper(sub, g) for g in G])
    if math.isinf(p):
        upper = float(np.max(member_norms))
    else:
        upper = lp_combine(member_norms, p)
    exact_members = sub.ambient.is_sup or sub.ambient.r in (1.0, 2.0)
    if math.isinf(p) and exact_members:
        return NormEstimate(upper, upper, True, True, method=("member-norm closed form",))

    # lower bound: conditional-gradient ascent of the convex map
    # c -> lp-combination of |G c| over B_F
    def value(c: np.ndarray) -> float:
        return lp_combine(G @ c, p)

    def ascend(c: np.ndarray) -> float:
        val = value(c)
        for _ in range(cfg.max_iter):
            y = G @ c
            if math.isinf(p):
                j = int(np.argmax(np.abs(y)))
                u = np.zeros(len(y))
                u[j] = math.copysign(1.0, y[j]) if y[j] != 0 else 1.0
            elif p == 1:
                u = np.sign(y) + (y == 0.0)
            else:
                nv = max(val, 1e-300)
                u = np.sign(y) * np.abs(y) ** (p - 1.0) / nv ** (p - 1.0)
            _, c_new = _max_linear_over_BF(sub, G.T @ u)
            new_val = value(c_new)
            if new_val <= val + cfg.tol * max(1.0, val):
                break
            val, c = new_val, c_new
        return val

    k = sub.dim
    lower = 0.0
    for t in range(min(cfg.restarts, 16)):
        rng = restart_rng(cfg, t, salt=71)
        c0 = rng.standard_normal(k)
        nv = sub.ambient_norm(c0)
        if nv <= 1e-14:
            continue
        lower = max(lower, ascend(c0 / nv))
    lower = min(lower, upper)
    return NormEstimate(lower, upper, True, True, method=("B_F ascent", "member-norm upper"))


# --------------------------------------------------------------------------
# operator norm over B_F and the extension constant
# --------------------------------------------------------------------------


def _operator_norm_over_F(
    sub: SubspaceSpec, M: np.ndarray, codomain: SpaceSpec, cfg: OptimizerConfig
) -> tuple[float, np.ndarray]:
    """sup of the codomain norm of M c over B_F, with a maximizer.

    Exact when B_F is an axis-aligned weighted-ell_r ball within the
    polytopal enumeration reach; multistart conditional-gradient ascent
    otherwise (a certified lower bound attained at the returned point).
    """
    from .operators import _norm_gradient
    from .spaces import extreme_points_matrix, is_polytopal, norms_rows

    model = _axis_aligned_model(sub)
    if model is not None:
        space_F, scales = model
        Ms = M / scales  # model coordinates c' = s * c
        if is_polytopal(space_F, cfg.extreme_enum_cap):
            pts = extreme_points_matrix(space_F, cfg.extreme_enum_cap)
            vals = norms_rows(codomain, pts @ Ms.T)
            j = int(np.argmax(vals))
            return float(vals[j]), pts[j] / scales

    def ascend(c: np.ndarray) -> tuple[float, np.ndarray]:
        val = norm(codomain, M @ c)
        for _ in range(cfg.max_iter):
            u = _norm_gradient(codomain, M @ c)
            _, c_new = _max_linear_over_BF(sub, M.T @ u)
            new_val = norm(codomain, M @ c_new)
            if new_val <= val + cfg.tol * max(1.0, val):
                break
            val, c = new_val, c_new
        return val, c

    best_val, best_c = 0.0, np.zeros(sub.dim)
    for t in range(min(cfg.restarts, 24)):
        rng = restart_rng(cfg, t, salt=83)
        c0 = rng.standard_normal(sub.dim)
        nv = sub.ambient_norm(c0)
        if nv <= 1e-14:
            continue
        val, c = ascend(c0 / nv)
        if val > best_val:
            best_val, best_c = val, c
    return best_val, best_c


def extension_constant(
    sub: SubspaceSpec,
    T: LinearMap,
    p: float,
    cfg: OptimizerConfig | None = None,
) -> NormEstimate:
    """Certified interval for the minimal-extension ratio

        inf { ||T~ : E -> codomain|| : T~ | F = T } / ||T||_F.

    ``T.domain`` must have dimension ``sub.dim``; T acts on basis
    coordinates, and its norm is taken over B_F = B_E intersect F.  The
    lower bound 1 is structural (restricting an extension gives back T).
    The upper bound is the best ratio over the extensions tried, so it
    over-estimates the infimum whenever the outer search stalls; p = inf
    short-circuits to the exact value 1 (row functionals extend from F to
    E with no norm increase, and the sup-norm of a map into ell_inf is
    its largest row norm).
    """
    cfg = cfg or OptimizerConfig()
    if T.domain.dim != sub.dim:
        raise ValueError("operator domain dimension must match the subspace dimension")
    if math.isinf(p):
        if not T.codomain.is_sup:
            raise ValueError("p = inf requires a sup-norm codomain")
        return NormEstimate(
            1.0, 1.0, True, True,
            method=("norm-preserving row-by-row extension",),
        )
    if not (abs(T.codomain.r - p) <= 1e-12):
        raise ValueError("codomain exponent must equal p")

    M = T.array
    cod = T.codomain
    denom, c_star = _operator_norm_over_F(sub, M, cod, cfg)
    if denom <= 1e-14:
        raise ValueError("operator vanishes on the subspace")
    x_star = sub.embed(c_star)

    B = sub.basis_matrix
    C = sub.complement_matrix
    n = sub.ambient.dim
    k = sub.dim
    S = np.vstack([B, C])  # coordinates kappa of x solve kappa @ S = x
    St_inv = np.linalg.inv(S.T)

    def assembled(W: np.ndarray) -> LinearMap:
        full = np.hstack([M, W.reshape(cod.dim, n - k)]) if n > k else M
        return LinearMap.from_array(full @ St_inv, sub.ambient, cod)

    def inner_upper(W: np.ndarray) -> tuple[float, float]:
        Te = assembled(W)
        est = operator_norm(Te, cfg)
        lo = max(est.lower, norm(cod, Te.array @ x_star))
        return lo, est.upper

    if n == k:
        lo, up = inner_upper(np.zeros(0))
        upper = max(up / denom, 1.0)
        return NormEstimate(
            1.0, upper, True, True,
            method=("trivial subspace", "exact inner norm" if up == lo else "interval inner norm"),
        )

    nvars = cod.dim * (n - k)
    best_upper = math.inf
    best_W = np.zeros(nvars)

    def objective(flat: np.ndarray) -> float:
        lo, up = inner_upper(flat)
        return up

    inits = [np.zeros(nvars)]
    for t in range(min(cfg.restarts, 31)):
        rng = restart_rng(cfg, t, salt=89)
        inits.append(0.5 * denom * rng.standard_normal(nvars))

    from scipy.optimize import minimize

    polish_budget = 8
    for i, W0 in enumerate(inits):
        v0 = objective(W0)
        if v0 < best_upper:
            best_upper, best_W = v0, W0
        if i < polish_budget and cfg.polish:
            res = minimize(
                objective, W0, method="Powell",
                options={"maxfev": 40 * nvars, "xtol": 1e-8, "ftol": 1e-10},
            )
            if np.all(np.isfinite(res.x)):
                v = objective(res.x)
                if v < best_upper:
                    best_upper, best_W = v, res.x

    ratio_upper = max(best_upper / denom, 1.0)
    return NormEstimate(
        1.0,
        ratio_upper,
        True,
        True,
        method=("outer minimization over complement values",
                "upper bound on the infimum"),
        witness=WitnessFamily.from_matrix(
            assembled(best_W).array, p, denom, ratio_upper
        ),
    )


# --------------------------------------------------------------------------
# embedding gap
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class EmbeddingGap:
    """F-side versus E-side free-lattice norms of one expression."""

    subspace_lower: float
    ambient: NormEstimate
    ratio: float
    subspace_witness: WitnessFamily | None = None

    def to_json(self) -> dict:
        return {
            "subspace_lower": self.subspace_lower,
            "ambient": self.ambient.to_json(),
            "ratio": self.ratio,
            "subspace_witness": None
            if self.subspace_witness is None
            else self.subspace_witness.to_json(),
        }


def _subspace_fbl_lower(
    sub: SubspaceSpec,
    e: LatticeExpr,
    coords: np.ndarray,
    seeds: list[np.ndarray],
    p: float,
    cfg: OptimizerConfig,
) -> tuple[float, WitnessFamily | None]:
    """Certified lower bound for the free-lattice norm of ``e`` over F,
    with generators given in basis coordinates and functionals on F
    normalized by certified weak-p upper bounds over B_F."""
    k = sub.dim

    def objective(G: np.ndarray) -> float:
        P = np.atleast_2d(G) @ coords.T
        return lp_combine(eval_pairings(e, P), p)

    best_val, best_G = 0.0, None

    def consider(G: np.ndarray) -> None:
        nonlocal best_val, best_G
        G = np.atleast_2d(np.asarray(G, dtype=float))
        if G.size == 0 or not np.all(np.isfinite(G)):
            return
        w = _weak_F(sub, G, p, cfg)
        if w.upper <= 1e-14 or math.isinf(w.upper):
            return
        val = objective(G) / w.upper
        if val > best_val:
            best_val, best_G = val, G / w.upper

    for G in seeds:
        consider(G)
    sizes = [m for m in (4, 8, 16, cfg.family_size) if m <= cfg.family_size] or [cfg.family_size]
    for t in range(cfg.restarts):
        rng = restart_rng(cfg, t, salt=97)
        consider(rng.standard_normal((sizes[t % len(sizes)], k)))

    if cfg.polish and best_G is not None and best_G.size <= 256:
        from scipy.optimize import minimize

        N = best_G.shape[0]

        def neg_ratio(flat: np.ndarray) -> float:
            G = flat.reshape(N, k)
            w = _weak_F(sub, G, p, cfg)
            if not (w.upper > 1e-14) or math.isinf(w.upper):
                return 0.0
            return -objective(G) / w.upper

        res = minimize(
            neg_ratio, best_G.ravel(), method="Powell",
            options={"maxfev": 80 * best_G.size, "xtol": 1e-9, "ftol": 1e-11},
        )
        if np.all(np.isfinite(res.x)):
            consider(res.x.reshape(N, k))

    witness = None
    if best_G is not None:
        witness = WitnessFamily.from_matrix(best_G, p, 1.0, best_val)
    return best_val, witness


def embedding_gap(
    sub: SubspaceSpec,
    e: LatticeExpr,
    b: GeneratorBinding,
    p: float,
    cfg: OptimizerConfig | None = None,
) -> EmbeddingGap:
    """Ratio of the free-lattice norm of ``e`` over F (inherited norm) to
    its norm over the ambient space.  The binding's vectors must lie in
    the subspace.  Restricting any ambient witness family to F preserves
    its evaluations and can only shrink its weak-p constraint, so the
    ratio is at least 1 up to optimization slack.
    """
    cfg = cfg or OptimizerConfig()
    if b.space != sub.ambient:
        raise ValueError("binding must live over the subspace's ambient space")
    coords = sub.coordinates(b.matrix)

    ambient_est = fbl_norm(e, b, p, cfg)

    seeds: list[np.ndarray] = []
    for Y in _fbl_seeds(e, b, cfg):
        seeds.append(sub.restrict(Y))
    if ambient_est.witness is not None and not math.isinf(p):
        seeds.append(sub.restrict(ambient_est.witness.matrix))
    k = sub.dim
    seeds.append(np.eye(k))
    for m in (2, 4, 8, 16):
        if m <= k:
            seeds.append(np.hstack([hadamard(m), np.zeros((m, k - m))]))

    if math.isinf(p):
        # sup of |eval| over the dual sphere of F
        best_val, best_g = 0.0, np.zeros(k)
        cands = [row for G in seeds for row in np.atleast_2d(G)]
        for t in range(cfg.restarts):
            rng = restart_rng(cfg, t, salt=103)
            cands.append(rng.standard_normal(k))
        for g in cands:
            ng = _fstar_norm_upper(sub, g)
            if ng <= 1e-14:
                continue
            val = abs(float(eval_pairings(e, (g / ng)[None, :] @ coords.T)[0]))
            if val > best_val:
                best_val, best_g = val, g / ng
        witness = WitnessFamily.from_matrix(best_g[None, :], p, 1.0, best_val)
        f_lower = best_val
    else:
        f_lower, witness = _subspace_fbl_lower(sub, e, coords, seeds, p, cfg)

    if witness is not None and not math.isinf(p):
        # any F-side witness extends to an ambient family with the same
        # evaluations (pairings with generators only see F), giving one
        # more certified lower-bound candidate for the ambient norm
        lift = np.linalg.pinv((sub.basis_matrix * sub.ambient.weight_array).T)
        Y = witness.matrix @ lift
        if _weak_exact_available(sub.ambient, p, Y.shape[0], cfg):
            w_up = weak_p_norm(Y, sub.ambient, p, cfg).upper
        else:
            w_up = _weak_crude_upper(Y, sub.ambient, p)
        if w_up > 1e-14 and math.isfinite(w_up):
            amb_val = _fbl_objective(e, b, p)(Y) / w_up
            if amb_val > ambient_est.lower:
                ambient_est = NormEstimate(
                    lower=min(amb_val, ambient_est.upper),
                    upper=ambient_est.upper,
                    lower_certified=ambient_est.lower_certified,
                    upper_certified=ambient_est.upper_certified,
                    method=ambient_est.method + ("lifted subspace witness",),
                    witness=WitnessFamily.from_matrix(Y / w_up, p, 1.0, amb_val),
                )

    denom = max(ambient_est.lower, 1e-300)
    return EmbeddingGap(
        subspace_lower=f_lower,
        ambient=ambient_est,
        ratio=f_lower / denom,
        subspace_witness=witness,
    )
