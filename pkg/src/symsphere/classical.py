"""Classical point distributions on the sphere: Thomson and Toth (Tammes).

Both optimizers are multistart and seed-deterministic.  Point sets can be
turned into symmetric states by reading each vector as a Majorana point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize
from scipy.spatial.distance import pdist

from .errors import CoincidentPoints, InputError
from .symstate import BlochPoint, SymmetricState, state_from_mps

__all__ = [
    "PointSet",
    "thomson_energy",
    "toth_objective",
    "optimize_thomson",
    "optimize_toth",
    "pointset_to_state",
    "state_to_pointset",
    "distance_multiset",
    "same_structure",
    "TOTH_EXPONENTS",
]

TOTH_EXPONENTS = (2, 4, 8, 16, 32)


@dataclass(frozen=True, eq=False)
class PointSet:
    """``n >= 2`` unit vectors in R^3, stored as an ``(n, 3)`` array."""

    points: np.ndarray

    def __post_init__(self) -> None:
        P = np.array(self.points, dtype=float)
        if P.ndim != 2 or P.shape[1] != 3:
            raise InputError("points must have shape (n, 3)")
        if P.shape[0] < 2:
            raise InputError("need at least two points")
        if np.max(np.abs(np.linalg.norm(P, axis=1) - 1.0)) > 1e-12:
            raise InputError("points must be unit vectors")
        P.setflags(write=False)
        object.__setattr__(self, "points", P)

    @classmethod
    def from_vectors(cls, P) -> "PointSet":
        """Normalize arbitrary nonzero vectors first."""
        P = np.asarray(P, dtype=float)
        return cls(P / np.linalg.norm(P, axis=1, keepdims=True))

    @property
    def n(self) -> int:
        return self.points.shape[0]

    def rotated(self, R) -> "PointSet":
        return PointSet.from_vectors(self.points @ np.asarray(R).T)

    def to_json(self) -> dict:
        return {"points": self.points.tolist()}

    @classmethod
    def from_json(cls, obj: dict) -> "PointSet":
        try:
            P = np.asarray(obj["points"], dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed point-set JSON: {exc}") from exc
        if P.ndim == 2 and P.shape[1] == 3 and np.all(np.abs(np.linalg.norm(P, axis=1) - 1) <= 1e-12):
            return cls(P)  # keep stored unit vectors bit-for-bit
        return cls.from_vectors(P)


def thomson_energy(ps: PointSet) -> float:
    d = pdist(ps.points)
    if np.min(d) <= 1e-12:
        raise CoincidentPoints("coincident points")
    return float(np.sum(1.0 / d))


def toth_objective(ps: PointSet) -> float:
    return float(np.min(pdist(ps.points)))


# ---------------------------------------------------------------------------
# projected gradient descent on (S^2)^n
# ---------------------------------------------------------------------------

def _riesz(P: np.ndarray, s: float, scale: float = 1.0):
    """Riesz energy sum (scale/d)^s and its Euclidean gradient."""
    diff = P[:, None, :] - P[None, :, :]
    d = np.linalg.norm(diff, axis=-1)
    np.fill_diagonal(d, np.inf)
    q = (scale / d) ** s
    E = 0.5 * float(np.sum(q))
    G = -s * np.sum((q / d**2)[:, :, None] * diff, axis=1)
    return E, G


def _tangential(P: np.ndarray, G: np.ndarray) -> np.ndarray:
    return G - np.sum(G * P, axis=1, keepdims=True) * P


def _descend(P: np.ndarray, s: float, gtol: float = 1e-10, max_iter: int = 20000,
             scale: float = 1.0, history: list | None = None) -> np.ndarray:
    """Monotone projected gradient with Barzilai-Borwein trial steps and halving."""
    E, G = _riesz(P, s, scale)
    T = _tangential(P, G)
    step = 0.1 / max(np.max(np.linalg.norm(T, axis=1)), 1e-300)
    for _ in range(max_iter):
        gnorm = float(np.linalg.norm(T))
        if gnorm < gtol:
            break
        while True:
            Q = P - step * T
            Q /= np.linalg.norm(Q, axis=1, keepdims=True)
            Eq, Gq = _riesz(Q, s, scale)
            if Eq <= E:
                break
            step *= 0.5
            if step < 1e-300:
                return P
        Tq = _tangential(Q, Gq)
        dx, dg = (Q - P).ravel(), (Tq - T).ravel()
        curv = float(dx @ dg)
        step = float(dx @ dx) / curv if curv > 1e-300 else 2.0 * step
        if Eq == E and np.array_equal(Q, P):
            break
        P, E, T = Q, Eq, Tq
        if history is not None:
            history.append(E)
    return P


def _random_points(n: int, rng: np.random.Generator) -> np.ndarray:
    P = rng.standard_normal((n, 3))
    return P / np.linalg.norm(P, axis=1, keepdims=True)


def _best(cands: list) -> np.ndarray:
    # deterministic reduction: objective first, then lexicographic point order
    cands.sort(key=lambda c: (c[0], tuple(np.round(c[1], 12).ravel())))
    return cands[0][1]


def optimize_thomson(n: int, restarts: int = 50, seed: int = 0,
                     gtol: float = 1e-10) -> PointSet:
    """Minimize the Coulomb energy of ``n`` unit charges."""
    if n < 2:
        raise InputError("n >= 2 required")
    rng = np.random.default_rng(seed)
    cands = []
    for _ in range(max(1, restarts)):
        P = _descend(_random_points(n, rng), 1.0, gtol=gtol)
        cands.append((round(_riesz(P, 1.0)[0], 10), P))
    return PointSet.from_vectors(_best(cands))


def _polish_maximin(P: np.ndarray) -> np.ndarray:
    """Maximize the smallest chord with SLSQP on the vectors plus a slack."""
    n = P.shape[0]
    iu = np.triu_indices(n, 1)

    def cons_ineq(x):
        Q = x[:-1].reshape(n, 3)
        d2 = np.sum((Q[:, None, :] - Q[None, :, :]) ** 2, axis=-1)[iu]
        return d2 - x[-1]

    def cons_eq(x):
        Q = x[:-1].reshape(n, 3)
        return np.sum(Q * Q, axis=1) - 1.0

    def jac_ineq(x):
        Q = x[:-1].reshape(n, 3)
        J = np.zeros((len(iu[0]), 3 * n + 1))
        for r, (i, j) in enumerate(zip(*iu)):
            g = 2.0 * (Q[i] - Q[j])
            J[r, 3 * i:3 * i + 3] = g
            J[r, 3 * j:3 * j + 3] = -g
        J[:, -1] = -1.0
        return J

    def jac_eq(x):
        Q = x[:-1].reshape(n, 3)
        J = np.zeros((n, 3 * n + 1))
        for i in range(n):
            J[i, 3 * i:3 * i + 3] = 2.0 * Q[i]
        return J

    best = P
    cur = toth_objective(PointSet.from_vectors(P))
    for _ in range(5):
        x0 = np.append(best.ravel(), cur**2)
        res = minimize(lambda x: -x[-1], x0, jac=lambda x: np.eye(1, 3 * n + 1, 3 * n).ravel() * -1,
                       method="SLSQP",
                       constraints=[{"type": "ineq", "fun": cons_ineq, "jac": jac_ineq},
                                    {"type": "eq", "fun": cons_eq, "jac": jac_eq}],
                       options={"ftol": 1e-16, "maxiter": 500})
        Q = res.x[:-1].reshape(n, 3)
        Q /= np.linalg.norm(Q, axis=1, keepdims=True)
        val = toth_objective(PointSet.from_vectors(Q))
        if val <= cur + 1e-10:
            if val > cur:
                best, cur = Q, val
            break
        best, cur = Q, val
    return best


def optimize_toth(n: int, restarts: int = 50, seed: int = 0) -> PointSet:
    """Maximize the smallest pairwise distance of ``n`` points."""
    if n < 2:
        raise InputError("n >= 2 required")
    rng = np.random.default_rng(seed)
    cands = []
    for _ in range(max(1, restarts)):
        P = _random_points(n, rng)
        for s in TOTH_EXPONENTS:
            scale = float(np.min(pdist(P)))  # keeps (scale/d)^s finite
            P = _descend(P, float(s), gtol=1e-9, max_iter=3000, scale=scale)
        P = _polish_maximin(P)
        cands.append((-round(toth_objective(PointSet.from_vectors(P)), 10), P))
    return PointSet.from_vectors(_best(cands))


# ---------------------------------------------------------------------------
# states and structure comparison
# ---------------------------------------------------------------------------

def pointset_to_state(ps: PointSet) -> SymmetricState:
    return state_from_mps([BlochPoint.from_vector(v) for v in ps.points])


def state_to_pointset(state: SymmetricState) -> PointSet:
    from .symstate import state_to_mps

    return PointSet.from_vectors(state_to_mps(state).vectors())


def distance_multiset(points) -> np.ndarray:
    """Sorted pairwise chords; a rotation-free fingerprint of a configuration."""
    P = points.points if isinstance(points, PointSet) else np.asarray(points, dtype=float)
    return np.sort(pdist(P))


def same_structure(a, b, tol: float = 1e-6) -> bool:
    da, db = distance_multiset(a), distance_multiset(b)
    return da.shape == db.shape and bool(np.max(np.abs(da - db), initial=0.0) <= tol)
