"""Multistart search for highly entangled symmetric states.

The target is ``max_psi E_g(psi)``, i.e. ``min_psi G(psi)`` with ``G`` the
largest product-state overlap.  How ``G`` is minimized depends on the
ansatz:

* ``positive``: a CPP lies on the meridian ``phi = 0`` where ``g`` is
  linear in the coefficients.
* ``rotational(m)``, ``general``: ``g^2`` is a real quadratic form in the
  real and imaginary parts of the coefficients.

Either way ``min G`` over unit vectors equals ``max |a|`` subject to
``g <= 1`` everywhere, an epigraph problem solved with SLSQP on a finite
constraint set.  The set starts as a coarse grid and each round adds the
true local maxima of the current iterate (constraint exchange).

Every returned candidate is re-analysed with :func:`find_cpps` on a fine
grid.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from .errors import InputError
from .geometric import CppReport, _Meridian, dicke_entanglement, find_cpps, positive_cpp_search
from .symstate import SymmetricState, _binom_sqrt, dicke, normalize

__all__ = [
    "SearchAnsatz",
    "SearchResult",
    "search_max_entangled",
    "two_dicke_optimum",
    "parse_family",
]

FINAL_GRID_DEG = 0.5
SEARCH_GRID_DEG = 2.0
POSITIVE_BATCH = 8  # SLSQP starts per positive restart; each is cheap and lands on one polytope vertex


@dataclass(frozen=True)
class SearchAnsatz:
    """Family of trial states.

    ``family`` is ``"general"``, ``"positive"``, ``"rotational"`` (needs
    ``m``) or ``"two-dicke"`` (needs ``k1 < k2``).
    """

    family: str
    n: int
    restarts: int = 20
    seed: int = 0
    m: int | None = None
    k1: int | None = None
    k2: int | None = None

    def __post_init__(self) -> None:
        if self.n < 2:
            raise InputError("n >= 2 required")
        if self.restarts < 1:
            raise InputError("restarts must be positive")
        if self.family not in ("general", "positive", "rotational", "two-dicke"):
            raise InputError(f"unknown family {self.family!r}")
        if self.family == "rotational":
            if self.m is None or not 2 <= self.m <= self.n:
                raise InputError("rotational order m must lie in [2, n]")
        if self.family == "two-dicke":
            if self.k1 is None or self.k2 is None or not 0 <= self.k1 < self.k2 <= self.n:
                raise InputError("two-dicke needs 0 <= k1 < k2 <= n")

    @property
    def label(self) -> str:
        if self.family == "rotational":
            return f"rotational({self.m})"
        if self.family == "two-dicke":
            return f"two-dicke({self.k1},{self.k2})"
        return self.family


def parse_family(text: str, n: int, restarts: int = 20, seed: int = 0) -> SearchAnsatz:
    """``positive``, ``general``, ``rotational(m)`` / ``rotational:m``, ``two-dicke(k1,k2)``."""
    t = text.strip().lower().replace(" ", "")
    if t in ("positive", "general"):
        return SearchAnsatz(t, n, restarts, seed)
    mt = re.fullmatch(r"rotational[(:](\d+)\)?", t)
    if mt:
        return SearchAnsatz("rotational", n, restarts, seed, m=int(mt.group(1)))
    mt = re.fullmatch(r"two-dicke[(:](\d+),(\d+)\)?", t)
    if mt:
        return SearchAnsatz("two-dicke", n, restarts, seed, k1=int(mt.group(1)), k2=int(mt.group(2)))
    raise InputError(f"cannot parse family {text!r}")


@dataclass
class SearchResult:
    state: SymmetricState
    report: CppReport
    ansatz: SearchAnsatz | None = None
    evaluations: int = 0
    restarts: int = 0
    restart_values: list = field(default_factory=list)

    @property
    def e_g(self) -> float:
        return self.report.e_g

    def to_json(self) -> dict:
        from .symstate import state_to_json

        return {
            "family": self.ansatz.label if self.ansatz else None,
            "n": self.state.n,
            "e_g": self.e_g,
            "g_max": self.report.g_max,
            "cpp_count": self.report.count,
            "cpps": [{"theta": p.theta, "phi": p.phi} for p in self.report.cpps],
            "state": state_to_json(self.state),
            "evaluations": self.evaluations,
            "restarts": self.restarts,
        }


# ---------------------------------------------------------------------------
# positive family: g is linear in the coefficients on the meridian phi = 0
# ---------------------------------------------------------------------------

def _positive_g(a: np.ndarray) -> float:
    return _Meridian(np.real(a)).g_max(resolution=181)


def _meridian_rows(n: int, thetas: np.ndarray) -> np.ndarray:
    k = np.arange(n + 1)
    c, s = np.cos(thetas / 2)[:, None], np.sin(thetas / 2)[:, None]
    return _binom_sqrt(n) * c ** (n - k) * s**k


def _positive_minimax(n: int, x0: np.ndarray, exchange: int = 4) -> np.ndarray:
    """Maximize ``|x|`` subject to ``g(theta, 0; x) <= 1`` and ``x >= 0``.

    At the optimum ``G = 1 / |x|``.  The constraint set starts as a uniform
    theta grid; the exact maxima of each iterate are added to it.
    """
    thetas = np.linspace(0.0, math.pi, 721)
    x = np.asarray(x0, float)
    for _ in range(exchange):
        B = _meridian_rows(n, thetas)
        x = x / max(float(np.max(B @ x)), 1e-300)
        res = minimize(lambda v: -(v @ v), x, jac=lambda v: -2 * v, method="SLSQP",
                       bounds=[(0.0, None)] * (n + 1),
                       constraints=[{"type": "ineq", "fun": lambda v, B=B: 1.0 - B @ v, "jac": lambda v, B=B: -B}],
                       options={"ftol": 1e-15, "maxiter": 500})
        x = np.clip(res.x, 0.0, None)
        peaks = [t for t, _ in _Meridian(x).maxima()]
        thetas = np.union1d(thetas, peaks)
    return x


# ---------------------------------------------------------------------------
# complex families: g^2 is a real quadratic form in (Re a, Im a)
# ---------------------------------------------------------------------------

def _product_rows(n: int, thetas: np.ndarray, phis: np.ndarray) -> np.ndarray:
    """Rows ``M_i`` with ``g_i = |M_i . conj(a)|`` at the points (thetas[i], phis[i])."""
    k = np.arange(n + 1)
    c, s = np.cos(thetas / 2)[:, None], np.sin(thetas / 2)[:, None]
    return _binom_sqrt(n) * c ** (n - k) * s**k * np.exp(1j * np.outer(phis, k))


def _coarse_points(deg: float = 6.0):
    th = np.radians(np.arange(0.0, 180.0 + 1e-9, deg))
    ph = np.radians(np.arange(0.0, 360.0, deg))
    T, Ph = np.meshgrid(th[1:-1], ph, indexing="ij")
    thetas = np.concatenate([[0.0, math.pi], T.ravel()])
    phis = np.concatenate([[0.0, 0.0], Ph.ravel()])
    return thetas, phis


class _Layout:
    """Real parameter vector <-> complex coefficients on a set of slots.

    ``real_slots`` lists slots whose imaginary part is frozen at zero
    (phase and z-rotation gauge).
    """

    def __init__(self, n: int, slots: np.ndarray, real_slots: tuple):
        self.n, self.slots = n, np.asarray(slots)
        self.im_slots = np.array([s for s in self.slots if s not in real_slots], dtype=int)
        self.size = len(self.slots) + len(self.im_slots)

    def coeffs(self, x: np.ndarray) -> np.ndarray:
        a = np.zeros(self.n + 1, dtype=complex)
        a[self.slots] = x[: len(self.slots)]
        a[self.im_slots] += 1j * x[len(self.slots):]
        return a

    def params(self, a: np.ndarray) -> np.ndarray:
        return np.concatenate([a[self.slots].real, a[self.im_slots].imag])


def _complex_minimax(layout: _Layout, x0: np.ndarray, exchange: int = 16, grid_deg: float = 3.0,
                     tol: float = 1e-11) -> np.ndarray:
    """Maximize ``|a|^2`` subject to ``g^2 <= 1`` on a coarse grid plus exchanged maxima.

    Stops once the true maximum of ``g`` over the sphere exceeds 1 by at most ``tol``.
    """
    n = layout.n
    thetas, phis = _coarse_points()
    x = np.asarray(x0, float)
    ns = len(layout.slots)
    col = {s: j for j, s in enumerate(layout.slots)}
    im_pos = np.array([col[s] for s in layout.im_slots], dtype=int)
    for _ in range(exchange):
        M = _product_rows(n, thetas, phis)[:, layout.slots]
        R, I = M.real, M.imag

        def parts(x):
            u = x[:ns]
            v = np.zeros(ns)
            v[im_pos] = x[ns:]
            return u, v

        def cons(x):
            u, v = parts(x)
            re, im = R @ u + I @ v, R @ v - I @ u
            return 1.0 - re**2 - im**2

        def cons_jac(x):
            u, v = parts(x)
            re, im = R @ u + I @ v, R @ v - I @ u
            du = -2 * (re[:, None] * R - im[:, None] * I)
            dv = -2 * (re[:, None] * I + im[:, None] * R)
            return np.hstack([du, dv[:, im_pos]])

        g2 = 1.0 - cons(x)
        x = x / math.sqrt(max(float(np.max(g2)), 1e-300))
        res = minimize(lambda x: -(x @ x), x, jac=lambda x: -2 * x, method="SLSQP",
                       constraints=[{"type": "ineq", "fun": cons, "jac": cons_jac}],
                       options={"ftol": 1e-14, "maxiter": 300})
        x = res.x
        a = _unit(layout.coeffs(x))
        if a is None:
            break
        rep = find_cpps(SymmetricState(a), grid_deg=grid_deg)
        if rep.g_max * float(np.linalg.norm(layout.coeffs(x))) <= 1.0 + tol:
            break
        thetas = np.concatenate([thetas, [p.theta for p, _ in rep.local_maxima]])
        phis = np.concatenate([phis, [p.phi for p, _ in rep.local_maxima]])
    return x


# ---------------------------------------------------------------------------
# driver
# ---------------------------------------------------------------------------

def _unit(v: np.ndarray) -> np.ndarray | None:
    nrm = float(np.linalg.norm(v))
    return None if nrm < 1e-12 else v / nrm


def _layout(ansatz: SearchAnsatz, restart: int) -> _Layout:
    n = ansatz.n
    if ansatz.family == "rotational":
        slots = np.arange(restart % ansatz.m, n + 1, ansatz.m)
        return _Layout(n, slots, (int(slots[0]),))
    # general: a_n = 0 puts one MP on the north pole, a_0 and a_1 real fix phase and z-rotation
    return _Layout(n, np.arange(n), (0, 1))


def _final(state: SymmetricState, ansatz: SearchAnsatz | None) -> CppReport:
    if ansatz is not None and ansatz.family in ("positive", "two-dicke") and state.is_positive():
        return positive_cpp_search(state)
    return find_cpps(state, grid_deg=FINAL_GRID_DEG)


def search_max_entangled(ansatz: SearchAnsatz) -> SearchResult:
    """Best state of the ansatz family found by seeded multistart minimization of ``G``."""
    if ansatz.family == "two-dicke":
        return two_dicke_optimum(ansatz.n, ansatz.k1, ansatz.k2)
    rng = np.random.default_rng(ansatz.seed)
    n = ansatz.n
    best_a, best_g, values = None, math.inf, []

    for r in range(ansatz.restarts):
        if ansatz.family == "positive":
            a, g = None, 2.0
            for b in range(POSITIVE_BATCH):
                if b % 2 == 0:
                    slots = np.arange(n + 1)
                else:  # sparse supports: the known optima use two or three Dicke states
                    size = int(rng.integers(2, min(4, n + 1) + 1))
                    slots = np.sort(rng.choice(n + 1, size=size, replace=False))
                v = np.zeros(n + 1)
                v[slots] = np.abs(rng.standard_normal(slots.size))
                cand = _unit(_positive_minimax(n, v))
                gc = 2.0 if cand is None else _positive_g(cand)
                if gc < g - 1e-13:
                    a, g = cand, gc
        else:
            lay = _layout(ansatz, r)
            x = _complex_minimax(lay, rng.standard_normal(lay.size))
            a = _unit(lay.coeffs(x))
            g = 2.0 if a is None else find_cpps(SymmetricState(a), grid_deg=SEARCH_GRID_DEG).g_max
        values.append(float(-2 * math.log2(g)) if g < 2 else 0.0)
        if g < best_g - 1e-13:
            best_a, best_g = a, g

    # the balanced Dicke state belongs to every family searched here
    k = n // 2
    if best_a is None or -2 * math.log2(best_g) < dicke_entanglement(n, k):
        best_a = dicke(n, k).coeffs

    state = normalize(SymmetricState(best_a))
    return SearchResult(state, _final(state, ansatz), ansatz, ansatz.restarts, ansatz.restarts, values)


def two_dicke_optimum(n: int, k1: int, k2: int, scan: int = 2001) -> SearchResult:
    """Best ``cos(chi) S_k1 + sin(chi) S_k2`` with ``chi`` in ``[0, pi/2]``."""
    if not 0 <= k1 < k2 <= n:
        raise InputError("need 0 <= k1 < k2 <= n")

    def coeffs(chi: float) -> np.ndarray:
        a = np.zeros(n + 1)
        a[k1], a[k2] = math.cos(chi), math.sin(chi)
        return a

    def G(chi: float) -> float:
        return _Meridian(coeffs(chi)).g_max(resolution=361)

    grid = np.linspace(0.0, math.pi / 2, scan)
    vals = np.array([G(c) for c in grid])
    i = int(np.argmin(vals))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, scan - 1)]
    chi = grid[i]
    if hi > lo:
        res = minimize_scalar(G, bounds=(lo, hi), method="bounded", options={"xatol": 1e-13})
        if res.fun <= vals[i]:
            chi = float(res.x)
    state = SymmetricState(coeffs(chi).astype(complex))
    ansatz = SearchAnsatz("two-dicke", n, 1, 0, k1=k1, k2=k2)
    return SearchResult(state, _final(state, ansatz), ansatz, scan + 60, 1, [])
