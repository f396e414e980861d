"""Spherical amplitude function, closest product points and geometric entanglement.

For a symmetric state the overlap with a symmetric product state
``sigma^{(x) n}`` only depends on the Bloch direction of ``sigma``::

    g(theta, phi) = | sum_k conj(a_k) binom(n,k)^(1/2) c^(n-k) (e^{i phi} s)^k |

with ``c = cos(theta/2)`` and ``s = sin(theta/2)``.  Its global maxima are the
closest product points (CPPs), ``G = max g`` and ``E_g = -2 log2 G``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Sequence

import numpy as np
from scipy.optimize import brentq, minimize

from .errors import EmptyCppSet, InputError, NotPositive
from .symstate import (
    BlochPoint,
    SymmetricState,
    _binom_sqrt,
    apply_matrix,
    normalize,
    product_coeffs,
)

__all__ = [
    "CppReport",
    "SphereSamples",
    "amplitude",
    "amplitude_grid",
    "find_cpps",
    "entanglement",
    "dicke_entanglement",
    "dicke_cpps",
    "integral_check",
    "volume_check",
    "sample_sphere",
    "positive_cpp_search",
    "span_check",
    "rotational_order",
]

CPP_REL_TOL = 1e-9
DEDUP_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class CppReport:
    """Outcome of a CPP search.

    Attributes
    ----------
    cpps : tuple of BlochPoint
        Global maxima of ``g``.  For a Dicke state with ``0 < k < n`` the
        maxima form a ring and ``cpps`` holds one representative.
    g_max : float
        Injective tensor norm ``G``.
    e_g : float
        Geometric entanglement ``-2 log2 G`` in bits.
    local_maxima : tuple of (BlochPoint, float)
        Every distinct local maximum found, best first.
    ring : float or None
        Polar angle of a continuous CPP ring, if any.
    """

    cpps: tuple
    g_max: float
    e_g: float
    local_maxima: tuple = ()
    ring: float | None = None

    @property
    def count(self) -> float:
        return math.inf if self.ring is not None else len(self.cpps)

    def ring_points(self, count: int) -> list:
        if self.ring is None:
            return list(self.cpps)
        return [BlochPoint(self.ring, 2 * math.pi * j / count) for j in range(count)]


def _report(points, values, n_hint: int | None = None) -> CppReport:
    order = sorted(range(len(points)), key=lambda i: (-values[i], points[i].theta, points[i].phi))
    kept: list = []
    for i in order:
        v = points[i].vector()
        if all(np.linalg.norm(v - points[j].vector()) > DEDUP_TOL for j in kept):
            kept.append(i)
    best = values[kept[0]]
    cpps = [points[i] for i in kept if values[i] >= best * (1 - CPP_REL_TOL)]
    cpps.sort(key=lambda p: (p.theta, p.phi))
    ring = None
    if n_hint is not None and len(cpps) > 4 * n_hint:
        th = np.array([p.theta for p in cpps])
        if np.ptp(th) < 1e-6:
            ring = float(th.mean())
            cpps = [BlochPoint(ring, 0.0)]
    best = min(best, 1.0)
    return CppReport(
        cpps=tuple(cpps),
        g_max=float(best),
        e_g=float(-2.0 * math.log2(best)),
        local_maxima=tuple((points[i], float(values[i])) for i in kept),
        ring=ring,
    )


# ---------------------------------------------------------------------------
# amplitude function
# ---------------------------------------------------------------------------

def amplitude(state: SymmetricState, p: BlochPoint) -> float:
    """``|<psi| sigma(p)^{(x) n}>|`` for a normalized state."""
    return float(abs(np.vdot(state.coeffs, product_coeffs(state.n, p))))


def amplitude_grid(state: SymmetricState, thetas: np.ndarray, phis: np.ndarray) -> np.ndarray:
    """``g`` on the tensor grid ``thetas x phis`` (shape ``(len(thetas), len(phis))``)."""
    n = state.n
    k = np.arange(n + 1)
    c = np.cos(np.asarray(thetas, dtype=float) / 2)[:, None]
    s = np.sin(np.asarray(thetas, dtype=float) / 2)[:, None]
    W = np.conj(state.coeffs) * _binom_sqrt(n) * c ** (n - k) * s ** k
    E = np.exp(1j * np.outer(k, np.asarray(phis, dtype=float)))
    return np.abs(W @ E)


def dicke_entanglement(n: int, k: int) -> float:
    """Closed-form ``E_g`` of the Dicke state ``S_{n,k}``."""
    if not 0 <= k <= n:
        raise InputError("need 0 <= k <= n")
    if k in (0, n):
        return 0.0
    return float(k * math.log2(n / k) + (n - k) * math.log2(n / (n - k)) - math.log2(math.comb(n, k)))


def dicke_cpps(n: int, k: int) -> CppReport:
    """CPP set of ``S_{n,k}``: a pole for k in {0, n}, otherwise the ring
    ``theta = 2 arcsin(sqrt(k/n))``."""
    if not 0 <= k <= n:
        raise InputError("need 0 <= k <= n")
    e = dicke_entanglement(n, k)
    g = 2.0 ** (-e / 2)
    theta = 2 * math.asin(math.sqrt(k / n))
    p = BlochPoint(theta, 0.0)
    ring = theta if 0 < k < n else None
    return CppReport(cpps=(p,), g_max=g, e_g=e, local_maxima=((p, g),), ring=ring)


# ---------------------------------------------------------------------------
# CPP search
# ---------------------------------------------------------------------------

def _grid_seeds(vals: np.ndarray, thetas: np.ndarray, phis: np.ndarray) -> list:
    """Non-strict local maxima on a theta x phi grid with single-valued poles."""
    seeds = []
    north, south = vals[0, 0], vals[-1, 0]
    if north >= vals[1].max():
        seeds.append(BlochPoint(0.0, 0.0))
    if south >= vals[-2].max():
        seeds.append(BlochPoint(math.pi, 0.0))
    inner = vals[1:-1]
    up, down = vals[:-2], vals[2:]
    is_max = np.ones(inner.shape, dtype=bool)
    for rows in (up, inner, down):
        for shift in (-1, 0, 1):
            if rows is inner and shift == 0:
                continue
            is_max &= inner >= np.roll(rows, shift, axis=1)
    for i, j in zip(*np.nonzero(is_max)):
        seeds.append(BlochPoint(thetas[i + 1], phis[j]))
    return seeds


def _chart_unitary(p: BlochPoint) -> np.ndarray:
    """SU(2) matrix taking the spinor of ``p`` to ``|0>``."""
    a, b = p.spinor()
    return np.array([[np.conj(a), np.conj(b)], [-b, a]])


def _refine(state: SymmetricState, seed: BlochPoint, step: float, tol: float):
    """Local maximization of ``g`` in a stereographic chart centred on ``seed``.

    After rotating ``seed`` to the north pole, ``g^2 = |Q(w)|^2 / (1+|w|^2)^n``
    with ``Q`` a polynomial; Nelder-Mead gets close, then Newton's method on
    the stationarity condition ``Q'(w)(1+|w|^2) = n Q(w) conj(w)`` polishes.
    """
    n = state.n
    U = _chart_unitary(seed)
    rotated = apply_matrix(state, U)
    q = np.conj(rotated.coeffs) * _binom_sqrt(n)
    dq = np.polynomial.polynomial.polyder(q)
    d2q = np.polynomial.polynomial.polyder(dq)
    pv = np.polynomial.polynomial.polyval

    def F(w: complex) -> float:
        return abs(pv(w, q)) ** 2 / (1.0 + abs(w) ** 2) ** n

    res = minimize(
        lambda x: -F(complex(x[0], x[1])),
        np.zeros(2),
        method="Nelder-Mead",
        options={
            "initial_simplex": np.array([[0.0, 0.0], [step, 0.0], [0.0, step]]),
            "xatol": max(tol, 1e-13),
            "fatol": 1e-16,
            "maxiter": 2000,
        },
    )
    w = complex(res.x[0], res.x[1])
    f_nm = F(w)
    wn = w
    for _ in range(30):
        Q, Q1, Q2 = pv(wn, q), pv(wn, dq), pv(wn, d2q)
        r2 = 1.0 + abs(wn) ** 2
        R = Q1 * r2 - n * Q * np.conj(wn)
        Rw = Q2 * r2 + (1 - n) * Q1 * np.conj(wn)
        Rwb = Q1 * wn - n * Q
        A = np.array([[Rw, Rwb], [np.conj(Rwb), np.conj(Rw)]])
        try:
            delta = np.linalg.solve(A, -np.array([R, np.conj(R)]))[0]
        except np.linalg.LinAlgError:
            break
        wn = wn + delta
        if abs(delta) < 1e-16 * max(1.0, abs(wn)) or not np.isfinite(wn):
            break
    if np.isfinite(wn) and abs(wn - w) < 1e-3 and F(wn) >= f_nm * (1 - 1e-14):
        w = wn
    sigma = U.conj().T @ (np.array([1.0, w]) / math.sqrt(1.0 + abs(w) ** 2))
    a, b = sigma
    x = 2 * (np.conj(a) * b)
    p = BlochPoint.from_vector((x.real, x.imag, abs(a) ** 2 - abs(b) ** 2))
    return p


def find_cpps(state: SymmetricState, grid_deg: float = 1.0, refine_tol: float = 1e-12) -> CppReport:
    """Global maxima of the spherical amplitude function.

    A ``grid_deg`` lattice in (theta, phi) supplies seeds at every grid local
    maximum; each seed is refined locally, maxima closer than 1e-6 merge, and
    all maxima within relative 1e-9 of the best are returned as CPPs.
    """
    if not 0 < grid_deg <= 5:
        raise InputError("grid_deg must lie in (0, 5]")
    state = normalize(state)
    n = state.n
    supp = state.support()
    if supp.size == 1:
        return dicke_cpps(n, int(supp[0]))
    n_t = max(int(round(180.0 / grid_deg)), 4)
    n_p = max(int(round(360.0 / grid_deg)), 8)
    thetas = np.linspace(0.0, math.pi, n_t + 1)
    phis = np.arange(n_p) * (2 * math.pi / n_p)
    vals = amplitude_grid(state, thetas, phis)
    seeds = _grid_seeds(vals, thetas, phis)
    step = 0.25 * math.radians(grid_deg)
    points = [_refine(state, s, step, refine_tol) for s in seeds]
    values = [amplitude(state, p) for p in points]
    return _report(points, values, n_hint=n)


def entanglement(state: SymmetricState) -> float:
    """Geometric measure ``E_g`` (bits) with default search settings."""
    return find_cpps(state).e_g


# ---------------------------------------------------------------------------
# positive states
# ---------------------------------------------------------------------------

def rotational_order(state: SymmetricState) -> int:
    """Largest m such that the support sits on one residue class mod m (0 for Dicke)."""
    supp = state.support()
    if supp.size == 1:
        return 0
    return int(reduce(math.gcd, (int(d) for d in np.diff(supp))))


class _Meridian:
    """``g(theta, 0)`` and its derivative for a real coefficient vector."""

    def __init__(self, coeffs: np.ndarray):
        self.n = coeffs.size - 1
        self.w = np.asarray(coeffs, dtype=float) * _binom_sqrt(self.n)
        self.k = np.arange(self.n + 1)

    def f(self, th):
        th = np.asarray(th, dtype=float)
        c, s = np.cos(th / 2)[..., None], np.sin(th / 2)[..., None]
        return (self.w * c ** (self.n - self.k) * s ** self.k).sum(-1)

    def df(self, th: float) -> float:
        n, k = self.n, self.k
        c, s = math.cos(th / 2), math.sin(th / 2)
        with np.errstate(divide="ignore", invalid="ignore"):
            t1 = np.where(k > 0, k * c ** (n - k + 1) * s ** np.maximum(k - 1, 0), 0.0)
            t2 = np.where(k < n, (n - k) * c ** np.maximum(n - k - 1, 0) * s ** (k + 1), 0.0)
        return float(0.5 * (self.w * (t1 - t2)).sum())

    def maxima(self, resolution: int = 721) -> list:
        """Local maxima of ``g(theta, 0)`` on ``[0, pi]`` as ``(theta, value)`` pairs."""
        th = np.linspace(0.0, math.pi, resolution)
        v = self.f(th)
        out = []
        for i in range(resolution):
            left = v[i - 1] if i > 0 else -np.inf
            right = v[i + 1] if i < resolution - 1 else -np.inf
            if not (v[i] >= left and v[i] >= right):
                continue
            if i == 0 or i == resolution - 1:
                out.append((th[i], float(v[i])))
                continue
            lo, hi = th[i - 1], th[i + 1]
            dlo, dhi = self.df(lo), self.df(hi)
            if dlo > 0 > dhi:
                t = brentq(self.df, lo, hi, xtol=1e-15, rtol=1e-15)
            else:
                t = th[i]
            out.append((t, float(self.f(t))))
        return out

    def g_max(self, resolution: int = 181) -> float:
        """Largest ``|g(theta, 0)|``; every grid peak within 5% of the top is refined."""
        th = np.linspace(0.0, math.pi, resolution)
        v = np.abs(self.f(th))
        best = float(v.max())
        for i in np.flatnonzero(v >= 0.95 * best):
            if not 0 < i < resolution - 1 or v[i] < v[i - 1] or v[i] < v[i + 1]:
                continue
            lo, hi = th[i - 1], th[i + 1]
            sgn = 1.0 if self.f(th[i]) >= 0 else -1.0
            dlo, dhi = sgn * self.df(lo), sgn * self.df(hi)
            if dlo > 0 > dhi:
                t = brentq(self.df, lo, hi, xtol=1e-15, rtol=1e-15)
                best = max(best, float(abs(self.f(t))))
        return best


def positive_cpp_search(state: SymmetricState) -> CppReport:
    """CPPs of a state with real nonnegative coefficients.

    Such states always have a CPP on the half circle ``phi = 0``.  With
    rotational order m the CPPs sit at the azimuths ``2 pi r / m``; without
    rotational symmetry they all lie on ``phi = 0``.
    """
    state = normalize(state)
    if not state.is_positive():
        raise NotPositive("coefficients must be real and nonnegative")
    n = state.n
    m = rotational_order(state)
    if m == 0:
        return dicke_cpps(n, int(state.support()[0]))
    mer = _Meridian(state.coeffs.real)
    maxima = mer.maxima()
    best = max(v for _, v in maxima)
    points, values = [], []
    for t, v in maxima:
        if t <= 0.0 or t >= math.pi:
            points.append(BlochPoint(t, 0.0))
            values.append(v)
            continue
        for r in range(max(m, 1)):
            points.append(BlochPoint(t, 2 * math.pi * r / m))
            values.append(v)
    report = _report(points, values)
    return CppReport(
        cpps=report.cpps,
        g_max=float(min(best, 1.0)),
        e_g=float(-2 * math.log2(min(best, 1.0))),
        local_maxima=report.local_maxima,
    )


# ---------------------------------------------------------------------------
# integral identities and sampling
# ---------------------------------------------------------------------------

def _sphere_integral(state: SymmetricState, quad_order: int, n_phi: int) -> float:
    x, wts = np.polynomial.legendre.leggauss(quad_order)
    thetas = np.arccos(x)
    phis = np.arange(n_phi) * (2 * math.pi / n_phi)
    g2 = amplitude_grid(state, thetas, phis) ** 2
    return float(wts @ g2.sum(axis=1) * (2 * math.pi / n_phi))


def integral_check(state: SymmetricState, quad_order: int = 64, n_phi: int = 256) -> float:
    """Quadrature of ``g^2`` over the sphere; equals ``4 pi / (n + 1)`` for every state."""
    return _sphere_integral(normalize(state), quad_order, n_phi)


def volume_check(state: SymmetricState, quad_order: int = 64, n_phi: int = 256) -> float:
    """Volume enclosed by the surface ``r = g^(2/3)``; equals ``4 pi / (3 (n + 1))``."""
    return integral_check(state, quad_order, n_phi) / 3.0


@dataclass(frozen=True, eq=False)
class SphereSamples:
    """Row-major samples: ``values[i, j]`` belongs to ``(theta[i], phi[j])``."""

    theta: np.ndarray = field(repr=False)
    phi: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    function: str = "amp2"

    def rows(self):
        for i, t in enumerate(self.theta):
            for j, p in enumerate(self.phi):
                yield float(t), float(p), float(self.values[i, j])

    def to_csv(self, fh=None) -> str | None:
        buf = io.StringIO() if fh is None else fh
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["theta", "phi", "value"])
        for row in self.rows():
            w.writerow([format(v, ".17g") for v in row])
        return buf.getvalue() if fh is None else None


def sample_sphere(state: SymmetricState, function: str = "amp2", resolution=(91, 180)) -> SphereSamples:
    """Sample ``g^2`` (``amp2``) or ``g^(2/3)`` (``vol``) on a uniform angular grid."""
    n_t, n_p = (int(r) for r in resolution)
    if n_t < 2 or n_p < 2:
        raise InputError("resolution must be at least 2x2")
    if function not in ("amp2", "vol"):
        raise InputError("function must be 'amp2' or 'vol'")
    thetas = np.linspace(0.0, math.pi, n_t)
    phis = np.arange(n_p) * (2 * math.pi / n_p)
    g2 = amplitude_grid(normalize(state), thetas, phis) ** 2
    vals = g2 if function == "amp2" else np.cbrt(g2)
    return SphereSamples(thetas, phis, np.clip(vals, 0.0, 1.0), function)


def span_check(state: SymmetricState, cpps) -> float:
    """Distance of ``state`` from the span of its closest product states.

    ``cpps`` is a :class:`CppReport` (rings are sampled at ``2n + 2`` points)
    or a sequence of :class:`BlochPoint`.
    """
    state = normalize(state)
    n = state.n
    if isinstance(cpps, CppReport):
        pts = cpps.ring_points(2 * n + 2)
    else:
        pts = list(cpps)
    if not pts:
        raise EmptyCppSet("no CPPs supplied")
    A = np.column_stack([product_coeffs(n, p) for p in pts])
    x, *_ = np.linalg.lstsq(A, state.coeffs, rcond=None)
    return float(min(np.linalg.norm(state.coeffs - A @ x), 1.0))
