"""Symmetric n-qubit states, Majorana polynomials and Majorana points.

A symmetric state is stored by its n+1 amplitudes over the Dicke basis
``S_{n,k}`` (k excitations).  Its Majorana points (MPs) are the images of
the roots of

    psi(z) = sum_k (-1)^k binom(n, k)^(1/2) a_k z^k

under the inverse stereographic map ``z -> (theta, phi)`` with
``z = exp(-i phi) cot(theta / 2)``.  A polynomial of degree d < n carries
n - d roots at infinity, which land on the north pole.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.cluster.hierarchy import fcluster, linkage

from .errors import InputError, NotUnitary, RootFindingFailed, ZeroState

__all__ = [
    "INF",
    "BlochPoint",
    "SymmetricState",
    "MajoranaPolynomial",
    "MPDistribution",
    "is_inf",
    "chordal",
    "normalize",
    "mp_to_root",
    "root_to_mp",
    "majorana_polynomial",
    "state_from_mps",
    "state_from_roots",
    "state_to_mps",
    "rotate_z",
    "apply_su2",
    "apply_matrix",
    "product_coeffs",
    "fidelity",
    "dicke",
    "random_state",
    "state_from_json",
    "state_to_json",
]

INF = complex(math.inf, 0.0)
"""Stand-in for the point at infinity of the extended complex plane."""

DEGREE_TOL = 1e-12
ROOT_ZERO_TOL = 1e-250  # coefficients below this (relative) are exact zeros for root extraction
COMPANION_MAX_DEGREE = 30
RESIDUAL_TOL = 1e-8
DEFAULT_CLUSTER_TOL = 1e-6
_MERGE_LEVELS = (1e-2, 1e-3, 1e-4, 1e-5)
_MULTIPLE_ROOT_TOL = 1e-10


# ---------------------------------------------------------------------------
# extended complex numbers
# ---------------------------------------------------------------------------

def is_inf(z: complex) -> bool:
    return cmath.isinf(z)


def chordal(z: complex, w: complex) -> float:
    """Chordal distance between the points of the unit sphere with these roots (range [0, 2])."""
    zi, wi = is_inf(z), is_inf(w)
    if zi and wi:
        return 0.0
    if zi:
        return 2.0 / math.sqrt(1.0 + abs(w) ** 2)
    if wi:
        return 2.0 / math.sqrt(1.0 + abs(z) ** 2)
    return 2.0 * abs(z - w) / math.sqrt((1.0 + abs(z) ** 2) * (1.0 + abs(w) ** 2))


def _root_vectors(roots: np.ndarray) -> np.ndarray:
    """Unit Bloch vectors of MPs given as extended-complex roots."""
    roots = np.asarray(roots, dtype=complex)
    out = np.empty((roots.size, 3))
    for i, z in enumerate(roots):
        if is_inf(z):
            out[i] = (0.0, 0.0, 1.0)
            continue
        # evaluate in whichever chart keeps the numbers bounded
        if abs(z) <= 1.0:
            r2 = abs(z) ** 2
            u = np.conj(z) / (1.0 + r2)
            zc = (r2 - 1.0) / (r2 + 1.0)
        else:
            w = 1.0 / z
            r2 = abs(w) ** 2
            u = w / (1.0 + r2)
            zc = (1.0 - r2) / (1.0 + r2)
        out[i] = (2.0 * u.real, 2.0 * u.imag, zc)
    return out


# ---------------------------------------------------------------------------
# Bloch points
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BlochPoint:
    """Point on the unit sphere, ``theta`` from the north pole.

    The azimuth is reduced to [0, 2pi) and set to 0 on the poles.
    """

    theta: float
    phi: float = 0.0

    def __post_init__(self) -> None:
        th = float(min(max(self.theta, 0.0), math.pi))
        ph = float(self.phi) % (2.0 * math.pi)
        if ph >= 2.0 * math.pi:  # -tiny % 2pi can round up to 2pi
            ph = 0.0
        if th == 0.0 or th == math.pi:
            ph = 0.0
        object.__setattr__(self, "theta", th)
        object.__setattr__(self, "phi", ph)

    @classmethod
    def from_vector(cls, v: Sequence[float]) -> "BlochPoint":
        x, y, z = (float(t) for t in v)
        return cls(math.atan2(math.hypot(x, y), z), math.atan2(y, x))

    def vector(self) -> np.ndarray:
        st = math.sin(self.theta)
        return np.array([st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)])

    def spinor(self) -> np.ndarray:
        """Qubit ``cos(theta/2)|0> + exp(i phi) sin(theta/2)|1>``."""
        return np.array([math.cos(self.theta / 2), cmath.exp(1j * self.phi) * math.sin(self.theta / 2)])

    def antipode(self) -> "BlochPoint":
        return BlochPoint(math.pi - self.theta, self.phi + math.pi)

    def distance(self, other: "BlochPoint") -> float:
        """Euclidean chord between the two points (equals the chordal metric of their roots)."""
        return float(np.linalg.norm(self.vector() - other.vector()))


def mp_to_root(p: BlochPoint) -> complex:
    """Root of the Majorana polynomial belonging to the MP ``p``."""
    if p.theta == 0.0:
        return INF
    if p.theta == math.pi:
        return 0j
    t = math.tan(p.theta / 2)
    if t < 1e-300:  # cot overflows: numerically the north pole
        return INF
    return cmath.exp(-1j * p.phi) * (1.0 / t)


def root_to_mp(z: complex) -> BlochPoint:
    """Inverse of :func:`mp_to_root`."""
    if is_inf(z):
        return BlochPoint(0.0, 0.0)
    try:
        r = abs(z)
    except OverflowError:
        return BlochPoint(0.0, 0.0)
    # pi - 2 atan(r), written to stay accurate for large r
    theta = 2.0 * math.atan2(1.0, r)
    phi = -cmath.phase(z) if r > 0 else 0.0
    return BlochPoint(theta, phi)


# ---------------------------------------------------------------------------
# states
# ---------------------------------------------------------------------------

def _binom_sqrt(n: int) -> np.ndarray:
    return np.sqrt(np.array([float(math.comb(n, k)) for k in range(n + 1)]))


@dataclass(frozen=True, eq=False)
class SymmetricState:
    """Permutation-symmetric state of ``n`` qubits.

    Parameters
    ----------
    coeffs : array_like
        Amplitudes ``a_0 .. a_n`` over the Dicke basis.  Stored as given; use
        :func:`normalize` (or :meth:`from_dicke`) to obtain a unit vector with
        fixed global phase.
    """

    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        c = np.array(self.coeffs, dtype=complex).ravel()
        if c.size < 2:
            raise InputError("a symmetric state needs at least n + 1 = 2 coefficients")
        if not np.all(np.isfinite(c)):
            raise InputError("coefficients must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_dicke(cls, coeffs: Iterable[complex]) -> "SymmetricState":
        return normalize(cls(np.asarray(list(coeffs), dtype=complex)))

    @property
    def n(self) -> int:
        return self.coeffs.size - 1

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def is_real(self, tol: float = 1e-12) -> bool:
        return bool(np.all(np.abs(self.coeffs.imag) <= tol))

    def is_positive(self, tol: float = 1e-12) -> bool:
        c = self.coeffs
        return bool(np.all(np.abs(c.imag) <= tol) and np.all(c.real >= -tol))

    def support(self, tol: float = DEGREE_TOL) -> np.ndarray:
        a = np.abs(self.coeffs)
        return np.flatnonzero(a > tol * a.max())

    def dephase(self) -> "SymmetricState":
        """Replace every coefficient by its modulus."""
        return SymmetricState(np.abs(self.coeffs).astype(complex))

    def conjugate(self) -> "SymmetricState":
        return SymmetricState(np.conj(self.coeffs))

    def __repr__(self) -> str:
        body = ", ".join(f"{c.real:.6g}{c.imag:+.6g}j" for c in self.coeffs)
        return f"SymmetricState(n={self.n}, [{body}])"


def normalize(state: SymmetricState) -> SymmetricState:
    """Unit norm, first nonzero coefficient real and nonnegative."""
    c = np.array(state.coeffs, dtype=complex)
    amax = np.max(np.abs(c))
    if amax < 1e-300:
        raise ZeroState("all coefficients vanish")
    c = c / amax  # avoid overflow in the norm for huge inputs
    c = c / np.linalg.norm(c)
    lead = np.flatnonzero(np.abs(c) > DEGREE_TOL * np.max(np.abs(c)))[0]
    c = c * (abs(c[lead]) / c[lead])
    c[lead] = abs(c[lead])
    return SymmetricState(c)


def fidelity(s1: SymmetricState, s2: SymmetricState) -> float:
    """``|<s1|s2>|^2`` for normalized inputs."""
    if s1.n != s2.n:
        raise InputError("qubit numbers differ")
    return float(abs(np.vdot(s1.coeffs, s2.coeffs)) ** 2)


def dicke(n: int, k: int) -> SymmetricState:
    if not 0 <= k <= n:
        raise InputError(f"need 0 <= k <= n, got k={k}, n={n}")
    c = np.zeros(n + 1, dtype=complex)
    c[k] = 1.0
    return SymmetricState(c)


def random_state(n: int, rng: np.random.Generator) -> SymmetricState:
    """Haar-random symmetric state (complex Gaussian coefficients)."""
    c = rng.standard_normal(n + 1) + 1j * rng.standard_normal(n + 1)
    return normalize(SymmetricState(c))


def product_coeffs(n: int, p: BlochPoint) -> np.ndarray:
    """Dicke coefficients of the product state ``sigma^{(x) n}`` pointing at ``p``."""
    c, s = math.cos(p.theta / 2), math.sin(p.theta / 2)
    k = np.arange(n + 1)
    return _binom_sqrt(n) * c ** (n - k) * (cmath.exp(1j * p.phi) * s) ** k


# ---------------------------------------------------------------------------
# Majorana polynomial
# ---------------------------------------------------------------------------

def _signs(n: int) -> np.ndarray:
    return np.where(np.arange(n + 1) % 2 == 0, 1.0, -1.0)


@dataclass(frozen=True, eq=False)
class MajoranaPolynomial:
    """``psi(z) = sum_k c_k z^k`` with ``c_k = (-1)^k binom(n,k)^(1/2) a_k``."""

    n: int
    coeffs: np.ndarray = field(repr=False)

    @property
    def degree(self) -> int:
        a = np.abs(self.coeffs)
        return int(np.flatnonzero(a > DEGREE_TOL * a.max())[-1])

    @property
    def low(self) -> int:
        """Lowest nonvanishing power, i.e. the multiplicity of the root at 0."""
        a = np.abs(self.coeffs)
        return int(np.flatnonzero(a > DEGREE_TOL * a.max())[0])

    def __call__(self, z):
        return P.polyval(z, self.coeffs)

    def roots(self) -> np.ndarray:
        """All n extended-complex roots (polished, multiple roots snapped)."""
        return _extended_roots(self.coeffs)

    def to_state(self) -> SymmetricState:
        return normalize(SymmetricState(self.coeffs / (_signs(self.n) * _binom_sqrt(self.n))))


def majorana_polynomial(state: SymmetricState) -> MajoranaPolynomial:
    n = state.n
    return MajoranaPolynomial(n, _signs(n) * _binom_sqrt(n) * state.coeffs)


def _normwise_error(p: np.ndarray, w: complex) -> float:
    den = float(np.sum(np.abs(p))) * max(1.0, abs(w)) ** (p.size - 1)
    return 0.0 if den == 0.0 else float(abs(P.polyval(w, p)) / den)


def _backward_error(p: np.ndarray, w: complex) -> float:
    den = P.polyval(abs(w), np.abs(p))
    if den == 0.0:
        return 0.0
    return float(abs(P.polyval(w, p)) / den)


def _in_chart(q: np.ndarray, z: complex):
    """Pick the chart (z or 1/z) in which ``|coordinate| <= 1``."""
    if abs(z) <= 1.0:
        return q, z, False
    return q[::-1], 1.0 / z, True


def _newton(p: np.ndarray, w: complex, iters: int = 60) -> complex:
    dp = P.polyder(p)
    val = P.polyval(w, p)
    res = abs(val)
    for _ in range(iters):
        d = P.polyval(w, dp)
        if d == 0 or res == 0.0:
            break
        step = val / d
        w_new = w - step
        val_new = P.polyval(w_new, p)
        if not abs(val_new) < res:
            break
        w, val, res = w_new, val_new, abs(val_new)
        if abs(step) <= 4e-16 * max(abs(w), 1e-300):
            break
    return w


def _polish(q: np.ndarray, z: complex) -> complex:
    p, w, flipped = _in_chart(q, z)
    w = _newton(p, w)
    return 1.0 / w if flipped else w


def _root_residual(q: np.ndarray, z: complex) -> float:
    p, w, _ = _in_chart(q, z)
    return _backward_error(p, w)


def _final_residual(q: np.ndarray, z: complex) -> float:
    if is_inf(z):
        return _normwise_error(q[::-1], 0j)
    p, w, _ = _in_chart(q, z)
    return min(_backward_error(p, w), _normwise_error(p, w))


def _durand_kerner(q: np.ndarray, z0: np.ndarray, maxiter: int = 500) -> np.ndarray:
    """Weierstrass / Durand-Kerner simultaneous iteration on the monic polynomial."""
    monic = q / q[-1]
    z = z0.astype(complex).copy()
    with np.errstate(all="ignore"):
        for _ in range(maxiter):
            num = P.polyval(z, monic)
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1.0)
            step = num / diff.prod(axis=1)
            if not np.all(np.isfinite(step)):
                return z0
            z = z - step
            if np.max(np.abs(step) / np.maximum(1.0, np.abs(z))) < 1e-15:
                break
    return z


def _refine_multiple(q: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Snap numerically split multiple roots onto their exact common location.

    A k-fold root scatters by about eps^(1/k) under eigenvalue methods, while
    the mean of the scattered copies stays accurate.  For each candidate group
    we polish that mean as a simple root of the (k-1)-th derivative and accept
    it when all lower derivatives vanish to rounding level.
    """
    if z.size < 2:
        return z
    z = z.copy()
    vec = _root_vectors(z)
    resolved = np.zeros(z.size, dtype=bool)
    tree = linkage(vec, method="single")
    for level in _MERGE_LEVELS:
        labels = fcluster(tree, t=level, criterion="distance")
        for lab in np.unique(labels):
            idx = np.flatnonzero((labels == lab) & ~resolved)
            m = idx.size
            if m < 2 or np.any(resolved[labels == lab]):
                continue
            members = z[idx]
            big = np.mean(np.abs(members)) > 1.0
            p = q[::-1] if big else q
            w0 = np.mean(1.0 / members) if big else np.mean(members)
            pm = P.polyder(p, m - 1)
            w = _newton(pm, w0)
            if abs(w - w0) > level:
                continue
            # normwise test: componentwise errors blow up for roots near 0 / infinity
            ok = all(_normwise_error(P.polyder(p, j), w) <= _MULTIPLE_ROOT_TOL for j in range(m - 1))
            if not ok:
                continue
            z[idx] = (INF if w == 0 else 1.0 / w) if big else w
            resolved[idx] = True
    return z


def _finite_roots(q: np.ndarray) -> np.ndarray:
    """Roots of ``q`` (ascending, nonzero ends)."""
    d = q.size - 1
    if d == 0:
        return np.empty(0, dtype=complex)
    q = q / np.max(np.abs(q))
    if d == 1:
        return np.array([-q[0] / q[1]], dtype=complex)
    z = np.roots(q[::-1]).astype(complex)
    if d > COMPANION_MAX_DEGREE:
        zd = _durand_kerner(q, z)
        better = np.array([_root_residual(q, a) <= _root_residual(q, b) for a, b in zip(zd, z)])
        z = np.where(better, zd, z)
    z = np.array([_polish(q, zi) for zi in z])
    z = _refine_multiple(q, z)
    res = max(_final_residual(q, zi) for zi in z)
    if not res <= RESIDUAL_TOL:
        raise RootFindingFailed(f"root polishing stalled at backward error {res:.3g}")
    return z


def _extended_roots(c: np.ndarray) -> np.ndarray:
    n = c.size - 1
    a = np.abs(c)
    if a.max() == 0:
        raise ZeroState("Majorana polynomial vanishes identically")
    nz = np.flatnonzero(a > ROOT_ZERO_TOL * a.max())
    low, high = int(nz[0]), int(nz[-1])
    finite = _finite_roots(np.array(c[low:high + 1], dtype=complex))
    return np.concatenate([np.zeros(low, dtype=complex), finite, np.full(n - high, INF)])


# ---------------------------------------------------------------------------
# MP distributions
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class MPDistribution:
    """Majorana points of a state, raw and clustered.

    ``clusters`` holds ``(representative, multiplicity)`` pairs sorted by
    multiplicity (descending), then theta, then phi.  ``cluster_roots`` are
    the matching extended-complex roots.
    """

    n: int
    points: tuple
    clusters: tuple
    roots: np.ndarray = field(repr=False)
    cluster_roots: np.ndarray = field(repr=False)
    cluster_tol: float = DEFAULT_CLUSTER_TOL

    @property
    def multiplicities(self) -> tuple:
        return tuple(m for _, m in self.clusters)

    @property
    def diversity(self) -> int:
        return len(self.clusters)

    def vectors(self) -> np.ndarray:
        return np.array([p.vector() for p in self.points])

    def cluster_vectors(self) -> np.ndarray:
        return np.array([p.vector() for p, _ in self.clusters])


def _cluster(vec: np.ndarray, tol: float) -> np.ndarray:
    if len(vec) < 2:
        return np.ones(len(vec), dtype=int)
    return fcluster(linkage(vec, method="single"), t=tol, criterion="distance")


def mps_from_roots(roots: np.ndarray, cluster_tol: float = DEFAULT_CLUSTER_TOL) -> MPDistribution:
    roots = np.asarray(roots, dtype=complex)
    vec = _root_vectors(roots)
    labels = _cluster(vec, cluster_tol)
    groups = []
    for lab in np.unique(labels):
        idx = np.flatnonzero(labels == lab)
        centre = vec[idx].mean(axis=0)
        centre /= np.linalg.norm(centre)
        if idx.size == 1:
            rep_root = roots[idx[0]]
        else:
            # exact poles stay exact; otherwise project the centroid back
            members = roots[idx]
            if np.all(np.isinf(members)):
                rep_root = INF
            elif np.all(members == 0):
                rep_root = 0j
            else:
                rep_root = mp_to_root(BlochPoint.from_vector(centre))
        rep = root_to_mp(rep_root)
        groups.append((rep, int(idx.size), rep_root))
    groups.sort(key=lambda g: (-g[1], g[0].theta, g[0].phi))
    return MPDistribution(
        n=roots.size,
        points=tuple(root_to_mp(z) for z in roots),
        clusters=tuple((g[0], g[1]) for g in groups),
        roots=roots,
        cluster_roots=np.array([g[2] for g in groups], dtype=complex),
        cluster_tol=cluster_tol,
    )


def state_to_mps(state: SymmetricState, cluster_tol: float = DEFAULT_CLUSTER_TOL) -> MPDistribution:
    """Majorana points of ``state`` with degeneracy clustering."""
    roots = majorana_polynomial(state).roots()
    return mps_from_roots(roots, cluster_tol)


def state_from_roots(roots: Iterable[complex], n: int | None = None) -> SymmetricState:
    """State whose Majorana polynomial has the given extended roots.

    Each root ``x / y`` contributes the factor ``y z - x`` with ``(x, y)``
    normalized, so roots at infinity and roots near the poles are treated
    alike.
    """
    roots = list(roots)
    if n is None:
        n = len(roots)
    if len(roots) != n or n < 1:
        raise InputError("need exactly n >= 1 roots")
    poly = np.array([1.0 + 0j])
    for z in roots:
        if is_inf(z):
            x, y = 1.0 + 0j, 0j
        elif abs(z) <= 1.0:
            nrm = math.sqrt(1.0 + abs(z) ** 2)
            x, y = z / nrm, 1.0 / nrm
        else:
            w = 1.0 / z
            nrm = math.sqrt(1.0 + abs(w) ** 2)
            x, y = 1.0 / nrm, w / nrm
        poly = np.convolve(poly, np.array([-x, y]))
    return MajoranaPolynomial(n, poly).to_state()


def state_from_mps(points: Sequence[BlochPoint]) -> SymmetricState:
    """State whose Majorana points are ``points`` (unique up to global phase)."""
    return state_from_roots([mp_to_root(p) for p in points])


# ---------------------------------------------------------------------------
# local unitaries and SLOCC maps
# ---------------------------------------------------------------------------

def rotate_z(state: SymmetricState, angle: float) -> SymmetricState:
    """Rotate all MPs by ``angle`` about the Z axis."""
    k = np.arange(state.n + 1)
    return normalize(SymmetricState(state.coeffs * np.exp(1j * k * angle)))


def apply_matrix(state: SymmetricState, M: np.ndarray) -> SymmetricState:
    """Apply ``B^{(x) n}`` for an invertible 2x2 matrix ``B = M``.

    Each MP root transforms as ``z -> (a z + b) / (c z + d)``; on the
    polynomial this is the substitution
    ``psi'(w) = sum_k c_k (d w - b)^k (a - c w)^(n - k)``, which is exact
    on the coefficients and needs no root finding.
    """
    M = np.asarray(M, dtype=complex)
    (a, b), (c, d) = M
    if abs(a * d - b * c) < 1e-300:
        raise InputError("matrix is singular")
    n = state.n
    coeffs = majorana_polynomial(state).coeffs
    num = np.array([-b, d])
    den = np.array([a, -c])
    pow_num = [np.array([1.0 + 0j])]
    pow_den = [np.array([1.0 + 0j])]
    for _ in range(n):
        pow_num.append(np.convolve(pow_num[-1], num))
        pow_den.append(np.convolve(pow_den[-1], den))
    out = np.zeros(n + 1, dtype=complex)
    for k, ck in enumerate(coeffs):
        if ck != 0:
            out += ck * np.convolve(pow_num[k], pow_den[n - k])
    return MajoranaPolynomial(n, out).to_state()


def apply_su2(state: SymmetricState, U: np.ndarray, tol: float = 1e-10) -> SymmetricState:
    """``U^{(x) n} |psi>`` up to global phase; MPs move rigidly by ``U``."""
    U = np.asarray(U, dtype=complex)
    if U.shape != (2, 2) or np.linalg.norm(U.conj().T @ U - np.eye(2)) > tol:
        raise NotUnitary("U is not a 2x2 unitary")
    return apply_matrix(state, U)


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------

def state_from_json(obj: dict) -> SymmetricState:
    """Parse ``{"n", "dicke": [[re, im], ...]}`` or ``{"mps": [{"theta", "phi"}, ...]}``."""
    if not isinstance(obj, dict):
        raise InputError("state JSON must be an object")
    has_d, has_m = "dicke" in obj, "mps" in obj
    if has_d == has_m:
        raise InputError('exactly one of "dicke" or "mps" is required')
    try:
        if has_d:
            coeffs = [complex(float(re), float(im)) for re, im in obj["dicke"]]
            if "n" in obj and int(obj["n"]) != len(coeffs) - 1:
                raise InputError('"dicke" must hold n + 1 entries')
            return normalize(SymmetricState(coeffs))
        pts = [BlochPoint(float(p["theta"]), float(p["phi"])) for p in obj["mps"]]
    except (TypeError, ValueError, KeyError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"malformed state JSON: {exc}") from exc
    if "n" in obj and int(obj["n"]) != len(pts):
        raise InputError('"mps" must hold n entries')
    if not pts:
        raise InputError("empty MP list")
    return state_from_mps(pts)


def state_to_json(state: SymmetricState) -> dict:
    return {"n": state.n, "dicke": [[float(c.real), float(c.imag)] for c in state.coeffs]}
