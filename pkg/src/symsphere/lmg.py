"""Lipkin-Meshkov-Glick ground states, ``H = -(gamma/n) S_y^2 - h S_z``.

Finite spin: the Hamiltonian is assembled in the ``|s, m>`` basis and
diagonalized with a cyclic Jacobi sweep.  Basis index ``k = s - m``, so
``m = +s`` is the Dicke state ``S_0`` and large ``h`` drives the ground
state to the north pole.  The basis vectors carry the phases ``i^k``,
which make ``S_y`` itself a real matrix.  Relative to the plain
Condon-Shortley basis this is a rotation by ``pi/2`` about z: ground-state
MPs then sit on the imaginary great circle and the CPPs at ``phi = 0, pi``.

Thermodynamic limit (``gamma = 1``): closed forms for the MP density,
the logarithmic amplitude on the real great circle, and the CPP latitude.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import InputError, NumericalError, OutOfRange, OutOfSupport
from .symstate import SymmetricState

__all__ = [
    "LmgParams",
    "hamiltonian",
    "jacobi_eigh",
    "ground_state",
    "mp_density",
    "mp_support",
    "log_amplitude_broken",
    "log_amplitude_quadrature",
    "cpp_latitude",
]


@dataclass(frozen=True)
class LmgParams:
    """Spin ``s = two_s / 2``, coupling ``gamma > 0``, field ``h >= 0``."""

    two_s: int
    h: float
    gamma: float = 1.0

    def __post_init__(self) -> None:
        if int(self.two_s) != self.two_s or self.two_s < 2:
            raise InputError("2s must be an integer >= 2")
        if not self.gamma > 0:
            raise InputError("gamma must be positive")
        if not self.h >= 0:
            raise InputError("h must be nonnegative")

    @classmethod
    def from_spin(cls, s: float, h: float, gamma: float = 1.0) -> "LmgParams":
        two_s = 2 * s
        if abs(two_s - round(two_s)) > 1e-12:
            raise InputError("spin must be a multiple of 1/2")
        return cls(int(round(two_s)), float(h), float(gamma))

    @property
    def s(self) -> float:
        return self.two_s / 2

    @property
    def n(self) -> int:
        return self.two_s


def hamiltonian(p: LmgParams) -> np.ndarray:
    """Real symmetric matrix of H; row k holds ``i^k |s, s - k>``."""
    s, n = p.s, p.n
    m = s - np.arange(n + 1)
    H = np.diag(-(p.gamma / n) * (s * (s + 1) - m**2) / 2.0 - p.h * m)
    # S_y^2 = -(S_+^2 + S_-^2 - S_+ S_- - S_- S_+) / 4 ; S_+^2 couples m -> m + 2.
    # The i^k phases multiply these couplings by i^2 = -1.
    for k in range(2, n + 1):
        mm = m[k]
        amp = math.sqrt((s * (s + 1) - mm * (mm + 1)) * (s * (s + 1) - (mm + 1) * (mm + 2)))
        H[k - 2, k] = H[k, k - 2] = -(p.gamma / n) * amp / 4.0
    return H


def jacobi_eigh(A: np.ndarray, tol: float = 1e-12, max_sweeps: int = 100):
    """Eigen-decomposition of a real symmetric matrix by cyclic Jacobi rotations.

    Sweeps until the off-diagonal Frobenius norm falls below ``tol`` times
    the matrix norm.  Returns ``(w, V)`` with ascending eigenvalues.
    """
    A = np.array(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or not np.allclose(A, A.T, atol=0, rtol=0):
        raise InputError("matrix must be square and symmetric")
    N = A.shape[0]
    V = np.eye(N)
    scale = max(float(np.linalg.norm(A)), 1e-300)
    for _ in range(max_sweeps):
        off = float(np.linalg.norm(A - np.diag(np.diag(A))))
        if off <= tol * scale:
            break
        for p in range(N - 1):
            for q in range(p + 1, N):
                apq = A[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                sn = t * c
                ap, aq = A[:, p].copy(), A[:, q].copy()
                A[:, p], A[:, q] = c * ap - sn * aq, sn * ap + c * aq
                ap, aq = A[p, :].copy(), A[q, :].copy()
                A[p, :], A[q, :] = c * ap - sn * aq, sn * ap + c * aq
                A[p, q] = A[q, p] = 0.0
                vp, vq = V[:, p].copy(), V[:, q].copy()
                V[:, p], V[:, q] = c * vp - sn * vq, sn * vp + c * vq
    else:
        raise NumericalError("Jacobi iteration did not converge")
    w = np.diag(A).copy()
    order = np.argsort(w, kind="stable")
    return w[order], V[:, order]


def ground_state(p: LmgParams, tol: float = 1e-12) -> SymmetricState:
    """Lowest eigenvector as a symmetric state (sign fixed so the largest entry is positive).

    H only couples k to k +- 2, so every eigenvector lives on even or on odd
    k.  When the two lowest levels are degenerate to within ``1e-10`` times
    the spectral scale (deep in the broken phase), the even-k one is returned.
    """
    w, V = jacobi_eigh(hamiltonian(p), tol=tol)
    pick = 0
    gap_tol = 1e-10 * max(1.0, float(np.max(np.abs(w))))
    for j in range(1, len(w)):
        if w[j] - w[0] > gap_tol:
            break
        if np.sum(V[0::2, j] ** 2) > np.sum(V[0::2, pick] ** 2):
            pick = j
    v = V[:, pick]
    v = v / np.linalg.norm(v)
    if v[np.argmax(np.abs(v))] < 0:
        v = -v
    return SymmetricState(v.astype(complex))


def mp_support(h: float) -> float:
    """Largest ``|theta|`` carrying MP density (``pi`` in the broken phase)."""
    if h < 0:
        raise OutOfRange("h must be nonnegative")
    if h <= 1:
        return math.pi
    return math.acos((h - 2.0) / h)


def mp_density(h: float, theta: float) -> float:
    """Continuum MP density along the great circle carrying the MPs (``gamma = 1``).

    ``theta`` runs over ``[-pi, pi]`` and the density integrates to 1 there.
    """
    if h < 0:
        raise OutOfRange("h must be nonnegative")
    c = math.cos(theta)
    if h <= 1:
        return (1.0 + h * c) / (2 * math.pi)
    if abs(theta) > mp_support(h) + 1e-12:
        raise OutOfSupport(f"theta = {theta} lies outside the MP support for h = {h}")
    return math.sqrt(max(h * (1 + c) * (2 - h + h * c), 0.0)) / (2 * math.pi)


def log_amplitude_broken(h: float, theta: float) -> float:
    """Closed-form logarithmic amplitude on the real great circle for ``h <= 1``."""
    if not 0 <= h <= 1:
        raise OutOfRange("broken phase requires 0 <= h <= 1")
    c = math.cos(theta)
    s = math.sqrt(max(1.0 - c * c, 0.0))
    val = 2.0 - math.log2(1.0 + s)
    if abs(c) > 1e-300:
        # (1 - s) / c written as c / (1 + s) to avoid cancellation near c = 0
        val -= h / math.log(2) * c / (1.0 + s)
    return val


def log_amplitude_quadrature(h: float, theta: float) -> float:
    """Same quantity by adaptive quadrature of the defining integral."""
    c = math.cos(theta)

    def f(t):
        arg = 0.5 * (1.0 + c * math.cos(t))
        return (1.0 + h * math.cos(t)) * math.log2(arg) if arg > 0 else 0.0

    pts = [math.pi] if abs(abs(c) - 1) < 1e-12 else None
    val, _ = quad(f, 0.0, 2 * math.pi, points=pts, epsabs=1e-13, epsrel=1e-13, limit=400)
    return -val / (2 * math.pi)


def cpp_latitude(h: float) -> float:
    """Polar angle of the continuum CPPs: ``arccos h`` below the transition, 0 above."""
    if h < 0:
        raise OutOfRange("h must be nonnegative")
    return math.acos(h) if h <= 1 else 0.0
