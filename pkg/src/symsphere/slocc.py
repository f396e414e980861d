"""LU / SLOCC classification of symmetric states through Moebius maps of their MPs.

An invertible local operation ``B^{(x) n}`` acts on the Majorana roots as
the Moebius map with matrix ``B``; it is a rigid rotation of the sphere
exactly when ``B`` is unitary up to scale.  Two states are therefore
SLOCC-equivalent iff some Moebius map carries one root multiset onto the
other, and LU-equivalent iff a rotation does.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.transform import Rotation

from .errors import (
    DegenerateQuadruple,
    DegenerateTriple,
    InputError,
    NumericalError,
    OutOfRange,
    WrongDiversity,
)
from .symstate import (
    INF,
    MPDistribution,
    SymmetricState,
    apply_matrix,
    chordal,
    is_inf,
    normalize,
    root_to_mp,
    state_to_mps,
)

__all__ = [
    "MobiusMap",
    "DCClass",
    "EquivalenceVerdict",
    "AffinePart",
    "LU",
    "SLOCC",
    "INEQUIVALENT",
    "apply_mobius",
    "dc_class",
    "cross_ratio",
    "cross_ratio_orbit",
    "mobius_from_triples",
    "slocc_equivalence",
    "lu_equivalence",
    "decompose_slocc",
    "canonical_rep_4q",
    "rep_state_5q",
    "rep_state_4q",
    "conjugate_state",
    "su2_from_rotation",
]

LU = "LU-equivalent"
SLOCC = "SLOCC-equivalent-not-LU"
INEQUIVALENT = "inequivalent"

_TRIANGLE = np.exp(-2j * np.pi * np.arange(3) / 3)  # roots of the equatorial MPs at phi = 0, 2pi/3, 4pi/3


# ---------------------------------------------------------------------------
# Moebius maps
# ---------------------------------------------------------------------------

def _hom(z: complex) -> np.ndarray:
    """Bounded homogeneous coordinates ``(x, y)`` with ``z = x / y``."""
    if is_inf(z):
        return np.array([1.0 + 0j, 0j])
    if abs(z) <= 1.0:
        return np.array([complex(z), 1.0 + 0j])
    return np.array([1.0 + 0j, 1.0 / z])


def _bracket(p: np.ndarray, q: np.ndarray) -> complex:
    return p[0] * q[1] - q[0] * p[1]


def _dehom(v: np.ndarray) -> complex:
    if v[1] == 0:
        return INF
    return complex(v[0] / v[1])


@dataclass(frozen=True)
class MobiusMap:
    """``z -> (a z + b) / (c z + d)`` normalized to ``ad - bc = 1``."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self) -> None:
        for name in "abcd":
            object.__setattr__(self, name, complex(getattr(self, name)))
        if abs(self.a * self.d - self.b * self.c - 1.0) > 1e-10:
            raise InputError("Moebius matrix must have unit determinant")

    @classmethod
    def from_matrix(cls, M) -> "MobiusMap":
        M = np.asarray(M, dtype=complex)
        det = M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
        if abs(det) < 1e-300:
            raise InputError("singular matrix")
        M = M / cmath.sqrt(det)
        return cls(M[0, 0], M[0, 1], M[1, 0], M[1, 1])

    @classmethod
    def identity(cls) -> "MobiusMap":
        return cls(1, 0, 0, 1)

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    def __call__(self, z):
        if np.ndim(z) > 0:
            return np.array([self(v) for v in np.asarray(z).ravel()], dtype=complex)
        return _dehom(self.matrix @ _hom(z))

    def __matmul__(self, other: "MobiusMap") -> "MobiusMap":
        return MobiusMap.from_matrix(self.matrix @ other.matrix)

    def inverse(self) -> "MobiusMap":
        return MobiusMap(self.d, -self.b, -self.c, self.a)

    def unitarity_defect(self) -> float:
        G = self.matrix.conj().T @ self.matrix
        return float(np.linalg.norm(G - np.trace(G).real / 2 * np.eye(2)))

    def is_unitary(self, tol: float = 1e-8) -> bool:
        return self.unitarity_defect() <= tol

    def to_json(self) -> dict:
        return {k: [getattr(self, k).real, getattr(self, k).imag] for k in "abcd"}


def apply_mobius(state: SymmetricState, M: MobiusMap) -> SymmetricState:
    """The normalized state ``M^{(x) n} |psi>``."""
    return apply_matrix(state, M.matrix)


def su2_from_rotation(R) -> np.ndarray:
    """SU(2) matrix whose action on Bloch vectors is the rotation ``R``."""
    rv = Rotation.from_matrix(np.asarray(R)).as_rotvec() if not isinstance(R, Rotation) else R.as_rotvec()
    ang = float(np.linalg.norm(rv))
    if ang < 1e-300:
        return np.eye(2, dtype=complex)
    nx, ny, nz = rv / ang
    c, s = math.cos(ang / 2), math.sin(ang / 2)
    return np.array([[c - 1j * s * nz, -1j * s * nx - s * ny], [-1j * s * nx + s * ny, c + 1j * s * nz]])


# ---------------------------------------------------------------------------
# invariants
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DCClass:
    """Degeneracy configuration: sorted MP multiplicities."""

    partition: tuple

    def __post_init__(self) -> None:
        part = tuple(sorted((int(p) for p in self.partition), reverse=True))
        if not part or part[-1] <= 0:
            raise InputError("partition entries must be positive")
        object.__setattr__(self, "partition", part)

    @property
    def diversity(self) -> int:
        return len(self.partition)

    @property
    def n(self) -> int:
        return sum(self.partition)

    def __str__(self) -> str:
        return "D_{" + ",".join(str(p) for p in self.partition) + "}"


def dc_class(mps: MPDistribution) -> DCClass:
    return DCClass(tuple(m for _, m in mps.clusters))


def cross_ratio(v1: complex, v2: complex, v3: complex, v4: complex) -> complex:
    """``(v1 - v3)(v2 - v4) / ((v2 - v3)(v1 - v4))`` on the extended plane."""
    pts = [v1, v2, v3, v4]
    for i, j in itertools.combinations(range(4), 2):
        if chordal(pts[i], pts[j]) < 1e-12:
            raise DegenerateQuadruple("cross-ratio needs four distinct points")
    h = [_hom(v) for v in pts]
    num = _bracket(h[0], h[2]) * _bracket(h[1], h[3])
    den = _bracket(h[1], h[2]) * _bracket(h[0], h[3])
    return complex(num / den)


def _ext_inv(z: complex) -> complex:
    if is_inf(z):
        return 0j
    if z == 0:
        return INF
    return 1.0 / z


def cross_ratio_orbit(lam: complex, tol: float = 1e-12) -> list:
    """The (at most six) values a cross-ratio takes under point permutations."""
    if is_inf(lam) or abs(lam) < tol or abs(lam - 1) < tol:
        return [0j, 1 + 0j, INF]
    lam = complex(lam)
    vals = [lam, 1 / lam, 1 - lam, 1 / (1 - lam), lam / (lam - 1), (lam - 1) / lam]
    out: list = []
    for v in vals:
        if all(chordal(v, u) > tol for u in out):
            out.append(v)
    return out


def _check_distinct(pts, what: str) -> None:
    for i, j in itertools.combinations(range(3), 2):
        if chordal(pts[i], pts[j]) < 1e-10:
            raise DegenerateTriple(f"{what} points are not distinct")


def _to_zero_one_inf(p1: complex, p2: complex, p3: complex) -> np.ndarray:
    h1, h2, h3 = _hom(p1), _hom(p2), _hom(p3)
    s, t = _bracket(h2, h3), _bracket(h2, h1)
    return np.array([[s * h1[1], -s * h1[0]], [t * h3[1], -t * h3[0]]])


def mobius_from_triples(src, dst) -> MobiusMap:
    """The unique Moebius map with ``src[i] -> dst[i]`` for i = 0, 1, 2."""
    src, dst = list(src), list(dst)
    if len(src) != 3 or len(dst) != 3:
        raise InputError("need exactly three source and three target points")
    _check_distinct(src, "source")
    _check_distinct(dst, "target")
    H1 = _to_zero_one_inf(*src)
    H2 = _to_zero_one_inf(*dst)
    M = MobiusMap.from_matrix(np.linalg.solve(H2, H1))
    err = max(chordal(M(s), d) for s, d in zip(src, dst))
    if err > 1e-9:
        raise NumericalError(f"Moebius fit misses its targets by {err:.3g}")
    return M


# ---------------------------------------------------------------------------
# equivalence tests
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EquivalenceVerdict:
    relation: str
    witness: MobiusMap | None
    detail: str

    @property
    def equivalent(self) -> bool:
        return self.relation != INEQUIVALENT

    def to_json(self) -> dict:
        return {
            "relation": self.relation,
            "witness": None if self.witness is None else self.witness.to_json(),
            "detail": self.detail,
        }


def _match(M: MobiusMap, r1, m1, r2, m2, tol: float) -> bool:
    used = np.zeros(len(r2), dtype=bool)
    for z, mult in zip(r1, m1):
        img = M(z)
        best, best_j = math.inf, -1
        for j, w in enumerate(r2):
            if used[j] or m2[j] != mult:
                continue
            dist = chordal(img, w)
            if dist < best:
                best, best_j = dist, j
        if best > tol:
            return False
        used[best_j] = True
    return True


def _rotation_witness(v_src: np.ndarray, v_dst: np.ndarray, tol: float):
    """Rotation mapping each ``v_src[i]`` to ``v_dst[i]`` or None."""
    if len(v_src) == 1:
        a, b = v_src[0], v_dst[0]
        axis = np.cross(a, b)
        s, c = np.linalg.norm(axis), float(np.dot(a, b))
        if s < 1e-15:
            if c > 0:
                R = Rotation.identity()
            else:
                perp = np.cross(a, [1.0, 0, 0])
                if np.linalg.norm(perp) < 1e-6:
                    perp = np.cross(a, [0, 1.0, 0])
                R = Rotation.from_rotvec(math.pi * perp / np.linalg.norm(perp))
        else:
            R = Rotation.from_rotvec(axis / s * math.atan2(s, c))
    else:
        if abs(np.dot(v_src[0], v_src[1]) - np.dot(v_dst[0], v_dst[1])) > tol:
            return None
        frames = []
        for u, v in (v_src, v_dst):
            w = np.cross(u, v)
            if np.linalg.norm(w) < 1e-12:  # antipodal pair
                w = np.cross(u, [1.0, 0, 0])
                if np.linalg.norm(w) < 1e-6:
                    w = np.cross(u, [0, 1.0, 0])
            w /= np.linalg.norm(w)
            frames.append(np.column_stack([u, w, np.cross(u, w)]))
        R = Rotation.from_matrix(frames[1] @ frames[0].T)
    if np.max(np.linalg.norm(R.apply(v_src) - v_dst, axis=1)) > tol:
        return None
    return MobiusMap.from_matrix(su2_from_rotation(R))


def _pair_map(a1, b1, a2, b2) -> MobiusMap:
    """A Moebius map with ``a1 -> a2`` and ``b1 -> b2``."""
    def to_zero_inf(a, b):
        ha, hb = _hom(a), _hom(b)
        return np.array([[ha[1], -ha[0]], [hb[1], -hb[0]]])

    return MobiusMap.from_matrix(np.linalg.solve(to_zero_inf(a2, b2), to_zero_inf(a1, b1)))


def _classify(s1: SymmetricState, s2: SymmetricState, tol: float | None) -> EquivalenceVerdict:
    if s1.n != s2.n:
        raise InputError("states have different qubit numbers")
    n = s1.n
    if tol is None:
        tol = 1e-6 * (10 if n >= 12 else 1)
    mp1, mp2 = state_to_mps(s1), state_to_mps(s2)
    dc1, dc2 = dc_class(mp1), dc_class(mp2)
    if dc1 != dc2:
        return EquivalenceVerdict(INEQUIVALENT, None, f"DC mismatch: {dc1} vs {dc2}")
    r1, r2 = mp1.cluster_roots, mp2.cluster_roots
    m1, m2 = mp1.multiplicities, mp2.multiplicities
    v1, v2 = mp1.cluster_vectors(), mp2.cluster_vectors()
    d = len(r1)

    if d <= 2:
        perms = [tuple(range(d))]
        if d == 2 and m1[0] == m1[1]:
            perms.append((1, 0))
        first = None
        for perm in perms:
            R = _rotation_witness(v1[:d], v2[list(perm)], tol)
            if R is not None:
                return EquivalenceVerdict(LU, R, f"diversity {d}: rotation found")
            if first is None:
                first = _pair_map(r1[0], r1[1], r2[perm[0]], r2[perm[1]])
        return EquivalenceVerdict(SLOCC, first, "diversity 2: Moebius map found, no rotation")

    first = None
    for trip in itertools.permutations(range(d), 3):
        if any(m2[j] != m1[i] for i, j in enumerate(trip)):
            continue
        M = mobius_from_triples(r1[:3], [r2[j] for j in trip])
        if not _match(M, r1, m1, r2, m2, tol):
            continue
        if M.is_unitary(tol):
            return EquivalenceVerdict(LU, M, f"rotation maps all {d} clusters")
        if first is None:
            first = M
    if first is not None:
        return EquivalenceVerdict(SLOCC, first, f"Moebius map matches all {d} clusters, none unitary")
    reason = "cross-ratio mismatch" if d == 4 else "exhaustive triple search failed"
    return EquivalenceVerdict(INEQUIVALENT, None, reason)


def slocc_equivalence(s1: SymmetricState, s2: SymmetricState, tol: float | None = None) -> EquivalenceVerdict:
    """Decide whether ``s2 = B^{(x) n} s1`` for some invertible ``B``.

    The verdict distinguishes LU-equivalence (a rotation exists) from pure
    SLOCC-equivalence.  ``tol`` is the chordal matching tolerance (default
    1e-6, ten times larger from n = 12 on).
    """
    return _classify(normalize(s1), normalize(s2), tol)


def lu_equivalence(s1: SymmetricState, s2: SymmetricState, tol: float | None = None) -> EquivalenceVerdict:
    """Like :func:`slocc_equivalence`; LU is reported only with a unitary witness."""
    v = _classify(normalize(s1), normalize(s2), tol)
    if v.relation == LU and v.witness is not None and not v.witness.is_unitary(max(tol or 1e-6, 1e-8)):
        return EquivalenceVerdict(SLOCC, v.witness, v.detail)
    return v


# ---------------------------------------------------------------------------
# decomposition and canonical forms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AffinePart:
    """``z -> A z + B`` with ``A > 0``."""

    A: float
    B: complex

    def __post_init__(self) -> None:
        if not self.A > 0:
            raise InputError("A must be positive")

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.A, self.B], [0.0, 1.0]], dtype=complex)

    def mobius(self) -> MobiusMap:
        return MobiusMap.from_matrix(self.matrix)

    def __matmul__(self, other: "AffinePart") -> "AffinePart":
        return AffinePart(self.A * other.A, self.A * other.B + self.B)


def decompose_slocc(M: MobiusMap) -> tuple:
    """Split ``M`` into a rotation after an affine map: ``M ~ U (A z + B)``."""
    a, b, c, d = M.a, M.b, M.c, M.d
    lam = math.sqrt(abs(a) ** 2 + abs(c) ** 2)
    al, be = a / lam, c / lam
    U = np.array([[al, -np.conj(be)], [be, np.conj(al)]])
    if abs(a) >= abs(c):
        B = (lam ** 2 * b + np.conj(c)) / a
    else:
        B = (lam ** 2 * d - np.conj(a)) / c
    return U, AffinePart(lam ** 2, complex(B))


def rep_state_4q(t: complex) -> SymmetricState:
    """``2 S_0 + t S_1 + S_3 + 2 t S_4``: equatorial triangle plus one MP at root ``1/t``."""
    return normalize(SymmetricState([2.0, t, 0.0, 1.0, 2.0 * t]))


def canonical_rep_4q(state: SymmetricState) -> tuple:
    """Canonical SLOCC representative of a 4-qubit state with four distinct MPs.

    Three MPs go to the equatorial triangle; the remaining one is folded by
    the triangle's symmetries (``R_x(pi)``, ``R_z(2pi/3)``) into
    ``[0, pi/2) x [0, 2pi/3)`` or ``{pi/2} x [0, pi/3]``.

    Returns
    -------
    t : complex
        ``exp(i phi) tan(theta/2)`` of the folded fourth MP.
    rep : SymmetricState
        The representative ``2 S_0 + t S_1 + S_3 + 2 t S_4`` (normalized).
    """
    state = normalize(state)
    if state.n != 4:
        raise WrongDiversity("canonical form needs a 4-qubit state")
    mps = state_to_mps(state)
    if mps.diversity != 4:
        raise WrongDiversity(f"state has diversity {mps.diversity}, need 4")
    r = mps.cluster_roots
    M = mobius_from_triples(r[:3], _TRIANGLE)
    p = root_to_mp(M(r[3]))
    theta, phi = p.theta, p.phi
    if theta > math.pi / 2 + 1e-9:
        theta, phi = math.pi - theta, -phi
    phi = phi % (2 * math.pi / 3)
    if abs(theta - math.pi / 2) <= 1e-9:
        theta = math.pi / 2
        if phi > math.pi / 3:
            phi = 2 * math.pi / 3 - phi
    if phi >= 2 * math.pi / 3 - 1e-12:
        phi = 0.0
    t = cmath.exp(1j * phi) * math.tan(theta / 2)
    return t, rep_state_4q(t)


def rep_state_5q(t: complex) -> SymmetricState:
    """Representative of a 5-qubit SLOCC class with an MP degeneracy.

    ``sqrt(10)(S_0 + t S_5) + t S_2 + S_3 + sqrt(2)(1 + t)(S_1 + S_4)`` has a
    double MP at ``(pi/2, 0)``, single MPs at ``(pi/2, 2pi/3)`` and
    ``(pi/2, 4pi/3)`` and a free MP at root ``1/t``.
    """
    t = complex(t)
    r = abs(t)
    if r > 1 + 1e-12 or (abs(r - 1) <= 1e-12 and not -1e-12 <= cmath.phase(t) <= math.pi + 1e-12):
        raise OutOfRange("t must satisfy |t| < 1, or |t| = 1 with arg t in [0, pi]")
    s10, s2 = math.sqrt(10), math.sqrt(2)
    return normalize(SymmetricState([s10, s2 * (1 + t), t, 1.0, s2 * (1 + t), s10 * t]))


def conjugate_state(state: SymmetricState) -> SymmetricState:
    """Complex conjugate; MPs reflect through the X-Z plane."""
    return normalize(state.conjugate())
