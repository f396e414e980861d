"""Named reference states with known entanglement and CPP data.

Algebraic constants are solved for at import time with ``brentq`` rather
than typed in as truncated decimals.  Entries that are only known
numerically keep their published decimals and get looser tolerances.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .errors import InputError, MissingParameter, UnknownName
from .geometric import CppReport, dicke_entanglement, find_cpps
from .slocc import DCClass, dc_class
from .symstate import BlochPoint, SymmetricState, dicke, normalize, state_from_mps, state_to_mps

__all__ = [
    "CatalogEntry",
    "CheckResult",
    "VerifyReport",
    "named_state",
    "catalog_names",
    "verify_entry",
    "gisin_states",
    "GYRO_THETA",
    "SQUARE_PYRAMID_X",
    "SQUARE_PYRAMID_A",
    "ANTIPRISM_X",
    "ANTIPRISM_A",
    "TRIAUG_A",
    "PENTAGONAL_7_X",
    "NINE_MAX_X",
]

EXACT_TOL = 1e-6
DECIMAL_TOL = 1e-5
DECIMAL_CPP_TOL = 1e-8
CPP_TOL = 1e-9


def _root(f: Callable[[float], float], lo: float, hi: float) -> float:
    return float(brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200))


# square pyramid: c_theta of the CPP ring solves 4x^4 + 4x^3 + 4x^2 - x - 1 = 0
SQUARE_PYRAMID_X = _root(lambda x: 4 * x**4 + 4 * x**3 + 4 * x**2 - x - 1, 0.0, 1.0)
SQUARE_PYRAMID_A = math.sqrt(5) / (4 * SQUARE_PYRAMID_X * (1 - SQUARE_PYRAMID_X**2))

# optimal antiprism: x^6 - x^4 + 2 x^2 - 1 = 0
ANTIPRISM_X = _root(lambda x: x**6 - x**4 + 2 * x**2 - 1, 0.0, 1.0)
_ay = math.sqrt(1 - ANTIPRISM_X**2)
ANTIPRISM_A = (1 - ANTIPRISM_X**8 + _ay**8) / (math.sqrt(70) * ANTIPRISM_X**4 * _ay**4)

TRIAUG_A = (1 + 8 * math.sqrt(2)) / (2 * math.sqrt(21))

# CPP latitudes, x = cos^2(theta) of the Bloch polar angle
PENTAGONAL_7_X = _root(lambda x: 49 * x**3 + 165 * x**2 - 205 * x + 55, 0.4, 0.49)
NINE_MAX_X = _root(lambda x: 81 * x**3 + 385 * x**2 - 245 * x + 35, 0.2, 0.3)

# gyroelongated square bipyramid: MP latitude maximizing E_g, found by a
# bounded 1-D search (see tests/test_catalog.py for the re-derivation)
GYRO_THETA = 1.142459793


@dataclass(frozen=True)
class CatalogEntry:
    """A reference state together with what is known about it.

    ``cpp_latitude_poly`` holds coefficients (highest power first) of a
    polynomial in ``x = cos^2 theta`` that every non-polar CPP satisfies.
    """

    name: str
    state: SymmetricState
    params: dict = field(default_factory=dict)
    e_g: float | None = None
    e_g_expr: str | None = None
    exact: bool = True
    cpp_count: float | None = None
    cpp_note: str = ""
    positive: bool = False
    symmetry: str | None = None
    solves: tuple = ()
    dc: DCClass | None = None
    cpp_latitude_poly: tuple | None = None
    cpps_on_mps: bool = False
    members: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.state.n

    @property
    def tolerance(self) -> float:
        return EXACT_TOL if self.exact else DECIMAL_TOL

    @property
    def cpp_tolerance(self) -> float:
        return CPP_TOL if self.exact else DECIMAL_CPP_TOL

    def to_json(self) -> dict:
        from .symstate import state_to_json

        return {
            "name": self.name,
            "params": self.params,
            "n": self.n,
            "state": state_to_json(self.state),
            "e_g": self.e_g,
            "e_g_expr": self.e_g_expr,
            "exact": self.exact,
            "cpp_count": None if self.cpp_count is None or math.isinf(self.cpp_count) else self.cpp_count,
            "cpp_ring": self.cpp_count is not None and math.isinf(self.cpp_count),
            "cpp_note": self.cpp_note,
            "positive": self.positive,
            "symmetry": self.symmetry,
            "solves": list(self.solves),
            "dc_class": str(self.dc) if self.dc else None,
            "members": sorted(self.members),
        }


def _S(c) -> SymmetricState:
    return SymmetricState.from_dicke(np.asarray(c, dtype=complex))


def _sparse(n: int, entries: dict) -> SymmetricState:
    a = np.zeros(n + 1, dtype=complex)
    for k, v in entries.items():
        a[k] = v
    return _S(a)


def _ones(n: int) -> DCClass:
    return DCClass((1,) * n)


def gisin_states() -> dict:
    """States with maximally mixed reductions, keyed by label, with their LU partner."""
    r2, r3, r5 = math.sqrt(2), math.sqrt(3), math.sqrt(5)
    out = {}
    for sgn, tag in ((1, "+"), (-1, "-")):
        out[f"psi3_{tag}1"] = (_S([1, 0, 0, sgn]), "ghz3")
        out[f"psi3_{tag}2"] = (_S([1, sgn * r3, -r3, -sgn]), "ghz3")
        out[f"psi4_{tag}1"] = (_S([-r3, sgn * 2, r2, sgn * 2, -r3]), "tetrahedron")
        out[f"psi6_{tag}1"] = (_S([0, 1, 0, 0, 0, sgn, 0]), "octahedron")
        out[f"psi6_{tag}3"] = (_S([r2, 0, 0, sgn * 1j * r5, 0, 0, r2]), "octahedron")
    out["psi4_2"] = (_S([1, 0, 1j * r2, 0, 1]), "tetrahedron")
    out["psi6_2"] = (_S([-r3, 0, r5, 0, r5, 0, -r3]), "octahedron")
    return dict(sorted(out.items()))


def _gyro(theta: float) -> SymmetricState:
    pts = [BlochPoint(0.0), BlochPoint(math.pi)]
    pts += [BlochPoint(theta, j * math.pi / 2) for j in range(4)]
    pts += [BlochPoint(math.pi - theta, math.pi / 4 + j * math.pi / 2) for j in range(4)]
    return state_from_mps(pts)


def _need(n, name):
    if n is None:
        raise MissingParameter(f"{name} needs n")
    return int(n)


def _build(name: str, n: int | None, k: int | None, param: float | None) -> CatalogEntry:
    r2, r3, r5, r7 = math.sqrt(2), math.sqrt(3), math.sqrt(5), math.sqrt(7)
    if name == "ghz":
        n = _need(n, name)
        if n < 2:
            raise InputError("ghz needs n >= 2")
        return CatalogEntry("ghz", _sparse(n, {0: 1, n: 1}), {"n": n}, 1.0, "1",
                            cpp_count=2, positive=True, symmetry=f"D{n}", dc=_ones(n),
                            solves=("toth", "thomson") if n == 3 else ())
    if name == "w":
        n = _need(n, name)
        if n < 2:
            raise InputError("w needs n >= 2")
        return CatalogEntry("w", dicke(n, 1), {"n": n}, dicke_entanglement(n, 1), f"log2 of W_{n} closed form",
                            cpp_count=math.inf, cpp_note="ring", positive=True, symmetry="SO(2)",
                            dc=DCClass((n - 1, 1)) if n > 1 else None)
    if name == "dicke":
        n = _need(n, name)
        if k is None:
            raise MissingParameter("dicke needs k")
        if not 0 <= k <= n:
            raise InputError("need 0 <= k <= n")
        ring = 0 < k < n
        return CatalogEntry("dicke", dicke(n, k), {"n": n, "k": k}, dicke_entanglement(n, k), "Dicke closed form",
                            cpp_count=math.inf if ring else 1, cpp_note="ring" if ring else "pole",
                            positive=True, symmetry="O(2)" if 2 * k == n else "SO(2)",
                            dc=DCClass(tuple(m for m in (n - k, k) if m)))
    if name == "x_state":
        n = _need(n, name)
        if n < 3:
            raise InputError("x_state needs n >= 3")
        return CatalogEntry("x_state", _sparse(n, {1: math.sqrt(n), n: math.sqrt(n - 2)}), {"n": n},
                            exact=True, positive=True)
    if name == "tetrahedron":
        return CatalogEntry(name, _sparse(4, {0: math.sqrt(1 / 3), 3: math.sqrt(2 / 3)}), {},
                            math.log2(3), "log2(3)", cpp_count=4, positive=True, symmetry="T",
                            solves=("toth", "thomson", "majorana"), dc=_ones(4), cpps_on_mps=True)
    if name == "trigonal_bipyramid":
        return CatalogEntry(name, _sparse(5, {1: 1, 4: 1}), {}, math.log2(16 / 5), "log2(16/5)",
                            cpp_count=3, positive=True, symmetry="D3", solves=("toth", "thomson"), dc=_ones(5))
    if name == "square_pyramid":
        return CatalogEntry(name, _sparse(5, {0: 1, 4: SQUARE_PYRAMID_A}), {"A": SQUARE_PYRAMID_A},
                            1.742268948, "approx 1.742268948", cpp_count=5, positive=True,
                            solves=("majorana",), dc=_ones(5))
    if name == "octahedron":
        return CatalogEntry(name, _sparse(6, {1: 1, 5: 1}), {}, math.log2(4.5), "log2(9/2)",
                            cpp_count=8, positive=True, symmetry="O",
                            solves=("toth", "thomson", "majorana"), dc=_ones(6))
    if name == "pentagonal_dipyramid_7":
        return CatalogEntry(name, _sparse(7, {1: 1, 6: 1}), {}, 2.298691396, "approx 2.298691396",
                            cpp_count=10, positive=True, symmetry="D5", solves=("thomson", "majorana"),
                            dc=_ones(7), cpp_latitude_poly=(49, 165, -205, 55))
    if name == "cube":
        return CatalogEntry(name, _sparse(8, {0: r5, 4: math.sqrt(14), 8: r5}), {}, math.log2(24 / 5),
                            "log2(24/5)", cpp_count=6, positive=True, symmetry="O", dc=_ones(8))
    if name == "asym_pentagonal_dipyramid_8":
        return CatalogEntry(name, _sparse(8, {1: 0.671588032, 6: 0.740924770}), {}, 2.445210159,
                            "approx 2.445210159", exact=False, cpp_count=10, positive=True,
                            solves=("majorana",), dc=DCClass((2, 1, 1, 1, 1, 1, 1)))
    if name == "antiprism_8":
        A = ANTIPRISM_A if param is None else float(param)
        ref = 2.436587205 if param is None else None
        return CatalogEntry(name, _sparse(8, {0: 1, 4: A, 8: -1}), {"A": A}, ref,
                            "approx 2.436587205" if ref else None, cpp_count=10 if param is None else None,
                            dc=_ones(8))
    if name == "nine_max":
        return CatalogEntry(name, _sparse(9, {2: 1, 7: 1}), {}, 2.553960277, "approx 2.553960277",
                            cpp_count=10, positive=True, symmetry="D5", solves=("majorana",),
                            dc=DCClass((2, 2, 1, 1, 1, 1, 1)), cpp_latitude_poly=(81, 385, -245, 35))
    if name == "triaugmented_prism_9":
        return CatalogEntry(name, _sparse(9, {0: 1, 3: -TRIAUG_A, 6: -TRIAUG_A, 9: 1}), {"A": TRIAUG_A},
                            math.log2((213 + 16 * r2) / 42), "log2((213 + 16 sqrt2) / 42)", cpp_count=5,
                            dc=_ones(9))
    if name == "gyro_bipyramid_10":
        th = GYRO_THETA if param is None else float(param)
        ref = 2.737432003 if param is None else None
        return CatalogEntry(name, _gyro(th), {"theta": th}, ref, "approx 2.737432003" if ref else None,
                            exact=False, cpp_count=8 if param is None else None,
                            solves=("majorana",), dc=_ones(10))
    if name == "ten_pos":
        return CatalogEntry(name, _sparse(10, {0: 0.395053091, 4: 0.678420822, 9: 0.619417665}), {},
                            2.679763092, "approx 2.679763092", exact=False, cpp_count=3, positive=True)
    if name == "rot_pos_10":
        return CatalogEntry(name, _sparse(10, {2: 1, 8: 1}), {}, math.log2(32 / 5), "log2(32/5)",
                            cpp_count=12, positive=True, symmetry="D6")
    if name == "eleven_max":
        return CatalogEntry(name, _sparse(11, {0: 0.376611967, 5: 0.715661256, 10: -0.588211181}), {},
                            2.817698505, "approx 2.817698505", exact=False, cpp_count=11, solves=("majorana",))
    if name == "eleven_pos":
        return CatalogEntry(name, _sparse(11, {1: 0.550982113, 5: 0.578058577, 10: 0.601886195}), {},
                            2.773622669, "approx 2.773622669", exact=False, cpp_count=2, positive=True)
    if name == "toth_11":
        return CatalogEntry(name, _sparse(11, {0: math.sqrt(462), 5: 11, 10: -math.sqrt(42)}), {},
                            math.log2(625 / 462), "log2(625/462)", solves=("toth",))
    if name == "icosahedron":
        return CatalogEntry(name, _sparse(12, {1: r7, 6: -math.sqrt(11), 11: -r7}), {}, math.log2(243 / 28),
                            "log2(243/28)", cpp_count=20, symmetry="Y",
                            solves=("toth", "thomson", "majorana"), dc=_ones(12))
    if name == "twelve_pos":
        return CatalogEntry(name, _sparse(12, {1: 0.555046977, 6: 0.619552827, 11: 0.555046977}), {},
                            2.993524700, "approx 2.993524700", exact=False, cpp_count=15, positive=True)
    if name == "dodecahedron":
        c = {0: math.sqrt(187), 5: math.sqrt(627), 10: math.sqrt(247), 15: -math.sqrt(627), 20: math.sqrt(187)}
        return CatalogEntry(name, _sparse(20, c), {}, math.log2(1875 / 187), "log2(1875/187)",
                            cpp_count=12, symmetry="Y", dc=_ones(20))
    if name == "cluster4_equiv_fixture":
        members = gisin_states()
        return CatalogEntry(name, members["psi4_2"][0], {}, math.log2(3), "log2(3)", cpp_count=4,
                            members=members)
    raise UnknownName(name)


_FIXED = (
    "tetrahedron", "trigonal_bipyramid", "square_pyramid", "octahedron", "pentagonal_dipyramid_7",
    "cube", "asym_pentagonal_dipyramid_8", "antiprism_8", "nine_max", "triaugmented_prism_9",
    "gyro_bipyramid_10", "ten_pos", "rot_pos_10", "eleven_max", "eleven_pos", "toth_11",
    "icosahedron", "twelve_pos", "dodecahedron", "cluster4_equiv_fixture",
)
_PARAMETRIC = ("ghz", "w", "dicke", "x_state")


def catalog_names() -> list:
    """Parametric families first, then fixed states."""
    return list(_PARAMETRIC) + list(_FIXED)


def named_state(name: str, n: int | None = None, k: int | None = None, param: float | None = None) -> CatalogEntry:
    """Look up a catalog entry.

    Parameters
    ----------
    name : str
        One of :func:`catalog_names`.  ``"dicke(n,k)"`` style strings are
        accepted as well, as are compact names such as ``"ghz3"``.
    n, k : int, optional
        Required by the parametric families.
    param : float, optional
        Overrides the free parameter of ``antiprism_8`` (A) and
        ``gyro_bipyramid_10`` (theta); reference values are then dropped.
    """
    key = name.strip().lower()
    if "(" in key and key.endswith(")"):
        base, args = key[:-1].split("(", 1)
        vals = [v for v in args.split(",") if v.strip()]
        key = base.strip()
        if key in ("ghz", "w", "x_state") and vals:
            n = int(vals[0])
        elif key == "dicke" and len(vals) == 2:
            n, k = int(vals[0]), int(vals[1])
        elif key in ("antiprism_8", "gyro_bipyramid_10") and vals:
            param = float(vals[0])
    m = re.fullmatch(r"(ghz|w|x_state)(\d+)", key)
    if m:  # compact form such as "ghz3"
        key, n = m.group(1), int(m.group(2))
    if key not in _PARAMETRIC and key not in _FIXED:
        raise UnknownName(name)
    return _build(key, n, k, param)


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CheckResult:
    field: str
    passed: bool
    value: object
    reference: object
    tol: float | None = None

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        tol = "" if self.tol is None else f" (tol {self.tol:g})"
        return f"{tag} {self.field}: {self.value} vs {self.reference}{tol}"


@dataclass(frozen=True)
class VerifyReport:
    name: str
    checks: tuple
    report: CppReport

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def lines(self) -> list:
        return [f"{self.name}: " + c.line() for c in self.checks]


def _count_within(report: CppReport, rel: float) -> float:
    if report.ring is not None:
        return math.inf
    return sum(1 for _, v in report.local_maxima if v >= report.g_max * (1 - rel))


def verify_entry(entry: CatalogEntry, grid_deg: float = 1.0) -> VerifyReport:
    """Recompute MPs, CPPs, E_g and the DC class and compare with the stored data."""
    checks = []
    st = entry.state
    checks.append(CheckResult("normalized", abs(st.norm - 1) < 1e-12, st.norm, 1.0, 1e-12))
    rep = find_cpps(st, grid_deg=grid_deg)
    if entry.e_g is not None:
        checks.append(CheckResult("e_g", abs(rep.e_g - entry.e_g) <= entry.tolerance, rep.e_g, entry.e_g,
                                  entry.tolerance))
        bound = math.log2(entry.n + 1)
        checks.append(CheckResult("e_g_bound", entry.e_g <= bound, entry.e_g, bound))
    count = _count_within(rep, entry.cpp_tolerance)
    if entry.cpp_count is not None:
        checks.append(CheckResult("cpp_count", count == entry.cpp_count, count, entry.cpp_count))
    if entry.positive:
        pos = bool(np.all(np.abs(st.dephase().coeffs.imag) <= 1e-12) and np.all(st.dephase().coeffs.real >= -1e-12))
        checks.append(CheckResult("positive", pos, pos, True))
        if st.support().size > 1:
            checks.append(CheckResult("cpp_count_bound", count <= 2 * entry.n - 4, count, 2 * entry.n - 4))
    if entry.dc is not None:
        got = dc_class(state_to_mps(st))
        checks.append(CheckResult("dc_class", got == entry.dc, str(got), str(entry.dc)))
    if entry.cpp_latitude_poly is not None:
        poly = np.asarray(entry.cpp_latitude_poly, dtype=float)
        inner = [p for p in rep.cpps if 1e-6 < p.theta < math.pi - 1e-6]
        worst = max((abs(np.polyval(poly, math.cos(p.theta) ** 2)) / np.abs(poly).sum() for p in inner), default=math.inf)
        checks.append(CheckResult("cpp_latitude", worst <= 1e-9, worst, 0.0, 1e-9))
    if entry.cpps_on_mps:
        mps = state_to_mps(st).vectors()
        worst = max(min(np.linalg.norm(p.vector() - m) for m in mps) for p in rep.cpps)
        checks.append(CheckResult("cpps_on_mps", worst <= 1e-6, worst, 0.0, 1e-6))
    return VerifyReport(entry.name, tuple(checks), rep)
