"""Acceptance suite: one PASS/FAIL line per criterion.

Run with pytest (lines appear in the terminal summary) or directly with
``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import functools
import math
import time
from dataclasses import dataclass

import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from symsphere.catalog import gisin_states, named_state
from symsphere.classical import (
    optimize_thomson,
    optimize_toth,
    pointset_to_state,
    same_structure,
    toth_objective,
)
from symsphere.extremal import parse_family, search_max_entangled
from symsphere.geometric import find_cpps, integral_check, span_check, volume_check
from symsphere.lmg import LmgParams, ground_state, log_amplitude_broken, log_amplitude_quadrature
from symsphere.slocc import (
    INEQUIVALENT,
    LU,
    apply_mobius,
    canonical_rep_4q,
    cross_ratio,
    cross_ratio_orbit,
    slocc_equivalence,
)
from symsphere.symstate import (
    BlochPoint,
    SymmetricState,
    apply_matrix,
    dicke,
    fidelity,
    majorana_polynomial,
    normalize,
    random_state,
    state_from_mps,
    state_to_mps,
)


@dataclass
class Check:
    label: str
    ok: bool
    detail: str = ""


CRITERIA: dict = {}


def criterion(num: int, title: str):
    def wrap(fn):
        CRITERIA[num] = (title, fn)
        return fn
    return wrap


def _close(label, got, ref, tol):
    return Check(label, abs(got - ref) <= tol, f"{got:.10f} vs {ref:.10f}")


def _ghz(n):
    c = np.zeros(n + 1)
    c[0] = c[-1] = 1
    return normalize(SymmetricState(c))


def _eg(state, grid=1.0):
    return find_cpps(state, grid_deg=grid).e_g


def _well_conditioned(rng, cond=20.0):
    while True:
        B = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        if np.linalg.cond(B) < cond:
            return B


def _random_points(n, rng, min_chord=0.1):
    while True:
        P = rng.standard_normal((n, 3))
        P /= np.linalg.norm(P, axis=1, keepdims=True)
        d = np.linalg.norm(P[:, None] - P[None], axis=-1) + 10 * np.eye(n)
        if d.min() >= min_chord:
            return [BlochPoint.from_vector(v) for v in P]


def _chords(P):
    P = np.asarray(P)
    i, j = np.triu_indices(len(P), 1)
    return np.sort(np.linalg.norm(P[i] - P[j], axis=1))


def _count(rep, rel=1e-8):
    return sum(1 for _, v in rep.local_maxima if v >= rep.g_max * (1 - rel))


@functools.lru_cache(maxsize=None)
def _toth(n):
    return optimize_toth(n, restarts=50, seed=0)


@functools.lru_cache(maxsize=None)
def _thomson(n):
    return optimize_thomson(n, restarts=50, seed=0)


# ---------------------------------------------------------------------------

@criterion(1, "exact-value table (1e-6)")
def c01():
    out = [_close(f"GHZ_{n}", _eg(_ghz(n)), 1.0, 1e-6) for n in range(3, 13)]
    out.append(_close("W_3", _eg(dicke(3, 1)), math.log2(9 / 4), 1e-6))
    out.append(_close("S_{4,2}", _eg(dicke(4, 2)), math.log2(8 / 3), 1e-6))
    exact = {
        "tetrahedron": math.log2(3),
        "trigonal_bipyramid": math.log2(16 / 5),
        "octahedron": math.log2(9 / 2),
        "cube": math.log2(24 / 5),
        "rot_pos_10": math.log2(32 / 5),
        "icosahedron": math.log2(243 / 28),
        "dodecahedron": math.log2(1875 / 187),
        "toth_11": math.log2(625 / 462),
    }
    out += [_close(k, _eg(named_state(k).state), v, 1e-6) for k, v in exact.items()]
    return out


@criterion(2, "algebraic-root states (1e-6)")
def c02():
    ref = {
        "square_pyramid": 1.742268948,
        "pentagonal_dipyramid_7": 2.298691396,
        "asym_pentagonal_dipyramid_8": 2.445210159,
        "nine_max": 2.553960277,
        "antiprism_8": 2.436587205,
    }
    return [_close(k, _eg(named_state(k).state), v, 1e-6) for k, v in ref.items()]


@criterion(3, "decimal-reference states (1e-5)")
def c03():
    ref = {
        "ten_pos": 2.679763092,
        "gyro_bipyramid_10": 2.737432003,
        "eleven_max": 2.817698505,
        "eleven_pos": 2.773622669,
        "twelve_pos": 2.993524700,
    }
    return [_close(k, _eg(named_state(k).state), v, 1e-5) for k, v in ref.items()]


@criterion(4, "classical-solution entanglement (1e-4)")
def c04():
    out = []
    for n, v in {8: 2.08418, 9: 2.434193, 10: 2.731633, 11: 2.482570}.items():
        out.append(_close(f"Thomson-{n}", _eg(pointset_to_state(_thomson(n))), v, 1e-4))
    for n, v in {7: 1.692798, 8: 1.711525, 9: 2.150714, 10: 1.958874}.items():
        out.append(_close(f"Toth-{n}", _eg(pointset_to_state(_toth(n))), v, 1e-4))
    return out


@criterion(5, "CPP counts and the 2n-4 bound")
def c05():
    ref = {
        "tetrahedron": 4, "square_pyramid": 5, "octahedron": 8, "pentagonal_dipyramid_7": 10,
        "asym_pentagonal_dipyramid_8": 10, "nine_max": 10, "icosahedron": 20, "dodecahedron": 12,
    }
    out = []
    for k, v in ref.items():
        e = named_state(k)
        c = _count(find_cpps(e.state), e.cpp_tolerance)
        out.append(Check(k, c == v and c <= 2 * e.n - 4, f"{c} CPPs (expected {v}, bound {2 * e.n - 4})"))
    return out


@criterion(6, "sphere integral and volume identities (rel 1e-6)")
def c06():
    rng = np.random.default_rng(6)
    worst_i = worst_v = 0.0
    for n in range(2, 11):
        for _ in range(100):
            s = random_state(n, rng)
            worst_i = max(worst_i, abs(integral_check(s) / (4 * math.pi / (n + 1)) - 1))
            worst_v = max(worst_v, abs(volume_check(s) / (4 * math.pi / (3 * (n + 1))) - 1))
    return [Check("integral", worst_i <= 1e-6, f"max rel err {worst_i:.2e}"),
            Check("volume", worst_v <= 1e-6, f"max rel err {worst_v:.2e}")]


@criterion(7, "MP roundtrip fidelity >= 1 - 1e-10")
def c07():
    rng = np.random.default_rng(7)
    out = []
    for n in range(3, 13):
        worst = 0.0
        for _ in range(500):
            s = state_from_mps(_random_points(n, rng))
            t = state_from_mps(list(state_to_mps(s).points))
            worst = max(worst, 1 - fidelity(s, t))
        out.append(Check(f"n={n}", worst <= 1e-10, f"max infidelity {worst:.1e}"))
    return out


@criterion(8, "SLOCC suite")
def c08():
    rng = np.random.default_rng(8)
    out = []
    ok = True
    for _ in range(10):
        a, b = rng.uniform(0.1, 1, 2)
        ok &= slocc_equivalence(_ghz(3), normalize(SymmetricState([a, 0, 0, b]))).equivalent
    out.append(Check("GHZ_3 ~ a S_0 + b S_3", ok))
    v = slocc_equivalence(_ghz(4), named_state("tetrahedron").state)
    out.append(Check("GHZ_4 vs tetrahedron", v.relation == INEQUIVALENT, v.detail))
    bad = [k for k, (s, partner) in gisin_states().items()
           if slocc_equivalence(s, named_state(partner).state).relation != LU]
    out.append(Check(f"Gisin states LU ({len(gisin_states())})", not bad, ", ".join(bad)))

    worst = 0.0
    for _ in range(1000):
        z = [complex(*rng.standard_normal(2)) for _ in range(4)]
        B = _well_conditioned(rng)
        if min(abs(z[i] - z[j]) for i in range(4) for j in range(i)) < 0.05:
            z[0] += 1.0
        w = [(B[0, 0] * x + B[0, 1]) / (B[1, 0] * x + B[1, 1]) for x in z]
        lam = cross_ratio(*z)
        worst = max(worst, abs(cross_ratio(*w) - lam) / max(1.0, abs(lam)))
    out.append(Check("cross-ratio invariance (1000)", worst <= 1e-9, f"max rel dev {worst:.1e}"))

    for n in (4, 5, 6):
        fails = 0
        for _ in range(200):
            s = random_state(n, rng)
            t = apply_matrix(s, _well_conditioned(rng))
            v = slocc_equivalence(s, t)
            if not v.equivalent or fidelity(apply_mobius(s, v.witness), t) < 1 - 1e-8:
                fails += 1
        out.append(Check(f"constructed pairs n={n}", fails == 0, f"{fails}/200 failures"))
    return out


@criterion(9, "canonical 4-qubit representative")
def c09():
    rng = np.random.default_rng(9)
    worst = 0.0
    for _ in range(200):
        s = random_state(4, rng)
        t1, _ = canonical_rep_4q(s)
        t2, _ = canonical_rep_4q(apply_matrix(s, _well_conditioned(rng)))
        worst = max(worst, abs(t1 - t2))
    same = Check("equivalent pairs agree", worst <= 1e-8, f"max |dt| {worst:.1e}")
    collisions = tested = 0
    while tested < 200:
        s1, s2 = random_state(4, rng), random_state(4, rng)
        r1 = majorana_polynomial(s1).roots()
        r2 = majorana_polynomial(s2).roots()
        lam2 = cross_ratio(*r2)
        if min(abs(lam2 - x) for x in cross_ratio_orbit(cross_ratio(*r1))) < 1e-6:
            continue
        tested += 1
        if abs(canonical_rep_4q(s1)[0] - canonical_rep_4q(s2)[0]) <= 1e-8:
            collisions += 1
    return [same, Check("inequivalent pairs differ", collisions == 0, f"{collisions}/200 collisions")]


@criterion(10, "classical optimizers: Toth = Thomson structure, Toth-8 chord")
def c10():
    out = []
    for n in (2, 3, 4, 6, 12):
        ok = same_structure(_toth(n), _thomson(n), tol=1e-6)
        out.append(Check(f"n={n}", ok))
    s_min = math.acos((math.sqrt(8) - 1) / 7)
    out.append(_close("Toth-8 min chord", toth_objective(_toth(8)), 2 * math.sin(s_min / 2), 1e-6))
    return out


@criterion(11, "positive-family search (1e-3, < 2 min each)")
def c11():
    ref = {4: math.log2(3), 5: 1.742268948, 6: math.log2(4.5), 7: 2.298691396}
    out = []
    for n, v in ref.items():
        t0 = time.perf_counter()
        e = search_max_entangled(parse_family("positive", n)).e_g
        dt = time.perf_counter() - t0
        out.append(Check(f"n={n}", abs(e - v) <= 1e-3 and dt < 120, f"{e:.9f} vs {v:.9f} in {dt:.1f}s"))
    return out


@criterion(12, "LMG ground states and continuum formulas")
def c12():
    out = []
    odd = dev = 0.0
    for h in (0.3, 0.5, 1.0, 2.0):
        st = ground_state(LmgParams.from_spin(30, h))
        odd = max(odd, float(np.max(np.abs(st.coeffs[1::2]))))
        for p in state_to_mps(st).points:
            if 1e-6 < p.theta < math.pi - 1e-6:
                dev = max(dev, min(abs(p.phi - math.pi / 2), abs(p.phi - 3 * math.pi / 2)))
    out.append(Check("odd coefficients < 1e-10", odd < 1e-10, f"max {odd:.1e}"))
    out.append(Check("MPs on imaginary circle (1e-5)", dev <= 1e-5, f"max dev {dev:.1e}"))
    rep = find_cpps(ground_state(LmgParams.from_spin(30, 0.5)))
    lat = min(min(p.theta, math.pi - p.theta) for p in rep.cpps)
    out.append(_close("CPP latitude h=0.5", lat, math.acos(0.5), 0.1))
    rep = find_cpps(ground_state(LmgParams.from_spin(30, 2.0)))
    out.append(Check("h=2 CPP at north pole", rep.count == 1 and rep.cpps[0].theta <= 1e-6,
                     f"theta {rep.cpps[0].theta:.1e}"))
    rng = np.random.default_rng(12)
    worst = 0.0
    for _ in range(20):
        h, th = rng.uniform(0, 1), rng.uniform(0, math.pi)
        worst = max(worst, abs(log_amplitude_broken(h, th) - log_amplitude_quadrature(h, th)))
    out.append(Check("closed form vs quadrature (1e-8)", worst <= 1e-8, f"max dev {worst:.1e}"))
    return out


@criterion(13, "dual polyhedra: CPP/MP interchange")
def c13():
    def cpp_vectors(name):
        e = named_state(name)
        rep = find_cpps(e.state)
        return np.array([p.vector() for p, v in rep.local_maxima if v >= rep.g_max * (1 - 1e-8)])

    def mp_vectors(name):
        return state_to_mps(named_state(name).state).vectors()

    out = []
    for a, b in (("icosahedron", "dodecahedron"), ("dodecahedron", "icosahedron"), ("tetrahedron", "tetrahedron")):
        ca, mb = _chords(cpp_vectors(a)), _chords(mp_vectors(b))
        ok = ca.shape == mb.shape and float(np.max(np.abs(ca - mb))) <= 1e-6
        out.append(Check(f"CPPs({a}) ~ MPs({b})", ok, f"{len(ca)} vs {len(mb)} chords"))
    return out


@criterion(14, "property suite")
def c14():
    rng = np.random.default_rng(14)
    worst_dom, bound_ok = math.inf, True
    for _ in range(500):
        n = int(rng.integers(2, 9))
        s = random_state(n, rng)
        e, ed = _eg(s, 2.0), _eg(normalize(s.dephase()), 2.0)
        worst_dom = min(worst_dom, e - ed)
        bound_ok &= e <= math.log2(n + 1) and ed <= math.log2(n + 1)
    out = [Check("E_g(s) >= E_g(dephase s) - 1e-6 (500)", worst_dom >= -1e-6, f"min gap {worst_dom:.2e}"),
           Check("E_g <= log2(n+1)", bound_ok)]
    residual = {}
    # conjectured maxima over all symmetric states, one per n = 4..12; the positive-only
    # optima for n = 10, 11 are not maximal and carry too few CPPs to span the state
    for name in ("tetrahedron", "square_pyramid", "octahedron", "pentagonal_dipyramid_7",
                 "asym_pentagonal_dipyramid_8", "nine_max", "gyro_bipyramid_10", "eleven_max",
                 "icosahedron"):
        e = named_state(name)
        rep = find_cpps(e.state)
        pts = [p for p, v in rep.local_maxima if v >= rep.g_max * (1 - e.cpp_tolerance)]
        residual[name] = span_check(e.state, pts)
        bound_ok &= rep.e_g <= math.log2(e.n + 1)
    worst = max(residual, key=residual.get)
    out.append(Check("span_check <= 1e-6 on maximal candidates", residual[worst] <= 1e-6,
                     f"worst {worst} {residual[worst]:.1e}"))
    return out


# ---------------------------------------------------------------------------

def evaluate(num: int) -> tuple:
    title, fn = CRITERIA[num]
    t0 = time.perf_counter()
    checks = fn()
    dt = time.perf_counter() - t0
    failed = [c for c in checks if not c.ok]
    tag = "PASS" if not failed else "FAIL"
    summary = f"{len(checks) - len(failed)}/{len(checks)} checks"
    if failed:
        summary += "; failing: " + "; ".join(f"{c.label} ({c.detail})" if c.detail else c.label for c in failed)
    return f"{tag} [{num}] {title}: {summary} [{dt:.1f}s]", failed, checks


@pytest.mark.parametrize("num", sorted(CRITERIA))
def test_criterion(num, acceptance_log):
    line, failed, checks = evaluate(num)
    acceptance_log.append(line)
    print(line)
    for c in checks:
        print(f"    {'ok  ' if c.ok else 'FAIL'} {c.label} {c.detail}")
    assert not failed, line


if __name__ == "__main__":
    import sys

    for k in [int(a) for a in sys.argv[1:]] or sorted(CRITERIA):
        print(evaluate(k)[0], flush=True)
