import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from symsphere.errors import InputError, OutOfRange, OutOfSupport
from symsphere.geometric import find_cpps
from symsphere.lmg import (
    LmgParams,
    cpp_latitude,
    ground_state,
    hamiltonian,
    jacobi_eigh,
    log_amplitude_broken,
    log_amplitude_quadrature,
    mp_density,
    mp_support,
)
from symsphere.symstate import dicke, fidelity, state_to_mps


def test_params_validation():
    with pytest.raises(InputError):
        LmgParams(1, 0.5)
    with pytest.raises(InputError):
        LmgParams(4, -1.0)
    with pytest.raises(InputError):
        LmgParams(4, 1.0, gamma=0.0)
    with pytest.raises(InputError):
        LmgParams.from_spin(1.3, 0.5)
    assert LmgParams.from_spin(2.5, 1.0).n == 5


def test_hamiltonian_spectrum_matches_spin_matrices():
    # oracle: build S_y and S_z from ladder operators in the plain basis
    for two_s, h, gam in [(4, 0.3, 1.0), (7, 1.5, 2.0)]:
        s = two_s / 2
        m = s - np.arange(two_s + 1)
        Sp = np.zeros((two_s + 1, two_s + 1))
        for k in range(1, two_s + 1):
            Sp[k - 1, k] = math.sqrt(s * (s + 1) - m[k] * (m[k] + 1))
        Sy = (Sp - Sp.T) / 2j
        H_ref = -(gam / two_s) * (Sy @ Sy) - h * np.diag(m)
        ours = np.linalg.eigvalsh(hamiltonian(LmgParams(two_s, h, gam)))
        assert np.allclose(ours, np.linalg.eigvalsh(H_ref), atol=1e-12)


@given(st.integers(2, 12), st.integers(0, 10**6))
@settings(max_examples=25, deadline=None)
def test_jacobi_matches_lapack(N, seed):
    A = np.random.default_rng(seed).standard_normal((N, N))
    A = A + A.T
    w, V = jacobi_eigh(A)
    assert np.allclose(w, np.linalg.eigvalsh(A), atol=1e-10)
    assert np.allclose(V.T @ V, np.eye(N), atol=1e-10)
    assert np.allclose(A @ V, V * w, atol=1e-9)


def test_jacobi_rejects_nonsymmetric():
    with pytest.raises(InputError):
        jacobi_eigh(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_small_spin_ground_state():
    st_ = ground_state(LmgParams(2, 0.0))
    assert np.allclose(np.abs(st_.coeffs), [1 / math.sqrt(2), 0, 1 / math.sqrt(2)], atol=1e-12)


def test_strong_field_polarizes():
    assert fidelity(ground_state(LmgParams(10, 100.0)), dicke(10, 0)) > 0.9999


@pytest.mark.parametrize("s", [2, 5, 15, 30])
@pytest.mark.parametrize("h", [0.3, 1.0, 2.0])
def test_parity_and_imaginary_circle(s, h):
    st_ = ground_state(LmgParams.from_spin(s, h))
    c = st_.coeffs
    assert np.max(np.abs(c[1::2])) < 1e-10
    assert np.max(np.abs(c.imag)) < 1e-12
    for p in state_to_mps(st_).points:
        if 1e-6 < p.theta < math.pi - 1e-6:
            assert min(abs(p.phi - math.pi / 2), abs(p.phi - 3 * math.pi / 2)) <= 1e-5


def test_cpp_latitude_finite_size_convergence():
    errs = []
    for s in (10, 20, 30):
        rep = find_cpps(ground_state(LmgParams.from_spin(s, 0.5)))
        th = min(min(p.theta, math.pi - p.theta) for p in rep.cpps)
        errs.append(abs(th - math.acos(0.5)))
    assert errs[-1] < 0.1
    assert errs[0] > errs[1] > errs[2]


def test_north_pole_above_transition():
    rep = find_cpps(ground_state(LmgParams.from_spin(30, 2.0)))
    assert rep.cpps[0].theta == pytest.approx(0.0, abs=1e-6)


@pytest.mark.parametrize("h", [0.0, 0.5, 1.0, 1.5, 3.0])
def test_density_normalized(h):
    # a density along the great circle carrying the MPs, theta in [-pi, pi]
    top = mp_support(h)
    val, _ = quad(lambda t: mp_density(h, t), -top, top, epsabs=1e-12, limit=200)
    assert val == pytest.approx(1.0, abs=1e-8)


def test_density_support_errors():
    with pytest.raises(OutOfSupport):
        mp_density(2.0, 3.0)
    with pytest.raises(OutOfRange):
        mp_density(-1.0, 1.0)


def test_logamp_matches_quadrature():
    rng = np.random.default_rng(0)
    for _ in range(20):
        h, th = rng.uniform(0, 1), rng.uniform(0, math.pi)
        assert log_amplitude_broken(h, th) == pytest.approx(log_amplitude_quadrature(h, th), abs=1e-8)


def test_logamp_range_check():
    with pytest.raises(OutOfRange):
        log_amplitude_broken(1.5, 1.0)


def test_cpp_latitude_values():
    assert cpp_latitude(0.0) == pytest.approx(math.pi / 2)
    assert cpp_latitude(1.0) == 0.0
    assert cpp_latitude(2.0) == 0.0
