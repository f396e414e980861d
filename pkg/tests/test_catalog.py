import math

import numpy as np
import pytest

import oracles
from symsphere.catalog import (
    ANTIPRISM_X,
    NINE_MAX_X,
    PENTAGONAL_7_X,
    SQUARE_PYRAMID_X,
    catalog_names,
    gisin_states,
    named_state,
    verify_entry,
)
from symsphere.errors import MissingParameter, UnknownName
from symsphere.geometric import dicke_entanglement
from symsphere.slocc import DCClass, dc_class
from symsphere.symstate import state_to_mps

FIXED = [n for n in catalog_names() if n not in ("ghz", "w", "dicke", "x_state")]


@pytest.mark.parametrize("name", FIXED)
def test_catalog_entry_verifies(name):
    rep = verify_entry(named_state(name))
    assert rep.passed, "\n".join(rep.lines())


@pytest.mark.parametrize("name", ["tetrahedron", "octahedron", "cube"])
def test_exact_entries_against_brute_force(name):
    e = named_state(name)
    assert oracles.geometric_measure(e.state.coeffs) == pytest.approx(e.e_g, abs=1e-7)


@pytest.mark.parametrize("n", [3, 5, 8])
def test_parametric_families(n):
    assert named_state("ghz", n=n).e_g == pytest.approx(1.0)
    assert named_state(f"ghz{n}").n == n
    assert named_state(f"dicke({n},1)").e_g == pytest.approx(dicke_entanglement(n, 1))
    assert verify_entry(named_state("w", n=n)).passed


def test_lookup_errors():
    with pytest.raises(UnknownName):
        named_state("klein_bottle")
    with pytest.raises(MissingParameter):
        named_state("ghz")


def test_algebraic_roots_solve_their_polynomials():
    x = SQUARE_PYRAMID_X
    assert abs(4 * x**4 + 4 * x**3 + 4 * x**2 - x - 1) < 1e-14
    x = ANTIPRISM_X
    assert abs(x**6 - x**4 + 2 * x**2 - 1) < 1e-14
    x = NINE_MAX_X
    assert abs(81 * x**3 + 385 * x**2 - 245 * x + 35) < 1e-11
    assert 0.4 < PENTAGONAL_7_X < 0.49


def test_icosahedron_mps_form_icosahedron():
    e = named_state("icosahedron")
    P = state_to_mps(e.state).vectors()
    assert np.allclose(oracles.chords(P), oracles.chords(oracles.icosahedron()), atol=1e-9)


def test_asym_8_degeneracy():
    assert dc_class(state_to_mps(named_state("asym_pentagonal_dipyramid_8").state)) == DCClass((2, 1, 1, 1, 1, 1, 1))


def test_positive_flags_real_nonnegative():
    for name in FIXED:
        e = named_state(name)
        if e.positive:
            c = e.state.coeffs
            assert np.all(np.abs(c.imag) < 1e-12) and np.all(c.real > -1e-12), name


def test_bounds_hold():
    for name in FIXED:
        e = named_state(name)
        if e.e_g is not None:
            assert e.e_g < math.log2(e.n + 1)


def test_json_is_serializable():
    import json

    for name in FIXED:
        json.dumps(named_state(name).to_json(), allow_nan=False)


def test_gisin_fixture_members():
    fx = named_state("cluster4_equiv_fixture")
    assert set(fx.members) == set(gisin_states())
