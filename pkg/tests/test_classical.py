import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from symsphere.classical import (
    PointSet,
    distance_multiset,
    optimize_thomson,
    optimize_toth,
    pointset_to_state,
    same_structure,
    state_to_pointset,
    thomson_energy,
    toth_objective,
)
from symsphere.errors import CoincidentPoints, InputError
from symsphere.symstate import fidelity

# reference Coulomb energies of the Thomson optima
THOMSON = {2: 0.5, 3: math.sqrt(3), 4: 3.674234614, 5: 6.474691495, 6: 9.985281374, 12: 49.165253058}


def test_pointset_validation():
    with pytest.raises(InputError):
        PointSet(np.zeros((3, 2)))
    with pytest.raises(InputError):
        PointSet(np.array([[1.0, 0, 0]]))
    with pytest.raises(InputError):
        PointSet(np.array([[2.0, 0, 0], [1.0, 0, 0]]))
    ps = PointSet.from_vectors([[2.0, 0, 0], [0, 0, -3.0]])
    assert ps.n == 2


def test_energy_and_objective_against_oracle():
    P = oracles.icosahedron()
    ps = PointSet(P)
    assert thomson_energy(ps) == pytest.approx(oracles.coulomb_energy(P), rel=1e-13)
    assert toth_objective(ps) == pytest.approx(oracles.min_chord(P), rel=1e-13)


def test_coincident_points_rejected():
    with pytest.raises(CoincidentPoints):
        thomson_energy(PointSet(np.array([[1.0, 0, 0], [1.0, 0, 0], [0, 1.0, 0]])))


@pytest.mark.parametrize("n", sorted(THOMSON))
def test_thomson_small(n):
    ps = optimize_thomson(n, restarts=10, seed=1)
    assert thomson_energy(ps) == pytest.approx(THOMSON[n], abs=1e-8)


def test_thomson_deterministic():
    a = optimize_thomson(7, restarts=5, seed=3)
    b = optimize_thomson(7, restarts=5, seed=3)
    assert np.array_equal(a.points, b.points)


@pytest.mark.parametrize("n,chord", [(4, math.sqrt(8 / 3)), (6, math.sqrt(2)),
                                     (12, oracles.min_chord(oracles.icosahedron()))])
def test_toth_known(n, chord):
    ps = optimize_toth(n, restarts=5, seed=0)
    assert toth_objective(ps) == pytest.approx(chord, abs=1e-8)


def test_pointset_state_roundtrip():
    ps = PointSet(oracles.tetrahedron())
    s = pointset_to_state(ps)
    back = state_to_pointset(s)
    assert same_structure(ps, back)
    assert fidelity(pointset_to_state(back), s) == pytest.approx(1.0, abs=1e-12)


def test_distance_multiset_rotation_invariant():
    from scipy.spatial.transform import Rotation

    P = oracles.dodecahedron()
    R = Rotation.random(random_state=1).as_matrix()
    assert same_structure(PointSet(P), PointSet(P).rotated(R))
    assert np.allclose(distance_multiset(PointSet(P)), oracles.chords(P))


def test_same_structure_distinguishes():
    assert not same_structure(PointSet(oracles.icosahedron()), PointSet(oracles.dodecahedron()))


@given(st.integers(0, 10**6))
@settings(max_examples=20, deadline=None)
def test_json_roundtrip(seed):
    P = np.random.default_rng(seed).standard_normal((5, 3))
    ps = PointSet.from_vectors(P)
    back = PointSet.from_json(json.loads(json.dumps(ps.to_json())))
    assert np.array_equal(back.points, ps.points)
