import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from commclass.algebra import Subalgebra
from commclass.errors import ScaleGuardError
from commclass.field import fq_make
from commclass.grp import gl_enumerate, gl_order, orbit_partition, unit_group
from commclass.linalg import all_vectors, commutator_nullspace, encode
from commclass.witness import witness_even


def _det_mod_p(m, p):
    # Leibniz expansion over exact integers, independent of the elimination code
    n = len(m)
    total = 0
    for perm in itertools.permutations(range(n)):
        sign = 1
        for i in range(n):
            for j in range(i + 1, n):
                if perm[i] > perm[j]:
                    sign = -sign
        term = sign
        for i in range(n):
            term *= m[i][perm[i]]
        total += term
    return total % p


@pytest.mark.parametrize("n,p,expected", [(2, 2, 6), (3, 2, 168), (1, 5, 4), (2, 3, 48)])
def test_gl_order_and_enumeration(n, p, expected):
    assert gl_order(n, p) == expected
    G = gl_enumerate(n, fq_make(p))
    assert G.order == expected
    brute = sum(
        1
        for m in itertools.product(range(p), repeat=n * n)
        if _det_mod_p([m[i * n : (i + 1) * n] for i in range(n)], p)
    )
    assert brute == expected


def test_gl_elements_are_lexicographic_and_inverses_match(F3):
    G = gl_enumerate(2, F3)
    flat = G.elements.reshape(G.order, -1).tolist()
    assert flat == sorted(flat)
    assert np.all(F3.matmul(G.elements, G.inverses) == np.eye(2, dtype=np.int64))


def test_gl_scale_guard():
    with pytest.raises(ScaleGuardError):
        gl_enumerate(7, fq_make(2))  # 2^49 matrices


def test_unit_group_of_full_algebra_is_gl(F2):
    G = unit_group(Subalgebra.full(2, F2))
    assert G.order == 6
    assert np.array_equal(G.elements, gl_enumerate(2, F2).elements)


def test_unit_group_of_scalars(F3):
    assert unit_group(Subalgebra.scalars(3, F3)).order == 2


def test_unit_group_of_witness_centralizer(F2):
    span = commutator_nullspace(witness_even(2, F2).mats)
    z = Subalgebra(span, 4)
    # units are I + (nilpotent) times nonzero scalars: (q-1) q^4
    assert unit_group(z).order == 16


def test_orbits_of_m2_f2(F2):
    G = gl_enumerate(2, F2)
    part = orbit_partition(all_vectors(2, 4).reshape(-1, 2, 2), G)
    assert part.count == 6
    assert sum(part.orbit_sizes) == 16
    for s in part.orbit_sizes:
        assert G.order % s == 0
    assert part.class_of(np.eye(2, dtype=np.int64)) == part.class_of(np.eye(2, dtype=np.int64))
    assert part.class_of([[0, 1], [0, 0]]) == part.class_of([[0, 0], [1, 0]])
    assert part.class_of([[0, 1], [0, 0]]) != part.class_of([[0, 0], [0, 0]])


def test_orbit_representatives_are_minima(F2):
    G = gl_enumerate(2, F2)
    part = orbit_partition(all_vectors(2, 4).reshape(-1, 2, 2), G)
    for label, rep in enumerate(part.representatives):
        members = part.codes[part.labels == label]
        assert encode(rep, 2, 2) == members.min()
        assert part.class_of(rep) == label
    reps = [r.reshape(-1).tolist() for r in part.representatives]
    assert reps == sorted(reps)


def test_scalars_are_singletons(F3):
    G = gl_enumerate(2, F3)
    scalars = np.array([c * np.eye(2, dtype=np.int64) for c in range(3)])
    part = orbit_partition(scalars, G)
    assert part.orbit_sizes == [1, 1, 1]


def test_commuting_pairs_m2_f2(F2):
    G = gl_enumerate(2, F2)
    mats = all_vectors(2, 4).reshape(-1, 2, 2)
    pairs = np.array(
        [(a, b) for a in mats for b in mats if np.array_equal(F2.matmul(a, b), F2.matmul(b, a))]
    )
    part = orbit_partition(pairs, G, action="simconj")
    assert len(pairs) == 88
    assert part.count == 28


def test_not_closed_raises(F2):
    G = gl_enumerate(2, F2)
    with pytest.raises(ValueError):
        orbit_partition(np.array([[[0, 1], [0, 0]]]), G)


def test_action_mismatch_raises(F2):
    G = gl_enumerate(2, F2)
    with pytest.raises(ValueError):
        orbit_partition(np.zeros((1, 2, 2), dtype=np.int64), G, action="simconj")


def test_worker_count_does_not_change_result(F2):
    G = gl_enumerate(3, F2)
    mats = all_vectors(2, 9).reshape(-1, 3, 3)
    serial = orbit_partition(mats, G, workers=1)
    parallel = orbit_partition(mats, G, workers=4, min_parallel=0)
    assert serial.count == parallel.count == 14
    assert np.array_equal(serial.labels, parallel.labels)
    assert np.array_equal(serial.representatives, parallel.representatives)


@settings(max_examples=15, deadline=None)
@given(st.randoms(use_true_random=False))
def test_partition_invariant_under_input_order(rnd):
    F = fq_make(3)
    G = gl_enumerate(2, F)
    mats = all_vectors(3, 4).reshape(-1, 2, 2)
    order = list(range(len(mats)))
    rnd.shuffle(order)
    a = orbit_partition(mats, G)
    b = orbit_partition(mats[order], G)
    assert a.as_sets() == b.as_sets()
    assert np.array_equal(a.representatives, b.representatives)
