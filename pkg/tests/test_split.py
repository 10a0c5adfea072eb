import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toriclab.canonical import build_scaffold, canonicalize
from toriclab.lattice import Cone, ConeRegion, Complement, Plaquette, Vertex, Window, path_between, rectangle_loop
from toriclab.pauli import IDENTITY, multiply, plaquette_op, star_op, string_from_path
from toriclab.split import (
    MembershipError,
    TensorLabel,
    conjugation_check,
    conjugation_suite,
    factorization_census,
    loop_family,
    mirror_conjugation_check,
    random_label,
    tensor_inner,
    vacuum_label,
    verify_factorization,
    verify_isometry,
)
from toriclab.vacuum import ONE, ZERO, ExcitationVector, inner, omega, states_equal

from conftest import TWO_SITE

UPWARD = Cone((0, 0), (1, 1), (-1, 1))
SHIFTED = Cone((0, 1), (1, 1), (-1, 1))
MAIN = Window(-6, 6, -3, 9)


@pytest.fixture(scope="module")
def sc():
    return build_scaffold(SHIFTED, UPWARD, MAIN)


@pytest.fixture(scope="module")
def sc2():
    return build_scaffold(TWO_SITE["inner"], TWO_SITE["outer"], TWO_SITE["window"])


def _outer_string(a, b):
    return string_from_path(path_between(a, b, Complement(UPWARD), MAIN))


def test_vacuum_label_pairs_to_one(sc):
    assert tensor_inner(vacuum_label(sc), vacuum_label(sc)) == ONE


def test_distinct_scaffold_elements_are_orthogonal(sc):
    a = TensorLabel.from_form(canonicalize(IDENTITY, sc))
    b = TensorLabel.from_form(canonicalize(sc.gamma[0].op, sc))
    assert a.right != b.right
    assert tensor_inner(a, b) == ZERO
    assert inner(a.vector(), b.vector()) == ZERO


def test_labels_from_different_scaffolds_do_not_mix(sc, sc2):
    with pytest.raises(ValueError):
        tensor_inner(vacuum_label(sc), vacuum_label(sc2))


def test_isometry_examples(sc):
    p = _outer_string(Vertex(-4, 0), Vertex(4, 1))
    detour = multiply(_outer_string(Vertex(-4, 0), Vertex(-4, -2)), _outer_string(Vertex(-4, -2), Vertex(4, 1)))
    assert p != detour
    lp = TensorLabel.from_form(canonicalize(p, sc))
    lq = TensorLabel.from_form(canonicalize(detour, sc))
    assert tensor_inner(lp, lq) == inner(ExcitationVector.of(p), ExcitationVector.of(detour)) == ONE


@settings(max_examples=25)
@given(seed=st.integers(0, 2**32))
def test_isometry_randomized(seed, sc, sc2):
    for s in (sc, sc2):
        report = verify_isometry(s, 20, seed)
        assert report["violations"] == []


def test_factorization_examples(sc):
    loop = string_from_path(rectangle_loop(-1, 3, 1, 5))
    open_outer = _outer_string(Vertex(-5, 0), Vertex(5, 0))
    assert verify_factorization(loop, open_outer, sc)
    assert omega(multiply(loop, open_outer)) == ZERO
    assert verify_factorization(IDENTITY, IDENTITY, sc)
    with pytest.raises(MembershipError):
        verify_factorization(open_outer, loop, sc)


def test_loop_family_respects_regions(sc):
    w = Window(-3, 3, -1, 5)
    left = loop_family(w, lambda b: sc.part_of(b) == 1)
    right = loop_family(w, lambda b: sc.part_of(b) == 2)
    assert left and right
    assert all(sc.part_of(b) == 1 for f in left for b in f.support)
    assert all(sc.part_of(b) == 2 for f in right for b in f.support)


def test_factorization_census_small(sc):
    report = factorization_census(sc, Window(-3, 3, -1, 5))
    assert report["failures"] == []
    assert report["pairs"] == report["left_family"] * report["right_family"]


def test_conjugation_examples(sc):
    t = vacuum_label(sc)
    assert conjugation_check(IDENTITY, t)
    s = star_op(Vertex(0, 4))
    assert all(sc.part_of(b) == 1 for b in s.support)
    assert conjugation_check(s, t)
    new = TensorLabel.from_form(canonicalize(s, sc))
    assert states_equal(new.left, IDENTITY) == 0
    p = plaquette_op(Plaquette(4, -2))
    assert all(sc.part_of(b) == 2 for b in p.support)
    assert mirror_conjugation_check(IDENTITY, t)
    assert mirror_conjugation_check(p, t)
    assert states_equal(TensorLabel.from_form(canonicalize(p, sc)).middle, IDENTITY) == 0


def test_conjugation_requires_region(sc):
    t = vacuum_label(sc)
    with pytest.raises(MembershipError):
        conjugation_check(plaquette_op(Plaquette(4, -2)), t)
    with pytest.raises(MembershipError):
        mirror_conjugation_check(star_op(Vertex(0, 4)), t)


@settings(max_examples=10)
@given(seed=st.integers(0, 2**32))
def test_conjugation_randomized(seed, sc, sc2):
    for s in (sc, sc2):
        for mirror in (False, True):
            assert conjugation_suite(s, 10, seed, mirror)["failures"] == []


@given(seed=st.integers(0, 2**32))
def test_left_action_keeps_other_slots(seed, sc):
    rng = random.Random(seed)
    t = random_label(sc, rng)
    a = string_from_path(path_between(Vertex(0, 3), Vertex(rng.randint(-2, 2), rng.randint(4, 6)),
                                      ConeRegion(SHIFTED), MAIN))
    acted = multiply(a, multiply(multiply(t.left, t.right), t.middle)).times_phase(t.phase)
    new = TensorLabel.from_form(canonicalize(acted, sc))
    assert (new.right.x, new.right.z) == (t.right.x, t.right.z)
    assert (new.middle.x, new.middle.z) == (t.middle.x, t.middle.z)
