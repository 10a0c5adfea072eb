import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toriclab.canonical import (
    InRepresentative,
    NotRoutable,
    Scaffold,
    ScaffoldError,
    Witness,
    _mirror,
    build_scaffold,
    canonical_uniqueness_check,
    canonicalize,
    classify_excitation,
    dense_decompose,
    f0_group_elements,
    h0_dimension,
    syndrome_class_count,
    verify_membership,
)
from toriclab.lattice import (
    All,
    Bond,
    Complement,
    Cone,
    ConeRegion,
    DualPath,
    E,
    LatticeError,
    Path,
    Plaquette,
    Vertex,
    Window,
    boundary_plaquettes,
    boundary_vertices,
    cone_contains_bond,
    dual_path_between,
    path_between,
)
from toriclab.canonical import pull_in
from toriclab.pauli import (
    IDENTITY,
    PauliOp,
    commutes,
    is_self_adjoint,
    multiply,
    plaquette_op,
    product,
    star_op,
    string_from_dual_path,
    string_from_path,
    syndrome,
)
from toriclab.split import random_string_product
from toriclab.vacuum import ExcitationVector, GaussianRational, inner, states_equal

from conftest import TWO_SITE

UPWARD = Cone((0, 0), (1, 1), (-1, 1))
SHIFTED = Cone((0, 1), (1, 1), (-1, 1))
MAIN = Window(-6, 6, -3, 9)


@pytest.fixture(scope="module")
def unit_scaffold():
    return build_scaffold(SHIFTED, UPWARD, MAIN)


@pytest.fixture(scope="module")
def two_site_scaffold():
    return build_scaffold(TWO_SITE["inner"], TWO_SITE["outer"], TWO_SITE["window"])


# ---- scaffolds ---------------------------------------------------------------


def test_unit_offset_scaffold_has_two_paths(unit_scaffold):
    sc = unit_scaffold
    assert not sc.interior_vertices and not sc.interior_plaquettes
    assert [g.name for g in sc.gamma] == ["connector_v", "connector_p"]
    assert sc.gamma[0].endpoints == (Vertex(0, 1), Vertex(0, 0))
    assert sc.gamma[1].endpoints == (Plaquette(-1, 1), Plaquette(-1, 0))
    for g in sc.gamma:
        assert all(sc.part_of(b) == 0 for b in g.op.support)


def test_two_site_scaffold(two_site_scaffold):
    sc = two_site_scaffold
    assert sc.interior_vertices == {Vertex(0, 1), Vertex(0, 2)}
    assert not sc.interior_plaquettes
    names = [g.name for g in sc.gamma]
    assert names == ["connector_v", "connector_p", "anchor_v", "site_v_0_2"]
    # every interior site starts exactly one path
    starts = [g.endpoints[0] for g in sc.gamma if g.name.startswith(("anchor", "site"))]
    assert sorted(starts) == sorted(sc.interior_vertices)


def test_scaffold_is_deterministic(unit_scaffold):
    again = build_scaffold(SHIFTED, UPWARD, MAIN)
    assert again.gamma == unit_scaffold.gamma
    assert again.to_json() == unit_scaffold.to_json()


def test_alternative_scaffold_keeps_endpoints(two_site_scaffold):
    sc = two_site_scaffold
    alt = build_scaffold(sc.inner, sc.outer, sc.window, reverse=True)
    assert [g.endpoints for g in alt.gamma] == [g.endpoints for g in sc.gamma]


def test_mixed_cells_are_rejected():
    with pytest.raises((ScaffoldError, LatticeError)):
        build_scaffold(UPWARD, UPWARD, MAIN)


# ---- scaffold group ------------------------------------------------------------


def test_group_of_two_paths(unit_scaffold):
    elems = f0_group_elements(unit_scaffold)
    f1, f2 = unit_scaffold.gamma[0].op, unit_scaffold.gamma[1].op
    assert elems == [IDENTITY, f1, f2, multiply(f1, f2)]


def test_group_closure(two_site_scaffold):
    elems = f0_group_elements(two_site_scaffold)
    keys = {(e.x, e.z) for e in elems}
    for a, b in itertools.product(elems, repeat=2):
        c = multiply(a, b)
        assert (c.x, c.z) in keys and c.phase % 2 == 0


def test_h0_dimensions(unit_scaffold, two_site_scaffold):
    assert h0_dimension(unit_scaffold) == 4
    # independent oracle: count distinct syndromes of group elements
    assert h0_dimension(two_site_scaffold) == syndrome_class_count(two_site_scaffold) == 16


def test_empty_scaffold_has_dimension_one(unit_scaffold):
    sc = unit_scaffold
    empty = Scaffold(sc.inner, sc.outer, sc.window, (), frozenset(), frozenset(), None, None)
    assert f0_group_elements(empty) == [IDENTITY]
    assert h0_dimension(empty) == 1


def test_group_size_cap(two_site_scaffold):
    with pytest.raises(ValueError):
        f0_group_elements(two_site_scaffold, cap=8)


# ---- canonical forms ---------------------------------------------------------------


def test_inner_operator_is_already_canonical(unit_scaffold):
    op = string_from_path(path_between(Vertex(0, 3), Vertex(2, 6), All(), MAIN))
    assert all(unit_scaffold.part_of(b) == 1 for b in op.support)
    form = canonicalize(op, unit_scaffold)
    assert (form.phase, form.f1, form.fhat, form.f2) == (0, op, IDENTITY, IDENTITY)


def test_path_from_gap_site_into_inner_cone(two_site_scaffold):
    sc = two_site_scaffold
    w = sc.window
    for start, expected in ((Vertex(0, 1), {"anchor_v"}), (Vertex(0, 2), {"anchor_v", "site_v_0_2"})):
        op = string_from_path(path_between(start, Vertex(0, 6), All(), w))
        form = canonicalize(op, sc)
        used = {sc.gamma[j].name for j in range(len(sc.gamma)) if form.mask >> j & 1}
        assert used == expected
        assert form.f2 == IDENTITY
        assert syndrome(form.f1).charges == {Vertex(0, 3), Vertex(0, 6)}
        assert states_equal(op, form.operator()) == 0


@settings(max_examples=60)
@given(seed=st.integers(0, 2**32))
def test_round_trip_and_membership(seed, unit_scaffold, two_site_scaffold):
    rng = random.Random(seed)
    for sc in (unit_scaffold, two_site_scaffold):
        op = random_string_product(sc.window.shrink(2), rng)
        form = canonicalize(op, sc)
        assert states_equal(op, form.operator()) == 0
        assert verify_membership(form)


@settings(max_examples=40)
@given(seed=st.integers(0, 2**32))
def test_uniqueness_under_rerouting(seed, two_site_scaffold):
    sc = two_site_scaffold
    alt = build_scaffold(sc.inner, sc.outer, sc.window, reverse=True)
    op = random_string_product(sc.window.shrink(2), random.Random(seed))
    form = canonicalize(op, sc)
    assert canonical_uniqueness_check(form, canonicalize(op, sc, reverse=True))
    assert canonical_uniqueness_check(form, canonicalize(op, alt))


def test_uniqueness_needs_equal_states(unit_scaffold):
    a = canonicalize(IDENTITY, unit_scaffold)
    assert canonical_uniqueness_check(a, a)
    b = canonicalize(unit_scaffold.gamma[0].op, unit_scaffold)
    with pytest.raises(ValueError):
        canonical_uniqueness_check(a, b)


def test_support_outside_window_is_rejected(unit_scaffold):
    with pytest.raises(NotRoutable):
        canonicalize(PauliOp(0, (), (Bond(40, 40, E),)), unit_scaffold)


# ---- pull-in -------------------------------------------------------------------


def test_pull_in_dual_path_hugging_the_edge():
    w = MAIN
    # dual path just outside the right edge of the cone, between boundary plaquettes
    hug = DualPath((Plaquette(1, 1), Plaquette(2, 1), Plaquette(3, 1), Plaquette(3, 2), Plaquette(3, 3)))
    bp = boundary_plaquettes(UPWARD, w)
    assert hug.endpoints[0] in bp and hug.endpoints[1] in bp
    assert not all(cone_contains_bond(UPWARD, b) for b in hug.crossed_bonds())
    new = pull_in(hug, UPWARD, w)
    assert all(cone_contains_bond(UPWARD, b) for b in new.crossed_bonds())
    assert states_equal(string_from_dual_path(hug), string_from_dual_path(new)) == 0


def test_pull_in_leaves_inside_paths_alone():
    path = path_between(Vertex(-2, 2), Vertex(2, 2), ConeRegion(UPWARD), MAIN)
    assert pull_in(path, UPWARD, MAIN) == path


def test_pull_in_requires_boundary_endpoints():
    with pytest.raises(LatticeError):
        pull_in(Path((Vertex(0, 5), Vertex(0, 6))), UPWARD, MAIN)


def _boundary_strings(c, w, kind, n, rng):
    region = ConeRegion(c)
    if kind == "v":
        sites = sorted(boundary_vertices(c, w.shrink(2)))
        a, b = rng.sample(sites, 2)
        return string_from_path(path_between(a, b, region, w))
    sites = sorted(boundary_plaquettes(c, w.shrink(2)))
    a, b = rng.sample(sites, 2)
    return string_from_dual_path(dual_path_between(a, b, region, w))


@given(st.integers(0, 2**32))
def test_mirrors_preserve_commutation(seed):
    rng = random.Random(seed)
    p = _boundary_strings(UPWARD, MAIN, "v", 2, rng)
    q = _boundary_strings(UPWARD, MAIN, "p", 2, rng)
    mp, mq = _mirror(p, Complement(UPWARD), MAIN), _mirror(q, Complement(UPWARD), MAIN)
    assert states_equal(p, mp) is not None and states_equal(q, mq) is not None
    assert commutes(p, q) == commutes(mp, mq)


# ---- dichotomy --------------------------------------------------------------------


def test_deep_dual_string_has_plaquette_witness():
    op = string_from_dual_path(DualPath((Plaquette(4, -2), Plaquette(5, -2), Plaquette(5, -1))))
    out = classify_excitation(op, UPWARD, MAIN)
    assert isinstance(out, Witness)
    assert out.kind == "plaquette" and out.site in {(4, -2), (5, -1)}
    assert out.verify(op, UPWARD)


def test_boundary_endpoints_give_representative():
    path = path_between(Vertex(-2, 2), Vertex(3, 3), Complement(UPWARD), MAIN)
    op = string_from_path(path)
    assert set(path.endpoints) <= boundary_vertices(UPWARD, MAIN)
    out = classify_excitation(op, UPWARD, MAIN)
    assert isinstance(out, InRepresentative)
    assert out.phase in (0, 2) and out.verify(op, UPWARD)


def test_outside_stabilizer_is_identity_class():
    op = product(plaquette_op(Plaquette(x, -2)) for x in range(-3, 3))
    out = classify_excitation(op, UPWARD, MAIN)
    assert isinstance(out, InRepresentative)
    assert out.rep == IDENTITY and out.phase == 0


def test_dichotomy_exhaustive_small():
    w = Window(-1, 2, -1, 2)
    outside = [b for b in w.bond_list if not cone_contains_bond(UPWARD, b)]
    gens = [PauliOp(0, (), (b,)) for b in outside] + [PauliOp(0, (b,), ()) for b in outside]
    for r in range(3):
        for combo in itertools.combinations(gens, r):
            op = product(combo)
            out = classify_excitation(op, UPWARD, MAIN)
            assert out.verify(op, UPWARD)


# ---- dense decomposition ---------------------------------------------------------------

I = GaussianRational(0, 1)


def _check(dec, lam, op):
    lhs = dec.a + dec.b.scale(I)
    diff = lhs - ExcitationVector.of(op, lam)
    assert inner(diff, diff) == 0
    for _, t in dec.a.terms + dec.b.terms:
        assert is_self_adjoint(t)
    assert all(cone_contains_bond(UPWARD, b) for _, t in dec.a.terms for b in t.support)
    assert not any(cone_contains_bond(UPWARD, b) for _, t in dec.b.terms for b in t.support)


def test_dense_real_case():
    p = string_from_path(Path((Vertex(0, 3), Vertex(0, 4))))
    dec = dense_decompose(GaussianRational(1), p, UPWARD, MAIN)
    assert dec.case == "real"
    assert dec.a.terms == ((GaussianRational(1), p),) and not dec.b.terms
    _check(dec, GaussianRational(1), p)


def test_dense_flip_case():
    p = string_from_path(Path((Vertex(0, 3), Vertex(0, 4))))
    dec = dense_decompose(I, p, UPWARD, MAIN)
    assert dec.case == "flip"
    s = star_op(Vertex(0, 3))
    assert dec.a.terms == ((GaussianRational(-1), multiply(s, p).times_phase(1)),)
    assert not dec.b.terms
    _check(dec, I, p)


def test_dense_mirror_case():
    path = path_between(Vertex(-2, 2), Vertex(2, 2), ConeRegion(UPWARD), MAIN)
    p = string_from_path(path)
    dec = dense_decompose(I, p, UPWARD, MAIN)
    assert dec.case == "mirror"
    assert not dec.a.terms and len(dec.b.terms) == 1
    _check(dec, I, p)


@pytest.mark.parametrize("lam", [GaussianRational(1), I, GaussianRational(1, 1)])
def test_dense_exhaustive_small(lam):
    w = Window(-1, 2, -1, 2)
    inside = [b for b in w.bond_list if cone_contains_bond(UPWARD, b)]
    gens = [PauliOp(0, (), (b,)) for b in inside] + [PauliOp(0, (b,), ()) for b in inside]
    for r in range(3):
        for combo in itertools.combinations(gens, r):
            op = product(combo)
            _check(dense_decompose(lam, op, UPWARD, MAIN), lam, op)
