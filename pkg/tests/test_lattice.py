import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from toriclab.lattice import (
    E,
    N,
    All,
    Bond,
    Complement,
    Cone,
    ConeRegion,
    DualPath,
    FiniteSet,
    Gap,
    LatticeError,
    Path,
    Plaquette,
    Unreachable,
    Verdict,
    Vertex,
    Window,
    bond_from_json,
    bond_to_json,
    boundary_plaquettes,
    boundary_vertices,
    cone_contains_bond,
    dual_path_between,
    is_distally_separated,
    path_between,
    plaquette_bonds,
    plaquettes_in_region,
    random_closed_walk,
    rectangle_loop,
    sample_contains_bond,
    star_bonds,
    stars_in_region,
)

from conftest import TWO_SITE, bonds_in, cones

QUADRANT = Cone((0, 0), (1, 0), (0, 1))
UPWARD = Cone((0, 0), (1, 1), (-1, 1))
SIX = Window(0, 6, 0, 6)


# ---- incidence --------------------------------------------------------------


def test_star_of_origin():
    assert star_bonds(Vertex(0, 0)) == {Bond(0, 0, E), Bond(-1, 0, E), Bond(0, 0, N), Bond(0, -1, N)}


def test_plaquette_at_origin():
    assert plaquette_bonds(Plaquette(0, 0)) == {Bond(0, 0, E), Bond(1, 0, N), Bond(0, 1, E), Bond(0, 0, N)}


@given(st.integers(-50, 50), st.integers(-50, 50))
def test_star_and_plaquette_have_four_bonds(x, y):
    assert len(star_bonds(Vertex(x, y))) == 4
    ring = plaquette_bonds(Plaquette(x, y))
    assert len(ring) == 4
    # the four bonds close up: every corner has even degree
    corners = [v for b in ring for v in b.endpoints()]
    assert all(corners.count(v) == 2 for v in corners)


def test_star_plaquette_overlaps_are_zero_or_two():
    for v in SIX.vertices():
        for p in SIX.plaquettes():
            assert len(star_bonds(v) & plaquette_bonds(p)) in (0, 2)


def test_adjacent_plaquettes_share_one_bond():
    for p in SIX.plaquettes():
        for q in ((p.x + 1, p.y), (p.x, p.y + 1)):
            assert len(plaquette_bonds(p) & plaquette_bonds(Plaquette(*q))) == 1
        far = Plaquette(p.x + 2, p.y)
        assert not plaquette_bonds(p) & plaquette_bonds(far)


def test_bond_json_round_trip():
    for b in SIX.bond_list:
        assert bond_from_json(bond_to_json(b)) == b
    assert bond_to_json(Bond(3, -1, N)) == [3, -1, "N"]


def test_window_counts():
    w = Window(0, 2, 0, 2)
    assert w.n_bonds == len(w.bond_list) == 12
    assert len(w.stars()) == 1
    assert len(w.plaquettes()) == 4
    assert Window(0, 3, 0, 2).n_bonds == 17
    with pytest.raises(LatticeError):
        Window(0, 0, 0, 3)


# ---- cone membership --------------------------------------------------------


@pytest.mark.parametrize("bond, inside", [
    (Bond(1, 1, E), True),
    (Bond(1, 0, E), False),   # lies on the ray y = 0
    (Bond(1, 0, N), True),
])
def test_quadrant_examples(bond, inside):
    assert cone_contains_bond(QUADRANT, bond) is inside
    assert sample_contains_bond(QUADRANT, bond) is inside


@given(cones(), bonds_in(-6, 6, -6, 6))
def test_membership_matches_rasterization(c, b):
    assert cone_contains_bond(c, b) == sample_contains_bond(c, b)


@given(cones(), bonds_in(), st.integers(2, 5))
def test_membership_is_scale_invariant(c, b, k):
    scaled = Cone(c.apex, (k * c.d1[0], k * c.d1[1]), (k * c.d2[0], k * c.d2[1]))
    assert cone_contains_bond(scaled, b) == cone_contains_bond(c, b)


@given(cones(), bonds_in())
def test_complement_consistency(c, b):
    assert (b in ConeRegion(c)) != (b in Complement(c))


def test_cone_rejects_reflex_or_flat_rays():
    with pytest.raises(LatticeError):
        Cone((0, 0), (0, 1), (1, 0))
    with pytest.raises(LatticeError):
        Cone((0, 0), (1, 0), (-1, 0))


# ---- boundaries -------------------------------------------------------------


def _on_ray_by_walking(c, v, reach=20):
    return any((c.apex[0] + k * d[0], c.apex[1] + k * d[1]) == tuple(v)
               for d in c.directions for k in range(reach))


def _outside_closed_sector(c, v):
    return not (c.side_value(0, v) >= 0 and c.side_value(1, v) >= 0)


def test_quadrant_boundary_examples():
    bv = boundary_vertices(QUADRANT, Window(-1, 8, -1, 8))
    assert Vertex(3, 0) in bv
    assert Vertex(2, 2) not in bv


@pytest.mark.parametrize("c", [QUADRANT, UPWARD, Cone((1, 0), (2, 1), (1, 2))])
def test_boundary_vertices_brute_force(c):
    w = Window(-4, 4, -4, 4)
    expected = set()
    for v in w.vertices():
        touches = any(sample_contains_bond(c, b) for b in star_bonds(v))
        if _on_ray_by_walking(c, v) or (_outside_closed_sector(c, v) and touches):
            expected.add(v)
    assert boundary_vertices(c, w) == expected


@pytest.mark.parametrize("c", [QUADRANT, UPWARD])
def test_boundary_plaquettes_brute_force(c):
    w = Window(-4, 4, -4, 4)
    expected = {p for p in w.plaquettes()
                if 0 < sum(sample_contains_bond(c, b) for b in plaquette_bonds(p)) < 4}
    got = boundary_plaquettes(c, w)
    assert got == expected
    assert Plaquette(1, 2) not in got       # four bonds inside
    assert Plaquette(-3, -3) not in got     # no bonds inside


@given(cones())
def test_straddling_stars_sit_on_boundary_vertices(c):
    w = Window(-5, 5, -5, 5)
    bv = boundary_vertices(c, w)
    for v in w.vertices():
        inside = [cone_contains_bond(c, b) for b in star_bonds(v)]
        if any(inside) and not all(inside):
            assert v in bv


# ---- regions ----------------------------------------------------------------


def test_regions_on_small_window():
    w = Window(0, 2, 0, 2)
    assert stars_in_region(All(), w) == {Vertex(1, 1)}
    assert len(plaquettes_in_region(All(), w)) == 4
    v = Vertex(1, 1)
    assert stars_in_region(FiniteSet(star_bonds(v)), w) == {v}
    assert plaquettes_in_region(FiniteSet(star_bonds(v)), w) == set()


@given(cones())
def test_region_stars_are_disjoint(c):
    w = Window(-4, 4, -4, 4)
    a = stars_in_region(ConeRegion(c), w)
    b = stars_in_region(Complement(c), w)
    assert not a & b
    assert a | b <= stars_in_region(All(), w)


# ---- distal separation ------------------------------------------------------


def test_unit_offset_pair_is_separated():
    inner = Cone((0, 1), (1, 1), (-1, 1))
    sep = is_distally_separated(inner, UPWARD, Window(-6, 6, -3, 9))
    assert sep.verdict is Verdict.TRUE


def test_equal_cones_give_witness():
    sep = is_distally_separated(UPWARD, UPWARD, Window(-6, 6, -3, 9))
    assert sep.verdict is Verdict.FALSE
    kind, site = sep.witness
    cells = star_bonds(Vertex(*site)) if kind == "star" else plaquette_bonds(Plaquette(*site))
    inside = [cone_contains_bond(UPWARD, b) for b in cells]
    assert any(inside) and not all(inside)


def test_window_missing_the_apex_is_undetermined():
    inner = Cone((0, 0), (2, 1), (1, 2))
    sep = is_distally_separated(inner, QUADRANT, Window(2, 10, 2, 10))
    assert sep.verdict is Verdict.UNDETERMINED
    # with the apex region in view the pinch is found
    sep = is_distally_separated(inner, QUADRANT, Window(-2, 10, -2, 10))
    assert sep.verdict is Verdict.FALSE
    assert sep.witness == ("star", (1, 0))


def test_two_site_pair_is_separated():
    sep = is_distally_separated(TWO_SITE["inner"], TWO_SITE["outer"], TWO_SITE["window"])
    assert sep.verdict is Verdict.TRUE


def test_inner_must_be_nested():
    with pytest.raises(LatticeError):
        is_distally_separated(UPWARD, Cone((0, 1), (1, 1), (-1, 1)), Window(-6, 6, -3, 9))


def test_gap_coverage_on_separated_pair():
    inner = TWO_SITE["inner"]
    outer = TWO_SITE["outer"]
    w = TWO_SITE["window"]
    gap = Gap(inner, outer)
    for cells in [star_bonds(v) for v in w.stars()] + [plaquette_bonds(p) for p in w.plaquettes()]:
        parts = {1 if cone_contains_bond(inner, b) else 0 if b in gap else 2 for b in cells}
        assert not (1 in parts and 2 in parts and 0 not in parts)


# ---- paths ------------------------------------------------------------------


def test_path_between_trivial_cases():
    w = Window(0, 4, 0, 4)
    assert path_between(Vertex(1, 1), Vertex(1, 1), All(), w).is_empty
    assert path_between(Vertex(1, 1), Vertex(2, 1), All(), w).bonds() == {Bond(1, 1, E)}
    assert dual_path_between(Plaquette(0, 0), Plaquette(0, 1), All(), w).crossed_bonds() == {Bond(0, 1, E)}


def test_path_blocked_by_strip():
    w = Window(0, 4, 0, 4)
    allowed = FiniteSet(b for b in w.bond_list if not (b.o == E and b.x == 2))
    with pytest.raises(Unreachable):
        path_between(Vertex(0, 0), Vertex(4, 4), allowed, w)


@given(st.integers(0, 10_000))
def test_bfs_paths_are_shortest_and_deterministic(seed):
    rng = random.Random(seed)
    w = Window(-3, 3, -3, 3)
    a = Vertex(rng.randint(-3, 3), rng.randint(-3, 3))
    b = Vertex(rng.randint(-3, 3), rng.randint(-3, 3))
    p = path_between(a, b, All(), w)
    assert len(p) == abs(a.x - b.x) + abs(a.y - b.y)
    assert p == path_between(a, b, All(), w)
    if a != b:
        assert p.endpoints == (a, b)


def test_rectangle_loop_is_closed():
    loop = rectangle_loop(0, 0, 2, 1)
    assert loop.is_closed
    assert len(loop.bonds()) == 6


@given(st.integers(0, 10_000), st.booleans())
def test_random_closed_walks_close(seed, dual):
    walk = random_closed_walk(Window(-3, 3, -3, 3), random.Random(seed), dual=dual)
    assert walk.is_closed
    assert isinstance(walk, DualPath if dual else Path)
