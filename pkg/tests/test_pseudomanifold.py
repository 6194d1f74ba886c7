import pytest

from plthick.complex_core import (
    boundary_and_free_faces,
    cone_off,
    complex_from_maximal,
    simplex,
    validate_complex,
)
from plthick.errors import ValidationError
from plthick.fixtures import fixture
from plthick.homology import homology_groups
from plthick.pseudomanifold import (
    check_isolated_singularities,
    check_pseudomanifold,
    classify_link,
    link_of,
    orient,
)


def test_sphere_report():
    r = check_pseudomanifold(fixture("boundary_delta3"))
    assert r.is_pure and r.facet_degrees_ok and r.gallery_connected
    assert len(r.boundary) == 0


def test_book_of_three_fails_facet_degrees():
    r = check_pseudomanifold(fixture("book_of_three"))
    assert not r.facet_degrees_ok
    assert r.facet_witness == simplex("a", "b")


def test_shared_vertex_wedge_report():
    r = check_pseudomanifold(fixture("two_triangles_shared_vertex"))
    assert r.is_pure and r.facet_degrees_ok
    assert not r.gallery_connected and r.gallery_components == 2
    assert len(r.boundary.by_dim(1)) == 6


def test_disconnected_complex_rejected():
    X = validate_complex([["a", "b", "c"], ["x", "y", "z"]])
    with pytest.raises(ValidationError):
        check_pseudomanifold(X)


def test_boundary_matches_free_face_boundary():
    for name in ("single_triangle", "boundary_delta3", "two_triangles_shared_edge"):
        X = fixture(name)
        r = check_pseudomanifold(X)
        _, bd = boundary_and_free_faces(X)
        d = X.dim
        top_free = [s for s in bd.simplices if s.dim == d - 1]
        assert set(r.boundary.by_dim(d - 1)) == set(top_free)


# -- link classification ----------------------------------------------------------

def test_classify_cycle():
    cls = classify_link(fixture("three_cycle"))
    assert cls.kind == "Circle" and cls.components == 1 and cls.is_manifold


def test_classify_sphere():
    cls = classify_link(fixture("boundary_delta3"))
    assert cls.kind == "Sphere" and cls.orientable and cls.genus == 0
    assert cls.closed()


def test_classify_projective_plane():
    cls = classify_link(fixture("projective_plane_6"))
    assert cls.kind == "ClosedSurface" and not cls.orientable
    assert cls.genus == 1  # one crosscap
    assert fixture("projective_plane_6").euler_characteristic() == 1


def test_classify_torus():
    cls = classify_link(fixture("torus_7"))
    assert cls.kind == "ClosedSurface" and cls.orientable and cls.genus == 1


def test_classify_disc():
    cls = classify_link(fixture("four_cycle_cone"))
    assert cls.kind == "Disc" and cls.boundary_components == 1


def test_classify_point_pair_and_arc():
    assert classify_link(validate_complex([["x"], ["y"]])).kind == "PointPair"
    assert classify_link(validate_complex([["x", "y"], ["y", "z"]])).kind == "Arc"


def test_classify_branching_curve_not_manifold():
    cls = classify_link(validate_complex([["c", "x"], ["c", "y"], ["c", "z"]]))
    assert not cls.is_manifold and cls.witness == simplex("c")


def test_classify_rejects_dim_three():
    with pytest.raises(ValidationError):
        classify_link(fixture("boundary_delta4"))


# -- isolated singularities ---------------------------------------------------------

def test_three_sphere_has_no_singularities():
    X = fixture("boundary_delta4")
    r = check_isolated_singularities(X)
    assert r.isolated_singularities and r.positive_links_ok
    assert all(cls.kind == "Sphere" and cls.genus == 0
               for cls in r.vertex_links.values())


def test_pinched_spheres_have_isolated_singularities():
    X = fixture("pinched_spheres")
    r = check_isolated_singularities(X)
    assert r.isolated_singularities
    pinch = r.vertex_links["a"]
    assert pinch.kind == "Circle" and pinch.components == 2 and pinch.is_manifold
    # Not a combinatorial manifold at the pinch: the link is disconnected.
    assert any(cls.components > 1 for cls in r.vertex_links.values())


def test_cone_over_torus_is_singular_pseudomanifold():
    T = fixture("torus_7")
    X = cone_off(T, T, "w")
    r = check_isolated_singularities(X)
    assert r.isolated_singularities
    apex = r.vertex_links["w"]
    assert apex.kind == "ClosedSurface" and apex.genus == 1 and apex.orientable
    others = [cls for v, cls in r.vertex_links.items() if v != "w"]
    assert all(cls.kind == "Disc" for cls in others)


# -- orientation -----------------------------------------------------------------------

def test_orient_sphere():
    X = fixture("boundary_delta3")
    res = orient(X)
    assert res.success
    assert sorted(res.assignment.signs.values()).count(1) + \
        sorted(res.assignment.signs.values()).count(-1) == 4
    assert res.top_relative_rank == 1


def test_orient_projective_plane_fails_with_odd_cycle():
    X = fixture("projective_plane_6")
    res = orient(X)
    assert not res.success
    cycle = res.odd_cycle
    assert cycle[0] == cycle[-1] and len(cycle) >= 4
    assert res.top_relative_rank == 0


def test_orient_disc_with_relative_homology():
    X = fixture("four_cycle_cone")
    res = orient(X)
    assert res.success and res.top_relative_rank == 1
    _, bd = boundary_and_free_faces(X)
    assert homology_groups(X, rel=bd).betti[2] == 1


def test_orient_rejects_book():
    with pytest.raises(ValidationError):
        orient(fixture("book_of_three"))


@pytest.mark.parametrize("name,expect", [
    ("boundary_delta3", True), ("torus_7", True), ("projective_plane_6", False),
    ("pinched_spheres", True), ("four_cycle_cone", True),
    ("two_triangles_shared_vertex", True),
])
def test_orient_iff_top_relative_rank_per_component(name, expect):
    X = fixture(name)
    report = check_pseudomanifold(X)
    res = orient(X, report=report)
    assert res.success is expect
    if res.success:
        assert res.top_relative_rank == report.gallery_components
    else:
        assert res.top_relative_rank < report.gallery_components


def test_orient_cone_rule_on_cone_over_sphere():
    """Coning a sphere: the fresh apex must obey the reflection of the
    inherited facet orientations."""
    S = fixture("boundary_delta3")
    ball = cone_off(S, S, "w")
    big = check_pseudomanifold(ball)
    res = orient(ball, cone_vertices={"w"}, report=big)
    assert res.success


def test_link_of_edge_in_three_sphere_is_circle():
    X = fixture("boundary_delta4")
    lk = link_of(X, simplex("a", "b"))
    cls = classify_link(lk)
    assert cls.kind == "Circle" and cls.components == 1
