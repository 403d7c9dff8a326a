from collections import Counter

import pytest

from clusterpump.f2poly import parse
from clusterpump.lattice import (
    CZ_PRODUCT,
    Z_PRODUCT,
    HamTerm,
    LatticeError,
    LatticeSpec,
    SymmetryGen,
    _finish,
    build_fcc,
    build_fractal_stack,
    build_honeycomb_stack,
    build_square,
    build_triangular,
    build_union_jack,
)


def _touch_counts(spec):
    return Counter(q for t in spec.terms for q in t.support)


# -- square ------------------------------------------------------------------

@pytest.mark.parametrize("nx,ny", [(2, 2), (3, 3), (4, 4), (5, 3)])
def test_square_counts(nx, ny):
    spec = build_square(nx, ny)
    assert spec.n == nx * ny
    assert len(spec.terms) == (nx - 1) * (ny - 1)
    assert len(spec.boundary) == 2 * (nx + ny) - 4
    assert len(spec.target_graph) == 2 * (nx + ny) - 4  # the perimeter is a cycle
    assert all(t.kind == CZ_PRODUCT and len(t.pairs) == 4 for t in spec.terms)
    assert spec.evolution_time == pytest.approx(1.5707963267948966)


def test_square_target_is_a_cycle():
    spec = build_square(4, 5)
    deg = Counter(q for e in spec.target_graph for q in e)
    assert set(deg.values()) == {2}


def test_square_symmetries_are_checkerboard():
    spec = build_square(4, 4)
    red, blue = (set(g.support) for g in spec.symmetries)
    assert not red & blue and len(red | blue) == 16
    for q in red:
        i, j = spec.sites[q].coord
        assert (i + j) % 2 == 0


# -- Union Jack ------------------------------------------------------------------

@pytest.mark.parametrize("n", [4, 6, 16])
def test_union_jack_cylinder_counts(n):
    spec = build_union_jack(n)
    assert spec.n == n * n + n * (n - 1)
    assert len(spec.terms) == 4 * n * (n - 1)
    assert len(spec.boundary) == 2 * n
    assert len(spec.target_graph) == 2 * n  # two rings
    assert all(c % 4 == 0 for c in _touch_counts(spec).values())


def test_union_jack_about_five_hundred_qubits():
    assert build_union_jack(16).n == 496


def test_open_union_jack_corners_touch_two_triangles():
    spec = build_union_jack(4, periodic=False)
    counts = _touch_counts(spec)
    corners = [spec.index_of(c) for c in [(0, 0), (6, 0), (0, 6), (6, 6)]]
    assert [counts[q] for q in corners] == [2, 2, 2, 2]
    assert not spec.expect_plus_boundary


def test_union_jack_rejects_odd_cylinder():
    with pytest.raises(LatticeError):
        build_union_jack(5)


def test_union_jack_three_colorable():
    spec = build_union_jack(4)
    for t in spec.terms:
        assert {spec.sites[q].color for q in t.support} == {"red", "blue", "green"}


# -- triangular ----------------------------------------------------------------------

@pytest.mark.parametrize("n", [2, 3, 5, 8])
def test_triangle_patch_counts(n):
    spec = build_triangular(n)
    assert spec.n == n * (n + 1) // 2
    assert len(spec.terms) == (n - 1) ** 2
    assert len(spec.boundary) == max(3, 3 * (n - 1))


@pytest.mark.parametrize("r", [1, 2, 3])
def test_hexagon_patch_counts(r):
    spec = build_triangular(r, shape="hexagon")
    assert spec.n == 3 * r * (r + 1) + 1
    assert len(spec.terms) == 6 * r * r
    assert len(spec.boundary) == 6 * r
    counts = _touch_counts(spec)
    assert all(counts[q] == 6 for q in spec.bulk)


def test_triangular_flags_bulk_flip():
    spec = build_triangular(4)
    assert spec.bulk_flips_to_minus and not spec.expect_plus_boundary
    for t in spec.terms:
        assert len({spec.sites[q].color for q in t.support}) == 3


def test_triangular_unknown_shape():
    with pytest.raises(LatticeError):
        build_triangular(3, shape="square")


# -- FCC ---------------------------------------------------------------------------------

def test_fcc_slab_counts():
    spec = build_fcc(4, 4, 4)
    # 9 planes x = 0..8, each with 32 sites of the right parity on an 8 x 8 torus
    assert spec.n == 288
    assert len(spec.terms) == 8 * 64
    assert len(spec.boundary) == 64
    assert all(c % 4 == 0 for c in _touch_counts(spec).values())


def test_fcc_single_cube():
    spec = build_fcc(1, 1, 1, periodic=False)
    assert spec.n == 14
    assert len(spec.terms) == 8
    assert all(len(set(t.support)) == 4 for t in spec.terms)


def test_fcc_boundary_graph_is_square_lattice():
    spec = build_fcc(3, 2, 3)
    deg = Counter(q for e in spec.target_graph for q in e)
    assert set(deg.values()) == {4}
    for a, b in spec.target_graph:
        kinds = {spec.sites[a].color, spec.sites[b].color}
        assert kinds == {"corner", "face"}
        assert spec.sites[a].coord[0] == spec.sites[b].coord[0]


def test_fcc_tetrahedra_are_nearest_neighbours():
    spec = build_fcc(2, 2, 2)
    for t in spec.terms:
        pts = [spec.sites[q].coord for q in t.support]
        for a in range(4):
            for b in range(a + 1, 4):
                d = [abs(pts[a][c] - pts[b][c]) for c in range(3)]
                d = [min(x, 4 - x) if c else x for c, x in enumerate(d)]  # y, z wrap with period 4
                assert sum(x * x for x in d) == 2


def test_fcc_planar_symmetry_count():
    spec = build_fcc(2, 2, 2)
    # every integer plane perpendicular to each axis: 5 in x, 4 in y, 4 in z
    assert len(spec.symmetries) == 5 + 4 + 4


# -- fractal stacks -----------------------------------------------------------------------

def test_fractal_counts():
    spec = build_fractal_stack("1 + x", 8, 8, 3)
    assert spec.n == 2 * 64 * 4
    assert len(spec.boundary) == 2 * 2 * 64
    assert len(spec.terms) == 2 * 64 * 3
    assert len(spec.symmetries) == 16


def test_fractal_target_matches_cluster_pattern():
    spec = build_fractal_stack("1 + x", 6, 4, 1)
    # interior blue sites couple to red (i,j), (i,j+1), (i+1,j+1); the top row only to (i,j)
    deg = Counter(a for a, _ in spec.target_graph)
    for q in spec.boundary:
        i, j, k, m = spec.sites[q].coord
        if m == 0:
            assert deg[q] == (3 if j < 3 else 1)


def test_honeycomb_is_sierpinski_stack():
    a = build_honeycomb_stack(4, 4, 2)
    b = build_fractal_stack(parse("1 + x"), 4, 4, 2)
    assert a.family == "honeycomb"
    assert a.terms == b.terms and a.target_graph == b.target_graph


def test_fractal_torus_requires_closure():
    with pytest.raises(LatticeError):
        build_fractal_stack("1 + x", 8, 8, 1, periodic_y=True)  # (1+x)^8 = 1 + x^8 = 0 on 8 sites
    spec = build_fractal_stack("1 + x + x^2", 8, 8, 1, periodic_y=True)
    assert spec.params["periodic_y"]


@pytest.mark.parametrize("f", ["1 + y", "0", "x*z"])
def test_fractal_rejects_bad_rules(f):
    with pytest.raises((LatticeError, ValueError)):
        build_fractal_stack(f, 8, 8, 1)


# -- serialisation and validation ---------------------------------------------------------

@pytest.mark.parametrize("builder", [
    lambda: build_square(3, 4),
    lambda: build_union_jack(4),
    lambda: build_triangular(2, shape="hexagon"),
    lambda: build_fcc(1, 2, 2),
    lambda: build_fractal_stack("1 + x + x^2", 5, 3, 2),
])
def test_json_round_trip(builder):
    spec = builder()
    again = LatticeSpec.from_json(spec.to_json())
    assert again.to_json() == spec.to_json()
    assert again.terms == spec.terms and again.symmetries == spec.symmetries


def test_validation_catches_bad_partition():
    spec = build_square(3, 3)
    d = spec.to_dict()
    d["bulk"] = []
    with pytest.raises(LatticeError):
        LatticeSpec.from_dict(d)


def test_validation_catches_bad_term():
    d = build_square(3, 3).to_dict()
    d["terms"].append({"kind": Z_PRODUCT, "support": [0, 1], "angle": 0.785, "sign": 1})
    with pytest.raises(LatticeError):
        LatticeSpec.from_dict(d)


def test_evolution_time_must_be_shared():
    spec = build_square(3, 3)
    mixed = LatticeSpec(**{**spec.__dict__, "terms": spec.terms + (HamTerm(Z_PRODUCT, (0, 1, 2), angle=0.1),),
                           "_coord_index": None})
    with pytest.raises(LatticeError):
        mixed.evolution_time


def test_symmetry_breaking_term_fails_the_build():
    coords = [((i,), "red") for i in range(3)]
    with pytest.raises(LatticeError):
        _finish("toy", {}, coords, [HamTerm(Z_PRODUCT, (0, 1, 2))],
                [SymmetryGen("all", (0, 1, 2))], [0, 1, 2], [])
