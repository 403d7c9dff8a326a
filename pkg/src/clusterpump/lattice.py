"""Lattice builders for the pump families.

Every builder returns an immutable :class:`LatticeSpec`: qubit sites, the
mutually commuting driving terms, the X-type symmetry generators, the
boundary/bulk split and the graph of the cluster state expected on the
boundary once the pump has run.

Families
--------
``square``      plaquette products of four CZs, evolved for pi/2
``union_jack``  three-body ZZZ on the triangles of the Union Jack lattice, pi/4
``triangular``  three-body ZZZ on up and down triangles, pi/4
``fcc``         four-body ZZZZ on the corner tetrahedra of each FCC cube, pi/4
``fractal``     CZ products V and V' stacking a fractal cluster state, pi/2
``honeycomb``   the fractal stack with the Sierpinski rule ``f = 1 + x``
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from itertools import product
from typing import Optional, Sequence

from clusterpump import f2poly
from clusterpump.f2poly import F2LaurentPoly

Z_PRODUCT = "Z_PRODUCT"
CZ_PRODUCT = "CZ_PRODUCT"
QUARTER_PI = math.pi / 4
HALF_PI = math.pi / 2


class LatticeError(ValueError):
    pass


@dataclass(frozen=True)
class Site:
    index: int
    coord: tuple
    color: str


@dataclass(frozen=True)
class HamTerm:
    kind: str
    support: tuple = ()
    pairs: tuple = ()
    angle: float = QUARTER_PI
    sign: int = 1
    tag: Optional[tuple] = None  # e.g. ("V", i, j, k) for fractal gates

    def sites(self) -> set:
        if self.kind == Z_PRODUCT:
            return set(self.support)
        return {q for pair in self.pairs for q in pair}


@dataclass(frozen=True)
class SymmetryGen:
    label: str
    support: tuple
    # fractal generators: (first-row exponent a, sublattice bit)
    tag: Optional[tuple] = None


@dataclass(frozen=True)
class LatticeSpec:
    family: str
    params: dict
    sites: tuple
    terms: tuple
    symmetries: tuple
    boundary: tuple
    bulk: tuple
    target_graph: tuple
    bulk_flips_to_minus: bool = False
    expect_plus_boundary: bool = True
    _coord_index: dict = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self._coord_index is None:
            object.__setattr__(self, "_coord_index", {s.coord: s.index for s in self.sites})

    @property
    def n(self) -> int:
        return len(self.sites)

    def index_of(self, coord) -> Optional[int]:
        return self._coord_index.get(tuple(coord))

    @property
    def evolution_time(self) -> float:
        angles = {round(t.angle, 12) for t in self.terms}
        if len(angles) != 1:
            raise LatticeError(f"terms do not share one evolution time: {sorted(angles)}")
        return self.terms[0].angle

    def neighbors_in_target(self) -> dict:
        nbrs = {q: [] for q in self.boundary}
        for a, b in self.target_graph:
            nbrs[a].append(b)
            nbrs[b].append(a)
        return nbrs

    def validate(self) -> None:
        n = self.n
        if [s.index for s in self.sites] != list(range(n)):
            raise LatticeError("site indices must be contiguous from 0")
        if len(self._coord_index) != n:
            raise LatticeError("site coordinates are not unique")
        bset, mset = set(self.boundary), set(self.bulk)
        if bset & mset or (bset | mset) != set(range(n)):
            raise LatticeError("boundary and bulk must partition the sites")
        for a, b in self.target_graph:
            if a not in bset or b not in bset or a == b:
                raise LatticeError(f"target edge ({a}, {b}) leaves the boundary")
        for t in self.terms:
            if t.kind == Z_PRODUCT:
                if len(t.support) not in (3, 4) or len(set(t.support)) != len(t.support):
                    raise LatticeError(f"Z_PRODUCT term must have 3 or 4 distinct sites: {t}")
            elif t.kind == CZ_PRODUCT:
                keys = [tuple(sorted(p)) for p in t.pairs]
                if len(set(keys)) != len(keys):
                    raise LatticeError("repeated CZ pair inside one term")
            else:
                raise LatticeError(f"unknown term kind {t.kind}")
            if any(not 0 <= q < n for q in t.sites()):
                raise LatticeError("term touches a site outside the lattice")
        for g in self.symmetries:
            if not g.support:
                raise LatticeError(f"empty symmetry generator {g.label}")

    # -- JSON ----------------------------------------------------------------
    def to_dict(self) -> dict:
        terms = []
        for t in self.terms:
            d = {"kind": t.kind}
            if t.kind == Z_PRODUCT:
                d["support"] = list(t.support)
            else:
                d["pairs"] = [list(p) for p in t.pairs]
            d["angle"] = t.angle
            d["sign"] = t.sign
            if t.tag is not None:
                d["tag"] = list(t.tag)
            terms.append(d)
        syms = []
        for g in self.symmetries:
            d = {"label": g.label, "support": list(g.support)}
            if g.tag is not None:
                d["tag"] = list(g.tag)
            syms.append(d)
        return {
            "family": self.family,
            "params": self.params,
            "sites": [{"id": s.index, "coord": list(s.coord), "color": s.color} for s in self.sites],
            "terms": terms,
            "symmetries": syms,
            "boundary": list(self.boundary),
            "bulk": list(self.bulk),
            "target_graph": [list(e) for e in self.target_graph],
            "bulk_flips_to_minus": self.bulk_flips_to_minus,
            "expect_plus_boundary": self.expect_plus_boundary,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=False) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "LatticeSpec":
        sites = tuple(Site(int(s["id"]), tuple(s["coord"]), s["color"]) for s in d["sites"])
        terms = []
        for t in d["terms"]:
            tag = tuple(t["tag"]) if "tag" in t else None
            if t["kind"] == Z_PRODUCT:
                terms.append(HamTerm(Z_PRODUCT, support=tuple(t["support"]), angle=float(t["angle"]),
                                     sign=int(t["sign"]), tag=tag))
            else:
                terms.append(HamTerm(t["kind"], pairs=tuple(tuple(p) for p in t["pairs"]),
                                     angle=float(t["angle"]), sign=int(t["sign"]), tag=tag))
        syms = tuple(SymmetryGen(g["label"], tuple(g["support"]),
                                 tuple(g["tag"]) if "tag" in g else None) for g in d["symmetries"])
        spec = cls(
            family=d["family"],
            params=d.get("params", {}),
            sites=sites,
            terms=tuple(terms),
            symmetries=syms,
            boundary=tuple(d["boundary"]),
            bulk=tuple(d["bulk"]),
            target_graph=tuple(tuple(e) for e in d["target_graph"]),
            bulk_flips_to_minus=bool(d.get("bulk_flips_to_minus", False)),
            expect_plus_boundary=bool(d.get("expect_plus_boundary", True)),
        )
        spec.validate()
        return spec

    @classmethod
    def from_json(cls, text: str) -> "LatticeSpec":
        return cls.from_dict(json.loads(text))


# -- helpers -----------------------------------------------------------------

def _edges_in_one_face(faces: Sequence[Sequence[int]]) -> list:
    """Edges of a 2D cell complex that border exactly one face (the geometric boundary)."""
    count: Counter = Counter()
    for face in faces:
        m = len(face)
        for a in range(m):
            for b in range(a + 1, m):
                count[tuple(sorted((face[a], face[b])))] += 1
    return sorted(e for e, c in count.items() if c == 1)


def _cycle_pairs(cycle: Sequence[int]) -> list:
    m = len(cycle)
    return [(cycle[a], cycle[(a + 1) % m]) for a in range(m)]


def _finish(family, params, coords_colors, terms, symmetries, boundary, target, *,
            bulk_flips_to_minus=False, expect_plus_boundary=True, check=True) -> LatticeSpec:
    sites = tuple(Site(i, c, col) for i, (c, col) in enumerate(coords_colors))
    boundary = tuple(sorted(set(boundary)))
    bset = set(boundary)
    bulk = tuple(q for q in range(len(sites)) if q not in bset)
    spec = LatticeSpec(
        family=family,
        params=params,
        sites=sites,
        terms=tuple(terms),
        symmetries=tuple(symmetries),
        boundary=boundary,
        bulk=bulk,
        target_graph=tuple(sorted(tuple(sorted(e)) for e in target)),
        bulk_flips_to_minus=bulk_flips_to_minus,
        expect_plus_boundary=expect_plus_boundary,
    )
    spec.validate()
    if check:
        from clusterpump.checks import symmetry_check

        report = symmetry_check(spec, polynomial=False)
        if not report.passed:
            raise LatticeError(f"{family}: symmetry generators fail to commute with the driving terms: "
                               f"{report.failures[:5]}")
    return spec


def _two_color_flips(index_by_color: dict) -> list:
    gens = []
    colors = sorted(index_by_color)
    for a in range(len(colors)):
        for b in range(a + 1, len(colors)):
            supp = tuple(sorted(index_by_color[colors[a]] + index_by_color[colors[b]]))
            gens.append(SymmetryGen(f"flip {colors[a]}+{colors[b]}", supp))
    return gens


# -- square lattice ----------------------------------------------------------

def build_square(nx: int, ny: int, *, check: bool = True) -> LatticeSpec:
    """Open nx-by-ny grid driven by plaquette products of four CZs."""
    if nx < 2 or ny < 2:
        raise LatticeError("square lattice needs nx, ny >= 2")
    coords = [((i, j), "red" if (i + j) % 2 == 0 else "blue") for j in range(ny) for i in range(nx)]
    idx = {c: q for q, (c, _) in enumerate(coords)}
    terms, faces = [], []
    for j in range(ny - 1):
        for i in range(nx - 1):
            a, b, c, d = idx[(i, j)], idx[(i + 1, j)], idx[(i + 1, j + 1)], idx[(i, j + 1)]
            faces.append((a, b, c, d))
            # only the four sides of the square, not its diagonals
            terms.append(HamTerm(CZ_PRODUCT, pairs=((a, b), (b, c), (c, d), (d, a)),
                                 angle=HALF_PI, sign=1, tag=("plaquette", i, j)))
    boundary = [q for q, ((i, j), _) in enumerate(coords) if i in (0, nx - 1) or j in (0, ny - 1)]
    target = []
    for f in faces:
        a, b, c, d = f
        for e in ((a, b), (b, c), (c, d), (d, a)):
            target.append(e)
    count = Counter(tuple(sorted(e)) for e in target)
    target = [e for e, c in count.items() if c == 1]
    by_color = {"red": [], "blue": []}
    for q, (_, col) in enumerate(coords):
        by_color[col].append(q)
    syms = [SymmetryGen(f"flip {col}", tuple(by_color[col])) for col in ("red", "blue")]
    return _finish("square", {"nx": nx, "ny": ny}, coords, terms, syms, boundary, target, check=check)


# -- Union Jack ----------------------------------------------------------------

def build_union_jack(n: int, rows: Optional[int] = None, *, periodic: bool = True,
                     check: bool = True) -> LatticeSpec:
    """Union Jack lattice: square corners plus square centres, ZZZ on every triangle.

    ``n`` corner columns and ``rows`` corner rows (default ``n``).  With
    ``periodic=True`` the x direction closes into a cylinder (``n`` even,
    at least 4) and the boundary is the top and bottom corner rows; otherwise
    the patch is open and the boundary is its perimeter.
    """
    m = n if rows is None else rows
    if n < 2 or m < 2:
        raise LatticeError("Union Jack lattice needs at least 2 corner rows and columns")
    if periodic and (n < 4 or n % 2):
        raise LatticeError("periodic Union Jack needs an even number >= 4 of columns")
    coords = []
    for j in range(m):
        for i in range(n):
            coords.append(((2 * i, 2 * j), "red" if (i + j) % 2 == 0 else "blue"))
    n_sq_x = n if periodic else n - 1
    for j in range(m - 1):
        for i in range(n_sq_x):
            coords.append(((2 * i + 1, 2 * j + 1), "green"))
    idx = {c: q for q, (c, _) in enumerate(coords)}

    def corner(i, j):
        return idx[(2 * (i % n), 2 * j)]

    terms, faces = [], []
    for j in range(m - 1):
        for i in range(n_sq_x):
            o = idx[(2 * i + 1, 2 * j + 1)]
            a, b, c, d = corner(i, j), corner(i + 1, j), corner(i + 1, j + 1), corner(i, j + 1)
            for tri in ((o, a, b), (o, b, c), (o, c, d), (o, d, a)):
                faces.append(tri)
                terms.append(HamTerm(Z_PRODUCT, support=tri, angle=QUARTER_PI, sign=-1))
    if periodic:
        boundary = [corner(i, j) for j in (0, m - 1) for i in range(n)]
    else:
        boundary = [corner(i, j) for j in range(m) for i in range(n)
                    if i in (0, n - 1) or j in (0, m - 1)]
    by_color = {"red": [], "blue": [], "green": []}
    for q, (_, col) in enumerate(coords):
        by_color[col].append(q)
    params = {"n": n, "rows": m, "periodic": periodic}
    return _finish("union_jack", params, coords, terms, _two_color_flips(by_color), boundary,
                   _edges_in_one_face(faces), expect_plus_boundary=periodic, check=check)


# -- triangular ----------------------------------------------------------------

_TRI_COLORS = ("red", "blue", "green")


def build_triangular(n: int, *, shape: str = "triangle", check: bool = True) -> LatticeSpec:
    """Triangular lattice patch driven by ZZZ on up and down triangles.

    ``shape="triangle"``: a large up-triangle with ``n`` sites per side (n >= 2).
    ``shape="hexagon"``: a hexagon of radius ``n`` (n >= 1).
    Axial coordinates (i, j); the third lattice direction is (1, -1).
    """
    if shape == "triangle":
        if n < 2:
            raise LatticeError("triangle patch needs n >= 2")
        pts = [(i, j) for j in range(n) for i in range(n - j)]
    elif shape == "hexagon":
        if n < 1:
            raise LatticeError("hexagon patch needs radius >= 1")
        pts = [(i, j) for j in range(-n, n + 1) for i in range(-n, n + 1) if abs(i + j) <= n]
    else:
        raise LatticeError(f"unknown triangular shape {shape!r}")
    coords = [(p, _TRI_COLORS[(p[0] - p[1]) % 3]) for p in pts]
    idx = {c: q for q, (c, _) in enumerate(coords)}
    faces = []
    lo_i, hi_i = min(p[0] for p in pts), max(p[0] for p in pts)
    lo_j, hi_j = min(p[1] for p in pts), max(p[1] for p in pts)
    # anchors range over the bounding box: a down triangle's anchor may lie outside the patch
    for i, j in product(range(lo_i - 1, hi_i + 1), range(lo_j - 1, hi_j + 1)):
        up = [(i, j), (i + 1, j), (i, j + 1)]
        down = [(i + 1, j), (i, j + 1), (i + 1, j + 1)]
        for tri in (up, down):
            if all(p in idx for p in tri):
                faces.append(tuple(idx[p] for p in tri))
    terms = [HamTerm(Z_PRODUCT, support=f, angle=QUARTER_PI, sign=-1) for f in faces]
    touching = Counter(q for f in faces for q in f)
    boundary = [q for q in range(len(pts)) if touching[q] < 6]
    by_color = {c: [] for c in _TRI_COLORS}
    for q, (_, col) in enumerate(coords):
        by_color[col].append(q)
    params = {"n": n, "shape": shape}
    return _finish("triangular", params, coords, terms, _two_color_flips(by_color), boundary,
                   _edges_in_one_face(faces), bulk_flips_to_minus=True,
                   expect_plus_boundary=False, check=check)


# -- FCC -----------------------------------------------------------------------

def build_fcc(nx: int, ny: int, nz: int, *, periodic: bool = True, check: bool = True) -> LatticeSpec:
    """FCC slab of nx*ny*nz cubes (side 2) with tetrahedral ZZZZ terms.

    Sites are the integer points with even coordinate sum.  With
    ``periodic=True`` y and z wrap around (ny, nz >= 2) and the boundary is
    the pair of (100) faces x = 0 and x = 2*nx; otherwise the box is open and
    its whole surface is boundary.
    """
    if min(nx, ny, nz) < 1:
        raise LatticeError("FCC slab needs at least one cube in every direction")
    if periodic and min(ny, nz) < 2:
        raise LatticeError("periodic FCC slab needs ny, nz >= 2")
    py, pz = 2 * ny, 2 * nz
    yr = range(py) if periodic else range(py + 1)
    zr = range(pz) if periodic else range(pz + 1)
    pts = [(x, y, z) for x in range(2 * nx + 1) for y in yr for z in zr if (x + y + z) % 2 == 0]
    coords = [(p, "corner" if all(c % 2 == 0 for c in p) else "face") for p in pts]
    idx = {c: q for q, (c, _) in enumerate(coords)}

    def site(x, y, z):
        if periodic:
            y, z = y % py, z % pz
        return idx[(x, y, z)]

    terms = []
    for cx, cy, cz in product(range(nx), range(ny), range(nz)):
        ox, oy, oz = 2 * cx, 2 * cy, 2 * cz
        for dx, dy, dz in product((0, 2), repeat=3):
            tet = (site(ox + dx, oy + dy, oz + dz),
                   site(ox + dx, oy + 1, oz + 1),
                   site(ox + 1, oy + dy, oz + 1),
                   site(ox + 1, oy + 1, oz + dz))
            terms.append(HamTerm(Z_PRODUCT, support=tet, angle=QUARTER_PI, sign=-1))

    if periodic:
        faces_x = (0, 2 * nx)
        boundary = [q for q, (p, _) in enumerate(coords) if p[0] in faces_x]
    else:
        boundary = [q for q, (p, _) in enumerate(coords)
                    if p[0] in (0, 2 * nx) or p[1] in (0, py) or p[2] in (0, pz)]
    bset = set(boundary)
    target = set()
    for q, (p, kind) in enumerate(coords):
        if kind != "corner" or q not in bset:
            continue
        x, y, z = p
        # the four in-plane face-centre neighbours on every exterior face through p
        planes = []
        if x in (0, 2 * nx):
            planes.append([(x, y + a, z + b) for a in (-1, 1) for b in (-1, 1)])
        if not periodic:
            if y in (0, py):
                planes.append([(x + a, y, z + b) for a in (-1, 1) for b in (-1, 1)])
            if z in (0, pz):
                planes.append([(x + a, y + b, z) for a in (-1, 1) for b in (-1, 1)])
        for plane in planes:
            for nb in plane:
                key = (nb[0], nb[1] % py, nb[2] % pz) if periodic else nb
                r = idx.get(key)
                if r is not None and r in bset:
                    target.add(tuple(sorted((q, r))))

    syms = []
    for axis, name in enumerate(("(100)", "(010)", "(001)")):
        values = sorted({p[axis] for p, _ in coords})
        for v in values:
            supp = tuple(q for q, (p, _) in enumerate(coords) if p[axis] == v)
            syms.append(SymmetryGen(f"plane {name} {'xyz'[axis]}={v}", supp))
    params = {"nx": nx, "ny": ny, "nz": nz, "periodic": periodic}
    return _finish("fcc", params, coords, terms, syms, boundary, sorted(target),
                   expect_plus_boundary=periodic, check=check)


# -- fractal stacks --------------------------------------------------------------

def fractal_gate_polys(f: F2LaurentPoly, kind: str, i: int, j: int, k: int):
    """Blue and red arguments ``(A, B)`` of the gate ``CZ(A, B s)``.

    V  = CZ(x^i y^j z^k (1+z),      x^i y^j z^k (1+f y) s)
    V' = CZ(x^i y^j z^(k+1) (1+f~ y~), x^i y^j z^k (1+z) s)

    (``~`` is conjugation.)  V ties blue site (i,j) on layers k and k+1 to its
    red neighbours on layer k; V' ties red site (i,j) on layers k and k+1 to
    its blue neighbours on layer k+1.  Both use the neighbour pattern of the
    target cluster, where blue (i,j) couples to red ``(1 + f y)``.
    """
    one_z = f2poly.ONE + f2poly.Z
    up = f2poly.ONE + f * f2poly.Y
    if kind == "V":
        return one_z.shift(i, j, k), up.shift(i, j, k)
    if kind == "V'":
        down = up.conj()
        return down.shift(i, j, k + 1), one_z.shift(i, j, k)
    raise ValueError(f"unknown fractal gate {kind!r}")


def fractal_gate_polys_uncorrected(f: F2LaurentPoly, kind: str, i: int, j: int, k: int):
    """Uncorrected gate formulas with the z-offset and f placement swapped (for mutation tests).

    Used to show that, read literally, the layer offsets do not cancel in the bulk.
    """
    one_z = f2poly.ONE + f2poly.Z
    down = f2poly.ONE + (f * f2poly.Y).conj()
    up = f2poly.ONE + f * f2poly.Y
    if kind == "V":
        return one_z.shift(i, j, k), down.shift(i, j, k)
    if kind == "V'":
        return up.shift(i, j, k), one_z.shift(i, j, k)
    raise ValueError(f"unknown fractal gate {kind!r}")


class _FractalGeometry:
    def __init__(self, nx, ny, L, periodic_x, periodic_y):
        self.nx, self.ny, self.L = nx, ny, L
        self.px = nx if periodic_x else None
        self.py = ny if periodic_y else None
        self.coords = [((i, j, k, m), "red" if m else "blue")
                       for k in range(L + 1) for m in (0, 1) for j in range(ny) for i in range(nx)]
        self.idx = {c: q for q, (c, _) in enumerate(self.coords)}

    def site_of(self, mono) -> Optional[int]:
        i, j, k, m = mono
        if self.px is not None:
            i %= self.px
        if self.py is not None:
            j %= self.py
        return self.idx.get((i, j, k, m))

    def sites_of(self, poly: F2LaurentPoly, m: int) -> list:
        """Sites of ``poly`` on sublattice ``m``; monomials outside the lattice are dropped."""
        out = Counter()
        for (i, j, k, _) in poly.terms:
            q = self.site_of((i, j, k, m))
            if q is not None:
                out[q] += 1
        return sorted(q for q, c in out.items() if c % 2)


def fractal_symmetry_polys(f: F2LaurentPoly, a: int, nx: int, ny: int, L: int,
                           periodic_x: bool = True, periodic_y: bool = False):
    """Blue and red fractal generators with first-row monomial ``x^a``, as polynomials.

    Blue: ``q F(x,y) * sum_l z^l`` grows upward from row 0.
    Red:  ``q y^(ny-1) conj(F) * sum_l z^l`` grows downward from the top row.
    Both are truncated to the lattice rows (or wrapped when ``periodic_y``).
    """
    px = nx if periodic_x else None
    q = f2poly.F2LaurentPoly.monomial(a)
    layers = F2LaurentPoly((0, 0, l, 0) for l in range(L + 1))
    rows = ny - 1
    blue2d = f2poly.symmetry_support(q, f, rows, px)
    red2d = (q * f2poly.ca_expand(f, rows, px).conj()).shift(0, ny - 1, 0).wrap(px)
    if not periodic_x:
        blue2d = F2LaurentPoly(t for t in blue2d.terms if 0 <= t[0] < nx)
        red2d = F2LaurentPoly(t for t in red2d.terms if 0 <= t[0] < nx)
    return blue2d * layers, red2d * layers


def _closes_periodically(f: F2LaurentPoly, nx: int, ny: int) -> bool:
    row = f2poly.ONE
    for _ in range(ny):
        row = (row * f).wrap(nx)
    return row == f2poly.ONE


def build_fractal_stack(f, nx: int, ny: int, L: int, *, periodic_x: bool = True,
                        periodic_y: bool = False, check: bool = True,
                        gate_polys=None) -> LatticeSpec:
    """Stack of L+1 two-sublattice layers pumping fractal cluster states to layers 0 and L.

    ``f`` is the cellular-automaton rule (a polynomial in x, or its text form).
    With an open y direction the generators meet their apex row at the lattice
    edge; those edge pairs are reported (and exempted) by the symmetry check.
    ``periodic_y`` requires ``f^ny == 1`` modulo ``x^nx - 1``.
    ``gate_polys`` overrides :func:`fractal_gate_polys` (used for mutation tests).
    """
    if isinstance(f, str):
        f = f2poly.parse(f)
    if not f or not f.is_x_only():
        raise LatticeError(f"update rule must be a non-zero polynomial in x alone, got {f}")
    exps = f.x_exponents()
    span = exps[-1] - exps[0] + 1
    if L < 1:
        raise LatticeError("need at least one layer step (L >= 1)")
    if ny < 2:
        raise LatticeError("need ny >= 2")
    if nx < span or (periodic_x and nx <= span - 1) or nx < 2:
        raise LatticeError(f"nx={nx} is narrower than the rule span {span}")
    if periodic_y:
        if not periodic_x:
            raise LatticeError("periodic y requires periodic x")
        if not _closes_periodically(f, nx, ny):
            raise LatticeError(f"rule {f} does not close on a {nx}x{ny} torus (f^ny != 1)")
    geo = _FractalGeometry(nx, ny, L, periodic_x, periodic_y)

    terms = []
    for k in range(L):
        for kind in ("V", "V'"):
            for j in range(ny):
                for i in range(nx):
                    A, B = (gate_polys or fractal_gate_polys)(f, kind, i, j, k)
                    blue = geo.sites_of(A, 0)
                    red = geo.sites_of(B, 1)
                    pairs = tuple((b, r) for b in blue for r in red)
                    if pairs:
                        terms.append(HamTerm(CZ_PRODUCT, pairs=pairs, angle=HALF_PI, sign=1,
                                             tag=(kind, i, j, k)))
    boundary = [q for q, (c, _) in enumerate(geo.coords) if c[2] in (0, L)]
    target = set()
    up = f2poly.ONE + f * f2poly.Y
    for k in (0, L):
        for j in range(ny):
            for i in range(nx):
                b = geo.idx[(i, j, k, 0)]
                for r in geo.sites_of(up.shift(i, j, k), 1):
                    target.add((b, r))
    syms = []
    for a in range(nx):
        blue, red = fractal_symmetry_polys(f, a, nx, ny, L, periodic_x, periodic_y)
        if periodic_y:
            blue, red = blue.wrap(None, ny), red.wrap(None, ny)
        bs = tuple(geo.sites_of(blue, 0))
        rs = tuple(geo.sites_of(red, 1))
        if bs:
            syms.append(SymmetryGen(f"fractal q=x^{a} blue", bs, ("fractal", a, 0)))
        if rs:
            syms.append(SymmetryGen(f"fractal q=x^{a} red", rs, ("fractal", a, 1)))
    params = {"f": str(f), "nx": nx, "ny": ny, "L": L,
              "periodic_x": periodic_x, "periodic_y": periodic_y}
    return _finish("fractal", params, geo.coords, terms, syms, boundary, sorted(target), check=check)


def build_honeycomb_stack(nx: int, ny: int, L: int, **kwargs) -> LatticeSpec:
    """Honeycomb cluster pump: the fractal stack with the Sierpinski rule ``1 + x``."""
    spec = build_fractal_stack(f2poly.parse("1 + x"), nx, ny, L, **kwargs)
    return LatticeSpec(**{**spec.__dict__, "family": "honeycomb", "_coord_index": None})


BUILDERS = {
    "square": build_square,
    "union_jack": build_union_jack,
    "triangular": build_triangular,
    "fcc": build_fcc,
    "fractal": build_fractal_stack,
    "honeycomb": build_honeycomb_stack,
}
