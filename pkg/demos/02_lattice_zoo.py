"""
Other lattices: Union Jack, triangular, FCC
===========================================

Three-body ZZZ terms (and four-body on FCC tetrahedra) at t = pi/4 become
S gates plus CZ on every pair.  What survives depends on how many terms
meet at each site.
"""

from clusterpump import build_fcc, build_triangular, build_union_jack
from clusterpump.checks import verify_pump
from clusterpump.compiler import compile_pump


def show(name, spec):
    cp = compile_pump(spec)
    rep = verify_pump(spec, cp.reduced)
    g = cp.summary()["reduced_gates"]
    print(f"{name:28s} n={spec.n:4d}  S={g['S']:3d} SDG={g['SDG']:3d} Z={g['Z']:3d} CZ={g['CZ']:4d}"
          f"  passed={rep.passed}  dressing={rep.dressing_histogram()}")


# eight triangles per site on the Union Jack: all S powers cancel
show("union jack cylinder 8x8", build_union_jack(8))
# an open patch leaves a -X at each corner
show("union jack open 5x5", build_union_jack(5, periodic=False))

# six triangles per bulk site give S^6 = Z: the bulk flips to |->
show("triangular, triangle 8", build_triangular(8))
show("triangular, hexagon r=1", build_triangular(1, shape="hexagon"))
show("triangular, hexagon r=3", build_triangular(3, shape="hexagon"))

# FCC slab: both x faces end up as square-lattice cluster states
show("fcc 3x3x3", build_fcc(3, 3, 3))
