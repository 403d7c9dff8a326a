"""Acceptance suite: one test group per criterion, each recording a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines inline; the
combined summary is printed at the end of every run that includes this file.
"""

import math
import time

import numpy as np
import pytest

from clusterpump.checks import symmetry_check, verify_pump
from clusterpump.compiler import compile_pump, compile_z_term
from clusterpump.experiment import X_TYPE, Z_TYPE, sweep
from clusterpump.f2poly import F2LaurentPoly, commutation_poly, parse
from clusterpump.lattice import (
    build_fcc,
    build_fractal_stack,
    build_square,
    build_triangular,
    build_union_jack,
)
from clusterpump.pauli import PauliOperator, commutes
from clusterpump.statevector import DenseState, evolve_diagonal, fidelity, lattice_hamiltonian
from clusterpump.tableau import StabilizerTableau, apply_circuit, is_stabilized_by, new_plus_state, same_state

EPSILONS = (0.005, 0.01, 0.02, 0.04, 0.08)
SWEEP_SEED = 20240611


def _pumped(spec):
    t0 = time.perf_counter()
    cp = compile_pump(spec)
    rep = verify_pump(spec, cp.reduced)
    return cp, rep, time.perf_counter() - t0


# -- 1: three- and four-body decomposition ---------------------------------------

def _gate_diagonal(gates, w):
    # independent evaluation: S -> i^b, SDG -> (-i)^b, Z -> (-1)^b, CZ -> (-1)^(ab)
    b = (np.arange(1 << w)[:, None] >> np.arange(w)) & 1
    d = np.ones(1 << w, dtype=complex)
    for name, *qs in gates:
        if name == "CZ":
            d *= (-1.0) ** (b[:, qs[0]] & b[:, qs[1]])
        else:
            d *= {"S": 1j, "SDG": -1j, "Z": -1.0}[name] ** b[:, qs[0]]
    return d


@pytest.mark.parametrize("w", [3, 4])
def test_criterion_1_decomposition_identity(w, acceptance):
    best = math.inf
    for _ in range(20):
        t0 = time.perf_counter()
        gates, phase = compile_z_term(range(w), 1, math.pi / 4)
        d = _gate_diagonal(gates, w) * np.exp(1j * math.pi / 4 * phase)
        best = min(best, time.perf_counter() - t0)
    parity = np.array([bin(v).count("1") % 2 for v in range(1 << w)])
    target = np.exp(-1j * math.pi / 4 * (1 - 2 * parity))
    singles = sorted(g for g in gates if g[0] != "CZ")
    pairs = sorted(g for g in gates if g[0] == "CZ")
    # for w = 3 this is S1 S2 S3 CZ12 CZ23 CZ31
    shape_ok = singles == [("S", q) for q in range(w)] and len(pairs) == w * (w - 1) // 2
    exact = np.allclose(d, target, atol=1e-14, rtol=0)
    ratio = d / target
    up_to_phase = np.allclose(ratio, ratio[0], atol=1e-14, rtol=0)
    ok = exact and up_to_phase and shape_ok and best < 1e-3
    acceptance(1, f"w={w}", ok, f"2^{w} states exact, {best * 1e3:.3f} ms")
    assert exact and shape_ok
    assert best < 1e-3


# -- 2: square lattice --------------------------------------------------------------

@pytest.mark.parametrize("dims", [(2, 2), (3, 5), (8, 8), (17, 23), (30, 30)])
def test_criterion_2_square_pump(dims, acceptance):
    spec = build_square(*dims)
    cp, rep, dt = _pumped(spec)
    ok = rep.passed and rep.dressing_histogram()["X"] == len(spec.boundary) and dt < 2.0
    acceptance(2, f"{dims[0]}x{dims[1]}", ok, f"{spec.n} qubits, {dt:.3f} s")
    assert rep.passed and rep.bulk_invariant and rep.boundary_is_cluster and rep.factorized
    assert rep.boundary_signs_plus
    assert dt < 2.0


# -- 3: Union Jack --------------------------------------------------------------------

@pytest.mark.parametrize("n,rows", [(4, None), (8, None), (10, 6), (16, None)])
def test_criterion_3_union_jack_pump(n, rows, acceptance):
    spec = build_union_jack(n, rows)
    cp, rep, dt = _pumped(spec)
    g = cp.summary()["reduced_gates"]
    no_s = g["S"] == 0 and g["SDG"] == 0
    ok = rep.passed and no_s and dt < 2.0
    acceptance(3, f"n={n} rows={rows or n}", ok, f"{spec.n} qubits, S={g['S']} SDG={g['SDG']}, {dt:.3f} s")
    assert rep.passed and no_s
    assert dt < 2.0


# -- 4: triangular ----------------------------------------------------------------------

@pytest.mark.parametrize("n,shape", [(6, "triangle"), (12, "triangle"), (1, "hexagon"), (4, "hexagon")])
def test_criterion_4_triangular_pump(n, shape, acceptance):
    spec = build_triangular(n, shape=shape)
    cp, rep, dt = _pumped(spec)
    t = apply_circuit(new_plus_state(spec.n), cp.reduced)
    minus = all(is_stabilized_by(t, PauliOperator.from_sites(spec.n, [q], [], sign=-1)) for q in spec.bulk)
    ok = rep.passed and spec.bulk_flips_to_minus and minus and len(spec.bulk) > 0 and dt < 2.0
    acceptance(4, f"{shape} {n}", ok, f"{len(spec.bulk)} bulk sites in |->, {dt:.3f} s")
    assert rep.passed and minus and spec.bulk
    assert dt < 2.0


# -- 5: FCC slab ----------------------------------------------------------------------------

def _square_cluster_tableau(spec):
    """Bulk |+> times the square-lattice cluster on each x face, from coordinates alone."""
    coords = {s.index: s.coord for s in spec.sites}
    by_coord = {c: q for q, c in coords.items()}
    py, pz = 2 * spec.params["ny"], 2 * spec.params["nz"]
    gens = [PauliOperator.from_sites(spec.n, [q], []) for q in spec.bulk]
    for q in spec.boundary:
        x, y, z = coords[q]
        nbrs = [by_coord[(x, (y + dy) % py, (z + dz) % pz)] for dy in (-1, 1) for dz in (-1, 1)]
        gens.append(PauliOperator.from_sites(spec.n, [q], nbrs))
    order = list(spec.bulk) + list(spec.boundary)
    gens = [g for _, g in sorted(zip(order, gens), key=lambda p: p[0])]
    return StabilizerTableau.from_paulis(gens)


def test_criterion_5_fcc_pump(acceptance):
    t0 = time.perf_counter()
    spec = build_fcc(4, 4, 4)
    cp, rep, _ = _pumped(spec)
    pumped = apply_circuit(new_plus_state(spec.n), cp.reduced)
    expected = _square_cluster_tableau(spec)
    same = same_state(expected, pumped)
    faces = sorted({spec.sites[q].coord[0] for q in spec.boundary})
    dt = time.perf_counter() - t0
    ok = rep.passed and same and dt < 5.0
    acceptance(5, "4x4x4", ok, f"{spec.n} qubits, faces x={faces}, group equal={same}, {dt:.3f} s")
    assert rep.passed and same
    assert dt < 5.0


# -- 6: fractal stacks ----------------------------------------------------------------------

@pytest.mark.parametrize("rule", ["1+x", "1+x+x^2"])
def test_criterion_6_fractal_pump(rule, acceptance):
    t0 = time.perf_counter()
    L = 3
    spec = build_fractal_stack(parse(rule), 8, 8, L)
    cp, rep, _ = _pumped(spec)
    cert = symmetry_check(spec)
    dt = time.perf_counter() - t0
    layers = sorted({spec.sites[q].coord[2] for q in spec.boundary})
    # every generator/gate pair was cross-checked, and the gates of every layer commute
    agree = cert.polynomial_checked == cert.n_pairs and not cert.polynomial_mismatches
    ok = rep.passed and layers == [0, L] and cert.passed and agree and dt < 10.0
    acceptance(6, f"f={rule}", ok, f"{spec.n} qubits, boundary layers {layers}, {cert.polynomial_checked} pairs "
                                   f"agree, {len(cert.exempt)} apex exemptions, {dt:.2f} s")
    assert rep.passed and layers == [0, L]
    assert cert.passed and agree
    assert dt < 10.0


# -- 7 and 8: perturbations -----------------------------------------------------------------

@pytest.fixture(scope="module")
def perturbation_sweep():
    t0 = time.perf_counter()
    res = sweep("square", [(3, 3), (4, 4)], EPSILONS, [Z_TYPE, X_TYPE], seed=SWEEP_SEED, n_samples=20_000)
    return res, time.perf_counter() - t0


@pytest.mark.parametrize("kind", [Z_TYPE, X_TYPE])
def test_criterion_7_epsilon_scaling(kind, perturbation_sweep, acceptance):
    res, dt = perturbation_sweep
    slope = res.eps_fits[("4x4", kind)].slope
    deficit = res.deficit_fits[("4x4", kind)].slope
    ok = 1.8 <= slope <= 2.2 and deficit >= 1.8 and dt < 300
    acceptance(7, f"{kind} 4x4", ok, f"eps-slope {slope:.3f}, deficit exponent {deficit:.3f}, sweep {dt:.1f} s")
    assert 1.8 <= slope <= 2.2
    assert deficit >= 1.8
    assert dt < 300


@pytest.mark.parametrize("kind", [Z_TYPE, X_TYPE])
def test_criterion_7_boundary_size_scaling(kind, perturbation_sweep, acceptance):
    res, _ = perturbation_sweep
    fit = res.n_fits[(0.02, kind)]
    ok = 0.5 <= fit.slope <= 1.5
    acceptance(7, f"{kind} N-slope 3x3->4x4", ok, f"slope {fit.slope:.3f} from {fit.n_points} sizes")
    assert 0.5 <= fit.slope <= 1.5


def test_criterion_8_accepted_branch_symmetry(perturbation_sweep, acceptance):
    res, _ = perturbation_sweep
    worst = max(r.symmetry_deviation for r in res.rows)
    ok = worst <= 1e-8
    acceptance(8, f"{len(res.rows)} points", ok, f"max deviation {worst:.2e}")
    assert worst <= 1e-8


# -- 9: cross-backend ------------------------------------------------------------------------

def _small_instances():
    out = [(f"square {a}x{b}", build_square(a, b)) for a in range(2, 5) for b in range(2, 6) if a * b <= 20]
    out += [(f"union-jack {n}x{m}", build_union_jack(n, m)) for n, m in [(4, 2), (4, 3), (6, 2)]]
    out += [(f"union-jack open {n}x{m}", build_union_jack(n, m, periodic=False))
            for n, m in [(2, 2), (3, 2), (3, 3), (4, 3)]]
    out += [(f"triangle {n}", build_triangular(n)) for n in range(2, 6)]
    out += [("hexagon 1", build_triangular(1, shape="hexagon"))]
    out += [("fractal 1+x 2x2x1", build_fractal_stack(parse("1+x"), 2, 2, 1))]
    return [(name, s) for name, s in out if s.n <= 20]


def test_criterion_9_cross_backend(acceptance):
    worst_amp, worst_tab, names = 0.0, 0.0, []
    for name, spec in _small_instances():
        psi = evolve_diagonal(DenseState.plus_state(spec.n), lattice_hamiltonian(spec), spec.evolution_time)
        circ = compile_pump(spec).reduced
        phi = DenseState.plus_state(spec.n).apply_circuit(circ)
        amp = abs(1 - np.vdot(phi.amplitudes, psi.amplitudes))  # includes the global phase
        tab = 1 - fidelity(psi, apply_circuit(new_plus_state(spec.n), circ), range(spec.n))
        worst_amp, worst_tab = max(worst_amp, amp), max(worst_tab, tab)
        names.append(name)
    ok = worst_amp <= 1e-10 and worst_tab <= 1e-10
    acceptance(9, f"{len(names)} instances", ok, f"max |1-<circuit|evolved>| {worst_amp:.1e}, "
                                                 f"max tableau infidelity {worst_tab:.1e}")
    assert worst_amp <= 1e-10 and worst_tab <= 1e-10


# -- 10: F2 algebra --------------------------------------------------------------------------

def _random_poly(rng, max_terms=6):
    k = rng.integers(0, max_terms + 1)
    exps = rng.integers(-3, 4, size=(k, 3))
    marks = rng.integers(0, 2, size=k)
    return F2LaurentPoly([(int(i), int(j), int(l), int(m)) for (i, j, l), m in zip(exps, marks)])


def test_criterion_10_f2_algebra(acceptance):
    rng = np.random.default_rng(10)
    cases = 600
    t0 = time.perf_counter()
    for _ in range(cases):
        a, b, c = (_random_poly(rng) for _ in range(3))
        assert (a + b) + c == a + (b + c) and a + b == b + a and a + a == 0
        assert (a * b) * c == a * (b * c) and a * b == b * a and a * (b + c) == a * b + a * c
        assert a.conj().conj() == a and (a * b).conj() == a.conj() * b.conj()
        # bridge: coefficient at a shift equals the symplectic product of X(a) with the shifted Z(b)
        i, j, k = (int(v) for v in rng.integers(-2, 3, size=3))
        bt = b.shift(i, j, k)
        sites = sorted(set(a.terms) | set(bt.terms)) or [(0, 0, 0, 0)]
        idx = {t: q for q, t in enumerate(sites)}
        pa = PauliOperator.from_sites(len(idx), [idx[t] for t in a.terms], [])
        pb = PauliOperator.from_sites(len(idx), [], [idx[t] for t in bt.terms])
        assert commutation_poly(a, b).coeff(i, j, k) == (0 if commutes(pa, pb) else 1)
    dt = time.perf_counter() - t0
    ok = dt < 1.0
    acceptance(10, f"{cases} cases", ok, f"{dt:.3f} s")
    assert dt < 1.0
