"""Symmetric perturbations of the pump, bulk measurement and post-selection.

The perturbed driving Hamiltonian is evolved exactly on a dense state; every
bulk qubit is then measured in the X basis.  Branches are enumerated exactly:
after Hadamards on the bulk the amplitude tensor splits into one unnormalised
boundary state ``phi_m`` per bulk outcome string ``m``, with probability
``||phi_m||^2``.  A branch is accepted when every symmetry generator sees an
even number of defect outcomes on its bulk support.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import stats

from clusterpump.checks import term_commutes_with
from clusterpump.compiler import compile_pump
from clusterpump.lattice import BUILDERS, LatticeSpec
from clusterpump.statevector import (
    DEFAULT_CAP,
    CapExceeded,
    DenseState,
    PauliTerm,
    evolve_diagonal,
    evolve_general,
    lattice_hamiltonian,
    pauli_action,
)

Z_TYPE = "Z_TYPE"
X_TYPE = "X_TYPE"
PER_GENERATOR = "per_generator"
GLOBAL = "global"

CSV_COLUMNS = ("lattice", "nx", "ny", "n_boundary", "kind", "epsilon", "seed",
               "p_fail_exact", "p_fail_sampled", "fidelity_post", "accept_rule")


class SymmetryBreakingPerturbation(ValueError):
    pass


class DegenerateFit(ValueError):
    pass


@dataclass(frozen=True)
class PerturbationSpec:
    kind: str
    epsilon: float
    disorder_seed: Optional[int] = None

    def __post_init__(self):
        if self.kind not in (Z_TYPE, X_TYPE):
            raise ValueError(f"unknown perturbation kind {self.kind!r}")
        if not self.epsilon >= 0:
            raise ValueError("epsilon must be non-negative")


def perturbation_terms(spec: LatticeSpec, p: PerturbationSpec) -> list:
    """The added terms alone.

    ``Z_TYPE`` adds ``eps (Z_a Z_c + Z_b Z_d)`` on the two diagonals of every
    plaquette term; ``X_TYPE`` adds ``eps X_i`` on every site.  In disorder
    mode every added term gets an independent random sign.
    """
    if p.kind == Z_TYPE:
        if spec.family != "square":
            raise ValueError("diagonal ZZ perturbations are defined for the square lattice")
        pairs = []
        for t in spec.terms:
            a, b, c, d = (pr[0] for pr in t.pairs)
            pairs += [(a, c), (b, d)]
        terms = [PauliTerm(p.epsilon, z_sites=pr) for pr in pairs]
    else:
        terms = [PauliTerm(p.epsilon, x_sites=(q,)) for q in range(spec.n)]
    if p.disorder_seed is not None:
        signs = np.random.default_rng(p.disorder_seed).choice((-1.0, 1.0), size=len(terms))
        terms = [PauliTerm(s * t.coeff, t.z_sites, t.x_sites) for s, t in zip(signs, terms)]
    for t in terms:
        if not _symmetric(t, spec):
            raise SymmetryBreakingPerturbation(f"{t} does not commute with every symmetry generator")
    return terms


def _symmetric(term: PauliTerm, spec: LatticeSpec) -> bool:
    from clusterpump.lattice import Z_PRODUCT, HamTerm

    if not term.z_sites:
        return True
    probe = HamTerm(Z_PRODUCT, support=tuple(term.z_sites))
    return all(term_commutes_with(probe, set(g.support)) for g in spec.symmetries)


def perturbed_hamiltonian(spec: LatticeSpec, p: PerturbationSpec) -> list:
    """Base driving terms followed by the perturbation terms."""
    extra = perturbation_terms(spec, p) if p.epsilon > 0 else []
    return list(spec.terms) + extra


@dataclass
class RunResult:
    lattice: str
    nx: int
    ny: int
    n_qubits: int
    n_boundary: int
    kind: str
    epsilon: float
    seed: int
    p_fail: float
    p_fail_sampled: float
    p_fail_sampled_stderr: float
    fidelity_post: float
    accept_rule: str
    accepted_parity_rule: str
    symmetry_deviation: float
    n_samples: int

    def to_dict(self) -> dict:
        return asdict(self)

    def csv_row(self) -> dict:
        return {
            "lattice": self.lattice, "nx": self.nx, "ny": self.ny, "n_boundary": self.n_boundary,
            "kind": self.kind, "epsilon": _fmt(self.epsilon), "seed": self.seed,
            "p_fail_exact": _fmt(self.p_fail), "p_fail_sampled": _fmt(self.p_fail_sampled),
            "fidelity_post": _fmt(self.fidelity_post), "accept_rule": self.accept_rule,
        }


def _fmt(v: float) -> str:
    return f"{v:.12e}"


def _rule_text(rule: str, spec: LatticeSpec) -> str:
    defect = "|+>" if spec.bulk_flips_to_minus else "|->"
    if rule == PER_GENERATOR:
        return f"even number of {defect} outcomes on the bulk support of every symmetry generator"
    return f"even total number of {defect} outcomes in the bulk"


@dataclass
class Branches:
    """Exact bulk-measurement branches of a pumped state."""

    probs: np.ndarray  # (2^|bulk|,)
    phi: np.ndarray  # (2^|bulk|, 2^|boundary|) unnormalised boundary states
    accepted: np.ndarray  # bool per branch
    defects: np.ndarray  # defect bit-string per branch
    target: np.ndarray  # ideal boundary state
    boundary_masks: list  # (label, local mask, expected eigenvalue) per generator
    bulk: tuple
    boundary: tuple


def _final_state(spec: LatticeSpec, p: PerturbationSpec, cap: int) -> DenseState:
    if spec.n > cap:
        raise CapExceeded(f"{spec.n} qubits exceeds the statevector cap of {cap}")
    extra = perturbation_terms(spec, p) if p.epsilon > 0 else []
    diag = [t for t in extra if not t.x_sites]
    off = [t for t in extra if t.x_sites]
    h = lattice_hamiltonian(spec, diag)
    psi = DenseState.plus_state(spec.n, cap)
    t = spec.evolution_time
    if off:
        return evolve_general(psi, h, off, t)
    return evolve_diagonal(psi, h, t)


def _ideal_boundary_state(spec: LatticeSpec) -> np.ndarray:
    bnd = list(spec.boundary)
    local = {q: i for i, q in enumerate(bnd)}
    reduced = compile_pump(spec).reduced
    st = DenseState.plus_state(len(bnd))
    for name, *qs in reduced.gates:
        if all(q in local for q in qs):
            st.apply_gate(name, *(local[q] for q in qs))
    return st.amplitudes


def branch_states(spec: LatticeSpec, p: PerturbationSpec, rule: str = PER_GENERATOR,
                  cap: int = DEFAULT_CAP) -> Branches:
    psi = _final_state(spec, p, cap)
    n = spec.n
    bulk, bnd = tuple(spec.bulk), tuple(spec.boundary)
    for q in bulk:
        psi.h(q)
    # C-order reshape: axis a holds qubit n-1-a; put bulk[-1]..bulk[0], then boundary[-1]..boundary[0]
    order = [n - 1 - q for q in reversed(bulk)] + [n - 1 - q for q in reversed(bnd)]
    phi = psi.amplitudes.reshape([2] * n).transpose(order).reshape(1 << len(bulk), 1 << len(bnd))
    probs = np.einsum("ij,ij->i", phi.conj(), phi).real

    m = np.arange(1 << len(bulk), dtype=np.int64)
    defects = m ^ ((1 << len(bulk)) - 1) if spec.bulk_flips_to_minus else m
    pos_bulk = {q: i for i, q in enumerate(bulk)}
    pos_bnd = {q: i for i, q in enumerate(bnd)}
    accepted = np.ones(m.size, dtype=bool)
    masks = []
    for g in spec.symmetries:
        bm = sum(1 << pos_bulk[q] for q in g.support if q in pos_bulk)
        cm = sum(1 << pos_bnd[q] for q in g.support if q in pos_bnd)
        if rule == PER_GENERATOR:
            accepted &= (np.bitwise_count(defects & bm) & 1) == 0
        # G_bulk acts as (-1)^{|m & bm|} on a branch, so G_boundary must undo it
        expected = -1 if (spec.bulk_flips_to_minus and bin(bm).count("1") % 2) else 1
        masks.append((g.label, cm, expected))
    if rule == GLOBAL:
        accepted = (np.bitwise_count(defects) & 1) == 0
    elif rule != PER_GENERATOR:
        raise ValueError(f"unknown acceptance rule {rule!r}")
    return Branches(probs, phi, accepted, defects, _ideal_boundary_state(spec), masks, bulk, bnd)


def run_postselected(spec: LatticeSpec, p: PerturbationSpec, seed: int, *, rule: str = PER_GENERATOR,
                     n_samples: int = 10_000, cap: int = DEFAULT_CAP) -> RunResult:
    br = branch_states(spec, p, rule, cap)
    probs = np.clip(br.probs, 0.0, None)
    total = probs.sum()
    p_acc = float(probs[br.accepted].sum() / total)
    p_fail = min(1.0, max(0.0, 1.0 - p_acc))

    rng = np.random.default_rng(seed)
    draws = rng.choice(probs.size, size=n_samples, p=probs / total)
    rejected = ~br.accepted[draws]
    p_s = float(rejected.mean())
    se = math.sqrt(max(p_s * (1 - p_s), 1.0 / n_samples) / n_samples)

    acc = br.phi[br.accepted]
    overlaps = acc @ br.target.conj()
    fid = float(np.sum(np.abs(overlaps) ** 2) / (p_acc * total)) if p_acc > 0 else 0.0

    dev = 0.0
    for _, cm, expected in br.boundary_masks:
        g_acc = np.stack([pauli_action(row, cm, 0) for row in acc]) if acc.size else acc
        val = float(np.einsum("ij,ij->", acc.conj(), g_acc).real / (p_acc * total)) if p_acc > 0 else 1.0
        dev = max(dev, abs(expected - val))

    params = spec.params
    return RunResult(
        lattice=spec.family,
        nx=int(params.get("nx", params.get("n", 0))),
        ny=int(params.get("ny", params.get("rows", 0))),
        n_qubits=spec.n,
        n_boundary=len(spec.boundary),
        kind=p.kind,
        epsilon=float(p.epsilon),
        seed=int(seed),
        p_fail=p_fail,
        p_fail_sampled=p_s,
        p_fail_sampled_stderr=se,
        fidelity_post=min(1.0, max(0.0, fid)),
        accept_rule=rule,
        accepted_parity_rule=_rule_text(rule, spec),
        symmetry_deviation=dev,
        n_samples=n_samples,
    )


# -- fits and sweeps ---------------------------------------------------------------

@dataclass
class FitResult:
    slope: float
    intercept: float
    stderr: Optional[float]
    ci_low: Optional[float]
    ci_high: Optional[float]
    n_points: int

    def to_dict(self) -> dict:
        return asdict(self)


def fit_loglog(xs: Sequence[float], ys: Sequence[float], *, min_points: int = 3,
               confidence: float = 0.95) -> FitResult:
    """Least-squares slope of log y against log x over the points with x, y > 0.

    With exactly two points the slope is returned without a confidence
    interval; fewer than ``min_points`` usable points raise :class:`DegenerateFit`.
    """
    pts = [(float(x), float(y)) for x, y in zip(xs, ys) if x > 0 and y > 0]
    if len(pts) < max(2, min_points):
        raise DegenerateFit(f"need at least {max(2, min_points)} positive points, got {len(pts)}")
    lx = np.log([p[0] for p in pts])
    ly = np.log([p[1] for p in pts])
    if np.ptp(lx) == 0:
        raise DegenerateFit("all abscissae are equal")
    if len(pts) == 2:
        slope = float((ly[1] - ly[0]) / (lx[1] - lx[0]))
        return FitResult(slope, float(ly[0] - slope * lx[0]), None, None, None, 2)
    res = stats.linregress(lx, ly)
    half = float(stats.t.ppf(0.5 + confidence / 2, len(pts) - 2) * res.stderr)
    return FitResult(float(res.slope), float(res.intercept), float(res.stderr),
                     float(res.slope) - half, float(res.slope) + half, len(pts))


@dataclass
class SweepResult:
    rows: list
    eps_fits: dict = field(default_factory=dict)  # (size, kind) -> FitResult
    deficit_fits: dict = field(default_factory=dict)
    n_fits: dict = field(default_factory=dict)  # (eps, kind) -> FitResult

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        w.writeheader()
        for r in self.rows:
            w.writerow(r.csv_row())
        return buf.getvalue()

    def fits_dict(self) -> dict:
        def conv(d):
            return {" ".join(map(str, k)): (v.to_dict() if isinstance(v, FitResult) else v)
                    for k, v in sorted(d.items(), key=lambda kv: str(kv[0]))}
        return {"epsilon": conv(self.eps_fits), "fidelity_deficit": conv(self.deficit_fits),
                "n_boundary": conv(self.n_fits)}


def _job(args):
    family, dims, kind, eps, seed, rule, samples, cap = args
    spec = BUILDERS[family](*dims)
    return run_postselected(spec, PerturbationSpec(kind, eps), seed, rule=rule, n_samples=samples, cap=cap)


def sweep(family: str = "square", sizes: Sequence = ((4, 4),), epsilons: Sequence[float] = (),
          kinds: Sequence[str] = (Z_TYPE,), *, seed: int = 0, rule: str = PER_GENERATOR,
          n_samples: int = 10_000, workers: int = 1, cap: int = DEFAULT_CAP) -> SweepResult:
    """Run every (size, kind, epsilon) point and fit scaling exponents.

    Points run independently (in a process pool when ``workers > 1``) and are
    merged in (size, epsilon, kind, seed) order so the output is deterministic.
    """
    if family not in BUILDERS:
        raise ValueError(f"unknown lattice family {family!r}")
    for dims in sizes:
        n = BUILDERS[family](*dims, check=False).n
        if n > cap:
            raise CapExceeded(f"size {tuple(dims)} has {n} qubits, over the cap of {cap}")
    jobs = [(family, tuple(d), k, float(e), seed, rule, n_samples, cap)
            for d in sizes for e in epsilons for k in kinds]
    jobs.sort(key=lambda j: (j[1], j[3], j[2], j[4]))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_job, jobs))
    else:
        rows = [_job(j) for j in jobs]

    out = SweepResult(rows)
    for dims in sizes:
        for k in kinds:
            sel = [r for r, j in zip(rows, jobs) if j[1] == tuple(dims) and j[2] == k]
            key = (f"{dims[0]}x{dims[1]}", k)
            try:
                out.eps_fits[key] = fit_loglog([r.epsilon for r in sel], [r.p_fail for r in sel])
            except DegenerateFit as exc:
                out.eps_fits[key] = str(exc)
            try:
                out.deficit_fits[key] = fit_loglog([r.epsilon for r in sel],
                                                   [1.0 - r.fidelity_post for r in sel])
            except DegenerateFit as exc:
                out.deficit_fits[key] = str(exc)
    if len(sizes) >= 2:
        for e in epsilons:
            for k in kinds:
                sel = [r for r, j in zip(rows, jobs) if j[3] == float(e) and j[2] == k]
                try:
                    out.n_fits[(e, k)] = fit_loglog([r.n_boundary for r in sel], [r.p_fail for r in sel],
                                                    min_points=2)
                except DegenerateFit as exc:
                    out.n_fits[(e, k)] = str(exc)
    return out
