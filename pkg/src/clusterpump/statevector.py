"""Dense statevector backend for small instances.

Amplitude index ``b`` stores qubit ``q`` in bit ``q`` of ``b``.  A Pauli
``i**phase X^x Z^z`` (masks ``x``, ``z`` as Python ints) acts as

    (P v)[b ^ x] = i**phase * (-1)**popcount(z & b) * v[b]
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from clusterpump.lattice import CZ_PRODUCT, Z_PRODUCT, LatticeSpec
from clusterpump.pauli import CliffordCircuit, PauliOperator
from clusterpump.tableau import StabilizerTableau

DEFAULT_CAP = 22


class CapExceeded(MemoryError):
    pass


def _mask(sites: Iterable[int]) -> int:
    m = 0
    for q in sites:
        m ^= 1 << int(q)
    return m


def _basis(n: int) -> np.ndarray:
    return np.arange(1 << n, dtype=np.int64)


def _parity(values: np.ndarray, mask: int) -> np.ndarray:
    return (np.bitwise_count(values & mask) & 1).astype(np.int8)


class DenseState:
    """``2**n`` complex amplitudes, mutated in place by the gate methods."""

    def __init__(self, n: int, amplitudes: Optional[np.ndarray] = None, cap: int = DEFAULT_CAP):
        if n > cap:
            raise CapExceeded(f"{n} qubits exceeds the statevector cap of {cap}")
        self.n = n
        self.cap = cap
        if amplitudes is None:
            amplitudes = np.zeros(1 << n, dtype=np.complex128)
            amplitudes[0] = 1.0
        amplitudes = np.asarray(amplitudes, dtype=np.complex128)
        if amplitudes.shape != (1 << n,):
            raise ValueError(f"expected {1 << n} amplitudes, got {amplitudes.shape}")
        self.amplitudes = amplitudes.copy()

    @classmethod
    def plus_state(cls, n: int, cap: int = DEFAULT_CAP) -> "DenseState":
        if n > cap:
            raise CapExceeded(f"{n} qubits exceeds the statevector cap of {cap}")
        return cls(n, np.full(1 << n, 2.0 ** (-n / 2), dtype=np.complex128), cap)

    def copy(self) -> "DenseState":
        return DenseState(self.n, self.amplitudes, self.cap)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def inner(self, other: "DenseState") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def _check(self, q: int) -> None:
        if not 0 <= q < self.n:
            raise ValueError(f"qubit {q} out of range for n={self.n}")

    # -- gates -----------------------------------------------------------------
    def _view(self, q: int) -> np.ndarray:
        # axis 1 of the view is qubit q's bit
        return self.amplitudes.reshape(-1, 2, 1 << q)

    def apply_diag_phase(self, q: int, phase1: complex) -> None:
        self._check(q)
        self._view(q)[:, 1, :] *= phase1

    def h(self, q: int) -> None:
        self._check(q)
        v = self._view(q)
        a, b = v[:, 0, :].copy(), v[:, 1, :].copy()
        v[:, 0, :] = (a + b) / math.sqrt(2)
        v[:, 1, :] = (a - b) / math.sqrt(2)

    def x(self, q: int) -> None:
        self._check(q)
        v = self._view(q)
        v[:, [0, 1], :] = v[:, [1, 0], :]

    def cz(self, a: int, b: int) -> None:
        self._check(a)
        self._check(b)
        idx = _basis(self.n)
        sel = ((idx >> a) & (idx >> b) & 1).astype(bool)
        self.amplitudes[sel] *= -1

    def apply_gate(self, name: str, *qs: int) -> None:
        name = name.upper()
        if name == "S":
            self.apply_diag_phase(qs[0], 1j)
        elif name == "SDG":
            self.apply_diag_phase(qs[0], -1j)
        elif name == "Z":
            self.apply_diag_phase(qs[0], -1)
        elif name == "X":
            self.x(qs[0])
        elif name == "H":
            self.h(qs[0])
        elif name == "CZ":
            self.cz(*qs)
        else:
            raise ValueError(f"unsupported gate {name!r}")

    def apply_circuit(self, c: CliffordCircuit, with_phase: bool = True) -> "DenseState":
        if c.n != self.n:
            raise ValueError(f"circuit acts on {c.n} qubits, state has {self.n}")
        for g in c.gates:
            self.apply_gate(*g)
        if with_phase:
            self.amplitudes *= np.exp(1j * math.pi / 4 * c.global_phase)
        return self

    def apply_pauli(self, p: PauliOperator) -> np.ndarray:
        """Return ``P|psi>`` as a new amplitude array."""
        if p.n != self.n:
            raise ValueError("size mismatch")
        xm = _mask(np.flatnonzero(p.x_bits))
        zm = _mask(np.flatnonzero(p.z_bits))
        return pauli_action(self.amplitudes, xm, zm, p.phase)

    def expectation(self, p: PauliOperator) -> complex:
        return complex(np.vdot(self.amplitudes, self.apply_pauli(p)))

    def dump(self) -> bytes:
        """Little-endian (real, imag) float64 pairs."""
        return self.amplitudes.astype("<c16").tobytes()

    @classmethod
    def load(cls, data: bytes, cap: int = DEFAULT_CAP) -> "DenseState":
        amps = np.frombuffer(data, dtype="<c16")
        n = int(round(math.log2(amps.size)))
        return cls(n, amps, cap)


def pauli_action(v: np.ndarray, xmask: int, zmask: int, phase: int = 0) -> np.ndarray:
    idx = np.arange(v.size, dtype=np.int64)
    signs = 1 - 2 * _parity(idx, zmask).astype(np.float64)
    out = np.empty_like(v)
    out[idx ^ xmask] = v * signs
    return out * (1j ** (phase % 4))


# -- Hamiltonians -----------------------------------------------------------------

@dataclass
class DiagonalHamiltonian:
    """Per-basis-state real energies ``E(b)``."""

    n: int
    energies: np.ndarray = None

    def __post_init__(self):
        if self.energies is None:
            self.energies = np.zeros(1 << self.n, dtype=np.float64)
        self.energies = np.asarray(self.energies, dtype=np.float64)

    def add_z_product(self, sites: Sequence[int], coeff: float) -> "DiagonalHamiltonian":
        idx = _basis(self.n)
        self.energies += coeff * (1 - 2 * _parity(idx, _mask(sites)).astype(np.float64))
        return self

    def add_cz_product(self, pairs: Sequence[tuple], coeff: float) -> "DiagonalHamiltonian":
        idx = _basis(self.n)
        par = np.zeros(idx.size, dtype=np.int64)
        for a, b in pairs:
            par ^= (idx >> a) & (idx >> b) & 1
        self.energies += coeff * (1 - 2 * par.astype(np.float64))
        return self

    def add_term(self, term) -> "DiagonalHamiltonian":
        """Add a lattice ``HamTerm`` (coefficient = its sign) or a diagonal ``PauliTerm``."""
        if isinstance(term, PauliTerm):
            if term.x_sites:
                raise ValueError("term is not diagonal")
            return self.add_z_product(term.z_sites, term.coeff)
        if term.kind == Z_PRODUCT:
            return self.add_z_product(term.support, term.sign)
        if term.kind == CZ_PRODUCT:
            return self.add_cz_product(term.pairs, term.sign)
        raise ValueError(f"unknown term kind {term.kind}")


@dataclass(frozen=True)
class PauliTerm:
    """``coeff * X(x_sites) Z(z_sites)`` with disjoint site sets (Hermitian)."""

    coeff: float
    z_sites: tuple = ()
    x_sites: tuple = ()

    def __post_init__(self):
        if set(self.z_sites) & set(self.x_sites):
            raise ValueError("x_sites and z_sites must be disjoint")


def lattice_hamiltonian(spec: LatticeSpec, extra: Sequence = ()) -> DiagonalHamiltonian:
    h = DiagonalHamiltonian(spec.n)
    for t in spec.terms:
        h.add_term(t)
    for t in extra:
        h.add_term(t)
    return h


def evolve_diagonal(psi: DenseState, h: DiagonalHamiltonian, t: float) -> DenseState:
    if h.n != psi.n:
        raise ValueError("Hamiltonian and state sizes differ")
    psi.amplitudes *= np.exp(-1j * t * h.energies)
    return psi


def _apply_offdiag(v: np.ndarray, terms: Sequence[PauliTerm], n: int) -> np.ndarray:
    out = np.zeros_like(v)
    for term in terms:
        out += term.coeff * pauli_action(v, _mask(term.x_sites), _mask(term.z_sites))
    return out


def evolve_general(psi: DenseState, h: DiagonalHamiltonian, offdiag: Sequence[PauliTerm], t: float,
                   tol: float = 1e-10, max_terms: int = 80) -> DenseState:
    """``psi <- exp(-i t (H_diag + sum offdiag)) psi`` by a scaled truncated Taylor series.

    The spectrum is centred with a scalar shift, the time step is chosen so
    that ``||H_shifted|| * dt <= 1`` (using the triangle-inequality bound) and
    each step sums the series until the next term falls below ``tol / steps``.
    """
    if h.n != psi.n:
        raise ValueError("Hamiltonian and state sizes differ")
    offdiag = list(offdiag)
    if not offdiag:
        return evolve_diagonal(psi, h, t)
    emax, emin = float(h.energies.max()), float(h.energies.min())
    shift = 0.5 * (emax + emin)
    diag = h.energies - shift
    bound = 0.5 * (emax - emin) + sum(abs(term.coeff) for term in offdiag)
    steps = max(1, math.ceil(bound * abs(t)))
    dt = t / steps
    v = psi.amplitudes
    for _ in range(steps):
        acc = v.copy()
        term = v
        for k in range(1, max_terms + 1):
            term = (-1j * dt / k) * (diag * term + _apply_offdiag(term, offdiag, psi.n))
            acc += term
            if np.linalg.norm(term) < tol / (10 * steps):
                break
        else:
            raise RuntimeError("Taylor series did not converge within the term cap")
        v = acc
    psi.amplitudes = v * np.exp(-1j * shift * t)
    return psi


def energy(psi: DenseState, h: DiagonalHamiltonian, offdiag: Sequence[PauliTerm] = ()) -> float:
    v = psi.amplitudes
    hv = h.energies * v + _apply_offdiag(v, list(offdiag), psi.n)
    return float(np.vdot(v, hv).real)


# -- measurement and fidelity ---------------------------------------------------------

def measure_x(psi: DenseState, qubit: int, postselect="plus", seed: Optional[int] = None):
    """Project ``qubit`` with ``(1 +- X)/2``; returns (state, outcome, probability).

    ``postselect`` is ``"plus"``, ``"minus"`` or ``"sample"`` (needs ``seed``).
    The probability is that of the returned outcome, before renormalisation.
    """
    psi._check(qubit)
    v = psi.amplitudes
    flipped = pauli_action(v, 1 << qubit, 0)
    plus = 0.5 * (v + flipped)
    p_plus = float(np.vdot(plus, plus).real)
    if postselect == "sample":
        if seed is None:
            raise ValueError("sampling needs an explicit seed")
        rng = np.random.default_rng(seed)
        outcome = "plus" if rng.random() < p_plus else "minus"
    elif postselect in ("plus", "minus"):
        outcome = postselect
    else:
        raise ValueError(f"unknown postselect mode {postselect!r}")
    proj = plus if outcome == "plus" else v - plus
    prob = p_plus if outcome == "plus" else float(np.vdot(proj, proj).real)
    if prob <= 1e-15:
        raise ValueError(f"outcome {outcome} has zero probability")
    return DenseState(psi.n, proj / math.sqrt(prob), psi.cap), outcome, prob


def fidelity(psi: DenseState, target: StabilizerTableau, region: Sequence[int]) -> float:
    """``<psi| prod_g (1+g)/2 |psi>`` with ``target``'s generators placed on ``region``."""
    region = [int(q) for q in region]
    if target.n != len(region):
        raise ValueError(f"target has {target.n} qubits but region has {len(region)}")
    if len(set(region)) != len(region) or any(not 0 <= q < psi.n for q in region):
        raise ValueError("invalid region")
    phi = psi.amplitudes.copy()
    for g in target.generators():
        xm = _mask(region[q] for q in np.flatnonzero(g.x_bits))
        zm = _mask(region[q] for q in np.flatnonzero(g.z_bits))
        phi = 0.5 * (phi + pauli_action(phi, xm, zm, g.phase))
    val = float(np.vdot(phi, phi).real)
    return min(1.0, max(0.0, val))
