"""Stabilizer tableau over packed F2 words.

Row ``g`` holds generator ``i**r[g] X^x[g] Z^z[g]`` (same convention as
:class:`~clusterpump.pauli.PauliOperator`).  Gates act on one bit column across
all rows at once, so a gate costs O(n) word operations; group-membership tests
bring a copy of the tableau to reduced row-echelon form once and then decompose
any number of query operators.
"""

from __future__ import annotations

from typing import Iterable, Optional, Sequence

import numpy as np

from clusterpump import _bits
from clusterpump.pauli import CliffordCircuit, PauliOperator

_ONE = np.uint64(1)


class StabilizerTableau:
    def __init__(self, n: int, x: np.ndarray, z: np.ndarray, r: np.ndarray):
        self.n = n
        self.x = np.ascontiguousarray(x, dtype=np.uint64)
        self.z = np.ascontiguousarray(z, dtype=np.uint64)
        self.r = np.asarray(r, dtype=np.uint8) & 3
        w = _bits.n_words(n)
        if self.x.shape != (n, w) or self.z.shape != (n, w) or self.r.shape != (n,):
            raise ValueError("tableau arrays have inconsistent shapes")
        self._rref_cache = None

    # -- construction --------------------------------------------------------
    @classmethod
    def from_paulis(cls, paulis: Sequence[PauliOperator]) -> "StabilizerTableau":
        n = paulis[0].n
        if len(paulis) != n:
            raise ValueError(f"need {n} generators, got {len(paulis)}")
        x = np.stack([p.x for p in paulis])
        z = np.stack([p.z for p in paulis])
        r = np.array([p.phase for p in paulis], dtype=np.uint8)
        return cls(n, x, z, r)

    def copy(self) -> "StabilizerTableau":
        return StabilizerTableau(self.n, self.x.copy(), self.z.copy(), self.r.copy())

    def generators(self) -> list[PauliOperator]:
        return [PauliOperator(self.n, self.x[g], self.z[g], int(self.r[g])) for g in range(self.n)]

    def labels(self) -> list[str]:
        return [p.label() for p in self.generators()]

    # -- gates ---------------------------------------------------------------
    def _touch(self):
        self._rref_cache = None

    def h(self, q: int) -> None:
        a = _bits.get_bit(self.x, q)
        c = _bits.get_bit(self.z, q)
        self.r = (self.r + 2 * (a & c).astype(np.uint8)) & 3
        d = a ^ c
        _bits.flip_bits(self.x, q, d)
        _bits.flip_bits(self.z, q, d)
        self._touch()

    def s(self, q: int) -> None:
        a = _bits.get_bit(self.x, q)
        self.r = (self.r + a.astype(np.uint8)) & 3
        _bits.flip_bits(self.z, q, a)
        self._touch()

    def sdg(self, q: int) -> None:
        a = _bits.get_bit(self.x, q)
        self.r = (self.r + 3 * a.astype(np.uint8)) & 3
        _bits.flip_bits(self.z, q, a)
        self._touch()

    def pauli_z(self, q: int) -> None:
        a = _bits.get_bit(self.x, q)
        self.r = (self.r + 2 * a.astype(np.uint8)) & 3
        self._touch()

    def pauli_x(self, q: int) -> None:
        c = _bits.get_bit(self.z, q)
        self.r = (self.r + 2 * c.astype(np.uint8)) & 3
        self._touch()

    def cz(self, q1: int, q2: int) -> None:
        a1 = _bits.get_bit(self.x, q1)
        a2 = _bits.get_bit(self.x, q2)
        self.r = (self.r + 2 * (a1 & a2).astype(np.uint8)) & 3
        _bits.flip_bits(self.z, q1, a2)
        _bits.flip_bits(self.z, q2, a1)
        self._touch()

    def apply_gate(self, name: str, *qubits: int) -> None:
        name = name.upper()
        if name == "CZ":
            self.cz(*qubits)
        elif name == "S":
            self.s(*qubits)
        elif name == "SDG":
            self.sdg(*qubits)
        elif name == "Z":
            self.pauli_z(*qubits)
        elif name == "X":
            self.pauli_x(*qubits)
        elif name == "H":
            self.h(*qubits)
        else:
            raise ValueError(f"unsupported gate {name!r}")

    # -- group structure -----------------------------------------------------
    def _rref(self):
        """Reduced row-echelon copy over columns x_0..x_{n-1}, z_0..z_{n-1}.

        Returns (xz, r, pivots) where xz has shape (n, 2W) with the z words
        after the x words and ``pivots[g]`` is the (word, bit) of row g's pivot.
        """
        if self._rref_cache is not None:
            return self._rref_cache
        n = self.n
        w = self.x.shape[1]
        xz = np.concatenate([self.x, self.z], axis=1)
        r = self.r.astype(np.int64)
        pivots = []
        row = 0
        for half in (0, 1):
            for q in range(n):
                if row == n:
                    break
                word = half * w + (q >> 6)
                bit = np.uint64(q & 63)
                col = (xz[row:, word] >> bit) & _ONE
                nz = np.flatnonzero(col)
                if nz.size == 0:
                    continue
                p = row + int(nz[0])
                if p != row:
                    xz[[row, p]] = xz[[p, row]]
                    r[[row, p]] = r[[p, row]]
                hits = np.flatnonzero((xz[:, word] >> bit) & _ONE)
                hits = hits[hits != row]
                if hits.size:
                    # row_h <- row_h * row_pivot
                    cross = _bits.popcount(xz[hits, w:] & xz[row, :w])
                    r[hits] = (r[hits] + r[row] + 2 * cross) & 3
                    xz[hits] ^= xz[row]
                pivots.append((word, bit))
                row += 1
        self._rref_cache = (xz, r, pivots)
        return self._rref_cache

    def decompose(self, xs: np.ndarray, zs: np.ndarray, phases: np.ndarray):
        """Batch membership test for operators given as packed (T, W) arrays.

        Returns ``(in_group, sign_ok)``: ``in_group[t]`` is true when operator t
        equals a product of generators up to a phase; ``sign_ok[t]`` additionally
        requires the phase to match exactly.
        """
        xs = np.atleast_2d(np.asarray(xs, dtype=np.uint64))
        zs = np.atleast_2d(np.asarray(zs, dtype=np.uint64))
        phases = np.atleast_1d(np.asarray(phases, dtype=np.int64)) & 3
        xz_r, r_r, pivots = self._rref()
        w = self.x.shape[1]
        target = np.concatenate([xs, zs], axis=1)
        acc = np.zeros_like(target)
        acc_r = np.zeros(target.shape[0], dtype=np.int64)
        for g, (word, bit) in enumerate(pivots):
            sel = np.flatnonzero((target[:, word] >> bit) & _ONE)
            if sel.size == 0:
                continue
            cross = _bits.popcount(acc[sel, w:] & xz_r[g, :w])
            acc_r[sel] = (acc_r[sel] + r_r[g] + 2 * cross) & 3
            acc[sel] ^= xz_r[g]
        in_group = np.all(acc == target, axis=1)
        sign_ok = in_group & (acc_r == phases)
        return in_group, sign_ok

    def stabilizes(self, paulis: Sequence[PauliOperator]) -> np.ndarray:
        """Vectorised :func:`is_stabilized_by` over a list of operators."""
        if not paulis:
            return np.zeros(0, dtype=bool)
        for p in paulis:
            if p.n != self.n:
                raise ValueError(f"size mismatch: {p.n} vs {self.n} qubits")
        xs = np.stack([p.x for p in paulis])
        zs = np.stack([p.z for p in paulis])
        ph = np.array([p.phase for p in paulis])
        return self.decompose(xs, zs, ph)[1]

    def anticommuting_rows(self, p: PauliOperator) -> np.ndarray:
        par = _bits.popcount(self.x & p.z) + _bits.popcount(self.z & p.x)
        return np.flatnonzero(par & 1)

    def is_valid(self) -> bool:
        """Generators mutually commute and are independent."""
        xb = _bits.unpack(self.x, self.n).astype(np.int64)
        zb = _bits.unpack(self.z, self.n).astype(np.int64)
        gram = (xb @ zb.T + zb @ xb.T) % 2
        if gram.any():
            return False
        return _bits.gf2_rank(np.concatenate([self.x, self.z], axis=1)) == self.n

    def restricted_rank(self, region: Iterable[int]) -> int:
        """F2 rank of the generators restricted to the qubits in ``region``."""
        cols = np.array(sorted(set(int(q) for q in region)), dtype=np.int64)
        if cols.size == 0:
            return 0
        xb = _bits.unpack(self.x, self.n)[:, cols]
        zb = _bits.unpack(self.z, self.n)[:, cols]
        return _bits.gf2_rank(_bits.pack(np.concatenate([xb, zb], axis=1)))

    def entanglement_bits(self, region: Iterable[int]) -> int:
        """Entanglement entropy (in bits) of ``region`` for this pure stabilizer state."""
        region = set(int(q) for q in region)
        return self.restricted_rank(region) - len(region)


# -- module-level operations -------------------------------------------------

def new_plus_state(n: int) -> StabilizerTableau:
    if n < 1:
        raise ValueError("need at least one qubit")
    eye = np.eye(n, dtype=bool)
    return StabilizerTableau(n, _bits.pack(eye, n), _bits.pack(np.zeros((n, n), bool), n),
                             np.zeros(n, dtype=np.uint8))


def apply_circuit(t: StabilizerTableau, c: CliffordCircuit) -> StabilizerTableau:
    """Conjugate every generator of ``t`` by ``c`` in place and return ``t``."""
    if c.n != t.n:
        raise ValueError(f"circuit acts on {c.n} qubits, tableau has {t.n}")
    for gate in c.gates:
        t.apply_gate(*gate)
    return t


def is_stabilized_by(t: StabilizerTableau, p: PauliOperator) -> bool:
    if p.n != t.n:
        raise ValueError(f"size mismatch: {p.n} vs {t.n} qubits")
    return bool(t.stabilizes([p])[0])


def factorizes(t: StabilizerTableau, region: Iterable[int]) -> bool:
    """True iff the state is a product across the cut ``region`` | rest.

    Equivalent to the stabilizer group containing ``|region|`` independent
    generators supported inside ``region``; computed as a restricted rank.
    """
    region = set(int(q) for q in region)
    if any(not 0 <= q < t.n for q in region):
        raise ValueError("region contains qubits outside the tableau")
    return t.entanglement_bits(region) == 0


def same_state(a: StabilizerTableau, b: StabilizerTableau) -> bool:
    """Every generator of ``a`` stabilizes ``b`` with the right sign."""
    if a.n != b.n:
        return False
    return bool(np.all(b.decompose(a.x, a.z, a.r.astype(np.int64))[1]))


def measure_pauli(t: StabilizerTableau, p: PauliOperator, postselect: Optional[int] = None,
                  rng: Optional[np.random.Generator] = None):
    """Projectively measure Hermitian ``p``; returns (outcome +-1, probability).

    ``postselect`` forces an outcome; asking for an impossible one raises.
    """
    p.hermitian_sign()
    anti = t.anticommuting_rows(p)
    if anti.size == 0:
        in_group, sign_ok = t.decompose(p.x[None], p.z[None], np.array([p.phase]))
        if not in_group[0]:
            raise RuntimeError("tableau is not a complete stabilizer state")
        outcome = 1 if sign_ok[0] else -1
        if postselect is not None and postselect != outcome:
            raise ValueError("post-selected outcome has zero probability")
        return outcome, 1.0
    if postselect is None:
        rng = rng if rng is not None else np.random.default_rng()
        outcome = 1 if rng.random() < 0.5 else -1
    else:
        if postselect not in (1, -1):
            raise ValueError("postselect must be +1 or -1")
        outcome = postselect
    k = int(anti[0])
    others = anti[1:]
    if others.size:
        cross = _bits.popcount(t.z[others] & t.x[k])
        t.r[others] = ((t.r[others].astype(np.int64) + t.r[k] + 2 * cross) & 3).astype(np.uint8)
        t.x[others] ^= t.x[k]
        t.z[others] ^= t.z[k]
    t.x[k] = p.x
    t.z[k] = p.z
    t.r[k] = (p.phase + (0 if outcome == 1 else 2)) & 3
    t._touch()
    return outcome, 0.5


def measure_x(t: StabilizerTableau, q: int, postselect: Optional[int] = None,
              rng: Optional[np.random.Generator] = None):
    return measure_pauli(t, PauliOperator.from_sites(t.n, [q], []), postselect, rng)


def random_clifford_circuit(n: int, depth: int, rng: np.random.Generator) -> CliffordCircuit:
    """Layers of random single-qubit gates followed by random CZs."""
    c = CliffordCircuit(n)
    names = ("H", "S", "SDG", "Z", "X")
    for _ in range(depth):
        for q in range(n):
            c.append(names[int(rng.integers(len(names)))], q)
        if n > 1:
            perm = rng.permutation(n)
            for a, b in zip(perm[0::2], perm[1::2]):
                if rng.random() < 0.7:
                    c.append("CZ", int(a), int(b))
    return c


def random_stabilizer_state(n: int, rng: np.random.Generator, depth: int = 4) -> StabilizerTableau:
    t = new_plus_state(n)
    return apply_circuit(t, random_clifford_circuit(n, depth, rng))
