"""Bit-packed Pauli operators and diagonal-friendly Clifford circuits.

A Pauli operator on ``n`` qubits is stored as ``i**phase * X^x Z^z`` where
``x`` and ``z`` are packed bit masks and, on every qubit, the X factor sits to
the left of the Z factor.  In this convention ``Y = i X Z`` has ``phase=1``
and multiplication only needs one popcount:

    (X^a Z^b)(X^c Z^d) = (-1)^{|b & c|} X^(a^c) Z^(b^d)
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from clusterpump import _bits


class PauliOperator:
    """``i**phase * X^x Z^z`` on ``n`` qubits with packed masks."""

    __slots__ = ("n", "x", "z", "phase")

    def __init__(self, n: int, x: Optional[np.ndarray] = None, z: Optional[np.ndarray] = None,
                 phase: int = 0):
        w = _bits.n_words(n)
        self.n = n
        self.x = np.zeros(w, dtype=np.uint64) if x is None else np.asarray(x, dtype=np.uint64).copy()
        self.z = np.zeros(w, dtype=np.uint64) if z is None else np.asarray(z, dtype=np.uint64).copy()
        if self.x.shape != (w,) or self.z.shape != (w,):
            raise ValueError("mask length does not match qubit count")
        self.phase = int(phase) % 4

    @classmethod
    def identity(cls, n: int) -> "PauliOperator":
        return cls(n)

    @classmethod
    def from_sites(cls, n: int, x_sites: Iterable[int] = (), z_sites: Iterable[int] = (),
                   sign: int = 1) -> "PauliOperator":
        """Hermitian Pauli with X on ``x_sites``, Z on ``z_sites`` (Y where both) and overall ``sign``."""
        x = _bits.from_indices(n, x_sites)
        z = _bits.from_indices(n, z_sites)
        y_count = int(_bits.popcount(x & z))
        if sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        return cls(n, x, z, y_count + (2 if sign == -1 else 0))

    @classmethod
    def from_label(cls, label: str) -> "PauliOperator":
        """``"+XZIY"``-style label, qubit 0 first; optional leading sign ``+``/``-``."""
        sign = 1
        if label and label[0] in "+-":
            sign = -1 if label[0] == "-" else 1
            label = label[1:]
        n = len(label)
        xs = [q for q, c in enumerate(label) if c in "XY"]
        zs = [q for q, c in enumerate(label) if c in "ZY"]
        bad = set(label) - set("IXYZ")
        if bad:
            raise ValueError(f"unknown Pauli letters {sorted(bad)}")
        return cls.from_sites(n, xs, zs, sign)

    @property
    def x_bits(self) -> np.ndarray:
        return _bits.unpack(self.x, self.n)

    @property
    def z_bits(self) -> np.ndarray:
        return _bits.unpack(self.z, self.n)

    def hermitian_sign(self) -> int:
        """+1 or -1 for Hermitian operators; raises for anti-Hermitian ones."""
        rel = (self.phase - int(_bits.popcount(self.x & self.z))) % 4
        if rel == 0:
            return 1
        if rel == 2:
            return -1
        raise ValueError("operator is not Hermitian")

    def label(self) -> str:
        xb, zb = self.x_bits, self.z_bits
        letters = "".join("IXZY"[int(a) + 2 * int(b)] for a, b in zip(xb, zb))
        rel = (self.phase - int(_bits.popcount(self.x & self.z))) % 4
        return ["+", "+i", "-", "-i"][rel] + letters

    def __repr__(self) -> str:
        return f"PauliOperator({self.label()!r})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, PauliOperator):
            return NotImplemented
        return (self.n == other.n and self.phase == other.phase
                and np.array_equal(self.x, other.x) and np.array_equal(self.z, other.z))

    def __mul__(self, other: "PauliOperator") -> "PauliOperator":
        _check_size(self, other)
        extra = 2 * int(_bits.popcount(self.z & other.x))
        return PauliOperator(self.n, self.x ^ other.x, self.z ^ other.z,
                             self.phase + other.phase + extra)

    def __neg__(self) -> "PauliOperator":
        return PauliOperator(self.n, self.x, self.z, self.phase + 2)

    def weight(self) -> int:
        return int(_bits.popcount(self.x | self.z))

    def support(self) -> list[int]:
        return _bits.to_indices(self.x | self.z, self.n)


def _check_size(p: PauliOperator, q: PauliOperator) -> None:
    if p.n != q.n:
        raise ValueError(f"size mismatch: {p.n} vs {q.n} qubits")


def commutes(p: PauliOperator, q: PauliOperator) -> bool:
    """Symplectic test: ``|p.x & q.z| + |p.z & q.x|`` even."""
    _check_size(p, q)
    return int(_bits.popcount(p.x & q.z) + _bits.popcount(p.z & q.x)) % 2 == 0


# -- circuits ----------------------------------------------------------------

ONE_QUBIT_GATES = ("S", "SDG", "Z", "X", "H")
TWO_QUBIT_GATES = ("CZ",)


@dataclass
class CliffordCircuit:
    """Ordered gate list over {S, Sdg, Z, X, H, CZ}.

    ``global_phase`` is the exponent of ``exp(i*pi/4)`` modulo 8.
    """

    n: int
    gates: list = field(default_factory=list)
    global_phase: int = 0

    def __post_init__(self):
        gates, self.gates = self.gates, []
        for g in gates:
            self.append(*g)
        self.global_phase %= 8

    def append(self, name: str, *qubits: int) -> "CliffordCircuit":
        name = name.upper()
        qubits = tuple(int(q) for q in qubits)
        if name in ONE_QUBIT_GATES:
            if len(qubits) != 1:
                raise ValueError(f"{name} acts on one qubit")
        elif name in TWO_QUBIT_GATES:
            if len(qubits) != 2:
                raise ValueError(f"{name} acts on two qubits")
            if qubits[0] == qubits[1]:
                raise ValueError("CZ endpoints must be distinct")
        else:
            raise ValueError(f"unsupported gate {name!r}")
        for q in qubits:
            if not 0 <= q < self.n:
                raise ValueError(f"qubit {q} out of range for n={self.n}")
        self.gates.append((name, *qubits))
        return self

    def extend(self, gates) -> "CliffordCircuit":
        for g in gates:
            self.append(*g)
        return self

    def add_phase(self, eighths: int) -> None:
        self.global_phase = (self.global_phase + eighths) % 8

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def count(self, name: str) -> int:
        name = name.upper()
        return sum(1 for g in self.gates if g[0] == name)

    def touched(self) -> set:
        return {q for g in self.gates for q in g[1:]}

    def without(self, index: int) -> "CliffordCircuit":
        """Copy with gate ``index`` removed (mutation tests)."""
        gates = self.gates[:index] + self.gates[index + 1:]
        return CliffordCircuit(self.n, gates, self.global_phase)

    def to_text(self) -> str:
        lines = [f"# qubits {self.n}", f"# phase {self.global_phase}"]
        for name, *qs in self.gates:
            lines.append(" ".join([name if name != "SDG" else "Sdg", *map(str, qs)]))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, n: Optional[int] = None) -> "CliffordCircuit":
        phase = 0
        gates = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                parts = line[1:].split()
                if len(parts) == 2 and parts[0] == "phase":
                    phase = int(parts[1])
                elif len(parts) == 2 and parts[0] == "qubits" and n is None:
                    n = int(parts[1])
                continue
            parts = line.split()
            try:
                gates.append((parts[0].upper(), *(int(p) for p in parts[1:])))
            except ValueError as exc:
                raise ValueError(f"line {lineno}: cannot parse {raw!r}") from exc
        if n is None:
            n = 1 + max((q for g in gates for q in g[1:]), default=-1)
        return cls(n, gates, phase)
