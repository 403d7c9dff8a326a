"""Independent dense-matrix oracle built from explicit Kronecker products.

Qubit q is bit q of the basis index, so qubit 0 is the rightmost Kronecker factor.
"""

from functools import reduce

import numpy as np

I2 = np.eye(2, dtype=complex)
PX = np.array([[0, 1], [1, 0]], dtype=complex)
PZ = np.array([[1, 0], [0, -1]], dtype=complex)
PY = np.array([[0, -1j], [1j, 0]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
SG = np.diag([1, 1j])
LETTERS = {"I": I2, "X": PX, "Y": PY, "Z": PZ}


def embed(ops: dict, n: int) -> np.ndarray:
    """Kronecker product with ``ops[q]`` on qubit q and identity elsewhere."""
    return reduce(np.kron, [ops.get(q, I2) for q in reversed(range(n))])


def pauli_matrix(label: str) -> np.ndarray:
    sign = 1
    if label[0] in "+-":
        sign = -1 if label[0] == "-" else 1
        label = label[1:]
    n = len(label)
    return sign * embed({q: LETTERS[c] for q, c in enumerate(label)}, n)


def gate_matrix(name: str, qubits, n: int) -> np.ndarray:
    name = name.upper()
    if name == "CZ":
        a, b = qubits
        d = np.ones(1 << n, dtype=complex)
        idx = np.arange(1 << n)
        d[((idx >> a) & (idx >> b) & 1) == 1] = -1
        return np.diag(d)
    one = {"H": H, "S": SG, "SDG": SG.conj(), "Z": PZ, "X": PX}[name]
    return embed({qubits[0]: one}, n)


def circuit_matrix(gates, n: int) -> np.ndarray:
    u = np.eye(1 << n, dtype=complex)
    for name, *qs in gates:
        u = gate_matrix(name, qs, n) @ u
    return u


def plus_state(n: int) -> np.ndarray:
    return np.full(1 << n, 2 ** (-n / 2), dtype=complex)
