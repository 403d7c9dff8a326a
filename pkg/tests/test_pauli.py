
import numpy as np
import pytest
from hypothesis import given, strategies as st

from clusterpump.pauli import CliffordCircuit, PauliOperator, commutes
from dense_oracle import pauli_matrix

labels = st.integers(1, 5).flatmap(
    lambda n: st.tuples(st.sampled_from("+-"), st.text("IXYZ", min_size=n, max_size=n)).map("".join))


@given(labels)
def test_label_round_trip(label):
    assert PauliOperator.from_label(label).label() == label


@given(labels, labels)
def test_product_matches_matrices(a, b):
    if len(a) != len(b):
        return
    pa, pb = PauliOperator.from_label(a), PauliOperator.from_label(b)
    prod = pa * pb
    phase = [1, 1j, -1, -1j][(prod.phase - int(np.sum(prod.x_bits & prod.z_bits))) % 4]
    letters = prod.label().lstrip("+-i")
    assert np.allclose(pauli_matrix(a) @ pauli_matrix(b), phase * pauli_matrix("+" + letters))


@given(labels, labels)
def test_commutation_matches_matrices(a, b):
    if len(a) != len(b):
        return
    ma, mb = pauli_matrix(a), pauli_matrix(b)
    assert commutes(PauliOperator.from_label(a), PauliOperator.from_label(b)) == np.allclose(ma @ mb, mb @ ma)


def test_y_convention_and_hermitian_sign():
    y = PauliOperator.from_label("Y")
    assert y.phase == 1 and y.hermitian_sign() == 1
    assert (-y).hermitian_sign() == -1
    xz = PauliOperator.from_label("X") * PauliOperator.from_label("Z")
    with pytest.raises(ValueError):
        xz.hermitian_sign()  # XZ = -iY is anti-Hermitian


def test_packing_beyond_one_word():
    n = 130
    p = PauliOperator.from_sites(n, [0, 64, 129], [63, 64])
    assert p.support() == [0, 63, 64, 129]
    assert p.weight() == 4
    q = PauliOperator.from_sites(n, [], [129])
    assert not commutes(p, q)


def test_size_mismatch():
    with pytest.raises(ValueError):
        commutes(PauliOperator.identity(2), PauliOperator.identity(3))
    with pytest.raises(ValueError):
        PauliOperator.from_label("XQ")


def test_circuit_validation():
    c = CliffordCircuit(3)
    with pytest.raises(ValueError):
        c.append("CZ", 1, 1)
    with pytest.raises(ValueError):
        c.append("S", 3)
    with pytest.raises(ValueError):
        c.append("T", 0)
    with pytest.raises(ValueError):
        c.append("CZ", 0)


def test_circuit_text_round_trip():
    c = CliffordCircuit(5, [("S", 0), ("SDG", 3), ("CZ", 3, 4), ("Z", 2), ("H", 1)], global_phase=11)
    text = c.to_text()
    assert "Sdg 3" in text and "# phase 3" in text
    d = CliffordCircuit.from_text(text)
    assert d.gates == c.gates and d.n == 5 and d.global_phase == 3


def test_circuit_text_errors():
    with pytest.raises(ValueError):
        CliffordCircuit.from_text("# qubits 2\nCZ 0 x\n")


def test_without_removes_one_gate():
    c = CliffordCircuit(2, [("S", 0), ("CZ", 0, 1)])
    assert c.without(0).gates == [("CZ", 0, 1)]
    assert len(c) == 2
