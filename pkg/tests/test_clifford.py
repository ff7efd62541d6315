"""Tableau arithmetic cross-checked against dense conjugation."""

import numpy as np
import pytest

from nmrqip.clifford import (
    CliffordTableau,
    all_1q_cliffords,
    circuit_tableau,
    circuit_unitary,
    gate_tableau,
    sample_1q_clifford,
)
from nmrqip.qop import PauliString, all_pauli_words, gate_fidelity_hs


def random_circuit(n, depth, rng):
    gates = []
    for _ in range(depth):
        kind = rng.integers(3)
        if kind == 0:
            gates.append(("H", (int(rng.integers(1, n + 1)),)))
        elif kind == 1:
            gates.append(("S", (int(rng.integers(1, n + 1)),)))
        elif n > 1:
            c, t = rng.choice(np.arange(1, n + 1), size=2, replace=False)
            gates.append(("CNOT", (int(c), int(t))))
    return gates


def test_hadamard_images():
    h = gate_tableau("H", (1,), 1)
    assert h.conjugate(PauliString("X")) == PauliString("Z")
    assert h.conjugate(PauliString("Z")) == PauliString("X")
    assert h.conjugate(PauliString("Y")) == PauliString("Y", -1)


def test_phase_gate_images():
    s = gate_tableau("S", (1,), 1)
    assert s.conjugate(PauliString("X")) == PauliString("Y")
    assert s.conjugate(PauliString("Z")) == PauliString("Z")


def test_cnot_images():
    cx = gate_tableau("CNOT", (1, 2), 2)
    assert cx.conjugate(PauliString("XI")) == PauliString("XX")
    assert cx.conjugate(PauliString("IZ")) == PauliString("ZZ")
    assert cx.conjugate(PauliString("IX")) == PauliString("IX")
    assert cx.conjugate(PauliString("ZI")) == PauliString("ZI")


def test_conjugate_matches_dense(rng):
    for n in (1, 2, 3):
        gates = random_circuit(n, 12, rng)
        tab = circuit_tableau(gates, n)
        u = circuit_unitary(gates, n)
        for word in all_pauli_words(n)[1:]:
            img = tab.conjugate(PauliString(word))
            dense = u @ PauliString(word).dense() @ u.conj().T
            assert np.allclose(img.dense(), dense, atol=1e-10)


def test_conjugate_is_multiplicative(rng):
    tab = circuit_tableau(random_circuit(2, 10, rng), 2)
    a, b = PauliString("XY"), PauliString("ZX")
    assert tab.conjugate(a) * tab.conjugate(b) == tab.conjugate(a * b)


def test_then_order_matches_circuit():
    # H then S on the same qubit: X -> Z -> Z
    h = gate_tableau("H", (1,), 1)
    s = gate_tableau("S", (1,), 1)
    assert h.then(s).conjugate(PauliString("X")) == PauliString("Z")
    # S then H: X -> Y -> -Y
    assert s.then(h).conjugate(PauliString("X")) == PauliString("Y", -1)


def test_inverse(rng):
    tab = circuit_tableau(random_circuit(3, 15, rng), 3)
    ident = CliffordTableau.identity(3)
    assert tab.then(tab.inverse()) == ident
    assert tab.inverse().then(tab) == ident


def test_unitary_roundtrip(rng):
    for n in (1, 2):
        gates = random_circuit(n, 8, rng)
        tab = circuit_tableau(gates, n)
        assert CliffordTableau.from_unitary(tab.to_unitary()) == tab
        # matches the dense circuit up to global phase
        assert gate_fidelity_hs(circuit_unitary(gates, n),
                                tab.to_unitary()) == pytest.approx(1.0)


def test_from_unitary_rejects_non_clifford():
    t = np.diag([1, np.exp(1j * np.pi / 4)])
    with pytest.raises(ValueError):
        CliffordTableau.from_unitary(t)


def test_decompose_reconstructs(rng):
    tab = circuit_tableau(random_circuit(2, 14, rng), 2)
    rebuilt = circuit_tableau(tab.decompose(), 2)
    assert rebuilt == tab


def test_validation_rejects_commuting_pair():
    # images of X1 and Z1 must anticommute
    with pytest.raises(ValueError):
        CliffordTableau(1, (PauliString("X"),), (PauliString("X", -1),))


def test_all_1q_cliffords_distinct():
    tabs = all_1q_cliffords()
    keys = {(t.x_images[0].word, t.x_images[0].phase,
             t.z_images[0].word, t.z_images[0].phase) for t in tabs}
    assert len(tabs) == len(keys) == 24


def test_sample_1q_clifford_seeded():
    g1, g2 = np.random.default_rng(7), np.random.default_rng(7)
    a = [sample_1q_clifford(g1) for _ in range(20)]
    b = [sample_1q_clifford(g2) for _ in range(20)]
    assert a == b
    assert len({(t.x_images[0].word, t.z_images[0].word) for t in a}) > 1
