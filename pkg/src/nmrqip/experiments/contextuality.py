"""State-independent contextuality test on two spins.

Nine two-spin Pauli observables arranged in a 3x3 grid; each row and column
is a mutually commuting triple whose product is +/- identity.  Quantum
mechanics therefore fixes every one of the six correlation measurements
independently of the state, giving beta = 6, while any assignment of
deterministic +/-1 values to the nine observables caps beta at 4.

The meter method measures each triple the NMR way: three sequential
controlled couplings onto one pseudo-pure meter spin (the meter is modular,
so it records only the parity of the three outcomes), then an ensemble
readout of the meter's x magnetization.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as iproduct

import numpy as np

from ..channels import Channel
from ..qop import SIGMA_X, check_density, controlled, embed, expectation, pauli_dense

OBSERVABLE_GRID = (
    ("IZ", "ZI", "ZZ"),
    ("XI", "IX", "XX"),
    ("XZ", "ZX", "YY"),
)
ROW_SIGNS = (1, 1, 1)
COLUMN_SIGNS = (1, 1, -1)

# Shrink per meter coupling that calibrates the noisy-run figure: with one
# depolarizing kick after each of the three couplings, beta = 6 (1-p)^3.
METER_DEPOLARIZING_52 = 0.046580498005590054


@dataclass(frozen=True)
class MerminTable:
    """The observable grid plus the sign each commuting triple multiplies to."""

    observables: tuple = OBSERVABLE_GRID
    row_signs: tuple = ROW_SIGNS
    column_signs: tuple = COLUMN_SIGNS

    def __post_init__(self):
        for words, sign in self.contexts():
            mats = [pauli_dense(w) for w in words]
            for a in range(3):
                for b in range(a + 1, 3):
                    if np.abs(mats[a] @ mats[b] - mats[b] @ mats[a]).max() > 1e-12:
                        raise ValueError(f"{words[a]} and {words[b]} do not commute")
            prod = mats[0] @ mats[1] @ mats[2]
            if np.abs(prod - sign * np.eye(4)).max() > 1e-12:
                raise ValueError(f"triple {words} does not multiply to {sign:+d} I")

    def contexts(self):
        """Six (triple, sign) pairs: the three rows, then the three columns."""
        rows = [(self.observables[i], self.row_signs[i]) for i in range(3)]
        cols = [
            (tuple(self.observables[i][j] for i in range(3)), self.column_signs[j])
            for j in range(3)
        ]
        return rows + cols


@dataclass(frozen=True)
class ContextualityResult:
    beta: float
    rows: tuple
    columns: tuple
    method: str = "direct"


def _direct_correlation(rho: np.ndarray, words) -> float:
    prod = pauli_dense(words[0]) @ pauli_dense(words[1]) @ pauli_dense(words[2])
    return expectation(rho, prod)


def _meter_correlation(rho: np.ndarray, words, noise: Channel | None) -> float:
    # meter is qubit 1, prepared along +x; system spins are qubits 2 and 3
    plus = np.full((2, 2), 0.5, dtype=complex)
    joint = np.kron(plus, rho)
    for word in words:
        coupling = controlled(pauli_dense(word))
        joint = coupling @ joint @ coupling.conj().T
        if noise is not None:
            ch = noise if noise.n == 3 else noise.on([1], 3)
            joint = ch(joint)
    return expectation(joint, embed(SIGMA_X, [1], 3))


def contextuality_beta(
    state: np.ndarray,
    noise: Channel | None = None,
    method: str = "direct",
    table: MerminTable | None = None,
) -> ContextualityResult:
    """beta = r1 + r2 + r3 + c1 + c2 - c3 for the given two-spin state.

    direct: each correlation is the expectation of the dense product of the
    commuting triple (noise, if any, hits the input state once).
    meter: each correlation runs the three-coupling meter circuit; noise, if
    any, is applied after every coupling (a 1-spin channel lands on the
    meter, a 3-spin channel on the whole register).
    """
    rho = check_density(np.asarray(state, dtype=complex))
    if rho.shape != (4, 4):
        raise ValueError("contextuality test is defined on exactly two spins")
    table = table or MerminTable()
    values = []
    if method == "direct":
        if noise is not None:
            rho = noise(rho)
        for words, _ in table.contexts():
            values.append(_direct_correlation(rho, words))
    elif method == "meter":
        for words, _ in table.contexts():
            values.append(_meter_correlation(rho, words, noise))
    else:
        raise ValueError(f"unknown method {method!r}")
    rows, cols = tuple(values[:3]), tuple(values[3:])
    beta = sum(rows) + cols[0] + cols[1] - cols[2]
    return ContextualityResult(float(beta), rows, cols, method)


def classical_max_beta(table: MerminTable | None = None) -> float:
    """Best beta over every deterministic +/-1 assignment to the grid."""
    table = table or MerminTable()
    best = -np.inf
    for bits in iproduct((1, -1), repeat=9):
        a = np.array(bits).reshape(3, 3)
        rows = a.prod(axis=1)
        cols = a.prod(axis=0)
        best = max(best, rows.sum() + cols[0] + cols[1] - cols[2])
    return float(best)


def depolarizing_for_beta(target_beta: float, n_couplings: int = 3) -> float:
    """Meter depolarizing strength per coupling that degrades 6 to target."""
    if not 0 < target_beta <= 6:
        raise ValueError("target beta must be in (0, 6]")
    return 1 - (target_beta / 6) ** (1 / n_couplings)
