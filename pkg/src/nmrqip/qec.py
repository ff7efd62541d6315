"""Stabilizer codes, syndrome cycles, transversality, magic-state distillation.

Codes are k=1 stabilizer codes given by generator and logical Pauli strings;
their encoding circuits are synthesized from a completed Clifford tableau,
so encode/decode are exact Clifford unitaries rather than hand-built gate
lists.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from itertools import combinations, product

import numpy as np

from .clifford import CliffordTableau, _gf2_inv  # noqa: F401  (inv reuse below)
from .qop import (SIGMA_X, SIGMA_Y, SIGMA_Z, PauliString, basis_ket, controlled,
                  embed, ket_density, n_qubits, partial_trace, state_fidelity,
                  tensor)

MAGIC_AXIS = (SIGMA_X + SIGMA_Y + SIGMA_Z) / np.sqrt(3)


def _symp_bits(p: PauliString) -> np.ndarray:
    n = p.n
    bits = np.zeros(2 * n, dtype=np.uint8)
    for q, letter in enumerate(p.word):
        if letter in "XY":
            bits[q] = 1
        if letter in "ZY":
            bits[n + q] = 1
    return bits


def _symp_row(p: PauliString) -> np.ndarray:
    b = _symp_bits(p)
    n = p.n
    return np.concatenate([b[n:], b[:n]])  # swapped halves: row . bits = commutator


def _bits_to_pauli(bits: np.ndarray, n: int) -> PauliString:
    letters = ["IXZY"[bits[q] + 2 * bits[n + q]] for q in range(n)]
    return PauliString("".join(letters))


def _gf2_solve(rows, rhs):
    a = np.array(rows, dtype=np.uint8)
    b = np.array(rhs, dtype=np.uint8)
    m, cols = a.shape
    aug = np.concatenate([a, b[:, None]], axis=1)
    pivots = []
    row = 0
    for col in range(cols):
        piv = next((r for r in range(row, m) if aug[r, col]), None)
        if piv is None:
            continue
        aug[[row, piv]] = aug[[piv, row]]
        for r in range(m):
            if r != row and aug[r, col]:
                aug[r] ^= aug[row]
        pivots.append(col)
        row += 1
    if any(aug[r, -1] for r in range(row, m)):
        raise ValueError("inconsistent GF(2) system")
    x = np.zeros(cols, dtype=np.uint8)
    for r, col in enumerate(pivots):
        x[col] = aug[r, -1]
    return x


@dataclass(frozen=True)
class StabilizerCode:
    """k=1 stabilizer code with explicit generators and logical operators."""

    name: str
    n_physical: int
    generators: tuple
    logical_x: PauliString
    logical_z: PauliString
    k_logical: int = 1
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        n = self.n_physical
        for g in self.generators:
            if g.n != n:
                raise ValueError("generator length mismatch")
        for a, b in combinations(self.generators, 2):
            if not a.commutes(b):
                raise ValueError("generators must commute")
        for logical in (self.logical_x, self.logical_z):
            for g in self.generators:
                if not logical.commutes(g):
                    raise ValueError("logicals must commute with generators")
        if self.logical_x.commutes(self.logical_z):
            raise ValueError("logical X and Z must anticommute")
        if len(self.generators) != n - self.k_logical:
            raise ValueError("wrong number of generators")

    # -- encoding -----------------------------------------------------------

    def encoding_tableau(self) -> CliffordTableau:
        """Clifford with X_1 -> logical X, Z_1 -> logical Z, Z_j -> generators."""
        if "tableau" in self._cache:
            return self._cache["tableau"]
        n = self.n_physical
        z_imgs = [self.logical_z, *self.generators]
        x_imgs = [self.logical_x]
        for j in range(1, n):
            rows = [_symp_row(zi) for zi in z_imgs]
            rhs = [1 if k == j else 0 for k in range(n)]
            for xi in x_imgs:
                rows.append(_symp_row(xi))
                rhs.append(0)
            x_imgs.append(_bits_to_pauli(_gf2_solve(rows, rhs), n))
        tab = CliffordTableau(n, tuple(x_imgs), tuple(z_imgs))
        self._cache["tableau"] = tab
        return tab

    def encoding_unitary(self) -> np.ndarray:
        if "unitary" not in self._cache:
            self._cache["unitary"] = self.encoding_tableau().to_unitary()
        return self._cache["unitary"]

    def encoding_circuit(self):
        """[(gate name, qubits)] realization of the encoding unitary."""
        if "circuit" not in self._cache:
            self._cache["circuit"] = self.encoding_tableau().decompose()
        return self._cache["circuit"]

    # -- syndrome machinery --------------------------------------------------

    def syndrome_of(self, error: PauliString):
        return tuple(0 if error.commutes(g) else 1 for g in self.generators)

    def lookup_table(self):
        """Min-weight correction per syndrome (support then letter tie-break)."""
        if "lookup" in self._cache:
            return self._cache["lookup"]
        n = self.n_physical
        table = {}
        for w in range(n + 1):
            for support in combinations(range(n), w):
                for letters in product("XYZ", repeat=w):
                    chars = ["I"] * n
                    for q, c in zip(support, letters):
                        chars[q] = c
                    err = PauliString("".join(chars))
                    s = self.syndrome_of(err)
                    if s not in table:
                        table[s] = err
            if len(table) == 2 ** len(self.generators):
                break
        self._cache["lookup"] = table
        return table


def bit_flip_code() -> StabilizerCode:
    return StabilizerCode(
        "bit-flip-3", 3,
        (PauliString("ZZI"), PauliString("IZZ")),
        logical_x=PauliString("XXX"), logical_z=PauliString("ZZZ"),
    )


def phase_flip_code() -> StabilizerCode:
    return StabilizerCode(
        "phase-flip-3", 3,
        (PauliString("XXI"), PauliString("IXX")),
        logical_x=PauliString("ZZZ"), logical_z=PauliString("XXX"),
    )


def five_qubit_code() -> StabilizerCode:
    return StabilizerCode(
        "five-qubit", 5,
        (PauliString("XZZXI"), PauliString("IXZZX"),
         PauliString("XIXZZ"), PauliString("ZXIXZ")),
        logical_x=PauliString("XXXXX"), logical_z=PauliString("ZZZZZ"),
    )


def encode_ket(code: StabilizerCode, psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    rest = basis_ket(0, code.n_physical - 1)
    return code.encoding_unitary() @ np.kron(psi, rest)


def encode(code: StabilizerCode, state: np.ndarray) -> np.ndarray:
    """Encode a single-qubit ket or density operator into the codespace."""
    state = np.asarray(state, dtype=complex)
    if state.ndim == 1:
        return ket_density(encode_ket(code, state))
    u = code.encoding_unitary()
    d_rest = 2 ** (code.n_physical - 1)
    anc = np.zeros((d_rest, d_rest), dtype=complex)
    anc[0, 0] = 1.0
    return u @ np.kron(state, anc) @ u.conj().T


def decode(code: StabilizerCode, rho: np.ndarray) -> np.ndarray:
    """Inverse encoding then reduction to the logical qubit."""
    u = code.encoding_unitary()
    full = u.conj().T @ rho @ u
    return partial_trace(full, [1], code.n_physical)


def syndrome_extract(code: StabilizerCode, rho: np.ndarray, rng=None):
    """Coherent ancilla-based syndrome measurement.

    One ancilla per generator: H, controlled-generator, H, then a projective
    z-measurement of the ancillas.  With rng=None the most probable outcome
    is selected deterministically (exact when the syndrome is definite).
    Returns (syndrome bits, post-measurement data state).
    """
    n, g = code.n_physical, len(code.generators)
    big = n + g
    anc = np.zeros((2**g, 2**g), dtype=complex)
    anc[0, 0] = 1.0
    joint = np.kron(np.asarray(rho, dtype=complex), anc)
    data_qubits = list(range(1, n + 1))
    circuit = code._cache.get("syndrome_unitary")
    if circuit is None:
        h = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
        circuit = np.eye(2**big, dtype=complex)
        for k, gen in enumerate(code.generators):
            a = n + k + 1
            ha = embed(h, [a], big)
            cg = embed(controlled(gen.dense()), [a] + data_qubits, big)
            circuit = ha @ cg @ ha @ circuit
        code._cache["syndrome_unitary"] = circuit
    joint = circuit @ joint @ circuit.conj().T
    # ancilla measurement statistics
    probs = {}
    idx = np.arange(2**big)
    anc_bits = idx % (2**g)
    diag = np.real(np.diagonal(joint))
    for s in range(2**g):
        probs[s] = float(np.sum(diag[anc_bits == s]))
    if rng is None:
        outcome = max(probs, key=lambda s: probs[s])
    else:
        ps = np.clip(np.array([probs[s] for s in range(2**g)]), 0, None)
        outcome = int(rng.choice(2**g, p=ps / ps.sum()))
    mask = (anc_bits == outcome).astype(float)
    post = joint * np.outer(mask, mask)
    post /= np.trace(post).real
    data_state = partial_trace(post, data_qubits, big)
    syndrome = tuple((outcome >> (g - 1 - k)) & 1 for k in range(g))
    return syndrome, data_state


def recover(code: StabilizerCode, syndrome) -> PauliString:
    """Minimum-weight correction for the syndrome, from the lookup table."""
    table = code.lookup_table()
    key = tuple(int(b) for b in syndrome)
    if key not in table:
        raise ValueError(f"syndrome {key} outside lookup table")
    return table[key]


def correction_cycle(code: StabilizerCode, rho: np.ndarray, rng=None) -> np.ndarray:
    """syndrome_extract + recover + apply, returning the corrected state."""
    syndrome, post = syndrome_extract(code, rho, rng)
    corr = recover(code, syndrome).dense()
    return corr @ post @ corr.conj().T


# ---------------------------------------------------------------------------
# logical gates and the error-ensemble demonstration

_LOGICAL_GATES = {
    "I": np.eye(2, dtype=complex),
    "X": SIGMA_X,
    "H": np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2),
}


def logical_gate(code: StabilizerCode, gate: str) -> np.ndarray:
    """Encoded realization E (u x I) E^dag of a single-qubit gate."""
    u = _LOGICAL_GATES.get(gate)
    if u is None:
        raise ValueError(f"unsupported logical gate {gate!r}; have I, X, H")
    e = code.encoding_unitary()
    d_rest = 2 ** (code.n_physical - 1)
    return e @ np.kron(u, np.eye(d_rest, dtype=complex)) @ e.conj().T


def error_ensemble(n: int):
    """{identity} plus X, Z, and XZ on each qubit (3n + 1 errors; 16 for n=5)."""
    out = [PauliString("I" * n)]
    for q in range(n):
        for letter in ("X", "Z", "Y"):  # XZ = -iY; the phase drops in conjugation
            out.append(PauliString("I" * q + letter + "I" * (n - q - 1)))
    return out


def logical_gate_cycle(code: StabilizerCode, gate: str, error: PauliString,
                       psi=None):
    """encode -> logical gate -> error -> decode, with and without correction.

    Returns (fidelity_uncorrected, fidelity_corrected) of the decoded logical
    qubit against the ideal gate output.
    """
    if psi is None:
        psi = basis_ket("0")
    ideal = _LOGICAL_GATES[gate] @ np.asarray(psi, dtype=complex)
    rho = encode(code, np.asarray(psi, dtype=complex))
    lg = logical_gate(code, gate)
    rho = lg @ rho @ lg.conj().T
    e = error.dense()
    rho = e @ rho @ e.conj().T
    f_unc = state_fidelity(decode(code, rho), ket_density(ideal))
    corrected = correction_cycle(code, rho)
    f_corr = state_fidelity(decode(code, corrected), ket_density(ideal))
    return float(f_unc), float(f_corr)


def gate_cycle_ensemble(code: StabilizerCode, gate: str, psi=None):
    """Per-error fidelity rows plus the ensemble means.

    Returns (rows, mean_uncorrected, mean_corrected) with rows of
    (error, f_uncorrected, f_corrected).
    """
    rows = []
    for err in error_ensemble(code.n_physical):
        f_unc, f_corr = logical_gate_cycle(code, gate, err, psi)
        rows.append((err, f_unc, f_corr))
    mu = float(np.mean([r[1] for r in rows]))
    mc = float(np.mean([r[2] for r in rows]))
    return rows, mu, mc


def transversal_cnot_demo(variant: str, error: PauliString | None = None) -> int:
    """Error weight landing on the target block of a two-block logical CNOT.

    Blocks are 3-qubit repetition codes on qubits 1-3 and 4-6.  'bad' fans a
    single physical control out to every target qubit; 'transversal' uses
    pairwise CNOTs.  The injected error is conjugated through the circuit
    tableau and its weight on block 2 is returned.
    """
    from .clifford import circuit_tableau

    if variant == "bad":
        gates = [("CNOT", (1, t)) for t in (4, 5, 6)]
    elif variant == "transversal":
        gates = [("CNOT", (q, q + 3)) for q in (1, 2, 3)]
    else:
        raise ValueError(f"unknown variant {variant!r}")
    tab = circuit_tableau(gates, 6)
    if error is None:
        return 0
    if error.n == 3:
        error = PauliString(error.word + "III", error.phase)
    propagated = tab.conjugate(error)
    return sum(c != "I" for c in propagated.word[3:])


# ---------------------------------------------------------------------------
# magic states and distillation


@dataclass(frozen=True)
class MagicState:
    bloch: tuple
    purity: float

    @classmethod
    def target(cls) -> "MagicState":
        v = 1 / np.sqrt(3)
        return cls((v, v, v), 1.0)

    def density(self) -> np.ndarray:
        x, y, z = self.bloch
        return (np.eye(2, dtype=complex)
                + x * SIGMA_X + y * SIGMA_Y + z * SIGMA_Z) / 2


def magic_density(p: float) -> np.ndarray:
    """(I + p (sigma_x + sigma_y + sigma_z)/sqrt(3)) / 2."""
    if not -1 <= p <= 1:
        raise ValueError("polarization must lie in [-1, 1]")
    return (np.eye(2, dtype=complex) + p * MAGIC_AXIS) / 2


def m_polarization(rho: np.ndarray):
    """(literal overlap 2 Tr(rho_M rho), magic-axis Bloch projection)."""
    rho_m = magic_density(1.0)
    literal = 2 * float(np.trace(rho_m @ rho).real)
    return literal, literal - 1.0


_DISTILL = {}


def _distill_ops():
    if _DISTILL:
        return _DISTILL
    code = five_qubit_code()
    d = 32
    proj = np.eye(d, dtype=complex)
    for g in code.generators:
        proj = proj @ (np.eye(d) + g.dense()) / 2
    p0 = proj @ (np.eye(d) + code.logical_z.dense()) / 2
    w, v = np.linalg.eigh(p0)
    ket0 = v[:, int(np.argmax(w))]
    k = int(np.argmax(np.abs(ket0) > 1e-8))
    ket0 = ket0 * np.exp(-1j * np.angle(ket0[k]))
    ket1 = code.logical_x.dense() @ ket0
    fixup = (SIGMA_X - SIGMA_Y) / np.sqrt(2)  # maps the decoded axis back onto +m
    _DISTILL.update(proj=proj, ket0=ket0, ket1=ket1, fixup=fixup)
    return _DISTILL


@dataclass(frozen=True)
class DistillResult:
    p_out: float
    success_probability: float
    rho_out: np.ndarray


def distill_magic(p_in: float, rounds: int = 1) -> DistillResult:
    """Five-to-one magic-state distillation on the 5-qubit code.

    Five copies of the p-polarized state are projected onto the codespace
    (trivial-syndrome post-selection); the logical qubit is read out and a
    fixed Clifford rotation returns it to the magic axis.
    """
    if not -1 <= p_in <= 1:
        raise ValueError("p_in must lie in [-1, 1]")
    ops = _distill_ops()
    p = float(p_in)
    success = 1.0
    rho_out = magic_density(p)
    for _ in range(rounds):
        rho5 = reduce(np.kron, [magic_density(p)] * 5)
        projected = ops["proj"] @ rho5 @ ops["proj"]
        succ = float(np.trace(projected).real)
        if succ < 1e-15:
            raise RuntimeError("post-selection probability vanished")
        k0, k1 = ops["ket0"], ops["ket1"]
        out = np.array([
            [k0.conj() @ projected @ k0, k0.conj() @ projected @ k1],
            [k1.conj() @ projected @ k0, k1.conj() @ projected @ k1],
        ]) / succ
        rho_out = ops["fixup"] @ out @ ops["fixup"]
        p = m_polarization(rho_out)[1]
        success = succ
    return DistillResult(float(p), float(success), rho_out)


def distillation_threshold(lo: float = 0.5, hi: float = 0.9, iters: int = 60) -> float:
    """Fixed-point polarization where distillation stops improving (bisection)."""
    for _ in range(iters):
        mid = (lo + hi) / 2
        if distill_magic(mid).p_out > mid:
            hi = mid
        else:
            lo = mid
    return (lo + hi) / 2
