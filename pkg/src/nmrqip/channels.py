"""CPTP channels: Kraus representation, relaxation, Pauli noise, gradient crush.

A Channel is a sequence of Kraus factors, each acting on a subset of the
register; factors are applied in order.  Keeping per-spin factors unexpanded
lets relaxation channels scale to seven spins, where the materialized tensor
product would need 4^7 Kraus matrices.
"""

from __future__ import annotations

import math

import numpy as np

from .qop import PauliString, embed, n_qubits, pauli_dense

_MATERIALIZE_LIMIT = 5  # qubits; full Kraus tensor beyond this is too large


def _check_completeness(kraus, atol=1e-10):
    d = kraus[0].shape[0]
    s = sum(k.conj().T @ k for k in kraus)
    if np.max(np.abs(s - np.eye(d))) > atol:
        raise ValueError("Kraus set is not trace preserving")


def compress_kraus(kraus, tol=1e-12):
    """Minimal Kraus set via the Choi-matrix spectrum (rank <= d^2)."""
    d = kraus[0].shape[0]
    choi = np.zeros((d * d, d * d), dtype=complex)
    for k in kraus:
        v = k.reshape(-1)
        choi += np.outer(v, v.conj())
    w, vecs = np.linalg.eigh(choi)
    out = []
    for lam, vec in zip(w, vecs.T):
        if lam > tol:
            out.append(np.sqrt(lam) * vec.reshape(d, d))
    return out


class Channel:
    """CPTP map as ordered Kraus factors on qubit subsets of an n-qubit register.

    pauli_probs is set for channels built from a Pauli probability map and
    for depolarizing channels; it maps Pauli words to probabilities.
    """

    def __init__(self, n: int, factors, pauli_probs=None, check: bool = True):
        self.n = int(n)
        self.dim = 2**self.n
        norm_factors = []
        for kraus, qubits in factors:
            kraus = [np.asarray(k, dtype=complex) for k in kraus]
            qubits = tuple(qubits)
            m = n_qubits(kraus[0].shape[0])
            if len(qubits) != m:
                raise ValueError("factor qubit labels do not match Kraus size")
            if any(q < 1 or q > self.n for q in qubits):
                raise ValueError(f"factor qubits {qubits} outside register 1..{self.n}")
            if check:
                _check_completeness(kraus)
            norm_factors.append((tuple(kraus), qubits))
        self.factors = tuple(norm_factors)
        self.pauli_probs = dict(pauli_probs) if pauli_probs is not None else None
        self._depol_p = None
        self._embedded = None

    # -- constructors -------------------------------------------------------

    @classmethod
    def identity(cls, n: int) -> "Channel":
        return cls(n, [([np.eye(2**n, dtype=complex)], tuple(range(1, n + 1)))], check=False)

    @classmethod
    def from_kraus(cls, kraus, n: int | None = None) -> "Channel":
        kraus = [np.asarray(k, dtype=complex) for k in kraus]
        if n is None:
            n = n_qubits(kraus[0].shape[0])
        return cls(n, [(kraus, tuple(range(1, n + 1)))])

    @classmethod
    def unitary(cls, u: np.ndarray) -> "Channel":
        u = np.asarray(u, dtype=complex)
        return cls.from_kraus([u])

    @classmethod
    def from_pauli_probs(cls, probs: dict, n: int | None = None) -> "Channel":
        """Pauli channel from a word -> probability map."""
        items = list(probs.items())
        if n is None:
            n = len(items[0][0])
        total = sum(p for _, p in items)
        if any(p < 0 for _, p in items):
            raise ValueError("negative Pauli probability")
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"Pauli probabilities sum to {total}, not 1")
        kraus = [np.sqrt(p) * pauli_dense(w) for w, p in items if p > 0]
        ch = cls(n, [(kraus, tuple(range(1, n + 1)))])
        ch.pauli_probs = {w: float(p) for w, p in items}
        return ch

    @classmethod
    def depolarizing(cls, n: int, p: float) -> "Channel":
        """rho -> (1-p) rho + p I/2^n."""
        if not 0 <= p <= 4**n / (4**n - 1):
            raise ValueError(f"depolarizing strength {p} out of range")
        share = p / 4**n
        probs = {}
        for w in _pauli_words(n):
            probs[w] = share
        probs["I" * n] = 1 - p + share
        ch = cls.from_pauli_probs(probs, n)
        ch._depol_p = float(p)
        return ch

    @classmethod
    def bit_flip(cls, p: float) -> "Channel":
        return cls.from_pauli_probs({"I": 1 - p, "X": p})

    @classmethod
    def phase_flip(cls, p: float) -> "Channel":
        return cls.from_pauli_probs({"I": 1 - p, "Z": p})

    @classmethod
    def amplitude_damping(cls, gamma: float) -> "Channel":
        if not 0 <= gamma <= 1:
            raise ValueError("gamma must be in [0, 1]")
        k0 = np.array([[1, 0], [0, np.sqrt(1 - gamma)]], dtype=complex)
        k1 = np.array([[0, np.sqrt(gamma)], [0, 0]], dtype=complex)
        return cls.from_kraus([k0, k1])

    # -- structure ----------------------------------------------------------

    def on(self, qubits, n: int) -> "Channel":
        """Lift this channel onto the given 1-based qubits of an n-qubit register."""
        qubits = tuple(qubits)
        if len(set(qubits)) != len(qubits):
            raise ValueError("duplicate qubit labels")
        factors = []
        for kraus, local in self.factors:
            factors.append((kraus, tuple(qubits[q - 1] for q in local)))
        return Channel(n, factors, check=False)

    def then(self, nxt: "Channel") -> "Channel":
        """Composite channel: apply self first, then nxt."""
        if nxt.n != self.n:
            raise ValueError("dim mismatch")
        out = Channel(self.n, self.factors + nxt.factors, check=False)
        return out

    def tensor(self, other: "Channel") -> "Channel":
        n = self.n + other.n
        factors = [(k, q) for k, q in self.factors]
        factors += [(k, tuple(q + self.n for q in qs)) for k, qs in other.factors]
        return Channel(n, factors, check=False)

    def kraus(self):
        """Materialized full-register Kraus list (guarded for n > 5)."""
        if self.n > _MATERIALIZE_LIMIT:
            raise ValueError(
                f"refusing to materialize Kraus tensor for n={self.n} (> {_MATERIALIZE_LIMIT})"
            )
        out = [np.eye(self.dim, dtype=complex)]
        for kraus, qubits in self.factors:
            lifted = [embed(k, qubits, self.n) for k in kraus]
            out = [lk @ o for o in out for lk in lifted]
            if len(out) > self.dim**2:
                out = compress_kraus(out)
        return compress_kraus(out)

    def compressed(self) -> "Channel":
        """Single-factor channel with a minimal Kraus set (n <= 5)."""
        ch = Channel(self.n, [(self.kraus(), tuple(range(1, self.n + 1)))], check=False)
        ch.pauli_probs = self.pauli_probs
        ch._depol_p = self._depol_p
        return ch

    # -- application --------------------------------------------------------

    def _embedded_factors(self):
        # each factor is cached as one stacked (m, dim, dim) array
        if self._embedded is None:
            self._embedded = [
                np.stack(
                    [embed(k, qubits, self.n) if len(qubits) != self.n or qubits != tuple(range(1, self.n + 1)) else k
                     for k in kraus]
                )
                for kraus, qubits in self.factors
            ]
        return self._embedded

    def apply(self, rho: np.ndarray) -> np.ndarray:
        rho = np.asarray(rho, dtype=complex)
        if rho.shape != (self.dim, self.dim):
            raise ValueError(f"state dim {rho.shape} does not match channel dim {self.dim}")
        if self._depol_p is not None:
            return (1 - self._depol_p) * rho + self._depol_p * np.trace(rho).real * np.eye(
                self.dim
            ) / self.dim
        out = rho
        for stacked in self._embedded_factors():
            if stacked.shape[0] == 1:
                k = stacked[0]
                out = k @ out @ k.conj().T
            else:
                out = np.tensordot(stacked @ out, stacked.conj(), axes=([0, 2], [0, 2]))
        return out

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        return self.apply(rho)


def _pauli_words(n: int):
    words = [""]
    for _ in range(n):
        words = [w + c for w in words for c in "IXYZ"]
    return [w for w in words if w != "I" * n]


def apply_channel(ch: Channel, rho: np.ndarray) -> np.ndarray:
    return ch.apply(rho)


def pauli_probs_by_weight(n: int, weight_masses: dict) -> dict:
    """Pauli error distribution spreading each weight class's mass uniformly.

    weight_masses maps error weight -> total probability of that class; the
    remainder lands on the identity, so Pr(no error) = 1 - sum(masses).
    """
    probs = {}
    total = 0.0
    for w, mass in weight_masses.items():
        w = int(w)
        if not 1 <= w <= n:
            raise ValueError(f"error weight {w} outside 1..{n}")
        if mass < 0:
            raise ValueError("class masses must be nonnegative")
        share = mass / (math.comb(n, w) * 3**w)
        for word in _pauli_words(n):
            if sum(c != "I" for c in word) == w:
                probs[word] = probs.get(word, 0.0) + share
        total += mass
    if total > 1 + 1e-12:
        raise ValueError(f"class masses sum to {total} > 1")
    probs["I" * n] = 1 - total
    return probs


def pauli_transfer_eigenvalue(probs: dict, word: str) -> float:
    """Eigenvalue of a Pauli channel on a Pauli-string observable.

    A Pauli channel maps P -> lambda_P P with
    lambda_P = sum_Q p_Q * (+1 if [Q, P] = 0 else -1).
    """
    p_ref = PauliString(word)
    lam = 0.0
    for q, p in probs.items():
        lam += p if PauliString(q).commutes(p_ref) else -p
    return lam


def t1t2_channel(sys, t: float) -> Channel:
    """Per-spin relaxation for time t: amplitude damping toward |0> plus the
    extra pure dephasing that brings transverse decay to exp(-t/T2*)."""
    if t < 0:
        raise ValueError("t must be >= 0")
    factors = []
    for q in range(1, sys.n + 1):
        t1, t2 = sys.t1[q - 1], sys.t2star[q - 1]
        if t2 > t1:
            raise ValueError(f"spin {q}: T2* {t2} exceeds T1 {t1}")
        gamma = 1.0 - np.exp(-t / t1)
        rate = 1.0 / t2 - 1.0 / (2.0 * t1)  # leftover pure-dephasing rate
        p = 0.5 * (1.0 - np.exp(-rate * t))
        ad = Channel.amplitude_damping(gamma)
        deph = Channel.from_pauli_probs({"I": 1 - p, "Z": p})
        one = compress_kraus(
            [kd @ ka for ka in ad.factors[0][0] for kd in deph.factors[0][0]]
        )
        factors.append((one, (q,)))
    return Channel(sys.n, factors, check=False)


def depolarize_via_gradient(rho: np.ndarray, targets) -> np.ndarray:
    """Rotate targets into the transverse plane, then crush their coherences.

    The crush zeroes every element off-diagonal in the targets' z-basis,
    the dense-matrix equivalent of dephasing under a strong field gradient.
    """
    from .control import rotation

    targets = sorted(set(targets))
    if not targets:
        raise ValueError("need at least one target")
    rho = np.asarray(rho, dtype=complex)
    n = n_qubits(rho.shape[0])
    for q in targets:
        r = rotation("y", np.pi / 2, q, n)
        rho = r @ rho @ r.conj().T
    return crush_coherences(rho, targets)


def crush_coherences(rho: np.ndarray, targets) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    n = n_qubits(rho.shape[0])
    idx = np.arange(rho.shape[0])
    mask = 0
    for q in targets:
        mask |= 1 << (n - q)
    tgt_bits = idx & mask
    keep = tgt_bits[:, None] == tgt_bits[None, :]
    return np.where(keep, rho, 0.0)


def interleave(unitary_steps, ch_per_step: Channel) -> Channel:
    """Channel applying U_m then the noise step, for each m in order."""
    n = ch_per_step.n
    factors = []
    for u in unitary_steps:
        factors.append(([np.asarray(u, dtype=complex)], tuple(range(1, n + 1))))
        factors.extend(ch_per_step.factors)
    if not factors:
        return Channel.identity(n)
    return Channel(n, factors, check=False)
