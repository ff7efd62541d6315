"""One-clean-qubit trace estimation.

A single control spin with polarization eps (the one "clean" qubit) plus a
maximally mixed n-spin target suffice to estimate the normalized trace
Tr(U)/2^n: Hadamard the control, apply controlled-U, and read the control's
transverse magnetization.  The readout scales linearly with eps, so the
estimator divides the polarization back out; at eps = 1 the exact-expectation
mode returns Tr(U)/2^n to machine precision.

The block-trace variant adds a second pseudo-pure qubit whose preparation
angle sets the weights of the two diagonal blocks, turning the same circuit
into a weighted block-trace estimator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..qop import (
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    check_unitary,
    controlled,
    embed,
    expectation,
    n_qubits,
    partial_trace,
)

_HADAMARD = (SIGMA_X + SIGMA_Z) / np.sqrt(2)


@dataclass(frozen=True)
class Dqc1Instance:
    """Trace-estimation problem: target unitary, control polarization, mode.

    shots = None means exact ensemble expectations; an integer runs the
    readout as two binomial samples (x and y magnetization separately).
    """

    u: np.ndarray
    epsilon: float = 1.0
    shots: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "u", check_unitary(np.asarray(self.u, dtype=complex)))
        if not 0 < self.epsilon <= 1:
            raise ValueError(f"control polarization {self.epsilon} not in (0, 1]")
        if self.shots is not None and self.shots < 1:
            raise ValueError("shots must be a positive integer")

    @property
    def n_target(self) -> int:
        return n_qubits(self.u.shape[0])


def dqc1_input_state(inst: Dqc1Instance) -> np.ndarray:
    """Control with polarization eps along z, target maximally mixed."""
    d = 2 ** inst.n_target
    control = np.diag([1 + inst.epsilon, 1 - inst.epsilon]) / 2
    return np.kron(control, np.eye(d)) / d


def _run_circuit(inst: Dqc1Instance) -> np.ndarray:
    n = inst.n_target
    rho = dqc1_input_state(inst)
    h = embed(_HADAMARD, [1], n + 1)
    rho = h @ rho @ h.conj().T
    cu = controlled(inst.u)
    return cu @ rho @ cu.conj().T


def _transverse_readout(rho: np.ndarray, n_total: int) -> complex:
    sx = expectation(rho, embed(SIGMA_X, [1], n_total))
    sy = expectation(rho, embed(SIGMA_Y, [1], n_total))
    return sx + 1j * sy


def _sample_expectation(value: float, shots: int, rng: np.random.Generator) -> float:
    # ensemble readout emulated as a two-outcome experiment per axis
    p_up = min(1.0, max(0.0, (1 + value) / 2))
    return 2 * rng.binomial(shots, p_up) / shots - 1


def dqc1_trace(inst: Dqc1Instance, rng: np.random.Generator | None = None) -> complex:
    """Estimate Tr(U)/2^n from the control's x/y magnetization."""
    rho = _run_circuit(inst)
    signal = _transverse_readout(rho, inst.n_target + 1)
    if inst.shots is not None:
        if rng is None:
            raise ValueError("sampled mode needs an rng")
        signal = _sample_expectation(signal.real, inst.shots, rng) + 1j * _sample_expectation(
            signal.imag, inst.shots, rng
        )
    return signal / inst.epsilon


def control_reduced_state(inst: Dqc1Instance) -> np.ndarray:
    """Reduced control state after the circuit.

    Noiselessly this equals I/2 + eps (Re Tr(U) sx + Im Tr(U) sy)/2^{n+1};
    the off-diagonal carries the whole answer.
    """
    return partial_trace(_run_circuit(inst), [1], inst.n_target + 1)


def control_target_ppt(inst: Dqc1Instance) -> float:
    """Smallest eigenvalue of the partial transpose over the target.

    Nonnegative output witnesses that the circuit never entangles the
    control with the target across this cut.
    """
    d = 2 ** inst.n_target
    rho = _run_circuit(inst)
    pt = rho.reshape(2, d, 2, d).transpose(0, 3, 2, 1).reshape(2 * d, 2 * d)
    return float(np.linalg.eigvalsh(pt)[0])


def _block_split(u: np.ndarray, atol: float = 1e-12):
    d = u.shape[0]
    if d < 4 or d % 2:
        raise ValueError("need at least two qubits for the block variant")
    half = d // 2
    off = max(np.abs(u[:half, half:]).max(), np.abs(u[half:, :half]).max())
    if off > atol:
        raise ValueError(f"unitary is not block diagonal in the leading qubit (offblock {off:.2e})")
    return u[:half, :half], u[half:, half:]


def dqc1_block_trace(
    u: np.ndarray,
    theta: float = np.pi / 4,
    epsilon: float = 1.0,
    epsilon2: float = 1.0,
    shots: int | None = None,
    rng: np.random.Generator | None = None,
) -> complex:
    """Weighted sum of the two blocks' normalized traces.

    u must be block diagonal in the basis of its leading qubit.  That qubit
    is prepared pseudo-pure (polarization epsilon2) and rotated by theta, so
    the readout weights are

        w0 = eps2 cos^2(theta) + (1 - eps2)/2,   w1 likewise with sin^2,

    and the estimate is w0 Tr(U0)/2^{n-1} + w1 Tr(U1)/2^{n-1}.
    """
    u = check_unitary(np.asarray(u, dtype=complex))
    _block_split(u)
    if not 0 < epsilon2 <= 1:
        raise ValueError(f"block-qubit polarization {epsilon2} not in (0, 1]")
    m = n_qubits(u.shape[0])
    chi = np.array([np.cos(theta), np.sin(theta)], dtype=complex)
    selector = epsilon2 * np.outer(chi, chi.conj()) + (1 - epsilon2) * np.eye(2) / 2

    inst = Dqc1Instance(u, epsilon=epsilon, shots=shots)
    control = np.diag([1 + epsilon, 1 - epsilon]) / 2.0
    rest = np.eye(2 ** (m - 1)) / 2 ** (m - 1)
    rho = np.kron(np.kron(control, selector), rest)
    h = embed(_HADAMARD, [1], m + 1)
    rho = h @ rho @ h.conj().T
    cu = controlled(u)
    rho = cu @ rho @ cu.conj().T

    signal = _transverse_readout(rho, m + 1)
    if shots is not None:
        if rng is None:
            raise ValueError("sampled mode needs an rng")
        signal = _sample_expectation(signal.real, shots, rng) + 1j * _sample_expectation(
            signal.imag, shots, rng
        )
    return signal / inst.epsilon


def block_trace_direct(u: np.ndarray, theta: float = np.pi / 4, epsilon2: float = 1.0) -> complex:
    """Reference value for dqc1_block_trace computed straight from the blocks."""
    u0, u1 = _block_split(np.asarray(u, dtype=complex))
    half = u0.shape[0]
    w0 = epsilon2 * np.cos(theta) ** 2 + (1 - epsilon2) / 2
    w1 = epsilon2 * np.sin(theta) ** 2 + (1 - epsilon2) / 2
    return complex(w0 * np.trace(u0) / half + w1 * np.trace(u1) / half)
