"""Spin-system models: molecules, internal Hamiltonians, PPS, and readout.

Internal Hamiltonians are returned in angular-frequency units (rad/s); all
molecule parameters (offsets, couplings) are stored in Hz.  Spin operators
are I_a = sigma_a/2 throughout.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field

import numpy as np

from .qop import SIGMA_X, SIGMA_Y, SIGMA_Z, basis_ket, embed, ket_density

IX = SIGMA_X / 2
IY = SIGMA_Y / 2
IZ = SIGMA_Z / 2


@dataclass(frozen=True)
class SpinSystem:
    """Rotating-frame model of an n-spin molecule.

    offsets: per-spin offset nu_i in Hz relative to the channel carrier.
    couplings: symmetric n x n scalar-coupling matrix J_ij in Hz, zero diagonal.
    t1, t2star: per-spin relaxation times in seconds, t1_i >= t2star_i > 0.
    species: per-spin nuclide tags; spins of one species share an RF channel.
    """

    n: int
    offsets: tuple
    couplings: tuple
    t1: tuple
    t2star: tuple
    species: tuple = ()
    name: str = ""

    def __post_init__(self):
        n = self.n
        if n < 1:
            raise ValueError("need at least one spin")
        object.__setattr__(self, "offsets", tuple(float(v) for v in self.offsets))
        object.__setattr__(self, "t1", tuple(float(v) for v in self.t1))
        object.__setattr__(self, "t2star", tuple(float(v) for v in self.t2star))
        j = np.array(self.couplings, dtype=float)
        if j.shape != (n, n):
            raise ValueError(f"couplings must be {n}x{n}")
        if np.max(np.abs(j - j.T)) > 0:
            raise ValueError("coupling matrix must be symmetric")
        if np.max(np.abs(np.diagonal(j))) > 0:
            raise ValueError("coupling matrix must have zero diagonal")
        object.__setattr__(self, "couplings", tuple(map(tuple, j)))
        if len(self.offsets) != n or len(self.t1) != n or len(self.t2star) != n:
            raise ValueError("per-spin arrays must have length n")
        species = tuple(self.species) if self.species else tuple("H" for _ in range(n))
        if len(species) != n:
            raise ValueError("species must have length n")
        object.__setattr__(self, "species", species)
        for i, (a, b) in enumerate(zip(self.t1, self.t2star)):
            if not (a >= b > 0):
                raise ValueError(f"spin {i + 1}: need t1 >= t2star > 0, got {a}, {b}")

    @property
    def j(self) -> np.ndarray:
        return np.array(self.couplings, dtype=float)

    def channels(self):
        """Species groups as (label, 1-based spin list), in first-seen order."""
        groups: dict = {}
        for i, s in enumerate(self.species, start=1):
            groups.setdefault(s, []).append(i)
        return list(groups.items())

    @property
    def dim(self) -> int:
        return 2**self.n


def spin_op(axis: str, spin: int, n: int) -> np.ndarray:
    """I_axis on one 1-based spin of an n-spin register (dense 2^n matrix)."""
    base = {"x": IX, "y": IY, "z": IZ}[axis.lower()]
    return embed(base, [spin], n)


def zeeman_hamiltonian(sys: SpinSystem) -> np.ndarray:
    h = np.zeros((sys.dim, sys.dim), dtype=complex)
    for i, nu in enumerate(sys.offsets, start=1):
        if nu != 0.0:
            h -= 2 * np.pi * nu * spin_op("z", i, sys.n)
    return h


def internal_hamiltonian(sys: SpinSystem, weak_coupling: bool = True) -> np.ndarray:
    """Rotating-frame internal Hamiltonian in rad/s.

    Weak form: -sum 2 pi nu_i Iz_i + sum_{i<j} 2 pi J_ij Iz_i Iz_j (diagonal).
    Full form keeps the isotropic IxIx + IyIy + IzIz coupling instead.
    Requesting the weak form when some homonuclear pair has
    |2 pi J| > 0.1 |delta omega| emits a warning but still returns it.
    """
    h = zeeman_hamiltonian(sys)
    j = sys.j
    for i in range(1, sys.n + 1):
        for k in range(i + 1, sys.n + 1):
            jik = j[i - 1, k - 1]
            if jik == 0.0:
                continue
            if weak_coupling:
                h += 2 * np.pi * jik * (spin_op("z", i, sys.n) @ spin_op("z", k, sys.n))
            else:
                for ax in "xyz":
                    h += 2 * np.pi * jik * (
                        spin_op(ax, i, sys.n) @ spin_op(ax, k, sys.n)
                    )
    if weak_coupling:
        _warn_if_strongly_coupled(sys)
    return h


def _warn_if_strongly_coupled(sys: SpinSystem, ratio: float = 0.1):
    j = sys.j
    for i in range(sys.n):
        for k in range(i + 1, sys.n):
            if sys.species[i] != sys.species[k] or j[i, k] == 0.0:
                continue
            d_omega = 2 * np.pi * abs(sys.offsets[i] - sys.offsets[k])
            if abs(2 * np.pi * j[i, k]) > ratio * d_omega:
                warnings.warn(
                    f"spins {i + 1},{k + 1}: weak-coupling form requested but "
                    f"|2piJ| exceeds {ratio} of the offset difference",
                    stacklevel=3,
                )


def thermal_state(sys: SpinSystem, beta_scaled: float) -> np.ndarray:
    """exp(-beta H_Z)/Z for the Zeeman part; the maximally mixed state at beta=0."""
    if beta_scaled < 0:
        raise ValueError("beta_scaled must be >= 0")
    hz = zeeman_hamiltonian(sys)
    w = np.diagonal(hz).real  # Zeeman part is diagonal
    logp = -beta_scaled * (w - w.min())
    p = np.exp(logp)
    p /= p.sum()
    return np.diag(p).astype(complex)


def make_pps(n: int, epsilon: float) -> np.ndarray:
    """Pseudo-pure state (1-eps)/2^n I + eps |0...0><0...0|."""
    if not 0 < epsilon <= 1:
        raise ValueError(f"epsilon must be in (0, 1], got {epsilon}")
    d = 2**n
    rho = (1 - epsilon) / d * np.eye(d, dtype=complex)
    rho[0, 0] += epsilon
    return rho


def pps_on(psi: np.ndarray, epsilon: float) -> np.ndarray:
    """Pseudo-pure state around an arbitrary pure state."""
    if not 0 < epsilon <= 1:
        raise ValueError(f"epsilon must be in (0, 1], got {epsilon}")
    d = len(psi)
    return (1 - epsilon) / d * np.eye(d, dtype=complex) + epsilon * ket_density(psi)


def simulate_fid(
    rho: np.ndarray,
    sys: SpinSystem,
    duration: float,
    n_samples: int,
    weak_coupling: bool = True,
) -> np.ndarray:
    """Ensemble free-induction signal sum_i Tr(rho(t) (Ix_i + i Iy_i)) e^(-t/T2*_i).

    rho evolves under the internal Hamiltonian; T2* enters as a per-spin
    multiplicative envelope on that spin's contribution.
    """
    if n_samples < 2:
        raise ValueError("need at least two samples")
    if duration <= 0:
        raise ValueError("duration must be positive")
    h = internal_hamiltonian(sys, weak_coupling=weak_coupling)
    w, v = np.linalg.eigh(h)
    rho_e = v.conj().T @ rho @ v
    obs = [
        v.conj().T @ (spin_op("x", i, sys.n) + 1j * spin_op("y", i, sys.n)) @ v
        for i in range(1, sys.n + 1)
    ]
    ts = np.arange(n_samples) * (duration / n_samples)
    sig = np.zeros(n_samples, dtype=complex)
    for k, t in enumerate(ts):
        ph = np.exp(-1j * w * t)
        rho_t = ph[:, None] * rho_e * ph.conj()[None, :]
        for i, ob in enumerate(obs):
            sig[k] += np.trace(rho_t @ ob) * np.exp(-t / sys.t2star[i])
    return sig


def spectrum(fid: np.ndarray, sample_rate: float):
    """Discrete spectrum of a uniformly sampled FID.

    Returns (freqs_hz, amplitudes), frequency-sorted.  The "ortho" FFT
    normalization keeps sum |s|^2 equal in both domains.
    """
    fid = np.asarray(fid, dtype=complex)
    amps = np.fft.fftshift(np.fft.fft(fid, norm="ortho"))
    freqs = np.fft.fftshift(np.fft.fftfreq(len(fid), d=1.0 / sample_rate))
    return freqs, amps


# ---------------------------------------------------------------------------
# molecule registry

_MOLECULE_KEYS = {"name", "n", "offsets_hz", "j_hz", "t1_s", "t2star_s", "species"}


def _j_matrix(n: int, entries) -> np.ndarray:
    j = np.zeros((n, n))
    for row in entries:
        i, k, val = int(row[0]), int(row[1]), float(row[2])
        if not (1 <= i < k <= n):
            raise ValueError(f"bad coupling entry {row}: need 1 <= i < j <= n")
        if j[i - 1, k - 1] != 0.0:
            raise ValueError(f"duplicate coupling entry for spins {i},{k}")
        j[i - 1, k - 1] = j[k - 1, i - 1] = val
    return j


def load_molecule(path) -> SpinSystem:
    """Read a molecule JSON file (keys: n, offsets_hz, j_hz, t1_s, t2star_s, species)."""
    with open(path) as fh:
        raw = json.load(fh)
    unknown = set(raw) - _MOLECULE_KEYS
    if unknown:
        raise ValueError(f"unknown molecule keys {sorted(unknown)}")
    n = int(raw["n"])
    return SpinSystem(
        n=n,
        offsets=raw["offsets_hz"],
        couplings=_j_matrix(n, raw.get("j_hz", [])),
        t1=raw["t1_s"],
        t2star=raw["t2star_s"],
        species=tuple(raw.get("species", ())),
        name=str(raw.get("name", "")),
    )


def builtin_molecule(name: str) -> SpinSystem:
    """Load one of the bundled molecule fixtures by name."""
    from importlib.resources import files

    path = files("nmrqip.data.molecules").joinpath(name + ".json")
    if not path.is_file():
        avail = sorted(p.name[:-5] for p in files("nmrqip.data.molecules").iterdir()
                       if p.name.endswith(".json"))
        raise ValueError(f"no molecule {name!r}; available: {avail}")
    return load_molecule(path)
