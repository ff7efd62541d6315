"""Pulse-level control: rotations, coupling gates, GRAPE, pulse fixing."""

import numpy as np
import pytest
from scipy.linalg import expm

from nmrqip.control import (
    ControlPulse,
    DistortionModel,
    GrapeConfig,
    cnot_sequence,
    control_channels,
    default_b1_distribution,
    euler_decompose,
    grape_fidelity,
    grape_gradient,
    grape_optimize,
    _fd_gradient,
    j_evolution,
    load_pulse,
    pulse_fix,
    random_pulse,
    refocus_all_but,
    rf_selection_retention,
    rotation,
    save_pulse,
    step_propagator,
)
from nmrqip.qop import PAULIS, gate_fidelity_hs, haar_random_unitary
from nmrqip.spins import SpinSystem, builtin_molecule, internal_hamiltonian, spin_op

CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)


def uncoupled_1spin():
    return SpinSystem(1, (0.0,), ((0.0,),), (5.0,), (0.5,))


def test_rotation_matches_expm():
    for axis, sig in (("x", PAULIS["X"]), ("y", PAULIS["Y"]), ("z", PAULIS["Z"])):
        for theta in (0.3, np.pi / 2, -1.7):
            assert np.allclose(rotation(axis, theta),
                               expm(-1j * theta * sig / 2), atol=1e-12)
    nvec = np.array([1.0, 2.0, -2.0])
    nhat = nvec / 3.0
    h = sum(c * PAULIS[a] for c, a in zip(nhat, "XYZ"))
    assert np.allclose(rotation(nvec, 0.8), expm(-1j * 0.8 * h / 2), atol=1e-12)


def test_rotation_phase_axis_convention():
    # bare angle phi means the in-plane axis (cos phi, -sin phi, 0)
    assert np.allclose(rotation(0.0, 1.1), rotation("x", 1.1))
    assert np.allclose(rotation(-np.pi / 2, 1.1), rotation("y", 1.1))


def test_rotation_embeds():
    got = rotation("x", np.pi, 2, 2)
    assert np.allclose(got, np.kron(np.eye(2), rotation("x", np.pi)))
    with pytest.raises(ValueError):
        rotation(np.zeros(3), 1.0)


def test_euler_decompose_roundtrip(rng):
    for _ in range(10):
        u = haar_random_unitary(2, rng) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        alpha, beta, gamma, delta = euler_decompose(u)
        rebuilt = (np.exp(1j * alpha) * rotation("x", beta)
                   @ rotation("y", gamma) @ rotation("x", delta))
        assert np.allclose(rebuilt, u, atol=1e-9)


def test_j_evolution_matches_expm():
    sys_ = builtin_molecule("chloroform2")
    zz = spin_op("z", 1, 2) @ spin_op("z", 2, 2)
    t = 1 / (2 * 215.0)
    assert np.allclose(j_evolution(sys_, (1, 2), t),
                       expm(-1j * 2 * np.pi * 215.0 * t * zz), atol=1e-12)
    three = builtin_molecule("malonate3")
    with pytest.raises(ValueError):
        j_evolution(SpinSystem(2, (0, 0), ((0, 0.0), (0.0, 0)), (1, 1),
                               (0.1, 0.1)), (1, 2), t)
    del three


def test_cnot_sequence_is_exact():
    sys_ = builtin_molecule("chloroform2")
    u = cnot_sequence(sys_, 1, 2)
    assert np.allclose(u, CNOT, atol=1e-12)
    # reversed roles give the target-on-spin-1 variant
    swapped = cnot_sequence(sys_, 2, 1)
    expect = np.array(
        [[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]], dtype=complex
    )
    assert gate_fidelity_hs(swapped, expect) == pytest.approx(1.0)


def test_refocus_keeps_one_coupling():
    sys_ = builtin_molecule("malonate3")
    t = 0.004
    sched, u = refocus_all_but(sys_, (1, 2), t)
    want = j_evolution(sys_, (1, 2), t)
    assert gate_fidelity_hs(u, want) == pytest.approx(1.0, abs=1e-9)
    assert sched.total_time == pytest.approx(t)
    # every spin's toggling frame closes: even flip count
    flips = {q: 0 for q in range(1, 4)}
    for _, q in sched.pulses:
        flips[q] += 1
    assert all(c % 2 == 0 for c in flips.values())


def test_step_propagator_matches_expm(rng):
    sys_ = builtin_molecule("chloroform2")
    h = internal_hamiltonian(sys_)
    _, ops = control_channels(sys_)
    u_k = rng.uniform(-1e3, 1e3, size=len(ops))
    dt = 3e-5
    h_tot = h + sum(u * op for u, op in zip(u_k, ops))
    assert np.allclose(step_propagator(h, u_k, ops, dt),
                       expm(-1j * h_tot * dt), atol=1e-10)


def test_control_pulse_validation():
    with pytest.raises(ValueError, match="n_steps, n_channels"):
        ControlPulse(1e-5, np.zeros(4), ("a.x",))
    with pytest.raises(ValueError, match="dt"):
        ControlPulse(0.0, np.zeros((4, 1)), ("a.x",))
    with pytest.raises(ValueError, match="u_max"):
        ControlPulse(1e-5, np.full((4, 1), 10.0), ("a.x",), u_max=5.0)
    p = ControlPulse(1e-5, np.zeros((4, 2)), ("a.x", "a.y"))
    assert p.n_steps == 4 and p.duration == pytest.approx(4e-5)


def test_phase_amplitude_view():
    a = np.array([100.0, 50.0])
    phi = np.array([0.3, -1.2])
    amps = np.stack([a * np.cos(phi), -a * np.sin(phi)], axis=1)
    p = ControlPulse(1e-5, amps, ("1H.x", "1H.y"))
    amp, phase = p.phase_amplitude()["1H"]
    assert np.allclose(amp, a) and np.allclose(phase, phi)


def test_save_load_pulse_roundtrip(tmp_path):
    p = random_pulse(12, 2e-5, ("1H.x", "1H.y"), seed=3, scale=0.4)
    f = tmp_path / "pulse.json"
    save_pulse(p, f)
    q = load_pulse(f, u_max=p.u_max)
    assert q.dt == p.dt and q.channels == p.channels
    assert np.array_equal(q.amplitudes, p.amplitudes)


def test_control_channels_chloroform():
    sys_ = builtin_molecule("chloroform2")
    names, ops = control_channels(sys_)
    assert names == ("1H.x", "1H.y", "13C.x", "13C.y")
    assert np.allclose(ops[0], spin_op("x", 1, 2))
    assert np.allclose(ops[3], spin_op("y", 2, 2))
    # shared channel on a homonuclear pair drives both spins at once
    four = builtin_molecule("crotonic4")
    names4, ops4 = control_channels(four)
    assert names4 == ("13C.x", "13C.y")
    assert np.allclose(ops4[0], sum(spin_op("x", q, 4) for q in range(1, 5)))


def test_grape_fidelity_limits():
    sys_ = uncoupled_1spin()
    _, ops = control_channels(sys_)
    h = internal_hamiltonian(sys_)
    idle = ControlPulse(1e-5, np.zeros((5, 2)), ("H.x", "H.y"))
    assert grape_fidelity(np.eye(2), h, ops, idle) == pytest.approx(1.0)
    assert grape_fidelity(PAULIS["X"], h, ops, idle) == pytest.approx(0.0)


def test_grape_gradient_matches_finite_difference(rng):
    sys_ = builtin_molecule("chloroform2")
    h = internal_hamiltonian(sys_)
    names, ops = control_channels(sys_)
    target = np.kron(rotation("x", np.pi / 2), np.eye(2))
    pulse = random_pulse(6, 5e-5, names, seed=17, scale=0.3)
    g = grape_gradient(target, h, ops, pulse)
    g_fd = _fd_gradient(target, h, ops, pulse)
    assert np.linalg.norm(g - g_fd) / np.linalg.norm(g) < 1e-6


def test_grape_optimize_one_spin_pi_pulse():
    sys_ = uncoupled_1spin()
    names, _ = control_channels(sys_)
    init = random_pulse(20, 1e-5, names, seed=5)
    cfg = GrapeConfig(max_iters=300, target_fidelity=0.999)
    res = grape_optimize(sys_, rotation("x", np.pi), init, cfg)
    assert res.converged and res.fidelity >= 0.999
    assert np.all(np.diff(res.fidelities) >= -1e-12)
    assert np.max(np.abs(res.pulse.amplitudes)) <= cfg.u_max * (1 + 1e-12)


def test_grape_optimize_rf_weighted():
    sys_ = uncoupled_1spin()
    names, _ = control_channels(sys_)
    init = random_pulse(20, 1e-5, names, seed=5)
    cfg = GrapeConfig(max_iters=400, target_fidelity=0.99,
                      rf_distribution=((0.95, 0.5), (1.05, 0.5)))
    res = grape_optimize(sys_, rotation("x", np.pi), init, cfg)
    assert res.converged
    with pytest.raises(ValueError, match="sum to 1"):
        GrapeConfig(rf_distribution=((0.9, 0.7), (1.1, 0.7)))
    with pytest.raises(ValueError, match="gradient_mode"):
        GrapeConfig(gradient_mode="bogus")


def test_grape_channel_mismatch_raises():
    sys_ = builtin_molecule("chloroform2")
    init = random_pulse(4, 1e-5, ("wrong.x", "wrong.y"))
    with pytest.raises(ValueError, match="channels"):
        grape_optimize(sys_, np.eye(4), init, GrapeConfig())


def test_pulse_fix_converges():
    ts = np.arange(40)
    env = 6e4 * np.exp(-0.5 * ((ts - 20) / 7.0) ** 2)
    amps = np.stack([env * np.cos(0.2 * ts), env * np.sin(0.2 * ts)], axis=1)
    designed = ControlPulse(1e-5, amps, ("1H.x", "1H.y"))
    dist = DistortionModel(kernel=(0.2, 0.6, 0.2),
                           gain_curve=((0.0, 0.0), (2e5, 1.8e5), (1e6, 8e5)))
    out = pulse_fix(designed, dist, n_loops=30)
    r = out.residuals
    assert r[-1] < r[0] * 1e-4
    assert all(b <= a * (1 + 1e-12) for a, b in zip(r, r[1:]))
    # the returned pulse includes one update past the last logged residual
    produced = dist.apply(out.commanded.amplitudes)
    assert np.max(np.abs(produced - designed.amplitudes)) <= r[-1]


def test_distortion_model_validation():
    with pytest.raises(ValueError, match="unit DC gain"):
        DistortionModel(kernel=(0.5, 0.2))
    with pytest.raises(ValueError, match="monotone"):
        DistortionModel(gain_curve=((0.0, 0.0), (1.0, 2.0), (2.0, 1.0)))


def test_rf_selection_retention_fixture():
    assert rf_selection_retention(0.02) == pytest.approx(0.12, abs=0.01)
    assert rf_selection_retention(0.0) == pytest.approx(0.0)
    windows = np.linspace(0.0, 0.5, 11)
    vals = [rf_selection_retention(w) for w in windows]
    assert all(b >= a for a, b in zip(vals, vals[1:]))
    edges, weights = default_b1_distribution()
    assert weights.sum() == pytest.approx(1.0)
    assert rf_selection_retention(1.0, (edges, weights)) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        rf_selection_retention(-0.1)
