import numpy as np
import pytest

from nlevel_rabi.model import (
    ConfigError,
    Detunings,
    DriveSpec,
    LevelSpec,
    StateVector,
    apply_resonance,
    build_h0,
    build_interaction_rwa,
    detunings,
    full_hamiltonian,
    full_hamiltonian_nonrwa,
    is_resonant,
    residual_coupling,
    rotating_frame,
    rotating_frame_phases,
    split_c_r,
    transformed_hamiltonian,
)


def test_level_spec_validates():
    with pytest.raises(ConfigError):
        LevelSpec((1.0,))
    with pytest.raises(ConfigError):
        LevelSpec((0.0, 0.0))
    with pytest.raises(ConfigError):
        LevelSpec((1.0, 0.5))


def test_level_spec_shifts_ground_to_zero():
    lev = LevelSpec((2.0, 3.0, 4.5))
    assert lev.energies == (0.0, 1.0, 2.5)
    assert lev.deltas[0] == 0.0


def test_drive_spec_validates():
    with pytest.raises(ConfigError):
        DriveSpec(n=2, omega={(0, 1): 1.0}, g=0.0)
    with pytest.raises(ConfigError):
        DriveSpec(n=3, omega={(0, 1): 1.0}, g=0.1)  # missing pairs
    with pytest.raises(ConfigError):
        DriveSpec(n=2, omega={(0, 1): -1.0}, g=0.1)


def test_state_vector_norm_check():
    with pytest.raises(ConfigError):
        StateVector(np.array([1.0, 1.0]))
    sv = StateVector.normalized([1.0, 1.0])
    assert abs(np.linalg.norm(sv.amp) - 1.0) < 1e-15
    np.testing.assert_allclose(StateVector.basis(3, 1).populations(), [0, 1, 0])


def test_build_h0():
    np.testing.assert_array_equal(build_h0(LevelSpec((0.0, 1.0))), np.diag([0.0, 1.0]))
    np.testing.assert_allclose(
        build_h0(LevelSpec((0.5, 1.5, 3.0))), np.diag([0.0, 1.0, 2.5])
    )
    # two-level form diag(0, Delta) with the constant offset dropped
    lev = LevelSpec((1.3, 2.0))
    np.testing.assert_allclose(build_h0(lev), np.diag([0.0, 0.7]))


def test_interaction_rwa_at_zero():
    drive = apply_resonance(LevelSpec((0.0, 1.0, 2.0)), g=0.1)
    v = build_interaction_rwa(drive, 0.0)
    np.testing.assert_array_equal(np.diag(v), np.zeros(3))
    off = v[~np.eye(3, dtype=bool)]
    np.testing.assert_allclose(off, np.ones(6), atol=0)


def test_interaction_rwa_two_level_phase():
    w = 1.7
    drive = DriveSpec(n=2, omega={(0, 1): w}, g=0.5)
    t = 0.9
    v = build_interaction_rwa(drive, t)
    np.testing.assert_allclose(
        v, [[0, np.exp(1j * w * t)], [np.exp(-1j * w * t), 0]], atol=1e-15
    )


def test_interaction_rwa_unit_circle_points():
    # omega_01*t = pi/2, omega_12*t = pi, omega_02*t = 3*pi/2 at t = 1
    drive = DriveSpec(
        n=3, omega={(0, 1): np.pi / 2, (1, 2): np.pi, (0, 2): 3 * np.pi / 2}, g=1.0
    )
    v = build_interaction_rwa(drive, 1.0)
    assert abs(v[0, 1] - 1j) < 1e-15
    assert abs(v[1, 2] + 1.0) < 1e-15
    assert abs(v[0, 2] + 1j) < 1e-15
    np.testing.assert_allclose(v, v.conj().T, atol=1e-15)


def test_full_hamiltonian_small_coupling_is_h0():
    lev = LevelSpec((0.0, 1.0, 2.0))
    drive = apply_resonance(lev, g=1e-15)
    h = full_hamiltonian(lev, drive)
    assert np.max(np.abs(h(3.7) - build_h0(lev))) < 1e-14


def test_full_hamiltonian_two_level_matrix():
    lev = LevelSpec((0.0, 2.0))
    drive = apply_resonance(lev, g=0.3)
    h = full_hamiltonian(lev, drive)(1.1)
    w = 2.0
    expected = np.array(
        [[0, 0.3 * np.exp(1j * w * 1.1)], [0.3 * np.exp(-1j * w * 1.1), 2.0]]
    )
    np.testing.assert_allclose(h, expected, atol=1e-15)


def test_full_hamiltonian_three_level_entries():
    lev = LevelSpec((0.0, 1.0, 2.5))
    drive = apply_resonance(lev, g=0.2, nonadjacent={(0, 2): 2.7})
    t = 0.8
    h = full_hamiltonian(lev, drive)(t)
    assert abs(h[0, 1] - 0.2 * np.exp(1j * 1.0 * t)) < 1e-15
    assert abs(h[1, 2] - 0.2 * np.exp(1j * 1.5 * t)) < 1e-15
    assert abs(h[0, 2] - 0.2 * np.exp(1j * 2.7 * t)) < 1e-15
    np.testing.assert_allclose(np.diag(h).real, [0.0, 1.0, 2.5])


def test_nonrwa_hamiltonian_real_symmetric():
    lev = LevelSpec((0.0, 1.0, 2.0))
    drive = apply_resonance(lev, g=0.4, rwa=False)
    h = full_hamiltonian_nonrwa(lev, drive)
    m0 = h(0.0)
    off = m0[~np.eye(3, dtype=bool)]
    np.testing.assert_allclose(off, 0.4 * np.ones(6), atol=0)
    for t in (0.3, 1.9, 12.0):
        m = h(t)
        assert np.max(np.abs(m.imag)) == 0.0
        np.testing.assert_allclose(m, m.T)


def test_nonrwa_two_level_cosine():
    lev = LevelSpec((0.0, 1.5))
    drive = apply_resonance(lev, g=0.2, rwa=False)
    t = 2.3
    m = full_hamiltonian_nonrwa(lev, drive)(t)
    np.testing.assert_allclose(
        m.real, [[0, 0.2 * np.cos(1.5 * t)], [0.2 * np.cos(1.5 * t), 1.5]], atol=1e-15
    )


def test_mode_flags_enforced():
    lev = LevelSpec((0.0, 1.0))
    with pytest.raises(ConfigError):
        full_hamiltonian(lev, apply_resonance(lev, g=0.1, rwa=False))
    with pytest.raises(ConfigError):
        full_hamiltonian_nonrwa(lev, apply_resonance(lev, g=0.1, rwa=True))


def test_rotating_frame_identity_and_unitarity():
    drive = apply_resonance(LevelSpec((0.0, 1.0, 2.5)), g=0.1)
    np.testing.assert_array_equal(rotating_frame(drive, 0.0), np.eye(3))
    for t in np.linspace(0.1, 9.0, 7):
        u = rotating_frame(drive, t)
        np.testing.assert_allclose(u @ u.conj().T, np.eye(3), atol=1e-15)


def test_rotating_frame_adjoint_phases():
    drive = apply_resonance(LevelSpec((0.0, 1.0, 2.5)), g=0.1)
    t = 1.7
    u_dag = rotating_frame(drive, t).conj().T
    expected = np.diag([1.0, np.exp(-1j * 1.0 * t), np.exp(-1j * 2.5 * t)])
    np.testing.assert_allclose(u_dag, expected, atol=1e-15)


def test_detunings_definition():
    drive = apply_resonance(
        LevelSpec((0.0, 1.0, 2.0, 3.0)), g=0.1,
        nonadjacent={(0, 2): 2.25, (0, 3): 3.5, (1, 3): 2.0},
    )
    det = detunings(drive)
    assert det.eps[(0, 2)] == pytest.approx(0.25)
    assert det.eps[(0, 3)] == pytest.approx(0.5)
    assert det.eps[(1, 3)] == pytest.approx(0.0)


def test_transformed_hamiltonian_constant_at_consistency():
    lev = LevelSpec((0.0, 1.0, 2.0))
    drive = apply_resonance(lev, g=0.3)
    h = transformed_hamiltonian(lev, drive)
    q = 0.3 * (np.ones((3, 3)) - np.eye(3))
    for t in (0.0, 1.1, 7.7):
        np.testing.assert_allclose(h(t), q, atol=1e-15)


def test_transformed_hamiltonian_two_level_resonance():
    lev = LevelSpec((0.0, 1.0))
    drive = apply_resonance(lev, g=0.25)
    np.testing.assert_allclose(
        transformed_hamiltonian(lev, drive)(0.4), [[0, 0.25], [0.25, 0]], atol=0
    )


def test_transformed_hamiltonian_detuned_diagonal():
    lev = LevelSpec((0.0, 1.0, 2.5))
    # off-resonant adjacent drives leave the detuned energies on the diagonal
    drive = DriveSpec(
        n=3, omega={(0, 1): 0.9, (1, 2): 1.4, (0, 2): 2.3}, g=1e-15
    )
    h = transformed_hamiltonian(lev, drive)(0.6)
    np.testing.assert_allclose(np.diag(h).real, [0.0, 0.1, 0.2], atol=1e-14)


def test_apply_resonance_frequencies():
    drive = apply_resonance(LevelSpec((0.0, 1.0, 2.0)), g=0.1)
    np.testing.assert_allclose(drive.adjacent, [1.0, 1.0])
    drive = apply_resonance(LevelSpec((0.0, 1.0, 2.5)), g=0.1)
    np.testing.assert_allclose(drive.adjacent, [1.0, 1.5])
    assert is_resonant(LevelSpec((0.0, 1.0, 2.5)), drive)


def test_resonance_zeroes_diagonal_exactly():
    lev = LevelSpec((0.0, 1.0, 2.5))
    drive = apply_resonance(lev, g=0.2)
    h = transformed_hamiltonian(lev, drive)(3.3)
    assert np.all(np.diag(h) == 0.0)


def test_split_c_r_two_level():
    lev = LevelSpec((0.0, 1.0))
    c, r = split_c_r(lev, apply_resonance(lev, g=0.1))
    np.testing.assert_array_equal(c, [[0, 1], [1, 0]])
    assert np.all(r(4.2) == 0.0)


def test_split_c_r_three_level_residual():
    lev = LevelSpec((0.0, 1.0, 2.0))
    eps = 0.3
    drive = apply_resonance(lev, g=0.1, nonadjacent={(0, 2): 2.0 + eps})
    c, r = split_c_r(lev, drive)
    t = 1.9
    m = r(t)
    assert abs(m[0, 2] - np.exp(1j * eps * t)) < 1e-15
    assert abs(m[2, 0] - np.exp(-1j * eps * t)) < 1e-15
    assert np.count_nonzero(m) == 2


def test_split_c_r_consistency_gives_q():
    lev = LevelSpec((0.0, 1.0, 2.0, 3.0))
    c, r = split_c_r(lev, apply_resonance(lev, g=0.1))
    np.testing.assert_array_equal(c + r(0.0).real, np.ones((4, 4)) - np.eye(4))


def test_split_c_r_requires_resonance():
    lev = LevelSpec((0.0, 1.0, 2.0))
    drive = DriveSpec(n=3, omega={(0, 1): 0.9, (1, 2): 1.0, (0, 2): 1.9}, g=0.1)
    with pytest.raises(ConfigError):
        split_c_r(lev, drive)


def test_reconstruction_is_exact():
    lev = LevelSpec((0.0, 1.0, 2.0, 3.3))
    drive = apply_resonance(lev, g=0.37, nonadjacent={(0, 2): 2.11, (0, 3): 3.9})
    c, r = split_c_r(lev, drive)
    h = transformed_hamiltonian(lev, drive)
    for t in (0.0, 0.9, 5.5):
        np.testing.assert_array_equal(drive.g * c + drive.g * r(t), h(t))


@pytest.mark.parametrize("builder", ["rwa", "nonrwa", "transformed"])
def test_hermiticity_sampled(builder):
    lev = LevelSpec((0.0, 1.1, 2.4, 3.5))
    rng = np.random.default_rng(7)
    if builder == "rwa":
        h = full_hamiltonian(lev, apply_resonance(lev, g=0.3, nonadjacent={(0, 2): 2.9}))
    elif builder == "nonrwa":
        h = full_hamiltonian_nonrwa(lev, apply_resonance(lev, g=0.3, rwa=False))
    else:
        h = transformed_hamiltonian(lev, apply_resonance(lev, g=0.3, nonadjacent={(0, 3): 3.1}))
    for t in rng.uniform(0, 30, size=100):
        m = h(t)
        assert np.max(np.abs(m - m.conj().T)) < 1e-14


def test_frame_consistency():
    # For psi_rot = U psi the frame change is U H U† + i (dU/dt) U†; with the
    # diagonal U the derivative term is analytic: -diag(cumulative phases).
    lev = LevelSpec((0.0, 1.0, 2.2))
    drive = apply_resonance(lev, g=0.21, nonadjacent={(0, 2): 2.5})
    h_lab = full_hamiltonian(lev, drive)
    h_rot = transformed_hamiltonian(lev, drive)
    phases = rotating_frame_phases(drive)
    for t in np.linspace(0.0, 11.0, 23):
        u = rotating_frame(drive, t)
        lhs = u @ h_lab(t) @ u.conj().T - np.diag(phases)
        assert np.max(np.abs(lhs - h_rot(t))) < 1e-12


def test_residual_coupling_matches_detunings():
    det = Detunings(4, {(0, 2): 0.5, (1, 3): -0.2, (0, 3): 0.0})
    m = residual_coupling(det, 2.0)
    assert abs(m[0, 2] - np.exp(1j)) < 1e-15
    assert abs(m[1, 3] - np.exp(-0.4j)) < 1e-15
    assert m[0, 3] == 1.0
    assert np.all(np.diag(m) == 0)
