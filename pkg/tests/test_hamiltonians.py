"""Full and effective Hamiltonians plus the closed-form pair propagator."""

import numpy as np
import pytest
from scipy.linalg import expm

from rydfuse.core import basis_state, fidelity, state_from_components
from rydfuse.hamiltonians import (
    ATOM,
    AtomParams,
    PAIR5_IN_9,
    PAIR5_LABELS,
    PhysicsError,
    TWO_ATOM_LABELS,
    apply_gate_map,
    closed_form_coeffs,
    effective_hamiltonian,
    fig_params,
    full_hamiltonian,
    gate_matrix,
    optimal_coeffs,
    pair_gate_target,
    physical_params,
)


def test_atom_params_validation():
    with pytest.raises(PhysicsError):
        AtomParams(1, 1, 40, 40, 80, gamma=-0.1)
    with pytest.raises(PhysicsError):
        AtomParams(np.inf, 1, 40, 40, 80)


def test_antiblockade_flag():
    assert fig_params().antiblockade_satisfied
    assert physical_params().antiblockade_satisfied
    off = AtomParams(1, 1, 40, 40, 81)
    assert not off.antiblockade_satisfied
    # asymmetric detunings can still hit the resonance
    skew = AtomParams(1, 1, 30, 50, 80)
    assert skew.antiblockade_satisfied


def test_optimal_time():
    assert fig_params().optimal_time == pytest.approx(40 * np.pi, rel=1e-15)
    assert physical_params().optimal_time == pytest.approx(0.4 * np.pi, rel=1e-15)


def test_full_hamiltonian_entries_at_t0():
    h = full_hamiltonian(fig_params(), 0.0)
    assert h.entry("00", "r0") == pytest.approx(0.5)
    assert h.entry("0r", "rr") == pytest.approx(0.5)
    assert h.entry("00", "0r") == pytest.approx(0.5)
    assert h.entry("01", "0r") == pytest.approx(0.5)  # omega_b on atom 2
    assert h.entry("rr", "rr") == 0.0
    assert h.entry("00", "11") == 0.0


@pytest.mark.parametrize("t", [0.0, 0.013, 1.7, 40 * np.pi])
def test_full_hamiltonian_rr_diagonal_zero(t):
    h = full_hamiltonian(fig_params(), t)
    assert h.entry("rr", "rr") == 0.0


def test_full_hamiltonian_hand_built_oracle():
    """At t = pi/(2 Delta) every plain phase is i and every |rr> phase is -i."""
    p = fig_params()
    t = np.pi / (2 * p.delta_a)
    upper = {
        ("00", "r0"): 0.5j, ("01", "r1"): 0.5j,       # omega_a on atom 1
        ("00", "0r"): 0.5j, ("10", "1r"): 0.5j,       # omega_a on atom 2
        ("10", "r0"): 0.5j, ("11", "r1"): 0.5j,       # omega_b on atom 1
        ("01", "0r"): 0.5j, ("11", "1r"): 0.5j,       # omega_b on atom 2
        ("0r", "rr"): -0.5j, ("r0", "rr"): -0.5j,     # into |rr>: extra e^{-i d_rr t}
        ("1r", "rr"): -0.5j, ("r1", "rr"): -0.5j,
    }
    oracle = np.zeros((9, 9), dtype=complex)
    for (row, col), val in upper.items():
        i, j = TWO_ATOM_LABELS.index(row), TWO_ATOM_LABELS.index(col)
        oracle[i, j] = val
        oracle[j, i] = np.conj(val)
    h = full_hamiltonian(p, t)
    assert np.abs(h.mat - oracle).max() <= 1e-12


def test_full_hamiltonian_hermitian_random_times():
    rng = np.random.default_rng(5)
    p = AtomParams(1.3, 0.8, 35.0, 45.0, 80.0)   # asymmetric drive is legal here
    for t in rng.uniform(0, 200, size=12):
        h = full_hamiltonian(p, t)
        assert np.abs(h.mat - h.mat.conj().T).max() <= 1e-12


def test_effective_entries():
    p = fig_params()
    h = effective_hamiltonian(p, "full5")
    assert h.entry("00", "00") == pytest.approx(0.0125)
    assert h.entry("rr", "rr") == pytest.approx(0.025)
    assert h.entry("00", "11") == 0.0
    assert h.entry("00", "01") == pytest.approx(1 / 160)
    assert h.entry("00", "rr") == pytest.approx(0.0125)
    # no second-order path between the single-flip states
    assert h.entry("01", "10") == 0.0
    assert h.entry("01", "01") == pytest.approx(0.0125)


def test_effective_rejects_asymmetric_drive():
    with pytest.raises(PhysicsError):
        effective_hamiltonian(AtomParams(1.1, 1.0, 40, 40, 80))
    with pytest.raises(PhysicsError):
        effective_hamiltonian(AtomParams(1, 1, 39, 41, 80))


def test_extended9_block_structure():
    p = fig_params()
    h9 = effective_hamiltonian(p, "extended9").mat
    h5 = effective_hamiltonian(p, "full5").mat
    comp = list(PAIR5_IN_9)
    rejected = [TWO_ATOM_LABELS.index(lab) for lab in ("0r", "1r", "r0", "r1")]
    # the single-excitation block exchanges nothing with the computational one
    assert np.abs(h9[np.ix_(comp, rejected)]).max() == 0.0
    assert np.abs(h9[np.ix_(comp, comp)] - h5).max() == 0.0
    assert np.abs(h9 - h9.conj().T).max() == 0.0


def test_closed_form_coeffs_landmarks():
    c0 = closed_form_coeffs(0.0)
    assert (c0.a, c0.b, c0.c, c0.d) == (1.0, 0.0, 0.0, 0.0)

    cpi = closed_form_coeffs(np.pi)
    assert cpi.a == pytest.approx(0.5 - 0.5j, abs=1e-15)
    assert cpi.c == pytest.approx(0.5 + 0.5j, abs=1e-15)
    assert abs(cpi.b) <= 1e-15 and abs(cpi.d) <= 1e-15

    c2pi = closed_form_coeffs(2 * np.pi)
    assert abs(c2pi.a) <= 1e-15
    assert c2pi.c == pytest.approx(1.0, abs=1e-15)
    assert abs(c2pi.d) <= 1e-15


def test_optimal_coeffs_exact():
    c = optimal_coeffs()
    assert c.a == 0.5 - 0.5j and c.c == 0.5 + 0.5j
    assert c.b == 0.0 and c.d == 0.0
    assert c.rr_return == 1.0


def test_coeff_normalization_and_duplication():
    for theta in np.linspace(0.0, 4 * np.pi, 1000):
        c = closed_form_coeffs(theta)
        total = abs(c.a) ** 2 + 2 * abs(c.b) ** 2 + abs(c.c) ** 2 + abs(c.d) ** 2
        assert abs(total - 1.0) <= 1e-12
        assert c.d == 2 * c.b


@pytest.mark.parametrize("theta", [0.0, 0.31, np.pi / 2, np.pi, 2.6, 2 * np.pi, 11.0])
def test_gate_matrix_unitary_and_matches_expm(theta):
    p = fig_params()
    u = gate_matrix(closed_form_coeffs(theta))
    assert np.abs(u @ u.conj().T - np.eye(5)).max() <= 1e-10
    t = theta * p.delta_a / p.omega_a**2
    oracle = expm(-1j * effective_hamiltonian(p, "full5").mat * t)
    assert np.abs(u - oracle).max() <= 1e-8


def test_gate_map_bit_flip_symmetry():
    """Flipping 0 <-> 1 on both atoms permutes the basis but not the map."""
    perm = [PAIR5_LABELS.index(lab.translate(str.maketrans("01", "10")))
            for lab in PAIR5_LABELS]
    for theta in (0.4, np.pi, 5.2):
        u = gate_matrix(closed_form_coeffs(theta))
        flipped = u[np.ix_(perm, perm)]
        assert np.abs(u - flipped).max() <= 1e-14


def test_apply_gate_map_optimal_time():
    psi = basis_state((ATOM, ATOM), "01")
    out = apply_gate_map(optimal_coeffs(), psi)
    target = pair_gate_target("01")   # (|01> + i|10>)/sqrt(2)
    assert fidelity(target, out) == pytest.approx(1.0, abs=1e-12)
    # and literally e^{-i pi/4} (|01> + i|10>)/sqrt(2)
    phase = np.exp(-0.25j * np.pi)
    assert out.amplitude("01") == pytest.approx(phase / np.sqrt(2), abs=1e-12)
    assert out.amplitude("10") == pytest.approx(1j * phase / np.sqrt(2), abs=1e-12)


def test_apply_gate_map_identity_and_qubit_lift():
    psi = state_from_components((("0", "1"), ("0", "1")),
                                {"00": 0.6, "11": 0.8j})
    out = apply_gate_map(closed_form_coeffs(0.0), psi)
    assert out.site_levels == (ATOM, ATOM)
    assert out.amplitude("00") == pytest.approx(0.6)
    assert out.amplitude("11") == pytest.approx(0.8j)


def test_apply_gate_map_half_pi():
    """theta = pi/2 column against the matrix-exponential oracle."""
    p = fig_params()
    theta = np.pi / 2
    out = apply_gate_map(closed_form_coeffs(theta), basis_state((ATOM, ATOM), "00"))
    t = theta * p.delta_a / p.omega_a**2
    oracle = expm(-1j * effective_hamiltonian(p, "full5").mat * t)[:, 0]
    got = out.amps[list(PAIR5_IN_9)]
    assert np.abs(got - oracle).max() <= 1e-10
    assert out.norm() == pytest.approx(1.0, abs=1e-12)
    assert abs(out.amplitude("rr")) > 0.1   # genuine |rr> weight away from theta=pi


def test_apply_gate_map_rejects_rydberg_support():
    psi = state_from_components((ATOM, ATOM), {"00": np.sqrt(0.5), "0r": np.sqrt(0.5)})
    with pytest.raises(ValueError):
        apply_gate_map(optimal_coeffs(), psi)
