"""Fixed-step Schrodinger and Lindblad propagation."""

import numpy as np
import pytest
from scipy.linalg import expm

from rydfuse.core import DensityMatrix, DimensionMismatchError, InvalidStateError
from rydfuse.dynamics import (
    EvolutionSpec,
    default_steps,
    evolve_lindblad,
    evolve_pure,
    fidelity_trace,
    lindblad_operators,
    pair_state,
    resolve_steps,
)
from rydfuse.hamiltonians import (
    effective_hamiltonian,
    fig_params,
    pair_gate_target,
    physical_params,
)

P = fig_params()
T0 = P.optimal_time


def test_spec_validation():
    with pytest.raises(ValueError):
        EvolutionSpec(params=P, t_final=-1.0)
    with pytest.raises(ValueError):
        EvolutionSpec(params=P, t_final=1.0, steps=0)
    with pytest.raises(ValueError):
        EvolutionSpec(params=P, t_final=1.0, source="magic")


def test_default_steps_density():
    # at least 200 steps per 2*pi/delta_rr phase period for the full model
    n = default_steps(P, T0, "full")
    assert n >= T0 * P.delta_rr * 200 / (2 * np.pi) - 1
    assert default_steps(P, 0.0, "full") == 1
    assert default_steps(P, T0, "effective") >= 1000


def test_zero_time_identity():
    psi0 = pair_state("01")
    traj = evolve_pure(EvolutionSpec(params=P, t_final=0.0, source="full"), psi0)
    assert np.array_equal(traj.data[-1], psi0.amps)


def test_dimension_and_norm_checks():
    spec = EvolutionSpec(params=P, t_final=1.0, source="full")
    with pytest.raises(DimensionMismatchError):
        evolve_pure(spec, pair_state("00", "pair5"))
    bad = np.zeros(9, complex)
    bad[0] = 0.7
    with pytest.raises(InvalidStateError):
        evolve_pure(spec, bad)


def test_static_effective_matches_expm_oracle():
    h = effective_hamiltonian(P, "full5").mat
    psi0 = pair_state("00", "pair5")
    rng = np.random.default_rng(11)
    for t in rng.uniform(0.1, 2 * T0, size=10):
        spec = EvolutionSpec(params=P, t_final=float(t), source="effective")
        got = evolve_pure(spec, psi0).data[-1]
        want = expm(-1j * h * t) @ psi0
        assert np.abs(got - want).max() <= 1e-8


def test_effective_gate_all_four_initial_states():
    for lab in ("00", "01", "10", "11"):
        spec = EvolutionSpec(params=P, t_final=T0, source="effective")
        traj = evolve_pure(spec, pair_state(lab, "pair5"))
        target = pair_gate_target(lab).amps[[0, 1, 3, 4, 8]]
        fid = abs(np.vdot(target, traj.data[-1])) ** 2
        assert fid >= 1 - 1e-6


def test_closed_form_source_matches_effective_rk4():
    psi0 = pair_state("01", "pair5")
    spec_cf = EvolutionSpec(params=P, t_final=T0, source="closed_form", steps=100)
    spec_rk = EvolutionSpec(params=P, t_final=T0, source="effective", steps=20000,
                            record_every=200)
    cf = evolve_pure(spec_cf, psi0)
    rk = evolve_pure(spec_rk, psi0)
    assert np.allclose(cf.times, rk.times, atol=1e-9)
    assert np.abs(cf.data - rk.data).max() <= 1e-8


def test_full_agrees_with_effective_short_interval():
    """Independent short cross-check of the two models (long run lives in
    the acceptance suite)."""
    psi9 = pair_state("00")
    psi5 = pair_state("00", "pair5")
    t = T0 / 8
    tr9 = evolve_pure(EvolutionSpec(params=P, t_final=t, source="full"), psi9)
    tr5 = evolve_pure(EvolutionSpec(params=P, t_final=t, source="effective",
                                    steps=20000), psi5)
    comp = tr9.data[-1][[0, 1, 3, 4, 8]]
    overlap = abs(np.vdot(tr5.data[-1], comp)) ** 2
    assert overlap >= 0.995


def test_norm_drift_is_diagnostic_not_hidden():
    spec = EvolutionSpec(params=P, t_final=T0, source="full")
    traj = evolve_pure(spec, pair_state("00"))
    drift = abs(np.linalg.norm(traj.data[-1]) - 1.0)
    assert 0 < drift <= 1e-6   # not renormalized, but resolved


def test_lindblad_operator_set():
    ops = lindblad_operators(0.5)
    assert len(ops) == 4
    for lk in ops:
        assert np.count_nonzero(lk) == 3          # |g><r| on one atom, spectator free
        assert np.abs(lk).max() == pytest.approx(np.sqrt(0.25))
    total = sum(lk.conj().T @ lk for lk in ops)
    # total decay rate gamma for each atom in |r>
    assert total[8, 8] == pytest.approx(1.0)      # |rr> decays at 2 * gamma


def test_lindblad_rejects_bad_rho():
    spec = EvolutionSpec(params=P.with_gamma(1e-3), t_final=1.0, source="full")
    good = DensityMatrix.from_state(pair_state("00"))
    evolve_lindblad(spec, good)
    with pytest.raises(InvalidStateError):
        evolve_lindblad(spec, 2.0 * good.mat)
    skew = np.array(good.mat)
    skew[0, 1] += 1e-5
    with pytest.raises(InvalidStateError):
        evolve_lindblad(spec, skew)
    with pytest.raises(ValueError):
        evolve_lindblad(EvolutionSpec(params=P, t_final=1.0, source="effective"), good)


def test_gamma_zero_lindblad_matches_pure():
    spec = EvolutionSpec(params=P, t_final=T0 / 4, source="full", record_every=4000)
    psi0 = pair_state("00")
    traj_rho = evolve_lindblad(spec, DensityMatrix.from_state(psi0))
    traj_psi = evolve_pure(spec, psi0)
    for rho, psi in zip(traj_rho.data, traj_psi.data):
        assert np.abs(rho - np.outer(psi, psi.conj())).max() <= 1e-6


def test_master_equation_hygiene_short():
    spec = EvolutionSpec(params=P.with_gamma(1e-3), t_final=T0 / 4, source="full",
                         record_every=4000)
    traj = evolve_lindblad(spec, DensityMatrix.from_state(pair_state("00")))
    for rho in traj.data[:: len(traj.data) // 8]:
        assert abs(np.trace(rho) - 1.0) <= 1e-6
        assert np.abs(rho - rho.conj().T).max() <= 1e-10
        assert np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0] >= -1e-8


def test_fidelity_trace_initial_point_and_peak():
    psi0 = pair_state("00", "pair5")
    ideal = pair_gate_target("00").amps[[0, 1, 3, 4, 8]]
    spec = EvolutionSpec(params=P, t_final=T0, source="effective")
    trace = fidelity_trace(spec, psi0, ideal)
    assert trace.fidelities[0] == pytest.approx(abs(np.vdot(ideal, psi0)) ** 2, abs=1e-12)
    t_peak, f_peak = trace.peak()
    assert t_peak == pytest.approx(T0, rel=1e-12)
    assert f_peak >= 1 - 1e-6
    assert np.all(np.diff(trace.times) > 0)
    assert np.all((trace.fidelities >= 0) & (trace.fidelities <= 1))


def test_richardson_step_halving():
    """Doubling the step count moves every recorded fidelity by < 1e-7."""
    pg = P.with_gamma(1e-3)
    psi0 = pair_state("00")
    ideal = pair_gate_target("00")
    n = resolve_steps(EvolutionSpec(params=pg, t_final=T0, source="full"))
    tr1 = fidelity_trace(EvolutionSpec(params=pg, t_final=T0, source="full",
                                       steps=n, record_every=n // 800), psi0, ideal)
    tr2 = fidelity_trace(EvolutionSpec(params=pg, t_final=T0, source="full",
                                       steps=2 * n, record_every=n // 400), psi0, ideal)
    assert np.abs(tr1.fidelities - tr2.fidelities).max() < 1e-7


def test_dissipative_fidelity_bracketed():
    psi0 = pair_state("00")
    ideal = pair_gate_target("00")
    f0 = fidelity_trace(EvolutionSpec(params=P, t_final=T0, source="full"),
                        psi0, ideal).fidelities[-1]
    fg = fidelity_trace(EvolutionSpec(params=P.with_gamma(1e-3), t_final=T0,
                                      source="full"), psi0, ideal).fidelities[-1]
    assert 0.9 < fg < f0


def test_physical_preset_benchmark_value():
    pp = physical_params()
    spec = EvolutionSpec(params=pp, t_final=pp.optimal_time, source="full",
                         record_every=10**9)
    trace = fidelity_trace(spec, pair_state("00"), pair_gate_target("00"))
    assert trace.fidelities[-1] == pytest.approx(0.994, abs=0.005)
