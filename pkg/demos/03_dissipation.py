"""Spontaneous emission and the physical benchmark point.

The Rydberg level decays at rate gamma (split equally to the two ground
states on each atom). The gate fidelity at the optimal time degrades with
gamma; at the experimentally motivated parameter set (Omega = 50 MHz,
Delta = 1000 MHz, delta_rr = 2000 MHz, gamma = 10 kHz) the master
equation gives about 99.4%.

Also recorded here, not asserted anywhere: how the effective-model error
scales with the detuning ratio Delta/Omega, since the reduction only
promises validity for Delta >> Omega/2.
"""

import numpy as np

from rydfuse import (
    AtomParams,
    DensityMatrix,
    EvolutionSpec,
    evolve_lindblad,
    fidelity_trace,
    fig_params,
    pair_gate_target,
    physical_params,
)
from rydfuse.dynamics import _evolve_lindblad_batch, pair_state

fig = fig_params()
t0 = fig.optimal_time
target = pair_gate_target("00")
psi0 = pair_state("00")

print("Fidelity at the optimal time vs decay rate (Omega = 1, Delta = 40):")
gammas = [0.0, 1e-4, 1e-3, 1e-2]
rho0 = np.outer(psi0.amps, psi0.amps.conj())
spec = EvolutionSpec(params=fig, t_final=t0, source="full", record_every=10**9)
_, batch = _evolve_lindblad_batch(spec, np.stack([rho0] * len(gammas)), gammas)
for g, rho in zip(gammas, batch[-1]):
    fid = float(np.real(np.vdot(target.amps, rho @ target.amps)))
    print(f"  gamma/Omega = {g:7.1e}   F(t0) = {fid:.6f}")

print("\nPhysical benchmark (MHz units, time in microseconds):")
pp = physical_params()
spec = EvolutionSpec(params=pp, t_final=pp.optimal_time, source="full",
                     record_every=10**9)
traj = evolve_lindblad(spec, DensityMatrix.from_state(psi0))
fid = float(np.real(np.vdot(target.amps, traj.data[-1] @ target.amps)))
print(f"  Omega = {pp.omega_a} MHz, Delta = {pp.delta_a} MHz, "
      f"delta_rr = {pp.delta_rr} MHz, gamma = {pp.gamma} MHz")
print(f"  t0 = {pp.optimal_time:.4f} us,  F(t0) = {fid:.4f}   (around 99.4%)")

print("\nEffective-model error vs detuning ratio (gamma = 0):")
print(f"{'Delta/Omega':>12} {'1 - F_full(t0)':>16}")
for ratio in (10, 20, 40, 80):
    p = AtomParams(1.0, 1.0, float(ratio), float(ratio), 2.0 * ratio)
    tr = fidelity_trace(EvolutionSpec(params=p, t_final=p.optimal_time,
                                      source="full", record_every=10**9),
                        psi0, target)
    print(f"{ratio:>12} {1 - tr.fidelities[-1]:>16.2e}")
print("\nThe error falls roughly as (Omega/Delta)^2: the large-detuning")
print("condition is quantitative, not just a slogan.")
