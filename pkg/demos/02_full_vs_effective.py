"""Full rotating-frame dynamics against the effective model.

Propagates |00> under the full 9-level Hamiltonian and under the 5-state
effective model at the dimensionless benchmark point (Omega = 1,
Delta = 40, delta_rr = 80), tracking fidelity to (|00> + i|11>)/sqrt(2).
The two curves coincide to a couple of parts in a thousand, validating
the antiblockade reduction, and both peak at the optimal time
t0 = pi Delta / Omega^2.
"""

import numpy as np

from rydfuse import EvolutionSpec, fidelity_trace, fig_params, pair_gate_target
from rydfuse.dynamics import pair_state, resolve_steps
from rydfuse.hamiltonians import PAIR5_IN_9

params = fig_params()
t0 = params.optimal_time
target9 = pair_gate_target("00")
target5 = target9.amps[list(PAIR5_IN_9)]

spec_full = EvolutionSpec(params=params, t_final=t0, source="full")
steps = resolve_steps(spec_full)
spec_eff = EvolutionSpec(params=params, t_final=t0, source="effective",
                         steps=steps, record_every=max(1, steps // 800))

tr_full = fidelity_trace(spec_full, pair_state("00"), target9)
tr_eff = fidelity_trace(spec_eff, pair_state("00", "pair5"), target5)

print(f"benchmark point: Omega=1, Delta=40, delta_rr=80, t0 = 40 pi = {t0:.4f}")
print(f"integrator: fixed-step RK4, {steps} steps\n")
print(f"{'t / t0':>8} {'F_full':>10} {'F_eff':>10} {'gap':>9}")
for frac in (0.0, 0.25, 0.5, 0.75, 0.9, 1.0):
    i = int(round(frac * (len(tr_full.times) - 1)))
    gap = abs(tr_full.fidelities[i] - tr_eff.fidelities[i])
    print(f"{frac:8.2f} {tr_full.fidelities[i]:10.6f} "
          f"{tr_eff.fidelities[i]:10.6f} {gap:9.1e}")

gap = np.abs(tr_full.fidelities - tr_eff.fidelities).max()
print(f"\nlargest pointwise gap over the run: {gap:.4f}")
print(f"full-model fidelity at t0:          {tr_full.fidelities[-1]:.6f}")
print(f"effective-model fidelity at t0:     {tr_eff.fidelities[-1]:.9f}")
print("\nThe residual infidelity of the full model is the price of the")
print("second-order reduction at Delta/Omega = 40; it shrinks as the")
print("detuning grows (see demo 03).")
