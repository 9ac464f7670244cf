"""W fusion walkthrough.

Fusing an m-atom and an n-atom W state succeeds when Claire reads 10 or
01 (the asymmetric outcomes), leaving the remaining m+n-2 atoms in a
standard W state after party-wide phase gates. The success probability is
(m+n-2)/(m n) exactly; 00 and 11 are failures.
"""

from fractions import Fraction

from rydfuse import (
    apply_correction,
    fidelity,
    ideal_gate,
    make_w,
    run_fusion,
    w_success_probability,
)

print("success probability (m+n-2)/(mn):")
corner = "m\\n"
print(f"{corner:>4}" + "".join(f"{n:>9}" for n in range(2, 7)))
for m in range(2, 7):
    row = [f"{str(w_success_probability(m, n)):>9}" for n in range(2, 7)]
    print(f"{m:>4}" + "".join(row))

m, n = 3, 4
print(f"\nrunning m = {m}, n = {n}:")
branches = run_fusion(make_w(m, "alice"), make_w(n, "bob"), ideal_gate())
for br in branches:
    extra = f"  ({br.correction})" if br.correction else ""
    print(f"  {br.outcome}: p = {br.probability:.6f}  {br.verdict}{extra}")

success = sum(br.probability for br in branches if br.verdict == "success")
print(f"  total success: {success:.6f} = {Fraction(m + n - 2, m * n)}")

target = make_w(m + n - 2, "anyone").state
for br in branches:
    if br.verdict != "success":
        continue
    corrected = apply_correction(br)
    print(f"  outcome {br.outcome} corrected -> |W_{m+n-2}> fidelity "
          f"{fidelity(target, corrected.state):.12f}")

print("\nfailure branches keep their (non-W) entanglement but are discarded")
print("by the protocol; rerunning with fresh resources costs 1/P attempts")
print(f"on average, here {1/float(w_success_probability(m, n)):.2f}.")
