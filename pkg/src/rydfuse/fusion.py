"""Fusion of GHZ and W registers through the two-atom antiblockade gate.

Alice holds an m-qubit entangled register, Bob an n-qubit one; each sends
one atom to Claire, who applies the pair gate and measures both atoms in
the level basis. Depending on the outcome the remaining (m+n-2) atoms
collapse onto a larger entangled state, fixed up by single-qubit phase
gates S = diag(1, i).

GHZ fusion succeeds on every computational outcome (total success
probability one). W fusion succeeds on the 10 and 01 outcomes with total
probability (m+n-2)/(m*n); 00 and 11 are failures. An atom detected in
|r> is leakage out of the computational space (probability zero for the
ideal gate).

Branch enumeration is exact and deterministic. The gate enters either as
closed-form propagator coefficients (unitary on the pair) or as a channel
extracted tomographically from the dissipative dynamics; channel branches
report probabilities and corrected fidelities without materializing the
mixed spectator state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import QUBIT, StateVector, fidelity, state_from_components, tensor
from .dynamics import EvolutionSpec, _evolve_lindblad_batch, embed_pair5
from .hamiltonians import (
    PAIR5_IN_9,
    PAIR5_LABELS,
    PropagatorCoeffs,
    closed_form_coeffs,
    gate_matrix,
    optimal_coeffs,
)

CLAIRE = "claire"
SIZE_CAP = 12           # total qubits across both registers (dense vectors)
COMP_IN_9 = PAIR5_IN_9[:4]
# single-Rydberg detection outcomes: zero weight for the closed-form map,
# populated by dissipative channels
SINGLE_R_LABELS = ("0r", "1r", "r0", "r1")
SINGLE_R_IN_9 = (2, 5, 6, 7)
_EPS_PROB = 1e-14


class SizeCapError(ValueError):
    """Register pair exceeds the dense-representation size cap."""


@dataclass(frozen=True)
class QubitRegister:
    """Pure n-qubit state with a party tag per site."""

    state: StateVector
    parties: tuple

    def __post_init__(self):
        if any(levels != QUBIT for levels in self.state.site_levels):
            raise ValueError("QubitRegister sites must be qubits")
        if len(self.parties) != self.state.n_sites:
            raise ValueError("one party tag per site required")
        if abs(self.state.norm() - 1.0) > 1e-10:
            raise ValueError("register state must be normalized")
        object.__setattr__(self, "parties", tuple(self.parties))

    @property
    def n_sites(self):
        return self.state.n_sites

    def claire_sites(self):
        return tuple(i for i, p in enumerate(self.parties) if p == CLAIRE)


def make_ghz(k, party):
    """(|0...0> + |1...1>)/sqrt(2) on k sites; the last site goes to Claire."""
    if k < 2:
        raise ValueError("GHZ register needs at least 2 qubits")
    if k > SIZE_CAP:
        raise SizeCapError(f"{k} qubits exceeds the dense size cap of {SIZE_CAP}")
    amps = np.zeros(2**k, dtype=complex)
    amps[0] = amps[-1] = 1.0 / math.sqrt(2.0)
    state = StateVector(amps, (QUBIT,) * k)
    return QubitRegister(state, (party,) * (k - 1) + (CLAIRE,))


def make_w(k, party):
    """Uniform single-excitation state on k sites; the last site goes to Claire."""
    if k < 2:
        raise ValueError("W register needs at least 2 qubits")
    if k > SIZE_CAP:
        raise SizeCapError(f"{k} qubits exceeds the dense size cap of {SIZE_CAP}")
    amps = np.zeros(2**k, dtype=complex)
    for j in range(k):
        amps[1 << j] = 1.0 / math.sqrt(k)
    state = StateVector(amps, (QUBIT,) * k)
    return QubitRegister(state, (party,) * (k - 1) + (CLAIRE,))


@dataclass(frozen=True)
class GateModel:
    """Pair gate as either closed-form coefficients or an extracted channel.

    ``coeffs`` makes the gate a (partial) isometry on the computational
    pair states; ``channel`` holds E(|j><k|) for the 16 computational
    matrix units as a (4, 4, 9, 9) array over the two-atom basis.
    """

    coeffs: PropagatorCoeffs = None
    channel: np.ndarray = None
    params: object = None

    def __post_init__(self):
        if (self.coeffs is None) == (self.channel is None):
            raise ValueError("provide exactly one of coeffs or channel")
        if self.channel is not None:
            arr = np.asarray(self.channel, dtype=complex)
            if arr.shape != (4, 4, 9, 9):
                raise ValueError("channel must have shape (4, 4, 9, 9)")
            arr.setflags(write=False)
            object.__setattr__(self, "channel", arr)

    @property
    def kind(self):
        return "unitary" if self.coeffs is not None else "channel"


def ideal_gate():
    """The entangling map at optimal time (theta = pi, no |rr> leakage)."""
    return GateModel(coeffs=optimal_coeffs())


def closed_form_gate(theta):
    """Closed-form pair map at arbitrary dimensionless time theta."""
    return GateModel(coeffs=closed_form_coeffs(theta))


def extract_pair_channel(params, t=None, steps=None):
    """Tomographic pair channel from the dissipative dynamics.

    Evolves 16 pure pair preparations (the four computational states plus
    the +/+i superpositions of every pair) under the master equation at
    the given parameters and assembles E(|j><k|) by linearity.
    """
    if t is None:
        t = params.optimal_time
    inputs = []
    index = {}
    kets = [np.zeros(9, dtype=complex) for _ in range(4)]
    for j, pos in enumerate(COMP_IN_9):
        kets[j][pos] = 1.0
        index[(j, j)] = len(inputs)
        inputs.append(kets[j])
    pairs = [(j, k) for j in range(4) for k in range(j + 1, 4)]
    for j, k in pairs:
        plus = (kets[j] + kets[k]) / math.sqrt(2.0)
        plus_i = (kets[j] + 1j * kets[k]) / math.sqrt(2.0)
        index[(j, k, "+")] = len(inputs)
        inputs.append(plus)
        index[(j, k, "+i")] = len(inputs)
        inputs.append(plus_i)
    rhos = np.stack([np.outer(v, v.conj()) for v in inputs])
    spec = EvolutionSpec(params=params, t_final=t, source="full",
                         steps=steps, record_every=steps or 10**9)
    _, batch = _evolve_lindblad_batch(spec, rhos, [params.gamma] * len(inputs))
    final = batch[-1]
    chan = np.zeros((4, 4, 9, 9), dtype=complex)
    for j in range(4):
        chan[j, j] = final[index[(j, j)]]
    for j, k in pairs:
        ejk = (final[index[(j, k, "+")]]
               + 1j * final[index[(j, k, "+i")]]
               - 0.5 * (1 + 1j) * (chan[j, j] + chan[k, k]))
        chan[j, k] = ejk
        chan[k, j] = ejk.conj().T
    return GateModel(channel=chan, params=params)


@dataclass
class FusionBranch:
    """One measurement outcome of the fusion protocol.

    ``post_state`` is the collapsed spectator register (None for leakage,
    zero-probability outcomes, and channel-model branches, which are
    mixed). ``correction`` describes the phase gates that map a success
    branch onto ``target``; ``corrected_fidelity`` is the overlap after
    applying them, global phase discarded.
    """

    outcome: str
    probability: float
    verdict: str
    post_state: QubitRegister = None
    correction: str = None
    correction_sites: tuple = ()
    target: StateVector = None
    corrected_fidelity: float = None
    note: str = ""


def w_success_probability(m, n):
    """Exact W-fusion success probability (m + n - 2) / (m n)."""
    if m < 2 or n < 2:
        raise ValueError("W fusion needs m, n >= 2")
    return Fraction(m + n - 2, m * n)


def _apply_phase_gate(amps, n_sites, sites):
    """S = diag(1, i) on the listed qubit sites of a flat amplitude vector."""
    out = np.array(amps, dtype=complex).reshape((2,) * n_sites)
    for site in sites:
        index = [slice(None)] * n_sites
        index[site] = 1
        out[tuple(index)] *= 1j
    return out.reshape(-1)


def apply_correction(branch):
    """Apply the branch's phase-gate correction to its post-measurement state."""
    if branch.verdict != "success":
        raise ValueError(f"no correction defined for a {branch.verdict} branch")
    if branch.post_state is None:
        raise ValueError("channel-model branches carry no pure post state")
    reg = branch.post_state
    amps = _apply_phase_gate(reg.state.amps, reg.n_sites, branch.correction_sites)
    return QubitRegister(StateVector(amps, reg.state.site_levels), reg.parties)


def _cat_state(n_alice, n_bob, site_levels, split=False, sign=1.0):
    """(|u> + sign|v>)/sqrt(2) cat state; split=True uses the relabeled
    partition 0_A 1_B / 1_A 0_B instead of all-zeros / all-ones."""
    if split:
        u = "0" * n_alice + "1" * n_bob
        v = "1" * n_alice + "0" * n_bob
    else:
        u = "0" * (n_alice + n_bob)
        v = "1" * (n_alice + n_bob)
    s = 1.0 / math.sqrt(2.0)
    return state_from_components(site_levels, {u: s, v: sign * s})


def _w_target(n_sites, site_levels):
    amps = np.zeros(2**n_sites, dtype=complex)
    for j in range(n_sites):
        amps[1 << j] = 1.0 / math.sqrt(n_sites)
    return StateVector(amps, site_levels)


def classify_register(reg):
    """'ghz' or 'w' from the amplitude pattern; raises if neither."""
    amps = reg.state.amps
    support = set(np.flatnonzero(np.abs(amps) > 1e-12).tolist())
    dim = amps.shape[0]
    if support == {0, dim - 1}:
        return "ghz"
    if support == {1 << j for j in range(reg.n_sites)}:
        return "w"
    raise ValueError("register is neither GHZ- nor W-patterned; pass protocol explicitly")


def _branch_plan(protocol, outcome, n_alice, n_bob, spectator_levels):
    """(verdict, correction sites, description, target, note) for an outcome."""
    if "r" in outcome:
        return "leakage", (), None, None, "atom detected in the Rydberg state"
    alice_sites = tuple(range(n_alice))
    bob_sites = tuple(range(n_alice, n_alice + n_bob))
    if protocol == "ghz":
        if outcome == "00":
            return ("success", (alice_sites[0],),
                    "phase gate |1> -> i|1> on the first Alice atom",
                    _cat_state(n_alice, n_bob, spectator_levels, sign=-1.0),
                    "corrected cat state carries a relative minus sign")
        if outcome == "11":
            return ("success", (alice_sites[0],),
                    "phase gate |1> -> i|1> on the first Alice atom",
                    _cat_state(n_alice, n_bob, spectator_levels),
                    "global phase i discarded")
        if outcome == "01":
            return ("success", (bob_sites[0],),
                    "phase gate |1> -> i|1> on the first Bob atom",
                    _cat_state(n_alice, n_bob, spectator_levels, split=True),
                    "relabeled partition: Alice zeros with Bob ones")
        return ("success", (alice_sites[0],),
                "phase gate |1> -> i|1> on the first Alice atom",
                _cat_state(n_alice, n_bob, spectator_levels, split=True),
                "relabeled partition: Alice zeros with Bob ones")
    # W protocol
    if outcome == "10":
        return ("success", bob_sites,
                "phase gate |1> -> i|1> on every Bob atom",
                _w_target(n_alice + n_bob, spectator_levels),
                "global phase i discarded")
    if outcome == "01":
        return ("success", alice_sites,
                "phase gate |1> -> i|1> on every Alice atom",
                _w_target(n_alice + n_bob, spectator_levels),
                "global phase i discarded")
    return "failure", (), None, None, ""


def _pair_components(a, b):
    """Spectator-by-pair amplitude matrix C of the product register.

    Columns follow the pair labels 00, 01, 10, 11 where the first symbol
    is the atom Claire received from Alice. Rows run over the spectator
    register (Alice block then Bob block, original site order).
    """
    ca = a.claire_sites()
    cb = b.claire_sites()
    if len(ca) != 1 or len(cb) != 1:
        raise ValueError("each register must send exactly one atom to Claire")
    shared = (set(a.parties) & set(b.parties)) - {CLAIRE}
    if shared:
        raise ValueError(f"registers overlap on parties {sorted(shared)}")
    total = a.n_sites + b.n_sites
    if total > SIZE_CAP:
        raise SizeCapError(f"{total} qubits exceeds the dense size cap of {SIZE_CAP}")
    product = tensor(a.state, b.state)
    parties = a.parties + b.parties
    pair_axes = (ca[0], a.n_sites + cb[0])
    grid = product.amps.reshape((2,) * total)
    grid = np.moveaxis(grid, pair_axes, (total - 2, total - 1))
    c = grid.reshape(-1, 4)
    spectator_parties = tuple(p for i, p in enumerate(parties) if i not in pair_axes)
    return c, spectator_parties


def run_fusion(a, b, gate, protocol=None):
    """Enumerate every measurement branch of fusing registers a and b.

    Forms the product state, applies the pair gate to the two atoms sent
    to Claire, and projects on the outcomes 00, 01, 10, 11, rr (in that
    order), returning one FusionBranch per outcome with exact
    probabilities. With a channel-model gate the collapsed states are
    mixed, so branches carry probabilities and corrected fidelities but no
    pure post state; the four single-Rydberg outcomes (0r, 1r, r0, r1),
    which the closed-form map never populates, are then enumerated as
    additional leakage branches so probabilities still sum to one.
    """
    if protocol is None:
        protocol = classify_register(a)
        if classify_register(b) != protocol:
            raise ValueError("cannot fuse a GHZ register with a W register")
    if protocol not in ("ghz", "w"):
        raise ValueError(f"unknown protocol {protocol!r}")
    c, spectator_parties = _pair_components(a, b)
    n_alice = a.n_sites - 1
    n_bob = b.n_sites - 1
    spectator_levels = (QUBIT,) * (n_alice + n_bob)

    branches = []
    if gate.kind == "unitary":
        u54 = gate_matrix(gate.coeffs)[:, :4]
        out = c @ u54.T
        for oi, outcome in enumerate(PAIR5_LABELS):
            vec = out[:, oi]
            prob = float(np.real(np.vdot(vec, vec)))
            verdict, sites, descr, target, note = _branch_plan(
                protocol, outcome, n_alice, n_bob, spectator_levels)
            post = None
            corrected_fid = None
            if prob > _EPS_PROB and outcome != "rr":
                state = StateVector(vec / math.sqrt(prob), spectator_levels)
                post = QubitRegister(state, spectator_parties)
                if verdict == "success":
                    corrected = _apply_phase_gate(state.amps, state.n_sites, sites)
                    corrected_fid = fidelity(target, StateVector(corrected, spectator_levels))
            branches.append(FusionBranch(outcome, prob, verdict, post, descr,
                                         sites, target, corrected_fid, note))
        return branches

    # channel gate: work in the rank-4 spectator decomposition; dissipation
    # also populates the single-Rydberg outcomes, so enumerate all nine
    gram = c.conj().T @ c
    outcome_index = dict(zip(PAIR5_LABELS, PAIR5_IN_9))
    outcome_index.update(zip(SINGLE_R_LABELS, SINGLE_R_IN_9))
    for outcome in PAIR5_LABELS + SINGLE_R_LABELS:
        o9 = outcome_index[outcome]
        k_o = gate.channel[:, :, o9, o9]
        prob = float(np.real(np.trace(k_o @ gram)))
        prob = max(prob, 0.0)
        verdict, sites, descr, target, note = _branch_plan(
            protocol, outcome, n_alice, n_bob, spectator_levels)
        corrected_fid = None
        if verdict == "success" and prob > _EPS_PROB:
            # v_j = <T|S|chi_j>: fold the diagonal S phases into conj(T)
            t_s = _apply_phase_gate(target.amps.conj(), target.n_sites, sites)
            v = t_s @ c
            corrected_fid = float(np.real(v @ k_o @ v.conj())) / prob
            corrected_fid = min(max(corrected_fid, 0.0), 1.0)
        branches.append(FusionBranch(outcome, prob, verdict, None, descr,
                                     sites, target, corrected_fid, note))
    return branches


def fusion_fidelity(gate, protocol, m, n):
    """Probability-weighted gate fidelity over the pair components.

    The product register splits into four orthogonal spectator components,
    one per computational pair state, with weights w_j. Each component's
    pair state evolves to fidelity F_j against its optimal-time target;
    the fusion fidelity is sum_j w_j F_j. With the symmetric drive all
    F_j coincide, so GHZ and W fusion inherit the same gate fidelity.
    """
    if protocol == "ghz":
        a, b = make_ghz(m, "alice"), make_ghz(n, "bob")
    elif protocol == "w":
        a, b = make_w(m, "alice"), make_w(n, "bob")
    else:
        raise ValueError(f"unknown protocol {protocol!r}")
    c, _ = _pair_components(a, b)
    weights = np.real(np.einsum("sj,sj->j", c.conj(), c))
    ideal54 = gate_matrix(optimal_coeffs())[:, :4]
    total = 0.0
    for j in range(4):
        target = embed_pair5(ideal54[:, j])
        if gate.kind == "unitary":
            out = embed_pair5(gate_matrix(gate.coeffs)[:, j])
            f_j = abs(np.vdot(target, out)) ** 2
        else:
            f_j = float(np.real(np.vdot(target, gate.channel[j, j] @ target)))
        total += weights[j] * f_j
    return float(total)


def sample_branch(branches, rng):
    """Draw one branch per the Born probabilities (demo feature)."""
    probs = np.array([b.probability for b in branches], dtype=float)
    probs = np.clip(probs, 0.0, None)
    probs = probs / probs.sum()
    return branches[int(rng.choice(len(branches), p=probs))]
