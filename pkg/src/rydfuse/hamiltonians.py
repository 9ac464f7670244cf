"""Two-atom Rydberg antiblockade Hamiltonians and the closed-form pair gate.

Model: two identical three-level atoms, ground states |0>, |1> and a
Rydberg state |r>. One laser drives |0> <-> |r> with Rabi frequency
omega_a and detuning delta_a, another drives |1> <-> |r> with omega_b and
delta_b. Doubly excited |rr> is shifted by the Rydberg-Rydberg interaction
delta_rr. In the interaction picture, rotated once more to remove the
|rr><rr| shift, the Hamiltonian is a sum of laser couplings carrying
phases exp(i*delta*t), with transitions into |rr> carrying the extra
exp(-i*delta_rr*t).

On antiblockade resonance (delta_a + delta_b = delta_rr, symmetric drive)
and for large detuning, second order perturbation theory leaves an
effective static Hamiltonian on {|00>,|01>,|10>,|11>,|rr>} whose
propagator has closed-form matrix elements; at the dimensionless time
theta = Omega^2 t / Delta = pi it acts as the entangling map

    |00> -> (|00> + i|11>)/sqrt(2),   |01> -> (|01> + i|10>)/sqrt(2),

and the two flipped counterparts. All frequencies are angular and share
one unit (conventionally omega_b = 1, or MHz with time in microseconds).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .core import ATOM, QUBIT, Operator, StateVector, state_from_components, tensor

TWO_ATOM_LEVELS = (ATOM, ATOM)
TWO_ATOM_LABELS = ("00", "01", "0r", "10", "11", "1r", "r0", "r1", "rr")
PAIR5_LABELS = ("00", "01", "10", "11", "rr")
# positions of the five effective-model states inside the 9-dim two-atom basis
PAIR5_IN_9 = (0, 1, 3, 4, 8)

ANTIBLOCKADE_RTOL = 1e-9


class PhysicsError(ValueError):
    """Parameter set outside the model's domain of validity."""


@dataclass(frozen=True)
class AtomParams:
    """Physical knobs of the two-atom system (angular frequency units).

    gamma is the total Rydberg spontaneous-emission rate per atom, split
    equally between decay to |0> and to |1>.
    """

    omega_a: float
    omega_b: float
    delta_a: float
    delta_b: float
    delta_rr: float
    gamma: float = 0.0

    def __post_init__(self):
        values = (self.omega_a, self.omega_b, self.delta_a, self.delta_b,
                  self.delta_rr, self.gamma)
        if not all(math.isfinite(v) for v in values):
            raise PhysicsError("all parameters must be finite")
        if self.gamma < 0:
            raise PhysicsError("gamma must be non-negative")

    @property
    def symmetric_drive(self):
        return self.omega_a == self.omega_b and self.delta_a == self.delta_b

    @property
    def antiblockade_satisfied(self):
        return abs(self.delta_a + self.delta_b - self.delta_rr) <= (
            ANTIBLOCKADE_RTOL * abs(self.delta_rr)
        )

    @property
    def optimal_time(self):
        """Duration pi*Delta/Omega^2 at which the pair map becomes the
        Bell-type gate. Referenced to the b-laser (omega_b is the unit in
        the drive-mismatch sweeps)."""
        return math.pi * self.delta_b / self.omega_b**2

    def with_gamma(self, gamma):
        return replace(self, gamma=gamma)

    def with_omega_mismatch(self, delta_omega):
        """Set omega_a = (1 + delta_omega) * omega_b."""
        return replace(self, omega_a=(1.0 + delta_omega) * self.omega_b)


def fig_params():
    """Dimensionless benchmark point: Omega = 1, Delta = 40, delta_rr = 80."""
    return AtomParams(omega_a=1.0, omega_b=1.0, delta_a=40.0, delta_b=40.0,
                      delta_rr=80.0, gamma=0.0)


def physical_params():
    """Experimentally motivated set in MHz (time unit: microseconds):
    Omega = 50, Delta = 1000, delta_rr = 2000, gamma = 0.01 (10 kHz)."""
    return AtomParams(omega_a=50.0, omega_b=50.0, delta_a=1000.0, delta_b=1000.0,
                      delta_rr=2000.0, gamma=0.01)


PRESETS = {"fig2": fig_params, "physical": physical_params}


def _single_atom_op(entries):
    mat = np.zeros((3, 3), dtype=complex)
    for (row, col), val in entries.items():
        mat[ATOM.index(row), ATOM.index(col)] = val
    return Operator.from_sites(mat, (ATOM,))


def coupling_terms(p):
    """Rotating-frame generator split by phase frequency.

    Returns ``{frequency: M}`` such that H(t) = sum_f exp(i f t) M_f + h.c.
    Built from the tensor-product recipe: sigma_0r = |0><r| and
    sigma_1r = |1><r| on each atom, with the columns that start from |rr>
    carrying the extra -delta_rr in their phase frequency.
    """
    identity = Operator.from_sites(np.eye(3), (ATOM,), hermitian=True)
    sigma_a = _single_atom_op({("0", "r"): 1.0})
    sigma_b = _single_atom_op({("1", "r"): 1.0})

    def two_atom(single, atom_index):
        pair = (single, identity) if atom_index == 0 else (identity, single)
        return tensor(pair[0], pair[1]).mat

    rr_col = TWO_ATOM_LABELS.index("rr")

    def split_rr(mat):
        rr_part = np.zeros_like(mat)
        rr_part[:, rr_col] = mat[:, rr_col]
        return mat - rr_part, rr_part

    terms = {}

    def add(freq, mat):
        if freq in terms:
            terms[freq] = terms[freq] + mat
        else:
            terms[freq] = mat

    for atom in (0, 1):
        plain_a, rr_a = split_rr(two_atom(sigma_a, atom))
        plain_b, rr_b = split_rr(two_atom(sigma_b, atom))
        add(p.delta_a, 0.5 * p.omega_a * plain_a)
        add(p.delta_a - p.delta_rr, 0.5 * p.omega_a * rr_a)
        add(p.delta_b, 0.5 * p.omega_b * plain_b)
        add(p.delta_b - p.delta_rr, 0.5 * p.omega_b * rr_b)
    return terms


def full_hamiltonian(p, t):
    """9x9 rotating-frame Hamiltonian at time t (Hermitian, zero diagonal)."""
    upper = np.zeros((9, 9), dtype=complex)
    for freq, mat in coupling_terms(p).items():
        upper = upper + np.exp(1j * freq * t) * mat
    return Operator.from_sites(upper + upper.conj().T, TWO_ATOM_LEVELS, hermitian=True)


def _ket(label, labels):
    vec = np.zeros(len(labels), dtype=complex)
    vec[labels.index(label)] = 1.0
    return vec


def effective_hamiltonian(p, subspace="full5"):
    """Second-order effective Hamiltonian on antiblockade resonance.

    ``full5`` is the working 5x5 model on {00, 01, 10, 11, rr}: every
    computational state carries the two-path Stark shift Omega^2/(2 Delta),
    the resonant two-photon couplings to |rr> carry Omega^2/(2 Delta), and
    the single-intermediate Raman couplings (00 or 11 to 01 or 10) carry
    Omega^2/(4 Delta). There is no second-order path connecting |01> to
    |10>, so those states couple only through |rr> and the Raman terms;
    this is what makes the propagator columns share one set of closed-form
    coefficients, and it is confirmed here by direct integration of the
    full Hamiltonian.

    ``extended9`` additionally carries the decoupled single-excitation
    block on {0r, 1r, r0, r1}, kept only to check numerically that it
    exchanges no population with the computational states.

    Requires the symmetric drive (omega_a = omega_b, delta_a = delta_b)
    under which the reduction is derived.
    """
    if not p.symmetric_drive:
        raise PhysicsError("effective Hamiltonian requires omega_a = omega_b and delta_a = delta_b")
    if subspace not in ("full5", "extended9"):
        raise ValueError(f"unknown subspace {subspace!r}")
    omega, delta = p.omega_a, p.delta_a
    if delta == 0:
        raise PhysicsError("effective Hamiltonian undefined at zero detuning")
    s = omega**2 / delta

    labels = PAIR5_LABELS if subspace == "full5" else TWO_ATOM_LABELS
    k = {lab: _ket(lab, labels) for lab in labels}

    def proj(left, right):
        return np.outer(left, right.conj())

    h = (s / 2) * (proj(k["00"] + k["rr"], k["00"] + k["rr"])
                   + proj(k["11"] + k["rr"], k["11"] + k["rr"]))
    h += (s / 4) * (proj(k["00"] + k["11"], k["01"] + k["10"])
                    + proj(k["01"] + k["10"], k["00"] + k["11"]))
    h += (s / 2) * (proj(k["01"] + k["10"], k["rr"]) + proj(k["rr"], k["01"] + k["10"]))
    h += (s / 2) * (proj(k["01"], k["01"]) + proj(k["10"], k["10"]))

    if subspace == "extended9":
        h -= (s / 2) * (proj(k["0r"] + k["1r"], k["0r"] + k["1r"])
                        + proj(k["r0"] + k["r1"], k["r0"] + k["r1"]))
        h -= (s / 4) * (proj(k["0r"] + k["1r"], k["r0"] + k["r1"])
                        + proj(k["r0"] + k["r1"], k["0r"] + k["1r"]))
        h -= (s / 2) * (proj(k["0r"], k["r0"]) + proj(k["1r"], k["r1"])
                        + proj(k["r0"], k["0r"]) + proj(k["r1"], k["1r"]))
        return Operator.from_sites(h, TWO_ATOM_LEVELS, hermitian=True)
    return Operator(h, PAIR5_LABELS, hermitian=True)


@dataclass(frozen=True)
class PropagatorCoeffs:
    """Closed-form matrix elements of the effective pair propagator.

    At dimensionless time theta = Omega^2 t / Delta, with x = exp(-i theta/2):

        a = (3 + 4x + x^4)/8     amplitude to stay
        b = (-1 + x^4)/8         amplitude onto each single-flip state
        c = (3 - 4x + x^4)/8     amplitude onto the double flip
        d = (-1 + x^4)/4         amplitude onto |rr>

    Unitarity fixes |a|^2 + 2|b|^2 + |c|^2 + |d|^2 = 1 and d = 2b.
    """

    a: complex
    b: complex
    c: complex
    d: complex
    theta: float

    def __post_init__(self):
        total = abs(self.a)**2 + 2 * abs(self.b)**2 + abs(self.c)**2 + abs(self.d)**2
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"coefficient normalization off by {total - 1.0:.3e}")

    @property
    def rr_return(self):
        """Amplitude <rr|U|rr> = (1 + x^4)/2 = 1 + 2d, completing the 5x5 unitary."""
        return 1.0 + 2.0 * self.d


def closed_form_coeffs(theta):
    """Propagator coefficients at dimensionless time theta = Omega^2 t / Delta."""
    if not math.isfinite(theta):
        raise ValueError("theta must be finite")
    x = np.exp(-0.5j * theta)
    x4 = x**4
    a = (3.0 + 4.0 * x + x4) / 8.0
    b = (x4 - 1.0) / 8.0
    c = (3.0 - 4.0 * x + x4) / 8.0
    d = 2.0 * b
    return PropagatorCoeffs(complex(a), complex(b), complex(c), complex(d), float(theta))


def gate_matrix(coeffs):
    """5x5 unitary over (00, 01, 10, 11, rr) assembled from the closed form.

    The four computational columns follow the flip-symmetric pattern of the
    propagator; the |rr> column (d, d, d, d, 1+2d) is fixed by symmetry of
    the effective Hamiltonian and makes the matrix unitary.
    """
    a, b, c, d = coeffs.a, coeffs.b, coeffs.c, coeffs.d
    e = coeffs.rr_return
    return np.array([
        [a, b, b, c, d],
        [b, a, c, b, d],
        [b, c, a, b, d],
        [c, b, b, a, d],
        [d, d, d, d, e],
    ], dtype=complex)


def optimal_coeffs():
    """Coefficients at theta = pi where the map is the Bell-type gate.

    Written as exact literals (x = -i, x^4 = 1) so that d vanishes
    identically and the |rr> leakage of the ideal gate is exactly zero.
    """
    return PropagatorCoeffs(a=0.5 - 0.5j, b=0j, c=0.5 + 0.5j, d=0j, theta=math.pi)


def pair_gate_target(initial_label, site_levels=TWO_ATOM_LEVELS):
    """Ideal image of a computational pair state under the theta = pi gate,
    with the overall phase exp(-i pi/4) dropped."""
    flipped = initial_label.translate(str.maketrans("01", "10"))
    components = {initial_label: 1 / math.sqrt(2), flipped: 1j / math.sqrt(2)}
    return state_from_components(site_levels, components)


def apply_gate_map(coeffs, state):
    """Apply the closed-form pair map to a two-site state.

    The input must be supported on the four computational pair states (any
    |r> population beyond round-off is an error). Qubit-pair inputs are
    lifted to two three-level atoms, since away from theta = pi the output
    carries |rr> weight.
    """
    if not isinstance(state, StateVector) or state.n_sites != 2:
        raise ValueError("expected a two-site StateVector")
    levels = state.site_levels
    if levels == (QUBIT, QUBIT):
        comp = state.amps.copy()
    elif levels == TWO_ATOM_LEVELS:
        comp = state.amps[list(PAIR5_IN_9[:4])]
        residual = np.linalg.norm(state.amps) ** 2 - np.linalg.norm(comp) ** 2
        if residual > 1e-12:
            raise ValueError("input has support outside the computational pair states")
    else:
        raise ValueError("expected a qubit pair or a two-atom register")
    out5 = gate_matrix(coeffs)[:, :4] @ comp
    amps = np.zeros(9, dtype=complex)
    amps[list(PAIR5_IN_9)] = out5
    return StateVector(amps, TWO_ATOM_LEVELS)
