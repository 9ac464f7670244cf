"""Fixed-step time evolution for the two-atom system.

Pure states follow i d|psi>/dt = H(t)|psi>, density matrices the Lindblad
master equation

    drho/dt = -i[H(t), rho]
              - 1/2 sum_k (Lk^dag Lk rho - 2 Lk rho Lk^dag + rho Lk^dag Lk)

with four jump operators sqrt(gamma/2)|0><r| and sqrt(gamma/2)|1><r| on
each atom (total Rydberg decay gamma per atom, equal branching). Both are
integrated with a classical fixed-step 4th-order Runge-Kutta scheme: the
rotating-frame phases exp(i delta t) make piecewise-constant propagators
inaccurate, and a fixed grid keeps every run bit-deterministic. States are
never renormalized during a run; norm/trace drift is a diagnostic.

The drivers are written around a stacked generator A(t) = A_static +
sum_f exp(i f t) A_f so a whole batch of initial conditions advances with
a handful of matrix products per step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    DensityMatrix,
    DimensionMismatchError,
    InvalidStateError,
    StateVector,
    basis_state,
)
from .hamiltonians import (
    PAIR5_IN_9,
    PAIR5_LABELS,
    TWO_ATOM_LABELS,
    TWO_ATOM_LEVELS,
    closed_form_coeffs,
    coupling_terms,
    effective_hamiltonian,
    gate_matrix,
)

SOURCES = ("full", "effective", "closed_form")

# default fixed-step densities
STEPS_PER_PHASE_PERIOD = 200   # resolution of the fastest exp(i delta_rr t) phase
MAX_NORM_STEP = 0.05           # cap on dt * ||H||
MIN_STEPS = 1000


@dataclass(frozen=True)
class EvolutionSpec:
    """One evolution problem: Hamiltonian source, parameters, duration, grid."""

    params: object
    t_final: float
    source: str = "full"
    steps: int = None
    record_every: int = None

    def __post_init__(self):
        if self.source not in SOURCES:
            raise ValueError(f"unknown Hamiltonian source {self.source!r}")
        if self.t_final < 0:
            raise ValueError("t_final must be non-negative")
        if self.steps is not None and self.steps < 1:
            raise ValueError("step budget must be at least 1")
        if self.record_every is not None and self.record_every < 1:
            raise ValueError("record_every must be positive")

    @property
    def dim(self):
        return 5 if self.source in ("effective", "closed_form") else 9

    @property
    def labels(self):
        return PAIR5_LABELS if self.dim == 5 else TWO_ATOM_LABELS


def spectral_bound(params, source):
    """Cheap upper bound on ||H||_2 used to set the default step count."""
    if source in ("effective", "closed_form"):
        # exact: the 5x5 effective spectrum is {2, 1/2, 0, 0, -1/2} * Omega^2/Delta
        return 2.0 * params.omega_a**2 / abs(params.delta_a)
    # Frobenius bound of the full 9x9 with all phases set to 1
    total = 0.0
    for mat in coupling_terms(params).values():
        total += 2.0 * float(np.sum(np.abs(mat) ** 2))
    return math.sqrt(total)


def default_steps(params, t_final, source):
    """Step count from the density rules: at least STEPS_PER_PHASE_PERIOD per
    2*pi/delta_rr phase period (time-dependent sources), dt*||H|| below
    MAX_NORM_STEP, and a floor of MIN_STEPS."""
    if t_final <= 0:
        return 1
    n = MIN_STEPS
    bound = spectral_bound(params, source)
    if bound > 0:
        n = max(n, math.ceil(t_final * bound / MAX_NORM_STEP))
    if source == "full":
        f_max = max(abs(params.delta_rr), abs(params.delta_a), abs(params.delta_b),
                    abs(params.delta_a - params.delta_rr),
                    abs(params.delta_b - params.delta_rr))
        if f_max > 0:
            n = max(n, math.ceil(t_final * f_max * STEPS_PER_PHASE_PERIOD / (2 * math.pi)))
    return n


def resolve_steps(spec):
    if spec.steps is not None:
        return spec.steps
    return default_steps(spec.params, spec.t_final, spec.source)


def _record_indices(steps, record_every):
    if record_every is None:
        record_every = max(1, steps // 800)
    idx = list(range(0, steps + 1, record_every))
    if idx[-1] != steps:
        idx.append(steps)
    return np.array(idx, dtype=np.int64)


class _StackedGenerator:
    """A(t) = static + sum_j exp(i freqs[j] t) mats[j], plus an optional
    per-row term row_scale[b] * row_mat (a gamma-proportional dissipator
    shared across a batch of decay rates). Everything is stored transposed
    so a batch of row vectors advances as y @ A(t)^T."""

    def __init__(self, static, freqs, mats, row_mat=None, row_scale=None):
        self.freqs = np.asarray(freqs, dtype=float)
        self.n_mats = len(freqs)
        if self.n_mats:
            self.stack_t = np.ascontiguousarray(np.stack(mats).transpose(0, 2, 1))
        self.static_t = None if static is None else np.ascontiguousarray(static.T)
        self.row_t = None if row_mat is None else np.ascontiguousarray(row_mat.T)
        self.scale = (None if row_scale is None
                      else np.asarray(row_scale, dtype=float)[:, None])

    def a_t(self, phase_row):
        acc = np.tensordot(phase_row, self.stack_t, axes=1)
        if self.static_t is not None:
            acc += self.static_t
        return acc

    def rhs(self, v, a_t):
        if self.row_t is None:
            return v @ a_t
        return v @ a_t + self.scale * (v @ self.row_t)

    def advance(self, y, start_step, n_steps, dt, chunk=2048):
        """n_steps of classical RK4 from node time start_step * dt."""
        half = 0.5 * dt
        sixth = dt / 6.0
        done = 0
        a0t = None
        while done < n_steps:
            n = min(chunk, n_steps - done)
            if self.n_mats:
                nodes = (2 * (start_step + done) + np.arange(2 * n + 1)) * half
                phases = np.exp(1j * np.outer(nodes, self.freqs))
            for k in range(n):
                if self.n_mats:
                    if a0t is None:
                        a0t = self.a_t(phases[2 * k])
                    aht = self.a_t(phases[2 * k + 1])
                    a1t = self.a_t(phases[2 * k + 2])
                else:
                    if a0t is None:
                        a0t = self.static_t
                    aht = a1t = self.static_t
                k1 = self.rhs(y, a0t)
                k2 = self.rhs(y + half * k1, aht)
                k3 = self.rhs(y + half * k2, aht)
                k4 = self.rhs(y + dt * k3, a1t)
                y = y + sixth * (k1 + 2.0 * (k2 + k3) + k4)
                a0t = a1t
                done += 1
            a0t = None  # phase table is rebuilt at the next chunk boundary
        return y


def _period_steps(freqs, dt, steps):
    """Steps per common period of the generator phases, or None.

    The generator is periodic when every frequency is an integer multiple
    of the smallest one; a time-independent generator counts as period one
    step. Only useful when the period is resolved by an integer number of
    steps."""
    if not len(freqs):
        return 1
    abs_f = [abs(f) for f in freqs]
    f0 = min(abs_f)
    if f0 == 0.0:
        return None
    for f in abs_f:
        ratio = f / f0
        if abs(ratio - round(ratio)) > 1e-9:
            return None
    per = 2.0 * math.pi / (f0 * dt)
    n = round(per)
    if n < 1 or abs(per - n) > 1e-6:
        return None
    return n


def _rk4_stacked(static, freqs, mats, y0, dt, steps, record_idx,
                 row_mat=None, row_scale=None):
    """Advance y' = A(t) y for a batch of row vectors y (shape (B, D)).

    Records y at the step indices in record_idx. When the generator is
    periodic and the record grid sits on period boundaries, the one-period
    RK4 propagator is built once and applied by matrix powers; otherwise
    the stepping runs straight through. Both paths are the same fixed-step
    scheme and agree to round-off.
    """
    gen = _StackedGenerator(static, freqs, mats, row_mat, row_scale)
    y = np.array(y0, dtype=complex)
    out = np.empty((len(record_idx),) + y.shape, dtype=complex)
    rec_pos = 0
    if record_idx[rec_pos] == 0:
        out[rec_pos] = y
        rec_pos += 1
    if steps == 0 or rec_pos == len(record_idx):
        return out

    spt = _period_steps(freqs, dt, steps)
    periodic = (spt is not None and steps % spt == 0 and steps // spt >= 2
                and not np.any(np.asarray(record_idx) % spt))
    if periodic:
        d = y.shape[-1]
        eye = np.eye(d, dtype=complex)
        if row_mat is None:
            # rows of the identity evolve like basis states, so this yields U^T
            phi = gen.advance(eye.copy(), 0, spt, dt)
            powers = {}

            def apply_periods(v, n_per):
                if n_per not in powers:
                    powers[n_per] = np.linalg.matrix_power(phi, n_per)
                return v @ powers[n_per]
        else:
            b = y.shape[0]
            flat = np.tile(eye, (b, 1)).reshape(b * d, d)
            gen_rows = _StackedGenerator(static, freqs, mats, row_mat,
                                         np.repeat(row_scale, d))
            phi = gen_rows.advance(flat, 0, spt, dt).reshape(b, d, d)
            powers = {}

            def apply_periods(v, n_per):
                if n_per not in powers:
                    powers[n_per] = np.stack(
                        [np.linalg.matrix_power(phi[i], n_per) for i in range(b)])
                return np.einsum("bd,bde->be", v, powers[n_per])

        prev = 0
        while rec_pos < len(record_idx):
            idx = int(record_idx[rec_pos])
            y = apply_periods(y, (idx - prev) // spt)
            out[rec_pos] = y
            prev = idx
            rec_pos += 1
        return out

    prev = 0
    while rec_pos < len(record_idx):
        idx = int(record_idx[rec_pos])
        y = gen.advance(y, prev, idx - prev, dt)
        out[rec_pos] = y
        prev = idx
        rec_pos += 1
    return out


@dataclass(frozen=True)
class Trajectory:
    """Recorded evolution: times (R,), data (R, d) for pure states or
    (R, d, d) for density matrices, and the basis labels."""

    times: np.ndarray
    data: np.ndarray
    labels: tuple
    spec: EvolutionSpec

    def final_state(self):
        two_atom = TWO_ATOM_LEVELS if len(self.labels) == 9 else None
        if self.data.ndim == 2:
            return StateVector(self.data[-1], two_atom) if two_atom else self.data[-1]
        return DensityMatrix(self.data[-1], self.labels, two_atom)


@dataclass(frozen=True)
class FidelityTrace:
    """Fidelity against a fixed target state along a trajectory."""

    times: np.ndarray
    fidelities: np.ndarray
    spec: EvolutionSpec

    def peak(self):
        i = int(np.argmax(self.fidelities))
        return float(self.times[i]), float(self.fidelities[i])


def _pure_generator(spec):
    """(static, freqs, mats) with the -i of the Schrodinger equation folded in."""
    p = spec.params
    if spec.source == "effective":
        h = effective_hamiltonian(p, "full5").mat
        return -1j * h, [], []
    freqs, mats = [], []
    for f, m in coupling_terms(p).items():
        freqs.append(f)
        mats.append(-1j * m)
        freqs.append(-f)
        mats.append(-1j * m.conj().T)
    return None, freqs, mats


def _check_psi0(spec, psi0):
    amps = psi0.amps if isinstance(psi0, StateVector) else np.asarray(psi0, dtype=complex)
    if amps.shape != (spec.dim,):
        raise DimensionMismatchError(
            f"initial state has dimension {amps.shape}, Hamiltonian needs {spec.dim}")
    if abs(np.linalg.norm(amps) - 1.0) > 1e-8:
        raise InvalidStateError("initial state is not normalized")
    return amps


def evolve_pure(spec, psi0):
    """Schrodinger evolution of a normalized pure state; returns a Trajectory.

    No renormalization is applied along the way: with the default step
    density the final norm stays within 1e-6 of one, and drift beyond that
    signals an under-resolved run.
    """
    amps = _check_psi0(spec, psi0)
    times, batch = _evolve_pure_batch(spec, amps[None, :])
    return Trajectory(times, batch[:, 0, :], spec.labels, spec)


def _evolve_pure_batch(spec, amps_batch):
    if spec.t_final == 0:
        return np.zeros(1), np.array(amps_batch, dtype=complex)[None, ...]
    steps = resolve_steps(spec)
    record_idx = _record_indices(steps, spec.record_every)
    dt = spec.t_final / steps
    times = record_idx * dt
    if spec.source == "closed_form":
        p = spec.params
        if not p.symmetric_drive:
            raise InvalidStateError("closed-form evolution requires the symmetric drive")
        thetas = times * p.omega_a**2 / p.delta_a
        out = np.empty((len(times),) + amps_batch.shape, dtype=complex)
        for i, theta in enumerate(thetas):
            u = gate_matrix(closed_form_coeffs(theta))
            out[i] = amps_batch @ u.T
        return times, out
    static, freqs, mats = _pure_generator(spec)
    out = _rk4_stacked(static, freqs, mats, amps_batch, dt, steps, record_idx)
    return times, out


def lindblad_operators(gamma):
    """Four 9x9 jump operators: each atom decays |r> -> |0> and |r> -> |1>
    at rate gamma/2."""
    ops = []
    eye = np.eye(3, dtype=complex)
    for target in (0, 1):
        single = np.zeros((3, 3), dtype=complex)
        single[target, 2] = math.sqrt(gamma / 2.0)
        ops.append(np.kron(single, eye))
        ops.append(np.kron(eye, single))
    return ops


def _dissipator_superop(gamma):
    """Superoperator of the dissipative part on row-major vec(rho)."""
    d2 = 81
    dis = np.zeros((d2, d2), dtype=complex)
    eye = np.eye(9, dtype=complex)
    for lk in lindblad_operators(gamma):
        lk_dag_lk = lk.conj().T @ lk
        dis += np.kron(lk, lk.conj())
        dis -= 0.5 * np.kron(lk_dag_lk, eye)
        dis -= 0.5 * np.kron(eye, lk_dag_lk.T)
    return dis


def _commutator_superops(params):
    """Frequency-stacked -i[H(t), .] pieces on vec(rho)."""
    eye = np.eye(9, dtype=complex)
    freqs, mats = [], []
    for f, m in coupling_terms(params).items():
        freqs.append(f)
        mats.append(-1j * (np.kron(m, eye) - np.kron(eye, m.T)))
        md = m.conj().T
        freqs.append(-f)
        mats.append(-1j * (np.kron(md, eye) - np.kron(eye, md.T)))
    return freqs, mats


def _check_rho0(rho0):
    mat = rho0.mat if isinstance(rho0, DensityMatrix) else np.asarray(rho0, dtype=complex)
    if mat.shape != (9, 9):
        raise DimensionMismatchError("Lindblad evolution needs a 9x9 density matrix")
    tr = np.trace(mat)
    if abs(tr - 1.0) > 1e-8:
        raise InvalidStateError(f"initial trace {tr} deviates from 1")
    if np.abs(mat - mat.conj().T).max() > 1e-10:
        raise InvalidStateError("initial density matrix is not Hermitian")
    return mat


def evolve_lindblad(spec, rho0):
    """Master-equation evolution of a valid 9x9 density matrix.

    Uses the full rotating-frame Hamiltonian; the jump operators are
    time-independent (the frame rotation is diagonal in the level basis,
    so it leaves them unchanged). Trace is preserved to integrator
    accuracy, about 1e-6 over the benchmark runs at default steps.
    """
    if spec.source != "full":
        raise ValueError("Lindblad evolution is defined for the full Hamiltonian")
    mat = _check_rho0(rho0)
    times, batch = _evolve_lindblad_batch(spec, mat[None, :, :], [spec.params.gamma])
    return Trajectory(times, batch[:, 0, :, :], TWO_ATOM_LABELS, spec)


def _evolve_lindblad_batch(spec, rho_batch, gammas):
    """Evolve a batch of 9x9 matrices, one decay rate per batch row."""
    b = rho_batch.shape[0]
    if len(gammas) != b:
        raise ValueError("one gamma per batch row required")
    if spec.t_final == 0:
        return np.zeros(1), np.array(rho_batch, dtype=complex)[None, ...]
    steps = resolve_steps(spec)
    record_idx = _record_indices(steps, spec.record_every)
    dt = spec.t_final / steps
    times = record_idx * dt
    y0 = rho_batch.reshape(b, 81)
    freqs, mats = _commutator_superops(spec.params)
    gammas = [float(g) for g in gammas]
    if all(g == gammas[0] for g in gammas):
        static = _dissipator_superop(gammas[0]) if gammas[0] > 0 else None
        out = _rk4_stacked(static, freqs, mats, y0, dt, steps, record_idx)
    else:
        # dissipator is linear in gamma: one unit-rate superoperator, scaled per row
        unit = _dissipator_superop(1.0)
        out = _rk4_stacked(None, freqs, mats, y0, dt, steps, record_idx,
                           row_mat=unit, row_scale=gammas)
    return times, out.reshape(len(record_idx), b, 9, 9)


def fidelity_trace(spec, psi0, ideal):
    """Fidelity of the evolving state against ``ideal`` at the record grid.

    Dissipative parameters (gamma > 0) integrate the master equation from
    |psi0><psi0|; otherwise the pure Schrodinger path is used.
    """
    ideal_amps = ideal.amps if isinstance(ideal, StateVector) else np.asarray(ideal)
    amps = _check_psi0(spec, psi0)
    if ideal_amps.shape != amps.shape:
        raise DimensionMismatchError("ideal and initial states differ in dimension")
    if spec.params.gamma > 0:
        if spec.source != "full":
            raise ValueError("dissipative traces need the full Hamiltonian")
        rho0 = np.outer(amps, amps.conj())
        times, batch = _evolve_lindblad_batch(spec, rho0[None], [spec.params.gamma])
        rhos = batch[:, 0]
        vals = np.real(np.einsum("i,tij,j->t", ideal_amps.conj(), rhos, ideal_amps))
    else:
        times, batch = _evolve_pure_batch(spec, amps[None, :])
        overlaps = batch[:, 0, :] @ ideal_amps.conj()
        vals = np.abs(overlaps) ** 2
    vals = np.clip(vals.real, 0.0, 1.0)
    return FidelityTrace(times, vals, spec)


def pair_state(label, space="two_atom"):
    """Computational pair basis state, embedded per the requested space."""
    if space == "two_atom":
        return basis_state(TWO_ATOM_LEVELS, label)
    if space == "pair5":
        amps = np.zeros(5, dtype=complex)
        amps[PAIR5_LABELS.index(label)] = 1.0
        return amps
    raise ValueError(f"unknown space {space!r}")


def embed_pair5(vec5):
    """Lift a 5-dim (00, 01, 10, 11, rr) vector into the 9-dim two-atom basis."""
    amps = np.zeros(9, dtype=complex)
    amps[list(PAIR5_IN_9)] = vec5
    return amps
