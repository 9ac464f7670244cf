"""Dense basis-labeled quantum states and operators.

Everything downstream (gate construction, time evolution, fusion
bookkeeping) works with explicit complex vectors/matrices over a labeled
basis. Registers are tensor products of sites; each site is either a
three-level atom ``{0, 1, r}`` or a qubit ``{0, 1}``. Basis ordering is
site-major with the per-site symbol order fixed above, so a two-atom
register enumerates ``00, 01, 0r, 10, 11, 1r, r0, r1, rr``.

All values are immutable after construction and all operations are pure
functions, so they are safe to share across threads.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

ATOM = ("0", "1", "r")
QUBIT = ("0", "1")

# tolerances for constructed/validated objects
NORM_TOL = 1e-10
HERMITIAN_TOL = 1e-12
DM_TRACE_TOL = 1e-8
DM_HERMITIAN_TOL = 1e-10
DM_EIG_TOL = -1e-8


class DimensionMismatchError(ValueError):
    """Operands live on bases of different dimension or labeling."""


class InvalidStateError(ValueError):
    """A state failed its normalization / trace / Hermiticity checks."""


def product_labels(site_levels):
    """Concatenated per-site symbols for every basis index, in order."""
    return tuple("".join(symbols) for symbols in itertools.product(*site_levels))


def label_to_index(label, site_levels):
    if len(label) != len(site_levels):
        raise ValueError(f"label {label!r} does not match {len(site_levels)} sites")
    idx = 0
    for symbol, levels in zip(label, site_levels):
        idx = idx * len(levels) + levels.index(symbol)
    return idx


def _freeze(arr, dtype=complex):
    out = np.array(arr, dtype=dtype)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class StateVector:
    """Pure state: complex amplitudes over the product basis of ``site_levels``."""

    amps: np.ndarray
    site_levels: tuple

    def __post_init__(self):
        amps = _freeze(self.amps)
        levels = tuple(tuple(lv) for lv in self.site_levels)
        dim = math.prod(len(lv) for lv in levels) if levels else 1
        if amps.shape != (dim,):
            raise DimensionMismatchError(
                f"amplitude vector has shape {amps.shape}, basis has dimension {dim}"
            )
        object.__setattr__(self, "amps", amps)
        object.__setattr__(self, "site_levels", levels)

    @property
    def dim(self):
        return self.amps.shape[0]

    @property
    def n_sites(self):
        return len(self.site_levels)

    @property
    def labels(self):
        return product_labels(self.site_levels)

    def norm(self):
        return float(np.linalg.norm(self.amps))

    def normalized(self):
        n = self.norm()
        if n == 0.0:
            raise InvalidStateError("cannot normalize the zero vector")
        return StateVector(self.amps / n, self.site_levels)

    def amplitude(self, label):
        return complex(self.amps[label_to_index(label, self.site_levels)])


def basis_state(site_levels, label):
    """|label> basis vector of the given register."""
    levels = tuple(tuple(lv) for lv in site_levels)
    dim = math.prod(len(lv) for lv in levels) if levels else 1
    amps = np.zeros(dim, dtype=complex)
    amps[label_to_index(label, levels)] = 1.0
    return StateVector(amps, levels)


def state_from_components(site_levels, components):
    """Build a state from ``{label: amplitude}`` without renormalizing."""
    levels = tuple(tuple(lv) for lv in site_levels)
    dim = math.prod(len(lv) for lv in levels) if levels else 1
    amps = np.zeros(dim, dtype=complex)
    for label, amp in components.items():
        amps[label_to_index(label, levels)] += amp
    return StateVector(amps, levels)


@dataclass(frozen=True)
class Operator:
    """Square matrix over an explicit basis labeling.

    ``site_levels`` is present for tensor-product registers and absent for
    ad-hoc bases (e.g. the five-state computational-plus-|rr> space used by
    the effective pair Hamiltonian). When ``hermitian=True`` the matrix is
    checked entrywise against its adjoint.
    """

    mat: np.ndarray
    labels: tuple
    site_levels: tuple = None
    hermitian: bool = None

    def __post_init__(self):
        mat = _freeze(self.mat)
        labels = tuple(self.labels)
        if mat.shape != (len(labels), len(labels)):
            raise DimensionMismatchError(
                f"matrix shape {mat.shape} does not match {len(labels)} labels"
            )
        if self.site_levels is not None:
            levels = tuple(tuple(lv) for lv in self.site_levels)
            if product_labels(levels) != labels:
                raise DimensionMismatchError("labels do not match site_levels")
            object.__setattr__(self, "site_levels", levels)
        if self.hermitian:
            resid = np.abs(mat - mat.conj().T).max()
            if resid > HERMITIAN_TOL:
                raise InvalidStateError(
                    f"operator flagged hermitian but max |M - M^dag| = {resid:.3e}"
                )
        object.__setattr__(self, "mat", mat)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_sites(cls, mat, site_levels, hermitian=None):
        levels = tuple(tuple(lv) for lv in site_levels)
        return cls(mat, product_labels(levels), levels, hermitian)

    @property
    def dim(self):
        return self.mat.shape[0]

    def dagger(self):
        return Operator(self.mat.conj().T, self.labels, self.site_levels, self.hermitian)

    def entry(self, row_label, col_label):
        i = self.labels.index(row_label)
        j = self.labels.index(col_label)
        return complex(self.mat[i, j])


@dataclass(frozen=True)
class DensityMatrix:
    """Mixed state over a labeled basis."""

    mat: np.ndarray
    labels: tuple
    site_levels: tuple = None

    def __post_init__(self):
        mat = _freeze(self.mat)
        labels = tuple(self.labels)
        if mat.shape != (len(labels), len(labels)):
            raise DimensionMismatchError(
                f"matrix shape {mat.shape} does not match {len(labels)} labels"
            )
        if self.site_levels is not None:
            levels = tuple(tuple(lv) for lv in self.site_levels)
            if product_labels(levels) != labels:
                raise DimensionMismatchError("labels do not match site_levels")
            object.__setattr__(self, "site_levels", levels)
        object.__setattr__(self, "mat", mat)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_state(cls, psi):
        return cls(np.outer(psi.amps, psi.amps.conj()), psi.labels, psi.site_levels)

    @property
    def dim(self):
        return self.mat.shape[0]

    def trace(self):
        return complex(np.trace(self.mat))

    def min_eigenvalue(self):
        # symmetrize first so round-off in the antihermitian part cannot bias the check
        sym = 0.5 * (self.mat + self.mat.conj().T)
        return float(np.linalg.eigvalsh(sym)[0])

    def validate(self, trace_tol=DM_TRACE_TOL, herm_tol=DM_HERMITIAN_TOL, eig_tol=DM_EIG_TOL):
        """Raise InvalidStateError if trace, Hermiticity or positivity are off."""
        tr = self.trace()
        if abs(tr - 1.0) > trace_tol:
            raise InvalidStateError(f"trace {tr} deviates from 1 beyond {trace_tol}")
        herm = np.abs(self.mat - self.mat.conj().T).max()
        if herm > herm_tol:
            raise InvalidStateError(f"Hermiticity residual {herm:.3e} beyond {herm_tol}")
        lo = self.min_eigenvalue()
        if lo < eig_tol:
            raise InvalidStateError(f"minimum eigenvalue {lo:.3e} below {eig_tol}")


def tensor(a, b):
    """Kronecker product of two states or two operators.

    Site-major ordering: the left operand is the first block of sites, so
    labels concatenate as ``left + right``.
    """
    if isinstance(a, StateVector) and isinstance(b, StateVector):
        return StateVector(np.kron(a.amps, b.amps), a.site_levels + b.site_levels)
    if isinstance(a, Operator) and isinstance(b, Operator):
        if a.site_levels is None or b.site_levels is None:
            raise ValueError("tensor requires operators with site structure")
        herm = True if (a.hermitian and b.hermitian) else None
        return Operator.from_sites(np.kron(a.mat, b.mat), a.site_levels + b.site_levels, herm)
    raise TypeError("tensor operands must be two StateVectors or two Operators")


def fidelity(ideal, actual):
    """Overlap fidelity of ``actual`` with the pure target ``ideal``.

    Pure actual state: |<ideal|actual>|^2. Density matrix: <ideal|rho|ideal>.
    The result is clamped to [0, 1]; a global phase on either state vector
    drops out by construction.
    """
    if isinstance(actual, StateVector):
        if actual.dim != ideal.dim:
            raise DimensionMismatchError("state dimensions differ")
        overlap = np.vdot(ideal.amps, actual.amps)
        value = float(overlap.real**2 + overlap.imag**2)
    elif isinstance(actual, DensityMatrix):
        if actual.dim != ideal.dim:
            raise DimensionMismatchError("state dimensions differ")
        value = float(np.real(np.vdot(ideal.amps, actual.mat @ ideal.amps)))
    else:
        raise TypeError("actual must be a StateVector or DensityMatrix")
    return min(max(value, 0.0), 1.0)


def expectation(op, state):
    """<psi|A|psi> (or Tr[A rho]) for an operator on the same basis."""
    if op.dim != state.dim:
        raise DimensionMismatchError("operator and state dimensions differ")
    if isinstance(state, StateVector):
        return complex(np.vdot(state.amps, op.mat @ state.amps))
    return complex(np.trace(op.mat @ state.mat))


def project(state, sites, outcome):
    """Measure the given sites in the level basis.

    Returns ``(probability, collapsed)`` where the collapsed state is
    renormalized over the remaining sites, with the measured sites removed
    from the register. A zero-probability outcome returns ``(0.0, None)``.
    Measuring every site leaves the trivial zero-site register.
    """
    sites = list(sites)
    if len(set(sites)) != len(sites):
        raise ValueError("measured sites must be distinct")
    if any(s < 0 or s >= state.n_sites for s in sites):
        raise ValueError("measured site index out of range")
    if len(outcome) != len(sites):
        raise ValueError(
            f"outcome {outcome!r} has {len(outcome)} symbols for {len(sites)} sites"
        )
    shape = tuple(len(lv) for lv in state.site_levels)
    block = state.amps.reshape(shape)
    indexer = [slice(None)] * state.n_sites
    for site, symbol in zip(sites, outcome):
        levels = state.site_levels[site]
        if symbol not in levels:
            raise ValueError(f"symbol {symbol!r} not valid for site {site}")
        indexer[site] = levels.index(symbol)
    component = block[tuple(indexer)]
    prob = float(np.real(np.vdot(component, component)))
    if prob <= 0.0:
        return 0.0, None
    remaining = tuple(lv for i, lv in enumerate(state.site_levels) if i not in sites)
    collapsed = StateVector(component.reshape(-1) / np.sqrt(prob), remaining)
    return prob, collapsed
