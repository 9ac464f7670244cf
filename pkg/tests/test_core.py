"""Basis-labeled state/operator algebra: tensor, fidelity, projection."""

import numpy as np
import pytest

from rydfuse.core import (
    ATOM,
    QUBIT,
    DensityMatrix,
    DimensionMismatchError,
    InvalidStateError,
    Operator,
    StateVector,
    basis_state,
    expectation,
    fidelity,
    project,
    state_from_components,
    tensor,
)

RNG = np.random.default_rng(20240811)


def random_state(site_levels, rng=RNG):
    dim = int(np.prod([len(lv) for lv in site_levels]))
    amps = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return StateVector(amps / np.linalg.norm(amps), site_levels)


def test_product_basis_ordering():
    psi = basis_state((ATOM, ATOM), "0r")
    assert psi.labels == ("00", "01", "0r", "10", "11", "1r", "r0", "r1", "rr")
    assert psi.amps[2] == 1.0
    assert psi.dim == 9


def test_tensor_basis_states():
    one = basis_state((ATOM,), "0")
    prod = tensor(one, one)
    assert prod.labels[0] == "00"
    assert prod.amps[0] == 1.0
    assert np.count_nonzero(prod.amps) == 1


def test_tensor_identity_operators():
    eye3 = Operator.from_sites(np.eye(3), (ATOM,), hermitian=True)
    eye9 = tensor(eye3, eye3)
    assert np.array_equal(eye9.mat, np.eye(9))
    assert eye9.site_levels == (ATOM, ATOM)


def test_tensor_single_site_operator_enumeration():
    """sigma x I entries checked against an explicit index loop."""
    sigma = 0.37 - 0.11j
    mat = np.zeros((3, 3), dtype=complex)
    mat[ATOM.index("0"), ATOM.index("r")] = sigma
    op = tensor(Operator.from_sites(mat, (ATOM,)),
                Operator.from_sites(np.eye(3), (ATOM,)))
    # oracle: <0q| op |rq> = sigma for q in {0,1,r}, all else zero
    expected = {}
    for q in ATOM:
        expected[("0" + q, "r" + q)] = sigma
    labels = op.labels
    for i, row in enumerate(labels):
        for j, col in enumerate(labels):
            assert op.mat[i, j] == pytest.approx(expected.get((row, col), 0.0))


def test_tensor_associative_and_adjoint():
    a = random_state((QUBIT,))
    b = random_state((ATOM,))
    c = random_state((QUBIT,))
    left = tensor(tensor(a, b), c)
    right = tensor(a, tensor(b, c))
    assert np.allclose(left.amps, right.amps, atol=1e-15)
    assert left.site_levels == right.site_levels

    rng = np.random.default_rng(7)
    ma = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    mb = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    oa = Operator.from_sites(ma, (ATOM,))
    ob = Operator.from_sites(mb, (QUBIT,))
    lhs = tensor(oa, ob).dagger().mat
    rhs = tensor(oa.dagger(), ob.dagger()).mat
    assert np.abs(lhs - rhs).max() <= 1e-12


def test_fidelity_trivials():
    psi = random_state((QUBIT, QUBIT))
    assert fidelity(psi, DensityMatrix.from_state(psi)) == pytest.approx(1.0, abs=1e-12)
    z = basis_state((QUBIT, QUBIT), "00")
    o = basis_state((QUBIT, QUBIT), "11")
    assert fidelity(z, DensityMatrix.from_state(o)) == 0.0


def test_fidelity_global_phase_invariance():
    bell = state_from_components((QUBIT, QUBIT),
                                 {"00": 1 / np.sqrt(2), "11": 1j / np.sqrt(2)})
    for phase in (1.0, 1j, np.exp(-0.25j * np.pi), np.exp(2.1j)):
        rotated = StateVector(phase * bell.amps, bell.site_levels)
        assert fidelity(bell, rotated) == pytest.approx(1.0, abs=1e-14)
        assert fidelity(rotated, bell) == pytest.approx(1.0, abs=1e-14)


def test_fidelity_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        fidelity(basis_state((QUBIT,), "0"), basis_state((QUBIT, QUBIT), "00"))


def test_project_bell_state():
    bell = state_from_components((QUBIT, QUBIT),
                                 {"00": 1 / np.sqrt(2), "11": 1j / np.sqrt(2)})
    prob, collapsed = project(bell, (0, 1), "00")
    assert prob == pytest.approx(0.5, abs=1e-12)
    assert collapsed.site_levels == ()
    assert collapsed.dim == 1

    prob, collapsed = project(bell, (0,), "1")
    assert prob == pytest.approx(0.5, abs=1e-12)
    assert collapsed.n_sites == 1
    assert abs(collapsed.amps[1]) == pytest.approx(1.0, abs=1e-12)

    prob, collapsed = project(bell, (0, 1), "01")
    assert prob == 0.0 and collapsed is None


def test_project_completeness():
    import itertools

    psi = random_state((ATOM, QUBIT, ATOM))
    sites = (0, 2)
    total = 0.0
    for symbols in itertools.product(ATOM, ATOM):
        prob, _ = project(psi, sites, "".join(symbols))
        total += prob
    assert total == pytest.approx(1.0, abs=1e-10)


def test_project_errors():
    psi = random_state((QUBIT, QUBIT))
    with pytest.raises(ValueError):
        project(psi, (0, 1), "0")       # fragment length mismatch
    with pytest.raises(ValueError):
        project(psi, (0, 0), "00")      # repeated site
    with pytest.raises(ValueError):
        project(psi, (5,), "0")         # out of range
    with pytest.raises(ValueError):
        project(psi, (0,), "r")         # symbol not in QUBIT levels


def test_operator_hermitian_flag():
    good = np.array([[1.0, 1j], [-1j, 2.0]])
    Operator(good, ("a", "b"), hermitian=True)
    with pytest.raises(InvalidStateError):
        Operator(np.array([[0.0, 1.0], [0.0, 0.0]]), ("a", "b"), hermitian=True)


def test_density_matrix_validation():
    psi = random_state((QUBIT, QUBIT))
    rho = DensityMatrix.from_state(psi)
    rho.validate()
    assert rho.min_eigenvalue() >= -1e-12

    bad_trace = DensityMatrix(1.5 * rho.mat, rho.labels)
    with pytest.raises(InvalidStateError):
        bad_trace.validate()

    nonherm = np.array(rho.mat)
    nonherm[0, 1] += 1e-6
    with pytest.raises(InvalidStateError):
        DensityMatrix(nonherm, rho.labels).validate()


def test_expectation():
    psi = basis_state((QUBIT,), "1")
    number = Operator.from_sites(np.diag([0.0, 1.0]), (QUBIT,), hermitian=True)
    assert expectation(number, psi) == pytest.approx(1.0)
    assert expectation(number, DensityMatrix.from_state(psi)) == pytest.approx(1.0)


def test_state_normalization_and_freeze():
    psi = random_state((QUBIT,))
    assert psi.norm() == pytest.approx(1.0, abs=1e-10)
    with pytest.raises(ValueError):
        psi.amps[0] = 5.0  # immutable
