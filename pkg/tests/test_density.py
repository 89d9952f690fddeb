import numpy as np
import pytest

from ringladder.density import (
    TwoQubitX,
    bond_sites,
    level_density,
    partial_trace_two,
    to_x_form,
    validate_density,
)
from ringladder.eigensolver import two_lowest_states
from ringladder.errors import DomainError, PreconditionError, XFormViolationError
from ringladder.hamiltonian import LadderParams
from ringladder.lattice import get_basis

from conftest import embed_sector_vector, partial_trace_oracle


def random_sector_state(rng, basis):
    v = rng.standard_normal(basis.dim)
    return v / np.linalg.norm(v)


def test_bond_site_anchors():
    assert bond_sites("rung", 6) == (0, 1)
    assert bond_sites("leg", 6) == (0, 2)
    assert bond_sites("diag", 6) == (0, 3)
    assert bond_sites("rung", 6, rung=3) == (4, 5)
    assert bond_sites("leg", 6, rung=6) == (10, 0)
    assert bond_sites("diag", 6, rung=6) == (10, 1)


def test_bond_sites_rejects_bad_input():
    with pytest.raises(DomainError):
        bond_sites("ring", 6)
    with pytest.raises(DomainError):
        bond_sites("rung", 6, rung=0)


def test_partial_trace_matches_brute_force():
    rng = np.random.default_rng(21)
    L = 4
    for n_up in (2, 4, 5):
        basis = get_basis(L, n_up)
        for bond in ("rung", "leg", "diag"):
            sites = bond_sites(bond, L)
            for _ in range(5):
                v = random_sector_state(rng, basis)
                ours = partial_trace_two(v, basis, sites)
                full = embed_sector_vector(v, basis, L)
                ref = partial_trace_oracle(full, L, *sites)
                assert np.max(np.abs(ours - ref)) < 1e-12


def test_partial_trace_arbitrary_site_pairs():
    rng = np.random.default_rng(22)
    L = 4
    basis = get_basis(L, 3)
    for sites in [(0, 5), (1, 6), (2, 7), (3, 4)]:
        v = random_sector_state(rng, basis)
        ours = partial_trace_two(v, basis, sites)
        ref = partial_trace_oracle(embed_sector_vector(v, basis, L), L, *sites)
        assert np.max(np.abs(ours - ref)) < 1e-12


def test_partial_trace_is_a_density_matrix():
    rng = np.random.default_rng(23)
    basis = get_basis(4, 4)
    v = random_sector_state(rng, basis)
    rho = partial_trace_two(v, basis, (0, 1))
    assert abs(np.trace(rho) - 1.0) < 1e-12
    assert np.min(np.linalg.eigvalsh(rho)) > -1e-12
    # Sector residency forbids (uu, dd) coherence identically.
    assert rho[0, 3] == 0.0 and rho[3, 0] == 0.0


def test_partial_trace_guards():
    basis = get_basis(4, 4)
    with pytest.raises(DomainError):
        partial_trace_two(np.ones(basis.dim), basis, (2, 2))
    with pytest.raises(DomainError):
        partial_trace_two(np.ones(3), basis, (0, 1))


def test_level_density_modes():
    params = LadderParams(L=4, theta_over_pi=-0.75)
    rep = two_lowest_states(params, tiebreak="max-polarized")
    rho = level_density(rep, 0, "rung")
    # Fully polarized member: pure |uu> on every bond.
    assert np.allclose(rho, np.diag([1.0, 0.0, 0.0, 0.0]), atol=1e-12)

    avg = two_lowest_states(params, tiebreak="average")
    rho_avg = level_density(avg, 0, "rung")
    assert abs(np.trace(rho_avg) - 1.0) < 1e-12
    # The multiplet average is mixed but still X shaped.
    assert rho_avg[0, 3] == 0.0
    assert np.linalg.matrix_rank(rho_avg, tol=1e-10) > 1


def test_validate_density_rejects_bad_matrices():
    good = np.diag([0.5, 0.5, 0.0, 0.0])
    validate_density(good)
    bad = good.copy()
    bad[0, 1] = 0.2
    with pytest.raises(PreconditionError):
        validate_density(bad)
    with pytest.raises(PreconditionError):
        validate_density(np.diag([0.7, 0.5, 0.0, 0.0]))
    with pytest.raises(PreconditionError):
        validate_density(np.diag([1.2, -0.2, 0.0, 0.0]))
    with pytest.raises(PreconditionError):
        validate_density(np.eye(3) / 3.0)


def test_to_x_form_extracts_parameters():
    x = to_x_form(np.array([
        [0.125, 0.0, 0.0, 0.0],
        [0.0, 0.375, -0.25, 0.0],
        [0.0, -0.25, 0.375, 0.0],
        [0.0, 0.0, 0.0, 0.125],
    ]))
    assert x == TwoQubitX(u=0.125, x=0.375, y=0.375, v=0.125, z=-0.25, w=0.0)
    m = x.to_matrix()
    assert np.array_equal(m, m.T)
    assert np.allclose(x.marginal_a, np.diag([0.5, 0.5]))


def test_to_x_form_flags_violations():
    rho = np.diag([0.25, 0.25, 0.25, 0.25]).astype(complex)
    rho[0, 1] = rho[1, 0] = 1e-6
    with pytest.raises(XFormViolationError) as err:
        to_x_form(rho)
    assert err.value.magnitude == pytest.approx(1e-6)
    # Tolerance is adjustable.
    to_x_form(rho, tol=1e-5)
