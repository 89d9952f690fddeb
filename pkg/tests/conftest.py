"""Shared independent oracles for the test suite.

These helpers deliberately avoid the package's kernel machinery: spin
operators are assembled from Kronecker products and the plaquette
permutation is re-derived bit by bit, so agreement with the package is a
genuine cross-check rather than a tautology.
"""

import math

import numpy as np

I2 = np.eye(2, dtype=complex)
# Local basis ordered by bit value: index 0 = spin down, index 1 = spin up.
SP = np.array([[0, 0], [1, 0]], dtype=complex)
SM = np.array([[0, 1], [0, 0]], dtype=complex)
SX = 0.5 * (SP + SM)
SY = (SP - SM) / 2j
SZ = np.diag([-0.5, 0.5]).astype(complex)


def site_operator(op, site, nsites):
    """Embed a 2x2 operator at a bit position; full index m = sum bit_s 2^s."""
    out = np.eye(1, dtype=complex)
    for s in range(nsites - 1, -1, -1):
        out = np.kron(out, op if s == site else I2)
    return out


def pair_coupling(i, j, nsites):
    """S_i . S_j on the full 2^nsites space."""
    total = np.zeros((2**nsites, 2**nsites), dtype=complex)
    for op in (SX, SY, SZ):
        total += site_operator(op, i, nsites) @ site_operator(op, j, nsites)
    return total


def ladder_bonds(L):
    """Model bond list re-derived independently: rungs then both legs."""
    bonds = [(2 * i, 2 * i + 1) for i in range(L)]
    bonds += [(2 * i, 2 * ((i + 1) % L)) for i in range(L)]
    bonds += [(2 * i + 1, 2 * ((i + 1) % L) + 1) for i in range(L)]
    return bonds


def permute_bits_clockwise(m, a, b, c, d):
    """Value at a -> b, b -> c, c -> d, d -> a, acting on integer m."""
    va = (m >> a) & 1
    vb = (m >> b) & 1
    vc = (m >> c) & 1
    vd = (m >> d) & 1
    keep = m & ~((1 << a) | (1 << b) | (1 << c) | (1 << d))
    return keep | (vd << a) | (va << b) | (vb << c) | (vc << d)


def full_hamiltonian_oracle(L, theta_over_pi):
    """Dense H on the full 4^L space built from operator algebra plus an
    explicit permutation matrix for the ring term."""
    n = 2 * L
    dim = 2**n
    j = math.cos(math.pi * theta_over_pi)
    k = math.sin(math.pi * theta_over_pi)
    h = np.zeros((dim, dim), dtype=complex)
    for p, q in ladder_bonds(L):
        h += j * pair_coupling(p, q, n)
    for i in range(L):
        jnext = (i + 1) % L
        a, b, c, d = 2 * i, 2 * jnext, 2 * jnext + 1, 2 * i + 1
        perm = np.zeros((dim, dim))
        for m in range(dim):
            perm[permute_bits_clockwise(m, a, b, c, d), m] = 1.0
        h += k * (perm + perm.T)
    return h


def s_squared_full(nsites):
    dim = 2**nsites
    total = np.zeros((dim, dim), dtype=complex)
    for op in (SX, SY, SZ):
        s_tot = np.zeros((dim, dim), dtype=complex)
        for s in range(nsites):
            s_tot += site_operator(op, s, nsites)
        total += s_tot @ s_tot
    return total


def embed_sector_vector(vec, basis, L):
    """Lift a sector vector to the full 4^L space (full index = packed state)."""
    full = np.zeros(4**L)
    full[basis.states] = vec
    return full


def partial_trace_oracle(full_vec, L, p, q):
    """Brute-force two-site reduced matrix of a full-space pure state.

    Loops over every configuration, binning amplitudes by the environment
    bits; basis order (uu, ud, du, dd) with site p first and bit 1 = up.
    """
    mask = (1 << p) | (1 << q)
    buckets = {}
    for m in range(4**L):
        a = full_vec[m]
        if a == 0.0:
            continue
        loc = 2 * (1 - ((m >> p) & 1)) + (1 - ((m >> q) & 1))
        env = m & ~mask
        buckets.setdefault(env, np.zeros(4))[loc] += a
    rho = np.zeros((4, 4))
    for amp in buckets.values():
        rho += np.outer(amp, amp)
    return rho


def random_x_state(rng):
    """Random X-shaped two-qubit density matrix: flat Dirichlet populations,
    coherences uniform within the positivity bounds."""
    u, x, y, v = rng.dirichlet([1.0, 1.0, 1.0, 1.0])
    z = rng.uniform(-1.0, 1.0) * np.sqrt(x * y)
    w = rng.uniform(-1.0, 1.0) * np.sqrt(u * v)
    return u, x, y, v, z, w


def random_density(rng, n=4):
    """Ginibre-ensemble random density matrix."""
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    rho = g @ g.conj().T
    return rho / rho.trace().real


def random_unitary(rng, n=2):
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    qmat, r = np.linalg.qr(g)
    return qmat * (np.diag(r) / np.abs(np.diag(r)))
