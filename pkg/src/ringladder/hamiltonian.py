"""Matrix-free Hamiltonian kernel for the ring-exchange ladder.

The model on L rungs with periodic legs couples every rung pair, every
nearest-neighbor leg pair, and every square plaquette:

    H = J * sum_rungs S.S  +  J * sum_legs S.S  +  K * sum_plaquettes (P + P^-1)

with J = cos(theta) shared by rung and leg bonds and K = sin(theta).  P
cyclically shifts the four spin values of a plaquette: with corners labeled

        (u,i) --- (u,i+1)
          |          |
        (d,i) --- (d,i+1)

P moves the value at (u,i) to (u,i+1), (u,i+1) to (d,i+1), (d,i+1) to (d,i)
and (d,i) to (u,i), i.e. one clockwise step; P^-1 is the counterclockwise
step.  Both are pure permutations of the classical configurations, so in the
packed-integer basis the ring term is a pair of index gathers and the
exchange term is the usual diagonal +- 1/4 plus a spin-flip hop of weight 1/2
between configurations that differ on a bond.

Everything the kernel precomputes (diagonal units, flip pairs, permutation
index maps) is independent of theta; J and K enter only as scalars at apply
time, so one kernel serves an entire coupling sweep.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import CapacityError, DomainError
from .lattice import SectorBasis, check_length, get_basis

THETA_DECIMALS = 12
DENSE_LIMIT = 4096


def canonical_theta(theta_over_pi: float) -> float:
    """Round a coupling angle (in units of pi) to the canonical key grid.

    Sweep grids produced by different arithmetic (linspace, start + i*step,
    CSV round-trip) must agree bit-for-bit on which cell they address, so
    every angle entering the package is rounded to 12 decimals once.
    """
    t = round(float(theta_over_pi), THETA_DECIMALS)
    return t + 0.0  # normalize -0.0


def reduce_turn(theta_over_pi: float) -> float:
    """Fold an angle in units of pi into [-1, 1) and re-snap to the key grid.

    fmod and the +-2 shift are exact in floating point for moderate angles,
    and the final rounding absorbs the shift's last-ulp wobble, so angles a
    whole number of turns apart reduce to bitwise-identical values.
    """
    r = math.fmod(float(theta_over_pi), 2.0)
    if r >= 1.0:
        r -= 2.0
    elif r < -1.0:
        r += 2.0
    return canonical_theta(r)


@dataclass(frozen=True)
class LadderParams:
    """Ladder size plus coupling angle, with derived exchange strengths.

    theta_over_pi is the canonical representation; the trigonometric
    couplings are evaluated on the angle folded into [-1, 1) so that angles
    a full turn apart produce bitwise-identical J and K.
    """

    L: int
    theta_over_pi: float

    def __post_init__(self):
        check_length(self.L)
        object.__setattr__(self, "theta_over_pi", canonical_theta(self.theta_over_pi))

    @property
    def theta(self) -> float:
        return math.pi * self.theta_over_pi

    @cached_property
    def j_coupling(self) -> float:
        return math.cos(math.pi * reduce_turn(self.theta_over_pi))

    @cached_property
    def k_coupling(self) -> float:
        return math.sin(math.pi * reduce_turn(self.theta_over_pi))


def exchange_bonds(L: int) -> list[tuple[int, int]]:
    """Bit-position pairs of all 3L two-spin bonds: rungs, then both legs."""
    check_length(L)
    bonds = []
    for i in range(L):
        bonds.append((2 * i, 2 * i + 1))
    for i in range(L):
        j = (i + 1) % L
        bonds.append((2 * i, 2 * j))
    for i in range(L):
        j = (i + 1) % L
        bonds.append((2 * i + 1, 2 * j + 1))
    return bonds


def plaquette_sites(L: int) -> list[tuple[int, int, int, int]]:
    """Bit positions (a, b, c, d) of each plaquette in cyclic order
    (u,i), (u,i+1), (d,i+1), (d,i)."""
    check_length(L)
    plaqs = []
    for i in range(L):
        j = (i + 1) % L
        plaqs.append((2 * i, 2 * j, 2 * j + 1, 2 * i + 1))
    return plaqs


def ring_permute(states: np.ndarray, sites: tuple[int, int, int, int], inverse: bool = False) -> np.ndarray:
    """Apply the plaquette permutation to packed states.

    Forward: the value at a moves to b, b to c, c to d, d to a.
    """
    a, b, c, d = sites
    s = np.asarray(states, dtype=np.int64)
    one = np.int64(1)
    va = (s >> np.int64(a)) & one
    vb = (s >> np.int64(b)) & one
    vc = (s >> np.int64(c)) & one
    vd = (s >> np.int64(d)) & one
    mask = np.int64((1 << a) | (1 << b) | (1 << c) | (1 << d))
    base = s & ~mask
    if inverse:
        new_a, new_b, new_c, new_d = vb, vc, vd, va
    else:
        new_a, new_b, new_c, new_d = vd, va, vb, vc
    return (
        base
        | (new_a << np.int64(a))
        | (new_b << np.int64(b))
        | (new_c << np.int64(c))
        | (new_d << np.int64(d))
    )


class SectorKernel:
    """Precomputed matrix-free action of H on one magnetization sector.

    The stored arrays encode the theta-independent structure:

    diag        0.25 * (number of aligned bonds - number of anti-aligned
                bonds) per basis state; multiplied by J at apply time.
    flip pairs  for each bond, index pairs (lo, hi) of configurations mapped
                into each other by flipping that bond's two anti-aligned
                spins; each unordered pair stored once.
    ring maps   for each plaquette, g with g[i] = index of P^-1(state_i), so
                (P v)[i] = v[g[i]] and scattering v into g applies P^-1.
    """

    def __init__(self, basis: SectorBasis):
        self.basis = basis
        self.L = basis.L
        self.dim = basis.dim
        states = basis.states

        acc = np.zeros(self.dim, dtype=np.int16)
        pair_lists = []
        for p, q in exchange_bonds(self.L):
            bp = basis.bit(p)
            bq = basis.bit(q)
            same = bp == bq
            acc += np.where(same, np.int16(1), np.int16(-1))
            differ = np.nonzero(~same)[0]
            partners = states[differ] ^ np.int64((1 << p) | (1 << q))
            keep = states[differ] < partners
            lo = differ[keep].astype(np.int32)
            hi = basis.rank(partners[keep]).astype(np.int32)
            pair_lists.append((lo, hi))
        self.diag = 0.25 * acc.astype(np.float64)
        self.flip_pairs = pair_lists

        ring_maps = []
        for sites in plaquette_sites(self.L):
            g = basis.rank(ring_permute(states, sites, inverse=True))
            ring_maps.append(g.astype(np.int32))
        self.ring_maps = ring_maps

    @property
    def nbytes(self) -> int:
        n = self.diag.nbytes
        for lo, hi in self.flip_pairs:
            n += lo.nbytes + hi.nbytes
        for g in self.ring_maps:
            n += g.nbytes
        return n

    def apply(self, vec: np.ndarray, j: float, k: float) -> np.ndarray:
        """y = H(j, k) @ vec without forming H."""
        v = np.asarray(vec, dtype=np.float64)
        if v.shape != (self.dim,):
            raise DomainError(
                "vector shape %r does not match sector dimension %d" % (v.shape, self.dim)
            )
        y = v * self.diag
        if j != 0.0:
            y *= j
            half = 0.5 * j
            for lo, hi in self.flip_pairs:
                t = v[hi]
                t *= half
                y[lo] += t
                t = v[lo]
                t *= half
                y[hi] += t
        else:
            y[:] = 0.0
        if k != 0.0:
            kv = k * v
            for g in self.ring_maps:
                y += kv[g]
                y[g] += kv
        return y

    def apply_params(self, vec: np.ndarray, params: LadderParams) -> np.ndarray:
        if params.L != self.L:
            raise DomainError("params built for L=%d, kernel for L=%d" % (params.L, self.L))
        return self.apply(vec, params.j_coupling, params.k_coupling)

    def energy_expectation(self, vec: np.ndarray, j: float, k: float) -> float:
        v = np.asarray(vec, dtype=np.float64)
        return float(v @ self.apply(v, j, k))

    def residual_norm(self, vec: np.ndarray, energy: float, j: float, k: float) -> float:
        v = np.asarray(vec, dtype=np.float64)
        r = self.apply(v, j, k)
        r -= energy * v
        return float(np.linalg.norm(r))

    def dense(self, j: float, k: float, limit: int = DENSE_LIMIT) -> np.ndarray:
        """Materialize the sector Hamiltonian; guarded by a size limit."""
        if self.dim > limit:
            raise CapacityError(
                "refusing to densify a %d-dimensional sector (limit %d)" % (self.dim, limit)
            )
        h = np.zeros((self.dim, self.dim), dtype=np.float64)
        h[np.arange(self.dim), np.arange(self.dim)] = j * self.diag
        for lo, hi in self.flip_pairs:
            h[lo, hi] += 0.5 * j
            h[hi, lo] += 0.5 * j
        idx = np.arange(self.dim)
        for g in self.ring_maps:
            h[idx, g] += k
            h[g, idx] += k
        return h


class KernelCache:
    """Byte-budgeted cache of sector kernels keyed by (L, n_up).

    Kernels are theta-independent, so a sweep touches each (L, n_up) once no
    matter how many coupling angles it visits.  Eviction is least-recently
    used; a single kernel larger than the budget is still built and simply
    not retained.
    """

    def __init__(self, max_bytes: int = 2 * 1024**3):
        self.max_bytes = int(max_bytes)
        self._store: dict[tuple[int, int], SectorKernel] = {}

    def get(self, L: int, n_up: int) -> SectorKernel:
        key = (int(L), int(n_up))
        kernel = self._store.pop(key, None)
        if kernel is None:
            kernel = SectorKernel(get_basis(L, n_up))
        if kernel.nbytes <= self.max_bytes:
            self._store[key] = kernel
            self._shrink()
        return kernel

    def _shrink(self) -> None:
        total = sum(k.nbytes for k in self._store.values())
        while total > self.max_bytes and len(self._store) > 1:
            key = next(iter(self._store))
            total -= self._store.pop(key).nbytes

    def clear(self) -> None:
        self._store.clear()


_DEFAULT_KERNELS = KernelCache()


def get_kernel(L: int, n_up: int) -> SectorKernel:
    """Process-wide kernel cache used by the solver and sweep layers."""
    return _DEFAULT_KERNELS.get(L, n_up)
