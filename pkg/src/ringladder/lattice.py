"""Site indexing and magnetization-sector bases for the two-leg ladder.

The ladder has two legs ('u' and 'd') and L rungs with periodic boundary
conditions along the legs.  A classical configuration of the 2L spins is
packed into an integer: bit 2*(rung-1) holds the upper-leg spin of that rung,
bit 2*(rung-1)+1 the lower-leg spin, with bit value 1 meaning spin up.
Consecutive rungs therefore occupy consecutive bit pairs, so states of one
rung pair sit close together in the sorted basis and index gathers stay
cache-friendly.

The Hamiltonian conserves total magnetization, so all heavy work happens in
a fixed n_up sector.  The sector basis lists all C(2L, n_up) packed states in
ascending integer order, which for fixed popcount coincides with
colexicographic order of the set-bit positions.  That makes the rank of a
state available in closed form through the combinatorial number system:

    rank(s) = sum_j C(p_j, j)     p_1 < p_2 < ... are the set-bit positions

so the kernel can map a permuted state back to its basis index without any
searching.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import CapacityError, DomainError

LEGS = ("u", "d")

# Permutation index arrays are stored as int32, so a sector must be
# addressable by a signed 32-bit index and a packed state by int64.
MAX_BITS = 62
MAX_DIM = 2**31 - 1


def check_length(L: int) -> None:
    """Validate a ladder length, raising DomainError / CapacityError."""
    if not isinstance(L, (int, np.integer)):
        raise DomainError("ladder length must be an integer, got %r" % (L,))
    if L % 2 != 0:
        raise DomainError("ladder length must be even, got L=%d" % L)
    if L == 2:
        raise DomainError(
            "L=2 is rejected: with periodic legs the two plaquettes collapse "
            "onto the same pair of rungs and double-count every bond"
        )
    if L < 4:
        raise DomainError("ladder length must be at least 4, got L=%d" % L)
    if 2 * L > MAX_BITS:
        raise CapacityError(
            "2L=%d spin bits exceed the %d-bit packed-state width" % (2 * L, MAX_BITS)
        )


def site_index(leg: str, rung: int, L: int) -> int:
    """Bit position of site (leg, rung) with legs 'u'/'d' and rungs 1..L."""
    check_length(L)
    if leg not in LEGS:
        raise DomainError("leg must be 'u' or 'd', got %r" % (leg,))
    if not 1 <= rung <= L:
        raise DomainError("rung must lie in 1..%d, got %r" % (L, rung))
    return 2 * (rung - 1) + (0 if leg == "u" else 1)


def sector_of(state: int, L: int) -> int:
    """Total number of up spins (the conserved magnetization label)."""
    check_length(L)
    if not 0 <= state < (1 << (2 * L)):
        raise DomainError("state %r outside the 2L=%d bit range" % (state, 2 * L))
    return int(bin(int(state)).count("1"))


@lru_cache(maxsize=None)
def _binom_table(nmax: int) -> np.ndarray:
    """Pascal triangle C[n, k] for 0 <= k <= n <= nmax, int64."""
    c = np.zeros((nmax + 1, nmax + 2), dtype=np.int64)
    c[:, 0] = 1
    for n in range(1, nmax + 1):
        c[n, 1 : n + 1] = c[n - 1, : n] + c[n - 1, 1 : n + 1]
    return c


def _enumerate(bits: int, ones: int, memo: dict) -> np.ndarray:
    if ones == 0:
        return np.zeros(1, dtype=np.int64)
    if ones == bits:
        return np.array([(1 << bits) - 1], dtype=np.int64)
    key = (bits, ones)
    hit = memo.get(key)
    if hit is not None:
        return hit
    low = _enumerate(bits - 1, ones, memo)
    high = _enumerate(bits - 1, ones - 1, memo) | np.int64(1 << (bits - 1))
    out = np.concatenate([low, high])
    memo[key] = out
    return out


@dataclass(frozen=True, eq=False)
class SectorBasis:
    """All packed states of one magnetization sector, ascending.

    Attributes
    ----------
    L : ladder length (number of rungs).
    n_up : number of up spins, 0..2L.
    states : int64 array of packed configurations, strictly ascending.
    """

    L: int
    n_up: int
    states: np.ndarray
    _binom: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.states.shape[0]

    def rank(self, query: np.ndarray) -> np.ndarray:
        """Basis indices of packed states, via the combinatorial number system.

        Callers must pass states that belong to this sector; membership is
        not re-checked here because every internal producer (bond flips,
        plaquette permutations) preserves the up-spin count by construction.
        """
        q = np.asarray(query, dtype=np.int64)
        idx = np.zeros(q.shape, dtype=np.int64)
        seen = np.zeros(q.shape, dtype=np.int64)
        for p in range(2 * self.L):
            bit = (q >> np.int64(p)) & np.int64(1)
            seen += bit
            idx += bit * self._binom[p, seen]
        return idx

    def bit(self, position: int) -> np.ndarray:
        """Value (0/1) of one bit across the whole basis."""
        return ((self.states >> np.int64(position)) & np.int64(1)).astype(np.int8)


def enumerate_sector(L: int, n_up: int) -> SectorBasis:
    """Build the sorted basis of the n_up sector.

    Uses the bit-recursive construction
        E(b, k) = E(b-1, k) ++ (E(b-1, k-1) | 2^(b-1))
    whose two halves are each sorted and separated by the top bit, so the
    result is ascending without any sort.
    """
    check_length(L)
    bits = 2 * L
    if not 0 <= n_up <= bits:
        raise DomainError("n_up must lie in 0..%d, got %r" % (bits, n_up))
    binom = _binom_table(bits)
    dim = int(binom[bits, n_up])
    if dim > MAX_DIM:
        raise CapacityError(
            "sector dimension %d exceeds the int32 index range" % dim
        )
    states = _enumerate(bits, n_up, {})
    states.setflags(write=False)
    return SectorBasis(L=int(L), n_up=int(n_up), states=states, _binom=binom)


_BASIS_CACHE: dict[tuple[int, int], SectorBasis] = {}


def get_basis(L: int, n_up: int) -> SectorBasis:
    """Memoized enumerate_sector; bases are immutable and shared freely."""
    key = (int(L), int(n_up))
    basis = _BASIS_CACHE.get(key)
    if basis is None:
        basis = enumerate_sector(L, n_up)
        _BASIS_CACHE[key] = basis
    return basis
