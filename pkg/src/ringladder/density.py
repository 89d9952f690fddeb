"""Two-spin reduced density matrices of sector-resident eigenstates.

For a pure state living in one magnetization sector, tracing out all but
two sites never produces coherence between |up,up> and |down,down>: those
local configurations belong to different total-spin counts of the traced
complement.  The reduced matrix is therefore automatically of X shape in
the basis (|uu>, |ud>, |du>, |dd>),

        [ u  .  .  w ]
        [ .  x  z  . ]          z = <ud| rho |du>,  w = <uu| rho |dd>,
        [ .  z* y  . ]          with w identically 0 for sector states
        [ w* .  .  v ]

and the trace runs in one pass over the sector basis: diagonal entries are
binned squared amplitudes, the z coherence pairs each |..up,down..>
configuration with its bond-flipped partner through the closed-form rank.
Averaging the reduced matrices of a degenerate multiplet (mixing, not
superposing) preserves the X shape.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, PreconditionError, XFormViolationError
from .eigensolver import SpectrumSlice
from .lattice import SectorBasis, check_length

BOND_KINDS = ("rung", "leg", "diag")
X_FORM_TOL = 1e-9


def bond_sites(bond: str, L: int, rung: int = 1) -> tuple[int, int]:
    """Bit positions of a bond's two sites; the first is the first tensor
    factor of the reduced matrix.

    rung: the two sites of one rung, (u,i) then (d,i).
    leg:  nearest neighbors along the upper leg, (u,i) then (u,i+1).
    diag: the plaquette diagonal, (u,i) then (d,i+1).
    """
    check_length(L)
    if bond not in BOND_KINDS:
        raise DomainError("bond must be one of %s, got %r" % (BOND_KINDS, bond))
    if not 1 <= rung <= L:
        raise DomainError("rung must lie in 1..%d, got %r" % (L, rung))
    i = rung - 1
    nxt = (i + 1) % L
    if bond == "rung":
        return (2 * i, 2 * i + 1)
    if bond == "leg":
        return (2 * i, 2 * nxt)
    return (2 * i, 2 * nxt + 1)


def partial_trace_two(vector: np.ndarray, basis: SectorBasis,
                      sites: tuple[int, int]) -> np.ndarray:
    """4x4 reduced density matrix of two sites for a sector-resident state.

    Basis order (uu, ud, du, dd) with the first listed site first; bit
    value 1 is spin up, so the local index of a configuration is
    2*(1-bit1) + (1-bit2).
    """
    p, q = sites
    if p == q:
        raise DomainError("the two sites of a bond must differ, got %r" % (sites,))
    v = np.asarray(vector, dtype=np.float64)
    if v.shape != (basis.dim,):
        raise DomainError(
            "vector shape %r does not match sector dimension %d" % (v.shape, basis.dim)
        )
    b1 = basis.bit(p).astype(np.int64)
    b2 = basis.bit(q).astype(np.int64)
    loc = 2 * (1 - b1) + (1 - b2)
    rho = np.zeros((4, 4))
    rho[np.arange(4), np.arange(4)] = np.bincount(loc, weights=v * v, minlength=4)
    up_down = np.nonzero(loc == 1)[0]
    if up_down.size:
        partners = basis.states[up_down] ^ np.int64((1 << p) | (1 << q))
        z = float(np.dot(v[up_down], v[basis.rank(partners)]))
        rho[1, 2] = rho[2, 1] = z
    return rho


def level_density(spectrum: SpectrumSlice, level: int, bond: str,
                  rung: int = 1) -> np.ndarray:
    """Reduced matrix of one degeneracy level on one bond.

    Under the min-abs-sz and max-polarized policies this is the reduced
    matrix of the group's representative member; under the average policy
    it is the equal-weight mixture over every retained group member.
    """
    from .lattice import get_basis

    L = spectrum.params.L
    sites = bond_sites(bond, L, rung)
    if spectrum.tiebreak == "average":
        members = spectrum.level_pairs(level)
        acc = np.zeros((4, 4))
        for pair in members:
            acc += partial_trace_two(np.asarray(pair.vector), get_basis(L, pair.n_up), sites)
        return acc / len(members)
    pair = spectrum.level_rep(level)
    return partial_trace_two(np.asarray(pair.vector), get_basis(L, pair.n_up), sites)


def validate_density(rho: np.ndarray, herm_tol: float = 1e-12,
                     trace_tol: float = 1e-10, psd_tol: float = 1e-12) -> np.ndarray:
    """Check hermiticity, unit trace and positivity; returns rho as complex."""
    m = np.asarray(rho)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] not in (2, 4):
        raise PreconditionError("density matrix must be 2x2 or 4x4, got shape %r" % (m.shape,))
    m = m.astype(complex)
    herm = np.max(np.abs(m - m.conj().T))
    if herm > herm_tol:
        raise PreconditionError("matrix is not hermitian: deviation %.3e" % herm)
    tr = m.trace()
    if abs(tr - 1.0) > trace_tol:
        raise PreconditionError("trace deviates from 1 by %.3e" % abs(tr - 1.0))
    lo = float(np.min(np.linalg.eigvalsh(0.5 * (m + m.conj().T))))
    if lo < -psd_tol:
        raise PreconditionError("negative eigenvalue %.3e below tolerance" % lo)
    return m


@dataclass(frozen=True)
class TwoQubitX:
    """X-shaped two-qubit density matrix in the (uu, ud, du, dd) basis.

    u, x, y, v are the diagonal populations in that order; z is the
    (ud, du) coherence and w the (uu, dd) coherence, both real here since
    every producer in this package yields real matrices.
    """

    u: float
    x: float
    y: float
    v: float
    z: float
    w: float

    def to_matrix(self) -> np.ndarray:
        return np.array([
            [self.u, 0.0, 0.0, self.w],
            [0.0, self.x, self.z, 0.0],
            [0.0, self.z, self.y, 0.0],
            [self.w, 0.0, 0.0, self.v],
        ])

    @property
    def marginal_a(self) -> np.ndarray:
        return np.diag([self.u + self.x, self.y + self.v])

    @property
    def marginal_b(self) -> np.ndarray:
        return np.diag([self.u + self.y, self.x + self.v])


def to_x_form(rho: np.ndarray, tol: float = X_FORM_TOL) -> TwoQubitX:
    """Validate a 4x4 density matrix and extract its X parameters.

    Entries outside the X sparsity pattern (or imaginary parts on it) must
    vanish to within tol; the largest violator is reported otherwise.
    """
    m = validate_density(rho)
    if m.shape != (4, 4):
        raise PreconditionError("X form is defined for 4x4 matrices, got %r" % (m.shape,))
    pattern = np.zeros((4, 4), dtype=bool)
    pattern[np.arange(4), np.arange(4)] = True
    pattern[0, 3] = pattern[3, 0] = pattern[1, 2] = pattern[2, 1] = True
    off = np.max(np.abs(m[~pattern])) if np.any(~pattern) else 0.0
    imag = np.max(np.abs(m[pattern].imag))
    worst = max(float(off), float(imag))
    if worst > tol:
        raise XFormViolationError(worst, tol)
    return TwoQubitX(
        u=float(m[0, 0].real), x=float(m[1, 1].real),
        y=float(m[2, 2].real), v=float(m[3, 3].real),
        z=float(m[1, 2].real), w=float(m[0, 3].real),
    )
