"""Low-lying eigenpairs of the ladder Hamiltonian, sector by sector.

The solver walks the magnetization sectors n_up = L .. 2L, takes the k
lowest eigenpairs of each with an implicitly restarted Lanczos iteration
(dense diagonalization below a size threshold), and reflects every
n_up > L pair into the complementary sector: complementing all spin bits
reverses the sorted basis order, so the mirrored eigenvector is just the
reversed array, shared as a zero-copy view.

The retained pairs are then clustered into degeneracy groups.  Two energies
within eps_deg of each other belong to one group, and a "level" everywhere
in this package means such a group, not an individual eigenvector.  The
returned SpectrumSlice keeps the group structure explicit so downstream
consumers can either pick a representative member (tie-break rules below)
or average over the whole group.

Eigenvectors can be cached on disk between runs; the binary format is
documented in VectorCache.
"""

from __future__ import annotations

import math
import os
import struct
import tempfile
import zlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.linalg
import scipy.sparse.linalg

from .errors import ConvergenceError, DomainError
from .hamiltonian import DENSE_LIMIT, LadderParams, SectorKernel, get_kernel

EPS_DEG = 1e-8
LANCZOS_TOL = 1e-10
MAX_ITER = 10000
TIEBREAKS = ("min-abs-sz", "max-polarized", "average")


@dataclass
class EigenPair:
    """One eigenvector with its energy, sector label and solve residual."""

    energy: float
    vector: np.ndarray
    n_up: int | None
    residual: float
    mirrored: bool = False


def _canonical_sign(vec: np.ndarray) -> np.ndarray:
    i = int(np.argmax(np.abs(vec)))
    return -vec if vec[i] < 0 else vec


def _measure(apply, vec):
    """Rayleigh-quotient energy and residual norm of a candidate vector.

    Both the fresh-solve and the cache-hit paths report energies through
    this one routine, so a warm cache reproduces a cold run bit for bit.
    """
    hv = apply(vec)
    e = float(vec @ hv)
    hv -= e * vec
    return e, float(np.linalg.norm(hv))


def lanczos_lowest(apply, dim, k=2, tol=LANCZOS_TOL, seed=0, ncv=None,
                   maxiter=MAX_ITER, dense=None, dense_limit=DENSE_LIMIT):
    """k lowest eigenpairs of a symmetric operator given only its action.

    Below dense_limit the operator is materialized and solved exactly;
    `dense` may supply a ready matrix (or a callable producing one) to skip
    the column-by-column reconstruction.  Above the limit ARPACK's
    implicitly restarted Lanczos runs with a seeded start vector, so repeat
    solves are deterministic.  Residual norms |H v - E v| are computed for
    every returned pair.  Returns a list of EigenPair with n_up unset.
    """
    if dim < 1:
        raise DomainError("operator dimension must be positive, got %d" % dim)
    k_eff = min(int(k), dim)
    if dim <= dense_limit or k_eff >= dim:
        if dense is None:
            h = np.empty((dim, dim))
            e = np.zeros(dim)
            for col in range(dim):
                e[col] = 1.0
                h[:, col] = apply(e)
                e[col] = 0.0
        else:
            h = dense() if callable(dense) else np.asarray(dense)
        vals, vecs = scipy.linalg.eigh(h, subset_by_index=[0, k_eff - 1])
    else:
        rng = np.random.default_rng(seed)
        v0 = rng.standard_normal(dim)
        v0 /= np.linalg.norm(v0)
        op = scipy.sparse.linalg.LinearOperator(
            (dim, dim), matvec=apply, dtype=np.float64
        )
        ncv_eff = min(dim, max(k_eff + 2, 32 if ncv is None else int(ncv)))
        try:
            vals, vecs = scipy.sparse.linalg.eigsh(
                op, k=k_eff, which="SA", v0=v0, ncv=ncv_eff,
                maxiter=maxiter, tol=tol,
            )
        except scipy.sparse.linalg.ArpackNoConvergence as exc:
            residual = None
            if getattr(exc, "eigenvectors", None) is not None and exc.eigenvectors.size:
                v = exc.eigenvectors[:, 0]
                e = float(exc.eigenvalues[0])
                residual = float(np.linalg.norm(apply(v) - e * v))
            raise ConvergenceError(
                "Lanczos failed to converge %d eigenpairs of a %d-dimensional "
                "operator within %d restarts" % (k_eff, dim, maxiter),
                residual=residual,
            ) from exc
    order = np.argsort(vals)
    pairs = []
    for i in order:
        v = _canonical_sign(np.ascontiguousarray(vecs[:, i]))
        e, r = _measure(apply, v)
        pairs.append(EigenPair(energy=e, vector=v, n_up=None, residual=r))
    pairs.sort(key=lambda p: p.energy)
    return pairs


class VectorCache:
    """On-disk eigenvector store, one file per (L, theta, n_up, level).

    File layout, little endian throughout:

        bytes 0:4    magic "RLAD"
        u32          format version (1)
        u32          L
        f64          theta in radians
        u32          n_up
        u32          level index within the sector solve (0 = lowest)
        u64          vector length
        f64[dim]     eigenvector components
        u32          CRC-32 of everything above

    Readers verify the magic, version, every header field and the checksum;
    any mismatch or truncation is treated as a cache miss, never an error.
    Writes go through a temporary file and an atomic rename.  Energies are
    not stored; they are recomputed from one operator application on load.
    """

    MAGIC = b"RLAD"
    VERSION = 1
    _HEADER = struct.Struct("<4sIIdIIQ")

    def __init__(self, root: str | os.PathLike):
        self.root = Path(root)

    def _path(self, L: int, theta_over_pi: float, n_up: int, level: int) -> Path:
        name = "t%+.12f_n%02d_lv%d.rlad" % (theta_over_pi, n_up, level)
        return self.root / ("L%02d" % L) / name

    def load(self, params: LadderParams, n_up: int, level: int) -> np.ndarray | None:
        path = self._path(params.L, params.theta_over_pi, n_up, level)
        try:
            blob = path.read_bytes()
        except OSError:
            return None
        head = self._HEADER.size
        if len(blob) < head + 4:
            return None
        magic, version, L, theta, nu, lv, dim = self._HEADER.unpack_from(blob)
        if (magic, version) != (self.MAGIC, self.VERSION):
            return None
        if L != params.L or theta != params.theta or nu != n_up or lv != level:
            return None
        if len(blob) != head + 8 * dim + 4:
            return None
        (crc,) = struct.unpack_from("<I", blob, head + 8 * dim)
        if zlib.crc32(blob[: head + 8 * dim]) != crc:
            return None
        vec = np.frombuffer(blob, dtype="<f8", count=dim, offset=head)
        return np.ascontiguousarray(vec)

    def store(self, params: LadderParams, n_up: int, level: int, vector: np.ndarray) -> None:
        path = self._path(params.L, params.theta_over_pi, n_up, level)
        path.parent.mkdir(parents=True, exist_ok=True)
        payload = np.ascontiguousarray(vector, dtype="<f8").tobytes()
        head = self._HEADER.pack(
            self.MAGIC, self.VERSION, params.L, params.theta,
            n_up, level, len(vector),
        )
        blob = head + payload
        blob += struct.pack("<I", zlib.crc32(blob))
        fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
        try:
            with os.fdopen(fd, "wb") as fh:
                fh.write(blob)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise


def resolve_cache_dir(explicit=None):
    """The RING_LADDER_CACHE environment variable, else the explicit path.

    The environment wins so an operator can redirect every run on a host
    without touching individual invocations.
    """
    env = os.environ.get("RING_LADDER_CACHE", "").strip()
    if env:
        return Path(env)
    return Path(explicit) if explicit else None


def solve_sector(params: LadderParams, n_up: int, k=2, tol=LANCZOS_TOL, seed=0,
                 ncv=None, cache: VectorCache | None = None,
                 kernel: SectorKernel | None = None,
                 dense_limit=DENSE_LIMIT) -> list[EigenPair]:
    """k lowest pairs of one magnetization sector, cache-aware."""
    if kernel is None:
        kernel = get_kernel(params.L, n_up)
    j, kk = params.j_coupling, params.k_coupling
    k_eff = min(int(k), kernel.dim)

    if cache is not None:
        vectors = [cache.load(params, n_up, lv) for lv in range(k_eff)]
        if all(v is not None and v.shape == (kernel.dim,) for v in vectors):
            pairs = []
            for v in vectors:
                e, r = _measure(lambda u: kernel.apply(u, j, kk), v)
                pairs.append(EigenPair(energy=e, vector=v, n_up=n_up, residual=r))
            pairs.sort(key=lambda p: p.energy)
            return pairs

    pairs = lanczos_lowest(
        lambda v: kernel.apply(v, j, kk), kernel.dim, k=k_eff, tol=tol,
        seed=seed, ncv=ncv, dense=lambda: kernel.dense(j, kk, limit=dense_limit),
        dense_limit=dense_limit,
    )
    for p in pairs:
        p.n_up = n_up
    if cache is not None:
        for lv, p in enumerate(pairs):
            cache.store(params, n_up, lv, p.vector)
    return pairs


@dataclass
class SpectrumSlice:
    """Low-lying pairs of one (L, theta) point with degeneracy grouping.

    groups[j] lists indices into pairs; group 0 is the ground level.  Group
    membership is computed from the retained pairs only (k per scanned
    sector plus mirrors), so multiplicities are lower bounds when a level
    is more degenerate than k allows a single sector to reveal.
    """

    params: LadderParams
    pairs: list[EigenPair]
    groups: list[list[int]]
    eps_deg: float
    tiebreak: str
    seed: int = 0
    k_per_sector: int = 2

    @property
    def n_levels(self) -> int:
        return len(self.groups)

    def level_pairs(self, level: int) -> list[EigenPair]:
        return [self.pairs[i] for i in self.groups[level]]

    def level_energy(self, level: int) -> float:
        members = self.level_pairs(level)
        return sum(p.energy for p in members) / len(members)

    def multiplicity(self, level: int) -> int:
        return len(self.groups[level])

    def degenerate(self, level: int) -> bool:
        return self.multiplicity(level) > 1

    def level_rep(self, level: int) -> EigenPair:
        """Representative member of a degeneracy group.

        min-abs-sz picks the member closest to zero magnetization (larger
        n_up on a tie); max-polarized picks the largest n_up.  The average
        policy has no single representative; density-matrix consumers must
        call level_pairs and average, but for energy reporting the
        min-abs-sz member is returned.
        """
        members = self.level_pairs(level)
        L = self.params.L
        if self.tiebreak == "max-polarized":
            return max(members, key=lambda p: p.n_up)
        return min(members, key=lambda p: (abs(p.n_up - L), -p.n_up))


def two_lowest_states(params: LadderParams, k=2, tol=LANCZOS_TOL, seed=0,
                      ncv=None, eps_deg=EPS_DEG, tiebreak="min-abs-sz",
                      cache: VectorCache | None = None,
                      dense_limit=DENSE_LIMIT) -> SpectrumSlice:
    """Ground and low excited levels across all magnetization sectors.

    Scans n_up = L .. 2L, mirrors each pair into the 2L - n_up sector by
    spin-flip symmetry (a reversed view, no copy), sorts everything by
    energy and clusters into degeneracy groups of width eps_deg.
    """
    if tiebreak not in TIEBREAKS:
        raise DomainError("unknown tie-break policy %r" % (tiebreak,))
    L = params.L
    pairs: list[EigenPair] = []
    for n_up in range(L, 2 * L + 1):
        sector_pairs = solve_sector(
            params, n_up, k=k, tol=tol, seed=seed, ncv=ncv,
            cache=cache, dense_limit=dense_limit,
        )
        for p in sector_pairs:
            pairs.append(p)
            if n_up != L:
                pairs.append(EigenPair(
                    energy=p.energy, vector=p.vector[::-1],
                    n_up=2 * L - n_up, residual=p.residual, mirrored=True,
                ))
    order = sorted(range(len(pairs)), key=lambda i: pairs[i].energy)
    groups: list[list[int]] = []
    last_energy = None
    for i in order:
        e = pairs[i].energy
        if last_energy is None or e - last_energy >= eps_deg:
            groups.append([i])
        else:
            groups[-1].append(i)
        last_energy = e
    return SpectrumSlice(
        params=params, pairs=pairs, groups=groups, eps_deg=eps_deg,
        tiebreak=tiebreak, seed=seed, k_per_sector=k,
    )
