"""Coupling sweeps and the phase-boundary detectors built on them.

A sweep solves the two lowest degeneracy levels at every (theta, L) cell of
a grid, reduces each level onto the requested bonds and tabulates the
correlation measures.  Four detectors then read the assembled table:

* size_effect / detect_sb_region: the odd-even criterion.  q_L(theta) =
  |Q_L - Q_{L-2}| of the ground-level rung discord stays tiny where the
  ground state is size-insensitive and jumps by orders of magnitude where
  the two lowest levels cross as a function of L; the grid points where
  q_L first and last exceed a threshold delta bracket that symmetry-broken
  window.  The lower edge is an upper bound on the true boundary and the
  upper edge a lower bound.
* detect_first_order: discord discontinuities, flagged where an adjacent-
  cell jump exceeds a factor times the median jump in a window.
* detect_extremum: a size-independent interior extremum located by the
  discrete second difference per L and required to agree across sizes.
* odd_even_report: the raw two-level data (energies, discords, sectors)
  across L at fixed theta, plus a heuristic alternation flag.

Records are keyed by (theta_over_pi, L, bond, level); level always means a
degeneracy group of the spectrum, never a bare eigenvector index.
"""

from __future__ import annotations

import logging
import math
import multiprocessing
from dataclasses import dataclass, field

import numpy as np

from .density import BOND_KINDS, bond_sites, level_density, to_x_form
from .eigensolver import (
    EPS_DEG,
    LANCZOS_TOL,
    TIEBREAKS,
    VectorCache,
    two_lowest_states,
)
from .errors import (
    CellLookupError,
    ConvergenceError,
    CoverageError,
    DomainError,
)
from .hamiltonian import DENSE_LIMIT, LadderParams, canonical_theta
from .lattice import check_length
from .measures import correlation_record, discord_audit

log = logging.getLogger("ringladder.sweep")

DEFAULT_DELTA = 1e-4
DEFAULT_STEP = 0.01
JUMP_FACTOR = 10.0
JUMP_WINDOW = 0.05
# Adjacent-difference floor for the jump detector: far below any physical
# discontinuity, above eigensolver noise, so flat phases cannot alias a
# zero median into spurious flags.
JUMP_FLOOR = 1e-8


def theta_range(start: float, stop: float, step: float) -> list[float]:
    """Inclusive uniform grid in units of pi, canonically rounded."""
    if step <= 0:
        raise DomainError("grid step must be positive, got %r" % (step,))
    if stop < start:
        raise DomainError("grid stop %r below start %r" % (stop, start))
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [canonical_theta(start + i * step) for i in range(n)]


@dataclass(frozen=True)
class SweepConfig:
    """Grid description: which cells to solve and what to tabulate."""

    theta_grid: tuple[float, ...]
    L_list: tuple[int, ...]
    bonds: tuple[str, ...] = ("rung",)
    levels: int = 2
    delta: float = DEFAULT_DELTA

    def __post_init__(self):
        grid = tuple(canonical_theta(t) for t in self.theta_grid)
        object.__setattr__(self, "theta_grid", grid)
        if any(b - a <= 0 for a, b in zip(grid, grid[1:])):
            raise DomainError("theta grid must be strictly increasing")
        ls = tuple(int(x) for x in self.L_list)
        object.__setattr__(self, "L_list", ls)
        for L in ls:
            check_length(L)
        if any(b - a <= 0 for a, b in zip(ls, ls[1:])):
            raise DomainError("L list must be strictly increasing")
        bonds = tuple(self.bonds)
        object.__setattr__(self, "bonds", bonds)
        for b in bonds:
            if b not in BOND_KINDS:
                raise DomainError("unknown bond kind %r" % (b,))
        if not bonds:
            raise DomainError("at least one bond kind is required")
        if self.levels < 1:
            raise DomainError("levels must be >= 1, got %r" % (self.levels,))
        if self.delta <= 0:
            raise DomainError("delta must be positive, got %r" % (self.delta,))


@dataclass(frozen=True)
class RunOptions:
    """Execution knobs of a sweep, orthogonal to what is being computed."""

    cache_dir: str | None = None
    workers: int = 1
    seed: int = 0
    tol: float = LANCZOS_TOL
    eps_deg: float = EPS_DEG
    tiebreak: str = "min-abs-sz"
    oracle: bool = False
    oracle_grid: int = 64
    dense_limit: int = DENSE_LIMIT

    def __post_init__(self):
        if self.workers < 1:
            raise DomainError("worker count must be >= 1")
        if self.tol <= 0 or self.eps_deg <= 0:
            raise DomainError("tolerances must be positive")
        if self.tiebreak not in TIEBREAKS:
            raise DomainError("unknown tie-break policy %r" % (self.tiebreak,))


@dataclass(frozen=True)
class SweepRecord:
    """One row of the result table; field order mirrors the CSV schema."""

    theta_over_pi: float
    L: int
    bond: str
    level: int
    n_up: int
    energy: float
    discord: float
    classical_corr: float
    mutual_info: float
    concurrence: float
    entropy_ab: float
    degenerate: bool


class SweepTable:
    """Append-only store of sweep records plus per-cell failure notes."""

    def __init__(self, bonds=("rung",), levels=2):
        self.bonds = tuple(bonds)
        self.levels = int(levels)
        self.records: dict[tuple[float, int, str, int], SweepRecord] = {}
        self.invalid: dict[tuple[float, int], str] = {}

    def add(self, rec: SweepRecord) -> None:
        key = (rec.theta_over_pi, rec.L, rec.bond, rec.level)
        self.records[key] = rec

    def mark_invalid(self, theta_over_pi: float, L: int, reason: str) -> None:
        self.invalid[(canonical_theta(theta_over_pi), int(L))] = reason

    def record(self, theta_over_pi: float, L: int, bond: str = "rung",
               level: int = 0) -> SweepRecord:
        key = (canonical_theta(theta_over_pi), int(L), bond, int(level))
        try:
            return self.records[key]
        except KeyError:
            raise CellLookupError(
                "no record at theta/pi=%r L=%d bond=%s level=%d" % key
            ) from None

    def discord(self, theta_over_pi: float, L: int, bond: str = "rung",
                level: int = 0) -> float:
        return self.record(theta_over_pi, L, bond, level).discord

    def has(self, theta_over_pi: float, L: int, bond: str = "rung",
            level: int = 0) -> bool:
        key = (canonical_theta(theta_over_pi), int(L), bond, int(level))
        return key in self.records

    def thetas(self, L: int, bond: str = "rung", level: int = 0) -> list[float]:
        out = sorted({t for (t, ell, b, lv) in self.records
                      if ell == L and b == bond and lv == level})
        return out

    def sizes(self) -> list[int]:
        return sorted({ell for (_, ell, _, _) in self.records})

    def merge(self, other: "SweepTable") -> "SweepTable":
        """Union of two tables; on key collisions the other table wins."""
        out = SweepTable(bonds=self.bonds, levels=max(self.levels, other.levels))
        out.records.update(self.records)
        out.records.update(other.records)
        out.invalid.update(self.invalid)
        out.invalid.update(other.invalid)
        merged_bonds = list(self.bonds) + [b for b in other.bonds if b not in self.bonds]
        out.bonds = tuple(merged_bonds)
        return out

    def __len__(self) -> int:
        return len(self.records)


def solve_cell(theta_over_pi: float, L: int, bonds=("rung",), levels: int = 2,
               options: RunOptions = RunOptions()) -> tuple[list[SweepRecord], str | None]:
    """Solve one (theta, L) cell and reduce it to table records.

    Returns (records, error); solver non-convergence is reported as the
    error string with no records, so sweeps can continue past bad cells.
    """
    params = LadderParams(L=L, theta_over_pi=theta_over_pi)
    cache = VectorCache(options.cache_dir) if options.cache_dir else None
    try:
        spectrum = two_lowest_states(
            params, k=levels, tol=options.tol, seed=options.seed,
            eps_deg=options.eps_deg, tiebreak=options.tiebreak,
            cache=cache, dense_limit=options.dense_limit,
        )
    except ConvergenceError as exc:
        return [], "convergence failure: %s" % exc
    if spectrum.n_levels < levels:
        return [], "only %d of %d levels resolved" % (spectrum.n_levels, levels)
    records = []
    for level in range(levels):
        rep = spectrum.level_rep(level)
        for bond in bonds:
            rho = level_density(spectrum, level, bond)
            x = to_x_form(rho)
            rec = correlation_record(x)
            if options.oracle:
                closed, brute, gap = discord_audit(x, grid_n=options.oracle_grid)
                if gap > 1e-6:
                    log.warning(
                        "closed-form/oracle discord gap %.3e at theta/pi=%s L=%d "
                        "bond=%s level=%d (closed=%.12f oracle=%.12f state=%s)",
                        gap, params.theta_over_pi, L, bond, level, closed, brute, x,
                    )
            records.append(SweepRecord(
                theta_over_pi=params.theta_over_pi, L=L, bond=bond, level=level,
                n_up=int(rep.n_up), energy=spectrum.level_energy(level),
                discord=rec.discord, classical_corr=rec.classical_corr,
                mutual_info=rec.mutual_info, concurrence=rec.concurrence,
                entropy_ab=rec.entropy_ab, degenerate=spectrum.degenerate(level),
            ))
    return records, None


def _cell_task(args):
    theta_over_pi, L, bonds, levels, options = args
    records, error = solve_cell(theta_over_pi, L, bonds, levels, options)
    return theta_over_pi, L, records, error


def run_sweep(config: SweepConfig, options: RunOptions = RunOptions()) -> SweepTable:
    """Fill a SweepTable over the config grid; resumable via the cache."""
    table = SweepTable(bonds=config.bonds, levels=config.levels)
    tasks = [
        (t, L, config.bonds, config.levels, options)
        for L in config.L_list for t in config.theta_grid
    ]
    if not tasks:
        return table
    if options.workers > 1:
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(options.workers) as pool:
            results = pool.imap_unordered(_cell_task, tasks, chunksize=1)
            for t, L, records, error in results:
                _absorb(table, t, L, records, error)
    else:
        for task in tasks:
            t, L, records, error = _cell_task(task)
            _absorb(table, t, L, records, error)
    return table


def _absorb(table, t, L, records, error):
    if error is not None:
        table.mark_invalid(t, L, error)
        log.warning("cell theta/pi=%s L=%d marked invalid: %s", t, L, error)
        return
    for rec in records:
        table.add(rec)
    log.info("cell theta/pi=%s L=%d done (E0=%.12f)", t, L, records[0].energy)


def size_effect(table: SweepTable, theta_over_pi: float, L: int,
                bond: str = "rung") -> float:
    """q_L(theta) = |Q_L - Q_{L-2}| of the ground-level discord."""
    q_big = table.discord(theta_over_pi, L, bond, 0)
    q_small = table.discord(theta_over_pi, L - 2, bond, 0)
    return abs(q_big - q_small)


def _uniform_grid(table: SweepTable, L: int, bond: str, lo: float, hi: float):
    thetas = [t for t in table.thetas(L, bond) if lo - 1e-12 <= t <= hi + 1e-12]
    if len(thetas) < 3:
        raise CoverageError(
            "table holds %d grid points for L=%d in [%s, %s]; need >= 3"
            % (len(thetas), L, lo, hi)
        )
    steps = np.diff(thetas)
    step = float(steps[0])
    if np.max(np.abs(steps - step)) > 1e-9:
        raise CoverageError("theta grid for L=%d is not uniform" % L)
    if thetas[0] > lo + step / 2 or thetas[-1] < hi - step / 2:
        raise CoverageError(
            "grid [%s, %s] for L=%d does not cover [%s, %s]"
            % (thetas[0], thetas[-1], L, lo, hi)
        )
    return thetas, step


def detect_sb_region(table: SweepTable, L: int, delta: float = DEFAULT_DELTA,
                     bond: str = "rung", lo: float = 0.0, hi: float = 0.5):
    """Support of q_L > delta on the [lo, hi] grid (units of pi).

    Returns (theta_low, theta_high, step): the first and last grid angles
    whose size effect exceeds delta, or (None, None, step) when the
    threshold is never crossed.  Missing (theta, L) or (theta, L-2) cells
    raise a coverage error naming the gap.
    """
    thetas, step = _uniform_grid(table, L, bond, lo, hi)
    missing = [t for t in thetas if not table.has(t, L - 2, bond)]
    if missing:
        raise CoverageError(
            "L=%d requires the L=%d companion at %d grid points, first gaps: %s"
            % (L, L - 2, len(missing), missing[:4])
        )
    above = [t for t in thetas if size_effect(table, t, L, bond) > delta]
    if not above:
        return None, None, step
    return above[0], above[-1], step


def detect_first_order(table: SweepTable, L: int, bond: str = "rung",
                       factor: float = JUMP_FACTOR, window: float = JUMP_WINDOW,
                       floor: float = JUMP_FLOOR):
    """Discord discontinuities: adjacent jumps dominating their neighborhood.

    An adjacent-pair jump is flagged when it exceeds `factor` times the
    median jump within +-`window` (units of pi) and the absolute `floor`.
    Contiguous flagged pairs merge into one interval; the midpoints of the
    merged intervals are returned, smallest first, together with the
    interval list.
    """
    thetas = table.thetas(L, bond)
    if len(thetas) < 3:
        raise CoverageError("need >= 3 grid points for jump detection at L=%d" % L)
    q = np.array([table.discord(t, L, bond, 0) for t in thetas])
    mids = 0.5 * (np.array(thetas[:-1]) + np.array(thetas[1:]))
    jumps = np.abs(np.diff(q))
    flagged = []
    for i, jump in enumerate(jumps):
        sel = np.abs(mids - mids[i]) <= window + 1e-12
        med = float(np.median(jumps[sel]))
        if jump > factor * med and jump > floor:
            flagged.append(i)
    intervals = []
    for i in flagged:
        if intervals and i == intervals[-1][1]:
            intervals[-1] = (intervals[-1][0], i + 1)
        else:
            intervals.append((i, i + 1))
    spans = [(thetas[a], thetas[b]) for a, b in intervals]
    midpoints = [canonical_theta(0.5 * (a + b)) for a, b in spans]
    return midpoints, spans


def detect_extremum(table: SweepTable, L_list, bond: str = "rung",
                    window: tuple[float, float] | None = None):
    """Common interior extremum of the ground-level discord across sizes.

    Per size, the extremum is the interior grid point with a first-
    difference sign change and the largest |second difference|.  If every
    size agrees within one grid step the largest size's location is
    returned, else None.  Also returns the per-L locations for reporting.
    """
    if len(L_list) < 2:
        raise DomainError("extremum detection needs at least two sizes")
    found = {}
    step_max = 0.0
    for L in L_list:
        thetas = table.thetas(L, bond)
        if window is not None:
            thetas = [t for t in thetas if window[0] - 1e-12 <= t <= window[1] + 1e-12]
        if len(thetas) < 3:
            raise CoverageError("need >= 3 grid points per size, got %d for L=%d"
                                % (len(thetas), L))
        step_max = max(step_max, float(np.max(np.diff(thetas))))
        q = np.array([table.discord(t, L, bond, 0) for t in thetas])
        d = np.diff(q)
        best = None
        best_curv = -1.0
        for i in range(1, len(thetas) - 1):
            if d[i - 1] * d[i] < 0.0:
                curv = abs(q[i + 1] - 2.0 * q[i] + q[i - 1])
                if curv > best_curv:
                    best, best_curv = thetas[i], curv
        if best is None:
            return None, {}
        found[L] = best
    locations = sorted(found.values())
    if locations[-1] - locations[0] > step_max + 1e-12:
        return None, found
    return found[max(found)], found


@dataclass(frozen=True)
class OddEvenRow:
    L: int
    e0: float
    e1: float
    q0: float
    q1: float
    n_up0: int
    n_up1: int
    degenerate0: bool
    degenerate1: bool


@dataclass(frozen=True)
class OddEvenReport:
    """Two-level raw data across sizes at fixed theta.

    alternating is a heuristic: True when sign(q0 - q1) flips between every
    consecutive pair of sizes, None (indeterminate) when any size has
    e0 = e1 within eps_deg; the rows are the authoritative output.
    """

    theta_over_pi: float
    bond: str
    rows: tuple[OddEvenRow, ...]
    alternating: bool | None
    eps_deg: float = EPS_DEG


def odd_even_report(table: SweepTable, theta_over_pi: float, L_list,
                    bond: str = "rung", eps_deg: float = EPS_DEG) -> OddEvenReport:
    rows = []
    for L in L_list:
        r0 = table.record(theta_over_pi, L, bond, 0)
        r1 = table.record(theta_over_pi, L, bond, 1)
        rows.append(OddEvenRow(
            L=L, e0=r0.energy, e1=r1.energy, q0=r0.discord, q1=r1.discord,
            n_up0=r0.n_up, n_up1=r1.n_up,
            degenerate0=r0.degenerate, degenerate1=r1.degenerate,
        ))
    indeterminate = any(abs(row.e0 - row.e1) < eps_deg for row in rows)
    if indeterminate:
        flag = None
    else:
        signs = [math.copysign(1.0, row.q0 - row.q1) if row.q0 != row.q1 else 0.0
                 for row in rows]
        flag = (len(signs) >= 2 and all(s != 0.0 for s in signs)
                and all(a == -b for a, b in zip(signs, signs[1:])))
    return OddEvenReport(
        theta_over_pi=canonical_theta(theta_over_pi), bond=bond,
        rows=tuple(rows), alternating=flag, eps_deg=eps_deg,
    )


@dataclass(frozen=True)
class BoundaryReport:
    """Assembled boundary estimates with full method metadata.

    theta3_hat and theta5_hat bracket the symmetry-broken window located by
    the size-effect threshold; by construction theta3_hat is an upper bound
    on the true lower boundary and theta5_hat a lower bound on the upper
    one.  First-order points and the shared extremum are None when their
    detectors found nothing.
    """

    L: int
    delta: float
    bond: str
    grid_step: float
    theta3_hat: float | None
    theta5_hat: float | None
    theta1_hat: float | None = None
    theta2_hat: float | None = None
    theta4_hat: float | None = None
    jump_intervals: tuple[tuple[float, float], ...] = ()
    extremum_by_size: dict = field(default_factory=dict)
    bound_direction: str = (
        "theta3_hat bounds the true boundary from above; "
        "theta5_hat bounds it from below"
    )

    def __post_init__(self):
        if self.theta3_hat is not None and self.theta5_hat is not None:
            if self.theta3_hat > self.theta5_hat:
                raise DomainError(
                    "inconsistent symmetry-broken window: %r > %r"
                    % (self.theta3_hat, self.theta5_hat)
                )


def boundary_report(table: SweepTable, L: int, delta: float = DEFAULT_DELTA,
                    bond: str = "rung", extremum_sizes=None,
                    extremum_window=None) -> BoundaryReport:
    """Run every applicable detector and assemble the report.

    The size-effect bracket is always computed.  First-order detection runs
    on the full available grid for L; the extremum check runs when at least
    two sizes are present (defaulting to every size in the table up to L).
    """
    theta3, theta5, step = detect_sb_region(table, L, delta, bond)
    theta1 = theta2 = None
    spans = ()
    grid = table.thetas(L, bond)
    if grid[0] < -0.5 and grid[-1] > 0.5:
        midpoints, spans = detect_first_order(table, L, bond)
        if len(midpoints) >= 1:
            theta1 = midpoints[0]
        if len(midpoints) >= 2:
            theta2 = midpoints[1]
    theta4 = None
    by_size = {}
    sizes = extremum_sizes
    if sizes is None:
        sizes = [ell for ell in table.sizes() if ell <= L]
    if len(sizes) >= 2:
        window = extremum_window
        if window is None and theta3 is not None and theta5 is not None:
            window = (theta3, theta5)
        if window is not None:
            theta4, by_size = detect_extremum(table, sizes, bond, window)
    return BoundaryReport(
        L=L, delta=delta, bond=bond, grid_step=step,
        theta3_hat=theta3, theta5_hat=theta5,
        theta1_hat=theta1, theta2_hat=theta2, theta4_hat=theta4,
        jump_intervals=tuple(spans), extremum_by_size=by_size,
    )
