"""Matrix-free exact diagonalization of the spin-1/2 two-leg ladder with
four-spin ring exchange, and quantum-correlation measures on two-spin bonds."""

from .density import TwoQubitX, bond_sites, level_density, partial_trace_two, to_x_form
from .eigensolver import SpectrumSlice, VectorCache, solve_sector, two_lowest_states
from .errors import (
    CapacityError,
    CellLookupError,
    ConvergenceError,
    CoverageError,
    DomainError,
    LadderError,
    PreconditionError,
    ValidationError,
    XFormViolationError,
)
from .eigensolver import resolve_cache_dir
from .hamiltonian import LadderParams, SectorKernel, canonical_theta, get_kernel
from .io import (
    CSV_COLUMNS,
    boundary_report_to_dict,
    odd_even_report_to_dict,
    read_table,
    read_table_csv,
    read_table_json,
    write_table_csv,
    write_table_json,
)
from .lattice import SectorBasis, enumerate_sector, get_basis, site_index
from .measures import (
    CorrelationRecord,
    MeasurementAngles,
    classical_correlation_x,
    concurrence,
    concurrence_x,
    correlation_record,
    discord_audit,
    discord_oracle,
    discord_x,
    mutual_information,
    mutual_information_x,
    von_neumann_entropy,
)
from .sweep import (
    BoundaryReport,
    OddEvenReport,
    RunOptions,
    SweepConfig,
    SweepRecord,
    SweepTable,
    boundary_report,
    detect_extremum,
    detect_first_order,
    detect_sb_region,
    odd_even_report,
    run_sweep,
    size_effect,
    theta_range,
)

__all__ = [
    "BoundaryReport",
    "CSV_COLUMNS",
    "CapacityError",
    "CellLookupError",
    "ConvergenceError",
    "CorrelationRecord",
    "CoverageError",
    "DomainError",
    "LadderError",
    "LadderParams",
    "MeasurementAngles",
    "OddEvenReport",
    "PreconditionError",
    "RunOptions",
    "SectorBasis",
    "SectorKernel",
    "SpectrumSlice",
    "SweepConfig",
    "SweepRecord",
    "SweepTable",
    "TwoQubitX",
    "ValidationError",
    "VectorCache",
    "XFormViolationError",
    "bond_sites",
    "boundary_report",
    "boundary_report_to_dict",
    "canonical_theta",
    "classical_correlation_x",
    "concurrence",
    "concurrence_x",
    "correlation_record",
    "detect_extremum",
    "detect_first_order",
    "detect_sb_region",
    "discord_audit",
    "discord_oracle",
    "discord_x",
    "enumerate_sector",
    "get_basis",
    "get_kernel",
    "level_density",
    "mutual_information",
    "mutual_information_x",
    "odd_even_report",
    "odd_even_report_to_dict",
    "partial_trace_two",
    "read_table",
    "read_table_csv",
    "read_table_json",
    "resolve_cache_dir",
    "run_sweep",
    "site_index",
    "size_effect",
    "solve_sector",
    "theta_range",
    "to_x_form",
    "two_lowest_states",
    "von_neumann_entropy",
    "write_table_csv",
    "write_table_json",
]

__version__ = "0.1.0"
