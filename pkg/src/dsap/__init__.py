"""Dark-state adiabatic passage on a chain of three spin-one particles."""

from .spin_algebra import (
    BasisTriple,
    SpinLabel,
    as_triple,
    basis_index,
    embed_site_operator,
    index_to_triple,
    population,
    product_state,
    spin1_operators,
    total_magnetization_operator,
)
from .hamiltonian import (
    CouplingSnapshot,
    PulseSchedule,
    build_hamiltonian,
    ci_pulse,
    ci_schedule,
    hamiltonian_at,
    read_schedule_csv,
    tabulated_schedule,
)
from .spectral import (
    SpectralFrame,
    TrackedSpectrum,
    adiabaticity_A2_closed,
    adiabaticity_numeric,
    analytic_D0,
    analytic_D1,
    analytic_D2,
    eigensystem,
    midpoint_adiabaticities,
    track_eigenstates,
)
from .evolution import (
    QutritTransferReport,
    Trajectory,
    dsap_transfer,
    populations_timeseries,
    propagate,
    qutrit_transport,
)
from .dipole import (
    DipoleGeometry,
    MagicTrajectory,
    MAGIC_ANGLE,
    dipole_coupling,
    equilateral_geometry,
    magic_field,
    magic_schedule,
    magic_trajectory,
    solve_endpoints,
    trajectory_couplings,
)
from .config import ConfigError, ExperimentConfig, parse_config

__all__ = [name for name in dir() if not name.startswith("_")]
