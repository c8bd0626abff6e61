"""Collective-spin quantum battery simulator.

Models N two-level systems with an effective all-to-all interaction
omega_z*S_z - g*S_x^2 switched on and off by a step protocol, computes the
charging figures of merit by exact diagonalization, validates the effective
model against the full matter-radiation Hamiltonian, and reproduces the
scaling laws and the G = g*N collapse of the maximum stored energy.
"""

__version__ = "0.1.0"

from .spin import (  # noqa: F401
    SpinSector,
    ParitySector,
    SpinState,
    build_sector,
    ground_state,
    max_state,
    op_sx,
    op_sx2,
    op_sz,
    parity_split,
    expectation_sx,
    expectation_sy,
    expectation_sz,
)
from .dynamics import (  # noqa: F401
    EigenSystem,
    NegativeCouplingError,
    ProtocolConfig,
    Trajectory,
    build_hamiltonian,
    default_time_grid,
    diagonalize,
    propagate,
    run_protocol,
    run_protocol_parity,
)
from .metrics import (  # noqa: F401
    BlochVector,
    ChargingSummary,
    MetricSeries,
    NoMaximumError,
    averaged_power,
    compute_metrics,
    ergotropy_general,
    ergotropy_single,
    find_first_maximum,
    magnetization,
    single_tls_rdm,
    stored_energy,
    summarize,
    total_ergotropy_pure,
)
from .perturbation import WeakCouplingPrediction, e_weak, p_weak, power_peak_root, weak_maxima  # noqa: F401
from .dicke import (  # noqa: F401
    DickeConfig,
    LmgMapping,
    MappingReport,
    build_dicke,
    effective_dispersive,
    map_to_lmg,
    validate_mapping,
)
from .classical import ClassicalState, classical_rhs, integrate_classical  # noqa: F401
from .scaling import (  # noqa: F401
    FitResult,
    SweepSpec,
    detect_crossover,
    fit_power_law,
    sweep,
    sweep_point,
    universality_scan,
)
