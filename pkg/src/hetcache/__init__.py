"""Analysis and Monte Carlo simulation of a cache-enabled heterogeneous
wireless network (base stations, relays, cache-enabled users as D2D
transmitters): association and user-state probabilities, ergodic rates,
outage, processor-sharing queueing metrics, and a spatial simulation oracle.
"""

from .association import (
    D2DActivity,
    StateMatrix,
    TierSpec,
    active_d2d_density,
    first_association_probability,
    joint_distance_pdf_case3,
    nearest_distance_pdf,
    ordering_probability,
    state_matrix,
)
from .config import NetworkConfig, dbm_to_watts, fig6_config, load_config, watts_to_dbm
from .montecarlo import (
    EmpiricalEstimate,
    MonteCarloSummary,
    SpatialRealization,
    measure_association,
    measure_rate,
    measure_sinr,
    nearest_distances,
    run_monte_carlo,
    sample_topology,
)
from .outage import OutageResult, outage_case1, outage_case2, outage_case3, outage_case4, sinr_cdf
from .popularity import PopularityModel
from .queueing import (
    CtmcTrace,
    QueueClassLoad,
    QueueMetrics,
    RateMatrix,
    SteadyAnalysis,
    baseline_metrics,
    baseline_model,
    class_loads,
    ctmc_simulate,
    network_model,
    queue_metrics,
    rate_matrix,
    steady_ruler,
    throughput_gain,
)
from .quadrature import QuadratureError, QuadratureSpec, integrate_interval, integrate_semi_infinite
from .rates import RateResult, case_rate_table, rate_case1, rate_case2, rate_case3, rate_local
from .specfun import ConvergenceError, gauss_2f1, kernel_z1, kernel_z2, kernel_z3

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
