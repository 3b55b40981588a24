"""Quantum key distribution with geometrically uniform states and decoy pulses.

Analytic security bounds (unambiguous discrimination, symmetric unitary
attack, decoy estimation, asymptotic key rate) and a pulse-level Monte-Carlo
simulator that checks them.
"""

from .attack import AttackPoint, chi_envelope, eve_overlap, holevo, holevo_chi
from .channel import ChannelParams, ClassStatistics, class_statistics, detect_prob_k, transmission
from .decoy import (
    ClassObservation,
    IntensitySet,
    ObservedStats,
    SingleYieldBounds,
    estimate_single_photon,
    p0_lower_bound,
    p1_lower_bound,
    q1_upper_bound,
)
from .errors import (
    ConfigurationError,
    ConsistencyError,
    DomainError,
    EstimationInfeasibleError,
    SimulationError,
)
from .keyrate import KeyRateReport, analytic_report, figures_of_merit, key_rate_report, rate_full, rate_practical
from .simulator import SessionConfig, SessionResult, collect_stats, per_k_yield_check, run_session
from .states import (
    FockStateVector,
    GusParams,
    PhotonDistribution,
    basis_overlap,
    binary_entropy,
    fock_state,
    poisson_pmf,
)
from .usd import UsdResult, pairwise_usd, usd_exact, usd_pure_coherent, usd_tail_bound

__version__ = "0.1.0"
