"""Entropic non-contextuality inequality for four-level quantum systems."""

__version__ = "0.1.0"

from .entropy import PairDistribution, binary_entropy, pair_entropy, shannon_entropy
from .estimators import EntropicInequalityTransformer, FamilyStateTransformer
from .exceptions import (
    ConfigError,
    ContextualityError,
    CyclicityViolation,
    DegenerateState,
    ExclusivityViolation,
    InvalidDistribution,
    MalformedTargets,
    OutOfRange,
    ZeroVector,
)
from .explore import ScanGrid, ScanResult, export_scan, optimize, scan
from .inequality import InequalityReport, estimate_m_sampled, evaluate_m, outcome_probability, pair_distribution
from .model import (
    CyclicObservableSet,
    FamilyKind,
    StateFamily,
    StateVector,
    build_observables,
    default_observables,
    entangled_state,
    load_observables,
    make_state,
    normalize,
    product_state,
)
from .oracle import (
    FeasibilityVerdict,
    JointDistribution5,
    check_joint_extension,
    classical_m,
    marginalize_pair,
    run_classical_oracle,
)
