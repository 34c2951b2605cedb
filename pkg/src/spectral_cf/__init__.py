"""spectral-cf: characteristic functions and vacuum spectral measures of
Hermitian observables, computed two independent ways — exact
eigendecomposition, and numerical boundary values of the resolvent — and
cross-validated against a registry of closed forms.
"""

__version__ = "0.1.0"

from .errors import (
    BranchTrackingError,
    CatalogKeyError,
    ConditioningError,
    ConfigError,
    ConstructionError,
    DimensionMismatchError,
    NumericalError,
    ParseError,
    PoleError,
    PreconditionError,
    RangeCoverageError,
    SpectralCfError,
    VerificationError,
)
from .linalg import (
    HermitianOperator,
    SpectralDecomposition,
    StateVector,
    charfun_exact,
    decompose,
    matrix_exp_it,
    shifted_solve,
    spectral_measure,
)
from .measures import CharacteristicFunctionTrace, SpectralMeasure
from .catalog import (
    GENERATOR_SET_NAMES,
    OBSERVABLE_NAMES,
    build_generators,
    build_observable,
    fock_vacuum_state,
    list_catalog,
    reference_states,
    vacuum_for_observable,
)
from .fockline import (
    OBSERVABLE_MODES,
    FockTruncation,
    GridLine,
    ccr_residuals,
    exp_quadratic_commutators,
    exp_xp,
    make_fock,
    make_grid,
    matrix_action_exp,
    observable_xp,
    quadratic_evolution_residual,
    vacuum_charfun,
    xp_power_normal_ordering,
)
from .forms import (
    ClosedForm,
    SplittingFunctions,
    cf_reference,
    get_form,
    quadratic_vacuum_cf,
    registry,
    splitting,
    stirling2,
)
from .stone import (
    ResolventProbeConfig,
    invert_cf_to_density,
    probe,
    smoothed_density,
    stone_cdf,
    stone_charfun,
)
from .verify import CheckResult, ReportDocument, run_suite

__all__ = [
    "__version__",
    # errors
    "SpectralCfError", "ConfigError", "ParseError", "CatalogKeyError",
    "ConstructionError", "DimensionMismatchError", "PreconditionError",
    "NumericalError", "ConditioningError", "PoleError", "BranchTrackingError",
    "RangeCoverageError", "VerificationError",
    # linear algebra
    "HermitianOperator", "StateVector", "SpectralDecomposition",
    "decompose", "matrix_exp_it", "charfun_exact", "spectral_measure",
    "shifted_solve",
    # measures
    "SpectralMeasure", "CharacteristicFunctionTrace",
    # catalogue
    "GENERATOR_SET_NAMES", "OBSERVABLE_NAMES", "build_generators",
    "build_observable", "fock_vacuum_state", "reference_states",
    "vacuum_for_observable", "list_catalog",
    # realizations
    "FockTruncation", "GridLine", "OBSERVABLE_MODES", "make_fock", "make_grid",
    "observable_xp", "vacuum_charfun", "exp_xp", "exp_quadratic_commutators",
    "xp_power_normal_ordering", "quadratic_evolution_residual",
    "ccr_residuals", "matrix_action_exp",
    # closed forms
    "ClosedForm", "registry", "get_form", "cf_reference", "splitting",
    "SplittingFunctions", "quadratic_vacuum_cf", "stirling2",
    # resolvent route
    "ResolventProbeConfig", "probe", "smoothed_density", "stone_charfun",
    "stone_cdf", "invert_cf_to_density",
    # verification
    "CheckResult", "ReportDocument", "run_suite",
]
