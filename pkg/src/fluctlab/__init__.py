"""Phase-space fluctuation laboratory.

Builds 1-D grid states and mixed ensembles, measures their position,
momentum, and energy spreads, audits the spread product against the
h/(4*pi) bound, and evaluates, samples, and extremizes the Gaussian
fluctuation densities tied to those spreads.
"""

from .audit import (
    Classification,
    SelfSimilarityReport,
    Verdict,
    audit_report,
    classify,
    entropy_surrogate,
    self_similarity_report,
    time_energy,
    uncertainty_product,
)
from .density import (
    ExtremumCheck,
    FluctuationParams,
    PhasePoint,
    degenerate_spread,
    density_eval,
    density_grid,
    extremal_variances,
    normalization_check,
    peak_value,
    reduced_box_integral,
    reduced_density,
    reduced_grid,
    sample,
    verify_extremum,
)
from .errors import (
    DecayGuardViolation,
    FileFormatError,
    FluctLabError,
    GridMismatch,
    InvalidRecipe,
    NonPositiveInput,
    NormalizationError,
    NumericalFailure,
    ResolutionError,
    StepTooLarge,
    TruncationError,
    ZeroSeparation,
)
from .scenarios import SweepRow, WalkTrace, eigenstate_sweep, relaxation_walk, thermal_sweep
from .states import (
    CoherentState,
    GaussianPacket,
    GridSpec,
    HamiltonianSpec,
    MixedEnsemble,
    MomentReport,
    OscillatorEigenstate,
    PureState,
    RawSamples,
    StateRecipe,
    UnitSystem,
    build_state,
    energy_moments,
    ensemble_moments,
    oscillator_eigenstates,
    phase_space_moments,
    thermal_ensemble,
)

__version__ = "0.1.0"
