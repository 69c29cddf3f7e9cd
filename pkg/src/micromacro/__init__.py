"""Simulation of Micro-Macro photon entanglement through quantum-injected
parametric amplification and orthogonality-filter detection."""

__version__ = "0.1.0"

from ._backend import backend_name
from .macrostate import (
    EquatorialBasis,
    FockOccupation,
    GainParams,
    MacroLabel,
    Mode,
    PhiPerp,
    PhiPlus,
    gamma_coefficient,
    make_gain,
    mean_photon_number,
    normalization_defect,
    occupation_probability,
)
from .dense import (
    DenseTwoModeState,
    build_dense_state,
    overlap,
    photon_statistics,
    rotate_polarization_basis,
)
from .rng import RngStream
from .sampling import (
    AliceOutcome,
    MarginalTables,
    MixtureWeights,
    build_marginal_tables,
    conditional_mixture,
    sample_alice,
    sample_occupation,
)
from .detection import (
    DetectionEvent,
    DetectionParams,
    OFOutcome,
    ideal_difference_discriminator,
    ideal_parity_discriminator,
    orthogonality_filter,
    pm_response,
    thin_binomial,
)
from .entanglement import TwoQubitDensityMatrix, bell_diagonal_state, wootters_concurrence
from .experiment import (
    CoincidenceCounts,
    ExperimentConfig,
    VisibilityEstimate,
    estimate_visibility,
    filtering_probability,
    inferred_source_photons,
    run_fringe_scan,
    run_trial,
    run_witness,
    s_statistic,
    threshold_sweep,
)
