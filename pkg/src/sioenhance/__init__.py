"""Maximal l1-coherence enhancement by stochastic strictly incoherent operations."""

from .channel import (
    KrausSet,
    SelectiveOutcome,
    apply_selective,
    apply_stochastic,
    complete_instrument,
    is_strictly_incoherent,
    kraus_set,
)
from .errors import (
    DimensionMismatch,
    IncompleteInstrument,
    NoConvergence,
    NotHermitian,
    NotPSD,
    NotUnitTrace,
    OutOfRange,
    ParseError,
    ZeroProbability,
)
from .optimizer import (
    BlockDecomposition,
    EnhancementResult,
    PerronData,
    analyze,
    block_decompose,
    max_enhanced_coherence,
    max_probability,
    optimal_kraus,
    perron,
    pure_state_analysis,
    qubit_closed_form,
)
from .oracle import (
    all_ones_propagation_check,
    brute_force_max_coherence,
    monte_carlo_success,
    random_density,
)
from .state import (
    ComparisonMatrix,
    DensityMatrix,
    abs_matrix,
    comparison_matrix,
    inv_sqrt_dephased,
    l1_coherence,
    validate_density,
)

__version__ = "0.1.0"
