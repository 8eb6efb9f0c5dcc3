"""Discrete-time quantum walks on the N-cycle with coin decoherence.

Simulation (density-matrix and momentum-space paths), superoperator spectra,
and mixing-time analysis, with a CLI front end (``cyclewalk --help``).
"""

__version__ = "0.1.0"

from .core import (
    CoinMatrix,
    KrausFamily,
    NumericalCheckError,
    PauliVector,
    WalkConfig,
    build_kraus_family,
    coin_state,
    hadamard_coin_momentum,
    pauli_compose,
    pauli_decompose,
)
from .fourier import SuperOp, superop_closed_form, superop_definitional, trace_term
from .spectral import (
    GapResult,
    Quartic,
    SpectrumReport,
    char_poly,
    eigenvalues,
    spectral_gap,
)
from .evolution import (
    DensityOperator,
    PositionDistribution,
    classical_reference,
    distribution_fourier,
    evolve_direct,
    fourier_trajectory,
    position_marginal,
)
from .analysis import (
    LimitSpec,
    MixingReport,
    limiting_distribution,
    mixing_time_averaged,
    mixing_time_instantaneous,
    time_averaged,
    total_variation,
    uniform_deviation_bound,
    uniform_deviation_bound_integral,
    verify_geometric_sum,
)

__all__ = [
    "__version__",
    "CoinMatrix",
    "KrausFamily",
    "NumericalCheckError",
    "PauliVector",
    "WalkConfig",
    "build_kraus_family",
    "coin_state",
    "hadamard_coin_momentum",
    "pauli_compose",
    "pauli_decompose",
    "SuperOp",
    "superop_closed_form",
    "superop_definitional",
    "trace_term",
    "GapResult",
    "Quartic",
    "SpectrumReport",
    "char_poly",
    "eigenvalues",
    "spectral_gap",
    "DensityOperator",
    "PositionDistribution",
    "classical_reference",
    "distribution_fourier",
    "evolve_direct",
    "fourier_trajectory",
    "position_marginal",
    "LimitSpec",
    "MixingReport",
    "limiting_distribution",
    "mixing_time_averaged",
    "mixing_time_instantaneous",
    "time_averaged",
    "total_variation",
    "uniform_deviation_bound",
    "uniform_deviation_bound_integral",
    "verify_geometric_sum",
]
