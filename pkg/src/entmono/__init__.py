"""Two-qubit entanglement measures and monogamy audits over sampled states."""

from .linalg import (
    HermitianSpectrum,
    eig_hermitian,
    partial_trace,
    spin_flip,
    sqrt_psd,
    tensor,
)
from .measures import (
    MEASURE_EOF,
    MEASURE_TANGLE,
    RoofConfig,
    RoofResult,
    binary_entropy,
    concurrence,
    convex_roof,
    entropy_of_entanglement,
    eof_closed_form,
    eof_from_tangle,
    tangle_pure,
)
from .monogamy import (
    AlphaFitReport,
    BoundAuditReport,
    BoundCheck,
    MonogamyRecord,
    alpha_fit,
    ckw_mixed,
    ckw_residual,
    count_alpha_violations,
    empirical_c,
    equality_audit,
    formation_bound,
    monotonicity_audit,
    piecewise_bound,
    regularised_bound_arith,
    sample_pure_records,
    triple_eof,
)
from .states import (
    DensityMatrix,
    Ensemble,
    PureState,
    SchmidtDecomposition,
    ginibre_random_density,
    haar_random_pure,
    mix,
    named_state,
    reduced_density,
    rng_stream,
    schmidt,
    to_density,
)
from .teleport import TeleportTranscript, teleport

__version__ = "0.1.0"
