"""Average, minimum and variance of the Wigner-Yanase skew information for
bipartite probe states, with closed forms, Monte Carlo oracles and special
state families."""

from .errors import (
    DegenerateSpectrum,
    DimensionMismatch,
    InvalidConfig,
    InvalidParameter,
    InvalidRank,
    NonHermitianInput,
    NotNormalized,
    PoleEvaluation,
    ProbeError,
    ZeroSusceptibility,
)
from .linalg import (
    DensityMatrix,
    density,
    embed_a,
    hermitian_eig,
    partial_trace,
    sqrtm_psd,
    swap_operator,
    tensor,
)
from .measures import (
    MeasureReport,
    Spectrum,
    avsk,
    avsk_corr,
    avsk_monte_carlo,
    avsk_pure_relation,
    concurrence_pure,
    entanglement_witness,
    harmonic_spectrum,
    lqu_minimize,
    lqu_two_qubit,
    measure_state,
    optimal_spectrum,
    precision_bounds,
    q_a,
    sigma_z_spectrum,
    skew_information,
)
from .moments import (
    LetterValues,
    Perm4,
    RationalFunctionOfN,
    f_lambda,
    g2_value,
    g3_value,
    haar_moment4,
    letters,
    lqu_bounds,
    moment4_coefficient,
    second_moment,
    twirl2,
    variance,
    variance_monte_carlo,
    weingarten4,
)
from .states import (
    RandomSeed,
    StateFamily,
    bell_state,
    cc_state,
    cq_state,
    family_pqc,
    family_product,
    family_sep,
    haar_unitary,
    isotropic,
    make_state,
    max_discordant,
    pqc_state,
    product_state,
    pure_schmidt,
    qc_state,
    random_density,
    random_pure,
    random_separable,
    werner,
)

__version__ = "0.1.0"
