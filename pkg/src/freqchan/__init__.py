"""Bounds and a Monte Carlo harness for a frequency-based sampling channel.

The package computes an achievable-rate lower bound, random-coding and
expurgated error exponents, and finite-budget baseline curves, all in
nats, and validates them against a seeded simulator of the channel
(Dirichlet codebooks read through multinomial sampling with maximum
likelihood decoding).
"""

from .baselines import FirQuery, converse_rate, fir_rate
from .channel import (
    BcTailReport,
    Codebook,
    MomentReport,
    SampleCounts,
    SimConfig,
    SimplexPoint,
    SimReport,
    TailReport,
    bhattacharyya,
    dirichlet_product_moment,
    estimate_bc_tail,
    estimate_error_probability,
    estimate_kl_tail,
    estimate_product_moment,
    kl_divergence,
    ml_decode,
    sample_dirichlet,
    sample_multinomial,
)
from .ex_bounds import (
    ExExponentPoint,
    ExParams,
    ExSettings,
    QuadratureSettings,
    ex_exponent,
    f_kappa,
    g_fn,
    j_fn,
    l_fn,
    s_fn,
)
from .optimize import (
    EvaluationError,
    OptimizerSettings,
    SearchInterval,
    maximize_scalar,
    minimize_scalar,
)
from .rc_bounds import (
    BoundQuery,
    CapWarning,
    ExponentPoint,
    KlTailBound,
    RcParams,
    RcSettings,
    chernoff_pairwise_bound,
    delta_fn,
    lambda_fn,
    lemma1_tail_bound,
    rate_lower_bound,
    rc_exponent,
    thm1_probability_bound,
)
from .special_fn import (
    StirlingBracket,
    binary_entropy,
    log_gamma,
    normal_cdf,
    psi_fn,
    stirling_bracket,
    zeta,
)

__version__ = "0.1.0"
