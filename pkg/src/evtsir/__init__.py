"""Extreme-value statistics of the maximum SIR under kappa-mu shadowed fading."""

from .evt import (
    ConvergenceBound,
    FrechetParams,
    Ordering,
    convergence_exponent,
    frechet_cdf,
    frechet_moment,
    frechet_params,
    frechet_pdf,
    frechet_quantile,
    frechet_scale,
    frechet_shape,
    stochastic_compare,
)
from .fading import FadingParams, Scenario, beta_prime_sir_cdf, sample_power, sample_sir
from .metrics import (
    FasConfig,
    ergodic_rate_asymptotic,
    ergodic_rate_mc,
    fas_rate_upper_bound,
    fas_simulated_rate,
    outage_asymptotic,
    outage_exact_mc,
    sample_top_order_stats,
)
from .montecarlo import Estimate, MaximaStudy, estimate_with_se, run_maxima_study
from .sirdist import exact_ccdf, exact_cdf, exact_pdf
from .specfun import SeriesControl, confluent_ed, lauricella_fd
from .stats import ecdf, empirical_kl, fd_bins, ks_distance
from .streams import DEFAULT_SEED, RandomStream

__version__ = "0.1.0"
