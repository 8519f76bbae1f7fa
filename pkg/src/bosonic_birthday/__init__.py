"""Birthday statistics for identical bosons: exact counts, samplers, limit laws
and a small symmetric-power quantum model."""

from .exactcomb import (
    DomainError,
    SizeError,
    binomial_moment_at_least,
    exact_profile_distribution,
    multiset_coefficient,
    prob_all_distinct_boltzmannons,
    prob_all_distinct_bosons,
    prob_first_l_days_at_least_j,
    threshold_k,
)
from .occupancy import CollisionProfile
from .rng import DEFAULT_SEED, RngStream

__version__ = "0.1.0"
