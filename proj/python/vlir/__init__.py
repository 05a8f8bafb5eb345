"""Variable-length intrinsic-randomness toolkit.

Finite-alphabet distributions, their spectra, the upper/lower randomness
quantities with witnesses, variable-length map metrics, the greedy-packing
construction with its guarantees, and independent verification oracles.
"""

from vlir._core import (
    CapacityError,
    ConfigError,
    Distribution,
    Map,
    Source,
    Spectrum,
    SubDistribution,
    avg_variational_distance,
    block_distribution,
    block_spectrum,
    converse_check,
    direct_construct,
    entropy,
    enumerate_maps,
    g_lower,
    g_lower_bruteforce,
    g_upper,
    g_upper_vertex_oracle,
    g_upper_witness,
    h_quantile,
    mean_length,
    per_class_sup_distance,
    rate_sequence,
    sample_random_maps,
    self_information,
    spectrum_of,
    rate_floor_witness,
    variational_distance,
)

__all__ = [
    "CapacityError",
    "ConfigError",
    "Distribution",
    "Map",
    "Source",
    "Spectrum",
    "SubDistribution",
    "avg_variational_distance",
    "block_distribution",
    "block_spectrum",
    "converse_check",
    "direct_construct",
    "entropy",
    "enumerate_maps",
    "g_lower",
    "g_lower_bruteforce",
    "g_upper",
    "g_upper_vertex_oracle",
    "g_upper_witness",
    "h_quantile",
    "mean_length",
    "per_class_sup_distance",
    "rate_sequence",
    "sample_random_maps",
    "self_information",
    "spectrum_of",
    "rate_floor_witness",
    "variational_distance",
]

__version__ = "0.1.0"
