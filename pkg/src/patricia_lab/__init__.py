"""PATRICIA trees over random binary strings, including laws built to make them tall."""

from .bitstreams import (
    AlphaSpec,
    BadMixture,
    BadMuN,
    Bernoulli,
    DepthGuardError,
    Exp2Power,
    LazyBitString,
    Log2Of,
    LogPower,
    NuForAlpha,
    Power,
    Table,
    a_of,
    beta_of,
    first_difference,
    max_prefix_probability,
    nu_spec,
    prefix_probability,
    sample_string,
    spec_from_json,
    spec_to_json,
)
from .patricia import (
    PatriciaTree,
    Trie,
    build_by_insertion,
    build_patricia,
    build_trie,
    compress,
    distinct_first_one_count,
    validate,
)
from .experiments import ExperimentConfig, TrialRecord, run_grid, run_trial

__version__ = "0.1.0"
