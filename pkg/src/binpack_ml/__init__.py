"""Online bin packing with frequency predictions."""

from .adaptive import AdaptivePacker, SlidingWindow, adaptive
from .classic import (
    BestFit,
    FirstFit,
    RealFirstFit,
    best_fit,
    bin_types,
    exact_opt,
    first_fit,
    first_fit_decreasing,
    first_fit_real,
    l2_bound,
)
from .core import (
    Bin,
    BinType,
    FractionalItem,
    FrequencyVector,
    Packing,
    Provenance,
    consolidation_ratio,
    deviation_hat,
    frequencies,
    l1_error,
    split_fractional,
)
from .harness import (
    AlgorithmSpec,
    ExperimentConfig,
    ExperimentRecord,
    average_by_rounded_error,
    emit_plot_data,
    load_config,
    parse_config,
    read_records,
    run_experiment,
)
from .hybrid import HybridPacker, h_aware, h_aware_threshold, hybrid
from .profile import (
    ProfilePacker,
    ProfilePlan,
    ProfileSet,
    build_profile,
    plan_profile,
    profile_packing,
    profile_packing_fractional,
)
from .workload import (
    Mode,
    SequenceSpec,
    WeibullSpec,
    adversarial_prediction,
    adversarial_sigma1,
    adversarial_sigma2,
    load_bpplib,
    make_sequence,
    prefix_prediction,
    sample_weibull,
    scale_to_capacity,
    write_bpplib,
)

__version__ = "0.1.0"
