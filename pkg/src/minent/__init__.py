"""Min-entropy estimation for bit sources via distance-based statistical
tests, with simulated sources, analysis tools, and an experiment harness."""

from .analysis import (
    JointRangePoint,
    collision_entropy,
    inverted_near_uniform_pmf,
    joint_range_curve,
    min_entropy,
    near_uniform_pmf,
    renyi_entropy,
    shannon_entropy,
    variance_crossover_threshold,
    variance_of_g,
    z_ratio_approx,
    z_slope,
)
from .blocks import DistanceStream, distance_stream, load_bits, pack_blocks, save_bits, unpack_blocks
from .estimators import (
    BisectionConfig,
    MinEntropyEstimate,
    bisect_monotone,
    collision_estimate,
    collision_statistic,
    collision_theta,
    compression_estimate,
    coron_estimate,
    estimate_sequence,
    kim_estimate,
    log2_distance_expectation,
    near_uniform_power_sum,
    near_uniform_shannon,
)
from .harness import (
    EstimatorSpec,
    ExperimentConfig,
    ExperimentReport,
    SourceBattery,
    run_experiment,
    write_report,
)
from .online import OnlineState, online_init, online_snapshot, online_update
from .sources import (
    FAMILIES,
    GroundTruth,
    SourceSpec,
    block_distribution,
    sample,
    sample_bits,
    true_min_entropy,
)
from .stats import (
    CorrectiveFactor,
    TestStatistic,
    confidence_lower_bound,
    coron_g,
    coron_test,
    corrective_factor,
    kim_g,
    kim_test,
    maurer_test,
)

__version__ = "0.1.0"
