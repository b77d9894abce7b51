"""shiftscope: covariate-shift detection and contrastive exploration for
embedding collections.

Train a density-ratio model between a training and a test collection, score
instances as shift outliers, and explore what changed through neighborhood
and cluster contrast sets served over a small read-only API.
"""

from .bench import BenchReport, ShiftExperiment, auroc, generate_experiments, run_benchmark
from .clustering import (
    ClusterAssignment,
    ClusterSummary,
    WardAgglomerative,
    cluster_contrast_set,
    cluster_store,
    rank_clusters,
    ward_cluster,
)
from .data import (
    AnalysisStore,
    InstanceRecord,
    LatentSpace,
    build_store,
    load_embeddings,
    load_manifest,
    write_embeddings,
)
from .histogram import SideBySideHistogram, bin_of, build_side_by_side
from .kliep import (
    KliepDensityRatio,
    TrainConfig,
    dre_latent,
    kliep_gradient,
    kliep_loss,
    load_model,
    save_model,
    train_dre,
)
from .neighborhood import Neighborhood, adaptive_neighborhood, knn, pairwise_distance
from .projection import (
    PowerIterationPCA,
    fit_pca2,
    load_external_projection,
    project2,
    project_store,
)
from .scoring import (
    CenterDistanceDetector,
    IsolationForestDetector,
    ScoreTable,
    center_distance_score,
    fit_isolation_forest,
    iforest_score,
    normalize_scores,
    score_dataset,
    suspicion_from_ratio,
)

__version__ = "0.1.0"
