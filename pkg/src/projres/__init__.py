"""Projection-residual unlearning for ridge-regularized linear models.

Delete k training points from a trained model in O(k^2 d) per request by
stepping along the composite-point gradient through the pseudoinverse of
the deleted rows' outer-product sum, which lands exactly on the projection
of the retrained parameters onto the deleted span.  Ships the exact
retrain, Newton, influence, and scalar-gradient baselines, a feature
injection test harness for deletion quality, and timing benchmarks.
"""

__version__ = "0.1.0"

from .errors import (
    ConvergenceError,
    DataFormatError,
    DegenerateDeletionError,
    NotPositiveDefiniteError,
    ProjresError,
    SingularMatrixError,
)
from .model import (
    DEFAULT_LAMBDA,
    Dataset,
    DeletionRequest,
    RidgeModel,
    loss_derivatives,
    predict,
    predict_label,
    train_full,
)
from .leverage import HatState, dk_predict, dk_predict_factored, hat_matrix
from .unlearn import (
    METHODS,
    LowRankPinv,
    UnlearnResult,
    distance_to_retrain,
    fast_apply,
    gradient_update,
    influence_update,
    newton_update,
    pinv_lowrank,
    project_onto_span,
    residual_update,
    retrain_exact,
    run_method,
    with_distance,
)
from .fit import FitReport, FitTrialConfig, fit_score, inject_feature, run_fit_suite
from .pipeline import (
    FeatureMap,
    accuracy_impact,
    encode,
    head_accuracy,
    identity_map,
    random_projection_map,
    table_map,
    unlearn_head,
)
from .data import (
    Corpus,
    Vocabulary,
    augment_dropout,
    binarize_labels,
    build_bow,
    gen_synthetic_sparse,
    load_corpus_csv,
    load_feature_table,
    load_numeric_csv,
    save_numeric_csv,
)
from .bench import BenchReport, BenchRow, kernel_bench, run_bench
