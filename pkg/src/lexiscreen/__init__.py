"""lexiscreen: transcript-based cognitive screening support.

Interpretable linguistic features from speech transcripts, random forest
classification and regression with exact per-prediction SHAP attributions,
and Green/Amber/Red risk stratification.
"""

__version__ = "0.1.0"

from .corpus import (  # noqa: F401
    ClassProfile, Dataset, FoldAssignment, SeverityGroup, SyntheticSpec,
    TranscriptRecord, assign_folds, bootstrap_sample, generate_synthetic,
    load_dataset, severity_group, stratified_folds,
)
from .errors import DataError, LexiscreenError, ModelError, UsageError  # noqa: F401
from .evaluate import (  # noqa: F401
    CIReport, CVReport, ParamSpace, SearchResult, bootstrap_evaluate,
    cross_validate, group_metrics, random_search,
)
from .explain import (  # noqa: F401
    Attribution, ImportanceSummary, explain_dataset, shap_oracle_forest,
    shap_oracle_tree, summarize_importance, tree_shap,
)
from .features import (  # noqa: F401
    FeatureSchema, FeatureVector, LexicalDiversity, PosLexicon, TokenStream,
    extract_dataset, extract_features, lexical_diversity, load_default_schema,
    tokenize,
)
from .forest import (  # noqa: F401
    ForestModel, ForestParams, Tree, clamp_mmse, fit_forest, predict,
    predict_labels, predict_proba,
)
from .lexicon import Lexicon, load_default_lexicon, parse_lexicon  # noqa: F401
from .linear import LinearModel, fit_logistic, fit_ridge  # noqa: F401
from .metrics import (  # noqa: F401
    calibration_curve, classification_metrics, regression_metrics, roc_auc,
    roc_points, spearman,
)
from .risk import (  # noqa: F401
    RiskBand, RiskThresholds, band_of, bands_of, risk_by_severity,
    search_thresholds, search_thresholds_cv, selective_metrics, youden_j,
)
from .serialize import load_model, save_model  # noqa: F401
