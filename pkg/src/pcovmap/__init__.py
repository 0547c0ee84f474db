"""pcovmap: hybrid supervised-unsupervised maps for classification data.

Principal covariates classification/regression with linear and kernel
variants, the reference baselines (PCA, LDA, KDA, exact SHAP) and the
analysis workflows built on top of the fitted maps.
"""

from .analysis import (
    alpha_sweep,
    boundary_pairs,
    decision_grid,
    latent_feature_correlations,
)
from .baselines import exact_shap, fit_kda, fit_kpca, fit_lda, fit_pca
from .classifiers import (
    EvidenceTensor,
    LabelData,
    LinearClassifierModel,
    activate,
    evidence,
    fit_classifier,
    fit_linear_svm,
    fit_logistic,
    fit_perceptron,
    fit_ridge_classifier,
)
from .kernels import KernelMatrix, KernelSpec, center_kernel, compute_kernel
from .linalg import (
    ScalingRecipe,
    SymmetricEigen,
    center_and_scale,
    eigh_descending,
    pearson_correlation,
    psd_power,
)
from .pcov import (
    PcovConfig,
    PcovModel,
    fit_kpcovc,
    fit_pcovx,
    inverse_transform,
    modified_covariance,
    modified_gram,
    multilabel_gram_contribution,
    predict,
    predict_from_latent,
    predict_scores,
    regression_approximation,
    transform,
)
from .serialize import load_model, save_model

__version__ = "0.1.0"
