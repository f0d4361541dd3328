from .state import (
    Exclusion,
    FitResult,
    FittedCohort,
    FittedSubject,
    NormalizationConfig,
    SubjectRecord,
)
from .features import area_strain, cohort_max_config, normalize, samples_from_histogram
from .mle import fit_beta_mle, moments_estimate, prepare_samples
from .cohort import (
    exclusions_path,
    fit_cohort,
    load_mesh_cohort,
    load_subjects,
    read_fitted_cohort,
    write_fitted_cohort,
)
from .synthetic import synthetic_cohort

__all__ = [
    # Types
    "Exclusion",
    "FitResult",
    "FittedCohort",
    "FittedSubject",
    "NormalizationConfig",
    "SubjectRecord",
    # Features
    "area_strain",
    "cohort_max_config",
    "normalize",
    "samples_from_histogram",
    # Fitting
    "fit_beta_mle",
    "moments_estimate",
    "prepare_samples",
    "fit_cohort",
    # Files
    "exclusions_path",
    "load_mesh_cohort",
    "load_subjects",
    "read_fitted_cohort",
    "write_fitted_cohort",
    # Synthetic data
    "synthetic_cohort",
]
