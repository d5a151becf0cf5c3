from .bank import final_model_bank
from .propensity import DEFAULT_EPSILON, PropensityModel, PropensitySpec, fit_propensity
from .regressors import FAMILY_DEFAULTS, RegressorModel, RegressorSpec, fit_regressor
from .selection import (DEFAULT_NUISANCE_CANDIDATES, DEFAULT_PROPENSITY_CANDIDATES, SelectionBudget,
                        select_by_cv, select_propensity_by_cv)

__all__ = [
    'DEFAULT_EPSILON', 'DEFAULT_NUISANCE_CANDIDATES', 'DEFAULT_PROPENSITY_CANDIDATES', 'FAMILY_DEFAULTS',
    'PropensityModel', 'PropensitySpec', 'RegressorModel', 'RegressorSpec', 'SelectionBudget',
    'final_model_bank', 'fit_propensity', 'fit_regressor', 'select_by_cv', 'select_propensity_by_cv',
]
