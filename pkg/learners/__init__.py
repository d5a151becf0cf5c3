from .bank import DEFAULT_KINDS, BankEntry, FittedBank, build_bank, load_bank, plan_bank, save_bank
from .estimators import (FINAL_KINDS, KINDS, SINGLETON_KINDS, CateEstimator, DRLearner, IPWLearner,
                         ProjectedSLearner, RLearner, SLearner, TLearner, XLearner, estimator_label, fit_dr,
                         fit_estimator, fit_ipw, fit_projected_s, fit_r, fit_s, fit_t, fit_x,
                         r_learner_problem, x_learner_targets)
from .nuisance import REQUIRED_NUISANCES, NuisanceSet, fit_nuisances, required_nuisances, with_treatment
from .pseudo import dr_pseudo, ipw_pseudo

__all__ = [
    'DEFAULT_KINDS', 'FINAL_KINDS', 'KINDS', 'REQUIRED_NUISANCES', 'SINGLETON_KINDS',
    'BankEntry', 'CateEstimator', 'DRLearner', 'FittedBank', 'IPWLearner', 'NuisanceSet',
    'ProjectedSLearner', 'RLearner', 'SLearner', 'TLearner', 'XLearner',
    'build_bank', 'dr_pseudo', 'estimator_label', 'fit_dr', 'fit_estimator', 'fit_ipw', 'fit_nuisances',
    'fit_projected_s', 'fit_r', 'fit_s', 'fit_t', 'fit_x', 'ipw_pseudo', 'load_bank', 'plan_bank',
    'r_learner_problem', 'required_nuisances', 'save_bank', 'with_treatment', 'x_learner_targets',
]
