from .context import BoundContext, MetricContext, fit_metric_context, nearest_opposite
from .metrics import (BASE_METRICS, CLIP_PRESETS, DEFAULT_METRICS, MAXIMIZE, MINIMIZE, ORACLE, MetricDescriptor,
                      ScoreOptions, ScoreValue, clip_rows, decision, describe_metric, evaluate_metric,
                      expand_metrics, influence_score, influence_terms, matching_score, oracle_pehe, r_score,
                      tau_dr_score, tau_iptw_score, tau_s_score, tau_t_score, value_dr_score,
                      value_dr_standard_score, value_score)

__all__ = [
    'BASE_METRICS', 'CLIP_PRESETS', 'DEFAULT_METRICS', 'MAXIMIZE', 'MINIMIZE', 'ORACLE',
    'BoundContext', 'MetricContext', 'MetricDescriptor', 'ScoreOptions', 'ScoreValue',
    'clip_rows', 'decision', 'describe_metric', 'evaluate_metric', 'expand_metrics', 'fit_metric_context',
    'influence_score', 'influence_terms', 'matching_score', 'nearest_opposite', 'oracle_pehe', 'r_score',
    'tau_dr_score', 'tau_iptw_score', 'tau_s_score', 'tau_t_score', 'value_dr_score',
    'value_dr_standard_score', 'value_score',
]
