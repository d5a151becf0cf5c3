import numpy as np
import pytest

from datagen import DgpSpec, generate
from learners import (NuisanceSet, build_bank, dr_pseudo, estimator_label, fit_dr, fit_estimator, fit_ipw,
                      fit_nuisances, fit_projected_s, fit_r, fit_s, fit_t, fit_x, ipw_pseudo, load_bank, plan_bank,
                      r_learner_problem, save_bank, with_treatment, x_learner_targets)
from models import PropensitySpec, RegressorSpec, SelectionBudget, final_model_bank, fit_propensity, fit_regressor
from tests.helpers import make_oracle
from utils.errors import ConfigError, EstimatorError
from utils.numerics import RngStream

LINEAR = RegressorSpec.of("linear")


def paired_dataset(n_unique=150, scale=1.0):
    """Every x appears once per arm; mu0 = x1 + x2/2, tau = 1 + 2 x1, no noise."""
    gen = np.random.default_rng(11)
    X = gen.standard_normal((n_unique, 2))
    X = np.vstack([X, X])
    W = np.repeat([0.0, 1.0], n_unique)
    mu0 = scale * (X[:, 0] + 0.5 * X[:, 1])
    tau = scale * (1.0 + 2.0 * X[:, 0])
    return make_oracle(X, W, mu0, tau)


def exact_nuisances(ds) -> NuisanceSet:
    """Nuisances that reproduce the paired dataset's conditional means exactly."""
    controls, treated = ds.arm(0), ds.arm(1)
    return NuisanceSet(
        mu_xw=fit_regressor(RegressorSpec.of("linear-poly2-interaction"), with_treatment(ds.X, ds.W), ds.Y),
        mu0=fit_regressor(LINEAR, ds.X[controls], ds.Y[controls]),
        mu1=fit_regressor(LINEAR, ds.X[treated], ds.Y[treated]),
        m_x=fit_regressor(LINEAR, ds.X, ds.Y),
        pi=fit_propensity(ds.X, ds.W, PropensitySpec.of("constant")),
    )


@pytest.fixture
def paired():
    return paired_dataset()


@pytest.fixture
def nuisances(paired):
    return exact_nuisances(paired)


def pehe(estimator, ds):
    return float(np.mean((estimator.predict_cate(ds.X) - ds.tau) ** 2))


def test_ipw_pseudo_examples():
    y1, y0 = ipw_pseudo(np.array([2.0, 3.0]), np.array([1.0, 0.0]), np.array([0.5, 0.25]))
    np.testing.assert_allclose(y1, [4.0, 0.0])
    np.testing.assert_allclose(y0, [0.0, 4.0])
    with pytest.raises(EstimatorError):
        ipw_pseudo(np.array([1.0]), np.array([1.0]), np.array([1.0]))


def test_dr_pseudo_reduces_to_ipw_with_zero_outcome_model():
    gen = np.random.default_rng(0)
    Y, W = gen.standard_normal(20), (gen.random(20) < 0.4).astype(float)
    pi = gen.uniform(0.1, 0.9, 20)
    zeros = np.zeros(20)
    for dr, ipw in zip(dr_pseudo(Y, W, zeros, zeros, pi), ipw_pseudo(Y, W, pi)):
        np.testing.assert_array_equal(dr, ipw)


def test_dr_pseudo_zero_residual_returns_outcome_model():
    mu0, mu1 = np.array([1.0, 2.0]), np.array([3.0, 5.0])
    W = np.array([0.0, 1.0])
    Y = np.where(W == 1, mu1, mu0)
    y1, y0 = dr_pseudo(Y, W, mu0, mu1, np.array([0.3, 0.6]))
    np.testing.assert_allclose(y1, mu1)
    np.testing.assert_allclose(y0, mu0)


def test_ipw_pseudo_unbiased_under_randomization():
    ds = generate(DgpSpec("linear-heterogeneous", confounding_strength=0.0), 5000, RngStream(0, ("ipw",)))
    y1, _ = ipw_pseudo(ds.Y, ds.W, ds.pi)
    se = np.std(y1, ddof=1) / np.sqrt(ds.n)
    assert abs(y1.mean() - ds.Y1.mean()) < 4 * se


def test_dr_pseudo_robust_to_biased_outcome_model():
    ds = generate(DgpSpec("linear-heterogeneous", confounding_strength=1.0), 5000, RngStream(0, ("dr",)))
    y1, y0 = dr_pseudo(ds.Y, ds.W, ds.mu0 + 1.0, ds.mu1 - 1.0, ds.pi)
    effect = y1 - y0
    se = np.std(effect, ddof=1) / np.sqrt(ds.n)
    assert abs(effect.mean() - ds.tau.mean()) < 4 * se


def test_s_and_t_learners_exact_on_noiseless_data(paired, nuisances):
    assert pehe(fit_s(nuisances), paired) < 1e-12
    assert pehe(fit_t(nuisances), paired) < 1e-12
    assert fit_s(nuisances).label == "S|-|-"


def test_s_learner_null_effect():
    ds = paired_dataset()
    flat = make_oracle(ds.X, ds.W, ds.mu0, np.zeros(ds.n))
    nuis = NuisanceSet(mu_xw=fit_regressor(LINEAR, with_treatment(flat.X, flat.W), flat.Y))
    assert np.max(np.abs(fit_s(nuis).predict_cate(flat.X))) < 1e-6


def test_t_learner_routes_arms(paired, nuisances):
    assert nuisances.mu0.n_features == paired.d
    # mu0 was fit on controls only: its prediction equals the control-arm mean surface
    np.testing.assert_allclose(nuisances.mu0.predict(paired.X), paired.mu0, atol=1e-10)
    np.testing.assert_allclose(nuisances.mu1.predict(paired.X), paired.mu1, atol=1e-10)


def test_missing_nuisance_raises(paired):
    with pytest.raises(EstimatorError):
        fit_t(NuisanceSet())
    with pytest.raises(EstimatorError):
        fit_r(NuisanceSet(), LINEAR, paired)


def test_projected_s_matches_s_for_linear_plugin(paired, nuisances):
    projected = fit_projected_s(nuisances, LINEAR, paired)
    s = fit_s(nuisances)
    assert np.max(np.abs(projected.predict_cate(paired.X) - s.predict_cate(paired.X))) < 1e-6
    assert projected.label == "projected-S|linear|-"


def test_projected_s_heavy_ridge_is_constant(paired, nuisances):
    projected = fit_projected_s(nuisances, RegressorSpec.of("ridge", alpha=1e8), paired)
    mu_0, mu_1 = nuisances.joint_plugin(paired.X)
    np.testing.assert_allclose(projected.predict_cate(paired.X), np.mean(mu_1 - mu_0), atol=1e-3)


def test_x_learner_exact_and_convex(paired, nuisances):
    x = fit_x(nuisances, LINEAR, paired, RngStream(0, ("x",)))
    assert pehe(x, paired) < 1e-12
    targets = x_learner_targets(nuisances, paired)
    np.testing.assert_allclose(targets[0][1], paired.tau[targets[0][0]], atol=1e-10)
    np.testing.assert_allclose(targets[1][1], paired.tau[targets[1][0]], atol=1e-10)

    gen = np.random.default_rng(1)
    noisy = make_oracle(paired.X, paired.W, paired.mu0, paired.tau, noise=gen.standard_normal((paired.n, 2)))
    x = fit_x(exact_nuisances(noisy), RegressorSpec.of("decision-tree", max_depth=3), noisy)
    f0, f1, _ = x.components(noisy.X)
    tau_hat = x.predict_cate(noisy.X)
    assert np.all(tau_hat >= np.minimum(f0, f1) - 1e-12)
    assert np.all(tau_hat <= np.maximum(f0, f1) + 1e-12)


def test_dr_learner_recovers_linear_effect(paired, nuisances):
    dr = fit_dr(nuisances, LINEAR, paired)
    assert np.max(np.abs(dr.predict_cate(paired.X) - paired.tau)) < 1e-6


def test_dr_with_zero_outcome_model_equals_ipw_learner(paired, nuisances):
    zero_model = fit_regressor(LINEAR, with_treatment(paired.X, paired.W), np.zeros(paired.n))
    nuis = NuisanceSet(mu_xw=zero_model, pi=nuisances.pi)
    spec = RegressorSpec.of("ridge", alpha=1.0)
    dr = fit_dr(nuis, spec, paired, RngStream(0, ("same",)))
    ipw = fit_ipw(nuis, spec, paired, RngStream(0, ("same",)))
    np.testing.assert_array_equal(dr.predict_cate(paired.X), ipw.predict_cate(paired.X))


def test_r_learner_recovers_linear_effect(paired, nuisances):
    r = fit_r(nuisances, LINEAR, paired)
    assert np.max(np.abs(r.predict_cate(paired.X) - paired.tau)) < 1e-6


def test_r_learner_weighted_loss_identity(paired):
    gen = np.random.default_rng(2)
    noisy = make_oracle(paired.X, paired.W, paired.mu0, paired.tau, noise=gen.standard_normal((paired.n, 2)))
    nuis = exact_nuisances(noisy)
    r = fit_r(nuis, RegressorSpec.of("ridge", alpha=10.0), noisy)
    targets, weights = r_learner_problem(nuis, noisy)
    tau_hat = r.predict_cate(noisy.X)
    residual_y = noisy.Y - nuis.m_x.predict(noisy.X)
    residual_w = noisy.W - nuis.pi.predict(noisy.X)
    r_loss = np.mean((residual_y - tau_hat * residual_w) ** 2)
    assert r_loss == pytest.approx(np.mean(weights * (targets - tau_hat) ** 2), abs=1e-10)


def test_r_learner_zero_residual_targets():
    ds = paired_dataset()
    flat = make_oracle(ds.X, ds.W, ds.mu0, np.zeros(ds.n))
    r = fit_r(exact_nuisances(flat), LINEAR, flat)
    np.testing.assert_allclose(r.predict_cate(flat.X), 0.0, atol=1e-10)


def test_r_learner_scales_with_outcome():
    base, doubled = paired_dataset(scale=1.0), paired_dataset(scale=2.0)
    tau_base = fit_r(exact_nuisances(base), LINEAR, base).predict_cate(base.X)
    tau_doubled = fit_r(exact_nuisances(doubled), LINEAR, doubled).predict_cate(doubled.X)
    np.testing.assert_allclose(tau_doubled, 2.0 * tau_base, atol=1e-8)


def test_fit_estimator_dispatch(paired, nuisances):
    assert fit_estimator("T", nuisances, paired).kind == "T"
    assert fit_estimator("DR", nuisances, paired, LINEAR).label == estimator_label("DR", LINEAR)
    with pytest.raises(EstimatorError):
        fit_estimator("IPW", nuisances, paired)
    with pytest.raises(EstimatorError):
        fit_estimator("causal-forest", nuisances, paired, LINEAR)


def test_plan_bank_counts():
    assert len(plan_bank(final_model_bank(10))) == 2 + 4 * 103
    assert len(plan_bank(final_model_bank(1))) == 54
    assert [e.label for e in plan_bank([])] == ["S|-|-", "T|-|-"]
    with pytest.raises(ConfigError):
        plan_bank([LINEAR, LINEAR])
    with pytest.raises(ConfigError):
        plan_bank([LINEAR], kinds=("S", "Q"))


def test_build_bank_fits_every_member(tmp_path):
    ds = generate(DgpSpec("linear-heterogeneous", d=3), 200, RngStream(0, ("bank",)))
    nuis = fit_nuisances(ds, ("S", "T", "projected-S", "X", "DR", "R"), [LINEAR],
                         budget=SelectionBudget(cv_folds=3), rng=RngStream(0, ("nuisance",)))
    bank = build_bank(nuis, ds, final_model_bank(1), rng=RngStream(0, ("bank",)))
    assert len(bank) == 54 and not bank.failures
    labels = [estimator.label for estimator in bank]
    assert len(set(labels)) == len(labels)

    path = save_bank(bank, str(tmp_path / "bank" / "bank.joblib"))
    loaded = load_bank(path)
    for a, b in zip(bank, loaded):
        np.testing.assert_array_equal(a.predict_cate(ds.X[:10]), b.predict_cate(ds.X[:10]))


def test_fit_nuisances_fits_only_what_kinds_need():
    ds = generate(DgpSpec("linear-heterogeneous", d=2), 100, RngStream(0, ("only",)))
    nuis = fit_nuisances(ds, ("IPW",), [LINEAR], rng=RngStream(0, ("n",)))
    assert nuis.pi is not None
    assert nuis.mu_xw is None and nuis.mu0 is None and nuis.mu1 is None and nuis.m_x is None
