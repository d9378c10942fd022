#include <gtest/gtest.h>

#include <cmath>

#include <nlohmann/json.hpp>

#include "lowcoll/credit/features.hpp"
#include "lowcoll/credit/normal.hpp"
#include "lowcoll/credit/probit.hpp"
#include "lowcoll/credit/probit_model.hpp"
#include "lowcoll/error.hpp"
#include "lowcoll/ledger/event.hpp"
#include "lowcoll/ledger/timeline.hpp"
#include "lowcoll/rng.hpp"
#include "test_support.hpp"

using namespace lowcoll;
using namespace lowcoll::credit;

namespace {

constexpr std::int64_t kT0 = 1661990400;
constexpr std::int64_t kDay = ledger::kSecondsPerDay;
const std::string kA = "0x" + std::string(40, 'a');

ledger::TimelineMap fixture_timelines() {
  const auto events = ledger::parse_event_log(lowcoll::testing::slurp(lowcoll::testing::fixture("mini_market.jsonl")),
                                              ledger::LogFormat::Jsonl);
  return ledger::build_timelines(events);
}

double gaussian(CounterRng& rng) {
  const double u1 = 1.0 - rng.uniform();
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

struct Synthetic {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
};

// Labels drawn from Phi(0.5 - 1.2 x1 + 0.8 x2).
Synthetic two_feature_sample(int n, std::uint64_t seed) {
  CounterRng rng(seed, 0, 0);
  Synthetic s{Eigen::MatrixXd(n, 2), Eigen::VectorXd(n)};
  for (int i = 0; i < n; ++i) {
    s.x(i, 0) = gaussian(rng);
    s.x(i, 1) = gaussian(rng);
    const double p = normal_cdf(0.5 - 1.2 * s.x(i, 0) + 0.8 * s.x(i, 1));
    s.y(i) = rng.uniform() < p ? 1.0 : 0.0;
  }
  return s;
}

std::vector<LabeledObservation> four_feature_sample(int n, std::uint64_t seed) {
  CounterRng rng(seed, 0, 0);
  std::vector<LabeledObservation> out;
  for (int i = 0; i < n; ++i) {
    LabeledObservation o;
    o.account = "0x" + std::to_string(1000 + i);
    o.as_of = kT0;
    o.features.account_age_days = rng.uniform(0.0, 200.0);
    o.features.tx_count_2w = static_cast<std::int64_t>(rng.below(12));
    o.features.payment_count_2w = static_cast<std::int64_t>(rng.below(5));
    o.features.avg_daily_coll_to_debt_2w = rng.uniform(1.0, 3.0);
    const double eta = -1.0 - 0.01 * o.features.account_age_days + 0.1 * o.features.tx_count_2w -
                       0.5 * o.features.payment_count_2w + 0.2 * o.features.avg_daily_coll_to_debt_2w;
    o.label = rng.uniform() < normal_cdf(eta) ? 1 : 0;
    out.push_back(o);
  }
  return out;
}

}  // namespace

TEST(Normal, CdfValuesAndTails) {
  EXPECT_NEAR(normal_cdf(1.0), 0.8413447460685429, 1e-15);
  EXPECT_NEAR(normal_cdf(0.0), 0.5, 1e-16);
  EXPECT_LT(normal_cdf(-10.0), 1e-22);
  EXPECT_GT(normal_cdf(-10.0), 0.0);
  EXPECT_NEAR(log_normal_cdf(-40.0), std::log(normal_pdf(-40.0L) / 40.0L) - 1.0 / 1600.0, 1e-6);
  EXPECT_TRUE(std::isfinite(log_normal_cdf(-1000.0)));
  EXPECT_NEAR(inverse_mills(-50.0), 50.0 + 1.0 / 50.0, 1e-3);
}

TEST(Probit, RecoversGeneratingCoefficients) {
  const Synthetic s = two_feature_sample(5000, 42);
  const ProbitFit fit = fit_probit(s.x, s.y);
  ASSERT_TRUE(fit.converged) << fit.warning;
  const Eigen::VectorXd raw = raw_coefficients(fit.coefficients, fit.means, fit.stds);
  EXPECT_NEAR(raw(0), 0.5, 0.1);
  EXPECT_NEAR(raw(1), -1.2, 0.1);
  EXPECT_NEAR(raw(2), 0.8, 0.1);
  EXPECT_LT(fit.max_abs_score, 1e-4);
}

TEST(Probit, GradientMatchesFiniteDifferences) {
  const Synthetic s = two_feature_sample(2000, 9);
  const ProbitFit fit = fit_probit(s.x, s.y);
  const Eigen::MatrixXd design = standardized_design(s.x, fit.means, fit.stds);
  CounterRng rng(10, 0, 0);
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::VectorXd beta(3);
    for (int j = 0; j < 3; ++j) beta(j) = rng.uniform(-1.5, 1.5);
    const Eigen::VectorXd g = probit_objective_gradient(design, s.y, beta, 1e-3);
    for (int j = 0; j < 3; ++j) {
      const double h = 1e-5;
      Eigen::VectorXd up = beta, down = beta;
      up(j) += h;
      down(j) -= h;
      const double fd = (probit_objective(design, s.y, up, 1e-3) - probit_objective(design, s.y, down, 1e-3)) / (2 * h);
      EXPECT_NEAR(g(j), fd, 1e-6 * std::max(1.0, std::abs(fd))) << "coordinate " << j;
    }
  }
}

TEST(Probit, ObjectiveNeverDecreases) {
  const Synthetic s = two_feature_sample(3000, 11);
  const ProbitFit fit = fit_probit(s.x, s.y);
  ASSERT_GE(fit.objective_trace.size(), 2u);
  for (std::size_t i = 1; i < fit.objective_trace.size(); ++i) {
    EXPECT_GE(fit.objective_trace[i], fit.objective_trace[i - 1]);
  }
}

TEST(Probit, DuplicatedDataSameCoefficients) {
  const Synthetic s = two_feature_sample(1500, 12);
  Eigen::MatrixXd x2(3000, 2);
  x2 << s.x, s.x;
  Eigen::VectorXd y2(3000);
  y2 << s.y, s.y;
  const ProbitFit once = fit_probit(s.x, s.y);
  const ProbitFit twice = fit_probit(x2, y2);
  EXPECT_LT((once.coefficients - twice.coefficients).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_NEAR(twice.log_likelihood, 2.0 * once.log_likelihood, 1e-6 * std::abs(once.log_likelihood));
}

TEST(Probit, AffineRescalingLeavesPredictionsUnchanged) {
  const Synthetic s = two_feature_sample(2000, 13);
  Eigen::MatrixXd scaled = s.x;
  scaled.col(0) = scaled.col(0) * 1000.0 + Eigen::VectorXd::Constant(scaled.rows(), 5e4);
  scaled.col(1) *= 0.001;
  const ProbitFit a = fit_probit(s.x, s.y);
  const ProbitFit b = fit_probit(scaled, s.y);
  const Eigen::VectorXd pa = (standardized_design(s.x, a.means, a.stds) * a.coefficients);
  const Eigen::VectorXd pb = (standardized_design(scaled, b.means, b.stds) * b.coefficients);
  EXPECT_LT((pa - pb).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Probit, RejectsDegenerateInput) {
  const Synthetic s = two_feature_sample(100, 14);
  EXPECT_THROW(fit_probit(s.x, Eigen::VectorXd::Zero(100)), DegenerateLabels);
  EXPECT_THROW(fit_probit(s.x, Eigen::VectorXd::Ones(100)), DegenerateLabels);
  Eigen::MatrixXd constant = s.x;
  constant.col(1).setConstant(3.0);
  EXPECT_THROW(fit_probit(constant, s.y), ValidationError);
  EXPECT_THROW(fit_probit(s.x.topRows(19), s.y.head(19)), ValidationError);
}

TEST(ProbitModel, MarginalEffectsMatchFiniteDifferences) {
  const auto obs = four_feature_sample(3000, 15);
  const ProbitModel model = fit_probit(obs);
  const Eigen::Vector4d ame = average_marginal_effects(model, obs);
  const double h = 1e-5;
  for (int j = 0; j < kFeatureCount; ++j) {
    double fd = 0.0;
    for (const auto& o : obs) {
      Eigen::Vector4d vu = o.features.as_vector(), vd = vu;
      vu(j) += h;
      vd(j) -= h;
      const auto eta = [&](const Eigen::Vector4d& v) {
        double e = model.coefficients(0);
        for (int k = 0; k < 4; ++k) e += model.coefficients(k + 1) * (v(k) - model.feature_means(k)) / model.feature_stds(k);
        return e;
      };
      fd += (normal_cdf(eta(vu)) - normal_cdf(eta(vd))) / (2 * h);
    }
    fd /= static_cast<double>(obs.size());
    EXPECT_NEAR(ame(j), fd, 1e-6) << kFeatureNames[j];
  }
}

TEST(ProbitModel, MarginalEffectOfSingleObservation) {
  const auto obs = four_feature_sample(500, 16);
  const ProbitModel model = fit_probit(obs);
  LabeledObservation one;
  one.features.account_age_days = model.feature_means(0);
  one.features.tx_count_2w = 3;
  one.features.payment_count_2w = 1;
  one.features.avg_daily_coll_to_debt_2w = model.feature_means(3);
  double eta = model.coefficients(0);
  for (int k = 1; k <= 2; ++k) {
    const double raw = k == 1 ? 3.0 : 1.0;
    eta += model.coefficients(k + 1) * (raw - model.feature_means(k)) / model.feature_stds(k);
  }
  EXPECT_NEAR(linear_predictor(model, one.features), eta, 1e-12);
  const Eigen::Vector4d ame = average_marginal_effects(model, std::span(&one, 1));
  for (int j = 0; j < kFeatureCount; ++j) {
    EXPECT_NEAR(ame(j), model.coefficients(j + 1) * normal_pdf(eta) / model.feature_stds(j), 1e-14);
  }
}

TEST(ProbitModel, PredictionsAndJson) {
  const auto obs = four_feature_sample(400, 17);
  const ProbitModel model = fit_probit(obs);
  for (const auto& o : obs) {
    const double p = predict_proba(model, o.features);
    ASSERT_GE(p, 0.0);
    ASSERT_LE(p, 1.0);
  }
  FeatureVector bad;
  bad.account_age_days = std::nan("");
  EXPECT_THROW(predict_proba(model, bad), ValidationError);

  const ProbitModel back = model_from_json(nlohmann::json::parse(to_json(model).dump()));
  EXPECT_EQ(back.coefficients, model.coefficients);
  EXPECT_EQ(back.feature_stds, model.feature_stds);
  EXPECT_EQ(predict_proba(back, obs[3].features), predict_proba(model, obs[3].features));

  auto swapped = to_json(model);
  std::swap(swapped["feature_names"][0], swapped["feature_names"][1]);
  EXPECT_THROW(model_from_json(swapped), ValidationError);
  auto version = to_json(model);
  version["format_version"] = 99;
  EXPECT_THROW(model_from_json(version), ValidationError);
}

TEST(ProbitModel, FitIgnoresInputOrder) {
  auto obs = four_feature_sample(600, 18);
  const ProbitModel a = fit_probit(obs);
  std::reverse(obs.begin(), obs.end());
  const ProbitModel b = fit_probit(obs);
  EXPECT_EQ(a.coefficients, b.coefficients);
}

TEST(Features, FixtureAccountAtDay30) {
  const auto timelines = fixture_timelines();
  const FeatureVector f = extract_features(timelines.at(kA), kT0 + 30 * kDay);
  EXPECT_DOUBLE_EQ(f.account_age_days, 30.0);
  EXPECT_EQ(f.tx_count_2w, 4);
  EXPECT_EQ(f.payment_count_2w, 2);
  EXPECT_NEAR(f.avg_daily_coll_to_debt_2w, 1.8, 1e-12);
  EXPECT_THROW(extract_features(timelines.at(kA), kT0 - 1), ValidationError);
}

TEST(Features, SingleEventAtSnapshot) {
  const auto timelines = fixture_timelines();
  const FeatureVector f = extract_features(timelines.at(kA), kT0);
  EXPECT_DOUBLE_EQ(f.account_age_days, 0.0);
  EXPECT_EQ(f.tx_count_2w, 1);
  EXPECT_EQ(f.payment_count_2w, 0);
}

TEST(Observations, FixtureHasOneLabeledSnapshot) {
  const auto obs = build_observations(fixture_timelines());
  ASSERT_EQ(obs.size(), 1u);
  EXPECT_EQ(obs[0].account, kA);
  EXPECT_EQ(obs[0].as_of, kT0 + 14 * kDay);
  EXPECT_EQ(obs[0].debt_at_as_of, Money::from_usd(1000));
  EXPECT_EQ(obs[0].label, 1);
}

TEST(Observations, LabelBoundary) {
  EXPECT_EQ(non_paydown_label(Money::from_usd(100), Money::from_usd(50)), 0);
  EXPECT_EQ(non_paydown_label(Money::from_usd(100), Money::parse("49.999999")), 1);
  EXPECT_EQ(non_paydown_label(Money::from_micros(3), Money::from_micros(2)), 0);
  EXPECT_EQ(non_paydown_label(Money::from_micros(3), Money::from_micros(1)), 1);
}
