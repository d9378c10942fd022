#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "lowcoll/credit/features.hpp"
#include "lowcoll/credit/probit.hpp"

namespace lowcoll::credit {

/// Fitted default-risk model over the four account features.
struct ProbitModel {
  static constexpr int kFormatVersion = 1;

  Eigen::VectorXd coefficients;   // intercept + 4, standardized space
  Eigen::VectorXd feature_means;  // 4
  Eigen::VectorXd feature_stds;   // 4, strictly positive
  std::vector<std::string> feature_names;
  bool converged = false;
  double log_likelihood = 0.0;
  int iterations = 0;
  double max_abs_score = 0.0;
  std::size_t n_observations = 0;
  std::string warning;
};

/// Sorts by (account, as_of) and fits. Needs >= 20 observations and both classes.
ProbitModel fit_probit(std::span<const LabeledObservation> observations, const ProbitFitConfig& config = {});

double linear_predictor(const ProbitModel& model, const FeatureVector& features);

/// Phi(beta . x~). Throws ValidationError for non-finite features.
double predict_proba(const ProbitModel& model, const FeatureVector& features);

double log_likelihood(const ProbitModel& model, std::span<const LabeledObservation> observations);

/// Average marginal effects in raw feature units, kFeatureNames order.
Eigen::Vector4d average_marginal_effects(const ProbitModel& model,
                                         std::span<const LabeledObservation> observations);

nlohmann::json to_json(const ProbitModel& model);

/// Rejects unknown format versions and any feature-name order other than kFeatureNames.
ProbitModel model_from_json(const nlohmann::json& doc);

}  // namespace lowcoll::credit
