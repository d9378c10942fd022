#include "lowcoll/credit/probit_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include <Eigen/Cholesky>

#include "lowcoll/error.hpp"

namespace lowcoll::credit {

using json = nlohmann::json;

namespace {

constexpr std::size_t kMinObservations = 20;
constexpr int kMaxHalvings = 60;

void check_labels(const Eigen::VectorXd& labels) {
  Eigen::Index positives = 0;
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    if (labels(i) != 0.0 && labels(i) != 1.0) throw ValidationError("labels must be 0 or 1");
    if (labels(i) == 1.0) ++positives;
  }
  if (positives == 0 || positives == labels.size()) {
    throw DegenerateLabels("training labels contain a single class");
  }
}

Eigen::VectorXd penalty_mask(Eigen::Index p) {
  Eigen::VectorXd mask = Eigen::VectorXd::Ones(p);
  mask(0) = 0.0;
  return mask;
}

Eigen::VectorXd standardized_row(const ProbitModel& model, const FeatureVector& features) {
  const Eigen::Vector4d raw = features.as_vector();
  if (!raw.allFinite()) throw ValidationError("non-finite feature value");
  Eigen::VectorXd x(kFeatureCount + 1);
  x(0) = 1.0;
  x.tail(kFeatureCount) = (raw - model.feature_means).cwiseQuotient(model.feature_stds);
  return x;
}

Eigen::MatrixXd model_design(const ProbitModel& model, std::span<const LabeledObservation> observations) {
  return standardized_design(feature_matrix(observations), model.feature_means, model.feature_stds);
}

}  // namespace

Eigen::MatrixXd standardized_design(const Eigen::MatrixXd& raw, const Eigen::VectorXd& means,
                                    const Eigen::VectorXd& stds) {
  Eigen::MatrixXd design(raw.rows(), raw.cols() + 1);
  design.col(0).setOnes();
  design.rightCols(raw.cols()) =
      (raw.rowwise() - means.transpose()).array().rowwise() / stds.transpose().array();
  return design;
}

double probit_objective(const Eigen::MatrixXd& design, const Eigen::VectorXd& labels,
                        const Eigen::VectorXd& beta, double ridge) {
  const double n = static_cast<double>(design.rows());
  const double penalty = beta.tail(beta.size() - 1).squaredNorm();
  return probit_log_likelihood(design, labels, beta) - 0.5 * ridge * n * penalty;
}

Eigen::VectorXd probit_objective_gradient(const Eigen::MatrixXd& design, const Eigen::VectorXd& labels,
                                          const Eigen::VectorXd& beta, double ridge) {
  const double n = static_cast<double>(design.rows());
  const auto d = probit_derivatives(design, labels, beta);
  return d.gradient - ridge * n * beta.cwiseProduct(penalty_mask(beta.size()));
}

ProbitFit fit_probit(const Eigen::MatrixXd& raw, const Eigen::VectorXd& labels, const ProbitFitConfig& config) {
  if (raw.rows() != labels.size()) throw ValidationError("feature and label counts differ");
  if (static_cast<std::size_t>(raw.rows()) < kMinObservations) {
    throw ValidationError("probit fit needs at least 20 observations");
  }
  if (!raw.allFinite()) throw ValidationError("non-finite feature value");
  check_labels(labels);

  ProbitFit fit;
  const double n = static_cast<double>(raw.rows());
  fit.means = raw.colwise().mean().transpose();
  fit.stds = ((raw.rowwise() - fit.means.transpose()).array().square().colwise().sum() / n).sqrt().transpose();
  for (Eigen::Index j = 0; j < fit.stds.size(); ++j) {
    if (!(fit.stds(j) > 1e-12 * std::max(1.0, std::abs(fit.means(j))))) {
      throw ValidationError("feature column " + std::to_string(j) + " is constant");
    }
  }

  const Eigen::MatrixXd design = standardized_design(raw, fit.means, fit.stds);
  const Eigen::Index p = design.cols();
  const Eigen::VectorXd mask = penalty_mask(p);
  const double penalty_weight = config.ridge * n;

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  double objective = probit_objective(design, labels, beta, config.ridge);
  fit.objective_trace.push_back(objective);

  auto gradient_at = [&](const Eigen::VectorXd& b, Eigen::MatrixXd* hessian) {
    const auto d = probit_derivatives(design, labels, b);
    if (hessian != nullptr) {
      *hessian = -d.hessian;
      hessian->diagonal() += penalty_weight * mask;
    }
    return Eigen::VectorXd(d.gradient - penalty_weight * b.cwiseProduct(mask));
  };

  Eigen::MatrixXd information;
  Eigen::VectorXd gradient = gradient_at(beta, &information);
  for (int iter = 0; iter < config.max_iter; ++iter) {
    if (gradient.cwiseAbs().maxCoeff() < config.tol) {
      fit.converged = true;
      break;
    }
    const Eigen::VectorXd step = information.ldlt().solve(gradient);
    double scale = 1.0;
    bool accepted = false;
    Eigen::VectorXd candidate;
    Eigen::VectorXd candidate_gradient;
    Eigen::MatrixXd candidate_information;
    for (int h = 0; h < kMaxHalvings; ++h, scale *= 0.5) {
      candidate = beta + scale * step;
      const double value = probit_objective(design, labels, candidate, config.ridge);
      if (!std::isfinite(value)) continue;
      if (value >= objective) {
        candidate_gradient = gradient_at(candidate, &candidate_information);
        objective = value;
        accepted = true;
        break;
      }
      // At the resolution floor of the objective, fall back to the score norm.
      if (value >= objective - 1e-13 * std::max(1.0, std::abs(objective))) {
        candidate_gradient = gradient_at(candidate, &candidate_information);
        if (candidate_gradient.cwiseAbs().maxCoeff() < gradient.cwiseAbs().maxCoeff()) {
          objective = std::max(objective, value);
          accepted = true;
          break;
        }
      }
    }
    if (!accepted) {
      fit.warning = "step halving failed to improve the objective";
      break;
    }
    beta = candidate;
    gradient = candidate_gradient;
    information = candidate_information;
    fit.objective_trace.push_back(objective);
    ++fit.iterations;
  }
  if (!fit.converged && gradient.cwiseAbs().maxCoeff() < config.tol) fit.converged = true;
  if (!fit.converged && fit.warning.empty()) {
    fit.warning = "no convergence within " + std::to_string(config.max_iter) +
                  " iterations (possible perfect separation)";
  }

  fit.coefficients = beta;
  fit.objective = probit_objective(design, labels, beta, config.ridge);
  fit.log_likelihood = probit_log_likelihood(design, labels, beta);
  fit.max_abs_score = gradient.cwiseAbs().maxCoeff();
  return fit;
}

Eigen::VectorXd raw_coefficients(const Eigen::VectorXd& standardized, const Eigen::VectorXd& means,
                                 const Eigen::VectorXd& stds) {
  Eigen::VectorXd raw(standardized.size());
  const Eigen::VectorXd slopes = standardized.tail(standardized.size() - 1).cwiseQuotient(stds);
  raw(0) = standardized(0) - slopes.dot(means);
  raw.tail(slopes.size()) = slopes;
  return raw;
}

ProbitModel fit_probit(std::span<const LabeledObservation> observations, const ProbitFitConfig& config) {
  std::vector<LabeledObservation> sorted(observations.begin(), observations.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const LabeledObservation& a, const LabeledObservation& b) {
    return std::tie(a.account, a.as_of) < std::tie(b.account, b.as_of);
  });
  const Eigen::VectorXd labels = label_vector(sorted);
  if (sorted.size() >= kMinObservations) check_labels(labels);
  const ProbitFit fit = fit_probit(feature_matrix(sorted), labels, config);

  ProbitModel model;
  model.coefficients = fit.coefficients;
  model.feature_means = fit.means;
  model.feature_stds = fit.stds;
  model.feature_names.assign(kFeatureNames.begin(), kFeatureNames.end());
  model.converged = fit.converged;
  model.log_likelihood = fit.log_likelihood;
  model.iterations = fit.iterations;
  model.max_abs_score = fit.max_abs_score;
  model.n_observations = sorted.size();
  model.warning = fit.warning;
  return model;
}

double linear_predictor(const ProbitModel& model, const FeatureVector& features) {
  return model.coefficients.dot(standardized_row(model, features));
}

double predict_proba(const ProbitModel& model, const FeatureVector& features) {
  return normal_cdf(linear_predictor(model, features));
}

double log_likelihood(const ProbitModel& model, std::span<const LabeledObservation> observations) {
  return probit_log_likelihood(model_design(model, observations), label_vector(observations),
                               model.coefficients);
}

Eigen::Vector4d average_marginal_effects(const ProbitModel& model,
                                         std::span<const LabeledObservation> observations) {
  if (observations.empty()) throw ValidationError("marginal effects need at least one observation");
  const Eigen::VectorXd standardized =
      probit_average_marginal_effects(model_design(model, observations), model.coefficients);
  return standardized.cwiseQuotient(model.feature_stds);
}

json to_json(const ProbitModel& model) {
  auto vec = [](const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  return {{"format_version", ProbitModel::kFormatVersion},
          {"feature_names", model.feature_names},
          {"coefficients", vec(model.coefficients)},
          {"feature_means", vec(model.feature_means)},
          {"feature_stds", vec(model.feature_stds)},
          {"diagnostics",
           {{"converged", model.converged},
            {"log_likelihood", model.log_likelihood},
            {"iterations", model.iterations},
            {"max_abs_score", model.max_abs_score},
            {"n_observations", model.n_observations}}}};
}

ProbitModel model_from_json(const json& doc) {
  try {
    if (doc.at("format_version").get<int>() != ProbitModel::kFormatVersion) {
      throw ValidationError("unsupported model format version");
    }
    ProbitModel model;
    model.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
    if (!std::equal(model.feature_names.begin(), model.feature_names.end(), kFeatureNames.begin(),
                    kFeatureNames.end())) {
      throw ValidationError("model feature names do not match the expected schema");
    }
    auto vec = [&](const char* key, std::size_t size) {
      const auto values = doc.at(key).get<std::vector<double>>();
      if (values.size() != size) throw ValidationError(std::string("wrong length for ") + key);
      return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(size)));
    };
    model.coefficients = vec("coefficients", kFeatureCount + 1);
    model.feature_means = vec("feature_means", kFeatureCount);
    model.feature_stds = vec("feature_stds", kFeatureCount);
    if ((model.feature_stds.array() <= 0.0).any()) {
      throw ValidationError("model feature stds must be positive");
    }
    const json& diag = doc.at("diagnostics");
    model.converged = diag.at("converged").get<bool>();
    model.log_likelihood = diag.at("log_likelihood").get<double>();
    model.iterations = diag.at("iterations").get<int>();
    model.max_abs_score = diag.value("max_abs_score", 0.0);
    model.n_observations = diag.at("n_observations").get<std::size_t>();
    return model;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("invalid model file: ") + e.what());
  }
}

}  // namespace lowcoll::credit
