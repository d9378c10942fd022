#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lowcoll/credit/normal.hpp"

namespace lowcoll::credit {

/// Probit log-likelihood sum_i log Phi(q_i * x_i.beta), q_i = 2*y_i - 1.
/// `design` holds one observation per row, intercept column included.
template <typename DerivedX, typename DerivedY, typename DerivedB>
typename DerivedB::Scalar probit_log_likelihood(const Eigen::MatrixBase<DerivedX>& design,
                                                const Eigen::MatrixBase<DerivedY>& labels,
                                                const Eigen::MatrixBase<DerivedB>& beta) {
  using Scalar = typename DerivedB::Scalar;
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> eta = design * beta;
  // Extended-precision accumulation keeps the objective resolved near the
  // optimum, where Newton steps change it by less than one double ulp.
  long double total = 0.0L;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    const Scalar q = labels(i) > Scalar(0.5) ? Scalar(1) : Scalar(-1);
    total += static_cast<long double>(log_normal_cdf(q * eta(i)));
  }
  return static_cast<Scalar>(total);
}

template <typename Scalar>
struct ProbitDerivatives {
  Scalar log_likelihood{};
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> gradient;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> hessian;
};

/// Log-likelihood, score and observed Hessian in one pass.
template <typename DerivedX, typename DerivedY, typename DerivedB>
ProbitDerivatives<typename DerivedB::Scalar> probit_derivatives(
    const Eigen::MatrixBase<DerivedX>& design, const Eigen::MatrixBase<DerivedY>& labels,
    const Eigen::MatrixBase<DerivedB>& beta) {
  using Scalar = typename DerivedB::Scalar;
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> eta = design * beta;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> dl(eta.size());
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> curvature(eta.size());
  long double total = 0.0L;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    const Scalar q = labels(i) > Scalar(0.5) ? Scalar(1) : Scalar(-1);
    total += static_cast<long double>(log_normal_cdf(q * eta(i)));
    const Scalar lambda = q * inverse_mills(q * eta(i));
    dl(i) = lambda;
    curvature(i) = lambda * (lambda + eta(i));
  }
  ProbitDerivatives<Scalar> out;
  out.log_likelihood = static_cast<Scalar>(total);
  out.gradient = design.transpose() * dl;
  out.hessian = -(design.transpose() * curvature.asDiagonal() * design);
  return out;
}

/// Average marginal effect of each column of `design` (intercept excluded):
/// mean_i beta_j * phi(x_i.beta), for j = 1..p-1.
template <typename DerivedX, typename DerivedB>
Eigen::Matrix<typename DerivedB::Scalar, Eigen::Dynamic, 1> probit_average_marginal_effects(
    const Eigen::MatrixBase<DerivedX>& design, const Eigen::MatrixBase<DerivedB>& beta) {
  using Scalar = typename DerivedB::Scalar;
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> eta = design * beta;
  const Scalar mean_density = eta.unaryExpr([](Scalar v) { return normal_pdf(v); }).mean();
  return beta.tail(beta.size() - 1) * mean_density;
}

struct ProbitFitConfig {
  double tol = 1e-8;
  int max_iter = 100;
  double ridge = 1e-6;
};

/// Fit in standardized space: coefficients apply to [1, (x - mean) / std].
struct ProbitFit {
  Eigen::VectorXd coefficients;
  Eigen::VectorXd means;
  Eigen::VectorXd stds;
  bool converged = false;
  int iterations = 0;
  double log_likelihood = 0.0;
  double objective = 0.0;
  double max_abs_score = 0.0;
  /// Penalized objective after each accepted iterate, starting at the origin.
  std::vector<double> objective_trace;
  std::string warning;
};

/// z-score columns of `raw` (population std) and prepend an intercept column.
Eigen::MatrixXd standardized_design(const Eigen::MatrixXd& raw, const Eigen::VectorXd& means,
                                    const Eigen::VectorXd& stds);

/// Penalized objective maximized by fit_probit:
/// loglik - ridge * n / 2 * |beta_slopes|^2. Scaling the penalty with n makes
/// duplicated data fit to the same coefficients.
double probit_objective(const Eigen::MatrixXd& design, const Eigen::VectorXd& labels,
                        const Eigen::VectorXd& beta, double ridge);
Eigen::VectorXd probit_objective_gradient(const Eigen::MatrixXd& design, const Eigen::VectorXd& labels,
                                          const Eigen::VectorXd& beta, double ridge);

/// Newton-Raphson with step halving on standardized features.
/// Throws DegenerateLabels for single-class labels and ValidationError for a
/// constant feature column or fewer than 20 rows.
ProbitFit fit_probit(const Eigen::MatrixXd& raw, const Eigen::VectorXd& labels,
                     const ProbitFitConfig& config = {});

/// Coefficients mapped back to raw feature units (intercept first).
Eigen::VectorXd raw_coefficients(const Eigen::VectorXd& standardized, const Eigen::VectorXd& means,
                                 const Eigen::VectorXd& stds);

}  // namespace lowcoll::credit
