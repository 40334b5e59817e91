#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "jlcid/likelihood.hpp"
#include "jlcid/parameters.hpp"

namespace jlcid {

using Objective = std::function<double(const Eigen::VectorXd&)>;

struct OptimizerConfig {
  double eps_loglik = 1e-3;  // |change in log-likelihood|
  double eps_param = 1e-3;   // max |change in estimates|
  double eps_rdm = 1e-2;     // gradient' * inverse(-Hessian) * gradient
  int max_iter = 150;
  int n_starts = 10;
  std::uint64_t seed = 12345;
  double fd_step = 1e-4;  // relative step for numerical derivatives
  int workers = 0;
  bool verbose = false;
};

// Central differences with per-coordinate step fd_step * max(|x_j|, 1).
// A non-finite objective value at a probe point raises numeric_error naming
// the coordinate. Probe evaluations run in parallel.
Eigen::VectorXd numeric_gradient(const Objective& f, const Eigen::VectorXd& x,
                                 double fd_step = 1e-4, int workers = 0);
// Differenced gradients, symmetrized.
Eigen::MatrixXd numeric_hessian(const Objective& f, const Eigen::VectorXd& x,
                                double fd_step = 1e-4, int workers = 0);

struct ConvergenceCriteria {
  double d_loglik = 0.0;
  double d_param = 0.0;
  double rdm = 0.0;
};

struct MarquardtResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int n_iter = 0;
  bool converged = false;
  ConvergenceCriteria criteria;
};

// Newton-type ascent with diagonal Hessian inflation and a backtracking line
// search (with one doubling probe). Stops when the likelihood change, the
// parameter change and gradient'*(-H)^{-1}*gradient all fall under their
// thresholds.
MarquardtResult marquardt_maximize(const Objective& f, const Eigen::VectorXd& x0,
                                   const OptimizerConfig& cfg);

struct FitResult {
  ParameterSet theta;
  Eigen::VectorXd theta_vec;
  double loglik = 0.0;
  double bic = 0.0;
  Eigen::VectorXd se_vec;  // standard errors of the free coordinates
  int n_iter = 0;
  bool converged = false;
  ConvergenceCriteria criteria;
  int start_index = 0;
  int n_params = 0;
  int n_subjects = 0;

  // Estimate/SE on the reported scale of each coordinate (Weibull parameters
  // on the square-root scale, other constrained parameters squared, delta
  // method on the SE) and on the natural scale.
  struct Reported {
    std::vector<std::string> names;
    Eigen::VectorXd value, se;
  };
  Reported reported(const ModelSpec& spec) const;
  Reported natural(const ModelSpec& spec) const;
};

double bic(double loglik, int n_params, int n_subjects);

// Multi-start maximum likelihood: start 0 is theta_init, later starts are
// multiplicative jitters of it. Returns the best converged start (best
// overall when none converged, flagged).
FitResult fit(const LikelihoodProblem& problem, const ParameterSet& theta_init,
              const OptimizerConfig& cfg);
FitResult fit(const Dataset& data, const ModelSpec& spec, const ParameterSet& theta_init,
              const OptimizerConfig& cfg);

// Moment-based default starting point when none is supplied.
ParameterSet default_init(const Dataset& data, const ModelSpec& spec);

}  // namespace jlcid
