#pragma once

#include <Eigen/Core>
#include <memory>
#include <vector>

#include "jlcid/model_spec.hpp"
#include "jlcid/parameters.hpp"
#include "jlcid/quadrature.hpp"
#include "jlcid/subject.hpp"

namespace jlcid {

// Multinomial-logit class membership probabilities; the last class is the
// reference (zero coefficients). class_covs excludes the intercept.
Eigen::VectorXd class_membership_probs(const Eigen::MatrixXd& zeta,
                                       const Eigen::VectorXd& class_covs);

// Event-history contribution of one subject given the class, by observation
// pattern. These compose the hazard functions directly with quadrature and
// serve as the reference path; the cached evaluator below must agree with
// them. Results are probabilities (densities when an event is observed
// exactly), on the hazard time scale.
double contribution_demented(const SubjectRecord& rec, int g, const ParameterSet& theta,
                             const ModelSpec& spec);
double contribution_healthy(const SubjectRecord& rec, int g, const ParameterSet& theta,
                            const ModelSpec& spec);
double contribution_unknown(const SubjectRecord& rec, int g, const ParameterSet& theta,
                            const ModelSpec& spec);

// Cached full-dataset evaluator. Precomputes hazard times, quadrature nodes
// and longitudinal sufficient statistics once per dataset so that repeated
// evaluations (numerical derivatives, line searches) stay cheap.
class LikelihoodProblem {
 public:
  LikelihoodProblem(const Dataset& data, const ModelSpec& spec);
  ~LikelihoodProblem();
  LikelihoodProblem(LikelihoodProblem&&) noexcept;

  const ModelSpec& spec() const { return spec_; }
  int n_subjects() const;

  // Full mixture log-likelihood including the delayed-entry correction.
  double eval(const ParameterSet& theta) const;
  double eval_vec(const Eigen::VectorXd& theta_vec) const;

  // log(pi_g f(Y|g) P(D|g)) per subject and class (no entry correction);
  // the building block of posterior class probabilities.
  Eigen::MatrixXd class_log_weights(const ParameterSet& theta) const;

  // log sum_g pi_g exp(-A01g - A02g) at entry, per subject.
  Eigen::VectorXd entry_log_terms(const ParameterSet& theta) const;

  int workers = 0;  // 0 = default

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  ModelSpec spec_;
};

// Convenience one-shot evaluations.
double log_likelihood(const Dataset& data, const ParameterSet& theta, const ModelSpec& spec);

// Naive competing-risks mixture log-likelihood on a first-event dataset
// (see impute_competing); spec.family must be competing_risks.
double log_likelihood_competing(const Dataset& data, const ParameterSet& theta,
                                const ModelSpec& spec);

}  // namespace jlcid
