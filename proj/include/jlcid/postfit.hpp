#pragma once

#include <Eigen/Core>
#include <array>
#include <vector>

#include "jlcid/likelihood.hpp"
#include "jlcid/model_spec.hpp"
#include "jlcid/parameters.hpp"
#include "jlcid/subject.hpp"

namespace jlcid {

struct PosteriorTable {
  Eigen::MatrixXd probs;       // n x G, rows sum to 1
  std::vector<int> assigned;   // argmax class per subject (0-based)
  Eigen::MatrixXd class_mean;  // G x G mean posterior by assigned class
  Eigen::VectorXd class_count;
};

PosteriorTable posterior_probs(const Dataset& data, const ParameterSet& theta,
                               const ModelSpec& spec);
PosteriorTable posterior_probs(const LikelihoodProblem& problem, const ParameterSet& theta);

// Class-specific weighted mean marker level per age bin: model prediction,
// observation, and prediction conditional on the empirical-Bayes random
// effects, all weighted by the posterior class probabilities. With a
// non-identity link both prediction and observation are reported on the
// latent scale.
struct GofBin {
  int cls = 0;           // 0-based
  double age_lo = 0.0, age_hi = 0.0;
  int n_obs = 0;
  double mean_predicted = 0.0;
  double mean_observed = 0.0;
  double mean_predicted_re = 0.0;
};
std::vector<GofBin> gof_weighted_means(const Dataset& data, const ParameterSet& theta,
                                       const ModelSpec& spec, double bin_width = 5.0);

// Cumulative incidence curves for one class, conditional on being at risk at
// base_age: healthy->ill and healthy->dead given alive and healthy, and
// ill->dead given alive (markovian) or measured in time since onset
// (semi-markovian).
struct IncidenceCurves {
  Eigen::VectorXd age;
  Eigen::VectorXd f01, f02, f12;
};
IncidenceCurves cumulative_incidence(const ParameterSet& theta, const ModelSpec& spec, int g,
                                     const std::array<Eigen::VectorXd, 3>& w,
                                     const Eigen::VectorXd& age_grid, double base_age = 65.0);

enum class ConditionType { healthy_alive, died_dementia_free, dementia_onset };

// Population-average marker trajectory for a subject profile conditioned on
// an event status at a given age; the mixture weights are the class
// posteriors given that status.
struct TrajectoryResult {
  Eigen::VectorXd weights;  // P(class | condition), sums to 1
  Eigen::VectorXd age;
  Eigen::VectorXd value;
};
TrajectoryResult conditional_trajectory(const ParameterSet& theta, const ModelSpec& spec,
                                        ConditionType type, double condition_age,
                                        const Eigen::VectorXd& class_covs,
                                        const std::array<Eigen::VectorXd, 3>& w,
                                        const std::vector<double>& obs_covs,
                                        const Eigen::VectorXd& age_grid, int marker = 0);

}  // namespace jlcid
