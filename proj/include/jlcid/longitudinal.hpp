#pragma once

#include <Eigen/Core>

#include "jlcid/parameters.hpp"
#include "jlcid/subject.hpp"

namespace jlcid {

// Mean vector and covariance matrix of the (transformed) marker series of
// one subject given the class: E stacks the fixed-effect predictions, V is
// the random-effect covariance plus per-marker measurement error.
struct ConditionalMoments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};
ConditionalMoments conditional_moments(const SubjectRecord& rec, int g,
                                       const ParameterSet& theta, const ModelSpec& spec);

// Values on the latent scale plus the summed log-Jacobian of the link.
struct TransformedSeries {
  Eigen::VectorXd values;
  double log_jacobian = 0.0;
};
TransformedSeries transform_series(const SubjectRecord& rec, const ParameterSet& theta,
                                   const ModelSpec& spec);

// Log multivariate-normal density of the subject's transformed series under
// class g, including the link Jacobian. Subjects without observations
// contribute 0.
double log_density(const SubjectRecord& rec, int g, const ParameterSet& theta,
                   const ModelSpec& spec);

// Conditional (empirical Bayes) mean of the random effects given the data
// and the class.
Eigen::VectorXd conditional_re_mean(const SubjectRecord& rec, int g,
                                    const ParameterSet& theta, const ModelSpec& spec);

}  // namespace jlcid
