#pragma once

#include <Eigen/Core>
#include <array>
#include <vector>

#include "jlcid/model_spec.hpp"

namespace jlcid {

// Which of the six observation patterns for dementia and death applies:
//   diagnosed : seen demented at a visit (cases 1-2)
//   healthy   : seen healthy the day follow-up ends (cases 3-4)
//   unknown   : last seen healthy strictly before the end (cases 5-6)
enum class ObservationPattern { diagnosed, healthy, unknown };

// One subject: interval-censored event data plus the longitudinal series.
// Ages are in years; r is +infinity when dementia was never diagnosed.
// Observation times are stored on the transformed (mixed-model) scale.
struct SubjectRecord {
  long long id = 0;
  double t0 = 0.0;     // entry age
  double l = 0.0;      // last age seen healthy
  double r = 0.0;      // diagnosis age, +inf if none
  double t_end = 0.0;  // age at death or end of follow-up
  int delta_a = 0;     // dementia diagnosed
  int delta_d = 0;     // death observed

  Eigen::VectorXd class_covs;          // class-membership covariates
  std::array<Eigen::VectorXd, 3> w;    // event covariates per transition

  std::vector<int> obs_marker;
  Eigen::VectorXd obs_time;
  Eigen::VectorXd obs_value;
  Eigen::MatrixXd obs_covs;       // n_obs x #obs covariates (raw values)
  Eigen::MatrixXd design_class;   // n_obs x n_class_terms
  Eigen::MatrixXd design_common;  // n_obs x n_common_terms
  Eigen::MatrixXd design_random;  // n_obs x n_random

  int n_obs() const { return static_cast<int>(obs_time.size()); }

  ObservationPattern pattern() const {
    if (delta_a == 1) return ObservationPattern::diagnosed;
    return l == t_end ? ObservationPattern::healthy : ObservationPattern::unknown;
  }

  // Case number 1..6 as conventionally drawn.
  int pattern_case() const {
    switch (pattern()) {
      case ObservationPattern::diagnosed: return delta_d ? 1 : 2;
      case ObservationPattern::healthy: return delta_d ? 3 : 4;
      default: return delta_d ? 5 : 6;
    }
  }

  // Checks the record's invariants; throws data_error naming the subject.
  void validate(const ModelSpec& spec) const;
};

using Dataset = std::vector<SubjectRecord>;

// Builds the three design matrices from the record's observation times,
// markers and raw covariates.
void build_designs(SubjectRecord& rec, const ModelSpec& spec);

}  // namespace jlcid
