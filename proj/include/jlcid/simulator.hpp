#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "jlcid/model_spec.hpp"
#include "jlcid/parameters.hpp"
#include "jlcid/subject.hpp"

namespace jlcid {

// Cohort generation design: latent class with a binary covariate, uniform
// entry age with rejection of subjects not healthy+alive at entry, Weibull
// event times, periodic visits with diagnosis at the first visit after
// illness onset, administrative censoring after a fixed follow-up.
struct SimulationDesign {
  int n_subjects = 500;
  double visit_interval = 2.0;       // years
  double admin_censor_years = 20.0;  // after entry
  double entry_min = 65.0, entry_max = 85.0;
  double covariate_prob = 0.5;  // P(x = 1)
  ModelSpec spec;
  ParameterSet truth;
  std::uint64_t seed = 1;

  void validate() const;
};

struct DatasetSummary {
  int n = 0;
  Eigen::VectorXd class_share;             // selected-sample composition
  double frac_diagnosed = 0.0;             // observed demented
  double frac_died_undiagnosed = 0.0;      // died, dementia-free as far as seen
  double frac_died_after_diagnosis = 0.0;
  double frac_censored_healthy = 0.0;
  Eigen::MatrixXd per_class;               // rows: class; cols: the 3 event fracs
  double mean_censoring_gap = 0.0;         // mean R - L among the diagnosed
  std::vector<int> true_class;             // per subject (0-based)
  std::vector<double> covariate;           // per subject x
};

// Latent event ages for one subject: illness onset (or +inf when death from
// the healthy state comes first) and death age, including the post-onset
// redraw from the ill->dead hazard.
std::pair<double, double> draw_event_times(int g, const std::array<Eigen::VectorXd, 3>& w,
                                           const ParameterSet& truth, const ModelSpec& spec,
                                           std::mt19937_64& rng);

std::pair<Dataset, DatasetSummary> generate_dataset(const SimulationDesign& design);

// First-event reduction for the naive competing-risks model: diagnosed
// subjects become an illness event at the diagnosis age (death dropped),
// undiagnosed deaths stay death events, everyone else is censored at the
// end of follow-up.
Dataset impute_competing(const Dataset& data);

// Simulation-study configuration and generating values.
ModelSpec table1_spec(bool markovian = true);
ParameterSet table1_truth(const ModelSpec& spec);
SimulationDesign table1_design(int n, double interval_years, std::uint64_t seed,
                               bool markovian = true);
// Matching naive competing-risks model (no ill->dead transition).
ModelSpec competing_spec();
ParameterSet competing_truth();

}  // namespace jlcid
