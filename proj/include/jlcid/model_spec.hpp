#pragma once

#include <array>
#include <string>
#include <vector>

namespace jlcid {

enum class LinkType { identity, beta_cdf };
enum class ModelFamily { illness_death, competing_risks };

// t = (x - offset) / scale
struct AffineTime {
  double offset = 0.0;
  double scale = 1.0;
  double apply(double x) const { return (x - offset) / scale; }
  double invert(double t) const { return t * scale + offset; }
};

struct LinkSpec {
  LinkType type = LinkType::identity;
  // Marker range, used by the beta_cdf link to rescale scores into (0, 1).
  double y_min = 0.0;
  double y_max = 1.0;
};

// One column of the longitudinal design:
//   value = cov * time^power / denom
// where cov is 1 when `covariate` < 0, else the observation covariate at
// that index. When `marker` >= 0 the column is zeroed for other markers
// (marker-specific contrast).
struct DesignTerm {
  int power = 0;
  double denom = 1.0;
  int covariate = -1;
  int marker = -1;
  double value(double t, const std::vector<double>& covs, int obs_marker) const;
};

// Transition indices: 0 = healthy->ill (01), 1 = healthy->dead (02),
// 2 = ill->dead (12, absent in the competing-risks family).
struct ModelSpec {
  int n_classes = 1;
  int n_markers = 1;
  ModelFamily family = ModelFamily::illness_death;
  bool markovian = true;

  std::vector<LinkSpec> links{LinkSpec{}};
  AffineTime long_time{65.0, 10.0};
  AffineTime hazard_time{0.0, 1.0};
  int quadrature_nodes = 30;

  std::vector<DesignTerm> class_terms{DesignTerm{}};
  std::vector<DesignTerm> common_terms;
  std::vector<DesignTerm> random_terms;

  std::vector<std::string> obs_covariates;
  std::vector<std::string> class_covariates;
  std::array<std::vector<std::string>, 3> event_covariates;

  bool gamma_class_specific = false;
  bool free_re_variance = false;

  int n_transitions() const { return family == ModelFamily::illness_death ? 3 : 2; }
  int n_class_terms() const { return static_cast<int>(class_terms.size()); }
  int n_common_terms() const { return static_cast<int>(common_terms.size()); }
  int n_random() const { return static_cast<int>(random_terms.size()); }
  int n_gamma(int tr) const { return static_cast<int>(event_covariates[tr].size()); }
  int n_zeta_cols() const { return 1 + static_cast<int>(class_covariates.size()); }

  void validate() const;
};

}  // namespace jlcid
