#include "jlcid/model_spec.hpp"

#include <cmath>

#include "jlcid/errors.hpp"

namespace jlcid {

double DesignTerm::value(double t, const std::vector<double>& covs, int obs_marker) const {
  if (marker >= 0 && obs_marker != marker) return 0.0;
  double v = covariate >= 0 ? covs.at(static_cast<std::size_t>(covariate)) : 1.0;
  if (power != 0) v *= std::pow(t, power);
  return v / denom;
}

void ModelSpec::validate() const {
  if (n_classes < 1) throw config_error("ModelSpec: n_classes must be >= 1");
  if (n_markers < 1) throw config_error("ModelSpec: n_markers must be >= 1");
  if (quadrature_nodes < 2) throw config_error("ModelSpec: quadrature_nodes must be >= 2");
  if (static_cast<int>(links.size()) != n_markers)
    throw config_error("ModelSpec: one link per marker required");
  for (const auto& lk : links) {
    if (lk.type == LinkType::beta_cdf && !(lk.y_max > lk.y_min))
      throw config_error("ModelSpec: beta_cdf link needs y_min < y_max");
  }
  if (long_time.scale == 0.0 || hazard_time.scale == 0.0)
    throw config_error("ModelSpec: time transform scale must be nonzero");
  if (class_terms.empty()) throw config_error("ModelSpec: need at least one class-specific term");
  auto check_terms = [&](const std::vector<DesignTerm>& terms, const char* what) {
    for (const auto& tm : terms) {
      if (tm.denom == 0.0) throw config_error(std::string("ModelSpec: zero denom in ") + what);
      if (tm.covariate >= static_cast<int>(obs_covariates.size()))
        throw config_error(std::string("ModelSpec: covariate index out of range in ") + what);
      if (tm.marker >= n_markers)
        throw config_error(std::string("ModelSpec: marker index out of range in ") + what);
    }
  };
  check_terms(class_terms, "class_terms");
  check_terms(common_terms, "common_terms");
  check_terms(random_terms, "random_terms");
}

}  // namespace jlcid
