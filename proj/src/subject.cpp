#include "jlcid/subject.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "jlcid/errors.hpp"

namespace jlcid {

namespace {
std::string subj(const SubjectRecord& rec) { return "subject id=" + std::to_string(rec.id); }
}  // namespace

void SubjectRecord::validate(const ModelSpec& spec) const {
  if (!std::isfinite(t0) || !std::isfinite(l) || !std::isfinite(t_end))
    throw data_error(subj(*this) + ": non-finite age");
  if (delta_a != 0 && delta_a != 1) throw data_error(subj(*this) + ": delta_a not in {0,1}");
  if (delta_d != 0 && delta_d != 1) throw data_error(subj(*this) + ": delta_d not in {0,1}");
  if (t0 > l) throw data_error(subj(*this) + ": entry age exceeds last healthy visit (t0 > l)");
  if (l > t_end) throw data_error(subj(*this) + ": last healthy visit after end of follow-up (l > t)");
  if (delta_a == 1) {
    if (!std::isfinite(r)) throw data_error(subj(*this) + ": diagnosed but no diagnosis age");
    if (r < l || r > t_end)
      throw data_error(subj(*this) + ": diagnosis age outside [l, t]");
  } else if (r != std::numeric_limits<double>::infinity()) {
    throw data_error(subj(*this) + ": undiagnosed subject must have r = +inf");
  }
  if (spec.hazard_time.apply(t0) < 0.0)
    throw data_error(subj(*this) + ": entry age below the hazard time origin");

  const int n = n_obs();
  if (static_cast<int>(obs_marker.size()) != n || obs_value.size() != n ||
      design_class.rows() != n || design_common.rows() != n || design_random.rows() != n)
    throw data_error(subj(*this) + ": observation arrays misaligned");
  double upper = std::min(r, t_end);
  for (int j = 0; j < n; ++j) {
    if (obs_marker[j] < 0 || obs_marker[j] >= spec.n_markers)
      throw data_error(subj(*this) + ": marker index out of range");
    double age = spec.long_time.invert(obs_time[j]);
    // small tolerance for the age -> time -> age round trip
    if (age < t0 - 1e-8 || age > upper + 1e-8)
      throw data_error(subj(*this) + ": observation outside [t0, min(r, t)]");
  }
  for (int tr = 0; tr < spec.n_transitions(); ++tr)
    if (w[tr].size() != spec.n_gamma(tr))
      throw data_error(subj(*this) + ": event covariate length mismatch");
  if (class_covs.size() != static_cast<int>(spec.class_covariates.size()))
    throw data_error(subj(*this) + ": class covariate length mismatch");
}

void build_designs(SubjectRecord& rec, const ModelSpec& spec) {
  const int n = rec.n_obs();
  const int nc = static_cast<int>(spec.obs_covariates.size());
  if (rec.obs_covs.rows() != n || rec.obs_covs.cols() != nc)
    throw data_error(subj(rec) + ": observation covariates misaligned");
  rec.design_class.resize(n, spec.n_class_terms());
  rec.design_common.resize(n, spec.n_common_terms());
  rec.design_random.resize(n, spec.n_random());
  std::vector<double> covs(static_cast<std::size_t>(nc));
  for (int j = 0; j < n; ++j) {
    for (int c = 0; c < nc; ++c) covs[static_cast<std::size_t>(c)] = rec.obs_covs(j, c);
    double t = rec.obs_time[j];
    int mk = rec.obs_marker[static_cast<std::size_t>(j)];
    for (int c = 0; c < spec.n_class_terms(); ++c)
      rec.design_class(j, c) = spec.class_terms[static_cast<std::size_t>(c)].value(t, covs, mk);
    for (int c = 0; c < spec.n_common_terms(); ++c)
      rec.design_common(j, c) = spec.common_terms[static_cast<std::size_t>(c)].value(t, covs, mk);
    for (int c = 0; c < spec.n_random(); ++c)
      rec.design_random(j, c) = spec.random_terms[static_cast<std::size_t>(c)].value(t, covs, mk);
  }
}

}  // namespace jlcid
