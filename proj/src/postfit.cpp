#include "jlcid/postfit.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "jlcid/errors.hpp"
#include "jlcid/hazards.hpp"
#include "jlcid/link.hpp"
#include "jlcid/longitudinal.hpp"
#include "jlcid/quadrature.hpp"

namespace jlcid {

namespace {

TransitionParams make_tp(const ParameterSet& theta, int tr, int g, const Eigen::VectorXd& w) {
  TransitionParams p;
  p.shape = theta.wb_shape(tr, g);
  p.scale = theta.wb_scale(tr, g);
  p.log_rel_risk = w.size() > 0 ? theta.gamma_row(tr, g).dot(w) : 0.0;
  return p;
}

}  // namespace

PosteriorTable posterior_probs(const LikelihoodProblem& problem, const ParameterSet& theta) {
  const ModelSpec& spec = problem.spec();
  const int n = problem.n_subjects();
  const int g_count = spec.n_classes;
  Eigen::MatrixXd lw = problem.class_log_weights(theta);
  PosteriorTable out;
  out.probs.resize(n, g_count);
  out.assigned.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Eigen::ArrayXd row = lw.row(i).array();
    double m = row.maxCoeff();
    Eigen::ArrayXd e = (row - m).exp();
    out.probs.row(i) = (e / e.sum()).matrix().transpose();
    int best = 0;
    for (int g = 1; g < g_count; ++g)
      if (out.probs(i, g) > out.probs(i, best)) best = g;  // ties keep the lowest index
    out.assigned[static_cast<std::size_t>(i)] = best;
  }
  out.class_mean = Eigen::MatrixXd::Zero(g_count, g_count);
  out.class_count = Eigen::VectorXd::Zero(g_count);
  for (int i = 0; i < n; ++i) {
    int a = out.assigned[static_cast<std::size_t>(i)];
    out.class_count[a] += 1.0;
    out.class_mean.row(a) += out.probs.row(i);
  }
  for (int g = 0; g < g_count; ++g)
    if (out.class_count[g] > 0) out.class_mean.row(g) /= out.class_count[g];
  return out;
}

PosteriorTable posterior_probs(const Dataset& data, const ParameterSet& theta,
                               const ModelSpec& spec) {
  LikelihoodProblem problem(data, spec);
  return posterior_probs(problem, theta);
}

std::vector<GofBin> gof_weighted_means(const Dataset& data, const ParameterSet& theta,
                                       const ModelSpec& spec, double bin_width) {
  if (!(bin_width > 0.0)) throw config_error("gof_weighted_means: bin width must be positive");
  PosteriorTable post = posterior_probs(data, theta, spec);
  const int g_count = spec.n_classes;

  struct Acc {
    double w = 0.0, pred = 0.0, obs = 0.0, pred_re = 0.0;
    int n = 0;
  };
  std::map<std::pair<int, long>, Acc> bins;  // (class, bin index)

  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& rec = data[i];
    if (rec.n_obs() == 0) continue;
    auto ts = transform_series(rec, theta, spec);
    for (int g = 0; g < g_count; ++g) {
      double w = post.probs(static_cast<int>(i), g);
      Eigen::VectorXd mean = rec.design_class * theta.beta_class.row(g).transpose();
      if (rec.design_common.cols() > 0) mean += rec.design_common * theta.beta_common;
      Eigen::VectorXd uhat = conditional_re_mean(rec, g, theta, spec);
      Eigen::VectorXd mean_re = mean + rec.design_random * uhat;
      for (int j = 0; j < rec.n_obs(); ++j) {
        double age = spec.long_time.invert(rec.obs_time[j]);
        long bin = static_cast<long>(std::floor(age / bin_width));
        auto& acc = bins[{g, bin}];
        acc.w += w;
        acc.pred += w * mean[j];
        acc.obs += w * ts.values[j];
        acc.pred_re += w * mean_re[j];
        acc.n += 1;
      }
    }
  }

  std::vector<GofBin> out;
  for (const auto& [key, acc] : bins) {
    if (acc.w <= 0.0) continue;
    GofBin b;
    b.cls = key.first;
    b.age_lo = key.second * bin_width;
    b.age_hi = b.age_lo + bin_width;
    b.n_obs = acc.n;
    b.mean_predicted = acc.pred / acc.w;
    b.mean_observed = acc.obs / acc.w;
    b.mean_predicted_re = acc.pred_re / acc.w;
    out.push_back(b);
  }
  std::sort(out.begin(), out.end(), [](const GofBin& a, const GofBin& b) {
    return a.cls != b.cls ? a.cls < b.cls : a.age_lo < b.age_lo;
  });
  return out;
}

IncidenceCurves cumulative_incidence(const ParameterSet& theta, const ModelSpec& spec, int g,
                                     const std::array<Eigen::VectorXd, 3>& w,
                                     const Eigen::VectorXd& age_grid, double base_age) {
  const int m = static_cast<int>(age_grid.size());
  for (int j = 0; j < m; ++j) {
    if (age_grid[j] < base_age)
      throw config_error("cumulative_incidence: grid age below the conditioning age");
    if (j > 0 && age_grid[j] <= age_grid[j - 1])
      throw config_error("cumulative_incidence: grid must be strictly increasing");
  }
  auto p01 = make_tp(theta, 0, g, w[0]);
  auto p02 = make_tp(theta, 1, g, w[1]);
  auto p12 = make_tp(theta, 2, g, w[2]);
  const double x_base = spec.hazard_time.apply(base_age);
  GaussLegendre rule(spec.quadrature_nodes);

  IncidenceCurves out;
  out.age = age_grid;
  out.f01.setZero(m);
  out.f02.setZero(m);
  out.f12.setZero(m);

  double surv_base = std::exp(-cumulative(p01, x_base) - cumulative(p02, x_base));
  double surv12_base = std::exp(-cumulative(p12, x_base));
  double acc01 = 0.0, acc02 = 0.0, acc12 = 0.0;
  double prev = x_base;
  double prev_dur = 0.0;
  for (int j = 0; j < m; ++j) {
    double x = spec.hazard_time.apply(age_grid[j]);
    auto healthy = [&](double u) {
      return std::exp(-cumulative(p01, u) - cumulative(p02, u));
    };
    acc01 += rule.integrate([&](double u) { return healthy(u) * intensity(p01, u); }, prev, x);
    acc02 += rule.integrate([&](double u) { return healthy(u) * intensity(p02, u); }, prev, x);
    if (spec.markovian) {
      acc12 += rule.integrate(
          [&](double u) { return std::exp(-cumulative(p12, u)) * intensity(p12, u); }, prev, x);
      out.f12[j] = acc12 / surv12_base;
    } else {
      // semi-markovian: the ill->dead clock starts at onset
      double dur = x - x_base;
      acc12 += rule.integrate(
          [&](double u) { return std::exp(-cumulative(p12, u)) * intensity(p12, u); }, prev_dur,
          dur);
      out.f12[j] = acc12;
      prev_dur = dur;
    }
    out.f01[j] = acc01 / surv_base;
    out.f02[j] = acc02 / surv_base;
    prev = x;
  }
  return out;
}

TrajectoryResult conditional_trajectory(const ParameterSet& theta, const ModelSpec& spec,
                                        ConditionType type, double condition_age,
                                        const Eigen::VectorXd& class_covs,
                                        const std::array<Eigen::VectorXd, 3>& w,
                                        const std::vector<double>& obs_covs,
                                        const Eigen::VectorXd& age_grid, int marker) {
  const int g_count = spec.n_classes;
  double xa = spec.hazard_time.apply(condition_age);
  if (!(xa > 0.0))
    throw config_error("conditional_trajectory: condition age outside the hazard support");

  Eigen::VectorXd prior = class_membership_probs(theta.zeta, class_covs);
  Eigen::VectorXd weight(g_count);
  for (int g = 0; g < g_count; ++g) {
    auto p01 = make_tp(theta, 0, g, w[0]);
    auto p02 = make_tp(theta, 1, g, w[1]);
    double surv = std::exp(-cumulative(p01, xa) - cumulative(p02, xa));
    double like = surv;
    if (type == ConditionType::died_dementia_free) like *= intensity(p02, xa);
    if (type == ConditionType::dementia_onset) like *= intensity(p01, xa);
    weight[g] = prior[g] * like;
  }
  double total = weight.sum();
  if (!(total > 0.0))
    throw numeric_error("conditional_trajectory: condition has probability zero");
  weight /= total;

  TrajectoryResult out;
  out.weights = weight;
  out.age = age_grid;
  out.value.resize(age_grid.size());
  for (int j = 0; j < age_grid.size(); ++j) {
    double t = spec.long_time.apply(age_grid[j]);
    double v = 0.0;
    for (int g = 0; g < g_count; ++g) {
      double mean = 0.0;
      for (std::size_t c = 0; c < spec.class_terms.size(); ++c)
        mean += spec.class_terms[c].value(t, obs_covs, marker) *
                theta.beta_class(g, static_cast<int>(c));
      for (std::size_t c = 0; c < spec.common_terms.size(); ++c)
        mean += spec.common_terms[c].value(t, obs_covs, marker) *
                theta.beta_common[static_cast<int>(c)];
      v += weight[g] * mean;
    }
    out.value[j] = v;
  }
  return out;
}

}  // namespace jlcid
