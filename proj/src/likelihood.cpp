#include "jlcid/likelihood.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <limits>
#include <string>

#include "jlcid/errors.hpp"
#include "jlcid/hazards.hpp"
#include "jlcid/longitudinal.hpp"
#include "jlcid/parallel.hpp"

namespace jlcid {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double logsumexp(const Eigen::ArrayXd& v) {
  double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;  // all -inf (or a NaN propagates)
  return m + std::log((v - m).exp().sum());
}

double logsumexp2(double a, double b) {
  double m = std::max(a, b);
  if (!std::isfinite(m)) return m;
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

TransitionParams make_tp(const ParameterSet& theta, const SubjectRecord& rec, int tr, int g) {
  TransitionParams p;
  p.shape = theta.wb_shape(tr, g);
  p.scale = theta.wb_scale(tr, g);
  p.log_rel_risk = rec.w[tr].size() > 0 ? theta.gamma_row(tr, g).dot(rec.w[tr]) : 0.0;
  return p;
}

// exp(-A01(u)-A02(u)) a01(u) * (ill->dead factor at the end of follow-up)
double demented_integrand(double u, double xt, const TransitionParams& p01,
                          const TransitionParams& p02, const TransitionParams& p12,
                          int delta_d, bool markovian) {
  double val = std::exp(-cumulative(p01, u) - cumulative(p02, u)) * intensity(p01, u);
  if (markovian) {
    val *= std::exp(-(cumulative(p12, xt) - cumulative(p12, u)));
    if (delta_d) val *= intensity(p12, xt);
  } else {
    val *= std::exp(-cumulative(p12, xt - u));
    if (delta_d) val *= intensity(p12, xt - u);
  }
  return val;
}

}  // namespace

Eigen::VectorXd class_membership_probs(const Eigen::MatrixXd& zeta,
                                       const Eigen::VectorXd& class_covs) {
  const int g_count = static_cast<int>(zeta.rows()) + 1;
  Eigen::ArrayXd lin = Eigen::ArrayXd::Zero(g_count);
  for (int g = 0; g < g_count - 1; ++g) {
    double v = zeta(g, 0);
    for (int c = 0; c < class_covs.size(); ++c) v += zeta(g, c + 1) * class_covs[c];
    lin[g] = v;
  }
  Eigen::ArrayXd e = (lin - lin.maxCoeff()).exp();
  return (e / e.sum()).matrix();
}

double contribution_demented(const SubjectRecord& rec, int g, const ParameterSet& theta,
                             const ModelSpec& spec) {
  if (rec.pattern() != ObservationPattern::diagnosed)
    throw data_error("contribution_demented: subject id=" + std::to_string(rec.id) +
                     " is not in the diagnosed pattern");
  auto p01 = make_tp(theta, rec, 0, g);
  auto p02 = make_tp(theta, rec, 1, g);
  auto p12 = make_tp(theta, rec, 2, g);
  double xl = spec.hazard_time.apply(rec.l);
  double xr = spec.hazard_time.apply(rec.r);
  double xt = spec.hazard_time.apply(rec.t_end);
  if (xl == xr)  // exact onset age: density, not an integral
    return demented_integrand(xl, xt, p01, p02, p12, rec.delta_d, spec.markovian);
  GaussLegendre rule(spec.quadrature_nodes);
  return rule.integrate(
      [&](double u) {
        return demented_integrand(u, xt, p01, p02, p12, rec.delta_d, spec.markovian);
      },
      xl, xr);
}

double contribution_healthy(const SubjectRecord& rec, int g, const ParameterSet& theta,
                            const ModelSpec& spec) {
  if (rec.pattern() != ObservationPattern::healthy)
    throw data_error("contribution_healthy: subject id=" + std::to_string(rec.id) +
                     " is not in the healthy pattern");
  auto p01 = make_tp(theta, rec, 0, g);
  auto p02 = make_tp(theta, rec, 1, g);
  double xt = spec.hazard_time.apply(rec.t_end);
  double val = std::exp(-cumulative(p01, xt) - cumulative(p02, xt));
  if (rec.delta_d) val *= intensity(p02, xt);
  return val;
}

double contribution_unknown(const SubjectRecord& rec, int g, const ParameterSet& theta,
                            const ModelSpec& spec) {
  if (rec.delta_a != 0)
    throw data_error("contribution_unknown: subject id=" + std::to_string(rec.id) +
                     " is diagnosed");
  auto p01 = make_tp(theta, rec, 0, g);
  auto p02 = make_tp(theta, rec, 1, g);
  double xl = spec.hazard_time.apply(rec.l);
  double xt = spec.hazard_time.apply(rec.t_end);
  double healthy = std::exp(-cumulative(p01, xt) - cumulative(p02, xt));
  if (rec.delta_d) healthy *= intensity(p02, xt);
  if (xl == xt) return healthy;  // empty censoring interval
  auto p12 = make_tp(theta, rec, 2, g);
  GaussLegendre rule(spec.quadrature_nodes);
  double undiagnosed = rule.integrate(
      [&](double u) {
        return demented_integrand(u, xt, p01, p02, p12, rec.delta_d, spec.markovian);
      },
      xl, xt);
  return healthy + undiagnosed;
}

// ---------------------------------------------------------------------------
// Cached evaluator
// ---------------------------------------------------------------------------

namespace {

struct MarkerGram {
  // sufficient statistics of one marker's observations: X = [class|common]
  Eigen::MatrixXd xtx, ztz, ztx;
  Eigen::VectorXd xty, zty;
  double yty = 0.0;
  int n = 0;
};

struct SubjectCache {
  const SubjectRecord* rec = nullptr;
  ObservationPattern pattern = ObservationPattern::healthy;
  int delta_d = 0;
  double x0 = 0.0, xl = 0.0, xt = 0.0;
  double log_xt = kNegInf;
  bool exact_onset = false;
  // quadrature nodes over the censoring interval (ascending)
  Eigen::ArrayXd qx, qlogx, qlogw, qlog_rev;  // qlog_rev: log(xt - x)
  double exact_logx = kNegInf, exact_log_rev = kNegInf, exact_x = 0.0;
  // longitudinal fast path (identity links): per-marker sufficient stats
  bool fast_long = false;
  std::vector<MarkerGram> grams;  // only markers with observations
  std::vector<int> gram_marker;
  int n_obs = 0;
  // competing-risks cause: 0 censored, 1 first event, 2 second event
  int cr_cause = 0;
};

struct TrG {
  double shape = 1.0;
  double log_scale = 0.0;   // log of the (squared) scale
  double log_shape = 0.0;
  double grw = 0.0;         // gamma . w for the cached subject
};

}  // namespace

struct LikelihoodProblem::Impl {
  Dataset data;
  std::vector<SubjectCache> cache;
  GaussLegendre rule;

  Impl(const Dataset& d, const ModelSpec& spec)
      : data(d), rule(spec.quadrature_nodes) {
    bool identity_only = true;
    for (const auto& lk : spec.links)
      if (lk.type != LinkType::identity) identity_only = false;

    cache.resize(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
      const auto& rec = data[i];
      rec.validate(spec);
      auto& c = cache[i];
      c.rec = &data[i];
      c.pattern = rec.pattern();
      c.delta_d = rec.delta_d;
      c.x0 = spec.hazard_time.apply(rec.t0);
      c.xl = spec.hazard_time.apply(rec.l);
      c.xt = spec.hazard_time.apply(rec.t_end);
      c.log_xt = c.xt > 0.0 ? std::log(c.xt) : kNegInf;
      c.cr_cause = rec.delta_a ? 1 : (rec.delta_d ? 2 : 0);

      double hi = c.xt;
      bool integral = false;
      if (spec.family == ModelFamily::illness_death) {
        if (c.pattern == ObservationPattern::diagnosed) {
          hi = spec.hazard_time.apply(rec.r);
          if (hi == c.xl) {
            c.exact_onset = true;
            c.exact_x = c.xl;
            c.exact_logx = c.xl > 0.0 ? std::log(c.xl) : kNegInf;
            c.exact_log_rev = c.xt > c.xl ? std::log(c.xt - c.xl) : kNegInf;
          } else {
            integral = true;
          }
        } else if (c.pattern == ObservationPattern::unknown) {
          integral = true;
        }
      }
      if (integral) {
        Eigen::ArrayXd w;
        rule.map(c.xl, hi, c.qx, w);
        c.qlogw = w.log();
        c.qlogx = c.qx.log();
        c.qlog_rev = (c.xt - c.qx).max(0.0).log();
      }

      c.n_obs = rec.n_obs();
      c.fast_long = identity_only;
      if (c.fast_long && c.n_obs > 0) {
        const int p = static_cast<int>(rec.design_class.cols() + rec.design_common.cols());
        const int q = static_cast<int>(rec.design_random.cols());
        Eigen::MatrixXd x(c.n_obs, p);
        x << rec.design_class, rec.design_common;
        for (int k = 0; k < spec.n_markers; ++k) {
          std::vector<int> rows;
          for (int j = 0; j < c.n_obs; ++j)
            if (rec.obs_marker[static_cast<std::size_t>(j)] == k) rows.push_back(j);
          if (rows.empty()) continue;
          MarkerGram gm;
          Eigen::MatrixXd xk(rows.size(), p), zk(rows.size(), q);
          Eigen::VectorXd yk(rows.size());
          for (std::size_t rj = 0; rj < rows.size(); ++rj) {
            xk.row(static_cast<int>(rj)) = x.row(rows[rj]);
            zk.row(static_cast<int>(rj)) = rec.design_random.row(rows[rj]);
            yk[static_cast<int>(rj)] = rec.obs_value[rows[rj]];
          }
          gm.xtx = xk.transpose() * xk;
          gm.xty = xk.transpose() * yk;
          gm.yty = yk.squaredNorm();
          gm.ztz = zk.transpose() * zk;
          gm.ztx = zk.transpose() * xk;
          gm.zty = zk.transpose() * yk;
          gm.n = static_cast<int>(rows.size());
          cache[i].grams.push_back(std::move(gm));
          cache[i].gram_marker.push_back(k);
        }
      }
    }
  }

  static double log_intensity(const TrG& t, double logx, double grw) {
    double v = t.log_shape + t.shape * t.log_scale + grw;
    if (t.shape != 1.0) v += (t.shape - 1.0) * logx;
    return v;
  }
  static double cumulative_at(const TrG& t, double logx, double grw) {
    if (logx == kNegInf) return 0.0;
    return std::exp(t.shape * (t.log_scale + logx) + grw);
  }

  // log event contribution of subject i under class transition parameters
  double event_log(const SubjectCache& c, const TrG& t01, const TrG& t02, const TrG& t12,
                   bool markovian, ModelFamily family) const {
    if (family == ModelFamily::competing_risks) {
      double v = -cumulative_at(t01, c.log_xt, t01.grw) - cumulative_at(t02, c.log_xt, t02.grw);
      if (c.cr_cause == 1) v += log_intensity(t01, c.log_xt, t01.grw);
      if (c.cr_cause == 2) v += log_intensity(t02, c.log_xt, t02.grw);
      return v;
    }

    auto healthy_log = [&]() {
      double v = -cumulative_at(t01, c.log_xt, t01.grw) - cumulative_at(t02, c.log_xt, t02.grw);
      if (c.delta_d) v += log_intensity(t02, c.log_xt, t02.grw);
      return v;
    };

    auto integrand_log = [&](double logx, double log_rev) {
      double v = -cumulative_at(t01, logx, t01.grw) - cumulative_at(t02, logx, t02.grw) +
                 log_intensity(t01, logx, t01.grw);
      if (markovian) {
        double a12_end = cumulative_at(t12, c.log_xt, t12.grw);
        v += -(a12_end - cumulative_at(t12, logx, t12.grw));
        if (c.delta_d) v += log_intensity(t12, c.log_xt, t12.grw);
      } else {
        v += -cumulative_at(t12, log_rev, t12.grw);
        if (c.delta_d) v += log_intensity(t12, log_rev, t12.grw);
      }
      return v;
    };

    switch (c.pattern) {
      case ObservationPattern::healthy:
        return healthy_log();
      case ObservationPattern::diagnosed: {
        if (c.exact_onset) return integrand_log(c.exact_logx, c.exact_log_rev);
        double m = kNegInf;
        const int nq = static_cast<int>(c.qx.size());
        Eigen::ArrayXd z(nq);
        for (int j = 0; j < nq; ++j) {
          z[j] = c.qlogw[j] + integrand_log(c.qlogx[j], c.qlog_rev[j]);
          m = std::max(m, z[j]);
        }
        if (m == kNegInf) return kNegInf;
        return m + std::log((z - m).exp().sum());
      }
      default: {  // unknown status: stayed healthy or undiagnosed transition
        double h = healthy_log();
        double m = kNegInf;
        const int nq = static_cast<int>(c.qx.size());
        Eigen::ArrayXd z(nq);
        for (int j = 0; j < nq; ++j) {
          z[j] = c.qlogw[j] + integrand_log(c.qlogx[j], c.qlog_rev[j]);
          m = std::max(m, z[j]);
        }
        double integral = m == kNegInf ? kNegInf : m + std::log((z - m).exp().sum());
        return logsumexp2(h, integral);
      }
    }
  }

  // log multivariate normal density via the per-marker sufficient statistics
  double long_log_fast(const SubjectCache& c, const ParameterSet& theta,
                       const Eigen::VectorXd& beta_full, const Eigen::MatrixXd& u_chol,
                       double sg2) const {
    if (c.n_obs == 0) return 0.0;
    const int q = static_cast<int>(u_chol.rows());
    double rdr = 0.0, logdet_d = 0.0;
    Eigen::VectorXd zdr = Eigen::VectorXd::Zero(q);
    Eigen::MatrixXd zdz = Eigen::MatrixXd::Zero(q, q);
    for (std::size_t gi = 0; gi < c.grams.size(); ++gi) {
      const auto& gm = c.grams[gi];
      double se = theta.sigma_e(c.gram_marker[gi]);
      double se2 = se * se;
      double w = 1.0 / se2;
      rdr += w * (gm.yty - 2.0 * beta_full.dot(gm.xty) +
                  beta_full.dot(gm.xtx * beta_full));
      zdr += w * (gm.zty - gm.ztx * beta_full);
      zdz += w * gm.ztz;
      logdet_d += gm.n * std::log(se2);
    }
    if (q == 0)
      return -0.5 * (c.n_obs * std::log(2.0 * M_PI) + logdet_d + rdr);
    Eigen::MatrixXd cmat = Eigen::MatrixXd::Identity(q, q) +
                           sg2 * (u_chol.transpose() * zdz * u_chol);
    Eigen::LLT<Eigen::MatrixXd> llt(cmat);
    if (llt.info() != Eigen::Success)
      throw numeric_error("longitudinal covariance factorization failed (subject id=" +
                          std::to_string(c.rec->id) + ")");
    Eigen::VectorXd mt = u_chol.transpose() * zdr;  // times sigma_g below
    Eigen::VectorXd half = llt.matrixL().solve(mt);
    double quad = rdr - sg2 * half.squaredNorm();
    double logdet_c = 0.0;
    for (int j = 0; j < q; ++j) logdet_c += 2.0 * std::log(llt.matrixL()(j, j));
    return -0.5 * (c.n_obs * std::log(2.0 * M_PI) + logdet_d + logdet_c + quad);
  }
};

LikelihoodProblem::LikelihoodProblem(const Dataset& data, const ModelSpec& spec)
    : impl_(std::make_unique<Impl>(data, spec)), spec_(spec) {
  spec_.validate();
}

LikelihoodProblem::~LikelihoodProblem() = default;
LikelihoodProblem::LikelihoodProblem(LikelihoodProblem&&) noexcept = default;

int LikelihoodProblem::n_subjects() const { return static_cast<int>(impl_->data.size()); }

Eigen::MatrixXd LikelihoodProblem::class_log_weights(const ParameterSet& theta) const {
  const int n = n_subjects();
  const int g_count = spec_.n_classes;
  const int n_tr = spec_.n_transitions();
  Eigen::MatrixXd out(n, g_count);

  // per-class transition parameter tables (covariate part filled per subject)
  std::vector<std::array<TrG, 3>> per_class(static_cast<std::size_t>(g_count));
  for (int g = 0; g < g_count; ++g)
    for (int tr = 0; tr < n_tr; ++tr) {
      TrG& t = per_class[static_cast<std::size_t>(g)][static_cast<std::size_t>(tr)];
      double shape = theta.wb_shape(tr, g), scale = theta.wb_scale(tr, g);
      if (!(shape > 0.0) || !(scale > 0.0))
        throw numeric_error("invalid Weibull parameters (transition " + std::to_string(tr) +
                            ", class " + std::to_string(g + 1) + ")");
      t.shape = shape;
      t.log_shape = std::log(shape);
      t.log_scale = std::log(scale);
    }
  Eigen::MatrixXd u_chol = theta.re_cholesky();

  auto body = [&](int i) {
    const auto& c = impl_->cache[static_cast<std::size_t>(i)];
    const auto& rec = *c.rec;
    Eigen::VectorXd probs = class_membership_probs(theta.zeta, rec.class_covs);
    for (int g = 0; g < g_count; ++g) {
      std::array<TrG, 3> t = per_class[static_cast<std::size_t>(g)];
      for (int tr = 0; tr < n_tr; ++tr)
        t[static_cast<std::size_t>(tr)].grw =
            rec.w[tr].size() > 0 ? theta.gamma_row(tr, g).dot(rec.w[tr]) : 0.0;
      double levent = impl_->event_log(c, t[0], t[1], t[2], spec_.markovian, spec_.family);
      double llong;
      if (c.fast_long) {
        Eigen::VectorXd beta_full(theta.beta_class.cols() + theta.beta_common.size());
        beta_full << theta.beta_class.row(g).transpose(), theta.beta_common;
        double sg = theta.sigma_g(g);
        llong = impl_->long_log_fast(c, theta, beta_full, u_chol, sg * sg);
      } else {
        llong = log_density(rec, g, theta, spec_);
      }
      out(i, g) = std::log(probs[g]) + llong + levent;
    }
  };
  parallel_for(n, body, workers);
  return out;
}

Eigen::VectorXd LikelihoodProblem::entry_log_terms(const ParameterSet& theta) const {
  const int n = n_subjects();
  const int g_count = spec_.n_classes;
  Eigen::VectorXd out(n);
  for (int i = 0; i < n; ++i) {
    const auto& c = impl_->cache[static_cast<std::size_t>(i)];
    const auto& rec = *c.rec;
    Eigen::VectorXd probs = class_membership_probs(theta.zeta, rec.class_covs);
    double log_x0 = c.x0 > 0.0 ? std::log(c.x0) : kNegInf;
    Eigen::ArrayXd v(g_count);
    for (int g = 0; g < g_count; ++g) {
      double a = 0.0;
      for (int tr = 0; tr < 2; ++tr) {
        TrG t;
        t.shape = theta.wb_shape(tr, g);
        t.log_scale = std::log(theta.wb_scale(tr, g));
        double grw = rec.w[tr].size() > 0 ? theta.gamma_row(tr, g).dot(rec.w[tr]) : 0.0;
        a += Impl::cumulative_at(t, log_x0, grw);
      }
      v[g] = std::log(probs[g]) - a;
    }
    out[i] = logsumexp(v);
  }
  return out;
}

double LikelihoodProblem::eval(const ParameterSet& theta) const {
  const int n = n_subjects();
  Eigen::MatrixXd lw = class_log_weights(theta);
  Eigen::VectorXd entry = entry_log_terms(theta);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    double li = logsumexp(lw.row(i).array().transpose());
    double contrib = li - entry[i];
    if (!std::isfinite(contrib))
      throw numeric_error("non-finite likelihood contribution (subject id=" +
                          std::to_string(impl_->data[static_cast<std::size_t>(i)].id) + ")");
    total += contrib;
  }
  return total;
}

double LikelihoodProblem::eval_vec(const Eigen::VectorXd& v) const {
  return eval(ParameterSet::decode(v, spec_));
}

double log_likelihood(const Dataset& data, const ParameterSet& theta, const ModelSpec& spec) {
  return LikelihoodProblem(data, spec).eval(theta);
}

double log_likelihood_competing(const Dataset& data, const ParameterSet& theta,
                                const ModelSpec& spec) {
  if (spec.family != ModelFamily::competing_risks)
    throw config_error("log_likelihood_competing: spec.family must be competing_risks");
  return LikelihoodProblem(data, spec).eval(theta);
}

}  // namespace jlcid
