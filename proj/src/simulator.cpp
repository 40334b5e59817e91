#include "jlcid/simulator.hpp"

#include <cmath>
#include <limits>

#include "jlcid/errors.hpp"
#include "jlcid/likelihood.hpp"
#include "jlcid/rng.hpp"

namespace jlcid {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Inverse-transform draw on the hazard time scale:
// (scale*x)^shape * exp(grw) = E  =>  x = (E exp(-grw))^(1/shape) / scale
double invert_cumulative(double shape, double scale, double grw, double e) {
  return std::pow(e * std::exp(-grw), 1.0 / shape) / scale;
}

struct TrVals {
  double shape, scale, grw;
};

TrVals tr_vals(const ParameterSet& truth, const std::array<Eigen::VectorXd, 3>& w, int tr,
               int g) {
  TrVals v;
  v.shape = truth.wb_shape(tr, g);
  v.scale = truth.wb_scale(tr, g);
  v.grw = w[tr].size() > 0 ? truth.gamma_row(tr, g).dot(w[tr]) : 0.0;
  return v;
}

}  // namespace

void SimulationDesign::validate() const {
  spec.validate();
  if (n_subjects < 1) throw config_error("SimulationDesign: n_subjects must be >= 1");
  if (!(visit_interval > 0.0)) throw config_error("SimulationDesign: visit interval must be > 0");
  if (!(admin_censor_years > 0.0)) throw config_error("SimulationDesign: censoring must be > 0");
  if (!(entry_min < entry_max)) throw config_error("SimulationDesign: bad entry age range");
  if (spec.family != ModelFamily::illness_death)
    throw config_error("SimulationDesign: generation needs the illness-death family");
  for (const auto& lk : spec.links)
    if (lk.type != LinkType::identity)
      throw config_error("SimulationDesign: generation supports identity links only");
}

std::pair<double, double> draw_event_times(int g, const std::array<Eigen::VectorXd, 3>& w,
                                           const ParameterSet& truth, const ModelSpec& spec,
                                           std::mt19937_64& rng) {
  auto t01 = tr_vals(truth, w, 0, g);
  auto t02 = tr_vals(truth, w, 1, g);
  double x_ill = invert_cumulative(t01.shape, t01.scale, t01.grw, -std::log(runif(rng)));
  double x_dead = invert_cumulative(t02.shape, t02.scale, t02.grw, -std::log(runif(rng)));
  if (x_ill >= x_dead)
    return {kInf, spec.hazard_time.invert(x_dead)};
  // became ill first: death redrawn from the ill->dead hazard
  auto t12 = tr_vals(truth, w, 2, g);
  double e = -std::log(runif(rng)) * std::exp(-t12.grw);
  double x_final;
  if (spec.markovian) {
    double a_onset = std::pow(t12.scale * x_ill, t12.shape);
    x_final = std::pow(a_onset + e, 1.0 / t12.shape) / t12.scale;
  } else {
    x_final = x_ill + std::pow(e, 1.0 / t12.shape) / t12.scale;
  }
  return {spec.hazard_time.invert(x_ill), spec.hazard_time.invert(x_final)};
}

std::pair<Dataset, DatasetSummary> generate_dataset(const SimulationDesign& design) {
  design.validate();
  const ModelSpec& spec = design.spec;
  const ParameterSet& truth = design.truth;
  const int g_count = spec.n_classes;
  auto rng = make_rng(design.seed);

  // covariate columns are all "x" here; map the named lists onto it
  auto fill_w = [&](double x) {
    std::array<Eigen::VectorXd, 3> w;
    for (int tr = 0; tr < 3; ++tr) {
      w[tr].resize(spec.n_gamma(std::min(tr, spec.n_transitions() - 1)));
      w[tr].setConstant(x);
    }
    return w;
  };

  Dataset data;
  data.reserve(static_cast<std::size_t>(design.n_subjects));
  DatasetSummary sum;
  sum.n = design.n_subjects;
  sum.class_share = Eigen::VectorXd::Zero(g_count);
  sum.per_class = Eigen::MatrixXd::Zero(g_count, 3);
  Eigen::VectorXd class_n = Eigen::VectorXd::Zero(g_count);
  double gap_sum = 0.0;
  int gap_n = 0;

  Eigen::MatrixXd u_chol = truth.re_cholesky();
  const int q = static_cast<int>(u_chol.rows());

  for (int i = 0; i < design.n_subjects; ++i) {
    // rejection: draw everything until the subject is healthy and alive at
    // entry (prevalent or deceased draws never enter the cohort)
    int g;
    double x, t0, age_ill, age_dead;
    for (;;) {
      t0 = design.entry_min + (design.entry_max - design.entry_min) * runif(rng);
      x = runif(rng) < design.covariate_prob ? 1.0 : 0.0;
      Eigen::VectorXd ccovs(spec.class_covariates.size());
      ccovs.setConstant(x);
      Eigen::VectorXd probs = class_membership_probs(truth.zeta, ccovs);
      double ug = runif(rng), acc = 0.0;
      g = g_count - 1;
      for (int cand = 0; cand < g_count; ++cand) {
        acc += probs[cand];
        if (ug < acc) {
          g = cand;
          break;
        }
      }
      auto w = fill_w(x);
      auto [ti, td] = draw_event_times(g, w, truth, spec, rng);
      if (std::min(ti, td) > t0) {
        age_ill = ti;
        age_dead = td;
        break;
      }
    }

    const double end = t0 + design.admin_censor_years;
    const int k_last =
        static_cast<int>(std::floor(design.admin_censor_years / design.visit_interval + 1e-9));
    auto visit = [&](int k) { return t0 + k * design.visit_interval; };

    SubjectRecord rec;
    rec.id = i + 1;
    rec.t0 = t0;
    rec.class_covs.resize(spec.class_covariates.size());
    rec.class_covs.setConstant(x);
    auto w = fill_w(x);
    for (int tr = 0; tr < 3; ++tr) rec.w[tr] = w[tr];

    int k_diag = -1;
    if (std::isfinite(age_ill)) {
      int k_star = static_cast<int>(std::floor((age_ill - t0) / design.visit_interval)) + 1;
      if (k_star <= k_last && visit(k_star) < age_dead) k_diag = k_star;
    }

    int last_obs_visit;
    if (k_diag >= 0) {
      rec.delta_a = 1;
      rec.r = visit(k_diag);
      rec.l = visit(k_diag - 1);
      if (age_dead <= end) {
        rec.t_end = age_dead;
        rec.delta_d = 1;
      } else {
        rec.t_end = end;
        rec.delta_d = 0;
      }
      last_obs_visit = k_diag;
    } else {
      rec.delta_a = 0;
      rec.r = kInf;
      int last_attended = k_last;
      if (age_dead <= end) {
        rec.t_end = age_dead;
        rec.delta_d = 1;
        while (last_attended > 0 && visit(last_attended) >= age_dead) --last_attended;
      } else {
        rec.t_end = end;
        rec.delta_d = 0;
      }
      rec.l = visit(last_attended);
      last_obs_visit = last_attended;
    }

    // marker series at the attended visits
    Eigen::VectorXd z(q);
    for (int j = 0; j < q; ++j) z[j] = rnorm(rng);
    Eigen::VectorXd u = truth.sigma_g(g) * (u_chol * z);
    const int n_obs = (last_obs_visit + 1) * spec.n_markers;
    rec.obs_marker.resize(static_cast<std::size_t>(n_obs));
    rec.obs_time.resize(n_obs);
    rec.obs_value.resize(n_obs);
    rec.obs_covs.resize(n_obs, static_cast<int>(spec.obs_covariates.size()));
    rec.obs_covs.setConstant(x);
    int oi = 0;
    std::vector<double> covs(spec.obs_covariates.size(), x);
    for (int k = 0; k <= last_obs_visit; ++k) {
      double t = spec.long_time.apply(visit(k));
      for (int mk = 0; mk < spec.n_markers; ++mk) {
        double mean = 0.0;
        for (std::size_t c = 0; c < spec.class_terms.size(); ++c)
          mean += spec.class_terms[c].value(t, covs, mk) * truth.beta_class(g, static_cast<int>(c));
        for (std::size_t c = 0; c < spec.common_terms.size(); ++c)
          mean += spec.common_terms[c].value(t, covs, mk) * truth.beta_common[static_cast<int>(c)];
        double rand_part = 0.0;
        for (std::size_t c = 0; c < spec.random_terms.size(); ++c)
          rand_part += spec.random_terms[c].value(t, covs, mk) * u[static_cast<int>(c)];
        rec.obs_marker[static_cast<std::size_t>(oi)] = mk;
        rec.obs_time[oi] = t;
        rec.obs_value[oi] = mean + rand_part + truth.sigma_e(mk) * rnorm(rng);
        ++oi;
      }
    }
    build_designs(rec, spec);
    rec.validate(spec);

    class_n[g] += 1.0;
    sum.true_class.push_back(g);
    sum.covariate.push_back(x);
    if (rec.delta_a == 1) {
      sum.frac_diagnosed += 1.0;
      sum.per_class(g, 0) += 1.0;
      gap_sum += rec.r - rec.l;
      ++gap_n;
      if (rec.delta_d == 1) {
        sum.frac_died_after_diagnosis += 1.0;
        sum.per_class(g, 2) += 1.0;
      }
    } else if (rec.delta_d == 1) {
      sum.frac_died_undiagnosed += 1.0;
      sum.per_class(g, 1) += 1.0;
    } else {
      sum.frac_censored_healthy += 1.0;
    }
    data.push_back(std::move(rec));
  }

  double n = static_cast<double>(design.n_subjects);
  sum.frac_diagnosed /= n;
  sum.frac_died_undiagnosed /= n;
  sum.frac_died_after_diagnosis /= n;
  sum.frac_censored_healthy /= n;
  sum.class_share = class_n / n;
  for (int g = 0; g < g_count; ++g)
    if (class_n[g] > 0) sum.per_class.row(g) /= class_n[g];
  sum.mean_censoring_gap = gap_n > 0 ? gap_sum / gap_n : 0.0;
  return {std::move(data), std::move(sum)};
}

Dataset impute_competing(const Dataset& data) {
  Dataset out;
  out.reserve(data.size());
  for (const auto& rec : data) {
    SubjectRecord cr = rec;
    if (rec.delta_a == 1) {  // illness first, at the age of diagnosis
      cr.t_end = rec.r;
      cr.l = rec.r;
      cr.delta_d = 0;
    } else {  // death first, or censored at the end of follow-up
      cr.l = cr.t_end;
      cr.r = kInf;
    }
    out.push_back(std::move(cr));
  }
  return out;
}

ModelSpec table1_spec(bool markovian) {
  ModelSpec spec;
  spec.n_classes = 2;
  spec.n_markers = 1;
  spec.family = ModelFamily::illness_death;
  spec.markovian = markovian;
  spec.links = {LinkSpec{LinkType::identity, 0.0, 40.0}};
  spec.long_time = {65.0, 10.0};
  spec.hazard_time = {0.0, 1.0};
  spec.quadrature_nodes = 30;
  spec.class_terms = {DesignTerm{0, 1.0, -1, -1}, DesignTerm{1, 1.0, -1, -1}};
  spec.common_terms = {DesignTerm{0, 1.0, 0, -1}};
  spec.random_terms = {DesignTerm{0, 1.0, -1, -1}, DesignTerm{1, 1.0, -1, -1}};
  spec.obs_covariates = {"x"};
  spec.class_covariates = {};
  spec.event_covariates = {std::vector<std::string>{"x"}, {"x"}, {"x"}};
  spec.gamma_class_specific = false;
  spec.free_re_variance = false;
  return spec;
}

ParameterSet table1_truth(const ModelSpec& spec) {
  ParameterSet p = ParameterSet::sized(spec);
  p.zeta.setZero();
  p.wb_shape_sqrt[0] << 3.20, 3.50;
  p.wb_scale_sqrt[0] << 0.11, 0.10;
  p.wb_shape_sqrt[1] << 3.50, 3.40;
  p.wb_scale_sqrt[1] << 0.11, 0.10;
  if (spec.n_transitions() > 2) {
    p.wb_shape_sqrt[2] << 2.78, 3.14;
    p.wb_scale_sqrt[2] << 0.12, 0.11;
    p.gamma[2](0, 0) = 0.47;
  }
  p.gamma[0](0, 0) = 0.02;
  p.gamma[1](0, 0) = 0.67;
  p.beta_class << 30.22, -5.76, 32.96, -3.53;
  p.beta_common << 0.08;
  Eigen::MatrixXd u(2, 2);
  u << 4.93, 0.0, -1.15, 1.46;
  p.set_re_cholesky(u);
  p.sigma_e_sqrt << std::sqrt(3.47);
  return p;
}

SimulationDesign table1_design(int n, double interval_years, std::uint64_t seed, bool markovian) {
  SimulationDesign d;
  d.n_subjects = n;
  d.visit_interval = interval_years;
  d.spec = table1_spec(markovian);
  d.truth = table1_truth(d.spec);
  d.seed = seed;
  return d;
}

ModelSpec competing_spec() {
  ModelSpec spec = table1_spec(true);
  spec.family = ModelFamily::competing_risks;
  return spec;
}

ParameterSet competing_truth() {
  ModelSpec spec = competing_spec();
  ParameterSet p = ParameterSet::sized(spec);
  ParameterSet full = table1_truth(table1_spec(true));
  p.zeta = full.zeta;
  for (int tr = 0; tr < 2; ++tr) {
    p.wb_shape_sqrt[tr] = full.wb_shape_sqrt[tr];
    p.wb_scale_sqrt[tr] = full.wb_scale_sqrt[tr];
    p.gamma[tr] = full.gamma[tr];
  }
  p.beta_class = full.beta_class;
  p.beta_common = full.beta_common;
  p.u_chol = full.u_chol;
  p.sigma_e_sqrt = full.sigma_e_sqrt;
  return p;
}

}  // namespace jlcid
