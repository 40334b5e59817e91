#include "jlcid/optimizer.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <cstdio>
#include <limits>

#include "jlcid/errors.hpp"
#include "jlcid/parallel.hpp"
#include "jlcid/rng.hpp"

namespace jlcid {

namespace {

double probe(const Objective& f, const Eigen::VectorXd& x, int coord) {
  double v;
  try {
    v = f(x);
  } catch (const std::exception& e) {
    throw numeric_error("objective failed at probe of coordinate " + std::to_string(coord) +
                        ": " + e.what());
  }
  if (!std::isfinite(v))
    throw numeric_error("objective non-finite at probe of coordinate " + std::to_string(coord));
  return v;
}

double step_size(double xj, double fd_step) { return fd_step * std::max(std::abs(xj), 1.0); }

}  // namespace

Eigen::VectorXd numeric_gradient(const Objective& f, const Eigen::VectorXd& x, double fd_step,
                                 int workers) {
  const int p = static_cast<int>(x.size());
  Eigen::VectorXd g(p);
  parallel_for(
      p,
      [&](int j) {
        double h = step_size(x[j], fd_step);
        Eigen::VectorXd xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        g[j] = (probe(f, xp, j) - probe(f, xm, j)) / (2.0 * h);
      },
      workers);
  return g;
}

Eigen::MatrixXd numeric_hessian(const Objective& f, const Eigen::VectorXd& x, double fd_step,
                                int workers) {
  const int p = static_cast<int>(x.size());
  Eigen::MatrixXd gplus(p, p), gminus(p, p);
  parallel_for(
      2 * p,
      [&](int task) {
        int j = task / 2;
        bool plus = task % 2 == 0;
        double hj = step_size(x[j], fd_step);
        Eigen::VectorXd xs = x;
        xs[j] += plus ? hj : -hj;
        Eigen::VectorXd gs = numeric_gradient(f, xs, fd_step, 1);
        if (plus)
          gplus.col(j) = gs;
        else
          gminus.col(j) = gs;
      },
      workers);
  Eigen::MatrixXd h(p, p);
  for (int j = 0; j < p; ++j)
    h.col(j) = (gplus.col(j) - gminus.col(j)) / (2.0 * step_size(x[j], fd_step));
  return 0.5 * (h + h.transpose());
}

namespace {

// Cholesky of -(H - tau * diag(|H_jj| + 1)); escalates tau until positive
// definite. Returns the factorization and the tau used.
bool inflate(const Eigen::MatrixXd& hess, double tau, Eigen::LLT<Eigen::MatrixXd>& llt) {
  Eigen::MatrixXd m = -hess;
  if (tau > 0.0)
    for (int j = 0; j < m.rows(); ++j) m(j, j) += tau * (std::abs(hess(j, j)) + 1.0);
  llt.compute(m);
  return llt.info() == Eigen::Success;
}

}  // namespace

MarquardtResult marquardt_maximize(const Objective& f, const Eigen::VectorXd& x0,
                                   const OptimizerConfig& cfg) {
  MarquardtResult res;
  res.x = x0;
  res.value = f(x0);
  if (!std::isfinite(res.value))
    throw numeric_error("marquardt_maximize: objective not finite at the starting point");

  double last_dll = std::numeric_limits<double>::infinity();
  double last_dpar = std::numeric_limits<double>::infinity();

  for (int iter = 0; iter < cfg.max_iter; ++iter) {
    Eigen::VectorXd grad = numeric_gradient(f, res.x, cfg.fd_step, cfg.workers);
    Eigen::MatrixXd hess = numeric_hessian(f, res.x, cfg.fd_step, cfg.workers);

    // relative distance to the maximum, on the uninflated Hessian
    Eigen::LLT<Eigen::MatrixXd> llt_raw;
    double rdm = std::numeric_limits<double>::infinity();
    if (inflate(hess, 0.0, llt_raw)) rdm = grad.dot(llt_raw.solve(grad));

    res.criteria = {last_dll, last_dpar, rdm};
    if (last_dll < cfg.eps_loglik && last_dpar < cfg.eps_param && rdm < cfg.eps_rdm) {
      res.converged = true;
      return res;
    }

    // direction with escalating inflation until a step improves f
    bool moved = false;
    double tau = 0.0;
    for (int attempt = 0; attempt <= 50 && !moved; ++attempt) {
      Eigen::LLT<Eigen::MatrixXd> llt;
      if (!inflate(hess, tau, llt)) {
        tau = tau == 0.0 ? 1e-2 : tau * 10.0;
        continue;
      }
      Eigen::VectorXd dir = llt.solve(grad);

      auto try_step = [&](double kappa, double& out) {
        try {
          out = f(res.x + kappa * dir);
        } catch (const std::exception&) {
          out = -std::numeric_limits<double>::infinity();
        }
        return std::isfinite(out) && out > res.value;
      };

      double kappa = 1.0, fnew;
      if (try_step(1.0, fnew)) {
        double fdouble;
        if (try_step(2.0, fdouble) && fdouble > fnew) {
          kappa = 2.0;
          fnew = fdouble;
        }
      } else {
        kappa = 0.5;
        while (kappa >= std::ldexp(1.0, -20) && !try_step(kappa, fnew)) kappa *= 0.5;
        if (kappa < std::ldexp(1.0, -20)) {
          tau = tau == 0.0 ? 1e-2 : tau * 10.0;
          continue;  // flatter, more gradient-like direction
        }
      }
      Eigen::VectorXd xnew = res.x + kappa * dir;
      last_dll = std::abs(fnew - res.value);
      last_dpar = (xnew - res.x).cwiseAbs().maxCoeff();
      res.x = xnew;
      res.value = fnew;
      moved = true;
    }
    if (!moved) {
      // No improving step exists in any direction tried: the iterate cannot
      // change, so the likelihood/parameter criteria hold with change 0 and
      // convergence rests on the gradient criterion.
      res.criteria = {0.0, 0.0, rdm};
      res.converged = rdm < cfg.eps_rdm;
      if (cfg.verbose && !res.converged)
        std::fprintf(stderr, "marquardt: stalled at iter %d (rdm=%.3e)\n", iter, rdm);
      return res;
    }
    res.n_iter = iter + 1;
    if (cfg.verbose)
      std::fprintf(stderr, "marquardt iter %3d  f=%.8f  dll=%.2e dpar=%.2e rdm=%.2e\n",
                   res.n_iter, res.value, last_dll, last_dpar, rdm);
  }
  return res;  // max_iter exceeded; flagged, not an exception
}

double bic(double loglik, int n_params, int n_subjects) {
  return -2.0 * loglik + n_params * std::log(static_cast<double>(n_subjects));
}

FitResult::Reported FitResult::reported(const ModelSpec& spec) const {
  auto lay = ParameterLayout::make(spec);
  Reported rep;
  rep.names = lay.names;
  rep.value.resize(lay.size());
  rep.se.resize(lay.size());
  for (int j = 0; j < lay.size(); ++j) {
    double v = theta_vec[j], se = se_vec.size() == lay.size() ? se_vec[j] : 0.0;
    switch (lay.scales[static_cast<std::size_t>(j)]) {
      case CoordScale::sqrt_positive:
        rep.value[j] = v * v;
        rep.se[j] = 2.0 * std::abs(v) * se;
        break;
      default:  // plain and sqrt_weibull report the stored coordinate
        rep.value[j] = v;
        rep.se[j] = se;
    }
  }
  return rep;
}

FitResult::Reported FitResult::natural(const ModelSpec& spec) const {
  auto lay = ParameterLayout::make(spec);
  Reported rep;
  rep.names = lay.names;
  rep.value.resize(lay.size());
  rep.se.resize(lay.size());
  for (int j = 0; j < lay.size(); ++j) {
    double v = theta_vec[j], se = se_vec.size() == lay.size() ? se_vec[j] : 0.0;
    if (lay.scales[static_cast<std::size_t>(j)] == CoordScale::plain) {
      rep.value[j] = v;
      rep.se[j] = se;
    } else {
      rep.value[j] = v * v;
      rep.se[j] = 2.0 * std::abs(v) * se;
    }
  }
  return rep;
}

FitResult fit(const LikelihoodProblem& problem, const ParameterSet& theta_init,
              const OptimizerConfig& cfg) {
  const ModelSpec& spec = problem.spec();
  Eigen::VectorXd v0 = theta_init.encode(spec);
  Objective f = [&problem](const Eigen::VectorXd& v) { return problem.eval_vec(v); };

  struct StartOutcome {
    MarquardtResult res;
    bool failed = true;
    std::string error;
  };
  std::vector<StartOutcome> outcomes(static_cast<std::size_t>(std::max(1, cfg.n_starts)));

  parallel_for(
      static_cast<int>(outcomes.size()),
      [&](int s) {
        Eigen::VectorXd start = v0;
        if (s > 0) {  // multiplicative jitter, 10% SD
          auto rng = make_rng(cfg.seed, static_cast<std::uint64_t>(s));
          for (int j = 0; j < start.size(); ++j) start[j] *= 1.0 + 0.1 * rnorm(rng);
        }
        auto& out = outcomes[static_cast<std::size_t>(s)];
        try {
          out.res = marquardt_maximize(f, start, cfg);
          out.failed = false;
        } catch (const std::exception& e) {
          out.error = e.what();
        }
      },
      cfg.workers);

  int best = -1;
  bool best_conv = false;
  for (std::size_t s = 0; s < outcomes.size(); ++s) {
    if (outcomes[s].failed) continue;
    const auto& r = outcomes[s].res;
    bool better = best < 0 || (r.converged && !best_conv) ||
                  (r.converged == best_conv &&
                   r.value > outcomes[static_cast<std::size_t>(best)].res.value);
    if (better) {
      best = static_cast<int>(s);
      best_conv = r.converged;
    }
  }
  if (best < 0)
    throw numeric_error("fit: every start failed: " + outcomes.front().error);

  const auto& win = outcomes[static_cast<std::size_t>(best)].res;
  FitResult fr;
  fr.theta_vec = win.x;
  fr.theta = ParameterSet::decode(win.x, spec);
  fr.loglik = win.value;
  fr.n_iter = win.n_iter;
  fr.converged = win.converged;
  fr.criteria = win.criteria;
  fr.start_index = best;
  fr.n_params = static_cast<int>(win.x.size());
  fr.n_subjects = problem.n_subjects();
  fr.bic = bic(fr.loglik, fr.n_params, fr.n_subjects);

  // asymptotic variances from the inverse of the negated Hessian
  fr.se_vec = Eigen::VectorXd::Constant(win.x.size(), std::numeric_limits<double>::quiet_NaN());
  try {
    Eigen::MatrixXd hess = numeric_hessian(f, win.x, cfg.fd_step, cfg.workers);
    Eigen::LLT<Eigen::MatrixXd> llt;
    if (inflate(hess, 0.0, llt)) {
      Eigen::MatrixXd cov = llt.solve(Eigen::MatrixXd::Identity(hess.rows(), hess.cols()));
      for (int j = 0; j < win.x.size(); ++j)
        fr.se_vec[j] = cov(j, j) > 0.0 ? std::sqrt(cov(j, j)) : std::numeric_limits<double>::quiet_NaN();
    }
  } catch (const std::exception&) {
    // leave NaN standard errors; the fit result itself is still usable
  }
  return fr;
}

FitResult fit(const Dataset& data, const ModelSpec& spec, const ParameterSet& theta_init,
              const OptimizerConfig& cfg) {
  LikelihoodProblem problem(data, spec);
  problem.workers = 1;  // starts already run in parallel
  return fit(problem, theta_init, cfg);
}

ParameterSet default_init(const Dataset& data, const ModelSpec& spec) {
  ParameterSet p = ParameterSet::sized(spec);
  // class-agnostic marker moments
  double sum = 0.0, sum2 = 0.0;
  long n = 0;
  for (const auto& rec : data)
    for (int j = 0; j < rec.n_obs(); ++j) {
      sum += rec.obs_value[j];
      sum2 += rec.obs_value[j] * rec.obs_value[j];
      ++n;
    }
  double mean = n > 0 ? sum / n : 0.0;
  double sd = n > 1 ? std::sqrt(std::max(sum2 / n - mean * mean, 1e-6)) : 1.0;

  for (int tr = 0; tr < spec.n_transitions(); ++tr) {
    p.wb_shape_sqrt[tr].setConstant(3.0);
    p.wb_scale_sqrt[tr].setConstant(0.1);
  }
  // intercept-like class terms get the global mean, spread across classes to
  // break the label symmetry; other terms start at zero
  for (int g = 0; g < spec.n_classes; ++g) {
    double offset = spec.n_classes > 1
                        ? sd * (static_cast<double>(g) / (spec.n_classes - 1) - 0.5)
                        : 0.0;
    p.beta_class(g, 0) = mean + offset;
  }
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(spec.n_random(), spec.n_random());
  for (int j = 0; j < spec.n_random(); ++j) u(j, j) = 0.5 * sd;
  p.set_re_cholesky(u);
  p.sigma_e_sqrt.setConstant(std::sqrt(std::max(0.5 * sd, 1e-3)));
  for (int k = 0; k < spec.n_markers; ++k)
    if (spec.links[static_cast<std::size_t>(k)].type == LinkType::beta_cdf) {
      Eigen::VectorXd e(4);
      e << 1.0, 1.0, 0.0, 1.0;
      p.eta[static_cast<std::size_t>(k)] = e;
    }
  return p;
}

}  // namespace jlcid
