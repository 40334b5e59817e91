#include "jlcid/longitudinal.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <string>

#include "jlcid/errors.hpp"
#include "jlcid/link.hpp"

namespace jlcid {

ConditionalMoments conditional_moments(const SubjectRecord& rec, int g,
                                       const ParameterSet& theta, const ModelSpec& spec) {
  const int n = rec.n_obs();
  if (rec.design_class.cols() != theta.beta_class.cols() ||
      rec.design_common.cols() != theta.beta_common.size())
    throw numeric_error("conditional_moments: design/parameter dimension mismatch");
  ConditionalMoments m;
  m.mean = rec.design_class * theta.beta_class.row(g).transpose();
  if (rec.design_common.cols() > 0) m.mean += rec.design_common * theta.beta_common;

  Eigen::MatrixXd zu = rec.design_random * theta.re_cholesky();
  double sg = theta.sigma_g(g);
  m.cov = (sg * sg) * (zu * zu.transpose());
  for (int j = 0; j < n; ++j) {
    double se = theta.sigma_e(rec.obs_marker[static_cast<std::size_t>(j)]);
    m.cov(j, j) += se * se;
  }
  return m;
}

TransformedSeries transform_series(const SubjectRecord& rec, const ParameterSet& theta,
                                   const ModelSpec& spec) {
  TransformedSeries out;
  out.values.resize(rec.n_obs());
  for (int j = 0; j < rec.n_obs(); ++j) {
    int k = rec.obs_marker[static_cast<std::size_t>(j)];
    auto tr = transform(spec.links[static_cast<std::size_t>(k)],
                        theta.eta[static_cast<std::size_t>(k)], rec.obs_value[j]);
    out.values[j] = tr.value;
    out.log_jacobian += tr.log_jacobian;
  }
  return out;
}

double log_density(const SubjectRecord& rec, int g, const ParameterSet& theta,
                   const ModelSpec& spec) {
  const int n = rec.n_obs();
  if (n == 0) return 0.0;
  auto ts = transform_series(rec, theta, spec);
  auto m = conditional_moments(rec, g, theta, spec);
  Eigen::LLT<Eigen::MatrixXd> llt(m.cov);
  if (llt.info() != Eigen::Success)
    throw numeric_error("log_density: covariance not positive definite (subject id=" +
                        std::to_string(rec.id) + ", class " + std::to_string(g + 1) + ")");
  Eigen::VectorXd resid = ts.values - m.mean;
  Eigen::VectorXd half = llt.matrixL().solve(resid);
  double logdet = 0.0;
  for (int j = 0; j < n; ++j) logdet += 2.0 * std::log(llt.matrixL()(j, j));
  return -0.5 * (n * std::log(2.0 * M_PI) + logdet + half.squaredNorm()) + ts.log_jacobian;
}

Eigen::VectorXd conditional_re_mean(const SubjectRecord& rec, int g,
                                    const ParameterSet& theta, const ModelSpec& spec) {
  const int q = static_cast<int>(rec.design_random.cols());
  if (rec.n_obs() == 0) return Eigen::VectorXd::Zero(q);
  auto ts = transform_series(rec, theta, spec);
  auto m = conditional_moments(rec, g, theta, spec);
  Eigen::LLT<Eigen::MatrixXd> llt(m.cov);
  if (llt.info() != Eigen::Success)
    throw numeric_error("conditional_re_mean: covariance not positive definite (subject id=" +
                        std::to_string(rec.id) + ")");
  Eigen::MatrixXd u = theta.re_cholesky();
  double sg = theta.sigma_g(g);
  Eigen::MatrixXd cov_uy = (sg * sg) * (u * u.transpose()) * rec.design_random.transpose();
  return cov_uy * llt.solve(ts.values - m.mean);
}

}  // namespace jlcid
