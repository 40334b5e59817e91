#include "jlcid/parameters.hpp"

#include <cmath>

#include "jlcid/errors.hpp"

namespace jlcid {

namespace {
const char* kTransitionName[3] = {"01", "02", "12"};

int tri_size(int q) { return q * (q + 1) / 2; }

std::string term_desc(const DesignTerm& tm, const ModelSpec& spec, int idx) {
  std::string s;
  if (tm.covariate >= 0) s += spec.obs_covariates[static_cast<std::size_t>(tm.covariate)];
  if (tm.power > 0) {
    if (!s.empty()) s += "_";
    s += "t";
    if (tm.power > 1) s += std::to_string(tm.power);
  }
  if (tm.marker >= 0) s += "_m" + std::to_string(tm.marker + 1);
  if (s.empty()) s = "c" + std::to_string(idx);
  return s;
}
}  // namespace

ParameterLayout ParameterLayout::make(const ModelSpec& spec) {
  ParameterLayout lay;
  const int g_count = spec.n_classes;
  auto push = [&](const std::string& name, CoordScale sc) {
    lay.names.push_back(name);
    lay.scales.push_back(sc);
  };
  for (int g = 0; g < g_count - 1; ++g) {
    push("zeta" + std::to_string(g + 1), CoordScale::plain);
    for (const auto& cov : spec.class_covariates)
      push("zeta" + std::to_string(g + 1) + "_" + cov, CoordScale::plain);
  }
  for (int tr = 0; tr < spec.n_transitions(); ++tr) {
    for (int g = 0; g < g_count; ++g)
      push(std::string("shape_") + kTransitionName[tr] + "_c" + std::to_string(g + 1),
           CoordScale::sqrt_weibull);
    for (int g = 0; g < g_count; ++g)
      push(std::string("scale_") + kTransitionName[tr] + "_c" + std::to_string(g + 1),
           CoordScale::sqrt_weibull);
  }
  for (int tr = 0; tr < spec.n_transitions(); ++tr) {
    int rows = spec.gamma_class_specific ? g_count : 1;
    for (int rg = 0; rg < rows; ++rg)
      for (const auto& cov : spec.event_covariates[tr]) {
        std::string nm = std::string("gamma_") + kTransitionName[tr] + "_" + cov;
        if (rows > 1) nm += "_c" + std::to_string(rg + 1);
        push(nm, CoordScale::plain);
      }
  }
  for (int j = 0; j < spec.n_class_terms(); ++j)
    for (int g = 0; g < g_count; ++g)
      push("beta" + std::to_string(j) + "_c" + std::to_string(g + 1), CoordScale::plain);
  for (int j = 0; j < spec.n_common_terms(); ++j)
    push("beta_" + term_desc(spec.common_terms[j], spec, j), CoordScale::plain);
  const int q = spec.n_random();
  for (int c = 0; c < q; ++c)
    for (int r = c; r < q; ++r)
      push("u" + std::to_string(c + 1) + std::to_string(r + 1), CoordScale::plain);
  if (spec.free_re_variance)
    for (int g = 0; g < g_count - 1; ++g)
      push("sigma_c" + std::to_string(g + 1), CoordScale::sqrt_positive);
  for (int k = 0; k < spec.n_markers; ++k)
    push("sigmae" + std::to_string(k + 1), CoordScale::sqrt_positive);
  for (int k = 0; k < spec.n_markers; ++k)
    if (spec.links[static_cast<std::size_t>(k)].type == LinkType::beta_cdf) {
      std::string m = "_m" + std::to_string(k + 1);
      push("eta1" + m, CoordScale::sqrt_positive);
      push("eta2" + m, CoordScale::sqrt_positive);
      push("eta3" + m, CoordScale::plain);
      push("eta4" + m, CoordScale::sqrt_positive);
    }
  return lay;
}

ParameterSet ParameterSet::sized(const ModelSpec& spec) {
  ParameterSet p;
  const int g_count = spec.n_classes;
  p.zeta = Eigen::MatrixXd::Zero(g_count - 1, spec.n_zeta_cols());
  for (int tr = 0; tr < 3; ++tr) {
    int sz = tr < spec.n_transitions() ? g_count : 0;
    p.wb_shape_sqrt[tr] = Eigen::VectorXd::Ones(sz);
    p.wb_scale_sqrt[tr] = Eigen::VectorXd::Ones(sz);
    int rows = tr < spec.n_transitions() ? (spec.gamma_class_specific ? g_count : 1) : 0;
    p.gamma[tr] = Eigen::MatrixXd::Zero(rows, spec.n_gamma(std::min(tr, 2)));
  }
  p.beta_class = Eigen::MatrixXd::Zero(g_count, spec.n_class_terms());
  p.beta_common = Eigen::VectorXd::Zero(spec.n_common_terms());
  p.u_chol = Eigen::VectorXd::Zero(tri_size(spec.n_random()));
  p.sigma_g_sqrt = Eigen::VectorXd::Ones(spec.free_re_variance ? g_count - 1 : 0);
  p.sigma_e_sqrt = Eigen::VectorXd::Ones(spec.n_markers);
  p.eta.resize(static_cast<std::size_t>(spec.n_markers));
  for (int k = 0; k < spec.n_markers; ++k)
    if (spec.links[static_cast<std::size_t>(k)].type == LinkType::beta_cdf) {
      Eigen::VectorXd e(4);
      e << 1.0, 1.0, 0.0, 1.0;
      p.eta[static_cast<std::size_t>(k)] = e;
    }
  return p;
}

int ParameterSet::n_free(const ModelSpec& spec) {
  return ParameterLayout::make(spec).size();
}

Eigen::VectorXd ParameterSet::encode(const ModelSpec& spec) const {
  Eigen::VectorXd v(n_free(spec));
  int i = 0;
  for (int g = 0; g < zeta.rows(); ++g)
    for (int c = 0; c < zeta.cols(); ++c) v[i++] = zeta(g, c);
  for (int tr = 0; tr < spec.n_transitions(); ++tr) {
    for (int g = 0; g < spec.n_classes; ++g) v[i++] = wb_shape_sqrt[tr][g];
    for (int g = 0; g < spec.n_classes; ++g) v[i++] = wb_scale_sqrt[tr][g];
  }
  for (int tr = 0; tr < spec.n_transitions(); ++tr)
    for (int rg = 0; rg < gamma[tr].rows(); ++rg)
      for (int c = 0; c < gamma[tr].cols(); ++c) v[i++] = gamma[tr](rg, c);
  for (int j = 0; j < beta_class.cols(); ++j)
    for (int g = 0; g < beta_class.rows(); ++g) v[i++] = beta_class(g, j);
  for (int j = 0; j < beta_common.size(); ++j) v[i++] = beta_common[j];
  for (int j = 0; j < u_chol.size(); ++j) v[i++] = u_chol[j];
  for (int j = 0; j < sigma_g_sqrt.size(); ++j) v[i++] = sigma_g_sqrt[j];
  for (int j = 0; j < sigma_e_sqrt.size(); ++j) v[i++] = sigma_e_sqrt[j];
  for (const auto& e : eta)
    for (int j = 0; j < e.size(); ++j) v[i++] = e[j];
  if (i != v.size()) throw numeric_error("ParameterSet::encode: layout mismatch");
  return v;
}

ParameterSet ParameterSet::decode(const Eigen::VectorXd& v, const ModelSpec& spec) {
  if (v.size() != n_free(spec))
    throw numeric_error("ParameterSet::decode: expected " + std::to_string(n_free(spec)) +
                        " values, got " + std::to_string(v.size()));
  ParameterSet p = sized(spec);
  int i = 0;
  for (int g = 0; g < p.zeta.rows(); ++g)
    for (int c = 0; c < p.zeta.cols(); ++c) p.zeta(g, c) = v[i++];
  for (int tr = 0; tr < spec.n_transitions(); ++tr) {
    for (int g = 0; g < spec.n_classes; ++g) p.wb_shape_sqrt[tr][g] = v[i++];
    for (int g = 0; g < spec.n_classes; ++g) p.wb_scale_sqrt[tr][g] = v[i++];
  }
  for (int tr = 0; tr < spec.n_transitions(); ++tr)
    for (int rg = 0; rg < p.gamma[tr].rows(); ++rg)
      for (int c = 0; c < p.gamma[tr].cols(); ++c) p.gamma[tr](rg, c) = v[i++];
  for (int j = 0; j < p.beta_class.cols(); ++j)
    for (int g = 0; g < p.beta_class.rows(); ++g) p.beta_class(g, j) = v[i++];
  for (int j = 0; j < p.beta_common.size(); ++j) p.beta_common[j] = v[i++];
  for (int j = 0; j < p.u_chol.size(); ++j) p.u_chol[j] = v[i++];
  for (int j = 0; j < p.sigma_g_sqrt.size(); ++j) p.sigma_g_sqrt[j] = v[i++];
  for (int j = 0; j < p.sigma_e_sqrt.size(); ++j) p.sigma_e_sqrt[j] = v[i++];
  for (auto& e : p.eta)
    for (int j = 0; j < e.size(); ++j) e[j] = v[i++];
  return p;
}

Eigen::MatrixXd ParameterSet::re_cholesky() const {
  int q = 0;
  while (tri_size(q) < u_chol.size()) ++q;
  if (tri_size(q) != u_chol.size()) throw numeric_error("u_chol: not a triangle size");
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(q, q);
  int i = 0;
  for (int c = 0; c < q; ++c)
    for (int r = c; r < q; ++r) u(r, c) = u_chol[i++];
  return u;
}

void ParameterSet::set_re_cholesky(const Eigen::MatrixXd& u) {
  int q = static_cast<int>(u.rows());
  u_chol.resize(tri_size(q));
  int i = 0;
  for (int c = 0; c < q; ++c)
    for (int r = c; r < q; ++r) u_chol[i++] = u(r, c);
}

ParameterSet ParameterSet::permute_classes(const std::vector<int>& perm,
                                           const ModelSpec& spec) const {
  const int g_count = spec.n_classes;
  if (static_cast<int>(perm.size()) != g_count)
    throw config_error("permute_classes: permutation length mismatch");
  ParameterSet p = *this;
  // linear predictors of the old parameterization (last class = 0 row)
  Eigen::MatrixXd full = Eigen::MatrixXd::Zero(g_count, zeta.cols());
  full.topRows(g_count - 1) = zeta;
  int new_ref = perm[static_cast<std::size_t>(g_count - 1)];
  for (int g = 0; g < g_count - 1; ++g)
    p.zeta.row(g) = full.row(perm[static_cast<std::size_t>(g)]) - full.row(new_ref);
  for (int tr = 0; tr < spec.n_transitions(); ++tr) {
    for (int g = 0; g < g_count; ++g) {
      p.wb_shape_sqrt[tr][g] = wb_shape_sqrt[tr][perm[static_cast<std::size_t>(g)]];
      p.wb_scale_sqrt[tr][g] = wb_scale_sqrt[tr][perm[static_cast<std::size_t>(g)]];
    }
    if (gamma[tr].rows() > 1)
      for (int g = 0; g < g_count; ++g)
        p.gamma[tr].row(g) = gamma[tr].row(perm[static_cast<std::size_t>(g)]);
  }
  for (int g = 0; g < g_count; ++g)
    p.beta_class.row(g) = beta_class.row(perm[static_cast<std::size_t>(g)]);
  if (spec.free_re_variance) {
    double ref_factor = sigma_g(new_ref);
    for (int g = 0; g < g_count - 1; ++g)
      p.sigma_g_sqrt[g] = std::sqrt(sigma_g(perm[static_cast<std::size_t>(g)]) / ref_factor);
    p.u_chol = u_chol * ref_factor;
  }
  return p;
}

}  // namespace jlcid
