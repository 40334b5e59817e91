#pragma once

#include <Eigen/Core>
#include <array>
#include <string>
#include <vector>

#include "jlcid/model_spec.hpp"

namespace jlcid {

// How a free coordinate maps to the reported parameter:
//   plain         : reported as stored
//   sqrt_weibull  : Weibull shape/scale; stored and reported on the
//                   square-root scale, squared before entering a hazard
//   sqrt_positive : stored as square root, reported squared
enum class CoordScale { plain, sqrt_weibull, sqrt_positive };

struct ParameterLayout {
  std::vector<std::string> names;
  std::vector<CoordScale> scales;
  int size() const { return static_cast<int>(names.size()); }
  static ParameterLayout make(const ModelSpec& spec);
};

// Full parameter vector of the model. Positive quantities are stored as
// square roots so that every real-valued free vector decodes to a valid
// parameter set. The last class's membership coefficients are pinned to 0
// and its variance factor to 1 for identifiability, so neither appears in
// the free vector.
struct ParameterSet {
  Eigen::MatrixXd zeta;  // (G-1) x (1 + #class covariates)
  std::array<Eigen::VectorXd, 3> wb_shape_sqrt;  // per transition, size G
  std::array<Eigen::VectorXd, 3> wb_scale_sqrt;
  std::array<Eigen::MatrixXd, 3> gamma;  // rows: 1, or G when class-specific
  Eigen::MatrixXd beta_class;   // G x n_class_terms
  Eigen::VectorXd beta_common;  // n_common_terms
  Eigen::VectorXd u_chol;       // lower triangle of U, column-major
  Eigen::VectorXd sigma_g_sqrt; // G-1 proportional factors, if free
  Eigen::VectorXd sigma_e_sqrt; // per marker
  std::vector<Eigen::VectorXd> eta;  // per marker; beta_cdf links hold 4 values

  static ParameterSet sized(const ModelSpec& spec);

  Eigen::VectorXd encode(const ModelSpec& spec) const;
  static ParameterSet decode(const Eigen::VectorXd& v, const ModelSpec& spec);
  static int n_free(const ModelSpec& spec);

  double wb_shape(int tr, int g) const { double s = wb_shape_sqrt[tr][g]; return s * s; }
  double wb_scale(int tr, int g) const { double s = wb_scale_sqrt[tr][g]; return s * s; }
  const Eigen::VectorXd gamma_row(int tr, int g) const {
    return gamma[tr].row(gamma[tr].rows() > 1 ? g : 0).transpose();
  }
  double sigma_g(int g) const {
    int last = static_cast<int>(sigma_g_sqrt.size());
    if (g >= last) return 1.0;
    double s = sigma_g_sqrt[g];
    return s * s;
  }
  double sigma_e(int k) const { double s = sigma_e_sqrt[k]; return s * s; }

  Eigen::MatrixXd re_cholesky() const;         // q x q lower triangular U
  void set_re_cholesky(const Eigen::MatrixXd& u);

  // Class-membership linear predictors stacked on beta etc. reordered so
  // that new class i is old class perm[i]; zeta is re-referenced against
  // the new last class and B rescaled so the last variance factor is 1.
  ParameterSet permute_classes(const std::vector<int>& perm, const ModelSpec& spec) const;
};

}  // namespace jlcid
