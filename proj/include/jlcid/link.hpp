#pragma once

#include <Eigen/Core>

#include "jlcid/model_spec.hpp"
#include "jlcid/parameters.hpp"

namespace jlcid {

// Regularized incomplete beta function I_x(a, b), continued-fraction
// evaluation, absolute accuracy around 1e-14.
double reg_inc_beta(double a, double b, double x);

// log of the Beta(a, b) density at x in (0, 1)
double log_beta_pdf(double a, double b, double x);

struct TransformResult {
  double value = 0.0;
  double log_jacobian = 0.0;
  bool clamped = false;
};

// Maps an observed marker value onto the latent-process scale.
// identity: (y, 0). beta_cdf: rescales y into (0,1) with half-unit padding,
// applies the Beta CDF with shapes eta1, eta2, then centers/scales by
// (eta3, eta4). Values whose rescaled position leaves [1e-4, 1-1e-4] are
// clamped and flagged.
TransformResult transform(const LinkSpec& link, const Eigen::VectorXd& eta, double y);

}  // namespace jlcid
