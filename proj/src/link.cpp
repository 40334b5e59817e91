#include "jlcid/link.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "jlcid/errors.hpp"

namespace jlcid {

namespace {

double log_beta_fn(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// Lentz continued fraction for the incomplete beta.
double betacf(double a, double b, double x) {
  const double tiny = 1e-300, eps = 1e-15;
  double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 300; ++m) {
    int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps) break;
  }
  return h;
}

}  // namespace

double reg_inc_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0))
    throw numeric_error("reg_inc_beta: shapes must be positive");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double front = std::exp(a * std::log(x) + b * std::log1p(-x) - log_beta_fn(a, b));
  if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double log_beta_pdf(double a, double b, double x) {
  return (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - log_beta_fn(a, b);
}

TransformResult transform(const LinkSpec& link, const Eigen::VectorXd& eta, double y) {
  if (link.type == LinkType::identity) return TransformResult{y, 0.0, false};

  if (y < link.y_min || y > link.y_max)
    throw data_error("transform: marker value " + std::to_string(y) + " outside [" +
                     std::to_string(link.y_min) + ", " + std::to_string(link.y_max) + "]");
  if (eta.size() != 4) throw numeric_error("transform: beta_cdf link needs 4 eta values");
  double a = eta[0] * eta[0];
  double b = eta[1] * eta[1];
  double loc = eta[2];
  double scale = eta[3] * eta[3];
  if (!(a > 0.0) || !(b > 0.0) || !(scale > 0.0))
    throw numeric_error("transform: degenerate eta");

  // half-unit padding keeps the rescaled score strictly inside (0, 1)
  double range = link.y_max - link.y_min + 1.0;
  double u = (y - link.y_min + 0.5) / range;
  TransformResult out;
  const double lo = 1e-4, hi = 1.0 - 1e-4;
  if (u < lo || u > hi) {
    u = std::clamp(u, lo, hi);
    out.clamped = true;
  }
  out.value = (reg_inc_beta(a, b, u) - loc) / scale;
  out.log_jacobian = log_beta_pdf(a, b, u) - std::log(range) - std::log(scale);
  return out;
}

}  // namespace jlcid
