#include "jlcid/hazards.hpp"

#include <cmath>
#include <string>

#include "jlcid/errors.hpp"

namespace jlcid {

namespace {
void check(const TransitionParams& p) {
  if (!(p.shape > 0.0) || !(p.scale > 0.0))
    throw numeric_error("TransitionParams: shape and scale must be positive");
}
}  // namespace

double intensity(const TransitionParams& p, double t) {
  check(p);
  if (t <= 0.0) {
    if (p.shape < 1.0)
      throw numeric_error("intensity: singular at t <= 0 for shape < 1 (t=" +
                          std::to_string(t) + ")");
    if (t < 0.0) throw numeric_error("intensity: negative time");
    return p.shape == 1.0 ? p.scale * std::exp(p.log_rel_risk) : 0.0;
  }
  return p.shape * std::pow(p.scale, p.shape) * std::pow(t, p.shape - 1.0) *
         std::exp(p.log_rel_risk);
}

double cumulative(const TransitionParams& p, double t) {
  check(p);
  if (t < 0.0) throw numeric_error("cumulative: negative time");
  if (t == 0.0) return 0.0;
  return std::pow(p.scale * t, p.shape) * std::exp(p.log_rel_risk);
}

double intensity_12(const TransitionParams& p, double t, double t_ill, bool markovian) {
  if (markovian) return intensity(p, t);
  if (t < t_ill) throw numeric_error("intensity_12: t precedes illness onset");
  return intensity(p, t - t_ill);
}

}  // namespace jlcid
