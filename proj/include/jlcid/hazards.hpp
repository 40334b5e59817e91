#pragma once

namespace jlcid {

// Weibull proportional-hazards transition intensity:
//   intensity(t)  = shape * scale^shape * t^(shape-1) * exp(log_rel_risk)
//   cumulative(t) = (scale * t)^shape * exp(log_rel_risk)
struct TransitionParams {
  double shape = 1.0;
  double scale = 1.0;
  double log_rel_risk = 0.0;  // covariate linear predictor
};

double intensity(const TransitionParams& p, double t);
double cumulative(const TransitionParams& p, double t);

// Ill->dead intensity at age t for a subject ill since t_ill. Markovian:
// depends on t only. Semi-markovian: depends on the time spent ill.
double intensity_12(const TransitionParams& p, double t, double t_ill, bool markovian);

}  // namespace jlcid
