#include "jlcid/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace jlcid {

// Newton iteration on the Legendre polynomial, seeded with the Chebyshev
// approximation to the roots.
GaussLegendre::GaussLegendre(int n) {
  if (n < 2) throw std::invalid_argument("GaussLegendre: need at least 2 nodes");
  nodes.resize(n);
  weights.resize(n);
  const double eps = 1e-15;
  int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1);
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= eps) break;
    }
    nodes[i] = -z;
    nodes[n - 1 - i] = z;
    weights[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    weights[n - 1 - i] = weights[i];
  }
}

void GaussLegendre::map(double a, double b, Eigen::ArrayXd& x, Eigen::ArrayXd& w) const {
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  x = mid + half * nodes;
  w = half * weights;
}

double GaussLegendre::integrate(const std::function<double(double)>& f, double a, double b) const {
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double acc = 0.0;
  for (int i = 0; i < size(); ++i) acc += weights[i] * f(mid + half * nodes[i]);
  return half * acc;
}

}  // namespace jlcid
