#pragma once

#include <Eigen/Core>
#include <functional>

namespace jlcid {

// Gauss-Legendre rule on [-1, 1]; exact for polynomials of degree 2n-1.
struct GaussLegendre {
  Eigen::ArrayXd nodes;    // ascending, interior to (-1, 1)
  Eigen::ArrayXd weights;  // positive, summing to 2

  explicit GaussLegendre(int n);

  int size() const { return static_cast<int>(nodes.size()); }

  // Nodes/weights mapped to [a, b].
  void map(double a, double b, Eigen::ArrayXd& x, Eigen::ArrayXd& w) const;

  double integrate(const std::function<double(double)>& f, double a, double b) const;
};

}  // namespace jlcid
