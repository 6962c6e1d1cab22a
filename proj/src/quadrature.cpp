#include "kdvdg/quadrature.hpp"

#include <cmath>
#include <stdexcept>

#include "kdvdg/legendre.hpp"

namespace kdv {

QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: need n >= 1");
  QuadratureRule rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  rule.exact_degree = 2 * n - 1;

  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Chebyshev guess for the i-th root of l_n
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double p, dp;
    for (int it = 0; it < 100; ++it) {
      // evaluate l_n and l_n' at z
      double pm = 1.0, pc = z;
      for (int k = 1; k < n; ++k) {
        const double pn = ((2 * k + 1) * z * pc - k * pm) / (k + 1);
        pm = pc;
        pc = pn;
      }
      p = pc;
      dp = n * (z * pc - pm) / (z * z - 1.0);
      const double dz = -p / dp;
      z += dz;
      if (std::abs(dz) < 1e-15) break;
    }
    // one polishing pass keeps weights symmetric to round-off
    {
      double pm = 1.0, pc = z;
      for (int k = 1; k < n; ++k) {
        const double pn = ((2 * k + 1) * z * pc - k * pm) / (k + 1);
        pm = pc;
        pc = pn;
      }
      p = pc;
      dp = n * (z * pc - pm) / (z * z - 1.0);
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.points[i] = -z;
    rule.points[n - 1 - i] = z;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.points[n / 2] = 0.0;
  return rule;
}

QuadratureRule gauss_rule_for_degree(int degree_target) {
  if (degree_target < 0) degree_target = 0;
  const int n = (degree_target + 2) / 2; // ceil((d+1)/2)
  return gauss_legendre(n);
}

} // namespace kdv
