#ifndef KDVDG_QUADRATURE_HPP
#define KDVDG_QUADRATURE_HPP

#include <vector>

namespace kdv {

/// Gauss-Legendre rule on [-1,1]. An n-point rule integrates polynomials
/// of degree <= 2n-1 exactly; the weights sum to 2.
struct QuadratureRule {
  std::vector<double> points;
  std::vector<double> weights;
  int exact_degree = 0;

  int size() const { return static_cast<int>(points.size()); }

  /// Integrate a callable over [-1,1].
  template <class F>
  double integrate(F&& f) const {
    double acc = 0.0;
    for (int i = 0; i < size(); ++i) acc += weights[i] * f(points[i]);
    return acc;
  }
};

/// n-point Gauss-Legendre rule, nodes by Newton iteration on l_n with
/// Chebyshev initial guesses, tolerance 1e-15.
QuadratureRule gauss_legendre(int n);

/// Smallest Gauss-Legendre rule exact to at least degree_target,
/// i.e. n = ceil((degree_target+1)/2) points.
QuadratureRule gauss_rule_for_degree(int degree_target);

} // namespace kdv

#endif
