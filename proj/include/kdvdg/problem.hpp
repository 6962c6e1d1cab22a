#ifndef KDVDG_PROBLEM_HPP
#define KDVDG_PROBLEM_HPP

#include <stdexcept>

namespace kdv {

/// Flux f(u) = alpha u^m with even integer m >= 2. m = 2 gives the linear
/// KdV equation, m = 4 the defocusing modified one.
struct ProblemSpec {
  int m = 2;
  double alpha = 0.5;

  ProblemSpec() = default;
  ProblemSpec(int m_, double alpha_) : m(m_), alpha(alpha_) {
    if (m < 2) throw std::invalid_argument("ProblemSpec: m must be >= 2");
    if (!(alpha > 0.0))
      throw std::invalid_argument("ProblemSpec: alpha must be positive");
  }

  static ProblemSpec linear() { return {2, 0.5}; }
  static ProblemSpec mkdv4() { return {4, 0.5}; }

  bool is_linear() const { return m == 2; }

  double f(double u) const {
    double p = u;
    for (int i = 1; i < m; ++i) p *= u;
    return alpha * p;
  }
  double fprime(double u) const {
    double p = 1.0;
    for (int i = 1; i < m; ++i) p *= u;
    return alpha * m * p;
  }
  double fsecond(double u) const {
    double p = 1.0;
    for (int i = 2; i < m; ++i) p *= u;
    return alpha * m * (m - 1) * p;
  }
};

/// The scheme's divided difference, alpha sum_{i=0}^{m-1} a^i b^{m-1-i}.
/// Equals (f(a)-f(b))/(a-b) for a != b and f'(a) at a = b; symmetric in
/// its arguments, and the closed form removes the 0/0.
inline double divided_difference(double a, double b, const ProblemSpec& spec) {
  double acc = 0.0;
  double ai = 1.0;
  for (int i = 0; i < spec.m; ++i) {
    double bp = 1.0;
    for (int j = 0; j < spec.m - 1 - i; ++j) bp *= b;
    acc += ai * bp;
    ai *= a;
  }
  return spec.alpha * acc;
}

/// d/da of the divided difference: alpha sum_{i=1}^{m-1} i a^{i-1} b^{m-1-i}.
inline double divided_difference_da(double a, double b,
                                    const ProblemSpec& spec) {
  double acc = 0.0;
  double ai = 1.0; // a^{i-1}
  for (int i = 1; i < spec.m; ++i) {
    double bp = 1.0;
    for (int j = 0; j < spec.m - 1 - i; ++j) bp *= b;
    acc += i * ai * bp;
    ai *= a;
  }
  return spec.alpha * acc;
}

} // namespace kdv

#endif
