#include "kdvdg/exact.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "kdvdg/errors.hpp"
#include "kdvdg/legendre.hpp"

namespace kdv {

ExactSolution linear_solution(int l, double c1, double c2,
                              double domain_length) {
  if (l == 0)
    throw std::invalid_argument("linear_solution: wave index l must be nonzero");
  if (!(domain_length > 0.0))
    throw std::invalid_argument("linear_solution: domain length must be positive");
  const double c = 2.0 * M_PI * l / domain_length;
  ExactSolution sol;
  sol.family = ExactSolution::Family::linear_sinusoid;
  sol.label = "linear_sinusoid(l=" + std::to_string(l) + ")";
  sol.flux = ProblemSpec::linear();
  sol.periodic = true;
  sol.spatial_period = std::abs(domain_length / l);
  const double speed = 1.0 + c * c;
  sol.u = [=](double x, double t) {
    const double xi = c * (x + speed * t);
    return c1 * std::sin(xi) + c2 * std::cos(xi);
  };
  sol.ux = [=](double x, double t) {
    const double xi = c * (x + speed * t);
    return c * (c1 * std::cos(xi) - c2 * std::sin(xi));
  };
  sol.uxx = [=](double x, double t) {
    const double xi = c * (x + speed * t);
    return -c * c * (c1 * std::sin(xi) + c2 * std::cos(xi));
  };
  return sol;
}

ExactSolution mkdv4_solution(double k, EllipticConvention convention,
                             double flux_alpha) {
  if (!(k >= 0.0 && k < 1.0))
    throw std::invalid_argument("mkdv4_solution: need modulus/parameter in [0,1)");
  ExactSolution sol;
  sol.family = ExactSolution::Family::mkdv4_sn;
  sol.label = convention == EllipticConvention::modulus
                  ? "mkdv4_sn(k modulus)"
                  : "mkdv4_sn(k parameter)";
  sol.flux = ProblemSpec(4, flux_alpha);
  sol.periodic = true;
  sol.spatial_period = sn_period(k, convention);

  // amplitude is the literal k of the formula; the sn'' identity uses the
  // modulus of the evaluated function, so kk2 = k^2 or m per convention
  const double amp = k;
  const double speed = k * k + 1.0;
  const double kk2 =
      convention == EllipticConvention::modulus ? k * k : k;
  sol.u = [=](double x, double t) {
    return amp * jacobi_sn(x + speed * t, k, convention);
  };
  sol.ux = [=](double x, double t) {
    const auto j = jacobi_elliptic(x + speed * t, k, convention);
    return amp * j.cn * j.dn;
  };
  // sn'' = -(1+k^2) sn + 2 k^2 sn^3
  sol.uxx = [=](double x, double t) {
    const double s = jacobi_sn(x + speed * t, k, convention);
    return amp * (-(1.0 + kk2) * s + 2.0 * kk2 * s * s * s);
  };
  return sol;
}

ExactSolution kink_solution(double c, int sign) {
  if (!(c > 0.0)) throw std::invalid_argument("kink_solution: need c > 0");
  ExactSolution sol;
  sol.family = ExactSolution::Family::quartic_kink;
  sol.label = sign >= 0 ? "quartic_kink" : "quartic_antikink";
  sol.flux = ProblemSpec(4, 0.25);
  sol.periodic = false;
  sol.spatial_period = 0.0;
  const double a = (sign >= 0 ? 1.0 : -1.0) * std::sqrt(3.0 * c);
  const double b = 0.5 * std::sqrt(2.0 * c);
  sol.u = [=](double x, double t) { return a * std::tanh(b * (x + c * t)); };
  sol.ux = [=](double x, double t) {
    const double s = 1.0 / std::cosh(b * (x + c * t));
    return a * b * s * s;
  };
  sol.uxx = [=](double x, double t) {
    const double th = std::tanh(b * (x + c * t));
    const double s = 1.0 / std::cosh(b * (x + c * t));
    return -2.0 * a * b * b * s * s * th;
  };
  return sol;
}

std::vector<double> fd_weights(double x0, const std::vector<double>& nodes,
                               int deriv_order) {
  // Fornberg's recursion for finite-difference weights
  const int n = static_cast<int>(nodes.size()) - 1;
  const int m = deriv_order;
  std::vector<double> d(static_cast<size_t>(n + 1) * (m + 1), 0.0);
  auto at = [&](int i, int k) -> double& {
    return d[static_cast<size_t>(i) * (m + 1) + k];
  };
  at(0, 0) = 1.0;
  double c1 = 1.0;
  double c4 = nodes[0] - x0;
  for (int i = 1; i <= n; ++i) {
    double c2 = 1.0;
    const double c5 = c4;
    c4 = nodes[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = std::min(i, m); k >= 1; --k)
          at(i, k) = c1 * (k * at(i - 1, k - 1) - c5 * at(i - 1, k)) / c2;
        at(i, 0) = -c1 * c5 * at(i - 1, 0) / c2;
      }
      for (int k = std::min(i, m); k >= 1; --k)
        at(j, k) = (c4 * at(j, k) - k * at(j, k - 1)) / c3;
      at(j, 0) = c4 * at(j, 0) / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n + 1);
  for (int i = 0; i <= n; ++i) w[i] = at(i, m);
  return w;
}

double pde_residual_max(const ExactSolution& sol, double x_lo, double x_hi,
                        double t_lo, double t_hi, int samples, unsigned seed) {
  // 13-point central stencils; step sized against the eps/h^3 round-off
  // floor of the third derivative
  constexpr int half = 6;
  const double hx = 0.05;
  const double ht = 0.05;
  std::vector<double> offs(2 * half + 1);
  for (int i = -half; i <= half; ++i) offs[i + half] = i;
  const auto w1 = fd_weights(0.0, offs, 1);
  const auto w3 = fd_weights(0.0, offs, 3);

  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> ux_dist(x_lo, x_hi);
  std::uniform_real_distribution<double> ut_dist(t_lo, t_hi);

  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const double x = ux_dist(gen);
    const double t = ut_dist(gen);
    double u_t = 0.0, fpu_x = 0.0, u_xxx = 0.0;
    for (int i = -half; i <= half; ++i) {
      u_t += w1[i + half] * sol.u(x, t + i * ht);
      fpu_x += w1[i + half] * sol.flux.fprime(sol.u(x + i * hx, t));
      u_xxx += w3[i + half] * sol.u(x + i * hx, t);
    }
    u_t /= ht;
    fpu_x /= hx;
    u_xxx /= hx * hx * hx;
    worst = std::max(worst, std::abs(u_t - fpu_x + u_xxx));
  }
  return worst;
}

void require_periodic_fit(const ExactSolution& sol, double domain_length) {
  if (!sol.periodic)
    throw PeriodicityError("solution family is not periodic", 0.0);
  const double p = sol.spatial_period;
  const double ratio = domain_length / p;
  const double nearest = std::round(ratio);
  if (nearest < 1.0 || std::abs(ratio - nearest) > 1e-12 * ratio)
    throw PeriodicityError(
        "domain length is not a whole number of spatial periods (period = " +
            std::to_string(p) + ")",
        p);
}

ErrorNorms error_vs_exact(const DgFunction& u_h, const ExactSolution& sol,
                          double t) {
  const DgSpace& space = u_h.space();
  const int q = space.degree;
  const Mesh& mesh = *space.mesh;
  const auto rule = gauss_rule_for_degree(4 * q + 4);
  const DgFunction du_h = u_h.derivative();

  double l2 = 0.0, l4 = 0.0, grad = 0.0;
  for (int j = 0; j < space.num_cells(); ++j) {
    const double h = mesh.cell_sizes[j];
    double cl2 = 0.0, cl4 = 0.0, cg = 0.0;
    for (int p = 0; p < rule.size(); ++p) {
      const double s = rule.points[p];
      const double x = mesh.nodes[j] + 0.5 * h * (s + 1.0);
      const double e = sol.u(x, t) - u_h.evaluate_ref(j, s);
      const double ex = sol.ux(x, t) - du_h.evaluate_ref(j, s);
      cl2 += rule.weights[p] * e * e;
      cl4 += rule.weights[p] * e * e * e * e;
      cg += rule.weights[p] * ex * ex;
    }
    l2 += 0.5 * h * cl2;
    l4 += 0.5 * h * cl4;
    grad += 0.5 * h * cg;
  }
  double jumps = 0.0;
  for (int f = 0; f < mesh.num_cells(); ++f) {
    const double jf = u_h.jump(f);
    jumps += jf * jf / mesh.avg_h(f);
  }
  return {std::sqrt(l2), std::pow(l4, 0.25), std::sqrt(grad + jumps)};
}

} // namespace kdv
