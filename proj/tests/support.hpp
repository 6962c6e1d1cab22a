#ifndef KDVDG_TESTS_SUPPORT_HPP
#define KDVDG_TESTS_SUPPORT_HPP

#include <cmath>
#include <functional>
#include <random>

#include "kdvdg/dg_function.hpp"
#include "kdvdg/mesh.hpp"

namespace kdvtest {

inline kdv::DgFunction random_dg(const kdv::DgSpace& space, std::mt19937& gen,
                                 double scale = 1.0) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  kdv::DgFunction g(space);
  for (double& c : g.data()) c = dist(gen);
  return g;
}

/// Composite Gauss quadrature oracle over [a,b], independent of the mesh
/// machinery under test.
inline double composite_quadrature(const std::function<double(double)>& f,
                                   double a, double b, int panels,
                                   int points_per_panel = 8) {
  // Gauss-Legendre nodes via the same closed recurrences but assembled
  // locally so the oracle does not lean on library quadrature tables
  std::vector<double> x(points_per_panel), w(points_per_panel);
  const int n = points_per_panel;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 1; k < n; ++k) {
        const double p2 = ((2 * k + 1) * z * p1 - k * p0) / (k + 1);
        p0 = p1;
        p1 = p2;
      }
      pp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = -p1 / pp;
      z += dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
  }
  double acc = 0.0;
  const double hp = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double xl = a + p * hp;
    for (int i = 0; i < n; ++i)
      acc += 0.5 * hp * w[i] * f(xl + 0.5 * hp * (x[i] + 1.0));
  }
  return acc;
}

/// Oracle: Maclaurin coefficients of sn(x,k) from the defining initial
/// value problem y'' = -(1+k^2) y + 2 k^2 y^3, y(0) = 0, y'(0) = 1,
/// independent of the AGM implementation.
inline std::vector<double> sn_series_coefficients(double k, int terms) {
  std::vector<double> a(terms, 0.0);
  a[1] = 1.0;
  const double k2 = k * k;
  for (int n = 0; n + 2 < terms; ++n) {
    double c = 0.0;
    for (int i = 0; i <= n; ++i)
      for (int j = 0; i + j <= n; ++j) c += a[i] * a[j] * a[n - i - j];
    a[n + 2] = (-(1.0 + k2) * a[n] + 2.0 * k2 * c) /
               (static_cast<double>(n + 2) * (n + 1));
  }
  return a;
}

inline double sn_series_eval(const std::vector<double>& a, double x) {
  double acc = 0.0;
  for (int n = static_cast<int>(a.size()) - 1; n >= 0; --n)
    acc = acc * x + a[n];
  return acc;
}

/// L2 norm of a DgFunction by brute-force quadrature (independent of the
/// coefficient formula).
inline double l2_by_quadrature(const kdv::DgFunction& g, int points = 12) {
  const kdv::Mesh& mesh = *g.space().mesh;
  double acc = 0.0;
  for (int j = 0; j < mesh.num_cells(); ++j) {
    const double xl = mesh.nodes[j];
    const double h = mesh.cell_sizes[j];
    acc += composite_quadrature(
        [&](double x) {
          const double s = 2.0 * (x - xl) / h - 1.0;
          const double v = g.evaluate_ref(j, s);
          return v * v;
        },
        xl, xl + h, 1, points);
  }
  return std::sqrt(acc);
}

} // namespace kdvtest

#endif
