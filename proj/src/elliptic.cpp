#include "kdvdg/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kdv {

namespace {

double to_modulus(double value, EllipticConvention convention) {
  if (value < 0.0 || value >= 1.0)
    throw std::invalid_argument(
        "elliptic: modulus/parameter must lie in [0,1)");
  return convention == EllipticConvention::modulus ? value : std::sqrt(value);
}

} // namespace

double agm(double a, double b) {
  for (int i = 0; i < 64; ++i) {
    const double an = 0.5 * (a + b);
    const double gn = std::sqrt(a * b);
    a = an;
    b = gn;
    if (std::abs(a - b) <= 1e-17 * std::abs(a)) break;
  }
  return 0.5 * (a + b);
}

double complete_K(double modulus_param, EllipticConvention convention) {
  const double k = to_modulus(modulus_param, convention);
  const double kprime = std::sqrt((1.0 - k) * (1.0 + k));
  return M_PI / (2.0 * agm(1.0, kprime));
}

JacobiValues jacobi_elliptic(double x, double modulus_param,
                             EllipticConvention convention) {
  const double k = to_modulus(modulus_param, convention);

  if (k == 0.0) return {std::sin(x), std::cos(x), 1.0};

  // keep the backward recurrence accurate for large arguments
  const double quarter = complete_K(k, EllipticConvention::modulus);
  if (std::abs(x) > 2.0 * quarter) x = std::remainder(x, 4.0 * quarter);

  if (x == 0.0) return {0.0, 1.0, 1.0};

  // AGM chain: a_{n+1} = (a_n+b_n)/2, b_{n+1} = sqrt(a_n b_n),
  // c_{n+1} = (a_n-b_n)/2, run until c is negligible
  constexpr int max_levels = 33;
  double a[max_levels], c[max_levels];
  a[0] = 1.0;
  c[0] = k;
  double an = 1.0;
  double bn = std::sqrt((1.0 - k) * (1.0 + k));
  int levels = 0;
  while (levels + 1 < max_levels) {
    const double cn = 0.5 * (an - bn);
    const double a_next = 0.5 * (an + bn);
    bn = std::sqrt(an * bn);
    an = a_next;
    ++levels;
    a[levels] = an;
    c[levels] = cn;
    if (std::abs(cn) <= 1e-17 * an) break;
  }

  // descend through the amplitudes:
  // phi_{n-1} = (phi_n + asin(c_n/a_n sin phi_n)) / 2
  double phi = std::ldexp(a[levels] * x, levels);
  for (int i = levels; i > 0; --i)
    phi = 0.5 * (phi + std::asin(std::clamp(c[i] / a[i] * std::sin(phi), -1.0, 1.0)));

  const double sn = std::sin(phi);
  const double cn = std::cos(phi);
  const double dn = std::sqrt(1.0 - (k * sn) * (k * sn));
  return {sn, cn, dn};
}

double jacobi_sn(double x, double modulus_param,
                 EllipticConvention convention) {
  return jacobi_elliptic(x, modulus_param, convention).sn;
}

double sn_period(double modulus_param, EllipticConvention convention) {
  return 4.0 * complete_K(modulus_param, convention);
}

} // namespace kdv
