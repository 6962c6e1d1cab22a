#include "kdvdg/legendre.hpp"

#include <stdexcept>

namespace kdv {

double legendre_eval(int k, double s) {
  if (k < 0) throw std::invalid_argument("legendre_eval: degree must be >= 0");
  if (k == 0) return 1.0;
  double pm = 1.0, p = s;
  for (int n = 1; n < k; ++n) {
    const double pn = ((2 * n + 1) * s * p - n * pm) / (n + 1);
    pm = p;
    p = pn;
  }
  return p;
}

double legendre_deriv(int k, double s) {
  if (k < 0) throw std::invalid_argument("legendre_deriv: degree must be >= 0");
  if (k == 0) return 0.0;
  // values and derivatives advanced together; stable at s = +-1
  double pm = 1.0, p = s;
  double dm = 0.0, d = 1.0;
  for (int n = 1; n < k; ++n) {
    const double pn = ((2 * n + 1) * s * p - n * pm) / (n + 1);
    const double dn = (2 * n + 1) * p + dm;
    pm = p;
    p = pn;
    dm = d;
    d = dn;
  }
  return d;
}

void legendre_eval_all(int q, double s, std::span<double> out) {
  out[0] = 1.0;
  if (q == 0) return;
  out[1] = s;
  for (int n = 1; n < q; ++n)
    out[n + 1] = ((2 * n + 1) * s * out[n] - n * out[n - 1]) / (n + 1);
}

void legendre_deriv_all(int q, double s, std::span<double> out) {
  std::vector<double> v(q + 1);
  legendre_eval_all(q, s, v);
  out[0] = 0.0;
  if (q == 0) return;
  out[1] = 1.0;
  for (int n = 1; n < q; ++n) out[n + 1] = (2 * n + 1) * v[n] + out[n - 1];
}

double legendre_deriv_at_one(int k) { return 0.5 * k * (k + 1); }

} // namespace kdv
