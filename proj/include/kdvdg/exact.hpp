#ifndef KDVDG_EXACT_HPP
#define KDVDG_EXACT_HPP

#include <functional>
#include <string>

#include "kdvdg/dg_function.hpp"
#include "kdvdg/elliptic.hpp"
#include "kdvdg/problem.hpp"

namespace kdv {

/// Closed-form benchmark solution of u_t - f'(u)_x + u_xxx = 0 with
/// analytic spatial derivatives. `periodic` solutions carry their spatial
/// period; the kink family is an evaluator only and is excluded from
/// periodic-domain runs.
struct ExactSolution {
  enum class Family { linear_sinusoid, mkdv4_sn, quartic_kink };

  Family family = Family::linear_sinusoid;
  std::string label;
  ProblemSpec flux;
  bool periodic = true;
  double spatial_period = 0.0;

  std::function<double(double, double)> u;   // (x, t)
  std::function<double(double, double)> ux;
  std::function<double(double, double)> uxx;
};

/// C1 sin(xi) + C2 cos(xi) with xi = c (x + (1+c^2) t) and c = 2 pi l / L;
/// solves the linear problem f(u) = u^2/2 identically. Requires l != 0.
ExactSolution linear_solution(int l, double c1, double c2, double domain_length);

/// u(x,t) = k sn(x + (k^2+1) t, k). In the modulus convention and with
/// f(u) = u^4/2 this is exact (amplitude k, speed 1+k^2, spatial period
/// 4K(k)); other flux scalings and the parameter convention are selectable
/// so that mismatched configurations can be reproduced and tested.
ExactSolution mkdv4_solution(double k, EllipticConvention convention,
                             double flux_alpha = 0.5);

/// (3c)^{1/2} tanh((2c)^{1/2}/2 (x + c t)), sign +-1; non-periodic
/// evaluator for the quartic flux family.
ExactSolution kink_solution(double c, int sign = +1);

/// Sup over sampled (x,t) of |u_t - f'(u)_x + u_xxx| with all derivatives
/// from high-order central finite differences of the evaluator itself.
/// The exactness certificate every periodic solution must pass before a
/// benchmark run uses it.
double pde_residual_max(const ExactSolution& sol, double x_lo, double x_hi,
                        double t_lo, double t_hi, int samples = 100,
                        unsigned seed = 20240901u);

/// Checks that domain_length is a whole number of spatial periods
/// (tolerance 1e-12 relative); throws PeriodicityError with the true
/// period otherwise.
void require_periodic_fit(const ExactSolution& sol, double domain_length);

/// Broken-norm errors of U against the exact solution at time t, by
/// per-cell quadrature with rules exact to degree 4q+4. The jump part of
/// the energy norm comes from U alone.
struct ErrorNorms {
  double l2 = 0.0;
  double l4 = 0.0;
  double enorm = 0.0;
};
ErrorNorms error_vs_exact(const DgFunction& u_h, const ExactSolution& sol,
                          double t);

/// Finite-difference weights on the nodes x_i for the m-th derivative at
/// x0 (Fornberg's algorithm).
std::vector<double> fd_weights(double x0, const std::vector<double>& nodes,
                               int deriv_order);

} // namespace kdv

#endif
