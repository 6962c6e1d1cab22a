#ifndef KDVDG_TIME_STEPPER_HPP
#define KDVDG_TIME_STEPPER_HPP

#include <functional>

#include "kdvdg/dg_function.hpp"
#include "kdvdg/invariants.hpp"
#include "kdvdg/operators.hpp"
#include "kdvdg/problem.hpp"

namespace kdv {

/// One accepted step of the conservative scheme.
struct StepRecord {
  int index = 0;
  double t = 0.0;
  DgFunction u;
  DgFunction v;
  int newton_iters = 0;
  double residual_norm = 0.0;
  InvariantRecord invariants;
};

/// Fully discrete conservative scheme: one implicit step solves
///   int ((U^{n+1}-U^n)/tau + G_h(V^{n+1})) Phi = 0
///   int (V^{n+1} + dd(U^{n+1},U^n)) Psi + a_h((U^n+U^{n+1})/2, Psi) = 0.
/// V^{n+1} appears linearly and is eliminated; Newton runs on U^{n+1}
/// alone with the analytic Jacobian of the divided difference.
class ConservativeStepper {
public:
  ConservativeStepper(const OperatorSet& ops, ProblemSpec spec,
                      double newton_tol = 1e-12, int max_iters = 50);

  struct Result {
    DgFunction u;
    DgFunction v;
    int newton_iters = 0;
    double residual_norm = 0.0;
  };

  /// Advance by tau (tau != 0; negative tau steps backwards, which the
  /// midpoint structure supports). Throws NewtonDivergenceError.
  Result step(const DgFunction& u_old, double tau) const;

  /// V consistent with the semi-discrete second equation at a state,
  /// V = -P_h(f'(U)) + A_h(U).
  DgFunction initial_v(const DgFunction& u) const;

  const OperatorSet& ops() const { return ops_; }
  const ProblemSpec& spec() const { return spec_; }
  double newton_tol() const { return newton_tol_; }

private:
  DgFunction eliminate_v(const DgFunction& u_new, const DgFunction& u_old) const;

  const OperatorSet& ops_;
  ProblemSpec spec_;
  double newton_tol_;
  int max_iters_;

  // the linear-problem Jacobian depends only on tau; cache its factorization
  struct Cache;
  std::shared_ptr<Cache> cache_;
};

/// Drive the scheme from the projected initial condition to time T with
/// steps of tau (the last one shortened to land on T). The callback sees
/// every accepted record, including the initial one at index 0 (with
/// V from the semi-discrete relation). Throws NewtonDivergenceError with
/// the failing step index.
void run_scheme(const std::function<double(double)>& u0, double T, double tau,
                const OperatorSet& ops, const ProblemSpec& spec,
                double newton_tol,
                const std::function<void(const StepRecord&)>& callback);

/// Convenience overload collecting all records.
std::vector<StepRecord> run_scheme(const std::function<double(double)>& u0,
                                   double T, double tau,
                                   const OperatorSet& ops,
                                   const ProblemSpec& spec,
                                   double newton_tol = 1e-12);

} // namespace kdv

#endif
