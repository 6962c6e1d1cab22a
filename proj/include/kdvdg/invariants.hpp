#ifndef KDVDG_INVARIANTS_HPP
#define KDVDG_INVARIANTS_HPP

#include <optional>

#include "kdvdg/dg_function.hpp"
#include "kdvdg/operators.hpp"
#include "kdvdg/problem.hpp"

namespace kdv {

/// mass = int U, momentum = 1/2 int U^2, energy = 1/2 a_h(U,U) + int f(U).
/// For m = 4 the sixth-order functional int 2 U_xx^2 + 10 U^2 U_x^2 + U^6
/// (broken derivatives) is tracked as well.
struct InvariantRecord {
  double t = 0.0;
  double mass = 0.0;
  double momentum = 0.0;
  double energy = 0.0;
  std::optional<double> higher;
};

InvariantRecord compute_invariants(const DgFunction& u, const OperatorSet& ops,
                                   const ProblemSpec& spec, double t);

} // namespace kdv

#endif
