#ifndef KDVDG_LEGENDRE_HPP
#define KDVDG_LEGENDRE_HPP

#include <span>
#include <vector>

namespace kdv {

/// Value of the k-th Legendre polynomial on [-1,1]. l_k(1) = 1,
/// l_k(-1) = (-1)^k, and the three-term recurrence is used throughout.
double legendre_eval(int k, double s);

/// Derivative l_k'(s), by the recurrence l'_{k+1} = (2k+1) l_k + l'_{k-1}.
double legendre_deriv(int k, double s);

/// Values l_0(s) .. l_q(s) in one sweep; out must have size q+1.
void legendre_eval_all(int q, double s, std::span<double> out);

/// Derivatives l_0'(s) .. l_q'(s); out must have size q+1.
void legendre_deriv_all(int q, double s, std::span<double> out);

/// Endpoint derivative l_k'(+1) = k(k+1)/2; l_k'(-1) = (-1)^{k+1} k(k+1)/2.
double legendre_deriv_at_one(int k);

/// Squared L2 norm on the reference interval: 2/(2k+1).
inline double legendre_norm_sq(int k) { return 2.0 / (2 * k + 1); }

} // namespace kdv

#endif
