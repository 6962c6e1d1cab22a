#ifndef KDVDG_ELLIPTIC_HPP
#define KDVDG_ELLIPTIC_HPP

namespace kdv {

/// Second-argument convention for the elliptic functions: Modulus passes k
/// directly, Parameter passes m = k^2. A recurring source of benchmark
/// mismatches, so it is always explicit here.
enum class EllipticConvention { modulus, parameter };

/// Arithmetic-geometric mean; quadratically convergent.
double agm(double a, double b);

/// Complete elliptic integral K = pi / (2 AGM(1, sqrt(1-k^2))).
/// Requires modulus_param in [0,1).
double complete_K(double modulus_param, EllipticConvention convention);

struct JacobiValues {
  double sn;
  double cn;
  double dn;
};

/// sn, cn, dn by the descending Landen transformation: the AGM chain
/// forward, then the amplitude recurrence backwards. Arguments larger than
/// a couple of quarter-periods are reduced modulo 4K first.
JacobiValues jacobi_elliptic(double x, double modulus_param,
                             EllipticConvention convention);

double jacobi_sn(double x, double modulus_param, EllipticConvention convention);

/// Real period of sn, 4K.
double sn_period(double modulus_param, EllipticConvention convention);

} // namespace kdv

#endif
