#ifndef KDVDG_PROJECTIONS_HPP
#define KDVDG_PROJECTIONS_HPP

#include <functional>
#include <memory>

#include "kdvdg/dg_function.hpp"
#include "kdvdg/linalg.hpp"
#include "kdvdg/operators.hpp"

namespace kdv {

/// One-sided projector: per cell the q lowest Legendre coefficients match
/// the L2 projection and the top one interpolates v at the left endpoint,
/// T(v)(x_j^+) = v(x_j). Locally constructed, no parity restriction.
DgFunction project_T(const std::function<double(double)>& v,
                     const DgSpace& space);
DgFunction project_T(const std::function<double(double)>& v,
                     const DgSpace& space, const QuadratureRule& rule);

/// The circulant-like face system with (-1)^q on the diagonal and 1 on the
/// subdiagonal (wrap in the top-right corner). Invertible exactly when N is
/// odd and q is even.
class AlternatingSystem {
public:
  AlternatingSystem(int num_cells, int degree);

  /// O(N) solve; throws ParityError when the system is singular.
  std::vector<double> solve(std::vector<double> rhs) const;

  /// Apply the closed-form inverse alpha_i = 1/2 sum_j (-1)^{(i-j) mod N} r_j
  /// (q even, N odd). Used to cross-check the direct solve.
  std::vector<double> apply_explicit_inverse(const std::vector<double>& rhs) const;

  /// Materialized matrix, for tests.
  DenseMatrix dense() const;

  bool invertible() const { return num_cells_ % 2 == 1 && degree_ % 2 == 0; }

private:
  int num_cells_;
  int degree_;
};

/// Average-matching projector: S(v) agrees with the L2 projection against
/// degree q-1 test functions and {S(v)}_j = v(x_j) at every node. Requires
/// a uniform mesh, q even and N odd; otherwise the face system is singular
/// and ParityError is thrown.
DgFunction project_S(const std::function<double(double)>& v,
                     const DgSpace& space);
DgFunction project_S(const std::function<double(double)>& v,
                     const DgSpace& space, const QuadratureRule& rule);

/// Continuous reconstruction of degree q+1: D(W) - W has only modes q and
/// q+1, with
///   alpha_{j,q}   = 1/4 ((-1)^q     [W]_j - [W]_{j+1})
///   alpha_{j,q+1} = 1/4 ((-1)^{q+1} [W]_j - [W]_{j+1}),
/// which makes D(W) continuous with D(W)(x_j^+) = {W}_j and
/// int D(W)_x Phi = int G_h(W) Phi for all Phi of degree q.
DgFunction reconstruct_D(const DgFunction& w);

/// Splitting W = W^c + W^d with W^c continuous and a_h(W^d, Phi) = 0 for
/// every continuous Phi. The kernel constant is fixed by matching means.
/// The conforming system is factored once per OperatorSet and reused.
class ConformingSplitter {
public:
  explicit ConformingSplitter(const OperatorSet& ops);

  struct Split {
    DgFunction conforming;
    DgFunction nonconforming;
  };
  Split split(const DgFunction& w) const;

private:
  const OperatorSet& ops_;
  int n_conf_;
  // conforming basis columns in coefficient space, stored sparse
  struct BasisEntry {
    int index;
    double value;
  };
  std::vector<std::vector<BasisEntry>> basis_;
  std::vector<double> means_;
  std::unique_ptr<DenseLu> kkt_;
};

} // namespace kdv

#endif
