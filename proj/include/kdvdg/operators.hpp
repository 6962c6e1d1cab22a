#ifndef KDVDG_OPERATORS_HPP
#define KDVDG_OPERATORS_HPP

#include <iosfwd>
#include <span>
#include <vector>

#include "kdvdg/dg_function.hpp"
#include "kdvdg/linalg.hpp"
#include "kdvdg/quadrature.hpp"

namespace kdv {

/// Block tridiagonal matrix with periodic wrap: block row j couples cell
/// blocks j-1, j, j+1 (mod N). Blocks are B x B row-major.
class BlockTriPeriodic {
public:
  BlockTriPeriodic() = default;
  BlockTriPeriodic(int num_cells, int block_size);

  int num_cells() const { return n_; }
  int block_size() const { return b_; }
  int dim() const { return n_ * b_; }

  /// offset in {-1, 0, +1}: coupling of row block j to column block j+offset
  double& at(int j, int offset, int row, int col);
  double at(int j, int offset, int row, int col) const;

  void matvec(std::span<const double> x, std::span<double> y) const;
  std::vector<double> matvec(std::span<const double> x) const;

  /// psi^T (A w)
  double bilinear(std::span<const double> w, std::span<const double> psi) const;

  /// Scatter val*this into a sink taking (i, j, value) in scalar indices.
  template <class Sink>
  void scatter(double val, Sink&& sink) const {
    for (int j = 0; j < n_; ++j)
      for (int o = -1; o <= 1; ++o) {
        const int jc = (j + o + n_) % n_;
        for (int r = 0; r < b_; ++r)
          for (int c = 0; c < b_; ++c) {
            const double v = at(j, o, r, c);
            if (v != 0.0) sink(j * b_ + r, jc * b_ + c, val * v);
          }
      }
  }

private:
  int n_ = 0, b_ = 0;
  std::vector<double> blocks_; // [j][offset+1][r][c]
};

/// Assembled operators for a fixed (mesh, degree, sigma): diagonal mass,
/// the discrete gradient form and the interior penalty form, together with
/// the scheme quadrature (exactness 4q) and basis tables at its points.
class OperatorSet {
public:
  OperatorSet(DgSpace space, double sigma);

  const DgSpace& space() const { return space_; }
  double sigma() const { return sigma_; }

  /// Diagonal entries of the mass matrix, h_j/(2k+1).
  const std::vector<double>& mass() const { return mass_; }
  const BlockTriPeriodic& gradient_matrix() const { return grad_; }
  const BlockTriPeriodic& ip_matrix() const { return ip_; }

  /// G_h(W): solves M out = G W.
  DgFunction apply_gradient(const DgFunction& w) const;
  /// a_h(w, psi).
  double apply_ip(const DgFunction& w, const DgFunction& psi) const;
  /// A_h(W): solves M out = -A W.
  DgFunction discrete_laplacian(const DgFunction& w) const;

  /// Scheme quadrature (exactness >= 4q) and cached basis values/points.
  const QuadratureRule& scheme_rule() const { return rule_; }
  /// basis value l_k(s_p); table laid out as [p][k].
  double basis_at(int p, int k) const { return basis_[p * (space_.degree + 1) + k]; }

  /// Values of w at the scheme rule's points of one cell.
  void cell_values(const DgFunction& w, int cell, std::span<double> out) const;

  /// L2 projection of a pointwise function of one or two DgFunctions,
  /// integrated with the scheme rule (exact for polynomial integrands of
  /// degree <= 4q). Returns the integrals against the basis (not yet
  /// mass-solved): out_i = int f(w(x), v(x)) phi_i.
  std::vector<double> weak_pointwise(const DgFunction& w, const DgFunction& v,
                                     double (*f)(double, double, const void*),
                                     const void* ctx) const;

  void check_same_space(const DgFunction& w) const;

  /// Triplet dump of G and A for debugging.
  void dump_triplets(std::ostream& os) const;

private:
  DgSpace space_;
  double sigma_;
  std::vector<double> mass_;
  BlockTriPeriodic grad_, ip_;
  QuadratureRule rule_;
  std::vector<double> basis_;
};

OperatorSet assemble(DgSpace space, double sigma);

/// Gram matrix of the enorm (with_second_derivative = false) or denorm
/// inner product, dense; intended for diagnostics on small spaces.
DenseMatrix assemble_norm_gram(const DgSpace& space, bool with_second_derivative);

/// Smallest generalized eigenvalue of a_h(W,W) / denorm(W)^2 with the
/// constant kernel deflated. Reporting only; sigma is never calibrated
/// from it.
double estimate_coercivity(const OperatorSet& ops);

} // namespace kdv

#endif
