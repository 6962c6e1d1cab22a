#ifndef KDVDG_LINALG_HPP
#define KDVDG_LINALG_HPP

#include <memory>
#include <span>
#include <vector>

namespace kdv {

/// Row-major dense matrix.
class DenseMatrix {
public:
  DenseMatrix() = default;
  DenseMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols, 0.0) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double& operator()(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return a_[static_cast<size_t>(i) * cols_ + j]; }
  std::vector<double>& data() { return a_; }
  const std::vector<double>& data() const { return a_; }

private:
  int rows_ = 0, cols_ = 0;
  std::vector<double> a_;
};

std::vector<double> matvec(const DenseMatrix& m, std::span<const double> x);

/// LU factorization with partial pivoting, kept in-place.
class DenseLu {
public:
  explicit DenseLu(DenseMatrix a);
  void solve_in_place(std::span<double> b) const;
  std::vector<double> solve(std::vector<double> b) const {
    solve_in_place(b);
    return b;
  }
  bool singular() const { return singular_; }

private:
  DenseMatrix lu_;
  std::vector<int> piv_;
  bool singular_ = false;
};

/// Banded matrix, LAPACK-style storage with room for fill-in:
/// entry (i,j) with -kl <= j-i <= ku lives at band(ku + kl + i - j, j)
/// inside a (2kl+ku+1) x n array.
class BandedLu {
public:
  /// Factor from triplets of in-band entries (duplicates are summed).
  BandedLu(int n, int kl, int ku);
  void add(int i, int j, double v);
  bool factor(); // returns false on zero pivot
  void solve(std::span<double> b) const;

  int n() const { return n_; }
  int kl() const { return kl_; }
  int ku() const { return ku_; }

private:
  double& at(int i, int j) { return ab_[static_cast<size_t>(kl_ + ku_ + i - j) * n_ + j]; }
  double at(int i, int j) const { return ab_[static_cast<size_t>(kl_ + ku_ + i - j) * n_ + j]; }

  int n_, kl_, ku_;
  std::vector<double> ab_;
  std::vector<int> piv_;
  bool factored_ = false;
};

/// Direct solver for "banded plus periodic corners" systems: a band of
/// half-widths (kl, ku) plus entries confined to the top-right and
/// bottom-left corner blocks of width `corner`. The band part is factored
/// with a banded LU and the corner coupling is folded back in with a
/// Woodbury correction; falls back to dense LU when the split degenerates.
class PeriodicBandedSolver {
public:
  PeriodicBandedSolver(int n, int kl, int ku, int corner);

  void add(int i, int j, double v); // any (i,j); classified internally
  void factor();
  std::vector<double> solve(std::vector<double> b) const;

private:
  bool in_band(int i, int j) const { return j - i <= ku_ && i - j <= kl_; }

  int n_, kl_, ku_, corner_;
  bool dense_mode_ = false;
  DenseMatrix dense_;
  struct Entry { int i, j; double v; };
  std::vector<Entry> band_entries_, corner_entries_;

  // factored data
  std::unique_ptr<BandedLu> band_;
  std::unique_ptr<DenseLu> dense_lu_;
  std::vector<int> wrap_cols_;          // columns with corner entries
  DenseMatrix w_;                       // B^{-1} U, n x r
  std::unique_ptr<DenseLu> capacitance_; // I + V^T B^{-1} U, r x r
};

/// Cholesky factorization of a symmetric positive definite matrix.
/// Returns false if a nonpositive pivot is hit.
bool cholesky_factor(DenseMatrix& a);
void cholesky_solve(const DenseMatrix& l, std::span<double> b);

/// Eigenvalues of a symmetric matrix by the cyclic Jacobi method.
std::vector<double> symmetric_eigenvalues(DenseMatrix a, int max_sweeps = 64);

} // namespace kdv

#endif
