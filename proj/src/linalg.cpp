#include "kdvdg/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace kdv {

std::vector<double> matvec(const DenseMatrix& m, std::span<const double> x) {
  std::vector<double> y(m.rows(), 0.0);
  for (int i = 0; i < m.rows(); ++i) {
    double acc = 0.0;
    for (int j = 0; j < m.cols(); ++j) acc += m(i, j) * x[j];
    y[i] = acc;
  }
  return y;
}

DenseLu::DenseLu(DenseMatrix a) : lu_(std::move(a)), piv_(lu_.rows()) {
  const int n = lu_.rows();
  if (lu_.cols() != n) throw std::invalid_argument("DenseLu: matrix not square");
  for (int i = 0; i < n; ++i) piv_[i] = i;
  for (int k = 0; k < n; ++k) {
    int p = k;
    double best = std::abs(lu_(k, k));
    for (int i = k + 1; i < n; ++i) {
      const double v = std::abs(lu_(i, k));
      if (v > best) {
        best = v;
        p = i;
      }
    }
    if (best == 0.0) {
      singular_ = true;
      return;
    }
    if (p != k) {
      for (int j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(p, j));
      std::swap(piv_[k], piv_[p]);
    }
    const double inv = 1.0 / lu_(k, k);
    for (int i = k + 1; i < n; ++i) {
      const double m = lu_(i, k) * inv;
      lu_(i, k) = m;
      if (m != 0.0)
        for (int j = k + 1; j < n; ++j) lu_(i, j) -= m * lu_(k, j);
    }
  }
}

void DenseLu::solve_in_place(std::span<double> b) const {
  if (singular_) throw std::runtime_error("DenseLu: singular matrix");
  const int n = lu_.rows();
  std::vector<double> y(n);
  for (int i = 0; i < n; ++i) y[i] = b[piv_[i]];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) y[i] -= lu_(i, j) * y[j];
  for (int i = n - 1; i >= 0; --i) {
    for (int j = i + 1; j < n; ++j) y[i] -= lu_(i, j) * y[j];
    y[i] /= lu_(i, i);
  }
  for (int i = 0; i < n; ++i) b[i] = y[i];
}

BandedLu::BandedLu(int n, int kl, int ku)
    : n_(n), kl_(kl), ku_(ku),
      ab_(static_cast<size_t>(2 * kl + ku + 1) * n, 0.0), piv_(n) {}

void BandedLu::add(int i, int j, double v) {
  if (j - i > ku_ || i - j > kl_)
    throw std::invalid_argument("BandedLu::add: entry outside band");
  at(i, j) += v;
}

bool BandedLu::factor() {
  // banded LU with partial pivoting; fill-in stays within kl extra
  // superdiagonals, which the storage already reserves
  const int band_ku = kl_ + ku_;
  for (int k = 0; k < n_; ++k) {
    const int last = std::min(n_ - 1, k + kl_);
    int p = k;
    double best = std::abs(at(k, k));
    for (int i = k + 1; i <= last; ++i) {
      const double v = std::abs(at(i, k));
      if (v > best) {
        best = v;
        p = i;
      }
    }
    piv_[k] = p;
    if (best == 0.0) return false;
    const int jmax = std::min(n_ - 1, k + band_ku);
    if (p != k)
      for (int j = k; j <= jmax; ++j) std::swap(at(k, j), at(p, j));
    const double inv = 1.0 / at(k, k);
    for (int i = k + 1; i <= last; ++i) {
      const double m = at(i, k) * inv;
      at(i, k) = m;
      if (m != 0.0)
        for (int j = k + 1; j <= jmax; ++j) at(i, j) -= m * at(k, j);
    }
  }
  factored_ = true;
  return true;
}

void BandedLu::solve(std::span<double> b) const {
  if (!factored_) throw std::runtime_error("BandedLu: not factored");
  const int band_ku = kl_ + ku_;
  for (int k = 0; k < n_; ++k) {
    if (piv_[k] != k) std::swap(b[k], b[piv_[k]]);
    const int last = std::min(n_ - 1, k + kl_);
    for (int i = k + 1; i <= last; ++i) b[i] -= at(i, k) * b[k];
  }
  for (int i = n_ - 1; i >= 0; --i) {
    const int jmax = std::min(n_ - 1, i + band_ku);
    double acc = b[i];
    for (int j = i + 1; j <= jmax; ++j) acc -= at(i, j) * b[j];
    b[i] = acc / at(i, i);
  }
}

PeriodicBandedSolver::PeriodicBandedSolver(int n, int kl, int ku, int corner)
    : n_(n), kl_(kl), ku_(ku), corner_(corner) {
  // corners must not overlap the band for the low-rank split to be valid
  dense_mode_ = (n <= corner + std::max(kl, ku) + corner) || n <= 8;
  if (dense_mode_) dense_ = DenseMatrix(n, n);
}

void PeriodicBandedSolver::add(int i, int j, double v) {
  if (dense_mode_) {
    dense_(i, j) += v;
    return;
  }
  if (in_band(i, j))
    band_entries_.push_back({i, j, v});
  else
    corner_entries_.push_back({i, j, v});
}

void PeriodicBandedSolver::factor() {
  if (dense_mode_) {
    dense_lu_ = std::make_unique<DenseLu>(dense_);
    if (dense_lu_->singular())
      throw std::runtime_error("PeriodicBandedSolver: singular matrix");
    return;
  }

  auto band = std::make_unique<BandedLu>(n_, kl_, ku_);
  for (const auto& e : band_entries_) band->add(e.i, e.j, e.v);

  // K = A - B has entries only in the wrap corners; write K = U V^T with
  // V the selector of the wrap columns
  wrap_cols_.clear();
  for (const auto& e : corner_entries_) {
    bool seen = false;
    for (int c : wrap_cols_) seen |= (c == e.j);
    if (!seen) wrap_cols_.push_back(e.j);
  }
  std::sort(wrap_cols_.begin(), wrap_cols_.end());
  const int r = static_cast<int>(wrap_cols_.size());

  if (!band->factor()) {
    // fall back to a dense factorization of the whole matrix
    dense_mode_ = true;
    dense_ = DenseMatrix(n_, n_);
    for (const auto& e : band_entries_) dense_(e.i, e.j) += e.v;
    for (const auto& e : corner_entries_) dense_(e.i, e.j) += e.v;
    dense_lu_ = std::make_unique<DenseLu>(dense_);
    if (dense_lu_->singular())
      throw std::runtime_error("PeriodicBandedSolver: singular matrix");
    return;
  }
  band_ = std::move(band);

  // columns of U, then W = B^{-1} U and the capacitance I + V^T W
  w_ = DenseMatrix(n_, r);
  std::vector<double> col(n_);
  for (int p = 0; p < r; ++p) {
    std::fill(col.begin(), col.end(), 0.0);
    for (const auto& e : corner_entries_)
      if (e.j == wrap_cols_[p]) col[e.i] += e.v;
    band_->solve(col);
    for (int i = 0; i < n_; ++i) w_(i, p) = col[i];
  }
  DenseMatrix cap(r, r);
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b)
      cap(a, b) = (a == b ? 1.0 : 0.0) + w_(wrap_cols_[a], b);
  capacitance_ = std::make_unique<DenseLu>(std::move(cap));
  if (capacitance_->singular())
    throw std::runtime_error("PeriodicBandedSolver: singular capacitance");
}

std::vector<double> PeriodicBandedSolver::solve(std::vector<double> b) const {
  if (dense_mode_) {
    dense_lu_->solve_in_place(b);
    return b;
  }
  band_->solve(b);
  const int r = static_cast<int>(wrap_cols_.size());
  if (r == 0) return b;
  std::vector<double> t(r);
  for (int p = 0; p < r; ++p) t[p] = b[wrap_cols_[p]];
  capacitance_->solve_in_place(t);
  for (int i = 0; i < n_; ++i) {
    double acc = 0.0;
    for (int p = 0; p < r; ++p) acc += w_(i, p) * t[p];
    b[i] -= acc;
  }
  return b;
}

bool cholesky_factor(DenseMatrix& a) {
  const int n = a.rows();
  for (int k = 0; k < n; ++k) {
    double d = a(k, k);
    for (int j = 0; j < k; ++j) d -= a(k, j) * a(k, j);
    if (!(d > 0.0)) return false;
    const double lkk = std::sqrt(d);
    a(k, k) = lkk;
    for (int i = k + 1; i < n; ++i) {
      double v = a(i, k);
      for (int j = 0; j < k; ++j) v -= a(i, j) * a(k, j);
      a(i, k) = v / lkk;
    }
  }
  return true;
}

void cholesky_solve(const DenseMatrix& l, std::span<double> b) {
  const int n = l.rows();
  for (int i = 0; i < n; ++i) {
    double v = b[i];
    for (int j = 0; j < i; ++j) v -= l(i, j) * b[j];
    b[i] = v / l(i, i);
  }
  for (int i = n - 1; i >= 0; --i) {
    double v = b[i];
    for (int j = i + 1; j < n; ++j) v -= l(j, i) * b[j];
    b[i] = v / l(i, i);
  }
}

std::vector<double> symmetric_eigenvalues(DenseMatrix a, int max_sweeps) {
  const int n = a.rows();
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    if (off < 1e-30) break;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> eig(n);
  for (int i = 0; i < n; ++i) eig[i] = a(i, i);
  std::sort(eig.begin(), eig.end());
  return eig;
}

} // namespace kdv
