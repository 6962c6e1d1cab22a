#include "kdvdg/operators.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "kdvdg/legendre.hpp"

namespace kdv {

BlockTriPeriodic::BlockTriPeriodic(int num_cells, int block_size)
    : n_(num_cells), b_(block_size),
      blocks_(static_cast<size_t>(num_cells) * 3 * block_size * block_size, 0.0) {}

double& BlockTriPeriodic::at(int j, int offset, int row, int col) {
  return blocks_[((static_cast<size_t>(j) * 3 + (offset + 1)) * b_ + row) * b_ + col];
}

double BlockTriPeriodic::at(int j, int offset, int row, int col) const {
  return blocks_[((static_cast<size_t>(j) * 3 + (offset + 1)) * b_ + row) * b_ + col];
}

void BlockTriPeriodic::matvec(std::span<const double> x, std::span<double> y) const {
  for (int j = 0; j < n_; ++j) {
    for (int r = 0; r < b_; ++r) y[j * b_ + r] = 0.0;
    for (int o = -1; o <= 1; ++o) {
      const int jc = (j + o + n_) % n_;
      const double* xb = x.data() + jc * b_;
      for (int r = 0; r < b_; ++r) {
        double acc = 0.0;
        for (int c = 0; c < b_; ++c) acc += at(j, o, r, c) * xb[c];
        y[j * b_ + r] += acc;
      }
    }
  }
}

std::vector<double> BlockTriPeriodic::matvec(std::span<const double> x) const {
  std::vector<double> y(dim());
  matvec(x, y);
  return y;
}

double BlockTriPeriodic::bilinear(std::span<const double> w,
                                  std::span<const double> psi) const {
  const auto aw = matvec(w);
  double acc = 0.0;
  for (int i = 0; i < dim(); ++i) acc += psi[i] * aw[i];
  return acc;
}

OperatorSet::OperatorSet(DgSpace space, double sigma)
    : space_(std::move(space)), sigma_(sigma) {
  if (!(sigma > 0.0))
    throw std::invalid_argument("OperatorSet: penalty sigma must be positive");
  const int q = space_.degree;
  const int B = q + 1;
  const int N = space_.num_cells();
  const Mesh& mesh = *space_.mesh;

  rule_ = gauss_rule_for_degree(4 * q);
  basis_.resize(static_cast<size_t>(rule_.size()) * B);
  for (int p = 0; p < rule_.size(); ++p)
    legendre_eval_all(q, rule_.points[p],
                      {basis_.data() + p * B, static_cast<size_t>(B)});

  mass_.resize(space_.dim());
  for (int j = 0; j < N; ++j)
    for (int k = 0; k <= q; ++k)
      mass_[j * B + k] = mesh.cell_sizes[j] / (2 * k + 1);

  grad_ = BlockTriPeriodic(N, B);
  ip_ = BlockTriPeriodic(N, B);

  // reference volume integrals (independent of h):
  //   v0[i][k] = int l_k' l_i ds = 2 if k > i and k - i odd, else 0
  //   v1[i][k] = int l_k' l_i' ds, via an exact rule
  std::vector<double> v1(static_cast<size_t>(B) * B, 0.0);
  {
    const auto r = gauss_legendre(q + 1); // exact to degree 2q+1
    std::vector<double> d(static_cast<size_t>(r.size()) * B);
    for (int p = 0; p < r.size(); ++p)
      legendre_deriv_all(q, r.points[p],
                         {d.data() + p * B, static_cast<size_t>(B)});
    for (int i = 0; i < B; ++i)
      for (int k = 0; k < B; ++k) {
        double acc = 0.0;
        for (int p = 0; p < r.size(); ++p)
          acc += r.weights[p] * d[p * B + i] * d[p * B + k];
        v1[i * B + k] = acc;
      }
  }

  // volume terms
  for (int j = 0; j < N; ++j) {
    const double h = mesh.cell_sizes[j];
    for (int i = 0; i < B; ++i)
      for (int k = 0; k < B; ++k) {
        // int_{I_j} l_{j,k}' l_{j,i} dx = int l_k' l_i ds
        if (k > i && (k - i) % 2 == 1) grad_.at(j, 0, i, k) += 2.0;
        // int_{I_j} l_{j,k}' l_{j,i}' dx = (2/h) int l_k' l_i' ds
        ip_.at(j, 0, i, k) += (2.0 / h) * v1[i * B + k];
      }
  }

  // face terms; face f couples left cell a = f-1 (mod N) and right cell b = f
  for (int f = 0; f < N; ++f) {
    const int a = mesh.left_cell_of_face(f);
    const int b = mesh.right_cell_of_face(f);
    const double ha = mesh.cell_sizes[a];
    const double hb = mesh.cell_sizes[b];
    const double havg = mesh.avg_h(f);

    // jump[w] = w(x_f^-) - w(x_f^+); avg{w} = (w(x_f^-)+w(x_f^+))/2
    // left trace uses l_k(1) = 1, l_k'(1) = k(k+1)/2, map factor 2/ha
    // right trace uses l_k(-1) = (-1)^k, l_k'(-1) = (-1)^{k+1} k(k+1)/2
    for (int i = 0; i < B; ++i) {
      const double sign_i = (i % 2 == 0) ? 1.0 : -1.0;
      const double jump_i_a = 1.0;
      const double jump_i_b = -sign_i;
      const double avg_i_a = 0.5;
      const double avg_i_b = 0.5 * sign_i;
      const double di = legendre_deriv_at_one(i);
      const double avgdx_i_a = 0.5 * di * (2.0 / ha);
      const double avgdx_i_b = 0.5 * (-sign_i) * di * (2.0 / hb);
      for (int k = 0; k < B; ++k) {
        const double sign_k = (k % 2 == 0) ? 1.0 : -1.0;
        const double jump_k_a = 1.0;
        const double jump_k_b = -sign_k;
        const double dk = legendre_deriv_at_one(k);
        const double avgdx_k_a = 0.5 * dk * (2.0 / ha);
        const double avgdx_k_b = 0.5 * (-sign_k) * dk * (2.0 / hb);

        // gradient: -[w]_f {psi}_f, test row in cell of i, trial col cell of k
        auto add_grad = [&](int cr, double ai, int cc, double jk) {
          const int off = ((cc - cr) % N + N) % N;
          const int o = (off == 1) ? 1 : (off == N - 1 ? -1 : 0);
          grad_.at(cr, o, i, k) += -jk * ai;
        };
        add_grad(a, avg_i_a, a, jump_k_a);
        add_grad(a, avg_i_a, b, jump_k_b);
        add_grad(b, avg_i_b, a, jump_k_a);
        add_grad(b, avg_i_b, b, jump_k_b);

        // interior penalty: -[w]{psi_x} - [psi]{w_x} + sigma/avg{h} [w][psi]
        auto add_ip = [&](int cr, double wr, int cc, double wc) {
          const int off = ((cc - cr) % N + N) % N;
          const int o = (off == 1) ? 1 : (off == N - 1 ? -1 : 0);
          ip_.at(cr, o, i, k) += wr * wc;
        };
        // -[w]{psi_x}
        add_ip(a, -avgdx_i_a, a, jump_k_a);
        add_ip(a, -avgdx_i_a, b, jump_k_b);
        add_ip(b, -avgdx_i_b, a, jump_k_a);
        add_ip(b, -avgdx_i_b, b, jump_k_b);
        // -[psi]{w_x}
        add_ip(a, -jump_i_a, a, avgdx_k_a);
        add_ip(a, -jump_i_a, b, avgdx_k_b);
        add_ip(b, -jump_i_b, a, avgdx_k_a);
        add_ip(b, -jump_i_b, b, avgdx_k_b);
        // sigma avg{h}^{-1} [w][psi]
        const double pen = sigma_ / havg;
        add_ip(a, pen * jump_i_a, a, jump_k_a);
        add_ip(a, pen * jump_i_a, b, jump_k_b);
        add_ip(b, pen * jump_i_b, a, jump_k_a);
        add_ip(b, pen * jump_i_b, b, jump_k_b);
      }
    }
  }
}

void OperatorSet::check_same_space(const DgFunction& w) const {
  if (!(w.space() == space_))
    throw std::invalid_argument("OperatorSet: function on a different space");
}

DgFunction OperatorSet::apply_gradient(const DgFunction& w) const {
  check_same_space(w);
  DgFunction out(space_);
  grad_.matvec(w.data(), out.data());
  for (int i = 0; i < space_.dim(); ++i) out.data()[i] /= mass_[i];
  return out;
}

double OperatorSet::apply_ip(const DgFunction& w, const DgFunction& psi) const {
  check_same_space(w);
  check_same_space(psi);
  return ip_.bilinear(w.data(), psi.data());
}

DgFunction OperatorSet::discrete_laplacian(const DgFunction& w) const {
  check_same_space(w);
  DgFunction out(space_);
  ip_.matvec(w.data(), out.data());
  for (int i = 0; i < space_.dim(); ++i) out.data()[i] = -out.data()[i] / mass_[i];
  return out;
}

void OperatorSet::cell_values(const DgFunction& w, int cell,
                              std::span<double> out) const {
  const int B = space_.degree + 1;
  const auto c = w.cell_coeffs(cell);
  for (int p = 0; p < rule_.size(); ++p) {
    double acc = 0.0;
    const double* l = basis_.data() + p * B;
    for (int k = 0; k < B; ++k) acc += c[k] * l[k];
    out[p] = acc;
  }
}

std::vector<double> OperatorSet::weak_pointwise(
    const DgFunction& w, const DgFunction& v,
    double (*f)(double, double, const void*), const void* ctx) const {
  check_same_space(w);
  check_same_space(v);
  const int B = space_.degree + 1;
  const int np = rule_.size();
  std::vector<double> out(space_.dim(), 0.0);
  std::vector<double> wv(np), vv(np);
  for (int j = 0; j < space_.num_cells(); ++j) {
    cell_values(w, j, wv);
    cell_values(v, j, vv);
    const double half_h = 0.5 * space_.mesh->cell_sizes[j];
    for (int p = 0; p < np; ++p) {
      const double g = rule_.weights[p] * f(wv[p], vv[p], ctx) * half_h;
      const double* l = basis_.data() + p * B;
      for (int k = 0; k < B; ++k) out[j * B + k] += g * l[k];
    }
  }
  return out;
}

void OperatorSet::dump_triplets(std::ostream& os) const {
  os << "# matrix i j value\n";
  grad_.scatter(1.0, [&os](int i, int j, double v) {
    os << "G " << i << " " << j << " " << v << "\n";
  });
  ip_.scatter(1.0, [&os](int i, int j, double v) {
    os << "A " << i << " " << j << " " << v << "\n";
  });
  for (size_t i = 0; i < mass_.size(); ++i)
    os << "M " << i << " " << i << " " << mass_[i] << "\n";
}

OperatorSet assemble(DgSpace space, double sigma) {
  return OperatorSet(std::move(space), sigma);
}

DenseMatrix assemble_norm_gram(const DgSpace& space, bool with_second_derivative) {
  const int n = space.dim();
  const int B = space.block_size();
  const int N = space.num_cells();
  const Mesh& mesh = *space.mesh;
  DenseMatrix gram(n, n);

  // volume: derivatives (and h-weighted second derivatives) per cell
  for (int j = 0; j < N; ++j) {
    const double h = mesh.cell_sizes[j];
    std::vector<DgFunction> d1(B, DgFunction(space)), d2(B, DgFunction(space));
    for (int k = 0; k < B; ++k) {
      DgFunction e(space);
      e.coeff(j, k) = 1.0;
      d1[k] = e.derivative();
      d2[k] = d1[k].derivative();
    }
    for (int a = 0; a < B; ++a)
      for (int b = 0; b < B; ++b) {
        double acc = 0.0;
        for (int k = 0; k < B; ++k)
          acc += d1[a].coeff(j, k) * d1[b].coeff(j, k) * h / (2 * k + 1);
        if (with_second_derivative)
          for (int k = 0; k < B; ++k)
            acc += h * h * d2[a].coeff(j, k) * d2[b].coeff(j, k) * h / (2 * k + 1);
        gram(j * B + a, j * B + b) += acc;
      }
  }

  // jumps
  for (int f = 0; f < N; ++f) {
    const int a = mesh.left_cell_of_face(f);
    const int b = mesh.right_cell_of_face(f);
    const double w = 1.0 / mesh.avg_h(f);
    auto jump_coef = [&](int cell, int k) {
      if (cell == a) return 1.0;
      return -((k % 2 == 0) ? 1.0 : -1.0);
    };
    for (int ca : {a, b})
      for (int cb : {a, b})
        for (int i = 0; i < B; ++i)
          for (int k = 0; k < B; ++k)
            gram(ca * B + i, cb * B + k) += w * jump_coef(ca, i) * jump_coef(cb, k);
  }
  return gram;
}

double estimate_coercivity(const OperatorSet& ops) {
  const DgSpace& space = ops.space();
  const int n = space.dim();
  if (n > 400)
    throw std::invalid_argument("estimate_coercivity: space too large for dense scan");

  DenseMatrix a(n, n);
  ops.ip_matrix().scatter(1.0, [&a](int i, int j, double v) { a(i, j) += v; });
  DenseMatrix d = assemble_norm_gram(space, /*with_second_derivative=*/true);

  // deflate the constant direction with a Householder reflection
  std::vector<double> u(n, 0.0);
  {
    const int B = space.block_size();
    double nrm = 0.0;
    for (int j = 0; j < space.num_cells(); ++j) u[j * B] = 1.0;
    for (double v : u) nrm += v * v;
    nrm = std::sqrt(nrm);
    u[0] -= nrm; // reflect constants onto e_0
    double un = 0.0;
    for (double v : u) un += v * v;
    un = std::sqrt(un);
    for (double& v : u) v /= un;
  }
  auto reflect = [&](DenseMatrix& m) {
    // m <- H m H with H = I - 2 u u^T
    const int nn = m.rows();
    std::vector<double> tmp(nn);
    for (int c = 0; c < nn; ++c) {
      double dot = 0.0;
      for (int r = 0; r < nn; ++r) dot += u[r] * m(r, c);
      for (int r = 0; r < nn; ++r) m(r, c) -= 2.0 * u[r] * dot;
    }
    for (int r = 0; r < nn; ++r) {
      double dot = 0.0;
      for (int c = 0; c < nn; ++c) dot += m(r, c) * u[c];
      for (int c = 0; c < nn; ++c) m(r, c) -= 2.0 * dot * u[c];
    }
  };
  reflect(a);
  reflect(d);

  // drop row/col 0 (the constant image), Cholesky-reduce, Jacobi eigenvalues
  const int m = n - 1;
  DenseMatrix at(m, m), dt(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      at(i, j) = a(i + 1, j + 1);
      dt(i, j) = d(i + 1, j + 1);
    }
  if (!cholesky_factor(dt))
    throw std::runtime_error("estimate_coercivity: norm Gram not SPD");
  // S = L^{-1} At L^{-T}
  DenseMatrix s(m, m);
  std::vector<double> col(m);
  for (int c = 0; c < m; ++c) {
    for (int i = 0; i < m; ++i) col[i] = at(i, c);
    // forward substitute L y = col
    for (int i = 0; i < m; ++i) {
      double v = col[i];
      for (int j = 0; j < i; ++j) v -= dt(i, j) * col[j];
      col[i] = v / dt(i, i);
    }
    for (int i = 0; i < m; ++i) s(i, c) = col[i];
  }
  for (int r = 0; r < m; ++r) {
    for (int i = 0; i < m; ++i) col[i] = s(r, i);
    for (int i = 0; i < m; ++i) {
      double v = col[i];
      for (int j = 0; j < i; ++j) v -= dt(i, j) * col[j];
      col[i] = v / dt(i, i);
    }
    for (int i = 0; i < m; ++i) s(r, i) = col[i];
  }
  // symmetrize against round-off before the eigen solve
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      const double v = 0.5 * (s(i, j) + s(j, i));
      s(i, j) = s(j, i) = v;
    }
  const auto eig = symmetric_eigenvalues(std::move(s));
  return eig.front();
}

} // namespace kdv
