#include "kdvdg/projections.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kdvdg/errors.hpp"
#include "kdvdg/legendre.hpp"

namespace kdv {

namespace {

QuadratureRule analysis_rule(const DgSpace& space) {
  return gauss_rule_for_degree(std::max(4 * space.degree + 4, 22));
}

} // namespace

DgFunction project_T(const std::function<double(double)>& v,
                     const DgSpace& space) {
  return project_T(v, space, analysis_rule(space));
}

DgFunction project_T(const std::function<double(double)>& v,
                     const DgSpace& space, const QuadratureRule& rule) {
  const int q = space.degree;
  if (q < 1) throw std::invalid_argument("project_T: need degree >= 1");
  DgFunction g = l2_project(v, space, rule);
  const Mesh& mesh = *space.mesh;
  for (int j = 0; j < space.num_cells(); ++j) {
    auto c = g.cell_coeffs(j);
    // left endpoint: sum_k c_k (-1)^k = v(x_j) pins the top coefficient
    double acc = 0.0;
    double sign = 1.0;
    for (int k = 0; k < q; ++k, sign = -sign) acc += sign * c[k];
    const double sq = (q % 2 == 0) ? 1.0 : -1.0;
    c[q] = sq * (v(mesh.nodes[j]) - acc);
  }
  return g;
}

AlternatingSystem::AlternatingSystem(int num_cells, int degree)
    : num_cells_(num_cells), degree_(degree) {}

std::vector<double> AlternatingSystem::solve(std::vector<double> rhs) const {
  if (!invertible())
    throw ParityError(
        "alternating face system is singular: needs N odd and q even (N=" +
        std::to_string(num_cells_) + ", q=" + std::to_string(degree_) + ")");
  const int n = num_cells_;
  // rows: alpha_{j-1} + alpha_j = r_j (q even); row 0 wraps to alpha_{N-1}.
  // alpha_{N-1} = 1/2 sum_j (-1)^j r_j, then forward substitution.
  double x = 0.0;
  double sign = 1.0;
  for (int j = 0; j < n; ++j, sign = -sign) x += sign * rhs[j];
  x *= 0.5;
  std::vector<double> alpha(n);
  alpha[n - 1] = x;
  alpha[0] = rhs[0] - x;
  for (int j = 1; j < n - 1; ++j) alpha[j] = rhs[j] - alpha[j - 1];
  return alpha;
}

std::vector<double> AlternatingSystem::apply_explicit_inverse(
    const std::vector<double>& rhs) const {
  if (!invertible())
    throw ParityError("alternating face system has no inverse for this parity");
  const int n = num_cells_;
  std::vector<double> alpha(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
      const int d = ((i - j) % n + n) % n;
      acc += ((d % 2 == 0) ? 1.0 : -1.0) * rhs[j];
    }
    alpha[i] = 0.5 * acc;
  }
  return alpha;
}

DenseMatrix AlternatingSystem::dense() const {
  const int n = num_cells_;
  const double diag = (degree_ % 2 == 0) ? 1.0 : -1.0;
  DenseMatrix m(n, n);
  for (int j = 0; j < n; ++j) {
    m(j, j) = diag;
    m(j, (j + n - 1) % n) += 1.0;
  }
  return m;
}

DgFunction project_S(const std::function<double(double)>& v,
                     const DgSpace& space) {
  return project_S(v, space, analysis_rule(space));
}

DgFunction project_S(const std::function<double(double)>& v,
                     const DgSpace& space, const QuadratureRule& rule) {
  const int q = space.degree;
  const int n = space.num_cells();
  AlternatingSystem system(n, q);
  if (!system.invertible())
    throw ParityError("project_S: needs N odd and q even (N=" +
                      std::to_string(n) + ", q=" + std::to_string(q) + ")");

  DgFunction g = project_T(v, space, rule);
  const Mesh& mesh = *space.mesh;
  // mismatch of the one-sided projector at each node, v(x_j) - T(x_j^-)
  std::vector<double> rhs(n);
  for (int j = 0; j < n; ++j) rhs[j] = v(mesh.nodes[j]) - g.trace_left(j);
  const auto alpha = system.solve(std::move(rhs));
  for (int j = 0; j < n; ++j) g.coeff(j, q) += alpha[j];
  return g;
}

DgFunction reconstruct_D(const DgFunction& w) {
  const DgSpace& in = w.space();
  const int q = in.degree;
  const int n = in.num_cells();
  DgSpace out_space{in.mesh, q + 1};
  DgFunction out(out_space);

  std::vector<double> jumps(n);
  for (int f = 0; f < n; ++f) jumps[f] = w.jump(f);

  const double sq = (q % 2 == 0) ? 1.0 : -1.0;
  for (int j = 0; j < n; ++j) {
    auto c = out.cell_coeffs(j);
    const auto cw = w.cell_coeffs(j);
    for (int k = 0; k <= q; ++k) c[k] = cw[k];
    const double jl = jumps[j];
    const double jr = jumps[(j + 1) % n];
    c[q] += 0.25 * (sq * jl - jr);
    c[q + 1] = 0.25 * (-sq * jl - jr);
  }
  return out;
}

ConformingSplitter::ConformingSplitter(const OperatorSet& ops) : ops_(ops) {
  const DgSpace& space = ops.space();
  const int q = space.degree;
  const int B = q + 1;
  const int n_cells = space.num_cells();
  const Mesh& mesh = *space.mesh;
  n_conf_ = n_cells * q;

  // hat function per node, then integrated-Legendre bubbles per cell
  basis_.resize(n_conf_);
  means_.assign(n_conf_, 0.0);
  for (int i = 0; i < n_cells; ++i) {
    auto& col = basis_[i];
    const int jl = (i + n_cells - 1) % n_cells;
    // rising flank on cell i-1: (s+1)/2; falling flank on cell i: (1-s)/2
    col.push_back({jl * B + 0, 0.5});
    col.push_back({jl * B + 1, 0.5});
    col.push_back({i * B + 0, 0.5});
    col.push_back({i * B + 1, -0.5});
    means_[i] = 0.5 * (mesh.cell_sizes[jl] + mesh.cell_sizes[i]);
  }
  int idx = n_cells;
  for (int j = 0; j < n_cells; ++j)
    for (int k = 2; k <= q; ++k, ++idx) {
      auto& col = basis_[idx];
      col.push_back({j * B + k, 1.0});
      col.push_back({j * B + (k - 2), -1.0});
      if (k == 2) means_[idx] = -mesh.cell_sizes[j];
    }

  // KKT system [S m; m^T 0] with S = P^T A P
  const int m = n_conf_;
  DenseMatrix kkt(m + 1, m + 1);
  std::vector<double> col_vec(space.dim());
  std::vector<double> a_col(space.dim());
  for (int b = 0; b < m; ++b) {
    std::fill(col_vec.begin(), col_vec.end(), 0.0);
    for (const auto& e : basis_[b]) col_vec[e.index] += e.value;
    ops.ip_matrix().matvec(col_vec, a_col);
    for (int a = 0; a < m; ++a) {
      double acc = 0.0;
      for (const auto& e : basis_[a]) acc += e.value * a_col[e.index];
      kkt(a, b) = acc;
    }
    kkt(m, b) = means_[b];
    kkt(b, m) = means_[b];
  }
  kkt(m, m) = 0.0;
  kkt_ = std::make_unique<DenseLu>(std::move(kkt));
  if (kkt_->singular())
    throw std::runtime_error("ConformingSplitter: singular conforming system");
}

ConformingSplitter::Split ConformingSplitter::split(const DgFunction& w) const {
  ops_.check_same_space(w);
  const int m = n_conf_;
  std::vector<double> rhs(m + 1, 0.0);
  const auto aw = ops_.ip_matrix().matvec(w.data());
  for (int a = 0; a < m; ++a) {
    double acc = 0.0;
    for (const auto& e : basis_[a]) acc += e.value * aw[e.index];
    rhs[a] = acc;
  }
  rhs[m] = w.integral();
  kkt_->solve_in_place(rhs);

  DgFunction wc(ops_.space());
  for (int b = 0; b < m; ++b)
    for (const auto& e : basis_[b]) wc.data()[e.index] += rhs[b] * e.value;
  DgFunction wd = w;
  wd -= wc;
  return {std::move(wc), std::move(wd)};
}

} // namespace kdv
