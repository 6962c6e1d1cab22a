#include "kdvdg/dg_function.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "kdvdg/legendre.hpp"

namespace kdv {

namespace {

void require_same_space(const DgFunction& a, const DgFunction& b) {
  if (!(a.space() == b.space()))
    throw std::invalid_argument("DgFunction: space mismatch");
}

} // namespace

double DgFunction::evaluate_ref(int cell, double s) const {
  const int q = degree();
  std::vector<double> l(q + 1);
  legendre_eval_all(q, s, l);
  double acc = 0.0;
  const auto c = cell_coeffs(cell);
  for (int k = 0; k <= q; ++k) acc += c[k] * l[k];
  return acc;
}

double DgFunction::evaluate(double x, Side side) const {
  const Mesh& mesh = *space_.mesh;
  const int n = mesh.num_cells();
  if (x < mesh.nodes.front() || x > mesh.nodes.back())
    throw std::invalid_argument("DgFunction::evaluate: x outside domain");

  const auto it = std::upper_bound(mesh.nodes.begin(), mesh.nodes.end(), x);
  const int cell = static_cast<int>(it - mesh.nodes.begin()) - 1;

  // exact node hit: the side flag decides which one-sided limit
  if (cell >= 0 && x == mesh.nodes[cell]) {
    const int face = cell % n;
    switch (side) {
      case Side::left: return trace_left(face);
      case Side::right: return trace_right(face);
      case Side::interior:
        throw std::invalid_argument(
            "DgFunction::evaluate: side flag required at a mesh node");
    }
  }

  const double s =
      2.0 * (x - mesh.nodes[cell]) / mesh.cell_sizes[cell] - 1.0;
  return evaluate_ref(cell, s);
}

double DgFunction::trace_left(int face) const {
  // right endpoint of cell face-1: l_k(1) = 1
  const int cell = space_.mesh->left_cell_of_face(face);
  double acc = 0.0;
  for (double c : cell_coeffs(cell)) acc += c;
  return acc;
}

double DgFunction::trace_right(int face) const {
  // left endpoint of cell face: l_k(-1) = (-1)^k
  const int cell = space_.mesh->right_cell_of_face(face);
  const auto c = cell_coeffs(cell);
  double acc = 0.0;
  double sign = 1.0;
  for (int k = 0; k <= degree(); ++k, sign = -sign) acc += sign * c[k];
  return acc;
}

DgFunction DgFunction::derivative() const {
  // l_k'(s) = sum_{i<k, k-i odd} (2i+1) l_i(s), plus the 2/h_j map factor
  const int q = degree();
  DgFunction d(space_);
  for (int j = 0; j < num_cells(); ++j) {
    const double scale = 2.0 / space_.mesh->cell_sizes[j];
    const auto c = cell_coeffs(j);
    auto dc = d.cell_coeffs(j);
    for (int i = 0; i < q; ++i) {
      double acc = 0.0;
      for (int k = i + 1; k <= q; k += 2) acc += c[k];
      dc[i] = scale * (2 * i + 1) * acc;
    }
    dc[q] = 0.0;
  }
  return d;
}

double DgFunction::integral() const {
  double acc = 0.0;
  for (int j = 0; j < num_cells(); ++j)
    acc += coeff(j, 0) * space_.mesh->cell_sizes[j];
  return acc;
}

double DgFunction::mean() const {
  return integral() / space_.mesh->domain_length;
}

DgFunction& DgFunction::operator+=(const DgFunction& o) {
  require_same_space(*this, o);
  for (size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
  return *this;
}

DgFunction& DgFunction::operator-=(const DgFunction& o) {
  require_same_space(*this, o);
  for (size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
  return *this;
}

DgFunction& DgFunction::operator*=(double a) {
  for (double& c : coeffs_) c *= a;
  return *this;
}

DgFunction operator+(DgFunction a, const DgFunction& b) { return a += b; }
DgFunction operator-(DgFunction a, const DgFunction& b) { return a -= b; }
DgFunction operator*(double a, DgFunction g) { return g *= a; }

DgFunction l2_project(const std::function<double(double)>& w,
                      const DgSpace& space) {
  return l2_project(w, space, gauss_rule_for_degree(4 * space.degree));
}

DgFunction l2_project(const std::function<double(double)>& w,
                      const DgSpace& space, const QuadratureRule& rule) {
  const int q = space.degree;
  const int np = rule.size();
  const Mesh& mesh = *space.mesh;

  std::vector<double> basis(static_cast<size_t>(np) * (q + 1));
  for (int p = 0; p < np; ++p)
    legendre_eval_all(q, rule.points[p],
                      {basis.data() + p * (q + 1), static_cast<size_t>(q + 1)});

  DgFunction g(space);
  for (int j = 0; j < mesh.num_cells(); ++j) {
    const double xl = mesh.nodes[j];
    const double h = mesh.cell_sizes[j];
    auto c = g.cell_coeffs(j);
    for (int p = 0; p < np; ++p) {
      const double x = xl + 0.5 * h * (rule.points[p] + 1.0);
      const double wf = rule.weights[p] * w(x); // int = (h/2) sum w_p f(x_p)
      const double* l = basis.data() + p * (q + 1);
      for (int k = 0; k <= q; ++k) c[k] += wf * l[k];
    }
    // (h/2) from the map and (2k+1)/h from the diagonal mass cancel to
    // (2k+1)/2
    for (int k = 0; k <= q; ++k) c[k] *= 0.5 * (2 * k + 1);
  }
  return g;
}

double l2_norm(const DgFunction& g) {
  const int q = g.degree();
  double acc = 0.0;
  for (int j = 0; j < g.num_cells(); ++j) {
    const double h = g.space().mesh->cell_sizes[j];
    const auto c = g.cell_coeffs(j);
    for (int k = 0; k <= q; ++k) acc += c[k] * c[k] * h / (2 * k + 1);
  }
  return std::sqrt(acc);
}

namespace {

double cell_l2_sq(const DgFunction& g, int cell) {
  const int q = g.degree();
  const double h = g.space().mesh->cell_sizes[cell];
  const auto c = g.cell_coeffs(cell);
  double acc = 0.0;
  for (int k = 0; k <= q; ++k) acc += c[k] * c[k] * h / (2 * k + 1);
  return acc;
}

} // namespace

double lm_norm(const DgFunction& g, int m) {
  if (m == 2) return l2_norm(g);
  if (m < 2 || m % 2 != 0)
    throw std::invalid_argument("lm_norm: m must be an even integer >= 2");
  const auto rule = gauss_rule_for_degree(m * g.degree());
  double acc = 0.0;
  for (int j = 0; j < g.num_cells(); ++j) {
    const double h = g.space().mesh->cell_sizes[j];
    double cell = 0.0;
    for (int p = 0; p < rule.size(); ++p) {
      const double v = g.evaluate_ref(j, rule.points[p]);
      cell += rule.weights[p] * std::pow(v, m);
    }
    acc += 0.5 * h * cell;
  }
  return std::pow(acc, 1.0 / m);
}

double enorm(const DgFunction& g) {
  const DgFunction gx = g.derivative();
  double acc = 0.0;
  for (int j = 0; j < g.num_cells(); ++j) acc += cell_l2_sq(gx, j);
  const Mesh& mesh = *g.space().mesh;
  for (int f = 0; f < mesh.num_cells(); ++f) {
    const double jump = g.jump(f);
    acc += jump * jump / mesh.avg_h(f);
  }
  return std::sqrt(acc);
}

double denorm(const DgFunction& g) {
  const DgFunction gx = g.derivative();
  const DgFunction gxx = gx.derivative();
  const Mesh& mesh = *g.space().mesh;
  double acc = 0.0;
  for (int j = 0; j < g.num_cells(); ++j) {
    const double h = mesh.cell_sizes[j];
    acc += cell_l2_sq(gx, j) + h * h * cell_l2_sq(gxx, j);
  }
  for (int f = 0; f < mesh.num_cells(); ++f) {
    const double jump = g.jump(f);
    acc += jump * jump / mesh.avg_h(f);
  }
  return std::sqrt(acc);
}

double linf_estimate(const DgFunction& g) {
  const int per_cell = 10 * (g.degree() + 1);
  double best = 0.0;
  for (int j = 0; j < g.num_cells(); ++j) {
    for (int p = 0; p <= per_cell; ++p) {
      const double s = -1.0 + 2.0 * p / per_cell;
      best = std::max(best, std::abs(g.evaluate_ref(j, s)));
    }
  }
  return best;
}

DgNorms all_norms(const DgFunction& g) {
  return {l2_norm(g), enorm(g), denorm(g), linf_estimate(g)};
}

std::vector<DgCoeffRecord> to_records(const DgFunction& g) {
  std::vector<DgCoeffRecord> out;
  out.reserve(g.space().dim());
  for (int j = 0; j < g.num_cells(); ++j)
    for (int k = 0; k <= g.degree(); ++k) out.push_back({j, k, g.coeff(j, k)});
  return out;
}

void write_records_csv(const DgFunction& g, std::ostream& os) {
  os << "cell,mode,coefficient\n";
  char buf[40];
  for (const DgCoeffRecord& r : to_records(g)) {
    std::snprintf(buf, sizeof buf, "%.17g", r.value);
    os << r.cell << "," << r.mode << "," << buf << "\n";
  }
}

} // namespace kdv
