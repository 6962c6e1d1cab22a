#ifndef KDVDG_DG_FUNCTION_HPP
#define KDVDG_DG_FUNCTION_HPP

#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "kdvdg/mesh.hpp"
#include "kdvdg/quadrature.hpp"

namespace kdv {

/// Broken polynomial space of degree q on a periodic mesh.
struct DgSpace {
  std::shared_ptr<const Mesh> mesh;
  int degree = 1;

  int num_cells() const { return mesh->num_cells(); }
  int block_size() const { return degree + 1; }
  int dim() const { return num_cells() * block_size(); }

  bool operator==(const DgSpace& o) const {
    return degree == o.degree && mesh->num_cells() == o.mesh->num_cells() &&
           mesh->domain_length == o.mesh->domain_length;
  }
};

enum class Side { left, right, interior };

/// One face's traces: g(x_j^-), g(x_j^+), jump and average.
struct FaceTraces {
  double left = 0.0;  // g(x_j^-)
  double right = 0.0; // g(x_j^+)
  double jump() const { return left - right; }
  double average() const { return 0.5 * (left + right); }
};

/// Coefficients of a broken polynomial in the per-cell scaled Legendre
/// basis l_{j,k}(x) = l_k(2(x-x_j)/h_j - 1). Coefficient (j,k) lives at
/// coeffs[j*(q+1)+k]. The basis is orthogonal per cell, so the cell mass
/// matrix is diagonal with entries h_j/(2k+1).
class DgFunction {
public:
  DgFunction() = default;
  explicit DgFunction(DgSpace space)
      : space_(std::move(space)), coeffs_(space_.dim(), 0.0) {}

  const DgSpace& space() const { return space_; }
  int degree() const { return space_.degree; }
  int num_cells() const { return space_.num_cells(); }

  double& coeff(int cell, int k) { return coeffs_[cell * (degree() + 1) + k]; }
  double coeff(int cell, int k) const {
    return coeffs_[cell * (degree() + 1) + k];
  }
  std::span<double> cell_coeffs(int cell) {
    return {coeffs_.data() + cell * (degree() + 1),
            static_cast<size_t>(degree() + 1)};
  }
  std::span<const double> cell_coeffs(int cell) const {
    return {coeffs_.data() + cell * (degree() + 1),
            static_cast<size_t>(degree() + 1)};
  }
  std::vector<double>& data() { return coeffs_; }
  const std::vector<double>& data() const { return coeffs_; }

  /// Point evaluation. A side flag is required exactly at mesh nodes;
  /// Side::interior there throws.
  double evaluate(double x, Side side = Side::interior) const;

  /// Value at reference coordinate s in [-1,1] within a cell.
  double evaluate_ref(int cell, double s) const;

  /// Trace from cell j-1 at face j (value g(x_j^-)).
  double trace_left(int face) const;
  /// Trace from cell j at face j (value g(x_j^+)).
  double trace_right(int face) const;
  FaceTraces face_traces(int face) const {
    return {trace_left(face), trace_right(face)};
  }
  double jump(int face) const { return face_traces(face).jump(); }
  double average(int face) const { return face_traces(face).average(); }

  /// Broken derivative in the same space (top coefficient zero).
  DgFunction derivative() const;

  /// mean = (1/L) integral of g.
  double mean() const;
  double integral() const;

  DgFunction& operator+=(const DgFunction& o);
  DgFunction& operator-=(const DgFunction& o);
  DgFunction& operator*=(double a);

private:
  DgSpace space_;
  std::vector<double> coeffs_;
};

DgFunction operator+(DgFunction a, const DgFunction& b);
DgFunction operator-(DgFunction a, const DgFunction& b);
DgFunction operator*(double a, DgFunction g);

/// L2 projection. Per-cell coefficients c_{j,k} = (2k+1)/h_j int_{I_j} w l_{j,k};
/// the identity on the space itself. The default rule has exactness 4q,
/// which for smooth data is the one admitted inexact integral of the scheme.
DgFunction l2_project(const std::function<double(double)>& w,
                      const DgSpace& space);
DgFunction l2_project(const std::function<double(double)>& w,
                      const DgSpace& space, const QuadratureRule& rule);

/// All norms used by the analysis.
/// enorm^2  = sum_j ||W_x||^2_{L2(I_j)} + sum_j avg{h}_j^{-1} [W]_j^2
/// denorm^2 = enorm^2 + sum_j ||h W_xx||^2_{L2(I_j)}
struct DgNorms {
  double l2 = 0.0;
  double enorm = 0.0;
  double denorm = 0.0;
  double linf = 0.0;
};

double l2_norm(const DgFunction& g);
/// L^m norm for even m (quadrature of degree m*q).
double lm_norm(const DgFunction& g, int m);
double enorm(const DgFunction& g);
double denorm(const DgFunction& g);
/// Sampled sup-norm estimate: 10(q+1) points per cell plus endpoints.
double linf_estimate(const DgFunction& g);
DgNorms all_norms(const DgFunction& g);

/// Columnar record for CSV/JSON dumps.
struct DgCoeffRecord {
  int cell;
  int mode;
  double value;
};
std::vector<DgCoeffRecord> to_records(const DgFunction& g);

/// CSV with header `cell,mode,coefficient`, full precision.
void write_records_csv(const DgFunction& g, std::ostream& os);

} // namespace kdv

#endif
