#include "kdvdg/invariants.hpp"

namespace kdv {

InvariantRecord compute_invariants(const DgFunction& u, const OperatorSet& ops,
                                   const ProblemSpec& spec, double t) {
  ops.check_same_space(u);
  InvariantRecord rec;
  rec.t = t;
  rec.mass = u.integral();
  const double l2 = l2_norm(u);
  rec.momentum = 0.5 * l2 * l2;

  // int f(U): polynomial of degree m q, exact under the scheme rule for m<=4
  double ef = 0.0;
  {
    const auto& rule = ops.scheme_rule();
    std::vector<double> vals(rule.size());
    for (int j = 0; j < u.num_cells(); ++j) {
      ops.cell_values(u, j, vals);
      double cell = 0.0;
      for (int p = 0; p < rule.size(); ++p)
        cell += rule.weights[p] * spec.f(vals[p]);
      ef += 0.5 * u.space().mesh->cell_sizes[j] * cell;
    }
  }
  rec.energy = 0.5 * ops.apply_ip(u, u) + ef;

  if (spec.m == 4) {
    const auto rule = gauss_rule_for_degree(6 * u.degree());
    const DgFunction ux = u.derivative();
    const DgFunction uxx = ux.derivative();
    double acc = 0.0;
    for (int j = 0; j < u.num_cells(); ++j) {
      double cell = 0.0;
      for (int p = 0; p < rule.size(); ++p) {
        const double s = rule.points[p];
        const double uv = u.evaluate_ref(j, s);
        const double dv = ux.evaluate_ref(j, s);
        const double d2 = uxx.evaluate_ref(j, s);
        cell += rule.weights[p] *
                (2.0 * d2 * d2 + 10.0 * uv * uv * dv * dv +
                 uv * uv * uv * uv * uv * uv);
      }
      acc += 0.5 * u.space().mesh->cell_sizes[j] * cell;
    }
    rec.higher = acc;
  }
  return rec;
}

} // namespace kdv
