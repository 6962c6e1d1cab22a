#include "kdvdg/estimators.hpp"

#include <cmath>

namespace kdv {

double EtaBreakdown::eta() const { return std::sqrt(total_sq()); }

namespace {

/// Shared body: volume residual h (-D(v) + u_xx - flux(j, s)) plus the
/// three face terms on (u, v).
template <class FluxTerm>
EtaBreakdown eta_impl(const DgFunction& u, const DgFunction& v,
                      const OperatorSet& ops, FluxTerm&& flux) {
  const DgSpace& space = ops.space();
  const int q = space.degree;
  const Mesh& mesh = *space.mesh;
  const int n_cells = space.num_cells();

  const DgFunction g = reconstruct_D(v); // enters with the sign g := -D(V)
  const DgFunction ux = u.derivative();
  const DgFunction uxx = ux.derivative();

  EtaBreakdown out;
  out.volume_sq.resize(n_cells);
  out.jump_ux_sq.resize(n_cells);
  out.jump_u_sq.resize(n_cells);
  out.jump_v_sq.resize(n_cells);

  const auto rule = gauss_rule_for_degree(6 * q + 6);
  for (int j = 0; j < n_cells; ++j) {
    const double h = mesh.cell_sizes[j];
    double cell = 0.0;
    for (int p = 0; p < rule.size(); ++p) {
      const double s = rule.points[p];
      const double resid =
          -g.evaluate_ref(j, s) + uxx.evaluate_ref(j, s) - flux(j, s);
      cell += rule.weights[p] * resid * resid;
    }
    out.volume_sq[j] = h * h * 0.5 * h * cell;
    out.total_volume_sq += out.volume_sq[j];
  }

  const double sigma = ops.sigma();
  for (int f = 0; f < n_cells; ++f) {
    const double havg = mesh.avg_h(f);
    const double ju = u.jump(f);
    const double jux = ux.jump(f);
    const double jv = v.jump(f);
    out.jump_ux_sq[f] = havg * jux * jux;
    out.jump_u_sq[f] = sigma / havg * ju * ju;
    out.jump_v_sq[f] = havg * jv * jv;
    out.total_jump_ux_sq += out.jump_ux_sq[f];
    out.total_jump_u_sq += out.jump_u_sq[f];
    out.total_jump_v_sq += out.jump_v_sq[f];
  }
  return out;
}

} // namespace

EtaBreakdown compute_eta(const DgFunction& u, const DgFunction& v,
                         const OperatorSet& ops, const ProblemSpec& spec) {
  ops.check_same_space(u);
  ops.check_same_space(v);
  return eta_impl(u, v, ops, [&](int j, double s) {
    return spec.fprime(u.evaluate_ref(j, s));
  });
}

EtaBreakdown compute_eta_quotient(const DgFunction& u_dot,
                                  const DgFunction& v_dot,
                                  const DgFunction& u_ref,
                                  const OperatorSet& ops,
                                  const ProblemSpec& spec) {
  ops.check_same_space(u_dot);
  ops.check_same_space(v_dot);
  ops.check_same_space(u_ref);
  return eta_impl(u_dot, v_dot, ops, [&](int j, double s) {
    return spec.fsecond(u_ref.evaluate_ref(j, s)) * u_dot.evaluate_ref(j, s);
  });
}

double gronwall_rate_m4(double c4) {
  return std::max(0.5 + 7.5 * c4, 0.75 + 2.25 * c4);
}

BoundAccumulator::BoundAccumulator(const OperatorSet& ops, ProblemSpec spec,
                                   BoundConstants constants, double c4)
    : ops_(ops), spec_(spec), constants_(constants),
      c4hat_(spec.m == 4 ? gronwall_rate_m4(c4) : 1.0), splitter_(ops) {
  if (spec.m != 2 && spec.m != 4)
    throw std::invalid_argument(
        "BoundAccumulator: bounds are available for m = 2 and m = 4 only");
}

BoundAccumulator::QuotientSample BoundAccumulator::quotient_sample(
    const DgFunction& u_dot, const DgFunction& v_dot,
    const DgFunction& u_center) const {
  const EtaBreakdown eta_q =
      compute_eta_quotient(u_dot, v_dot, u_center, ops_, spec_);
  const auto split = splitter_.split(u_dot);
  const double dn = denorm(split.nonconforming);
  return {eta_q.total_sq(), dn * dn};
}

BoundRecord BoundAccumulator::assemble(const DgFunction& u,
                                       const DgFunction& v, double t,
                                       const QuotientSample& at_t,
                                       double integral,
                                       double noncon_integral) const {
  BoundRecord rec;
  rec.t = t;
  rec.state_eta = compute_eta(u, v, ops_, spec_);
  rec.eta_quotient_sq = at_t.eta_sq;
  rec.noncon_sq = at_t.noncon_sq;
  rec.noncon_integral = noncon_integral;
  rec.accumulated = initial_eta_sq_ + integral;

  const double state_sq = rec.state_eta.total_sq();
  if (spec_.m == 2)
    rec.bound = state_sq + 2.0 * std::exp(t) * rec.accumulated;
  else
    rec.bound = 2.0 * state_sq + 8.0 * std::exp(c4hat_ * t) * rec.accumulated;
  return rec;
}

BoundRecord BoundAccumulator::initialize(const DgFunction& u0,
                                         const DgFunction& v0) {
  u0_ = u0;
  v0_ = v0;
  u_prev_ = u0;
  steps_ = 0;
  t_prev_ = 0.0;
  interior_integral_ = 0.0;
  interior_noncon_ = 0.0;
  const EtaBreakdown e0 = compute_eta(u0, v0, ops_, spec_);
  initial_eta_sq_ = e0.total_sq();

  BoundRecord rec;
  rec.t = 0.0;
  rec.state_eta = e0;
  rec.accumulated = initial_eta_sq_;
  rec.bound = spec_.m == 2 ? initial_eta_sq_ + 2.0 * rec.accumulated
                           : 2.0 * initial_eta_sq_ + 8.0 * rec.accumulated;
  return rec;
}

std::optional<BoundRecord> BoundAccumulator::push(const DgFunction& u,
                                                  const DgFunction& v,
                                                  double t, double tau) {
  if (steps_ == 0) {
    tau_ = tau;
  } else if (std::abs(tau - tau_) > 1e-12 * tau_) {
    throw std::invalid_argument(
        "BoundAccumulator: the quotient pipeline needs uniform steps");
  }
  ++steps_;

  std::optional<BoundRecord> out;
  if (steps_ >= 2) {
    // centred quotients at the previous time level t^{n-1}
    DgFunction u_dot = u;
    u_dot -= u_prev2_;
    u_dot *= 1.0 / (2.0 * tau_);
    DgFunction v_dot = v;
    v_dot -= v_prev_;
    v_dot *= 1.0 / tau_;
    const QuotientSample sample = quotient_sample(u_dot, v_dot, u_prev_);
    last_sample_ = sample;
    interior_integral_ += tau_ * (2.0 * sample.eta_sq +
                                  2.0 * constants_.ca2cb2 * sample.noncon_sq);
    interior_noncon_ += tau_ * 2.0 * sample.noncon_sq;
    out = assemble(u_prev_, v_prev_, t_prev_, sample, interior_integral_,
                   interior_noncon_);
  }

  u_prev2_ = u_prev_;
  u_prev_ = u;
  v_prev_ = v;
  t_prev_ = t;
  return out;
}

BoundRecord BoundAccumulator::finalize() {
  if (steps_ == 0)
    throw std::logic_error("BoundAccumulator::finalize before any push");
  if (steps_ == 1) {
    // single-step run: fall back to one-sided quotients from the start
    DgFunction u_dot = u_prev_;
    u_dot -= u0_;
    u_dot *= 1.0 / tau_;
    DgFunction v_dot = v_prev_;
    v_dot -= v0_;
    v_dot *= 1.0 / tau_;
    const QuotientSample sample = quotient_sample(u_dot, v_dot, u_prev_);
    const double integral =
        tau_ * (2.0 * sample.eta_sq +
                2.0 * constants_.ca2cb2 * sample.noncon_sq);
    return assemble(u_prev_, v_prev_, t_prev_, sample, integral,
                    tau_ * 2.0 * sample.noncon_sq);
  }
  // trailing half-open slice carried by the last interior sample
  const double integral =
      interior_integral_ + tau_ * (2.0 * last_sample_.eta_sq +
                                   2.0 * constants_.ca2cb2 *
                                       last_sample_.noncon_sq);
  const double noncon =
      interior_noncon_ + tau_ * 2.0 * last_sample_.noncon_sq;
  return assemble(u_prev_, v_prev_, t_prev_, last_sample_, integral, noncon);
}

double h_minus1_norm(const DgFunction& g, int max_mode) {
  const Mesh& mesh = *g.space().mesh;
  const double L = mesh.domain_length;
  const auto rule = gauss_legendre(24);

  std::vector<std::vector<double>> vals(mesh.num_cells());
  std::vector<std::vector<double>> xs(mesh.num_cells());
  for (int j = 0; j < mesh.num_cells(); ++j) {
    vals[j].resize(rule.size());
    xs[j].resize(rule.size());
    for (int p = 0; p < rule.size(); ++p) {
      const double s = rule.points[p];
      xs[j][p] = mesh.nodes[j] + 0.5 * mesh.cell_sizes[j] * (s + 1.0);
      vals[j][p] = g.evaluate_ref(j, s);
    }
  }
  double total = 0.0;
  for (int k = 0; k <= max_mode; ++k) {
    const double omega = 2.0 * M_PI * k / L;
    double re = 0.0, im = 0.0;
    for (int j = 0; j < mesh.num_cells(); ++j) {
      const double half_h = 0.5 * mesh.cell_sizes[j];
      double cre = 0.0, cim = 0.0;
      for (int p = 0; p < rule.size(); ++p) {
        const double phase = omega * xs[j][p];
        cre += rule.weights[p] * vals[j][p] * std::cos(phase);
        cim -= rule.weights[p] * vals[j][p] * std::sin(phase);
      }
      re += half_h * cre;
      im += half_h * cim;
    }
    re /= L;
    im /= L;
    const double mag_sq = re * re + im * im;
    total += (k == 0 ? 1.0 : 2.0) * mag_sq / (1.0 + omega * omega);
  }
  return std::sqrt(L * total);
}

double compute_C4(const InitialData& u0, const DgFunction& dv,
                  const Mesh& mesh, double creg) {
  const auto rule = gauss_legendre(16);
  double uxx_sq = 0.0, uux_sq = 0.0, u6 = 0.0, ux_sq = 0.0, u4 = 0.0;
  for (int j = 0; j < mesh.num_cells(); ++j) {
    const double half_h = 0.5 * mesh.cell_sizes[j];
    for (int p = 0; p < rule.size(); ++p) {
      const double x = mesh.nodes[j] + half_h * (rule.points[p] + 1.0);
      const double w = half_h * rule.weights[p];
      const double u = u0.u(x);
      const double ux = u0.ux(x);
      const double uxx = u0.uxx(x);
      uxx_sq += w * uxx * uxx;
      uux_sq += w * u * u * ux * ux;
      u6 += w * u * u * u * u * u * u;
      ux_sq += w * ux * ux;
      u4 += w * u * u * u * u;
    }
  }
  const double hm1 = h_minus1_norm(dv, 4 * mesh.num_cells());
  const double l2 = l2_norm(dv);
  return creg * (hm1 * std::sqrt(uxx_sq + 5.0 * uux_sq + 0.5 * u6) +
                 l2 * std::sqrt(ux_sq + u4));
}

} // namespace kdv
