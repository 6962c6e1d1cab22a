#include <doctest.h>

#include <cmath>
#include <random>

#include "kdvdg/exact.hpp"
#include "kdvdg/problem.hpp"
#include "kdvdg/time_stepper.hpp"
#include "support.hpp"

using namespace kdv;

namespace {

double energy(const DgFunction& u, const OperatorSet& ops,
              const ProblemSpec& spec) {
  return compute_invariants(u, ops, spec, 0.0).energy;
}

} // namespace

TEST_SUITE("stepper") {

TEST_CASE("divided difference closed form") {
  const ProblemSpec lin = ProblemSpec::linear();
  CHECK(divided_difference(3.0, 1.0, lin) == doctest::Approx(2.0));
  CHECK(divided_difference(0.7, 0.7, lin) == doctest::Approx(lin.fprime(0.7)));

  const ProblemSpec quartic = ProblemSpec::mkdv4();
  CHECK(divided_difference(2.0, 1.0, quartic) == doctest::Approx(7.5));
  CHECK(divided_difference(2.0, 1.0, quartic) ==
        doctest::Approx((quartic.f(2.0) - quartic.f(1.0)) / (2.0 - 1.0)));
  CHECK(divided_difference(1.1, 1.1, quartic) ==
        doctest::Approx(2.0 * 1.1 * 1.1 * 1.1));

  std::mt19937 gen(3);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  for (int it = 0; it < 200; ++it) {
    const double a = dist(gen), b = dist(gen);
    CHECK(divided_difference(a, b, quartic) ==
          doctest::Approx(divided_difference(b, a, quartic)).epsilon(1e-13));
    if (std::abs(a - b) > 0.1)
      CHECK(divided_difference(a, b, quartic) ==
            doctest::Approx((quartic.f(a) - quartic.f(b)) / (a - b))
                .epsilon(1e-10));
    // derivative in the first slot vs finite differences
    const double eps = 1e-6;
    const double fd = (divided_difference(a + eps, b, quartic) -
                       divided_difference(a - eps, b, quartic)) /
                      (2 * eps);
    CHECK(divided_difference_da(a, b, quartic) ==
          doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("linear problem: one Newton iteration, conservation per step") {
  const double L = 40.0;
  const DgSpace space{build_uniform_mesh(25, L), 2};
  const OperatorSet ops(space, 40.0);
  const ProblemSpec spec = ProblemSpec::linear();
  const ConservativeStepper stepper(ops, spec);

  const DgFunction u0 =
      l2_project([L](double x) { return std::sin(2.0 * M_PI * x / L); }, space);
  const auto res = stepper.step(u0, 0.2);
  CHECK(res.newton_iters == 1);
  CHECK(res.residual_norm <= 1e-12);

  // mass after one step
  CHECK(res.u.integral() == doctest::Approx(u0.integral()).epsilon(1e-12));

  // energy identity after one step
  const double e0 = energy(u0, ops, spec);
  const double e1 = energy(res.u, ops, spec);
  CHECK(std::abs(e1 - e0) <= 1e-11 * (1.0 + std::abs(e0)));
}

TEST_CASE("quartic flux: conservation per step and Newton convergence") {
  const DgSpace space{build_uniform_mesh(24, 9.0), 2};
  const OperatorSet ops(space, 40.0);
  const ProblemSpec spec = ProblemSpec::mkdv4();
  const ConservativeStepper stepper(ops, spec);

  const DgFunction u0 = l2_project(
      [](double x) { return 0.9 * std::sin(2.0 * M_PI * x / 9.0); }, space);
  const auto res = stepper.step(u0, 0.05);
  CHECK(res.newton_iters >= 1);
  CHECK(res.residual_norm <= 1e-12);
  CHECK(res.u.integral() == doctest::Approx(u0.integral()).epsilon(1e-12));
  const double e0 = energy(u0, ops, spec);
  const double e1 = energy(res.u, ops, spec);
  CHECK(std::abs(e1 - e0) <= 1e-11 * (1.0 + std::abs(e0)));
}

TEST_CASE("eliminated auxiliary variable satisfies the second equation") {
  const DgSpace space{build_uniform_mesh(12, 6.0), 2};
  const OperatorSet ops(space, 40.0);
  const ProblemSpec spec = ProblemSpec::mkdv4();
  const ConservativeStepper stepper(ops, spec);
  std::mt19937 gen(7);
  const DgFunction u = kdvtest::random_dg(space, gen, 0.8);
  const auto res = stepper.step(u, 0.01);

  // int (V + dd(U_new, U_old)) psi + a_h((U_new+U_old)/2, psi) = 0 for a
  // generic test function
  const DgFunction psi = kdvtest::random_dg(space, gen);
  double viol = 0.0;
  {
    const DgFunction mid = 0.5 * (res.u + u);
    double acc = ops.apply_ip(mid, psi);
    const auto rule = ops.scheme_rule();
    for (int j = 0; j < space.num_cells(); ++j) {
      std::vector<double> un(rule.size()), uo(rule.size()), pv(rule.size());
      ops.cell_values(res.u, j, un);
      ops.cell_values(u, j, uo);
      ops.cell_values(psi, j, pv);
      double cell = 0.0;
      for (int p = 0; p < rule.size(); ++p)
        cell += rule.weights[p] *
                (res.v.evaluate_ref(j, rule.points[p]) +
                 divided_difference(un[p], uo[p], spec)) *
                pv[p];
      acc += 0.5 * space.mesh->cell_sizes[j] * cell;
    }
    viol = std::abs(acc);
  }
  CHECK(viol < 1e-11);
}

TEST_CASE("time reversibility for the linear problem") {
  const double L = 40.0;
  const DgSpace space{build_uniform_mesh(25, L), 2};
  const OperatorSet ops(space, 40.0);
  const ConservativeStepper stepper(ops, ProblemSpec::linear());
  const DgFunction u0 =
      l2_project([L](double x) { return std::sin(2.0 * M_PI * x / L); }, space);
  const auto fwd = stepper.step(u0, 0.2);
  const auto back = stepper.step(fwd.u, -0.2);
  DgFunction diff = back.u;
  diff -= u0;
  CHECK(l2_norm(diff) < 1e-10);
}

TEST_CASE("second-order accuracy in time") {
  // a high-degree space keeps the spatial error far below the temporal one,
  // so halving tau quarters the final-time error against the exact solution
  const double L = 40.0;
  const DgSpace space{build_uniform_mesh(51, L), 4};
  const OperatorSet ops(space, 160.0);
  const ProblemSpec spec = ProblemSpec::linear();
  const ExactSolution sol = linear_solution(1, 1.0, 0.0, L);
  auto u0 = [&sol](double x) { return sol.u(x, 0.0); };

  double prev = 0.0;
  for (double tau : {0.4, 0.2, 0.1}) {
    DgFunction last;
    double t_end = 0.0;
    run_scheme(u0, 1.0, tau, ops, spec, 1e-12, [&](const StepRecord& rec) {
      last = rec.u;
      t_end = rec.t;
    });
    const double err = error_vs_exact(last, sol, t_end).l2;
    if (prev > 0.0) {
      const double rate = std::log(prev / err) / std::log(2.0);
      CHECK(rate == doctest::Approx(2.0).epsilon(0.1));
    }
    prev = err;
  }
}

TEST_CASE("run loop: step counts, final partial step, callbacks") {
  const double L = 40.0;
  const DgSpace space{build_uniform_mesh(25, L), 1};
  const OperatorSet ops(space, 10.0);
  const ProblemSpec spec = ProblemSpec::linear();
  auto u0 = [L](double x) { return std::sin(2.0 * M_PI * x / L); };

  // tau = T: a single linear solve, mass conserved
  {
    const auto recs = run_scheme(u0, 0.5, 0.5, ops, spec);
    REQUIRE(recs.size() == 2);
    CHECK(recs[1].newton_iters == 1);
    CHECK(recs[1].invariants.mass ==
          doctest::Approx(recs[0].invariants.mass).epsilon(1e-12));
  }
  // last step shortened to land on T
  {
    const auto recs = run_scheme(u0, 1.0, 0.3, ops, spec);
    REQUIRE(recs.size() == 5);
    CHECK(recs.back().t == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(recs[3].t == doctest::Approx(0.9).epsilon(1e-14));
  }
  CHECK_THROWS_AS(run_scheme(u0, -1.0, 0.1, ops, spec), std::invalid_argument);
  CHECK_THROWS_AS(run_scheme(u0, 1.0, 0.0, ops, spec), std::invalid_argument);
}

TEST_CASE("conservation over many steps, any tau, linear and quartic") {
  const double L = 40.0;
  for (const ProblemSpec spec : {ProblemSpec::linear(), ProblemSpec::mkdv4()}) {
    const DgSpace space{build_uniform_mesh(20, L), 2};
    const OperatorSet ops(space, 40.0);
    auto u0 = [L](double x) { return 0.8 * std::sin(2.0 * M_PI * x / L); };
    double mass0 = 0.0, energy0 = 0.0;
    double worst_mass = 0.0, worst_energy = 0.0;
    bool first = true;
    run_scheme(u0, 2.0, 0.37, ops, spec, 1e-12, [&](const StepRecord& rec) {
      if (first) {
        mass0 = rec.invariants.mass;
        energy0 = rec.invariants.energy;
        first = false;
        return;
      }
      worst_mass = std::max(worst_mass, std::abs(rec.invariants.mass - mass0));
      worst_energy =
          std::max(worst_energy, std::abs(rec.invariants.energy - energy0));
    });
    CHECK(worst_mass <= 1e-10);
    CHECK(worst_energy <= 100.0 * 1e-12 * (1.0 + std::abs(energy0)));
  }
}

} // TEST_SUITE
