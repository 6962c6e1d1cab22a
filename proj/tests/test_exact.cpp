#include <doctest.h>

#include <cmath>
#include <random>

#include "kdvdg/elliptic.hpp"
#include "kdvdg/errors.hpp"
#include "kdvdg/exact.hpp"
#include "support.hpp"

using namespace kdv;

using kdvtest::sn_series_coefficients;
using kdvtest::sn_series_eval;

TEST_SUITE("exact") {

TEST_CASE("sn degenerates to sin at zero modulus") {
  for (double x : {0.3, 1.7, -2.4})
    CHECK(jacobi_sn(x, 0.0, EllipticConvention::modulus) ==
          doctest::Approx(std::sin(x)).epsilon(1e-13));
}

TEST_CASE("sn hits 1 at the quarter period") {
  const double k = 0.5;
  const double kq = complete_K(k, EllipticConvention::modulus);
  CHECK(jacobi_sn(kq, k, EllipticConvention::modulus) ==
        doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("sn agrees with the Maclaurin oracle near the origin") {
  for (double k : {0.3, 0.9}) {
    const auto series = sn_series_coefficients(k, 40);
    std::mt19937 gen(7);
    std::uniform_real_distribution<double> dist(-0.5, 0.5);
    for (int it = 0; it < 200; ++it) {
      const double x = dist(gen);
      CHECK(std::abs(jacobi_sn(x, k, EllipticConvention::modulus) -
                     sn_series_eval(series, x)) < 1e-12);
    }
  }
}

TEST_CASE("sn periodicity and conventions") {
  const double k = 0.9;
  const double period = sn_period(k, EllipticConvention::modulus);
  std::mt19937 gen(11);
  std::uniform_real_distribution<double> dist(-10.0, 10.0);
  for (int it = 0; it < 100; ++it) {
    const double x = dist(gen);
    CHECK(std::abs(jacobi_sn(x + period, k, EllipticConvention::modulus) -
                   jacobi_sn(x, k, EllipticConvention::modulus)) < 1e-12);
  }
  // parameter convention maps through m = k^2
  for (double x : {0.4, 1.3, 2.9})
    CHECK(jacobi_sn(x, k * k, EllipticConvention::parameter) ==
          doctest::Approx(jacobi_sn(x, k, EllipticConvention::modulus))
              .epsilon(1e-13));
  CHECK_THROWS_AS(jacobi_sn(0.5, 1.0, EllipticConvention::modulus),
                  std::invalid_argument);
  CHECK_THROWS_AS(complete_K(1.2, EllipticConvention::parameter),
                  std::invalid_argument);
}

TEST_CASE("the stretched domain constant is 16 K(0.9 parameter)") {
  const double k16 = 16.0 * complete_K(0.9, EllipticConvention::parameter);
  CHECK(std::abs(k16 - 41.24947381357075926189) < 1e-11);
  // and the modulus-convention period of the same configuration
  CHECK(sn_period(0.9, EllipticConvention::modulus) ==
        doctest::Approx(9.1221965536910813).epsilon(1e-12));
}

TEST_CASE("AGM converges quadratically") {
  for (double k : {0.1, 0.5, 0.9, 0.99}) {
    double a = 1.0, b = std::sqrt(1.0 - k * k);
    int iters = 0;
    while (std::abs(a - b) > 1e-15 * a && iters < 20) {
      const double an = 0.5 * (a + b);
      b = std::sqrt(a * b);
      a = an;
      ++iters;
    }
    CHECK(iters <= 8);
  }
}

TEST_CASE("linear solution certificate") {
  const ExactSolution sol = linear_solution(1, 1.0, 0.0, 40.0);
  CHECK(sol.u(3.0, 0.0) ==
        doctest::Approx(std::sin(2.0 * M_PI * 3.0 / 40.0)).epsilon(1e-15));
  // L-periodicity of the evaluator
  for (double t : {0.0, 0.7, 12.0})
    CHECK(std::abs(sol.u(0.0, t) - sol.u(40.0, t)) < 1e-12);
  CHECK(pde_residual_max(sol, 0.0, 40.0, 0.0, 1.0) < 1e-10);
  CHECK_THROWS_AS(linear_solution(0, 1.0, 0.0, 40.0), std::invalid_argument);
}

TEST_CASE("sn solution certificate holds for the halved quartic flux only") {
  const ExactSolution good = mkdv4_solution(0.9, EllipticConvention::modulus, 0.5);
  CHECK(pde_residual_max(good, 0.0, good.spatial_period * 4, 0.0, 1.0) < 1e-8);

  const ExactSolution bad = mkdv4_solution(0.9, EllipticConvention::modulus, 0.25);
  CHECK(pde_residual_max(bad, 0.0, bad.spatial_period * 4, 0.0, 1.0) > 1e-3);

  // k -> 0 degenerates to zero amplitude
  const ExactSolution tiny = mkdv4_solution(0.0, EllipticConvention::modulus, 0.5);
  CHECK(tiny.u(1.0, 1.0) == 0.0);
}

TEST_CASE("sn solution analytic derivatives match finite differences") {
  const ExactSolution sol = mkdv4_solution(0.9, EllipticConvention::modulus, 0.5);
  const double eps = 1e-6;
  const double eps2 = 1e-5;
  std::mt19937 gen(13);
  std::uniform_real_distribution<double> dist(0.0, 9.0);
  for (int it = 0; it < 50; ++it) {
    const double x = dist(gen), t = 0.1 * dist(gen);
    const double fd1 = (sol.u(x + eps, t) - sol.u(x - eps, t)) / (2 * eps);
    const double fd2 =
        (sol.u(x + eps2, t) - 2.0 * sol.u(x, t) + sol.u(x - eps2, t)) /
        (eps2 * eps2);
    CHECK(sol.ux(x, t) == doctest::Approx(fd1).epsilon(1e-7));
    CHECK(sol.uxx(x, t) == doctest::Approx(fd2).epsilon(1e-3));
  }
}

TEST_CASE("paper-literal configuration: periodic but not exact") {
  const ExactSolution lit =
      mkdv4_solution(0.9, EllipticConvention::parameter, 0.5);
  const double L = 41.24947381357075926189;
  require_periodic_fit(lit, L); // 4 periods, fits to round-off
  for (double t : {0.0, 0.4})
    CHECK(std::abs(lit.u(0.0, t) - lit.u(L, t)) < 1e-12);
  // amplitude-speed pairing is broken in the parameter convention
  CHECK(pde_residual_max(lit, 0.0, L, 0.0, 1.0) > 1e-3);
}

TEST_CASE("periodicity misfit raises with the true period") {
  const ExactSolution sol = mkdv4_solution(0.9, EllipticConvention::modulus, 0.5);
  try {
    require_periodic_fit(sol, 40.0);
    FAIL("expected PeriodicityError");
  } catch (const PeriodicityError& e) {
    CHECK(e.period == doctest::Approx(sol.spatial_period));
  }
  const ExactSolution kink = kink_solution(1.0);
  CHECK_THROWS_AS(require_periodic_fit(kink, 40.0), PeriodicityError);
}

TEST_CASE("kink evaluator shape") {
  const double c = 2.0;
  const ExactSolution kink = kink_solution(c);
  CHECK(kink.u(0.0, 0.0) == doctest::Approx(0.0));
  CHECK(kink.u(1e3, 0.0) == doctest::Approx(std::sqrt(3.0 * c)).epsilon(1e-12));
  CHECK(kink.u(-1e3, 0.0) ==
        doctest::Approx(-std::sqrt(3.0 * c)).epsilon(1e-12));
  const ExactSolution anti = kink_solution(c, -1);
  CHECK(anti.u(1e3, 0.0) == doctest::Approx(-std::sqrt(3.0 * c)).epsilon(1e-12));
  CHECK(kink.ux(0.3, 0.1) > 0.0);
}

TEST_CASE("fd weights reproduce simple stencils") {
  const std::vector<double> nodes{-1.0, 0.0, 1.0};
  const auto w1 = fd_weights(0.0, nodes, 1);
  CHECK(w1[0] == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(w1[1] == doctest::Approx(0.0));
  CHECK(w1[2] == doctest::Approx(0.5).epsilon(1e-14));
  const auto w2 = fd_weights(0.0, nodes, 2);
  CHECK(w2[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(w2[1] == doctest::Approx(-2.0).epsilon(1e-14));
  CHECK(w2[2] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("errors against the exact solution track projection accuracy") {
  const double L = 40.0;
  const ExactSolution sol = linear_solution(1, 1.0, 0.0, L);
  double prev_enorm = 0.0, prev_l2 = 0.0, prev_h = 0.0;
  const int q = 2;
  for (int n : {20, 40, 80}) {
    const DgSpace space{build_uniform_mesh(n, L), q};
    const DgFunction uh = l2_project([&sol](double x) { return sol.u(x, 0.0); },
                                     space, gauss_rule_for_degree(4 * q + 8));
    const ErrorNorms err = error_vs_exact(uh, sol, 0.0);
    if (prev_enorm > 0.0) {
      const double h = L / n;
      CHECK(std::log(err.enorm / prev_enorm) / std::log(h / prev_h) ==
            doctest::Approx(q).epsilon(0.15));
      CHECK(std::log(err.l2 / prev_l2) / std::log(h / prev_h) ==
            doctest::Approx(q + 1).epsilon(0.1));
    }
    prev_enorm = err.enorm;
    prev_l2 = err.l2;
    prev_h = L / n;
  }
}

} // TEST_SUITE
