#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "lyzero/lyzero.hpp"
#include "oracles.hpp"

using namespace lyzero;
using doctest::Approx;

TEST_CASE("bound evaluators") {
  CHECK(bound_condition_i(0.0) == 1.0);
  CHECK(bound_condition_i(1.0) == Approx(1.24220796761864468).epsilon(1e-15));
  CHECK(bound_condition_i(2.0) == Approx(1.93963803094382315).epsilon(1e-15));
  CHECK(bound_condition_ii(0.0) == 1.0);
  CHECK(bound_condition_ii(1.0) == Approx(1.36350317719817676).epsilon(1e-15));
  CHECK(bound_condition_ii(2.0) == Approx(2.04805469884603549).epsilon(1e-15));
  CHECK_THROWS(bound_condition_i(-0.1));
  CHECK_THROWS(bound_condition_ii(NAN));
}

TEST_CASE("property: bound ordering") {
  for (double bk = 0.01; bk <= 20.0; bk *= 1.3) {
    CHECK(bound_condition_ii(bk) > bound_condition_i(bk));
    CHECK(bound_condition_i(bk) > 1.0);
  }
}

TEST_CASE("bound_report picks the branch") {
  const MatchingReport chain = analyze_structure(coupling_chain(4, 1.0, false));
  CHECK(bound_report(chain, 1.0, 0.9).applicable == TheoremBranch::LiebSokal);
  CHECK(bound_report(chain, 1.0, 1.2).applicable == TheoremBranch::ConditionI);
  CHECK(bound_report(chain, 1.0, 1.3).applicable == TheoremBranch::Silent);
  CHECK_FALSE(bound_report(chain, 1.0, 1.3).theta_bound_ii.has_value());

  const MatchingReport h = analyze_structure(coupling_hierarchical({{1.0, 1.0}, {}}));
  const BoundReport r = bound_report(h, 1.0, 1.35);
  CHECK(r.applicable == TheoremBranch::ConditionII);
  CHECK(*r.theta_bound_ii == Approx(1.36350317719817676));
  CHECK(r.best_bound() == Approx(1.36350317719817676));
  CHECK(bound_report(h, 2.0, 1.35).theta_bound_i == Approx(1.93963803094382315));

  const MatchingReport none = analyze_structure(coupling_chain(3, 1.0, false));
  CHECK(bound_report(none, 1.0, 1.01).applicable == TheoremBranch::Silent);
  CHECK(to_string(TheoremBranch::ConditionII) == "condition_ii");
}

TEST_CASE("two_spin_kernel_value") {
  SUBCASE("kappa = 0 at the origin") {
    CHECK(std::abs(two_spin_kernel_value({0.0, 1.7}, 0.0, 0.0) - 1.0) < 1e-15);
  }
  SUBCASE("diagonal form") {
    const double kappa = 0.8;
    const double theta = 1.1;
    for (double xr : {-1.0, 0.0, 0.5, 2.0}) {
      const std::complex<double> x(xr, 0.3 * xr);
      const std::complex<double> c = std::cosh(x);
      const std::complex<double> expected =
          (std::exp(kappa) * c * c + 2.0 * theta * c + theta * theta - std::sinh(kappa)) /
          ((1 + theta) * (1 + theta));
      CHECK(std::abs(two_spin_kernel_value({kappa, theta}, x, x) - expected) <= 1e-13 * std::abs(expected));
    }
  }
  SUBCASE("agrees with the operator route") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> re(-3.0, 3.0);
    std::uniform_real_distribution<double> im(-7.0, 7.0);
    std::uniform_real_distribution<double> par(0.01, 3.0);
    for (int s = 0; s < 500; ++s) {
      const double kappa = par(rng);
      const double theta = par(rng);
      const ExpSum route = apply_quadratic_exponential(
          expsum_from_measure(blume_capel_measure(theta), 2), coupling_chain(2, kappa, false), 1.0);
      const std::vector<std::complex<double>> pt{{re(rng), im(rng)}, {re(rng), im(rng)}};
      const std::complex<double> a = eval_expsum(route, pt);
      const std::complex<double> b = two_spin_kernel_value({kappa, theta}, pt[0], pt[1]);
      // absolute error relative to the size of the summands
      double scale = 0.0;
      for (std::size_t t = 0; t < route.size(); ++t)
        scale += route.coefficient(t) * std::exp(route.frequency(t, 0) * pt[0].real() +
                                                 route.frequency(t, 1) * pt[1].real());
      CHECK(std::abs(a - b) <= 1e-13 * scale);
    }
  }
}

TEST_CASE("omega_pm") {
  const OmegaPair one = omega_pm(1.0);
  CHECK(one.plus == Approx(0.728087866098418443).epsilon(1e-14));
  CHECK(one.minus == Approx(0.185877679794101802).epsilon(1e-14));
  const OmegaPair tiny = omega_pm(1e-9);
  CHECK(tiny.plus == Approx(1.0));
  CHECK(tiny.minus == Approx(1.0));
  CHECK_THROWS(omega_pm(0.0));
  // the first form e^{-κ}(θ ± √(θ²-1)) at θ² = cosh κ
  for (double k : {0.3, 1.0, 4.0}) {
    const double theta = std::sqrt(std::cosh(k));
    CHECK(omega_pm(k).plus == Approx(std::exp(-k) * (theta + std::sqrt(theta * theta - 1))));
  }
}

TEST_CASE("property: omega_plus decreases and stays below one") {
  double previous = 1.0;
  for (int i = 1; i <= 1000; ++i) {
    const double k = 0.01 * i;
    const OmegaPair w = omega_pm(k);
    CHECK(w.plus < previous);
    CHECK(0.0 < w.minus);
    CHECK(w.minus <= w.plus);
    previous = w.plus;
  }
}

TEST_CASE("epsilon_pm") {
  const EpsilonPair e = epsilon_pm(1.0, 1.2);
  CHECK(e.minus == Approx(-0.753655218828419383).epsilon(1e-14));
  CHECK(e.plus == Approx(-0.129255439983042189).epsilon(1e-14));
  // δ from the pair
  CHECK((e.plus - e.minus) * std::exp(1.0) / 2 == Approx(0.848647286264617696).epsilon(1e-14));

  const double edge = bound_condition_ii(1.0);
  const EpsilonPair d = epsilon_pm(1.0, edge);
  CHECK(d.plus == Approx(d.minus));
  CHECK(d.minus == Approx(-edge / std::exp(1.0)));

  CHECK_THROWS_AS(epsilon_pm(1.0, 1.4), std::domain_error);
  CHECK_THROWS(epsilon_pm(0.0, 1.0));
}

TEST_CASE("property: epsilon magnitudes and imaginary solutions") {
  for (int a = 0; a < 10; ++a) {
    const double K = 0.1 + 0.5 * a;
    const double top = bound_condition_ii(K);
    for (int b = 0; b < 10; ++b) {
      const double theta = 0.05 + (top - 0.05) * b / 9.0;
      const EpsilonPair e = epsilon_pm(K, theta);
      CHECK(std::abs(e.plus) <= std::abs(e.minus));
      CHECK(std::abs(e.minus) < 1.0);
      // cosh(iy) = cos y = ε has a real solution y
      for (double eps : {e.minus, e.plus}) {
        const std::complex<double> y(0.0, std::acos(eps));
        CHECK(std::abs(std::cosh(y) - eps) < 1e-14);
      }
    }
  }
}

TEST_CASE("corollary_bounds") {
  const CorollaryBounds c = corollary_bounds(1.0, 1.0);
  CHECK(c.delta_max == Approx(0.910037595801458903).epsilon(1e-14));
  CHECK(c.q_max == Approx(0.554011039813555660).epsilon(1e-14));
  CHECK_FALSE(c.delta_max_below_half_kappa);
  // θ at delta_max equals the condition-(i) bound
  CHECK(theta_from_delta(1.0, c.delta_max) == Approx(bound_condition_i(1.0)));
  // large β: delta_max approaches κ/2 from above
  const CorollaryBounds cold = corollary_bounds(200.0, 1.0);
  CHECK(cold.delta_max > 0.5);
  CHECK(cold.delta_max - 0.5 == Approx(std::numbers::ln2 / 400).epsilon(1e-12));
  CHECK(std::isfinite(corollary_bounds(1e6, 1.0).delta_max));
  // κ → 0: q_max → 1/2
  CHECK(corollary_bounds(1.0, 1e-9).q_max == Approx(0.5));
  CHECK_THROWS(corollary_bounds(0.0, 1.0));
}

TEST_CASE("dilute_beta_threshold") {
  CHECK(dilute_beta_threshold(0.4, 1.0) == 0.0);
  CHECK(dilute_beta_threshold(0.5, 1.0) == 0.0);
  // q = 2/3: θ = 2, √cosh(βκ) = 2 at βκ = acosh 4
  const double beta = dilute_beta_threshold(2.0 / 3, 0.5);
  CHECK(beta == Approx(std::acosh(4.0) / 0.5));
  CHECK(bound_condition_i(beta * 0.5) == Approx(2.0));
  CHECK_THROWS(dilute_beta_threshold(1.0, 1.0));
}

TEST_CASE("kernel nonvanishing on theta² = cosh kappa") {
  for (double kappa : {0.1, 1.0, 3.0}) {
    const KernelScan s = scan_kernel_nonvanishing(kappa, 10000, 99);
    CHECK(s.samples == 10000);
    CHECK(s.min_modulus > 0.0);
    CHECK(s.min_relative_modulus > 1e-6);
  }
}

TEST_CASE("verify_theorem1") {
  SUBCASE("chain, condition (i)") {
    const VerificationRecord r = verify_theorem1({blume_capel_measure(1.2), coupling_chain(4, 1.0, false), 1.0});
    CHECK(r.bounds.applicable == TheoremBranch::ConditionI);
    CHECK(r.predicted == std::optional<bool>(true));
    CHECK(r.observed.holds);
    CHECK_FALSE(r.mismatch());
  }
  SUBCASE("hierarchy, condition (ii)") {
    const VerificationRecord r = verify_theorem1({blume_capel_measure(1.35), coupling_hierarchical({{1.0, 1.0}, {}}), 1.0});
    CHECK(r.bounds.applicable == TheoremBranch::ConditionII);
    CHECK(r.observed.holds);
  }
  SUBCASE("silent") {
    const VerificationRecord r = verify_theorem1({blume_capel_measure(5.0), coupling_chain(2, 1.0, false), 1.0});
    CHECK_FALSE(r.predicted.has_value());
    CHECK_FALSE(r.observed.holds);
    CHECK_FALSE(r.mismatch());
    CHECK(to_json(r).at("predicted") == "theorem silent");
  }
  SUBCASE("ising has theta 0") {
    const VerificationRecord r = verify_theorem1({ising_measure(), coupling_curie_weiss(4, 0.5), 1.0});
    CHECK(r.bounds.applicable == TheoremBranch::LiebSokal);
    CHECK(r.observed.holds);
  }
}

TEST_CASE("sharpness_scan") {
  SUBCASE("two sites at beta kappa = 1") {
    const ModelInstance base{blume_capel_measure(1.0), coupling_chain(2, 1.0, false), 1.0};
    std::vector<double> grid;
    for (double t = 1.0; t <= 1.6; t += 0.05) grid.push_back(t);
    const SharpnessResult r = sharpness_scan(theta_family(base), grid, bound_condition_i(1.0));
    REQUIRE(r.bracketed);
    CHECK(r.upper - r.lower <= 1e-4);
    CHECK(r.bound_respected);
    CHECK(r.gap > 0.0);
    CHECK_FALSE(r.non_monotone);
    // the two-site polynomial leaves the circle exactly at √((e+1)/2)
    CHECK(r.lower <= 1.36350317719817676 + 1e-12);
    CHECK(r.upper >= 1.36350317719817676 - 1e-12);
  }
  SUBCASE("weak coupling approaches one") {
    const ModelInstance base{blume_capel_measure(1.0), coupling_chain(2, 1e-3, false), 1.0};
    std::vector<double> grid{0.9, 0.95, 1.0, 1.05, 1.1};
    const SharpnessResult r = sharpness_scan(theta_family(base), grid, bound_condition_i(1e-3));
    REQUIRE(r.bracketed);
    CHECK(r.lower == Approx(1.0).epsilon(1e-3));
  }
  SUBCASE("hierarchy with four sites") {
    const HierarchySpec spec{{1.0, 0.5}, {}};
    const ModelInstance base{blume_capel_measure(1.0), coupling_hierarchical(spec), 1.0};
    std::vector<double> grid;
    for (double t = 1.0; t <= 2.0; t += 0.1) grid.push_back(t);
    const SharpnessResult r = sharpness_scan(theta_family(base, Engine::Auto, spec), grid,
                                             bound_condition_ii(0.5));
    REQUIRE(r.bracketed);
    CHECK(r.bound_respected);
  }
  SUBCASE("grid must be sorted and nonempty") {
    const ModelInstance base{blume_capel_measure(1.0), coupling_chain(2, 1.0, false), 1.0};
    CHECK_THROWS(sharpness_scan(theta_family(base), std::vector<double>{}, 1.0));
    CHECK_THROWS(sharpness_scan(theta_family(base), std::vector<double>{1.2, 1.1}, 1.0));
    const SharpnessResult all_hold = sharpness_scan(theta_family(base), std::vector<double>{0.5, 0.9}, 1.0);
    CHECK_FALSE(all_hold.bracketed);
  }
}
