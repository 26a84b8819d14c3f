#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lyzero/lyzero.hpp"
#include "oracles.hpp"

using namespace lyzero;
using doctest::Approx;

namespace {

std::vector<double> weights(const SpinMeasure& m) {
  std::vector<double> w;
  for (const Atom& a : m.atoms()) w.push_back(a.weight);
  return w;
}

}  // namespace

TEST_CASE("blume_capel_measure weights") {
  SUBCASE("theta = 1/2 is uniform") {
    for (double w : weights(blume_capel_measure(0.5))) CHECK(w == Approx(1.0 / 3));
  }
  SUBCASE("theta = 2") {
    const auto w = weights(blume_capel_measure(2.0));
    CHECK(w[0] == Approx(1.0 / 6));
    CHECK(w[1] == Approx(2.0 / 3));
    CHECK(w[2] == Approx(1.0 / 6));
  }
  SUBCASE("tiny theta approaches Ising") {
    const auto w = weights(blume_capel_measure(1e-9));
    CHECK(w[0] == Approx(0.5));
    CHECK(w[1] == Approx(1e-9).epsilon(1e-6));
  }
  SUBCASE("bad theta") {
    CHECK_THROWS(blume_capel_measure(0.0));
    CHECK_THROWS(blume_capel_measure(-1.0));
  }
  CHECK(blume_capel_measure(1.7).theta() == Approx(1.7));
  CHECK(blume_capel_measure(1.7).kind() == MeasureKind::BlumeCapel);
}

TEST_CASE("theta_from_delta") {
  CHECK(theta_from_delta(1.0, 0.0) == 0.5);
  CHECK(theta_from_delta(1.0, std::numbers::ln2) == Approx(1.0));
  CHECK(theta_from_delta(2.0, 1.0) == Approx(3.69452804946532511));
  CHECK_THROWS(theta_from_delta(0.0, 1.0));
}

TEST_CASE("dilute_measure") {
  const SpinMeasure pure = dilute_measure(0.0);
  CHECK(pure.atom_count() == 2);
  CHECK(weights(pure) == std::vector<double>{0.5, 0.5});
  CHECK(dilute_measure(1.0 / 3).theta() == Approx(0.5));
  CHECK(dilute_measure(2.0 / 3).theta() == Approx(2.0));
  CHECK(dilute_measure(0.25).kind() == MeasureKind::Dilute);
  CHECK(dilute_measure(0.25).parameter() == 0.75);
  CHECK_THROWS(dilute_measure(1.0));
  CHECK_THROWS(dilute_measure(-0.1));
  CHECK(theta_from_q(0.6) == Approx(1.5));
  CHECK(q_from_theta(1.5) == Approx(0.6));
}

TEST_CASE("property: dilute and Blume-Capel atoms coincide") {
  for (double q = 0.05; q < 0.99; q += 0.07) {
    const SpinMeasure d = dilute_measure(q);
    const SpinMeasure b = blume_capel_measure(q / (1 - q));
    REQUIRE(d.atom_count() == b.atom_count());
    for (std::size_t i = 0; i < d.atom_count(); ++i) {
      CHECK(d.atoms()[i].position == b.atoms()[i].position);
      CHECK(d.atoms()[i].weight == Approx(b.atoms()[i].weight).epsilon(1e-14));
    }
  }
}

TEST_CASE("SpinMeasure validation") {
  CHECK_THROWS(SpinMeasure({}, MeasureKind::Ising));
  CHECK_THROWS(SpinMeasure({{-1, 0.4}, {1, 0.5}}, MeasureKind::Ising));   // mass
  CHECK_THROWS(SpinMeasure({{-1, 0.3}, {1, 0.7}}, MeasureKind::Ising));   // asymmetric
  CHECK_THROWS(SpinMeasure({{-0.3, 0.5}, {0.3, 0.5}}, MeasureKind::Ising));
  CHECK_NOTHROW(SpinMeasure({{-0.5, 0.5}, {0.5, 0.5}}, MeasureKind::Ising));
  CHECK(ising_measure().theta() == 0.0);
}

TEST_CASE("CouplingMatrix validation") {
  CHECK_THROWS(CouplingMatrix(2, {1, 1, 1, 0}));        // diagonal
  CHECK_THROWS(CouplingMatrix(2, {0, 1, 2, 0}));        // asymmetric
  CHECK_THROWS(CouplingMatrix(2, {0, -1, -1, 0}));      // antiferromagnetic
  CHECK_THROWS(CouplingMatrix(2, {0, 1, 1}));           // size
  CHECK_THROWS(CouplingMatrix(0));
  const CouplingMatrix K(3, {0, 1, 2, 1, 0, 0, 2, 0, 0});
  CHECK(K.max_entry() == 2.0);
  CHECK(K.with_entry(1, 2, 5.0)(2, 1) == 5.0);
  CHECK(K.scaled(0.5)(0, 2) == 1.0);
  CHECK(CouplingMatrix(3).is_zero());
}

TEST_CASE("coupling_chain") {
  const CouplingMatrix two = coupling_chain(2, 1.0, false);
  CHECK(two == CouplingMatrix(2, {0, 1, 1, 0}));
  const CouplingMatrix four = coupling_chain(4, 0.5, false);
  CHECK(four(0, 1) == 0.5);
  CHECK(four(2, 3) == 0.5);
  CHECK(four(0, 3) == 0.0);
  const auto [found, kappa] = oracle::exhaustive_bottleneck(
      std::vector<double>(four.entries().begin(), four.entries().end()), 4);
  CHECK(found);
  CHECK(kappa == 0.5);
  CHECK(coupling_chain(4, 0.5, true)(0, 3) == 0.5);
  CHECK_FALSE(analyze_structure(coupling_chain(3, 1.0, false)).has_perfect_matching);
  CHECK_THROWS(coupling_chain(1, 1.0, false));
  CHECK_THROWS(coupling_chain(3, 0.0, false));
}

TEST_CASE("coupling_hierarchical") {
  SUBCASE("one level") {
    const CouplingMatrix K = coupling_hierarchical({{0.7}, {}});
    CHECK(K == CouplingMatrix(2, {0, 0.7, 0.7, 0}));
  }
  SUBCASE("two levels") {
    const double a = 2.0;
    const double b = 0.5;
    const CouplingMatrix K = coupling_hierarchical({{a, b}, {}});
    const std::vector<double> expected{0, a, b, b,  //
                                       a, 0, b, b,  //
                                       b, b, 0, a,  //
                                       b, b, a, 0};
    CHECK(K == CouplingMatrix(4, expected));
    const auto ii = pair_partition_condition_ii(K);
    REQUIRE(ii.has_value());
    CHECK(satisfies_condition_ii(K, *ii));
  }
  SUBCASE("relabel permutes sites") {
    const CouplingMatrix K = coupling_hierarchical({{1.0, 0.25}, {0, 2, 1, 3}});
    CHECK(K(0, 2) == 1.0);
    CHECK(K(1, 3) == 1.0);
    CHECK(K(0, 1) == 0.25);
  }
  SUBCASE("invalid specs") {
    CHECK_THROWS(coupling_hierarchical({{}, {}}));
    CHECK_THROWS(coupling_hierarchical({{1.0, 0.0}, {}}));
    CHECK_THROWS(coupling_hierarchical({{1.0}, {0, 0}}));
    CHECK_THROWS(coupling_hierarchical({{1.0}, {0, 1, 2}}));
  }
}

TEST_CASE("property: hierarchical structure") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t levels = 1 + trial % 3;
    HierarchySpec spec;
    for (std::size_t m = 0; m < levels; ++m) spec.level_couplings.push_back(u(rng));
    const CouplingMatrix K = coupling_hierarchical(spec);
    CHECK(K.size() == spec.site_count());
    const MatchingReport r = analyze_structure(K);
    REQUIRE(r.condition_ii_partition.has_value());
    CHECK(satisfies_condition_ii(K, *r.condition_ii_partition));
    const auto [found, kappa] = oracle::exhaustive_bottleneck(
        std::vector<double>(K.entries().begin(), K.entries().end()), K.size());
    CHECK(found);
    CHECK(r.bottleneck_kappa == kappa);
    const double top = *std::max_element(spec.level_couplings.begin(), spec.level_couplings.end());
    if (spec.level_couplings[0] >= top) CHECK(r.bottleneck_kappa == spec.level_couplings[0]);
  }
}

TEST_CASE("coupling_curie_weiss") {
  const CouplingMatrix K = coupling_curie_weiss(4, 0.3);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) CHECK(K(i, j) == (i == j ? 0.0 : 0.3));
}
