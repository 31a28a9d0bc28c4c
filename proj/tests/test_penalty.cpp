#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "hetop/penalty.hpp"
#include "test_helpers.hpp"

using namespace hetop;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("pair_penalty closed forms") {
  PenaltySpec ridge{PenaltyKind::ridge, 1.0, 0.0};
  CHECK_THAT(pair_penalty(1.0, -1.0, ridge), WithinAbs(4.0, 1e-15));

  PenaltySpec lasso{PenaltyKind::lasso, 1.0, 1e-4};
  CHECK_THAT(pair_penalty(0.7, 0.7, lasso), WithinAbs(0.01, 1e-15));

  PenaltySpec alignment{PenaltyKind::alignment, 1.0, 1e-4};
  CHECK_THAT(pair_penalty(0.25, 0.0, alignment), WithinAbs(0.500099990001999500, 1e-15));
}

TEST_CASE("total_penalty over ordered pairs") {
  Eigen::Vector2d theta(1.0, -1.0);
  PenaltySpec ridge{PenaltyKind::ridge, 1.0, 0.0};
  CHECK_THAT(total_penalty(theta, ridge).value, WithinAbs(8.0, 1e-12));

  ridge.nu = 4.0;
  CHECK_THAT(total_penalty(theta, ridge).value, WithinAbs(2.0, 1e-12));

  // equal values: zero for every kind with epsilon = 0
  Eigen::Vector3d equal(0.4, 0.4, 0.4);
  for (PenaltyKind kind : {PenaltyKind::ridge, PenaltyKind::lasso, PenaltyKind::alignment}) {
    PenaltySpec spec{kind, 2.0, kind == PenaltyKind::ridge ? 0.0 : 1e-12};
    CHECK_THAT(total_penalty(equal, spec).value,
               WithinAbs(kind == PenaltyKind::ridge ? 0.0 : 6.0 * 1e-6, 1e-9));
  }

  CHECK_THROWS_AS(total_penalty(Eigen::VectorXd::Zero(1), ridge), data_error);
}

TEST_CASE("penalty spec validation") {
  PenaltySpec bad{PenaltyKind::lasso, 1.0, 0.0};
  CHECK_THROWS_AS(bad.validate(), data_error);
  bad = {PenaltyKind::ridge, 0.0, 0.0};
  CHECK_THROWS_AS(bad.validate(), data_error);
  CHECK_NOTHROW(PenaltySpec{PenaltyKind::ridge, 1.0, 0.0}.validate());
}

TEST_CASE("total_penalty invariances") {
  std::mt19937_64 rng(5150);
  std::uniform_real_distribution<double> entry(-2.0, 2.0);
  for (PenaltyKind kind : {PenaltyKind::ridge, PenaltyKind::lasso, PenaltyKind::alignment}) {
    PenaltySpec spec{kind, 0.7, 1e-4};
    Eigen::VectorXd theta(5);
    for (Eigen::Index i = 0; i < 5; ++i) theta[i] = entry(rng);
    const double base = total_penalty(theta, spec).value;

    // permutation symmetry
    Eigen::VectorXd shuffled(5);
    shuffled << theta[3], theta[0], theta[4], theta[1], theta[2];
    CHECK_THAT(total_penalty(shuffled, spec).value, WithinRel(base, 1e-13));

    // shift invariance: depends only on differences
    CHECK_THAT(total_penalty(theta.array() + 3.21, spec).value, WithinRel(base, 1e-10));

    // exact 1/nu scaling
    PenaltySpec twice = spec;
    twice.nu = 2.0 * spec.nu;
    CHECK_THAT(total_penalty(theta, twice).value, WithinRel(0.5 * base, 1e-13));
  }
}

TEST_CASE("per-pair diagnostics sum to the total") {
  Eigen::Vector4d theta(0.3, -0.8, 0.1, 0.4);
  PenaltySpec spec{PenaltyKind::alignment, 1.7, 1e-4};
  const PenaltyValue v = total_penalty(theta, spec, true);
  REQUIRE(v.per_pair.has_value());
  CHECK_THAT(v.per_pair->sum(), WithinRel(v.value, 1e-13));
  CHECK(v.per_pair->diagonal().isZero(0));
}

TEST_CASE("penalty_gradient closed form and finite differences") {
  PenaltySpec ridge{PenaltyKind::ridge, 1.0, 0.0};
  Eigen::Vector2d theta(1.0, -1.0);
  const Eigen::VectorXd grad = penalty_gradient(theta, ridge);
  CHECK_THAT(grad[0], WithinAbs(8.0, 1e-12));
  CHECK_THAT(grad[1], WithinAbs(-8.0, 1e-12));

  CHECK(penalty_gradient(Eigen::Vector3d(0.2, 0.2, 0.2), ridge).isZero(1e-14));

  std::mt19937_64 rng(8080);
  std::uniform_real_distribution<double> entry(-1.0, 1.0);
  for (PenaltyKind kind : {PenaltyKind::ridge, PenaltyKind::lasso, PenaltyKind::alignment}) {
    PenaltySpec spec{kind, 0.9, 1e-4};
    for (int rep = 0; rep < 50; ++rep) {
      Eigen::VectorXd point(4);
      for (Eigen::Index i = 0; i < 4; ++i) point[i] = entry(rng);
      // keep clear of the alignment kink relative to the FD step
      bool near_tie = false;
      for (Eigen::Index a = 0; a < 4; ++a)
        for (Eigen::Index b = a + 1; b < 4; ++b)
          if (std::abs(point[a] - point[b]) < 1e-3) near_tie = true;
      if (near_tie) continue;

      const Eigen::VectorXd analytic = penalty_gradient(point, spec);
      const Eigen::VectorXd numeric = hetop_test::finite_difference_gradient(
          [&](const Eigen::VectorXd& w) { return total_penalty(w, spec).value; }, point, 1e-6);
      const double rel = (analytic - numeric).cwiseAbs().maxCoeff() /
                         std::max(1.0, numeric.cwiseAbs().maxCoeff());
      CHECK(rel < 1e-6);
    }
  }
}

TEST_CASE("penalty_proportion convention") {
  // loglik -100, penalties 4 + 1: proportion against |penalized objective| = 105
  CHECK_THAT(penalty_proportion(-100.0, 4.0, 1.0), WithinAbs(5.0 / 105.0, 1e-15));
  CHECK_THAT(penalty_proportion(-50.0, 0.0, 0.0), WithinAbs(0.0, 1e-15));
  CHECK(std::isnan(penalty_proportion(0.0, 0.0, 0.0)));

  CHECK(penalty_proportion_warning(0.12));
  CHECK_FALSE(penalty_proportion_warning(0.05));
  CHECK_FALSE(penalty_proportion_warning(std::numeric_limits<double>::quiet_NaN()));
}
