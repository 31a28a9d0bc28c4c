#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "hetop/parameterization.hpp"
#include "hetop/types.hpp"
#include "test_helpers.hpp"

using namespace hetop;
using Catch::Matchers::WithinAbs;

TEST_CASE("table validation rejects bad input") {
  Eigen::MatrixXd counts(2, 2);
  counts << 5, 5, 3, 7;
  CHECK_NOTHROW(CategoryCountTable({"a", "b"}, counts));

  CHECK_THROWS_AS(CategoryCountTable({"a"}, counts.topRows(1)), data_error);  // G >= 2

  Eigen::MatrixXd one_col(2, 1);
  one_col << 5, 5;
  CHECK_THROWS_AS(CategoryCountTable({"a", "b"}, one_col), data_error);  // K >= 1

  Eigen::MatrixXd negative = counts;
  negative(0, 0) = -1.0;
  CHECK_THROWS_AS(CategoryCountTable({"a", "b"}, negative), data_error);

  Eigen::MatrixXd zero_row = counts;
  zero_row.row(1).setZero();
  CHECK_THROWS_AS(CategoryCountTable({"a", "b"}, zero_row), data_error);
}

TEST_CASE("group params validation") {
  GroupParams p;
  p.mu = Eigen::Vector2d(0.1, -0.1);
  p.log_scale = Eigen::Vector2d(0.0, 0.0);
  p.thresholds = Eigen::Vector2d(-1.0, 1.0);
  CHECK_NOTHROW(p.validate());
  CHECK_THAT(p.lambda(0), WithinAbs(1.0, 1e-15));
  CHECK_THAT(p.sigma(1), WithinAbs(1.0, 1e-15));

  p.thresholds = Eigen::Vector2d(1.0, 1.0);  // not strictly increasing
  CHECK_THROWS_AS(p.validate(), data_error);
}

TEST_CASE("pack: sum-to-zero leaves one free mean") {
  GroupParams p;
  p.mu = Eigen::Vector2d(0.5, -0.5);
  p.log_scale = Eigen::Vector2d(0.0, 0.0);
  p.thresholds = Eigen::VectorXd::Zero(1);
  const FreeParameterVector v = pack(p, IdentificationScheme::sum_to_zero());
  REQUIRE(v.size() == 3);
  CHECK_THAT(v[0], WithinAbs(0.5, 1e-15));
  CHECK_THAT(v[1], WithinAbs(0.0, 1e-15));
  CHECK_THAT(v[2], WithinAbs(0.0, 1e-15));
}

TEST_CASE("pack: thresholds map to tau_1 plus log-increments") {
  GroupParams p;
  p.mu = Eigen::Vector2d(0.0, 0.0);
  p.log_scale = Eigen::Vector2d(0.0, 0.0);
  p.thresholds = Eigen::Vector2d(-1.0, 1.0);
  const FreeParameterVector v = pack(p, IdentificationScheme::sum_to_zero());
  REQUIRE(v.size() == 4);
  CHECK_THAT(v[2], WithinAbs(-1.0, 1e-15));
  CHECK_THAT(v[3], WithinAbs(0.69314718055994531, 1e-15));  // ln 2
}

TEST_CASE("pack rejects constraint violations") {
  GroupParams p;
  p.mu = Eigen::Vector2d(0.5, -0.3);  // sums to 0.2
  p.log_scale = Eigen::Vector2d(0.0, 0.0);
  p.thresholds = Eigen::VectorXd::Zero(1);
  CHECK_THROWS_AS(pack(p, IdentificationScheme::sum_to_zero()), constraint_error);

  p.mu = Eigen::Vector2d(0.5, -0.5);
  p.log_scale = Eigen::Vector2d(0.2, -0.2);
  CHECK_THROWS_AS(pack(p, IdentificationScheme::reference_group(0)), constraint_error);
}

TEST_CASE("unpack: negative-sum completion and defaults") {
  FreeParameterVector v(3);
  v << 0.5, 0.0, 0.0;
  const GroupParams p = unpack(v, IdentificationScheme::sum_to_zero(), 2, 1);
  CHECK_THAT(p.mu[0], WithinAbs(0.5, 1e-15));
  CHECK_THAT(p.mu[1], WithinAbs(-0.5, 1e-15));

  FreeParameterVector zeros = FreeParameterVector::Zero(6);  // G=3, K=2
  const GroupParams q = unpack(zeros, IdentificationScheme::sum_to_zero(), 3, 2);
  CHECK(q.mu.isZero(0));
  CHECK(q.log_scale.isZero(0));
  CHECK_THAT(q.thresholds[0], WithinAbs(0.0, 1e-15));
  CHECK_THAT(q.thresholds[1], WithinAbs(1.0, 1e-15));  // 0 + exp(0)
}

TEST_CASE("unpack: reference group pinned at zero") {
  FreeParameterVector v(7);  // G=3, K=1: 2 mu, 2 gamma, 1 tau... (2+2+1=5) -> use K=3
  v << 0.3, -0.2, 0.0, 0.0, -1.0, 0.0, 0.0;  // G=3, K=3
  const GroupParams p = unpack(v, IdentificationScheme::reference_group(0), 3, 3);
  CHECK_THAT(p.mu[0], WithinAbs(0.0, 1e-15));
  CHECK_THAT(p.mu[1], WithinAbs(0.3, 1e-15));
  CHECK_THAT(p.mu[2], WithinAbs(-0.2, 1e-15));
}

TEST_CASE("unpack rejects wrong length") {
  CHECK_THROWS_AS(unpack(FreeParameterVector::Zero(4), IdentificationScheme::sum_to_zero(), 3, 2),
                  data_error);
}

TEST_CASE("pack/unpack round trip on random valid params") {
  std::mt19937_64 rng(20240811);
  for (int rep = 0; rep < 100; ++rep) {
    const Eigen::Index g_count = 2 + static_cast<Eigen::Index>(rng() % 7);
    const Eigen::Index k_count = 1 + static_cast<Eigen::Index>(rng() % 5);
    const IdentificationScheme scheme =
        (rep % 2 == 0) ? IdentificationScheme::sum_to_zero()
                       : IdentificationScheme::reference_group(
                             static_cast<Eigen::Index>(rng() % static_cast<unsigned>(g_count)));
    const GroupParams p = hetop_test::random_identified_params(rng, g_count, k_count, scheme);
    const GroupParams q = unpack(pack(p, scheme), scheme, g_count, k_count);
    CHECK((q.mu - p.mu).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((q.log_scale - p.log_scale).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((q.thresholds - p.thresholds).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("any finite free vector unpacks to valid params") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> entry(-10.0, 10.0);
  for (int rep = 0; rep < 1000; ++rep) {
    const Eigen::Index g_count = 2 + static_cast<Eigen::Index>(rng() % 5);
    const Eigen::Index k_count = 1 + static_cast<Eigen::Index>(rng() % 5);
    FreeParameterVector v(free_parameter_length(g_count, k_count));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = entry(rng);
    const GroupParams p = unpack(v, IdentificationScheme::sum_to_zero(), g_count, k_count);

    CHECK_NOTHROW(p.validate());
    for (Eigen::Index k = 1; k < k_count; ++k) CHECK(p.thresholds[k] > p.thresholds[k - 1]);
    for (Eigen::Index g = 0; g < g_count; ++g) CHECK(p.lambda(g) > 0.0);
    // sum-to-zero completion holds as computed
    CHECK_THAT(p.mu.sum(), WithinAbs(0.0, 1e-10));
    CHECK_THAT(p.log_scale.sum(), WithinAbs(0.0, 1e-10));

    // inverse on the other side; log-increments recovered from differences
    // of large thresholds carry some cancellation, hence the looser bound
    const FreeParameterVector w = pack(p, IdentificationScheme::sum_to_zero());
    CHECK((w - v).cwiseAbs().maxCoeff() < 1e-6);
  }
}
