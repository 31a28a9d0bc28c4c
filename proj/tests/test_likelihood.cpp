#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "hetop/likelihood.hpp"
#include "hetop/normal.hpp"
#include "test_helpers.hpp"

using namespace hetop;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("normal CDF and quantile against reference values") {
  // mpmath, 30 digits
  CHECK_THAT(norm_cdf(0.255), WithinAbs(0.600638450384382523, 1e-15));
  CHECK_THAT(norm_cdf(-1.0), WithinAbs(0.158655253931457051, 1e-15));
  CHECK_THAT(norm_cdf(0.0), WithinAbs(0.5, 1e-16));
  CHECK_THAT(norm_interval_prob(-2.0, 2.0), WithinAbs(0.954499736103641586, 1e-15));
  CHECK_THAT(norm_quantile(0.6), WithinAbs(0.253347103135799799, 1e-15));
  CHECK_THAT(norm_quantile(0.5), WithinAbs(0.0, 1e-16));

  for (double p : {1e-12, 1e-4, 0.025, 0.31, 0.77, 0.975, 1.0 - 1e-9}) {
    CHECK_THAT(norm_cdf(norm_quantile(p)), WithinRel(p, 1e-13));
  }
  CHECK_THROWS_AS(norm_quantile(-0.1), std::domain_error);
}

TEST_CASE("category_prob examples") {
  Eigen::VectorXd tau1 = Eigen::VectorXd::Zero(1);
  CHECK_THAT(category_prob(0.0, 1.0, tau1, 1), WithinAbs(0.5, 1e-15));
  CHECK_THAT(category_prob(0.255, 1.0, tau1, 1), WithinAbs(0.600638450384382523, 1e-15));

  Eigen::VectorXd tau2(2);
  tau2 << -1.0, 1.0;
  CHECK_THAT(category_prob(0.0, 2.0, tau2, 1), WithinAbs(0.954499736103641586, 1e-15));

  CHECK_THROWS_AS(category_prob(0.0, 1.0, tau1, 2), std::out_of_range);
  CHECK_THROWS_AS(category_prob(0.0, 1.0, tau1, -1), std::out_of_range);
}

TEST_CASE("all_category_probs sums to one and matches closed forms") {
  GroupParams p;
  p.mu = Eigen::Vector2d(0.0, 0.0);
  p.log_scale = Eigen::Vector2d(0.0, 0.0);
  p.thresholds = Eigen::VectorXd::Zero(1);
  Eigen::VectorXd probs = all_category_probs(p, 0);
  CHECK_THAT(probs[0], WithinAbs(0.5, 1e-15));
  CHECK_THAT(probs[1], WithinAbs(0.5, 1e-15));

  p.thresholds = Eigen::Vector2d(-1.0, 1.0);
  probs = all_category_probs(p, 0);
  CHECK_THAT(probs[0], WithinAbs(0.158655253931457051, 1e-15));
  CHECK_THAT(probs[1], WithinAbs(0.682689492137085897, 1e-15));
  CHECK_THAT(probs[2], WithinAbs(0.158655253931457051, 1e-15));

  std::mt19937_64 rng(99);
  for (int rep = 0; rep < 500; ++rep) {
    const Eigen::Index g_count = 2 + static_cast<Eigen::Index>(rng() % 4);
    const Eigen::Index k_count = 1 + static_cast<Eigen::Index>(rng() % 6);
    const GroupParams q = hetop_test::random_params(rng, g_count, k_count);
    for (Eigen::Index g = 0; g < g_count; ++g) {
      const Eigen::VectorXd pr = all_category_probs(q, g);
      CHECK(pr.minCoeff() >= 0.0);
      CHECK_THAT(pr.sum(), WithinAbs(1.0, 1e-12));
      // cumulative Pr(Y <= k) nondecreasing
      double cum = 0.0, prev = 0.0;
      for (Eigen::Index k = 0; k < pr.size(); ++k) {
        cum += pr[k];
        CHECK(cum >= prev - 1e-15);
        prev = cum;
      }
    }
  }
}

TEST_CASE("normal-ogive form for a binary item") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> mu_dist(-2.0, 2.0);
  std::uniform_real_distribution<double> gamma_dist(-1.0, 1.0);
  std::uniform_real_distribution<double> tau_dist(-1.5, 1.5);
  for (int rep = 0; rep < 1000; ++rep) {
    const double mu = mu_dist(rng);
    const double lambda = std::exp(-gamma_dist(rng));
    Eigen::VectorXd tau(1);
    tau << tau_dist(rng);
    // k = 1 must be exactly Phi(lambda (mu - tau_1))
    CHECK(category_prob(mu, lambda, tau, 1) == norm_cdf(lambda * (mu - tau[0])));
  }
}

TEST_CASE("grouped_loglik closed-form cases") {
  GroupParams p;
  p.mu = Eigen::Vector2d(0.0, 0.0);
  p.log_scale = Eigen::Vector2d(0.0, 0.0);
  p.thresholds = Eigen::VectorXd::Zero(1);

  Eigen::MatrixXd counts(2, 2);
  counts << 5, 5, 5, 5;
  const CategoryCountTable table({"a", "b"}, counts);
  // per group: 10 * ln(0.5)
  CHECK_THAT(grouped_loglik(table, p), WithinAbs(2.0 * -6.93147180559945309, 1e-12));

  Eigen::MatrixXd skew(2, 2);
  skew << 8, 2, 8, 2;
  const CategoryCountTable table2({"a", "b"}, skew);
  CHECK_THAT(grouped_loglik(table2, p), WithinAbs(2.0 * -6.93147180559945309, 1e-12));

  // weights scale group terms
  const CategoryCountTable weighted({"a", "b"}, counts, Eigen::Vector2d(2.0, 1.0));
  CHECK_THAT(grouped_loglik(weighted, p), WithinAbs(3.0 * -6.93147180559945309, 1e-12));
}

TEST_CASE("grouped_loglik is permutation invariant and never NaN") {
  std::mt19937_64 rng(11);
  const CategoryCountTable table = hetop_test::random_table(rng, 4, 3);
  const GroupParams p = hetop_test::random_params(rng, 4, 3);

  std::vector<Eigen::Index> perm = {2, 0, 3, 1};
  Eigen::MatrixXd counts(4, 4);
  Eigen::VectorXd weights(4);
  std::vector<std::string> labels(4);
  GroupParams q = p;
  for (Eigen::Index g = 0; g < 4; ++g) {
    counts.row(g) = table.counts.row(perm[g]);
    weights[g] = table.group_weights[perm[g]];
    labels[g] = table.group_labels[perm[g]];
    q.mu[g] = p.mu[perm[g]];
    q.log_scale[g] = p.log_scale[perm[g]];
  }
  const CategoryCountTable permuted(labels, counts, weights);
  CHECK_THAT(grouped_loglik(permuted, q), WithinRel(grouped_loglik(table, p), 1e-14));

  // far-tail parameters: clamped, finite
  GroupParams extreme = p;
  extreme.mu.setConstant(40.0);
  const double value = grouped_loglik(table, extreme);
  CHECK(std::isfinite(value));
  CHECK(value <= 0.0);
}

TEST_CASE("multinomial_constant examples") {
  Eigen::MatrixXd counts(2, 2);
  counts << 5, 5, 3, 0;
  const CategoryCountTable table({"a", "b"}, counts);
  // ln C(10,5) + ln 1
  CHECK_THAT(multinomial_constant(table), WithinAbs(5.52942908751142331, 1e-12));

  Eigen::MatrixXd three(2, 3);
  three << 1, 1, 1, 2, 0, 0;
  const CategoryCountTable table3({"a", "b"}, three);
  // ln 3! + ln 1
  CHECK_THAT(multinomial_constant(table3), WithinAbs(1.79175946922805500, 1e-12));
}

TEST_CASE("analytic gradient matches central finite differences") {
  std::mt19937_64 rng(20250501);
  double worst = 0.0;
  for (int rep = 0; rep < 120; ++rep) {
    const Eigen::Index g_count = 2 + static_cast<Eigen::Index>(rng() % 3);
    const Eigen::Index k_count = 1 + static_cast<Eigen::Index>(rng() % 3);
    const IdentificationScheme scheme = (rep % 2 == 0)
                                            ? IdentificationScheme::sum_to_zero()
                                            : IdentificationScheme::reference_group(0);
    const CategoryCountTable table = hetop_test::random_table(rng, g_count, k_count);
    const GroupParams p = hetop_test::random_identified_params(rng, g_count, k_count, scheme);
    const FreeParameterVector v = pack(p, scheme);

    const Eigen::VectorXd analytic = loglik_gradient(table, v, scheme);
    const Eigen::VectorXd numeric = hetop_test::finite_difference_gradient(
        [&](const Eigen::VectorXd& w) {
          return grouped_loglik(table, unpack(w, scheme, g_count, k_count));
        },
        v);
    const double rel = (analytic - numeric).cwiseAbs().maxCoeff() /
                       std::max(1.0, numeric.cwiseAbs().maxCoeff());
    worst = std::max(worst, rel);
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("mu-gradient antisymmetric for mirrored two-group table") {
  Eigen::MatrixXd counts(2, 3);
  counts << 30, 50, 20, 20, 50, 30;  // group 2 mirrors group 1
  const CategoryCountTable table({"a", "b"}, counts);

  GroupParams p;
  p.mu = Eigen::Vector2d(0.0, 0.0);
  p.log_scale = Eigen::Vector2d(0.0, 0.0);
  p.thresholds = Eigen::Vector2d(-0.6, 0.6);  // symmetric thresholds
  const auto nat = detail::loglik_natural_gradient(table, p);
  CHECK_THAT(nat.d_mu[0], WithinAbs(-nat.d_mu[1], 1e-10));
}
