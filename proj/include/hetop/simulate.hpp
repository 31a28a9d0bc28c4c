#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "hetop/errors.hpp"
#include "hetop/estimator.hpp"
#include "hetop/normal.hpp"
#include "hetop/types.hpp"

// Synthetic single-item data with known group parameters.
//
// The draw procedure is pinned so any implementation can reproduce a table
// bit-exactly from the seed:
//   * group g (0-based) uses a std::mt19937_64 engine seeded with the
//     (g+1)-th output of the splitmix64 sequence started at the master seed;
//   * each 64-bit draw x becomes the open-interval uniform
//     u = ((x >> 11) + 0.5) / 2^53;
//   * the latent response is y = mu_g + sigma_g * PhiInv(u) and the category
//     is the number of thresholds strictly below y.

namespace hetop {

namespace detail {

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t group_stream_seed(std::uint64_t master_seed, Eigen::Index group) {
  std::uint64_t state = master_seed;
  std::uint64_t out = 0;
  for (Eigen::Index i = 0; i <= group; ++i) out = splitmix64_next(state);
  return out;
}

inline double uniform_open(std::mt19937_64& engine) {
  return (static_cast<double>(engine() >> 11) + 0.5) * 0x1.0p-53;
}

inline Eigen::Index draw_category(double u, double mu, double sigma,
                                  const Eigen::VectorXd& thresholds) {
  const double latent = mu + sigma * norm_quantile(u);
  // Y = k  <=>  tau_k < Y* <= tau_{k+1}: count thresholds strictly below.
  const double* begin = thresholds.data();
  const double* end = begin + thresholds.size();
  return std::lower_bound(begin, end, latent) - begin;
}

}  // namespace detail

inline std::vector<std::string> default_group_labels(Eigen::Index g_count) {
  std::vector<std::string> labels;
  for (Eigen::Index g = 0; g < g_count; ++g) labels.push_back("g" + std::to_string(g + 1));
  return labels;
}

inline CategoryCountTable generate(const GroupParams& params,
                                   const std::vector<long>& group_sizes, std::uint64_t seed,
                                   std::vector<std::string> labels = {}) {
  params.validate();
  const Eigen::Index g_count = params.n_groups();
  if (static_cast<Eigen::Index>(group_sizes.size()) != g_count)
    throw data_error("group size count does not match parameter groups");
  for (long n : group_sizes)
    if (n <= 0) throw data_error("group sizes must be positive");
  if (labels.empty()) labels = default_group_labels(g_count);

  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(g_count, params.n_thresholds() + 1);
  for (Eigen::Index g = 0; g < g_count; ++g) {
    std::mt19937_64 engine(detail::group_stream_seed(seed, g));
    const double mu = params.mu[g];
    const double sigma = params.sigma(g);
    for (long i = 0; i < group_sizes[g]; ++i) {
      const Eigen::Index k =
          detail::draw_category(detail::uniform_open(engine), mu, sigma, params.thresholds);
      counts(g, k) += 1.0;
    }
  }
  return CategoryCountTable(std::move(labels), std::move(counts));
}

// Same draws as generate(), emitted one case per row.
struct SimulatedCase {
  Eigen::Index group;
  Eigen::Index response;
};

inline std::vector<SimulatedCase> generate_cases(const GroupParams& params,
                                                 const std::vector<long>& group_sizes,
                                                 std::uint64_t seed) {
  params.validate();
  const Eigen::Index g_count = params.n_groups();
  if (static_cast<Eigen::Index>(group_sizes.size()) != g_count)
    throw data_error("group size count does not match parameter groups");

  std::vector<SimulatedCase> cases;
  for (Eigen::Index g = 0; g < g_count; ++g) {
    std::mt19937_64 engine(detail::group_stream_seed(seed, g));
    const double mu = params.mu[g];
    const double sigma = params.sigma(g);
    for (long i = 0; i < group_sizes[g]; ++i)
      cases.push_back({g, detail::draw_category(detail::uniform_open(engine), mu, sigma,
                                                params.thresholds)});
  }
  return cases;
}

// Probit method-of-moments estimates with known thresholds: for each group,
// the least-squares line tau_k = mu + sigma * PhiInv(Pr(Y <= k-1)) through
// the interior cumulative proportions. An independent cross-check on fitted
// group parameters; groups with fewer than two interior proportions are
// marked unavailable.
struct MomentEstimate {
  double mu = 0.0;
  double sigma = 1.0;
  bool available = false;
};

inline std::vector<MomentEstimate> moment_oracle(const CategoryCountTable& table,
                                                 const Eigen::VectorXd& thresholds) {
  table.validate();
  if (thresholds.size() != table.n_thresholds())
    throw data_error("threshold count does not match the table");

  std::vector<MomentEstimate> estimates(table.n_groups());
  for (Eigen::Index g = 0; g < table.n_groups(); ++g) {
    const auto line = detail::probit_line_fit(
        detail::cumulative_proportions(table.counts.row(g)), thresholds);
    if (line.ok) estimates[g] = {line.mu, line.sigma, true};
  }
  return estimates;
}

}  // namespace hetop
