#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hetop/errors.hpp"
#include "hetop/types.hpp"

// Case-level records and their aggregation into a weighted count table.
// Groups are ordered lexicographically by label so the table is invariant to
// any permutation of the case stream.

namespace hetop {

struct CaseRecord {
  std::string group;
  std::optional<Eigen::Index> response;  // empty = missing
  double weight = 1.0;
};

struct AggregateResult {
  CategoryCountTable table;
  long dropped_cases = 0;       // missing responses when missing_as_category is off
  double dropped_weight = 0.0;
  bool has_missing_category = false;  // the last column holds the missing mass
};

inline AggregateResult aggregate(const std::vector<CaseRecord>& cases,
                                 bool missing_as_category = false) {
  if (cases.empty()) throw data_error("no cases to aggregate");

  Eigen::Index max_category = -1;
  std::map<std::string, Eigen::Index> group_index;  // ordered by label
  for (const CaseRecord& c : cases) {
    if (!(c.weight > 0.0)) throw data_error("case weight must be positive");
    if (c.response) {
      if (*c.response < 0) throw data_error("negative response category");
      max_category = std::max(max_category, *c.response);
    }
    group_index.emplace(c.group, 0);
  }
  if (max_category < 0) throw data_error("all responses are missing");

  Eigen::Index next = 0;
  for (auto& [label, index] : group_index) index = next++;
  const Eigen::Index g_count = static_cast<Eigen::Index>(group_index.size());
  const Eigen::Index n_cat = max_category + 1 + (missing_as_category ? 1 : 0);

  AggregateResult out;
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(g_count, n_cat);
  for (const CaseRecord& c : cases) {
    const Eigen::Index g = group_index.at(c.group);
    if (c.response) {
      counts(g, *c.response) += c.weight;
    } else if (missing_as_category) {
      counts(g, n_cat - 1) += c.weight;
    } else {
      ++out.dropped_cases;
      out.dropped_weight += c.weight;
    }
  }

  std::vector<std::string> labels;
  for (const auto& [label, index] : group_index) labels.push_back(label);
  for (Eigen::Index g = 0; g < g_count; ++g)
    if (!(counts.row(g).sum() > 0.0))
      throw data_error("group '" + labels[g] + "' has zero total weight after aggregation");

  out.has_missing_category = missing_as_category;
  out.table = CategoryCountTable(std::move(labels), std::move(counts));
  return out;
}

// What to do with empty cells before estimation. The likelihood itself
// tolerates zero cells, but the grouped form assumes none, so the choice is
// surfaced rather than silently applied.
enum class EmptyCellPolicy { error, merge_adjacent, add_half };

inline const char* to_string(EmptyCellPolicy p) {
  switch (p) {
    case EmptyCellPolicy::error: return "error";
    case EmptyCellPolicy::merge_adjacent: return "merge-adjacent";
    case EmptyCellPolicy::add_half: return "add-half";
  }
  return "?";
}

inline CategoryCountTable apply_empty_cell_policy(const CategoryCountTable& table,
                                                  EmptyCellPolicy policy) {
  auto first_empty_column = [](const Eigen::MatrixXd& counts) -> Eigen::Index {
    for (Eigen::Index k = 0; k < counts.cols(); ++k)
      for (Eigen::Index g = 0; g < counts.rows(); ++g)
        if (counts(g, k) == 0.0) return k;
    return -1;
  };

  switch (policy) {
    case EmptyCellPolicy::error: {
      for (Eigen::Index g = 0; g < table.n_groups(); ++g)
        for (Eigen::Index k = 0; k < table.n_categories(); ++k)
          if (table.counts(g, k) == 0.0)
            throw data_error("empty cell in group '" + table.group_labels[g] + "', category " +
                             std::to_string(k) +
                             " (choose an empty-cell policy to proceed)");
      return table;
    }
    case EmptyCellPolicy::add_half: {
      Eigen::MatrixXd counts = table.counts;
      for (Eigen::Index g = 0; g < counts.rows(); ++g)
        for (Eigen::Index k = 0; k < counts.cols(); ++k)
          if (counts(g, k) == 0.0) counts(g, k) = 0.5;
      return CategoryCountTable(table.group_labels, std::move(counts), table.group_weights);
    }
    case EmptyCellPolicy::merge_adjacent: {
      // Merge any category column containing an empty cell into its right
      // neighbor (left neighbor for the last column) until none remain.
      Eigen::MatrixXd counts = table.counts;
      Eigen::Index k = first_empty_column(counts);
      while (k >= 0) {
        if (counts.cols() <= 2)
          throw data_error("merge-adjacent exhausted the categories; data too sparse");
        const Eigen::Index keep = (k < counts.cols() - 1) ? k + 1 : k - 1;
        Eigen::MatrixXd merged(counts.rows(), counts.cols() - 1);
        Eigen::Index out_col = 0;
        for (Eigen::Index c = 0; c < counts.cols(); ++c) {
          if (c == k) continue;
          merged.col(out_col) = counts.col(c);
          if (c == keep) merged.col(out_col) += counts.col(k);
          ++out_col;
        }
        counts = std::move(merged);
        k = first_empty_column(counts);
      }
      return CategoryCountTable(table.group_labels, std::move(counts), table.group_weights);
    }
  }
  throw data_error("unknown empty-cell policy");
}

}  // namespace hetop
