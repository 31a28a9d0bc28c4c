#pragma once

#include <Eigen/Dense>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hetop/aggregate.hpp"
#include "hetop/errors.hpp"
#include "hetop/types.hpp"

// CSV interchange for count tables and case records.
//   count CSV: header `group,weight,cat_0,...,cat_K`, real-valued cells
//   case CSV:  header `group,response[,weight]`; missing response is an
//              empty field or the configured sentinel
// Reals are written with 17 significant digits so a write/read round trip
// reproduces every double exactly.

namespace hetop {

inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

inline double parse_double(const std::string& text, long row, const char* what) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    throw data_error(std::string("row ") + std::to_string(row) + ": cannot parse " + what +
                     " '" + text + "'");
  return value;
}

inline long parse_long(const std::string& text, long row, const char* what) {
  long value = 0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    throw data_error(std::string("row ") + std::to_string(row) + ": cannot parse " + what +
                     " '" + text + "'");
  return value;
}

inline void check_label(const std::string& label) {
  if (label.find(',') != std::string::npos)
    throw data_error("group label '" + label + "' contains a comma");
}

}  // namespace detail

inline std::string count_csv_string(const CategoryCountTable& table) {
  std::string out = "group,weight";
  for (Eigen::Index k = 0; k < table.n_categories(); ++k)
    out += ",cat_" + std::to_string(k);
  out += "\n";
  for (Eigen::Index g = 0; g < table.n_groups(); ++g) {
    detail::check_label(table.group_labels[g]);
    out += table.group_labels[g];
    out += ',' + format_double(table.group_weights[g]);
    for (Eigen::Index k = 0; k < table.n_categories(); ++k)
      out += ',' + format_double(table.counts(g, k));
    out += '\n';
  }
  return out;
}

inline CategoryCountTable read_count_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw data_error("empty count file");
  const auto header = detail::split_csv_line(line);
  if (header.size() < 4 || header[0] != "group" || header[1] != "weight")
    throw data_error("count file header must be group,weight,cat_0,...");
  for (std::size_t k = 2; k < header.size(); ++k)
    if (header[k] != "cat_" + std::to_string(k - 2))
      throw data_error("unexpected count column '" + header[k] + "'");
  const std::size_t n_cat = header.size() - 2;

  std::vector<std::string> labels;
  std::vector<double> weights;
  std::vector<double> cells;
  long row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != header.size())
      throw data_error("row " + std::to_string(row) + ": expected " +
                       std::to_string(header.size()) + " fields, got " +
                       std::to_string(fields.size()));
    labels.push_back(fields[0]);
    weights.push_back(detail::parse_double(fields[1], row, "weight"));
    for (std::size_t k = 2; k < fields.size(); ++k)
      cells.push_back(detail::parse_double(fields[k], row, "count"));
  }
  if (labels.empty()) throw data_error("count file has no data rows");

  const Eigen::Index g_count = static_cast<Eigen::Index>(labels.size());
  Eigen::MatrixXd counts(g_count, static_cast<Eigen::Index>(n_cat));
  for (Eigen::Index g = 0; g < g_count; ++g)
    for (Eigen::Index k = 0; k < counts.cols(); ++k)
      counts(g, k) = cells[static_cast<std::size_t>(g) * n_cat + static_cast<std::size_t>(k)];
  Eigen::VectorXd w = Eigen::Map<Eigen::VectorXd>(weights.data(), g_count);
  return CategoryCountTable(std::move(labels), std::move(counts), std::move(w));
}

inline std::string case_csv_string(const std::vector<CaseRecord>& cases,
                                   const std::string& missing_sentinel = "") {
  std::string out = "group,response,weight\n";
  for (const CaseRecord& c : cases) {
    detail::check_label(c.group);
    out += c.group;
    out += ',';
    out += c.response ? std::to_string(*c.response) : missing_sentinel;
    out += ',' + format_double(c.weight) + '\n';
  }
  return out;
}

// Accepts `group,response` or `group,response,weight`; a missing response is
// an empty field or the sentinel (compared verbatim).
inline std::vector<CaseRecord> read_case_csv(std::istream& in,
                                             const std::string& missing_sentinel = "NA") {
  std::string line;
  if (!std::getline(in, line)) throw data_error("empty case file");
  const auto header = detail::split_csv_line(line);
  const bool has_weight = header.size() == 3 && header[2] == "weight";
  if (!(header.size() == 2 || has_weight) || header[0] != "group" || header[1] != "response")
    throw data_error("case file header must be group,response[,weight]");

  std::vector<CaseRecord> cases;
  long row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != header.size())
      throw data_error("row " + std::to_string(row) + ": expected " +
                       std::to_string(header.size()) + " fields");
    CaseRecord c;
    c.group = fields[0];
    if (!fields[1].empty() && fields[1] != missing_sentinel) {
      const long value = detail::parse_long(fields[1], row, "response");
      if (value < 0)
        throw data_error("row " + std::to_string(row) + ": negative response category");
      c.response = static_cast<Eigen::Index>(value);
    }
    if (has_weight) {
      c.weight = detail::parse_double(fields[2], row, "weight");
      if (!(c.weight > 0.0))
        throw data_error("row " + std::to_string(row) + ": weight must be positive");
    }
    cases.push_back(std::move(c));
  }
  if (cases.empty()) throw data_error("case file has no data rows");
  return cases;
}

}  // namespace hetop
