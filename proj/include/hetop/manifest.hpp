#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace hetop {

inline constexpr const char* tool_version = "0.1.0";

// Everything needed to reproduce an output file exactly: the subcommand, its
// options in a fixed order, and the input paths as given on the command
// line. Embedded in JSON outputs and written as a `<file>.manifest.json`
// sidecar next to CSV/SVG outputs.
struct RunManifest {
  std::string command;
  std::vector<std::pair<std::string, std::string>> options;
  std::vector<std::string> inputs;

  void add(const std::string& key, const std::string& value) { options.emplace_back(key, value); }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["tool"] = "hetop";
    j["version"] = tool_version;
    j["command"] = command;
    nlohmann::ordered_json opts;
    for (const auto& [key, value] : options) opts[key] = value;
    j["options"] = opts;
    j["inputs"] = inputs;
    return j;
  }
};

}  // namespace hetop
