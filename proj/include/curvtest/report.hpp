#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "curvtest/config.hpp"
#include "curvtest/dataset.hpp"
#include "curvtest/mc.hpp"
#include "curvtest/pipeline.hpp"

namespace curvtest {

// =====================================================================
// Machine-readable report documents.  Field names are frozen: tests
// and downstream tooling key on them.  Layout:
//
//   { "tool", "version", "subcommand",
//     "input":  { "path", "fnv1a64", "n", "q", "tie_fraction" },   (file runs)
//     "config": { ...all defaults resolved... },
//     "result": { ...TestReport / RejectionRow / kernel check... } }
//
// Every numeric field except runtime/wall-clock ones is byte-stable
// for a fixed (input, config, seed).
// =====================================================================

using json = nlohmann::json;

std::uint64_t fnv1a64(const void* bytes, std::size_t len);
std::uint64_t fnv1a64_file(const std::string& path);  // DataError if unreadable
std::string to_hex64(std::uint64_t value);

struct InputInfo {
  std::string path;
  std::string fnv1a64;  // hex checksum of the raw file bytes
  std::int64_t n = 0;
  std::int64_t q = 0;
  double tie_fraction = 0.0;
};

json input_to_json(const InputInfo& info);

// Config serialization keeps the auto/manual mode of each resolvable
// field alongside the resolved value, so a document can be re-executed
// either way: bit-identical full rerun (restore modes) or frozen rerun
// (use resolved values).
json config_to_json(const TestConfig& config,
                    const std::optional<double>& resolved_h_x = std::nullopt,
                    const std::optional<double>& resolved_h_y = std::nullopt,
                    const std::optional<std::vector<double>>& resolved_grid = std::nullopt);
TestConfig config_from_json(const json& doc);

json test_report_to_json(const TestReport& report, Eigen::Index n);
json rejection_row_to_json(const RejectionRow& row);

json make_document(const std::string& subcommand, json result,
                   std::optional<InputInfo> input, json config);

}  // namespace curvtest
