#pragma once

// Command dispatch and report generation for the morphoscope tool.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "morphoscope/config.hpp"

namespace morpho {

inline constexpr const char* kToolName = "morphoscope";
inline constexpr const char* kToolVersion = "0.1.0";

struct RunOptions {
  std::string command;
  std::string config;  // file path or catalog:NAME
  std::optional<Vec4> point;
  std::string out_dir = ".";
  std::string format = "json";
  std::optional<std::uint64_t> seed;
  std::optional<double> fd_step;
  int workers = 1;
  bool scan = false;
  std::optional<std::string> patch;
  bool write_files = true;
};

struct RunResult {
  int exit_code = 0;
  json report;           // empty on configuration errors
  std::string csv;
  std::vector<std::string> files;
  std::string error;
};

/// Never throws for library errors: they become exit code 2.
RunResult run(const RunOptions& opts, std::ostream& out, std::ostream& err);

/// Hash of the report without its fingerprint and timestamp fields.
std::string report_fingerprint(const json& report);

/// "x1,x2,x3,x4" -> point. Throws ConfigError.
Vec4 parse_point(const std::string& text);

std::string records_to_csv(const json& records);

}  // namespace morpho
