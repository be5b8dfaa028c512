#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace gazekit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitProcessing = 1;
inline constexpr int kExitUsage = 2;

/// Runs one subcommand. `args` excludes the program name. Usage errors print
/// to `err` and return 2; processing errors emit one JSON line
/// {"error":{"code":..,"message":..}} on `err` and return 1.
int run_command(std::span<const std::string> args, std::ostream& out, std::ostream& err);

/// Consolidates prior JSON reports into aligned text tables (returned) and a
/// combined JSON document. Throws SchemaError on empty input, unknown report
/// kinds, or mixed schema versions.
std::string format_reports(const std::vector<nlohmann::json>& reports, nlohmann::json* combined = nullptr);

}  // namespace gazekit::cli
