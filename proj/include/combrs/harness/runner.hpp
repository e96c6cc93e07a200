#pragma once

#include "combrs/harness/run_spec.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace combrs::harness {

inline constexpr int kReportSchemaVersion = 1;

enum class Subcommand { kAf, kRdmap, kPredict, kVerify, kGiDemo };

std::string_view to_string(Subcommand s);
Subcommand subcommand_from_string(std::string_view s);

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kMismatch = 2;
inline constexpr int kRuntime = 3;
}  // namespace exit_code

struct RunOptions {
    std::filesystem::path out_dir;
    bool timing = false;  // wall-clock timing makes reports non-reproducible
};

struct RunResult {
    int exit_code = exit_code::kOk;
    std::string report;               // JSON text, also written to report.json
    std::vector<std::string> files;   // relative to out_dir
};

// Throws SpecError / ConfigError / RegionError for bad input and
// OutputError when artifacts cannot be written.
RunResult run(Subcommand subcommand, const RunSpec& spec, const RunOptions& options);

}  // namespace combrs::harness
