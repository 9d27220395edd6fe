#pragma once

// Subcommand dispatch: turns a validated RunConfig into artifacts on disk.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "yns/config.hpp"

namespace yns {

inline constexpr const char* kCodeVersion = "0.1.0";

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitConfig = 2, kExitAborted = 3 };

struct DispatchOptions {
    std::filesystem::path out;       // overrides config output.dir when non-empty
    std::filesystem::path base_dir;  // relative input paths resolve here
    int threads = 1;
    bool verbose = false;
};

// Hash of (code version, normalized config); embedded in every JSON output.
std::string manifest_hash(const RunConfig& cfg);

FieldState make_initial_state(const RunConfig& cfg, const InitialData& init,
                              const Coefficients& coeffs, const std::filesystem::path& base_dir);

// Never throws for experiment failures: they become error.json plus a nonzero code.
int dispatch(const RunConfig& cfg, const DispatchOptions& opts);

// Parses then dispatches; config violations are written to <out>/error.json.
int run_document(const std::string& text, const std::string& subcommand,
                 const DispatchOptions& opts);

}  // namespace yns
