#pragma once

// Run configuration: one JSON document carrying physical parameters, grid,
// solver settings and exactly one experiment block.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "yns/error.hpp"
#include "yns/experiments.hpp"
#include "yns/model.hpp"
#include "yns/solver.hpp"

namespace yns {

struct ConfigViolation {
    std::string pointer;  // JSON pointer, "" for the document root
    std::string message;
};

class ConfigError : public ValidationError {
public:
    explicit ConfigError(std::vector<ConfigViolation> v);
    const std::vector<ConfigViolation>& violations() const { return violations_; }

private:
    std::vector<ConfigViolation> violations_;
};

struct SpectrumBlock {
    double k_min = 1e-3;
    double k_max = 1e2;
    int n = 1024;
    bool log_spacing = true;
};

struct ThetaBlock {
    ScanSpec scan;
};

struct InitialData {
    std::string kind = "unstable";  // unstable | random | decay | snapshot | zero
    double amplitude = 1e-3;
    double theta_bar = 0;            // unstable: 0 selects Θ/2
    std::optional<double> zeta_bar;  // unstable
    double k_cut = 1.0;              // random: modes with |ξ| ≤ k_cut
    double sigma = 1.0;              // decay: profile k^{σ−d/2}·1_{k≤1}
    std::string path;                // snapshot header
};

struct SimulateBlock {
    InitialData initial;
};

struct BesovBlockSpec {
    std::string snapshot;
    std::string field = "rho";  // rho | u
    double s = 0;
    double p = 2;
    double r = 1;
    int j0 = 0;
};

struct DecayFitBlock {
    DecaySpec spec;
    std::string source = "quadrature";  // quadrature | run
    InitialData initial;                // source = run
};

struct InstabilityBlock {
    InstabilitySpec spec;
};

struct EscapeBlock {
    EscapeSpec spec;
};

using ExperimentBlock = std::variant<SpectrumBlock, ThetaBlock, SimulateBlock, BesovBlockSpec,
                                     DecayFitBlock, InstabilityBlock, EscapeBlock>;

struct RunConfig {
    PhysicalParams params;
    GridSpec grid;
    SolverConfig solver;
    std::string experiment;  // block name as written in the document
    ExperimentBlock block;
    std::string output_dir = "out";
    std::uint64_t seed = 0;
    nlohmann::json document;  // normalized echo of the input
};

extern const std::vector<std::string> kExperimentNames;

// ConfigError listing every violation found.
RunConfig parse_config(const std::string& text);
RunConfig parse_config(const nlohmann::json& doc);

}  // namespace yns
