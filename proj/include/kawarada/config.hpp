#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kawarada/harness.hpp"

namespace kawarada {

struct OutputSettings {
    std::string prefix = "kawarada_run";
    bool jsonl = true;
    bool csv = true;
    bool checkpoint = true;
    std::optional<std::string> resume;  // checkpoint to continue from
};

struct StabilitySettings {
    StabilityMode mode = StabilityMode::Frozen;
    double magnitude = 1e-8;
    std::size_t steps = 50;
    std::optional<double> tau;  // default: the positivity cap
    double stop_at = 0.5;
};

struct VerifySettings {
    std::optional<double> tau;      // factor checks; default: the positivity cap
    std::size_t random_matrices = 20;
    std::size_t matrix_size = 20;
    int halvings = 4;
};

struct ConvergenceSettings {
    std::vector<double> taus;
    double t_common = 0.0;
    bool quench_runs = true;
};

/// Parsed INI file. Sections: problem, grid, stepping, guard, output (required) and
/// stability, verify, convergence (optional). Keys before the first section are global.
struct RunConfig {
    ProblemSpec spec;
    std::string weight = "power";  // or "endpoint": x^p (a - x)^(1-p) along x
    double weight_p = 0.0;
    double source_power = 1.0;
    double source_scale = 1.0;
    std::string u0 = "zero";       // zero, constant or sine
    double u0_value = 0.0;
    std::vector<AxisSpec> axes;
    RunOptions run;
    OutputSettings output;
    StabilitySettings stability;
    VerifySettings verify;
    ConvergenceSettings convergence;
    std::uint64_t seed = 1;

    Mesh build_mesh() const;
};

/// Throws Error(Config) with "name:line: message" on any problem.
RunConfig parse_config(std::string_view text, std::string_view name = "<config>");
RunConfig load_config(const std::filesystem::path& path);

}  // namespace kawarada
