#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kawarada/config.hpp"
#include "kawarada/trace_io.hpp"

namespace kawarada {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int config = 1;
inline constexpr int guard_blocked = 2;
inline constexpr int numeric = 3;
inline constexpr int grid_too_large = 4;
inline constexpr int property_failed = 5;
}  // namespace exit_code

/// Flags shared by the subcommands; unset values fall back to the config file.
struct CommandOptions {
    std::filesystem::path config;
    bool strict = false;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::string> mode;
    std::optional<double> mag;
    std::optional<std::string> resume;
};

/// Problem, grid and stepping settings echoed into trace headers.
json run_info(const RunConfig& cfg);

enum class VerifyStatus { Pass, Fail, OutOfRegime };
std::string to_string(VerifyStatus s);

struct VerifyRow {
    std::string property;
    std::string subject;  // e.g. "axis 0", "random 20x20"
    VerifyStatus status = VerifyStatus::Pass;
    double value = 0.0;
    double bound = 0.0;
    std::string note;
};

/// Dense property checks on the configured grid. Throws GridTooLarge past the oracle cap.
std::vector<VerifyRow> verify_properties(const RunConfig& cfg);

int cmd_run(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_verify(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_stability(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_convergence(const CommandOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace kawarada
