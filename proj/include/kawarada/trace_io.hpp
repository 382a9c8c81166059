#pragma once

#include <filesystem>
#include <iosfwd>

#include "json.hpp"
#include "kawarada/harness.hpp"

namespace kawarada {

using json = nlohmann::ordered_json;

json to_json(const CriteriaReport& report);
json to_json(const StepRecord& rec);
json to_json(const RunOutcome& outcome);
json to_json(const PerturbationResult& result);

/// JSON lines: one header object, one object per accepted step, one footer object.
/// `run_info` is copied verbatim into the header. No timestamps, so output is reproducible.
void write_trace_jsonl(std::ostream& os, const RunTrace& trace, const json& run_info = json::object());

/// Columns t, max_v, tau, D with 17 significant digits.
void write_trace_csv(std::ostream& os, const RunTrace& trace);

json checkpoint_to_json(const Checkpoint& cp);
/// Throws Config on a malformed document.
Checkpoint checkpoint_from_json(const json& j);
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& cp);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace kawarada
