#include "kawarada/trace_io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

#include "kawarada/error.hpp"

namespace kawarada {

json to_json(const CriteriaReport& r) {
    json j;
    j["check_cfl"] = {{"ok", r.cfl.ok},
                      {"tau", r.cfl.tau},
                      {"beta_min", r.cfl.beta_min},
                      {"min_edge_sq", r.cfl.min_edge_sq},
                      {"bound", r.cfl.bound},
                      {"relative_margin", r.cfl.relative_margin}};
    if (r.mesh_bound) {
        const auto& m = *r.mesh_bound;
        j["check_mesh_bound"] = {{"ok", m.ok},
                                 {"h_max", m.h_max},
                                 {"source_branch", m.source_branch},
                                 {"blowup_branch", m.blowup_branch},
                                 {"threshold", m.threshold},
                                 {"binding", m.binding}};
    } else {
        j["check_mesh_bound"] = {{"ok", false}, {"error", r.mesh_bound_error}};
    }
    const auto& ms = r.monotone_start;
    j["check_monotonicity_start"] = {{"ok", ms.ok()}, {"a_ok", ms.a_ok}, {"a_min", ms.a_min},
                                     {"b_ok", ms.b_ok}, {"d0", ms.d0},     {"tau0", ms.tau0}};
    j["check_regularity"] = {{"ok", r.regularity.ok},
                             {"K", r.regularity.K},
                             {"per_axis_max", r.regularity.per_axis_max}};
    const auto& nz = r.nonzero_start;
    j["nonzero_start"] = {{"applicable", nz.applicable}, {"ok", nz.ok}, {"F", nz.F}, {"threshold", nz.threshold}};
    j["tau_bound_monotone"] = r.tau_bound_monotone;
    j["jacobian_G"] = r.jacobian_G;
    j["failures"] = r.failures();
    return j;
}

json to_json(const StepRecord& rec) {
    return {{"type", "step"},     {"step", rec.step},
            {"t", rec.t},         {"tau", rec.tau},
            {"max_v", rec.max_v}, {"argmax", rec.argmax},
            {"D", rec.derivative}, {"clamp_events", rec.clamp_events},
            {"positive", rec.positive}, {"monotone", rec.monotone},
            {"cfl_ok", rec.cfl_ok}};
}

json to_json(const RunOutcome& o) {
    json j;
    j["outcome"] = to_string(o.kind);
    if (o.kind == OutcomeKind::Quenched) {
        j["T"] = o.quench_time;
        j["bracket"] = o.bracket;
        j["location"] = o.quench_location.value_or(0);
        j["coordinates"] = o.quench_coordinates;
    }
    if (!o.error_kind.empty()) j["error_kind"] = o.error_kind;
    if (!o.blocked_by.empty()) j["blocked_by"] = o.blocked_by;
    if (!o.message.empty()) j["message"] = o.message;
    return j;
}

json to_json(const PerturbationResult& r) {
    return {{"norms", r.norms},         {"times", r.times},
            {"c_emp", r.c_emp},         {"envelope", r.envelope},
            {"K", r.K},                 {"G", r.G},
            {"c_measured", r.c_measured}, {"elapsed", r.elapsed},
            {"recursion_defect", r.recursion_defect},
            {"inconclusive", r.inconclusive}, {"steps", r.steps}};
}

void write_trace_jsonl(std::ostream& os, const RunTrace& trace, const json& run_info) {
    json header;
    header["type"] = "header";
    header["format"] = "kawarada-trace";
    header["version"] = 1;
    header["run"] = run_info;
    header["tau_cap"] = trace.tau_cap ? json(*trace.tau_cap) : json(nullptr);
    header["criteria"] = to_json(trace.criteria);
    os << header.dump() << '\n';

    for (const auto& rec : trace.records) os << to_json(rec).dump() << '\n';

    json footer = {{"type", "footer"}};
    footer.update(to_json(trace.outcome));
    footer["steps"] = trace.records.size();
    footer["final_t"] = trace.final_state.t;
    footer["final_step"] = trace.final_state.step;
    footer["rejected_steps"] = trace.rejected_steps;
    footer["clamp_events"] = trace.total_clamp_events;
    os << footer.dump() << '\n';
}

void write_trace_csv(std::ostream& os, const RunTrace& trace) {
    os << "t,max_v,tau,D\n";
    char buf[128];
    for (const auto& r : trace.records) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", r.t, r.max_v, r.tau, r.derivative);
        os << buf;
    }
}

json checkpoint_to_json(const Checkpoint& cp) {
    json c;
    c["d"] = {cp.controller.d[0], cp.controller.d[1], cp.controller.d[2]};
    c["count"] = cp.controller.count;
    c["current"] = cp.controller.current;
    return {{"format", "kawarada-checkpoint"},
            {"version", 1},
            {"t", cp.state.t},
            {"step", cp.state.step},
            {"values", cp.state.values},
            {"controller", c}};
}

Checkpoint checkpoint_from_json(const json& j) {
    try {
        if (j.at("format") != "kawarada-checkpoint") throw Error(ErrorKind::Config, "not a checkpoint file");
        Checkpoint cp;
        cp.state.t = j.at("t").get<double>();
        cp.state.step = j.at("step").get<std::size_t>();
        cp.state.values = j.at("values").get<std::vector<double>>();
        const auto& c = j.at("controller");
        const auto d = c.at("d").get<std::vector<double>>();
        if (d.size() != 3) throw Error(ErrorKind::Config, "checkpoint controller needs three samples");
        for (std::size_t k = 0; k < 3; ++k) cp.controller.d[k] = d[k];
        cp.controller.count = c.at("count").get<std::size_t>();
        cp.controller.current = c.at("current").get<double>();
        return cp;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Config, std::string("malformed checkpoint: ") + e.what());
    }
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& cp) {
    std::ofstream f(path);
    if (!f) throw Error(ErrorKind::Config, "cannot write " + path.string());
    f << checkpoint_to_json(cp).dump(1) << '\n';
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw Error(ErrorKind::Config, "cannot read " + path.string());
    json j;
    try {
        j = json::parse(f);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Config, path.string() + ": " + e.what());
    }
    return checkpoint_from_json(j);
}

}  // namespace kawarada
