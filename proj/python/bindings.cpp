#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "kawarada/commands.hpp"
#include "kawarada/config.hpp"
#include "kawarada/error.hpp"
#include "kawarada/harness.hpp"
#include "kawarada/trace_io.hpp"

namespace py = pybind11;
using namespace kawarada;

namespace {

// Hand nlohmann values to Python through the json module; the payloads are small.
py::object to_py(const json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

py::dict trace_dict(const RunTrace& trace) {
    json j = to_json(trace.outcome);
    j["steps"] = trace.records.size();
    j["rejected_steps"] = trace.rejected_steps;
    j["clamp_events"] = trace.total_clamp_events;
    j["final_t"] = trace.final_state.t;
    j["criteria"] = to_json(trace.criteria);
    std::vector<double> t, max_v, tau, d;
    for (const auto& r : trace.records) {
        t.push_back(r.t);
        max_v.push_back(r.max_v);
        tau.push_back(r.tau);
        d.push_back(r.derivative);
    }
    py::dict out = to_py(j);
    out["t"] = t;
    out["max_v"] = max_v;
    out["tau"] = tau;
    out["D"] = d;
    out["final_state"] = trace.final_state.values;
    return out;
}

StabilityMode parse_mode(const std::string& s) {
    if (s == "frozen") return StabilityMode::Frozen;
    if (s == "live") return StabilityMode::Live;
    throw Error(ErrorKind::InvalidArgument, "mode must be frozen or live");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Semi-adaptive splitting solver for degenerate Kawarada problems";

    static py::exception<Error> exc(m, "KawaradaError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object err = py::handle(exc.ptr())(e.what());
            err.attr("kind") = std::string(to_string(e.kind()));
            PyErr_SetObject(exc.ptr(), err.ptr());
        }
    });

    py::class_<RunConfig>(m, "Config")
        .def_readwrite("seed", &RunConfig::seed)
        .def_property(
            "strict", [](const RunConfig& c) { return c.run.strict; },
            [](RunConfig& c, bool v) { c.run.strict = v; })
        .def_property(
            "max_steps", [](const RunConfig& c) { return c.run.max_steps; },
            [](RunConfig& c, std::size_t v) { c.run.max_steps = v; })
        .def_property_readonly("prefix", [](const RunConfig& c) { return c.output.prefix; })
        .def_property_readonly("unknowns", [](const RunConfig& c) { return c.build_mesh().size(); })
        .def("info", [](const RunConfig& c) { return to_py(run_info(c)); });

    m.def("load_config", [](const std::string& path) { return load_config(path); }, py::arg("path"));
    m.def("parse_config", [](const std::string& text) { return parse_config(text); }, py::arg("text"));

    m.def(
        "run",
        [](const RunConfig& cfg) {
            RunTrace trace;
            {
                py::gil_scoped_release release;
                trace = run(cfg.spec, cfg.build_mesh(), cfg.run);
            }
            return trace_dict(trace);
        },
        py::arg("config"), "Run to quench, horizon or error; returns the outcome and per-step series.");

    m.def(
        "run_benchmark1d",
        [](std::size_t n) {
            RunTrace trace;
            {
                py::gil_scoped_release release;
                trace = run(benchmark1d_problem(), benchmark1d_mesh(n), benchmark1d_options());
            }
            return trace_dict(trace);
        },
        py::arg("interior") = 200);

    m.def(
        "verify",
        [](const RunConfig& cfg) {
            py::list rows;
            for (const auto& r : verify_properties(cfg)) {
                py::dict d;
                d["property"] = r.property;
                d["subject"] = r.subject;
                d["status"] = to_string(r.status);
                d["value"] = r.value;
                d["bound"] = r.bound;
                d["note"] = r.note;
                rows.append(d);
            }
            return rows;
        },
        py::arg("config"));

    m.def(
        "stability",
        [](const RunConfig& cfg, std::optional<std::string> mode, std::optional<double> magnitude,
           std::optional<std::uint64_t> seed) {
            const auto& st = cfg.stability;
            const Mesh mesh = cfg.build_mesh();
            const double tau = st.tau.value_or(cfl_step_cap(mesh, make_degeneracy(cfg.spec, mesh), cfg.spec.edges));
            StabilityOptions so;
            so.mode = mode ? parse_mode(*mode) : st.mode;
            so.perturbation = {seed.value_or(cfg.seed), magnitude.value_or(st.magnitude)};
            so.tau_schedule.assign(st.steps, tau);
            so.stop_at = st.stop_at;
            so.step = cfg.run.step;
            PerturbationResult r;
            {
                py::gil_scoped_release release;
                r = stability_run(cfg.spec, mesh, so);
            }
            json j = to_json(r);
            j["tau"] = tau;
            return to_py(j);
        },
        py::arg("config"), py::arg("mode") = py::none(), py::arg("magnitude") = py::none(),
        py::arg("seed") = py::none());

    m.def(
        "convergence",
        [](const RunConfig& cfg, std::optional<std::vector<double>> taus) {
            ConvergenceOptions co;
            co.t_common = cfg.convergence.t_common;
            co.quench_runs = cfg.convergence.quench_runs;
            co.run = cfg.run;
            const auto& ts = taus ? *taus : cfg.convergence.taus;
            std::vector<ConvergenceRow> rows;
            {
                py::gil_scoped_release release;
                rows = convergence_study(cfg.spec, cfg.build_mesh(), ts, co);
            }
            py::list out;
            for (const auto& r : rows) {
                py::dict d;
                d["tau"] = r.tau;
                d["unknowns"] = r.unknowns;
                d["terminal_time"] = r.terminal_time;
                d["terminal_max_v"] = r.terminal_max_v;
                d["quench_time"] = r.quench_time;
                d["bracket"] = r.bracket;
                out.append(d);
            }
            py::dict res;
            res["rows"] = out;
            res["orders"] = observed_orders(rows);
            return res;
        },
        py::arg("config"), py::arg("taus") = py::none());
}
