#include <filesystem>
#include <sstream>
#include <string>

#include "doctest.h"
#include "kawarada/error.hpp"
#include "kawarada/trace_io.hpp"
#include "support/expect.hpp"

using namespace kawarada;
using testing_support::error_kind;

namespace {

std::vector<json> parse_lines(const std::string& text) {
    std::vector<json> out;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) out.push_back(json::parse(line));
    return out;
}

RunTrace small_run() {
    auto spec = benchmark1d_problem();
    return run(spec, benchmark1d_mesh(20), benchmark1d_options());
}

}  // namespace

TEST_CASE("jsonl trace has header, contiguous steps and a footer with T") {
    const auto tr = small_run();
    std::ostringstream os;
    write_trace_jsonl(os, tr, json{{"name", "fig"}});
    const auto lines = parse_lines(os.str());
    REQUIRE(lines.size() == tr.records.size() + 2);
    CHECK(lines.front()["type"] == "header");
    CHECK(lines.front()["run"]["name"] == "fig");
    CHECK(lines.front()["criteria"].contains("check_cfl"));
    for (std::size_t k = 1; k + 1 < lines.size(); ++k) {
        CHECK(lines[k]["type"] == "step");
        CHECK(lines[k]["step"].get<std::size_t>() == k);
        // doubles survive the round trip exactly
        CHECK(lines[k]["t"].get<double>() == tr.records[k - 1].t);
        CHECK(lines[k]["D"].get<double>() == tr.records[k - 1].derivative);
    }
    const auto& footer = lines.back();
    CHECK(footer["type"] == "footer");
    CHECK(footer["outcome"] == "quenched");
    CHECK(footer["T"].get<double>() == tr.outcome.quench_time);
    CHECK(footer["bracket"].get<double>() == tr.outcome.bracket);
}

TEST_CASE("csv trace") {
    const auto tr = small_run();
    std::ostringstream os;
    write_trace_csv(os, tr);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "t,max_v,tau,D");
    std::size_t rows = 0;
    while (std::getline(is, line)) {
        std::istringstream ls(line);
        std::string cell;
        std::getline(ls, cell, ',');
        CHECK(std::stod(cell) == tr.records[rows].t);
        ++rows;
    }
    CHECK(rows == tr.records.size());
}

TEST_CASE("checkpoint round trip") {
    Checkpoint cp;
    cp.state = StateVector{{0.1, 1.0 / 3.0, 0.7}, 0.123456789012345678, 42};
    cp.controller.d[0] = 1.5;
    cp.controller.d[1] = 2.0 / 7.0;
    cp.controller.d[2] = 1e300;
    cp.controller.count = 3;
    cp.controller.current = 1e-5 / 3.0;

    const auto path = std::filesystem::temp_directory_path() / "kawarada_test_checkpoint.json";
    save_checkpoint(path, cp);
    const auto back = load_checkpoint(path);
    CHECK(back.state.values == cp.state.values);
    CHECK(back.state.t == cp.state.t);
    CHECK(back.state.step == 42);
    for (int k = 0; k < 3; ++k) CHECK(back.controller.d[k] == cp.controller.d[k]);
    CHECK(back.controller.count == 3);
    CHECK(back.controller.current == cp.controller.current);
    std::filesystem::remove(path);

    CHECK(error_kind([] { checkpoint_from_json(json{{"format", "other"}}); }) == ErrorKind::Config);
    CHECK(error_kind([] { checkpoint_from_json(json{{"format", "kawarada-checkpoint"}}); }) == ErrorKind::Config);
    CHECK(error_kind([] { load_checkpoint("/nonexistent/checkpoint.json"); }) == ErrorKind::Config);
}
