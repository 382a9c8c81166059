#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "kawarada/commands.hpp"

using namespace kawarada;
namespace fs = std::filesystem;

namespace {

struct Scratch {
    fs::path dir;
    Scratch() {
        dir = fs::temp_directory_path() / "kawarada_cmd_tests";
        fs::create_directories(dir);
    }
    fs::path write(const std::string& name, const std::string& text) const {
        const auto p = dir / name;
        std::ofstream(p) << text;
        return p;
    }
    std::string read(const std::string& name) const {
        std::ifstream f(dir / name, std::ios::binary);
        std::ostringstream ss;
        ss << f.rdbuf();
        return ss.str();
    }
};

std::string benchmark1d_config(const Scratch& s, std::size_t n, const std::string& extra_stepping = "") {
    return "[problem]\nedges = pi 1 1\nweight = endpoint\nu0 = sine\nu0_value = 0.001\nt_max = 1\n"
           "[grid]\ndim = 1\nn = " + std::to_string(n) +
           "\n[stepping]\ntau0 = 1e-4\ntau_min = 1e-9\n" + extra_stepping +
           "[guard]\n[output]\nprefix = " + (s.dir / "fig").string() + "\n";
}

const char* kCube = R"(seed = 3
[problem]
edges = 1
q = 1
[grid]
dim = 3
n = 3
[stepping]
tau0 = 1e-3
[guard]
[output]
prefix = cube
)";

struct Result {
    int code;
    std::string out;
    std::string err;
};

template <class F>
Result call(F f, const CommandOptions& o) {
    std::ostringstream out, err;
    const int code = f(o, out, err);
    return {code, out.str(), err.str()};
}

std::string last_line(const std::string& text) {
    std::istringstream is(text);
    std::string line, last;
    while (std::getline(is, line)) if (!line.empty()) last = line;
    return last;
}

}  // namespace

TEST_CASE("run: 1D benchmark config quenches and the footer carries T") {
    Scratch s;
    CommandOptions o;
    o.config = s.write("fig.ini", benchmark1d_config(s, 60));
    const auto r = call(cmd_run, o);
    CHECK(r.code == 0);
    const auto footer = json::parse(last_line(s.read("fig.jsonl")));
    CHECK(footer["outcome"] == "quenched");
    CHECK(std::abs(footer["T"].get<double>() - 0.780266) < 0.01);
    CHECK(fs::exists(s.dir / "fig.csv"));
    CHECK(fs::exists(s.dir / "fig.checkpoint.json"));
}

TEST_CASE("run: identical config and seed give identical files") {
    Scratch s;
    CommandOptions o;
    o.config = s.write("fig.ini", benchmark1d_config(s, 30));
    o.out = (s.dir / "a").string();
    REQUIRE(call(cmd_run, o).code == 0);
    o.out = (s.dir / "b").string();
    REQUIRE(call(cmd_run, o).code == 0);
    CHECK(s.read("a.jsonl") == s.read("b.jsonl"));
    CHECK(s.read("a.csv") == s.read("b.csv"));
    CHECK(s.read("a.checkpoint.json") == s.read("b.checkpoint.json"));
}

TEST_CASE("run: strict mode with tau0 above the positivity bound exits 2") {
    Scratch s;
    CommandOptions o;
    o.config = s.write("fig.ini", benchmark1d_config(s, 200));
    o.strict = true;
    const auto r = call(cmd_run, o);
    CHECK(r.code == 2);
    CHECK(r.err.find("check_cfl") != std::string::npos);
    const auto trace = s.read("fig.jsonl");
    const auto header = json::parse(trace.substr(0, trace.find('\n')));
    REQUIRE(header["criteria"]["failures"].size() >= 1);
    CHECK(header["criteria"]["failures"][0] == "check_cfl");
}

TEST_CASE("run: resume from a checkpoint") {
    Scratch s;
    CommandOptions o;
    o.config = s.write("part.ini", benchmark1d_config(s, 30, "max_steps = 300\n"));
    o.out = (s.dir / "part").string();
    CHECK(call(cmd_run, o).code == 3);  // step budget exhausted

    CommandOptions full;
    full.config = s.write("full.ini", benchmark1d_config(s, 30));
    full.out = (s.dir / "whole").string();
    REQUIRE(call(cmd_run, full).code == 0);
    full.out = (s.dir / "rest").string();
    full.resume = (s.dir / "part.checkpoint.json").string();
    REQUIRE(call(cmd_run, full).code == 0);
    CHECK(last_line(s.read("rest.jsonl")).find("\"T\"") != std::string::npos);
    CHECK(json::parse(last_line(s.read("rest.jsonl")))["T"] == json::parse(last_line(s.read("whole.jsonl")))["T"]);
}

TEST_CASE("run: malformed configs exit 1") {
    Scratch s;
    CommandOptions o;
    o.config = s.write("nogrid.ini", "[problem]\n[stepping]\n[guard]\n[output]\n");
    const auto r = call(cmd_run, o);
    CHECK(r.code == 1);
    CHECK(r.err.find("missing section [grid]") != std::string::npos);
    o.config = s.dir / "does_not_exist.ini";
    CHECK(call(cmd_run, o).code == 1);
}

TEST_CASE("verify: default 3x3x3 grid passes") {
    Scratch s;
    CommandOptions o;
    o.config = s.write("v.ini", kCube);
    o.out = (s.dir / "verify.json").string();
    const auto r = call(cmd_verify, o);
    CHECK(r.code == 0);
    const auto table = json::parse(s.read("verify.json"));
    CHECK(table.size() >= 6);
    for (const auto& row : table) CHECK(row["status"] == "pass");
}

TEST_CASE("verify: huge tau marks regime-dependent rows out of regime") {
    Scratch s;
    CommandOptions o;
    o.config = s.write("v.ini", std::string(kCube) + "[verify]\ntau = 10\n");
    const auto r = call(cmd_verify, o);
    CHECK(r.code == 0);
    CHECK(r.out.find("out of regime") != std::string::npos);
    CHECK(r.out.find("FAIL") == std::string::npos);
}

TEST_CASE("verify: oversized grid exits 4") {
    Scratch s;
    CommandOptions o;
    std::string text = kCube;
    text.replace(text.find("n = 3"), 5, "n = 20");
    o.config = s.write("big.ini", text);
    const auto r = call(cmd_verify, o);
    CHECK(r.code == 4);
    CHECK(r.err.find("smaller verification grid") != std::string::npos);
}

TEST_CASE("stability subcommand") {
    Scratch s;
    std::string text = kCube;
    text.replace(text.find("q = 1"), 5, "q = 0");
    CommandOptions o;
    o.config = s.write("st.ini", text + "[stability]\nsteps = 30\n");
    o.out = (s.dir / "st.json").string();
    REQUIRE(call(cmd_stability, o).code == 0);
    auto j = json::parse(s.read("st.json"));
    CHECK(j["K"].get<double>() == 0.0);
    CHECK(j["c_emp"].get<double>() <= 1.0 + 1e-6);
    CHECK(j["norms"].size() == 31);

    o.mode = "live";
    REQUIRE(call(cmd_stability, o).code == 0);
    j = json::parse(s.read("st.json"));
    CHECK(j["mode"] == "live");
    CHECK(j["within_envelope"] == true);

    o.mag = 0.0;
    const auto zero = call(cmd_stability, o);
    CHECK(zero.code == 1);
    CHECK(zero.err.find("degenerate perturbation") != std::string::npos);
}

TEST_CASE("convergence subcommand") {
    Scratch s;
    CommandOptions o;
    o.config = s.write("c.ini", std::string(kCube) + "[convergence]\ntaus = 4e-3 2e-3 1e-3\nt_common = 0.02\n");
    o.out = (s.dir / "c.csv").string();
    const auto r = call(cmd_convergence, o);
    CHECK(r.code == 0);
    std::istringstream is(s.read("c.csv"));
    std::string line;
    std::size_t n = 0;
    while (std::getline(is, line)) ++n;
    CHECK(n == 4);

    o.config = s.write("c2.ini", std::string(kCube) + "[convergence]\ntaus = 4e-3 2e-3\n");
    CHECK(call(cmd_convergence, o).code == 1);
}
