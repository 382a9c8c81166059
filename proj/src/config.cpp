#include "kawarada/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "kawarada/error.hpp"

namespace kawarada {

namespace {

struct Entry {
    std::string value;
    std::size_t line = 0;
    bool used = false;
};

struct Section {
    std::size_t line = 0;
    std::map<std::string, Entry> entries;
};

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> tokens(std::string_view s) {
    std::vector<std::string> out;
    std::istringstream is{std::string(s)};
    std::string t;
    while (is >> t) {
        if (!t.empty() && t.back() == ',') t.pop_back();
        if (!t.empty()) out.push_back(t);
    }
    return out;
}

const std::set<std::string> kSections = {"", "problem", "grid", "stepping", "guard",
                                         "output", "stability", "verify", "convergence"};
const std::vector<std::string> kRequired = {"problem", "grid", "stepping", "guard", "output"};

class Reader {
public:
    Reader(std::string_view text, std::string_view name) : name_(name) {
        std::istringstream is{std::string(text)};
        std::string raw;
        std::size_t lineno = 0;
        std::string current;
        sections_[""].line = 0;
        while (std::getline(is, raw)) {
            ++lineno;
            std::string line = raw;
            for (std::size_t p = 0; p < line.size(); ++p) {
                if ((line[p] == '#' || line[p] == ';') && (p == 0 || line[p - 1] == ' ' || line[p - 1] == '\t')) {
                    line.resize(p);
                    break;
                }
            }
            line = trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']') fail(lineno, "unterminated section header");
                current = trim(std::string_view(line).substr(1, line.size() - 2));
                if (!kSections.count(current) || current.empty()) fail(lineno, "unknown section [" + current + "]");
                if (sections_.count(current)) fail(lineno, "duplicate section [" + current + "]");
                sections_[current].line = lineno;
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos) fail(lineno, "expected key = value");
            const std::string key = trim(std::string_view(line).substr(0, eq));
            const std::string value = trim(std::string_view(line).substr(eq + 1));
            if (key.empty()) fail(lineno, "empty key");
            auto& sec = sections_[current];
            if (sec.entries.count(key)) fail(lineno, "duplicate key '" + key + "'");
            sec.entries[key] = Entry{value, lineno, false};
        }
        for (const auto& req : kRequired) {
            if (!sections_.count(req)) throw Error(ErrorKind::Config, name_ + ":" + std::to_string(lineno) + ": missing section [" + req + "]");
        }
    }

    [[noreturn]] void fail(std::size_t line, const std::string& msg) const {
        throw Error(ErrorKind::Config, name_ + ":" + std::to_string(line) + ": " + msg);
    }

    bool has_section(const std::string& s) const { return sections_.count(s) > 0; }

    Entry* find(const std::string& sec, const std::string& key) {
        auto it = sections_.find(sec);
        if (it == sections_.end()) return nullptr;
        auto e = it->second.entries.find(key);
        if (e == it->second.entries.end()) return nullptr;
        e->second.used = true;
        return &e->second;
    }

    double to_double(const Entry& e, const std::string& tok) const {
        if (tok == "pi") return std::numbers::pi;
        double v = 0.0;
        const auto* end = tok.data() + tok.size();
        const auto r = std::from_chars(tok.data(), end, v);
        if (r.ec != std::errc() || r.ptr != end || !std::isfinite(v)) fail(e.line, "not a number: '" + tok + "'");
        return v;
    }

    std::optional<double> number(const std::string& sec, const std::string& key) {
        Entry* e = find(sec, key);
        if (!e) return std::nullopt;
        const auto t = tokens(e->value);
        if (t.size() != 1) fail(e->line, key + " expects one number");
        return to_double(*e, t[0]);
    }

    std::optional<std::vector<double>> numbers(const std::string& sec, const std::string& key) {
        Entry* e = find(sec, key);
        if (!e) return std::nullopt;
        std::vector<double> out;
        for (const auto& t : tokens(e->value)) out.push_back(to_double(*e, t));
        if (out.empty()) fail(e->line, key + " expects at least one number");
        return out;
    }

    std::optional<std::uint64_t> count(const std::string& sec, const std::string& key) {
        Entry* e = find(sec, key);
        if (!e) return std::nullopt;
        const auto t = tokens(e->value);
        std::uint64_t v = 0;
        if (t.size() != 1) fail(e->line, key + " expects one integer");
        const auto* end = t[0].data() + t[0].size();
        const auto r = std::from_chars(t[0].data(), end, v);
        if (r.ec != std::errc() || r.ptr != end) fail(e->line, "not a non-negative integer: '" + t[0] + "'");
        return v;
    }

    std::optional<std::vector<std::uint64_t>> counts(const std::string& sec, const std::string& key) {
        Entry* e = find(sec, key);
        if (!e) return std::nullopt;
        std::vector<std::uint64_t> out;
        for (const auto& t : tokens(e->value)) {
            std::uint64_t v = 0;
            const auto* end = t.data() + t.size();
            const auto r = std::from_chars(t.data(), end, v);
            if (r.ec != std::errc() || r.ptr != end) fail(e->line, "not a non-negative integer: '" + t + "'");
            out.push_back(v);
        }
        if (out.empty()) fail(e->line, key + " expects at least one integer");
        return out;
    }

    std::optional<bool> flag(const std::string& sec, const std::string& key) {
        Entry* e = find(sec, key);
        if (!e) return std::nullopt;
        const auto& v = e->value;
        if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
        if (v == "false" || v == "no" || v == "off" || v == "0") return false;
        fail(e->line, key + " expects true or false");
    }

    std::optional<std::string> word(const std::string& sec, const std::string& key,
                                    std::initializer_list<std::string_view> allowed = {}) {
        Entry* e = find(sec, key);
        if (!e) return std::nullopt;
        if (allowed.size() && std::find(allowed.begin(), allowed.end(), e->value) == allowed.end()) {
            std::string msg = key + " must be one of";
            for (auto a : allowed) msg += " " + std::string(a);
            fail(e->line, msg);
        }
        return e->value;
    }

    std::size_t line_of(const std::string& sec, const std::string& key) const {
        return sections_.at(sec).entries.at(key).line;
    }
    std::size_t section_line(const std::string& sec) const { return sections_.at(sec).line; }

    void reject_unused() const {
        // report the earliest unknown key
        const Entry* first = nullptr;
        std::string first_key;
        std::string first_sec;
        for (const auto& [sname, sec] : sections_) {
            for (const auto& [k, e] : sec.entries) {
                if (!e.used && (!first || e.line < first->line)) {
                    first = &e;
                    first_key = k;
                    first_sec = sname;
                }
            }
        }
        if (first) {
            fail(first->line, "unknown key '" + first_key + "'" +
                                  (first_sec.empty() ? std::string(" outside any section")
                                                     : " in [" + first_sec + "]"));
        }
    }

private:
    std::string name_;
    std::map<std::string, Section> sections_;
};

template <class T>
std::vector<T> broadcast(Reader& r, std::size_t line, const std::string& key, std::vector<T> v, std::size_t dim) {
    if (v.size() == 1) v.assign(dim, v.front());
    if (v.size() != dim) r.fail(line, key + " needs 1 or " + std::to_string(dim) + " values");
    return v;
}

}  // namespace

Mesh RunConfig::build_mesh() const {
    std::vector<AxisGrid> grids;
    for (const auto& a : axes) grids.push_back(make_axis_grid(a));
    return Mesh(std::move(grids));
}

RunConfig parse_config(std::string_view text, std::string_view name) {
    Reader r(text, name);
    RunConfig c;

    if (auto s = r.count("", "seed")) c.seed = *s;

    // problem
    auto& spec = c.spec;
    if (auto e = r.numbers("problem", "edges")) {
        const auto line = r.line_of("problem", "edges");
        if (e->size() == 1) e->assign(3, e->front());
        if (e->size() != 3) r.fail(line, "edges needs 1 or 3 values");
        for (double x : *e) {
            if (!(x > 0.0)) r.fail(line, "edges must be positive");
        }
        spec.edges = {(*e)[0], (*e)[1], (*e)[2]};
    }
    if (auto q = r.number("problem", "q")) spec.q = *q;
    if (auto w = r.word("problem", "weight", {"power", "endpoint"})) c.weight = *w;
    c.weight_p = (std::sqrt(5.0) - 1.0) / 2.0;
    if (auto p = r.number("problem", "weight_p")) {
        if (!(*p >= 0.0 && *p <= 1.0)) r.fail(r.line_of("problem", "weight_p"), "weight_p must lie in [0, 1]");
        c.weight_p = *p;
    }
    if (c.weight == "endpoint") {
        const double a = spec.edges[0];
        const double p = c.weight_p;
        spec.custom_weight = [a, p](double x, double, double) {
            return std::pow(x, p) * std::pow(a - x, 1.0 - p);
        };
    }
    double& power = c.source_power;
    double& scale = c.source_scale;
    if (auto v = r.number("problem", "source_power")) {
        if (!(*v >= 1.0)) r.fail(r.line_of("problem", "source_power"), "source_power must be >= 1");
        power = *v;
    }
    if (auto v = r.number("problem", "source_scale")) {
        if (!(*v > 0.0)) r.fail(r.line_of("problem", "source_scale"), "source_scale must be positive");
        scale = *v;
    }
    spec.source = SourceFn::power(power, scale);
    c.u0 = r.word("problem", "u0", {"zero", "constant", "sine"}).value_or("zero");
    c.u0_value = r.number("problem", "u0_value").value_or(0.0);
    const auto& u0 = c.u0;
    const double u0v = c.u0_value;
    if (u0 == "constant") spec.u0 = InitialField::constant(u0v);
    if (u0 == "sine") spec.u0 = InitialField::sine(u0v);
    if (auto v = r.number("problem", "t0")) spec.t0 = *v;
    if (auto v = r.number("problem", "t_max")) spec.t_max = *v;

    // grid
    const std::size_t dim = r.count("grid", "dim").value_or(3);
    if (dim < 1 || dim > 3) r.fail(r.line_of("grid", "dim"), "dim must be 1, 2 or 3");
    std::vector<std::string> kinds(dim, "uniform");
    if (auto k = r.word("grid", "kind")) {
        kinds = broadcast(r, r.line_of("grid", "kind"), "kind", tokens(*k), dim);
    }
    std::vector<std::uint64_t> ns;
    if (auto n = r.counts("grid", "n")) ns = broadcast(r, r.line_of("grid", "n"), "n", *n, dim);
    std::vector<double> gammas(dim, 1.0);
    if (auto g = r.numbers("grid", "gamma")) gammas = broadcast(r, r.line_of("grid", "gamma"), "gamma", *g, dim);
    const char* node_keys[] = {"nodes_x", "nodes_y", "nodes_z"};
    for (std::size_t s = 0; s < dim; ++s) {
        AxisSpec a;
        const auto& k = kinds[s];
        if (k == "uniform" || k == "graded") {
            if (ns.empty()) r.fail(r.section_line("grid"), "grid needs n for " + k + " axes");
            if (ns[s] < 1) r.fail(r.line_of("grid", "n"), "n must be at least 1");
            a.kind = k == "uniform" ? GridKind::Uniform : GridKind::Graded;
            a.interior = ns[s];
            a.gamma = gammas[s];
            if (a.kind == GridKind::Graded && !(a.gamma > 0.0)) r.fail(r.line_of("grid", "gamma"), "gamma must be positive");
        } else if (k == "explicit") {
            auto nodes = r.numbers("grid", node_keys[s]);
            if (!nodes) r.fail(r.section_line("grid"), std::string("explicit axis needs ") + node_keys[s]);
            a.kind = GridKind::Explicit;
            a.explicit_nodes = *nodes;
            a.interior = nodes->size();
        } else {
            r.fail(r.line_of("grid", "kind"), "kind must be uniform, graded or explicit");
        }
        c.axes.push_back(a);
    }

    // stepping
    auto& ctl = c.run.controller;
    if (auto v = r.number("stepping", "tau0")) ctl.tau0 = *v;
    if (auto v = r.number("stepping", "tau_min")) ctl.tau_min = *v;
    if (auto v = r.word("stepping", "cap")) {
        if (*v == "positivity") {
            ctl.cap_mode = TauCapMode::Positivity;
        } else if (*v == "none") {
            ctl.cap_mode = TauCapMode::None;
        } else {
            ctl.cap_mode = TauCapMode::Fixed;
            ctl.cap_value = *r.number("stepping", "cap");
        }
    }
    if (auto v = r.flag("stepping", "adaptive")) ctl.adaptive = *v;
    if (auto v = r.word("stepping", "source_mode", {"predictor", "fixed_point", "frozen"})) {
        c.run.step.source_mode = *v == "predictor" ? SourceMode::Predictor
                                 : *v == "fixed_point" ? SourceMode::FixedPoint
                                                        : SourceMode::Frozen;
    }
    if (auto v = r.counts("stepping", "sweep_order")) {
        if (v->size() != 3) r.fail(r.line_of("stepping", "sweep_order"), "sweep_order needs three axes");
        c.run.step.sweep_order = {(*v)[0], (*v)[1], (*v)[2]};
    }
    if (auto v = r.flag("stepping", "clamp_predictor")) c.run.step.clamp_predictor = *v;
    if (auto v = r.count("stepping", "fp_max_iters")) c.run.step.max_iters = static_cast<int>(*v);
    if (auto v = r.number("stepping", "fp_tol")) c.run.step.tol = *v;
    if (auto v = r.count("stepping", "max_steps")) c.run.max_steps = *v;
    if (auto v = r.flag("stepping", "clip_to_horizon")) c.run.clip_to_horizon = *v;
    if (!(ctl.tau0 > 0.0)) r.fail(r.section_line("stepping"), "tau0 must be positive");
    if (!(ctl.tau_min > 0.0)) r.fail(r.section_line("stepping"), "tau_min must be positive");

    // guard
    if (auto v = r.flag("guard", "strict")) c.run.strict = *v;
    if (auto v = r.number("guard", "quench_eps")) {
        if (!(*v > 0.0 && *v < 1.0)) r.fail(r.line_of("guard", "quench_eps"), "quench_eps must lie in (0, 1)");
        spec.quench_eps = *v;
    }

    // output
    if (auto v = r.word("output", "prefix")) c.output.prefix = *v;
    if (auto v = r.word("output", "formats")) {
        c.output.jsonl = c.output.csv = c.output.checkpoint = false;
        for (const auto& f : tokens(*v)) {
            if (f == "jsonl") c.output.jsonl = true;
            else if (f == "csv") c.output.csv = true;
            else if (f == "checkpoint") c.output.checkpoint = true;
            else r.fail(r.line_of("output", "formats"), "unknown format '" + f + "'");
        }
    }
    if (auto v = r.word("output", "resume")) c.output.resume = *v;

    // optional sections
    if (auto v = r.word("stability", "mode", {"frozen", "live"})) {
        c.stability.mode = *v == "frozen" ? StabilityMode::Frozen : StabilityMode::Live;
    }
    if (auto v = r.number("stability", "magnitude")) c.stability.magnitude = *v;
    if (auto v = r.count("stability", "steps")) c.stability.steps = *v;
    if (auto v = r.number("stability", "tau")) c.stability.tau = *v;
    if (auto v = r.number("stability", "stop_at")) c.stability.stop_at = *v;

    if (auto v = r.number("verify", "tau")) c.verify.tau = *v;
    if (auto v = r.count("verify", "random_matrices")) c.verify.random_matrices = *v;
    if (auto v = r.count("verify", "matrix_size")) c.verify.matrix_size = *v;
    if (auto v = r.count("verify", "halvings")) c.verify.halvings = static_cast<int>(*v);

    if (auto v = r.numbers("convergence", "taus")) c.convergence.taus = *v;
    if (auto v = r.number("convergence", "t_common")) c.convergence.t_common = *v;
    if (auto v = r.flag("convergence", "quench_runs")) c.convergence.quench_runs = *v;

    r.reject_unused();

    try {
        spec.validate();
    } catch (const Error& e) {
        r.fail(r.section_line("problem"), e.what());
    }
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw Error(ErrorKind::Config, "cannot read config " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str(), path.string());
}

}  // namespace kawarada
