// One line per acceptance criterion. Tolerances and time limits are pinned here.
// Usage: acceptance [path-to-cli] [scratch-dir]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "kawarada/guard.hpp"
#include "kawarada/harness.hpp"
#include "kawarada/spectral.hpp"
#include "kawarada/stepper.hpp"
#include "support/oracles.hpp"

using namespace kawarada;
namespace fs = std::filesystem;

namespace {

struct Verdict {
    bool ok = true;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    double time_limit;  // seconds
    std::function<Verdict()> check;
};

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

ProblemSpec cube_spec(double a, double q) {
    ProblemSpec spec;
    spec.edges = {a, a, a};
    spec.q = q;
    return spec;
}

std::vector<double> smooth_state(std::mt19937_64& rng, const Mesh& mesh) {
    std::uniform_real_distribution<double> amp(0.05, 0.2);
    const double a1 = amp(rng);
    const double a2 = 0.3 * amp(rng);
    std::vector<double> v(mesh.size());
    for (std::size_t n = 0; n < v.size(); ++n) {
        const auto x = mesh.coordinates(n);
        double s1 = 1.0;
        double s2 = 1.0;
        for (std::size_t d = 0; d < mesh.dim(); ++d) {
            s1 *= std::sin(std::numbers::pi * x[d]);
            s2 *= std::sin(2.0 * std::numbers::pi * x[d]);
        }
        v[n] = a1 * s1 + a2 * s2 + 0.05;
    }
    return v;
}

double min_entry(const DenseMatrix& m) {
    double lo = 1e300;
    for (std::size_t i = 0; i < m.dim(); ++i)
        for (std::size_t j = 0; j < m.dim(); ++j) lo = std::min(lo, m(i, j));
    return lo;
}

// 1: 1D benchmark quenching time and the size of v_t before quench
Verdict benchmark_1d() {
    const double reference = 0.780265747310047;
    const auto tr = run(benchmark1d_problem(), benchmark1d_mesh(200), benchmark1d_options());
    if (tr.outcome.kind != OutcomeKind::Quenched) return {false, "outcome " + to_string(tr.outcome.kind)};
    const double T = tr.outcome.quench_time;
    const double D = tr.last_derivative();
    const bool ok = std::abs(T - reference) <= 0.01 * reference && D > 600.0;
    return {ok, "T=" + fmt("%.6f", T) + " ref " + fmt("%.6f", reference) + " (1%), bracket " +
                    fmt("%.1e", tr.outcome.bracket) + ", last max v_t=" + fmt("%.4g", D) + " > 600"};
}

// 2: one step against the dense formula
Verdict oracle_equivalence() {
    double worst = 0.0;
    std::uniform_real_distribution<double> ed(0.5, 2.0);
    for (double q : {0.0, 1.0, 2.0}) {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            std::mt19937_64 rng(1000 + seed);
            const auto mesh = oracle::random_mesh(rng, {3, 3, 3});
            auto spec = cube_spec(1.0, q);
            spec.edges = {ed(rng), ed(rng), ed(rng)};
            const auto v = oracle::random_vector(rng, mesh.size(), 0.0, 0.5);
            LodScheme scheme(mesh, spec);
            const auto got = scheme.step(StateVector{v, 0.0, 0}, 1e-3).state.values;
            worst = std::max(worst, oracle::rel_diff(got, oracle::lod_step(mesh, spec, v, 1e-3)));
        }
    }
    return {worst <= 1e-11, "max rel diff " + fmt("%.2e", worst) + " <= 1e-11 over 60 cases"};
}

// 3: splitting defect shrinks like tau^2 per step
Verdict splitting_consistency() {
    double lo = 1e300;
    double hi = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        std::mt19937_64 rng(2000 + seed);
        const auto mesh = oracle::random_mesh(rng, {3, 3, 3});
        LodScheme scheme(mesh, cube_spec(1.0, 1.0));
        const StateVector s{smooth_state(rng, mesh), 0.0, 0};
        // tau small enough that tau ||M|| << 1 on the finest random spacing
        const double r = scheme.step_defect(s, 1e-4) / scheme.step_defect(s, 5e-5);
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    return {lo >= 3.0 && hi <= 5.0, "defect ratio in [" + fmt("%.3f", lo) + ", " + fmt("%.3f", hi) + "] within [3, 5]"};
}

// 4: Gershgorin bound dominates ||T||_2
Verdict gersgorin() {
    std::mt19937_64 rng(3000);
    std::uniform_int_distribution<std::size_t> nd(1, 25);
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
        const auto axis = oracle::random_axis_mixed(rng, nd(rng));
        const double norm = oracle::spectral_norm(oracle::second_difference(axis.spacings()));
        worst = std::max(worst, norm / gersgorin_T_bound(axis));
    }
    return {worst <= 1.0 + 1e-12, "max ||T||/bound " + fmt("%.6f", worst) + " <= 1 on 50 grids"};
}

// 5: factor signs inside the positivity regime
Verdict factor_signs() {
    std::mt19937_64 rng(4000);
    std::uniform_real_distribution<double> qd(0.0, 2.0);
    std::uniform_real_distribution<double> ed(0.5, 2.0);
    double inv_min = 1e300;
    double fwd_min = 1e300;
    for (int k = 0; k < 20; ++k) {
        const auto mesh = oracle::random_mesh(rng, {4, 3, 3}, 3, true);
        const std::array<double, 3> edges{ed(rng), ed(rng), ed(rng)};
        const double q = qd(rng);
        const auto phi = oracle::power_phi(mesh, edges, q);
        const double cap = cfl_step_cap(mesh, eval_degeneracy(mesh, edges, q), edges);
        for (double tau : {cap, 0.3 * cap}) {
            for (std::size_t s = 0; s < 3; ++s) {
                const auto m = oracle::directional(mesh, s, phi, edges[s]);
                const auto id = oracle::eye(mesh.size());
                inv_min = std::min(inv_min, min_entry(oracle::inverse(id - m.scaled(0.5 * tau))));
                fwd_min = std::min(fwd_min, min_entry(id + m.scaled(0.5 * tau)));
            }
        }
    }
    return {inv_min >= -1e-13 && fwd_min >= 0.0,
            "min inverse entry " + fmt("%.2e", inv_min) + " >= -1e-13, min forward entry " + fmt("%.2e", fwd_min) + " >= 0"};
}

// 6: (I - tau/2 M) 1 >= 1
Verdict ones_vector() {
    std::mt19937_64 rng(5000);
    std::uniform_real_distribution<double> qd(0.0, 2.0);
    std::uniform_real_distribution<double> gd(2.0, 4.0);
    double lo = 1e300;
    for (int k = 0; k < 50; ++k) {
        std::vector<AxisGrid> axes;
        for (int s = 0; s < 3; ++s) {
            // every other grid is strongly graded on all axes
            axes.push_back(k % 2 ? make_graded_axis(3 + k % 3, gd(rng)) : oracle::random_axis_mixed(rng, 3 + k % 3));
        }
        const Mesh mesh(std::move(axes));
        const std::array<double, 3> edges{1.0, 1.5, 0.7};
        const double q = qd(rng);
        const auto phi = oracle::power_phi(mesh, edges, q);
        const double cap = cfl_step_cap(mesh, eval_degeneracy(mesh, edges, q), edges);
        for (double tau : {0.01 * cap, 0.1 * cap, cap, 10.0 * cap}) {
            for (std::size_t s = 0; s < 3; ++s) {
                const auto m = oracle::directional(mesh, s, phi, edges[s]);
                const auto r = oracle::matvec(oracle::eye(mesh.size()) - m.scaled(0.5 * tau),
                                              std::vector<double>(mesh.size(), 1.0));
                for (double x : r) lo = std::min(lo, x);
            }
        }
    }
    return {lo >= 1.0 - 1e-13, "min component " + fmt("%.17g", lo) + " >= 1 - 1e-13"};
}

// 7: monotone growth from rest with guards passing
Verdict monotone_growth() {
    struct Cfg {
        std::size_t n;
        double a;
        double frac;
        double t_max;
    };
    const Cfg cfgs[] = {{5, 3.0, 1.0, 5.0}, {7, 3.0, 0.5, 5.0}, {7, 4.0, 1.0, 5.0}, {9, 4.0, 0.25, 5.0}, {6, 2.0, 1.0, 3.0}};
    double worst = 0.0;
    bool positive = true;
    bool guards = true;
    std::string outcomes;
    for (const auto& c : cfgs) {
        const Mesh mesh({make_uniform_axis(c.n), make_uniform_axis(c.n), make_uniform_axis(c.n)});
        auto spec = cube_spec(c.a, 1.0);
        spec.t_max = c.t_max;
        RunOptions opts;
        opts.controller.adaptive = false;
        opts.controller.tau0 = c.frac * cfl_step_cap(mesh, make_degeneracy(spec, mesh), spec.edges);
        opts.strict = true;
        opts.keep_states = true;
        const auto tr = run(spec, mesh, opts);
        guards = guards && tr.outcome.kind != OutcomeKind::GuardBlocked && tr.criteria.failures().empty();
        outcomes += (outcomes.empty() ? "" : ",") + to_string(tr.outcome.kind);
        for (std::size_t l = 1; l < tr.states.size(); ++l) {
            for (std::size_t k = 0; k < mesh.size(); ++k) {
                worst = std::min(worst, tr.states[l][k] - tr.states[l - 1][k]);
                positive = positive && tr.states[l][k] > 0.0;
            }
        }
    }
    return {guards && positive && worst >= -1e-12,
            "worst decrease " + fmt("%.2e", worst) + " >= -1e-12, positive " + (positive ? "yes" : "no") +
                ", guards " + (guards ? "pass" : "FAIL") + " (" + outcomes + ")"};
}

// 8: mu(M_sigma) <= K
Verdict log_norm_k() {
    std::mt19937_64 rng(6000);
    std::uniform_real_distribution<double> qd(0.0, 2.0);
    std::uniform_real_distribution<double> ed(0.5, 2.0);
    double worst = -1e300;
    for (int k = 0; k < 20; ++k) {
        const auto mesh = oracle::random_mesh(rng, {4, 3, 3}, 3, true);
        const std::array<double, 3> edges{ed(rng), ed(rng), ed(rng)};
        const double q = qd(rng);
        const double K = check_regularity(mesh, eval_degeneracy(mesh, edges, q), edges).K;
        const auto phi = oracle::power_phi(mesh, edges, q);
        for (std::size_t s = 0; s < 3; ++s) {
            const double mu = oracle::log_norm(oracle::directional(mesh, s, phi, edges[s]));
            worst = std::max(worst, (mu - K) / (1.0 + std::abs(K)));
        }
    }
    return {worst <= 1e-9, "max (mu - K)/(1 + |K|) = " + fmt("%.3e", worst) + " <= 1e-9"};
}

// 9: ||E(aA)|| <= E(a mu(A))
Verdict exp_bound() {
    std::mt19937_64 rng(7000);
    std::normal_distribution<double> d(0.0, 0.3);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        DenseMatrix a(20);
        for (std::size_t i = 0; i < 20; ++i)
            for (std::size_t j = 0; j < 20; ++j) a(i, j) = d(rng);
        const double mu = oracle::log_norm(a);
        for (double alpha : {0.1, 1.0}) {
            const double lhs = oracle::spectral_norm(matrix_exp(a.scaled(alpha)));
            worst = std::max(worst, lhs / std::exp(alpha * mu));
        }
    }
    return {worst <= 1.0 + 1e-10, "max ratio " + fmt("%.12f", worst) + " <= 1 over 200 cases"};
}

// 10: frozen-source twin runs
Verdict frozen_stability() {
    double k0_worst = 0.0;
    double env_worst = 0.0;
    double defect = 0.0;
    std::mt19937_64 rng(8000);
    for (int k = 0; k < 6; ++k) {
        const bool k_zero = k < 3;
        const Mesh mesh = k_zero ? Mesh({make_uniform_axis(3), make_uniform_axis(3), make_uniform_axis(3)})
                                 : oracle::random_mesh(rng, {3, 3, 3}, 3, true);
        auto spec = cube_spec(1.0, k_zero ? 0.0 : 1.0);
        spec.u0 = InitialField::sine(0.3);
        StabilityOptions so;
        so.perturbation.seed = 100 + static_cast<std::uint64_t>(k);
        const double cap = cfl_step_cap(mesh, make_degeneracy(spec, mesh), spec.edges);
        for (int l = 0; l < 30; ++l) so.tau_schedule.push_back(cap * (l % 3 == 0 ? 1.0 : l % 3 == 1 ? 0.5 : 0.1));
        const auto r = stability_run(spec, mesh, so);
        if (k_zero) k0_worst = std::max(k0_worst, r.c_emp);
        env_worst = std::max(env_worst, r.c_emp / r.envelope);
        defect = std::max(defect, r.recursion_defect);
    }
    return {k0_worst <= 1.0 + 1e-6 && env_worst <= 1.0 + 1e-12 && defect <= 1e-12,
            "K=0 max c_emp " + fmt("%.12f", k0_worst) + " <= 1+1e-6, max c_emp/envelope " + fmt("%.3e", env_worst) +
                " <= 1, recursion defect " + fmt("%.1e", defect)};
}

// 11: live-source twin runs up to max v = 0.5
Verdict live_stability() {
    double worst = 0.0;
    bool conclusive = true;
    struct Cfg {
        Mesh mesh;
        ProblemSpec spec;
        double tau;
    };
    std::vector<Cfg> cfgs;
    cfgs.push_back({Mesh({make_uniform_axis(3), make_uniform_axis(3), make_uniform_axis(3)}), cube_spec(2.0, 1.0), 2e-3});
    cfgs.push_back({Mesh({make_graded_axis(3, 1.5), make_uniform_axis(4), make_uniform_axis(3)}), cube_spec(1.5, 2.0), 1e-3});
    cfgs.push_back({benchmark1d_mesh(30), benchmark1d_problem(), 1e-3});
    for (auto& c : cfgs) {
        StabilityOptions so;
        so.mode = StabilityMode::Live;
        so.stop_at = 0.5;
        so.tau_schedule.assign(20000, c.tau);
        const auto r = stability_run(c.spec, c.mesh, so);
        conclusive = conclusive && !r.inconclusive;
        const double bound = std::exp(r.G * r.elapsed) * (1.0 + 3.0 * r.K * r.elapsed) * 1.1;
        worst = std::max(worst, r.c_emp / bound);
    }
    return {conclusive && worst <= 1.0, "max c_emp/(1.1 envelope) " + fmt("%.3e", worst) + " <= 1, conclusive " +
                                            (conclusive ? "yes" : "no")};
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// 12: two CLI invocations give identical files
Verdict determinism(const std::string& cli, const fs::path& scratch) {
    if (cli.empty()) return {false, "no CLI path given"};
    fs::create_directories(scratch);
    const auto cfg = scratch / "determinism.ini";
    std::ofstream(cfg) << "seed = 5\n[problem]\nedges = pi 1 1\nweight = endpoint\nu0 = sine\nu0_value = 0.001\n"
                          "[grid]\ndim = 1\nn = 100\n[stepping]\ntau0 = 1e-4\ntau_min = 1e-9\n[guard]\n[output]\n"
                          "[stability]\nmode = live\nsteps = 2000\ntau = 1e-3\n";
    bool same = true;
    for (const char* sub : {"run", "stability"}) {
        std::string ext = std::string(sub) == "run" ? "" : ".json";
        for (const char* tag : {"a", "b"}) {
            const std::string cmd = cli + " " + sub + " " + cfg.string() + " --seed 5 --out " +
                                    (scratch / (std::string(sub) + tag + ext)).string() + " > /dev/null";
            if (std::system(cmd.c_str()) != 0) return {false, std::string(sub) + " invocation failed"};
        }
    }
    for (const char* f : {".jsonl", ".csv", ".checkpoint.json"}) {
        const auto a = slurp(scratch / ("runa" + std::string(f)));
        same = same && !a.empty() && a == slurp(scratch / ("runb" + std::string(f)));
    }
    const auto sa = slurp(scratch / "stabilitya.json");
    same = same && !sa.empty() && sa == slurp(scratch / "stabilityb.json");
    return {same, same ? "trace, csv, checkpoint and stability files bit-identical" : "files differ"};
}

}  // namespace

int main(int argc, char** argv) {
    const std::string cli = argc > 1 ? argv[1] : "";
    const fs::path scratch = argc > 2 ? fs::path(argv[2]) : fs::temp_directory_path() / "kawarada_acceptance";

    const std::vector<Criterion> criteria = {
        {1, "benchmark_1d_quench", 60, benchmark_1d},
        {2, "oracle_equivalence", 10, oracle_equivalence},
        {3, "splitting_consistency", 10, splitting_consistency},
        {4, "gersgorin_bound", 30, gersgorin},
        {5, "factor_signs", 30, factor_signs},
        {6, "ones_vector", 10, ones_vector},
        {7, "monotone_growth", 60, monotone_growth},
        {8, "log_norm_bound", 30, log_norm_k},
        {9, "exp_log_norm_bound", 30, exp_bound},
        {10, "frozen_stability", 30, frozen_stability},
        {11, "live_stability", 60, live_stability},
        {12, "determinism", 60, [&] { return determinism(cli, scratch); }},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.check();
        } catch (const std::exception& e) {
            v = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs < c.time_limit;
        const bool ok = v.ok && in_time;
        failed += ok ? 0 : 1;
        std::printf("%s %2d %-22s %s [%.2f s < %.0f s%s]\n", ok ? "PASS" : "FAIL", c.id, c.name.c_str(),
                    v.detail.c_str(), secs, c.time_limit, in_time ? "" : " EXCEEDED");
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
