#include <cmath>
#include <random>

#include "doctest.h"
#include "kawarada/error.hpp"
#include "kawarada/model.hpp"
#include "support/expect.hpp"

using namespace kawarada;
using testing_support::error_kind;

namespace {

DegeneracyField constant_phi(std::size_t n, double value) {
    DegeneracyField phi;
    phi.values.assign(n, value);
    phi.inv_norm = value;
    return phi;
}

}  // namespace

TEST_CASE("source examples") {
    const auto f = SourceFn::power(1.0);
    CHECK(eval_source(f, constant_phi(4, 1.0), std::vector<double>(4, 0.0)) == std::vector<double>(4, 1.0));
    CHECK(eval_source(f, constant_phi(4, 2.0), std::vector<double>(4, 0.5)) == std::vector<double>(4, 1.0));

    std::vector<double> v{0.1, 1.0, 0.2};
    CHECK(error_kind([&] { eval_source(f, constant_phi(3, 1.0), v); }) == ErrorKind::QuenchDomain);
    v[1] = std::nan("");
    CHECK(error_kind([&] { eval_source(f, constant_phi(3, 1.0), v); }) == ErrorKind::QuenchDomain);
}

TEST_CASE("source jacobian examples") {
    const auto f1 = SourceFn::power(1.0);
    CHECK(eval_source_jacobian_diag(f1, constant_phi(2, 1.0), std::vector<double>(2, 0.0))[0] ==
          doctest::Approx(1.0));
    CHECK(eval_source_jacobian_diag(f1, constant_phi(2, 1.0), std::vector<double>(2, 0.5))[1] ==
          doctest::Approx(4.0));
    const auto f2 = SourceFn::power(2.0);
    CHECK(eval_source_jacobian_diag(f2, constant_phi(2, 2.0), std::vector<double>(2, 0.0))[0] ==
          doctest::Approx(1.0));
}

TEST_CASE("power family rejects r below 1") {
    CHECK(error_kind([] { SourceFn::power(0.5); }) == ErrorKind::InvalidArgument);
    CHECK(error_kind([] { SourceFn::power(1.0, 0.0); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("property: canonical sources are increasing and blow up") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0 - 1e-9);
    for (double r : {1.0, 1.5, 2.0, 3.0}) {
        const auto f = SourceFn::power(r);
        CHECK(f.f(1.0 - 1e-8) > 1e6);
        for (int i = 0; i < 500; ++i) {
            double a = u(rng);
            double b = u(rng);
            if (a > b) std::swap(a, b);
            if (a == b) continue;
            CHECK(f.f(b) > f.f(a));
            CHECK(f.f_prime(a) >= 0.0);
            // derivative agrees with a central difference
            const double x = 0.5 * a;
            const double d = 1e-6;
            CHECK(f.f_prime(x) == doctest::Approx((f.f(x + d) - f.f(x - d)) / (2 * d)).epsilon(1e-6));
        }
    }
}

TEST_CASE("initial fields") {
    const Mesh mesh({make_uniform_axis(3), make_uniform_axis(3)});
    ProblemSpec spec;
    spec.u0 = InitialField::sine(0.5);
    const auto v = initial_state(spec, mesh);
    CHECK(v[mesh.flat_index(1, 1, 0)] == doctest::Approx(0.5));
    CHECK(v[mesh.flat_index(0, 0, 0)] == doctest::Approx(0.5 * 0.5));

    const Mesh line({make_uniform_axis(3)});
    spec.u0 = InitialField::sine(0.001);
    CHECK(initial_state(spec, line)[1] == doctest::Approx(0.001));

    spec.u0 = InitialField::constant(1.0);
    CHECK(error_kind([&] { initial_state(spec, line); }) == ErrorKind::InvalidArgument);
    spec.u0 = InitialField{};
    spec.u0.nodal = {0.1, 0.2};
    CHECK(error_kind([&] { initial_state(spec, line); }) == ErrorKind::InvalidArgument);
    spec.u0.nodal = {0.1, 0.2, 0.3};
    CHECK(initial_state(spec, line)[2] == 0.3);
}

TEST_CASE("problem validation") {
    ProblemSpec spec;
    CHECK_NOTHROW(spec.validate());
    spec.edges[1] = 0.0;
    CHECK(error_kind([&] { spec.validate(); }) == ErrorKind::InvalidArgument);
    spec.edges[1] = 1.0;
    spec.t_max = spec.t0;
    CHECK(error_kind([&] { spec.validate(); }) == ErrorKind::InvalidArgument);
    spec.t_max = 1.0;
    spec.quench_eps = 0.0;
    CHECK(error_kind([&] { spec.validate(); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("property: g is componentwise monotone in v") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 0.999);
    const auto f = SourceFn::power(1.0);
    const auto phi = constant_phi(50, 0.7);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> a(50);
        std::vector<double> b(50);
        for (std::size_t i = 0; i < 50; ++i) {
            a[i] = u(rng);
            b[i] = a[i] + (0.999 - a[i]) * 0.5;
        }
        const auto ga = eval_source(f, phi, a);
        const auto gb = eval_source(f, phi, b);
        for (std::size_t i = 0; i < 50; ++i) CHECK(gb[i] >= ga[i]);
    }
}
