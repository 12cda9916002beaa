#include <cmath>
#include <random>

#include "doctest.h"
#include "detflow/integrate.hpp"
#include "detflow/model.hpp"

using namespace detflow;

namespace {

// Paneitz forms written out by hand.
double K_paneitz(double x, double y, double z) { return -6 * x * z + 3 * y * y + 16 * std::pow(x, 4) - 20 * x * x + 4; }
double Q_paneitz(double x, double, double z) { return -9 * z + 32 * x * x * x - 60 * x; }
double zdot_paneitz(double x, double y, double z) {
    return -4 * x * z + 2 * y * y + (4.0 / 3.0) * (8 * x * x - 5) * y + (8.0 / 3.0) * (4 * x * x - 1) * (x * x - 1);
}

} // namespace

TEST_CASE("beta from the gamma triple") {
    CHECK(presets::paneitz().beta == doctest::Approx(-7.0 / 16).epsilon(1e-15));
    CHECK(presets::half_torsion().beta == doctest::Approx(-31.0 / 58).epsilon(1e-15));
    CHECK(presets::conformal_laplacian().beta == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(preset("half-torsion").name == "half-torsion");
    CHECK_THROWS_AS(preset("nope"), Error);
}

TEST_CASE("degenerate coefficients are rejected") {
    try {
        make_coefficients(0, 1, 0);
        FAIL("expected error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ZeroGamma3);
    }
    try {
        make_coefficients(0, -12, 1);
        FAIL("expected error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DegenerateBeta);
    }
}

TEST_CASE("exp4u overflow guard") {
    CHECK(exp4u(0.0) == 1.0);
    CHECK(exp4u(-200.0) == 0.0);
    CHECK_THROWS_AS(exp4u(200.0), Error);
}

TEST_CASE("generic invariants reduce to the hand-written Paneitz forms") {
    const auto c = presets::paneitz();
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> U(-3, 3);
    double dK = 0, dQ = 0, dz = 0;
    for (int i = 0; i < 100000; ++i) {
        const State3 s{U(rng), U(rng), U(rng)};
        dK = std::max(dK, std::abs(invariant_K(c, s) - K_paneitz(s.x, s.y, s.z)));
        dQ = std::max(dQ, std::abs(invariant_Q(c, s) - Q_paneitz(s.x, s.y, s.z)));
        const double ref = zdot_paneitz(s.x, s.y, s.z);
        dz = std::max(dz, std::abs(system_rhs(c, s)[2] - ref) / (1 + std::abs(ref)));
    }
    CHECK(dK <= 1e-12);   // values reach ~1e3
    CHECK(dQ <= 1e-12);
    CHECK(dz <= 1e-13);
}

TEST_CASE("round solution data") {
    const auto c = presets::paneitz();
    for (double t : {0.0, 0.3, 1.0, 2.5}) {
        const double th = std::tanh(t), s2 = 1 - th * th;
        const State3 s{th, s2, -2 * s2 * th};
        CHECK(invariant_K(c, s) == doctest::Approx(7 * s2 * s2).epsilon(1e-13));
        const auto f = system_rhs(c, s);
        CHECK(f[2] == doctest::Approx(-2 * s2 * (1 - 3 * th * th)).epsilon(1e-12));
        CHECK(nt_residual(c, {t, -std::log(std::cosh(t)), -th, -s2, 2 * s2 * th}) == doctest::Approx(0).epsilon(1e-12));
    }
    CHECK(invariant_Q(c, {0, 1, 0}) == 0.0);
    CHECK(q_limit(c) == doctest::Approx(-28));
}

TEST_CASE("nt residual vanishes on the round solution for every beta") {
    for (const auto& c : {presets::paneitz(), presets::half_torsion(), presets::conformal_laplacian(),
                          make_coefficients(1, 3, 2)}) {
        for (double t : {0.0, 0.7, 3.0}) {
            const double th = std::tanh(t), s2 = 1 - th * th;
            CHECK(std::abs(nt_residual(c, {t, -std::log(std::cosh(t)), -th, -s2, 2 * s2 * th})) < 1e-12);
        }
        CHECK(std::abs(nt_residual(c, {0, 0, 0, 1, 0})) < 1e-14);
    }
}

TEST_CASE("stationary points of the reduced system") {
    for (const auto& c : {presets::paneitz(), presets::half_torsion(), presets::conformal_laplacian()}) {
        for (double x : {1.0, -1.0}) {
            const auto f = system_rhs(c, State3{x, 0, 0});
            CHECK(std::abs(f[2]) < 1e-12);
        }
        if (c.beta < -0.25) {
            const double x = std::sqrt(-(4 * c.beta + 1) / 3);
            CHECK(std::abs(system_rhs(c, State3{x, 0, 0})[2]) < 1e-12);
        }
    }
    CHECK(std::abs(system_rhs(presets::paneitz(), State3{0.5, 0, 0})[2]) < 1e-14);
}

TEST_CASE("cylinder equation and the reduced system agree") {
    const auto c = presets::half_torsion();
    // start from round data perturbed in u''
    const double eps = 0.2, u0 = 0.25 * std::log(((2 * c.beta + 0.5) - 0.5 * (1 + c.beta) * 0.64) / (1.5 * c.beta));
    IntegratorConfig<4> ic4;
    ic4.t_max = 3;
    ic4.rel_tol = 1e-12;
    ic4.abs_tol = 1e-14;
    ic4.sample_times = {0.5, 1.0, 2.0, 3.0};
    ic4.record_steps = false;
    const auto cyl = integrate<4>([&c](double, const Vec<4>& u) { return cylinder_rhs(c, u); },
                                  Vec<4>{u0, 0, -(1 - eps), 0}, ic4);
    IntegratorConfig<3> ic3;
    ic3.t_max = 3;
    ic3.rel_tol = 1e-12;
    ic3.abs_tol = 1e-14;
    ic3.sample_times = ic4.sample_times;
    ic3.record_steps = false;
    const auto red = integrate<3>([&c](double, const Vec<3>& s) { return system_rhs(c, s); },
                                  Vec<3>{0, 1 - eps, 0}, ic3);
    REQUIRE(cyl.size() == red.size());
    for (std::size_t i = 0; i < cyl.size(); ++i) {
        CHECK(-cyl.states[i][1] == doctest::Approx(red.states[i][0]).epsilon(1e-9));
        CHECK(-cyl.states[i][2] == doctest::Approx(red.states[i][1]).epsilon(1e-9));
        const auto& u = cyl.states[i];
        CHECK(std::abs(nt_residual(c, {cyl.times[i], u[0], u[1], u[2], u[3]})) < 1e-8);
    }
}

TEST_CASE("f undefined near K = 0") {
    const auto c = presets::paneitz();
    const auto d = diagnostics(c, {0.5, 0, 0}, 27);   // on the disc: K = 0
    CHECK(std::abs(invariant_K(c, {0.5, 0, 0})) < 1e-13);
    CHECK_FALSE(d.f_defined);
}

TEST_CASE("F script for Paneitz") {
    const auto c = presets::paneitz();
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(-2, 2);
    for (int i = 0; i < 100; ++i) {
        const State3 s{U(rng), U(rng), U(rng)};
        const auto d = diagnostics(c, s, 0);
        const double g = d.G_script;
        const double ref = 0.5 * d.G_script_dot * d.G_script_dot - 8.0 / 9.0 * g * g * g + 10.0 / 3.0 * g * g -
                           8.0 / 3.0 * g;
        CHECK(d.F_script == doctest::Approx(ref).epsilon(1e-12));
    }
}
