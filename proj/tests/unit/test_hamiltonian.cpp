#include <cmath>

#include "doctest.h"
#include "detflow/hamiltonian.hpp"
#include "detflow/integrate.hpp"

using namespace detflow;

namespace {

// Period by direct integration: time between two successive maxima of v.
double integrated_period(const PotentialSpec& p, double v0) {
    IntegratorConfig<2> ic;
    ic.t_max = 200;
    ic.rel_tol = 1e-13;
    ic.abs_tol = 1e-15;
    ic.max_step = 0.01;
    EventSpec<2> ev;
    ev.name = "max";
    ev.g = [](double, const Vec<2>& s) { return s[1]; };
    ev.direction = Direction::Falling;
    ev.terminal = false;
    ic.events.push_back(ev);
    const auto tr = integrate<2>([&p](double, const Vec<2>& s) { return newton_field<double>(p, s); },
                                 Vec<2>{v0, 0}, ic);
    REQUIRE(tr.events.size() >= 3);
    return tr.events[2].t - tr.events[1].t;
}

} // namespace

TEST_CASE("critical points at the Paneitz case threshold") {
    const auto c = presets::paneitz();
    const double thr = case_threshold(c.beta);
    CHECK(thr == doctest::Approx(10 * std::sqrt(10.0)).epsilon(1e-14));
    const auto cps = critical_points(make_potential(thr, c));
    REQUIRE(cps.size() == 2);
    CHECK(cps[0].v == doctest::Approx(-1.5811388301).epsilon(1e-9));
    CHECK(cps[0].kind == CriticalKind::Max);
    CHECK(cps[1].v == doctest::Approx(0.7905694150).epsilon(1e-8));
    CHECK(cps[1].kind == CriticalKind::Inflection);
}

TEST_CASE("case labels") {
    const auto c = presets::paneitz();
    CHECK(case_classify(make_potential(0, c)).label == PotentialCase::Case1);
    CHECK(case_classify(make_potential(10, c)).label == PotentialCase::Case2);
    CHECK(case_classify(make_potential(40, c)).label == PotentialCase::Case3);
    const auto r = case_classify(make_potential(-10, c));
    CHECK(r.label == PotentialCase::Case2);
    CHECK(r.reflected);
    CHECK(case_classify(PotentialSpec{0, -1.5}).label == PotentialCase::Coercive);
}

TEST_CASE("periods agree with direct integration") {
    const auto c = presets::paneitz();
    for (double C : {0.0, 5.0, 20.0}) {
        const PotentialSpec p = make_potential(C, c);
        const auto cps = critical_points(p);
        double vmin = 0, barrier = 1e300;
        for (const auto& cp : cps) {
            if (cp.kind == CriticalKind::Min) vmin = cp.v;
            if (cp.kind == CriticalKind::Max) barrier = std::min(barrier, cp.V);
        }
        for (double frac : {0.1, 0.5, 0.9}) {
            const double H = potential_value(p, vmin) + frac * (barrier - potential_value(p, vmin));
            const double v0 = turning_points(p, H, vmin).lo;
            CHECK(orbit_period(p, H, vmin) == doctest::Approx(integrated_period(p, v0)).epsilon(1e-9));
        }
    }
}

TEST_CASE("delaunay family") {
    const auto c = presets::paneitz();
    const auto o = delaunay_family(c, 0.5);
    CHECK(o.H == doctest::Approx(2.229166666667).epsilon(1e-12));
    CHECK(o.v_lo == doctest::Approx(-0.741063280210).epsilon(1e-11));
    CHECK(o.v_hi == doctest::Approx(0.741063280210).epsilon(1e-11));
    CHECK(o.period == doctest::Approx(2.759346328495).epsilon(1e-11));
    CHECK(o.avg_slope == doctest::Approx(0).epsilon(1e-12));
    CHECK(o.bound_constant == doctest::Approx(1.936786565672).epsilon(1e-9));
    CHECK(delaunay_energy(c.beta, 0.0) == doctest::Approx(2.0 / 3));
    CHECK(delaunay_energy(c.beta, 1.0) == doctest::Approx(91.0 / 24));
    CHECK_THROWS_AS(delaunay_family(c, 1.0), Error);
    CHECK_THROWS_AS(delaunay_family(presets::conformal_laplacian(), 0.5), Error);
}

TEST_CASE("period near the separatrix and harmonic limit") {
    const PotentialSpec p = make_potential(0, presets::paneitz());
    CHECK(orbit_period(p, 91.0 / 24 - 1e-2) == doctest::Approx(5.4265262761).epsilon(1e-9));
    CHECK(orbit_period(p, 91.0 / 24 - 1e-8) == doctest::Approx(12.99143030846374).epsilon(1e-11));
    CHECK(orbit_period(p, 2.0 / 3 + 1e-12) == doctest::Approx(2 * M_PI * std::sqrt(3.0 / 20)).epsilon(1e-8));
}

TEST_CASE("average slope vs integration") {
    const auto c = presets::paneitz();
    const PotentialSpec p = make_potential(8, c);
    const auto cps = critical_points(p);
    double vmin = 0;
    for (const auto& cp : cps)
        if (cp.kind == CriticalKind::Min) vmin = cp.v;
    const double H = potential_value(p, vmin - 0.4);
    const double T = orbit_period(p, H, vmin);
    IntegratorConfig<3> ic;
    ic.t_max = T;
    ic.rel_tol = 1e-13;
    ic.abs_tol = 1e-15;
    const auto tr = integrate<3>(
        [&p](double, const Vec<3>& s) { return Vec<3>{s[1], -potential_slope(p, s[0]), s[0]}; },
        Vec<3>{vmin - 0.4, 0, 0}, ic);
    CHECK(average_slope(p, H, vmin) == doctest::Approx(tr.back()[2] / T).epsilon(1e-9));
}

TEST_CASE("explicit heteroclinic") {
    const auto c = presets::paneitz();
    const auto so = special_orbit(make_potential(0, c));
    CHECK(so.kind == OrbitKind::Heteroclinic);
    CHECK(so.A == doctest::Approx(std::sqrt(15.0 / 8)));
    CHECK(so.k == doctest::Approx(std::sqrt(10.0 / 3)));
    for (double t : {-3.0, -0.5, 0.0, 0.5, 3.0}) {
        const double h = 1e-4;
        const double du = (heteroclinic_u(c.beta, t + h) - heteroclinic_u(c.beta, t - h)) / (2 * h);
        if (t != 0.0) CHECK(du == doctest::Approx(heteroclinic_v(c.beta, t)).epsilon(1e-7));
        const double v = heteroclinic_v(c.beta, t);
        const double vd = so.A * so.k / std::pow(std::cosh(so.k * t), 2);
        CHECK(newton_energy(make_potential(0, c), v, vd) == doctest::Approx(91.0 / 24).epsilon(1e-13));
    }
}

TEST_CASE("homoclinic special orbit") {
    const auto c = presets::paneitz();
    const auto so = special_orbit(make_potential(10, c));
    CHECK(so.kind == OrbitKind::Homoclinic);
    const PotentialSpec p = make_potential(10, c);
    double emax = 0;
    for (std::size_t i = 0; i < so.samples.t.size(); ++i)
        emax = std::max(emax, std::abs(newton_energy(p, so.samples.v[i], so.samples.vdot[i]) - so.H));
    CHECK(emax < 1e-8);
    CHECK(so.v_minus == so.v_plus);
    CHECK_THROWS_AS(special_orbit(make_potential(40, c)), Error);
}

TEST_CASE("potential panels") {
    const auto panels = potential_figure(presets::paneitz(), 11);
    REQUIRE(panels.size() == 3);
    CHECK(panels[0].C == 0.0);
    CHECK(panels[2].C > case_threshold(presets::paneitz().beta));
    CHECK(panels[1].v.size() == 11);
}
