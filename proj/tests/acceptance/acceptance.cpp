// One line per acceptance criterion; exit status is the number of failures.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include <boost/multiprecision/float128.hpp>

#include "detflow/bubble.hpp"
#include "detflow/disc.hpp"
#include "detflow/hamiltonian.hpp"
#include "detflow/integrate.hpp"
#include "detflow/linear.hpp"
#include "detflow/model.hpp"
#include "detflow/shooting.hpp"

using namespace detflow;
using boost::multiprecision::float128;

namespace {

int failures = 0;

void report(int id, const char* title, bool ok, const std::string& detail, double seconds) {
    std::printf("[%s] %2d %-34s %s (%.1fs)\n", ok ? "PASS" : "FAIL", id, title, detail.c_str(), seconds);
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

IntegratorConfig<3, float128> quad_config(double t_max, const std::vector<double>& ts) {
    IntegratorConfig<3, float128> ic;
    ic.t_max = t_max;
    ic.rel_tol = float128(1e-24);
    ic.abs_tol = float128(1e-26);
    ic.max_step = float128(0.1);
    ic.min_step = float128(1e-20);
    for (double t : ts) ic.sample_times.push_back(float128(t));
    return ic;
}

std::vector<double> grid(double a, double b, int n) {
    std::vector<double> g;
    for (int i = 1; i < n; ++i) g.push_back(a + (b - a) * i / n);
    return g;
}

// d/dt of a scalar function along the flow. The five-point stencil in the
// direction of the vector field is exact for polynomials of degree <= 4, so for
// K, Q, F_C and G_C only roundoff remains.
template <class F>
double flow_derivative(const Coefficients& c, const State3& s, F&& f, double scale = 1e-2) {
    const auto v = system_rhs(c, s);
    const double h = scale / (1.0 + std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]));
    auto at = [&](double k) { return f(State3{s.x + k * h * v[0], s.y + k * h * v[1], s.z + k * h * v[2]}); };
    return (at(-2.0) - 8.0 * at(-1.0) + 8.0 * at(1.0) - at(2.0)) / (12.0 * h);
}

struct Ladder {
    double K = 0, Q = 0, F = 0, G = 0, f = 0;
    int trajectories = 0;
    std::size_t states = 0;
};

Ladder conservation_ladder(const Coefficients& c, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    Ladder L;
    const double b = c.beta;
    const double qrate = (32.0 / 3.0) * (1.0 + b);
    for (int n = 0; n < 50; ++n) {
        const State3 s0{U(rng), U(rng), U(rng)};
        const double C = 30.0 * U(rng);
        IntegratorConfig<3> ic;
        ic.t_max = 5.0;
        // residuals are absolute, so stop once a blowing-up run leaves the box
        ic.blowup_norm = 10.0;
        ic.blowup_trigger = [](const Vec<3>& s) { return std::abs(s[0]) > 3.0; };
        const auto tr = integrate<3>([&c](double, const Vec<3>& s) { return system_rhs(c, s); }, s0.array(), ic);
        ++L.trajectories;
        for (const auto& a : tr.states) {
            const State3 s = State3::from(a);
            ++L.states;
            const double K = invariant_K(c, s);
            const auto d = diagnostics(c, s, C);
            const double dK = flow_derivative(c, s, [&](const State3& q) { return invariant_K(c, q); });
            const double dQ = flow_derivative(c, s, [&](const State3& q) { return invariant_Q(c, q); });
            const double dF = flow_derivative(c, s, [&](const State3& q) { return diagnostics(c, q, C).F_C; });
            const double dG = flow_derivative(c, s, [&](const State3& q) { return diagnostics(c, q, C).G_C; });
            L.K = std::max(L.K, std::abs(dK + 4.0 * s.x * K));
            L.Q = std::max(L.Q, std::abs(dQ + qrate * K));
            L.F = std::max(L.F, std::abs(dF - 2.0 * s.y * d.G_C));
            L.G = std::max(L.G, std::abs(dG - (2.0 / 3.0) * K));
            // f = (Q - 64 beta)/K by the quotient rule, relative to |f| away from K = 0
            if (std::abs(K) > 1e-2) {
                const double df = (dQ * K - (invariant_Q(c, s) - q_limit(c)) * dK) / (K * K);
                L.f = std::max(L.f, std::abs(df - 4.0 * s.x * d.f + qrate) / (1.0 + std::abs(d.f)));
            }
        }
    }
    return L;
}

bool ladder_ok(const Ladder& L) { return L.K <= 1e-6 && L.Q <= 1e-6 && L.F <= 1e-6 && L.G <= 1e-6 && L.f <= 1e-6; }

std::string ladder_detail(const Ladder& L) {
    return fmt("K %.1e Q %.1e F %.1e G %.1e f %.1e over %d runs/%zu states (tol 1e-6)", L.K, L.Q, L.F, L.G, L.f,
               L.trajectories, L.states);
}

struct DiscCheck {
    DiscRange range;
    DiscOrbit orbit;
};

DiscCheck disc_check(const Coefficients& c, double C) { return {disc_range(c), disc_orbit(c, C)}; }

bool disc_orbit_ok(const DiscOrbit& o) { return o.max_K <= 1e-6 && o.max_Q_dev <= 1e-6 && o.max_ode_residual <= 1e-8; }

struct Trichotomy {
    ShootOutcome round, large;
    double eps_mid = -1.0, lambda_mid = 0.0;
};

Trichotomy trichotomy(const Coefficients& c, double lambda_hi) {
    Trichotomy t;
    t.round = classify_trajectory(c, 0.0);
    t.large = classify_trajectory(c, 10.0);
    for (int i = 1; i < 50; ++i) {
        const double e = 0.01 * i;
        const ShootOutcome o = classify_trajectory(c, e);
        if (o.verdict == Verdict::Convergent && o.lambda > q_limit(c) && o.lambda <= lambda_hi) {
            t.eps_mid = e;
            t.lambda_mid = o.lambda;
            break;
        }
    }
    return t;
}

struct Admissible {
    EpsBarResult bar;
    AdmissibleProfile prof;
    AdmissibilityReport rep;
    SphereProfile sphere;
};

Admissible admissible(const Coefficients& c) {
    Admissible a;
    ShootConfig cfg;
    cfg.t_max = 200.0;
    a.bar = find_eps_bar(c, {0.0, 10.0}, 1e-10, cfg);
    a.prof = admissible_profile(c, a.bar.eps_bar - 1e-6, cfg);
    a.rep = admissibility_check(c, a.prof, 0.25, 1e-3, 1e-2);
    std::vector<double> u;
    for (const auto& s : a.prof.states) u.push_back(s[3]);
    a.sphere = sphere_lift(a.prof.t, u);
    return a;
}

bool admissible_ok(const Admissible& a) {
    return a.prof.t.back() >= 200.0 - 1e-9 && a.rep.x_limit_ok && a.rep.volume_ok && a.sphere.max_asymmetry == 0.0 &&
           a.sphere.sup_abs_w > 0.01;
}

std::string admissible_detail(const Admissible& a) {
    return fmt("eps_bar %.10f, x on trailing 25%% in [%.6f, %.6f], volume %.7f, sup|w| %.4f, even %s "
               "(stable tail from t=%.2f, |X-p1|=%.1e)",
               a.bar.eps_bar, a.rep.x_window_min, a.rep.x_window_max, a.rep.volume, a.sphere.sup_abs_w,
               a.sphere.max_asymmetry == 0.0 ? "yes" : "no", a.prof.switch_time, a.prof.switch_distance);
}

} // namespace

int main() {
    const Coefficients P = presets::paneitz();
    const Coefficients HT = presets::half_torsion();

    {   // 1
        Timer tm;
        const auto ts = grid(0.0, 10.0, 1000);
        const auto tr = integrate<3, float128>(
            [&P](float128, const Vec<3, float128>& s) { return system_rhs_t<float128>(P, s); },
            Vec<3, float128>{0, 1, 0}, quad_config(10.0, ts));
        double ex = 0, eK = 0;
        for (std::size_t i = 0; i < tr.size(); ++i) {
            const double t = static_cast<double>(tr.times[i]);
            const State3 s{static_cast<double>(tr.states[i][0]), static_cast<double>(tr.states[i][1]),
                           static_cast<double>(tr.states[i][2])};
            const double sech = 1.0 / std::cosh(t);
            ex = std::max(ex, std::abs(static_cast<double>(tr.states[i][0] - tanh(float128(t)))));
            eK = std::max(eK, std::abs(invariant_K(P, s) - 7.0 * std::pow(sech, 4)));
        }
        const auto& e = tr.back();
        const double Qend = invariant_Q(P, {static_cast<double>(e[0]), static_cast<double>(e[1]), static_cast<double>(e[2])});
        const bool ok = tr.termination.kind == TerminationKind::ReachedTmax && ex <= 1e-8 && eK <= 1e-8 &&
                        std::abs(Qend + 28.0) <= 1e-8;
        report(1, "closed-form round solution", ok,
               fmt("sup|x-tanh| %.2e, sup|K-7sech^4| %.2e, Q(10)+28 %.1e (tol 1e-8)", ex, eK, Qend + 28.0),
               tm.seconds());
    }

    {   // 2
        Timer tm;
        const PotentialSpec p = make_potential(0.0, P);
        IntegratorConfig<2, float128> ic;
        ic.t_max = 10;
        ic.rel_tol = float128(1e-24);
        ic.abs_tol = float128(1e-26);
        ic.max_step = float128(0.1);
        ic.min_step = float128(1e-20);
        for (double t : grid(0.0, 10.0, 1000)) ic.sample_times.push_back(float128(t));
        const auto tr = integrate<2, float128>(
            [&p](float128, const Vec<2, float128>& s) { return newton_field<float128>(p, s); },
            Vec<2, float128>{0, float128(5) / 2}, ic);
        const float128 A = sqrt(float128(15) / 8), k = sqrt(float128(10) / 3);
        double err = 0;
        for (std::size_t i = 0; i < tr.size(); ++i)
            err = std::max(err, std::abs(static_cast<double>(tr.states[i][0] - A * tanh(k * tr.times[i]))));
        const SpecialOrbit so = special_orbit(p);
        const double dA = std::abs(so.A - std::sqrt(15.0 / 8.0));
        const bool ok = err <= 1e-8 && dA <= 1e-12 && so.A > 1.0;
        report(2, "closed-form Schwarzschild orbit", ok,
               fmt("sup|v-A tanh(kt)| %.2e (tol 1e-8), reported A %.15f vs sqrt(15/8) (diff %.1e)", err, so.A, dA),
               tm.seconds());
    }

    {   // 3
        Timer tm;
        const Ladder L = conservation_ladder(P, 20240601);
        report(3, "conservation ladder", ladder_ok(L), ladder_detail(L), tm.seconds());
    }

    {   // 4
        Timer tm;
        const SpectralReport s1 = spectral_report(P, {1.0, 0.0, 0.0});
        const SpectralReport sh = spectral_report(P, {0.5, 0.0, 0.0});
        const double want1[3] = {2.0, -2.0, -4.0};
        const std::array<double, 3> vec1[3] = {{1, 2, 4}, {1, -2, 4}, {1, -4, 16}};
        double ev = 0, vec = 0;
        for (int i = 0; i < 3; ++i) {
            ev = std::max(ev, std::abs(s1.eig.values[i] - std::complex<double>(want1[i], 0.0)));
            const auto& v = *s1.eig.vectors[i];
            for (int k = 0; k < 3; ++k) vec = std::max(vec, std::abs(v[k] / v[0] - vec1[i][k]));
        }
        // center-like point: one real -2 and the pair +-2i
        double evh = std::abs(sh.eig.values[0] - std::complex<double>(-2.0, 0.0));
        const auto a = sh.eig.values[1], b = sh.eig.values[2];
        evh = std::max(evh, std::min(std::abs(a - std::complex<double>(0, 2)) + std::abs(b - std::complex<double>(0, -2)),
                                     std::abs(a - std::complex<double>(0, -2)) + std::abs(b - std::complex<double>(0, 2))));
        const double res = std::max({s1.eig.max_charpoly_residual, s1.eig.max_vector_residual,
                                     sh.eig.max_charpoly_residual, sh.eig.max_vector_residual});
        const bool ok = ev <= 1e-10 && evh <= 1e-10 && vec <= 1e-10 && res <= 1e-10;
        report(4, "spectral pins", ok,
               fmt("|eig(1,0,0)-{2,-2,-4}| %.1e, |eig(1/2,0,0)-{-2,+-2i}| %.1e, eigvec dev %.1e, residual %.1e "
                   "(tol 1e-10)",
                   ev, evh, vec, res),
               tm.seconds());
    }

    {   // 5
        Timer tm;
        const DiscCheck d = disc_check(P, 27.0);
        const double er = std::max(std::abs(d.range.C_lo - 26.0), std::abs(d.range.C_hi - 28.0));
        const bool ok = er <= 1e-9 && disc_orbit_ok(d.orbit);
        report(5, "disc structure", ok,
               fmt("range (%.12f, %.12f) err %.1e; C=27 period %.9f: max|K| %.1e, max|Q+27| %.1e, ODE residual %.1e",
                   d.range.C_lo, d.range.C_hi, er, d.orbit.period, d.orbit.max_K, d.orbit.max_Q_dev,
                   d.orbit.max_ode_residual),
               tm.seconds());
    }

    {   // 6
        Timer tm;
        const OrbitSummary o0 = delaunay_family(P, 0.0);
        const PotentialSpec p = make_potential(0.0, P);
        const double Hsep = 91.0 / 24.0;
        const double T_near = orbit_period(p, Hsep - 1e-8);
        const double T_mid = orbit_period(p, Hsep - 1e-4);
        const double T_far = orbit_period(p, Hsep - 1e-2);
        const double T_small = orbit_period(p, 2.0 / 3.0 + 1e-10);
        const double harmonic = 2.0 * M_PI * std::sqrt(3.0 / 20.0);
        const bool cyl = o0.kind == OrbitKind::Constant && o0.v_lo == 0.0 && o0.v_hi == 0.0 && o0.bound_constant == 1.0;
        const bool grows = T_far < T_mid && T_mid < T_near;
        const bool ok = cyl && grows && T_near > 20.0 && std::abs(T_small - harmonic) <= 1e-4;
        report(6, "Delaunay endpoints", ok,
               fmt("alpha=0 constant %s; T(91/24-1e-2,-1e-4,-1e-8) = %.6f, %.6f, %.6f (need last > 20); "
                   "small-amplitude T %.10f vs %.10f",
                   cyl ? "yes" : "no", T_far, T_mid, T_near, T_small, harmonic),
               tm.seconds());
    }

    {   // 7
        Timer tm;
        const Trichotomy t = trichotomy(P, -26.0);
        const bool ok = t.round.verdict == Verdict::Convergent && std::abs(t.round.lambda + 28.0) <= 1e-3 &&
                        t.large.verdict == Verdict::Blowup && t.eps_mid > 0.0;
        report(7, "shooting trichotomy", ok,
               fmt("eps=0 %s Lambda %.6f; eps=10 %s at t=%.4f; eps=%.2f convergent Lambda %.6f in (-28,-26]",
                   to_string(t.round.verdict), t.round.lambda, to_string(t.large.verdict), t.large.blowup_time,
                   t.eps_mid, t.lambda_mid),
               tm.seconds());
    }

    {   // 8
        Timer tm;
        const Admissible a = admissible(P);
        report(8, "admissible second solution", admissible_ok(a), admissible_detail(a), tm.seconds());
    }

    {   // 9
        Timer tm;
        const Ladder L = conservation_ladder(HT, 20240602);
        const DiscRange r = disc_range(HT);
        const DiscCheck d = disc_check(HT, 0.5 * (r.C_lo + r.C_hi));
        const double q_hi = disc_q(HT, r.C_lo);
        const Trichotomy t = trichotomy(HT, q_hi);
        const Admissible a = admissible(HT);
        const bool c3 = ladder_ok(L), c5 = disc_orbit_ok(d.orbit);
        const bool c7 = t.round.verdict == Verdict::Convergent && std::abs(t.round.lambda - 64.0 * HT.beta) <= 1e-2 &&
                        t.large.verdict == Verdict::Blowup && t.eps_mid > 0.0;
        const bool c8 = admissible_ok(a);
        report(9, "general-beta transfer (half-torsion)", c3 && c5 && c7 && c8,
               fmt("[3] %s %s | [5] range (%.9f, %.9f), C=%.4f max|K| %.1e Q dev %.1e ODE %.1e | [7] Lambda(0) %.6f "
                   "vs 64beta %.6f, eps=10 %s, eps=%.2f Lambda %.6f in (64beta, %.4f] | [8] %s %s",
                   c3 ? "ok" : "FAIL", ladder_detail(L).c_str(), r.C_lo, r.C_hi, d.orbit.C, d.orbit.max_K,
                   d.orbit.max_Q_dev, d.orbit.max_ode_residual, t.round.lambda, 64.0 * HT.beta,
                   to_string(t.large.verdict), t.eps_mid, t.lambda_mid, q_hi, c8 ? "ok" : "FAIL",
                   admissible_detail(a).c_str()),
               tm.seconds());
    }

    {   // 10
        Timer tm;
        std::vector<BubbleRun> runs;
        for (double e : default_eps_grid()) runs.push_back(bubble_integrals(e, 1.0));
        const SlopeFit f = slope_fit(runs);
        const double rp = f.slope_P / (-24.0 * kOmega3) - 1.0, rt = f.slope_tau / (-528.0 * kOmega3) - 1.0;
        const bool ids = 18 * 4 + 64 * (-2) + 32 == -24 && 216 * 4 + 928 * (-2) + 464 == -528 &&
                         leading_coefficient(paneitz_weights()) == -24 &&
                         leading_coefficient(half_torsion_weights()) == -528;
        const bool ok = ids && std::abs(rp) <= 0.05 && std::abs(rt) <= 0.05;
        report(10, "Theorem 1 slopes", ok,
               fmt("slope F_P/omega3 %.4f (rel %.2e), slope F_tau/omega3 %.4f (rel %.2e), identities %s (tol 5%%)",
                   f.slope_P / kOmega3, rp, f.slope_tau / kOmega3, rt, ids ? "exact" : "broken"),
               tm.seconds());
    }

    {   // 11
        Timer tm;
        const PhiResult r = linearized_phi(P);
        const double dr = std::max({std::abs(r.ratios[0] - 2.0), std::abs(r.ratios[1] - 4.0), std::abs(r.ratios[2] - 8.0)});
        const bool ok = r.A > 0.0 && r.flatness < 1e-6 && dr <= 1e-4;
        report(11, "linearized amplitude", ok,
               fmt("A %.12f, flatness %.1e on [12,15], ratios (%.8f, %.8f, %.8f)", r.A, r.flatness, r.ratios[0],
                   r.ratios[1], r.ratios[2]),
               tm.seconds());
    }

    std::printf("%d of 11 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
