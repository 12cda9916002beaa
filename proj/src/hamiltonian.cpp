#include "detflow/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include <boost/math/tools/roots.hpp>

#include "detflow/integrate.hpp"
#include "detflow/quadrature.hpp"

namespace detflow {

namespace {

constexpr double kPi = std::numbers::pi;

// Level crossings are refined in long double: near a separatrix V(v) - H is
// tiny and double rounding in V would dominate the turning-point error.
double level_root(const PotentialSpec& p, double H, double a, double b) {
    using LD = long double;
    auto g = [&](LD v) { return potential_value_t<LD>(p, v) - LD(H); };
    LD ga = g(a), gb = g(b);
    if (ga == 0) return a;
    if (gb == 0) return b;
    std::uintmax_t iters = 300;
    const auto r = boost::math::tools::toms748_solve(
        g, LD(a), LD(b), ga, gb,
        [](LD x, LD y) { return std::abs(y - x) <= 1e-18L * std::max(1.0L, std::abs(x)); }, iters);
    return static_cast<double>((r.first + r.second) / 2);
}

// H - V(v) = (v - lo)(hi - v) R(v); returns the quadratic R as (r2, r1, r0).
std::array<double, 3> deflate(const PotentialSpec& p, double H, double lo, double hi) {
    const double b = p.beta;
    const double a4 = 1.0 / (2.0 * (1.0 + b));
    const double a2 = -(1.0 - 2.0 * b) / (1.0 + b);
    const double s = lo + hi, pr = lo * hi;
    const double q1 = s * a4;
    const double q0 = a2 - pr * a4 + s * q1;
    (void)H;
    return {-a4, -q1, -q0};
}

struct WellIntegrals {
    double period = 0.0;     // full period
    double mean_v = 0.0;     // time average of v
};

WellIntegrals well_integrals(const PotentialSpec& p, double H, const TurningPoints& tp, bool symmetric) {
    const double m = symmetric ? 0.0 : 0.5 * (tp.lo + tp.hi);
    const double a = 0.5 * (tp.hi - tp.lo);
    const auto R = deflate(p, H, tp.lo, tp.hi);
    auto rfun = [&](double v) { return (R[0] * v + R[1]) * v + R[2]; };
    auto weight = [&](double th) {
        const double v = m + a * std::sin(th);
        const double r = rfun(v);
        return r > 0.0 ? 1.0 / std::sqrt(2.0 * r) : 0.0;
    };
    WellIntegrals out;
    if (a == 0.0) {
        out.period = 2.0 * kPi * weight(0.0);
        out.mean_v = m;
        return out;
    }
    const QuadResult den = gl_doubling(weight, -0.5 * kPi, 0.5 * kPi);
    out.period = 2.0 * den.value;
    if (symmetric) {
        out.mean_v = 0.0;
        return out;
    }
    const QuadResult num = gl_doubling([&](double th) { return (m + a * std::sin(th)) * weight(th); },
                                       -0.5 * kPi, 0.5 * kPi);
    out.mean_v = num.value / den.value;
    return out;
}

bool symmetric_well(const PotentialSpec& p) { return p.C == 0.0 && p.beta > -1.0; }

} // namespace

const char* to_string(CriticalKind k) {
    switch (k) {
    case CriticalKind::Max: return "max";
    case CriticalKind::Min: return "min";
    case CriticalKind::Inflection: return "inflection";
    }
    return "?";
}

const char* to_string(PotentialCase c) {
    switch (c) {
    case PotentialCase::Case1: return "case1";
    case PotentialCase::Case2: return "case2";
    case PotentialCase::Case3: return "case3";
    case PotentialCase::Coercive: return "coercive";
    }
    return "?";
}

const char* to_string(OrbitKind k) {
    switch (k) {
    case OrbitKind::Constant: return "constant";
    case OrbitKind::Periodic: return "periodic";
    case OrbitKind::Homoclinic: return "homoclinic";
    case OrbitKind::Heteroclinic: return "heteroclinic";
    }
    return "?";
}

std::vector<CriticalPoint> critical_points(const PotentialSpec& p) {
    // V'(v) = 0  <=>  v^3 + P v + Q = 0
    const double P = -(1.0 - 2.0 * p.beta);
    const double Q = (1.0 + p.beta) * p.C / 18.0;
    const double scale = 4.0 * std::abs(P * P * P) + 27.0 * Q * Q;
    const double disc = -(4.0 * P * P * P + 27.0 * Q * Q);

    std::vector<double> roots;
    std::vector<bool> doubled;
    if (P == 0.0 && Q == 0.0) {
        roots = {0.0};
        doubled = {true};
    } else if (std::abs(disc) <= 1e-12 * scale) {
        roots = {3.0 * Q / P, -1.5 * Q / P};
        doubled = {false, true};
    } else if (disc > 0.0) {
        const double r = 2.0 * std::sqrt(-P / 3.0);
        const double phi = std::acos(std::clamp(1.5 * Q / P * std::sqrt(-3.0 / P), -1.0, 1.0)) / 3.0;
        for (int k = 0; k < 3; ++k) {
            roots.push_back(r * std::cos(phi - 2.0 * kPi * k / 3.0));
            doubled.push_back(false);
        }
    } else {
        const double s = std::sqrt(-disc / 108.0);
        roots = {std::cbrt(-Q / 2.0 + s) + std::cbrt(-Q / 2.0 - s)};
        doubled = {false};
    }

    std::vector<CriticalPoint> out;
    for (std::size_t i = 0; i < roots.size(); ++i) {
        double v = roots[i];
        if (!doubled[i]) {
            for (int it = 0; it < 4; ++it) {
                const double d = 3.0 * v * v + P;
                if (d == 0.0) break;
                v -= (v * v * v + P * v + Q) / d;
            }
        }
        CriticalPoint cp;
        cp.v = v;
        cp.V = potential_value(p, v);
        const double curv = potential_curvature(p, v);
        if (doubled[i] || std::abs(curv) < 1e-9)
            cp.kind = CriticalKind::Inflection;
        else
            cp.kind = curv < 0.0 ? CriticalKind::Max : CriticalKind::Min;
        out.push_back(cp);
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.v < b.v; });
    return out;
}

double case_threshold(double beta) {
    const double s = 1.0 - 2.0 * beta;
    if (s <= 0.0) return 0.0;
    return 12.0 * s / std::abs(1.0 + beta) * std::sqrt(s / 3.0);
}

CaseReport case_classify(const PotentialSpec& p) {
    CaseReport r;
    r.reflected = p.C < 0.0;
    const double C = std::abs(p.C);
    if (p.beta < -1.0) {
        r.label = PotentialCase::Coercive;
        r.threshold = std::numeric_limits<double>::infinity();
        return r;
    }
    r.threshold = case_threshold(p.beta);
    if (C == 0.0 && r.threshold > 0.0)
        r.label = PotentialCase::Case1;
    else if (C < r.threshold)
        r.label = PotentialCase::Case2;
    else
        r.label = PotentialCase::Case3;
    return r;
}

TurningPoints turning_points(const PotentialSpec& p, double H, double near) {
    const auto cps = critical_points(p);
    int well = -1;
    for (std::size_t i = 0; i < cps.size(); ++i) {
        if (cps[i].kind != CriticalKind::Min) continue;
        if (well < 0 || std::abs(cps[i].v - near) < std::abs(cps[well].v - near)) well = static_cast<int>(i);
    }
    if (well < 0) throw Error(ErrorCode::NoBoundedOrbit, "potential has no well");
    const double vm = cps[well].v;
    const double Vm = cps[well].V;
    const double tol = 1e-14 * std::max(1.0, std::abs(Vm));
    if (H < Vm - tol) throw Error(ErrorCode::NoBoundedOrbit, "energy below the bottom of the well");
    if (H <= Vm + tol) return {vm, vm};

    const bool coercive = p.beta < -1.0;
    auto g = [&](double v) { return potential_value(p, v) - H; };
    auto walk = [&](int dir) -> double {
        double start = vm;
        int i = well + dir;
        while (i >= 0 && i < static_cast<int>(cps.size())) {
            const double end = cps[i].v;
            if (cps[i].V > H) return level_root(p, H, std::min(start, end), std::max(start, end));
            start = end;
            i += dir;
        }
        if (!coercive) throw Error(ErrorCode::NoBoundedOrbit, "energy above the barrier");
        double step = 1.0;
        double end = start + dir * step;
        while (g(end) <= 0.0) {
            step *= 2.0;
            end = start + dir * step;
        }
        return level_root(p, H, std::min(start, end), std::max(start, end));
    };
    TurningPoints tp{walk(-1), walk(+1)};
    if (symmetric_well(p) && std::abs(tp.lo + tp.hi) < 1e-12) {
        const double a = 0.5 * (tp.hi - tp.lo);
        tp = {-a, a};
    }
    return tp;
}

double orbit_period(const PotentialSpec& p, double H, double near) {
    const TurningPoints tp = turning_points(p, H, near);
    return well_integrals(p, H, tp, symmetric_well(p)).period;
}

double average_slope(const PotentialSpec& p, double H, double near) {
    const TurningPoints tp = turning_points(p, H, near);
    return well_integrals(p, H, tp, symmetric_well(p)).mean_v;
}

namespace {

// exp(max - min) of U(t) - mean*t over one period, with U' = v.
double bound_constant(const PotentialSpec& p, const TurningPoints& tp, double period, double mean) {
    if (tp.hi - tp.lo <= 0.0) return 1.0;
    IntegratorConfig<3> cfg;
    cfg.t_max = period;
    cfg.rel_tol = 1e-12;
    cfg.abs_tol = 1e-14;
    cfg.max_step = period / 200.0;
    cfg.blowup_norm = 1e6;
    EventSpec<3> ext;
    ext.name = "extremum";
    ext.g = [mean](double, const Vec<3>& s) { return s[0] - mean; };
    ext.terminal = false;
    cfg.events.push_back(ext);
    auto rhs = [&](double, const Vec<3>& s) -> Vec<3> {
        return {s[1], -potential_slope(p, s[0]), s[0] - mean};
    };
    const auto tr = integrate<3>(rhs, Vec<3>{tp.lo, 0.0, 0.0}, cfg);
    double hi = 0.0, lo = 0.0;
    for (const auto& e : tr.events) {
        hi = std::max(hi, e.y[2]);
        lo = std::min(lo, e.y[2]);
    }
    for (const auto& s : tr.states) {
        hi = std::max(hi, s[2]);
        lo = std::min(lo, s[2]);
    }
    return std::exp(hi - lo);
}

} // namespace

OrbitSummary orbit_summary(const PotentialSpec& p, double H, double near) {
    OrbitSummary o;
    o.C = p.C;
    o.beta = p.beta;
    o.H = H;
    const TurningPoints tp = turning_points(p, H, near);
    o.v_lo = tp.lo;
    o.v_hi = tp.hi;
    const WellIntegrals w = well_integrals(p, H, tp, symmetric_well(p));
    o.period = w.period;
    o.avg_slope = w.mean_v;
    o.kind = tp.lo == tp.hi ? OrbitKind::Constant : OrbitKind::Periodic;
    o.bound_constant = bound_constant(p, tp, o.period, o.avg_slope);
    return o;
}

double delaunay_energy(double beta, double alpha) {
    const double s = 1.0 - 2.0 * beta;
    return 2.0 / 3.0 + alpha * s * s / (2.0 * (1.0 + beta));
}

OrbitSummary delaunay_family(const Coefficients& c, double alpha) {
    if (!(alpha >= 0.0 && alpha < 1.0)) throw Error(ErrorCode::OutOfRange, "alpha must lie in [0, 1)");
    if (!(c.beta > -1.0 && c.beta < 0.5))
        throw Error(ErrorCode::NoBoundedOrbit, "C = 0 family needs -1 < beta < 1/2");
    const PotentialSpec p = make_potential(0.0, c);
    OrbitSummary o = orbit_summary(p, delaunay_energy(c.beta, alpha));
    o.alpha = alpha;
    return o;
}

double heteroclinic_v(double beta, double t) {
    const double A = std::sqrt(1.0 - 2.0 * beta);
    const double k = std::sqrt((1.0 - 2.0 * beta) / (1.0 + beta));
    return A * std::tanh(k * t);
}

double heteroclinic_u(double beta, double t) {
    // integral of A tanh(kt) with u(0) = (A/k) log 2
    const double A = std::sqrt(1.0 - 2.0 * beta);
    const double k = std::sqrt((1.0 - 2.0 * beta) / (1.0 + beta));
    const double at = std::abs(t);
    return A * at + (A / k) * std::log1p(std::exp(-2.0 * k * at));
}

SpecialOrbit special_orbit(const PotentialSpec& p, unsigned samples) {
    SpecialOrbit o;
    o.C = p.C;
    o.beta = p.beta;
    const CaseReport cr = case_classify(p);
    const auto cps = critical_points(p);

    if (cr.label == PotentialCase::Case1) {
        const double A = std::sqrt(1.0 - 2.0 * p.beta);
        o.kind = OrbitKind::Heteroclinic;
        o.A = A;
        o.k = std::sqrt((1.0 - 2.0 * p.beta) / (1.0 + p.beta));
        o.H = potential_value(p, A);
        o.v_minus = -A;
        o.v_plus = A;
        o.exponent_near_zero = -2.0 * (1.0 + A);
        o.exponent_near_infinity = 2.0 * (A - 1.0);
        o.cone_factor = A * A;
        o.saddle_rate = std::sqrt(-potential_curvature(p, A));
        const double T = 10.0;
        for (unsigned i = 0; i < samples; ++i) {
            const double t = -T + 2.0 * T * i / std::max(1u, samples - 1);
            o.samples.t.push_back(t);
            o.samples.v.push_back(heteroclinic_v(p.beta, t));
            const double sech = 1.0 / std::cosh(o.k * t);
            o.samples.vdot.push_back(A * o.k * sech * sech);
        }
        return o;
    }
    if (cr.label != PotentialCase::Case2)
        throw Error(ErrorCode::WrongLevel, "no separatrix level for this potential");

    // Homoclinic to the lower of the two maxima.
    const PotentialSpec q = cr.reflected ? PotentialSpec{-p.C, p.beta} : p;
    const auto qcps = critical_points(q);
    const CriticalPoint* saddle = nullptr;
    for (const auto& cp : qcps)
        if (cp.kind == CriticalKind::Max && (!saddle || cp.V < saddle->V)) saddle = &cp;
    if (!saddle) throw Error(ErrorCode::WrongLevel, "no saddle");
    const double sign = cr.reflected ? -1.0 : 1.0;
    const double vs = saddle->v;
    const double lam = std::sqrt(-potential_curvature(q, vs));
    const double delta = 1e-8;
    // the well lies on the side of the saddle that contains the minimum
    double side = -1.0;
    for (const auto& cp : qcps)
        if (cp.kind == CriticalKind::Min) side = cp.v < vs ? -1.0 : 1.0;

    o.kind = OrbitKind::Homoclinic;
    o.H = saddle->V;
    o.v_minus = o.v_plus = sign * vs;
    o.saddle_rate = lam;
    o.offset = delta;
    o.A = sign * vs;
    o.exponent_near_zero = 2.0 * (sign * vs - 1.0);
    o.exponent_near_infinity = 2.0 * (sign * vs - 1.0);

    IntegratorConfig<2> cfg;
    cfg.t_max = 200.0;
    cfg.rel_tol = 1e-12;
    cfg.abs_tol = 1e-14;
    cfg.max_step = 0.05;
    EventSpec<2> turn;
    turn.name = "turning-point";
    turn.g = [](double, const Vec<2>& s) { return s[1]; };
    turn.direction = side < 0 ? Direction::Rising : Direction::Falling;
    cfg.events.push_back(turn);
    auto rhs = [&](double, const Vec<2>& s) { return newton_field<double>(q, s); };
    const Vec<2> s0{vs + side * delta, side * lam * delta};
    const auto half = integrate<2>(rhs, s0, cfg);
    if (half.termination.kind != TerminationKind::Event)
        throw Error(ErrorCode::WrongLevel, "homoclinic excursion did not return");
    const double tt = half.termination.time;
    o.excursion_time = 2.0 * tt;

    IntegratorConfig<2> full = cfg;
    full.events.clear();
    full.t_max = 2.0 * tt;
    for (unsigned i = 1; i + 1 < samples; ++i) full.sample_times.push_back(2.0 * tt * i / (samples - 1));
    full.record_steps = false;
    const auto tr = integrate<2>(rhs, s0, full);
    for (std::size_t i = 0; i < tr.size(); ++i) {
        o.samples.t.push_back(tr.times[i] - tt);
        o.samples.v.push_back(sign * tr.states[i][0]);
        o.samples.vdot.push_back(sign * tr.states[i][1]);
    }
    return o;
}

std::vector<PotentialPanel> potential_figure(const Coefficients& c, unsigned n) {
    const double thr = case_threshold(c.beta);
    std::vector<double> Cs = {0.0, 0.5 * thr, 1.25 * thr};
    std::vector<PotentialPanel> out;
    const double span = 1.5 * std::sqrt(std::max(1.0 - 2.0 * c.beta, 0.5));
    for (const double C : Cs) {
        PotentialPanel panel;
        panel.C = C;
        const PotentialSpec p{C, c.beta};
        for (unsigned i = 0; i < n; ++i) {
            const double v = -span + 2.0 * span * i / (n - 1);
            panel.v.push_back(v);
            panel.V.push_back(potential_value(p, v));
        }
        out.push_back(std::move(panel));
    }
    return out;
}

} // namespace detflow
