#include "detflow/disc.hpp"

#include <cmath>
#include <numbers>

#include "detflow/hamiltonian.hpp"
#include "detflow/integrate.hpp"

namespace detflow {

namespace {

double equilibrium_constant(double beta, double x) {
    return 9.0 * (-2.0 * x * x * x + 2.0 * (1.0 - 2.0 * beta) * x) / (1.0 + beta);
}

void verify(const Coefficients& c, DiscOrbit& o, double level) {
    const PotentialSpec p{o.C, c.beta};
    const double q = disc_q(c, o.C);
    for (const auto& s : o.samples) {
        const Diagnostics d = diagnostics(c, s, o.C);
        o.max_energy_residual = std::max(o.max_energy_residual, std::abs(d.F_C - 2.0 * level));
        o.max_G = std::max(o.max_G, std::abs(d.G_C));
        o.max_K = std::max(o.max_K, std::abs(invariant_K(c, s)));
        o.max_Q_dev = std::max(o.max_Q_dev, std::abs(invariant_Q(c, s) - q));
        const double zdot_lift = -potential_curvature(p, s.x) * s.y;
        const double zdot = system_rhs(c, s)[2];
        o.max_ode_residual = std::max(o.max_ode_residual, std::abs(zdot_lift - zdot));
    }
}

State3 lift(const PotentialSpec& p, double x, double y) { return {x, y, -potential_slope(p, x)}; }

} // namespace

const char* to_string(DiscKind k) {
    switch (k) {
    case DiscKind::Center: return "center";
    case DiscKind::Periodic: return "periodic";
    case DiscKind::Homoclinic: return "homoclinic";
    }
    return "?";
}

DiscRange disc_range(const Coefficients& c) {
    const double b = c.beta;
    if (!(b > -1.0 && b < -0.25)) throw Error(ErrorCode::NoDisc, "the disc needs -1 < beta < -1/4");
    DiscRange r;
    r.x_inner = std::sqrt(-(4.0 * b + 1.0) / 3.0);
    r.C_lo = equilibrium_constant(b, r.x_inner);
    r.C_hi = equilibrium_constant(b, 1.0);
    r.level = disc_hamiltonian_level(b);
    return r;
}

double disc_q(const Coefficients& c, double C) { return -16.0 * (1.0 + c.beta) * C / 9.0; }

DiscOrbit disc_orbit(const Coefficients& c, double C, unsigned samples) {
    const DiscRange r = disc_range(c);
    const double width = r.C_hi - r.C_lo;
    const double tol = 1e-12 * std::max(1.0, std::abs(r.C_hi));
    if (C < r.C_lo - tol || C > r.C_hi + tol) throw Error(ErrorCode::OutOfRange, "C outside the disc range");
    (void)width;

    DiscOrbit o;
    o.C = C;
    const PotentialSpec p{C, c.beta};

    if (std::abs(C - r.C_lo) <= tol) {
        o.kind = DiscKind::Center;
        o.period = 2.0 * std::numbers::pi / std::sqrt(potential_curvature(p, r.x_inner));
        for (unsigned i = 0; i < samples; ++i) {
            o.t.push_back(o.period * i / samples);
            o.samples.push_back({r.x_inner, 0.0, 0.0});
        }
        verify(c, o, r.level);
        return o;
    }

    IntegratorConfig<2> cfg;
    cfg.rel_tol = 1e-12;
    cfg.abs_tol = 1e-14;
    cfg.max_step = 0.05;
    cfg.record_steps = false;
    auto rhs = [&](double, const Vec<2>& s) { return newton_field<double>(p, s); };

    Vec<2> s0;
    double span;
    if (std::abs(C - r.C_hi) <= tol) {
        o.kind = DiscKind::Homoclinic;
        const double lam = std::sqrt(-potential_curvature(p, 1.0));
        const double delta = 1e-8;
        s0 = {1.0 - delta, -lam * delta};
        IntegratorConfig<2> probe = cfg;
        probe.t_max = 200.0;
        EventSpec<2> turn;
        turn.name = "turning-point";
        turn.g = [](double, const Vec<2>& s) { return s[1]; };
        turn.direction = Direction::Rising;
        probe.events.push_back(turn);
        const auto half = integrate<2>(rhs, s0, probe);
        if (half.termination.kind != TerminationKind::Event)
            throw Error(ErrorCode::WrongLevel, "homoclinic disc orbit did not turn");
        span = 2.0 * half.termination.time;
    } else {
        o.kind = DiscKind::Periodic;
        const TurningPoints tp = turning_points(p, r.level, r.x_inner);
        s0 = {tp.lo, 0.0};
        o.period = orbit_period(p, r.level, r.x_inner);
        span = o.period;
    }

    const unsigned n = o.kind == DiscKind::Homoclinic ? samples - 1 : samples;
    for (unsigned i = 1; i < samples; ++i) cfg.sample_times.push_back(span * i / n);
    cfg.t_max = o.kind == DiscKind::Homoclinic ? span : span * (samples - 1) / samples;
    const auto tr = integrate<2>(rhs, s0, cfg);
    for (std::size_t i = 0; i < tr.size(); ++i) {
        o.t.push_back(tr.times[i]);
        o.samples.push_back(lift(p, tr.states[i][0], tr.states[i][1]));
    }
    verify(c, o, r.level);
    return o;
}

std::vector<DiscOrbit> disc_chart(const Coefficients& c, unsigned n, unsigned samples) {
    if (n < 2) throw Error(ErrorCode::BadArgument, "disc chart needs at least two orbits");
    const DiscRange r = disc_range(c);
    std::vector<DiscOrbit> out;
    for (unsigned i = 0; i < n; ++i) {
        const double C = i + 1 == n ? r.C_hi : r.C_lo + (r.C_hi - r.C_lo) * i / (n - 1);
        out.push_back(disc_orbit(c, C, samples));
    }
    return out;
}

bool disc_member(const Coefficients& c, const State3& s, double tol) {
    const DiscRange r = disc_range(c);
    const double q = invariant_Q(c, s);
    const double q_lo = disc_q(c, r.C_hi), q_hi = disc_q(c, r.C_lo);
    return std::abs(invariant_K(c, s)) <= tol && q >= q_lo - tol && q <= q_hi + tol && s.x >= -tol &&
           s.x <= 1.0 + tol;
}

bool projection_contains(const DiscOrbit& outer, const DiscOrbit& inner) {
    const auto& P = outer.samples;
    auto inside = [&](double x, double y) {
        bool in = false;
        for (std::size_t i = 0, j = P.size() - 1; i < P.size(); j = i++) {
            const double xi = P[i].x, yi = P[i].y, xj = P[j].x, yj = P[j].y;
            if ((yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi) in = !in;
        }
        return in;
    };
    for (const auto& s : inner.samples)
        if (!inside(s.x, s.y)) return false;
    return true;
}

} // namespace detflow
