#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <functional>
#include <limits>
#include <string>
#include <type_traits>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "detflow/detail/dop853_tableau.hpp"
#include "detflow/error.hpp"

namespace detflow {

template <std::size_t N, class Real = double>
using Vec = std::array<Real, N>;

enum class Direction { Any, Rising, Falling };

template <std::size_t N, class Real = double>
struct EventSpec {
    std::string name;
    std::function<Real(Real, const Vec<N, Real>&)> g;
    Direction direction = Direction::Any;
    bool terminal = true;
};

enum class TerminationKind { ReachedTmax, Event, Blowup, StepFailure };

const char* to_string(TerminationKind k);

struct Termination {
    TerminationKind kind = TerminationKind::ReachedTmax;
    double time = 0.0;
    std::string event;
};

struct InvariantSample {
    double K = std::numeric_limits<double>::quiet_NaN();
    double Q = std::numeric_limits<double>::quiet_NaN();
    double H = std::numeric_limits<double>::quiet_NaN();
};

template <std::size_t N, class Real = double>
struct EventHit {
    std::string name;
    Real t;
    Vec<N, Real> y;
};

template <std::size_t N, class Real = double>
struct Trajectory {
    std::vector<Real> times;
    std::vector<Vec<N, Real>> states;
    std::vector<Vec<N, Real>> slopes;
    std::vector<InvariantSample> invariants;
    std::vector<EventHit<N, Real>> events;
    Termination termination;
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t rhs_evals = 0;

    std::size_t size() const { return times.size(); }
    Real t_end() const { return times.back(); }
    const Vec<N, Real>& back() const { return states.back(); }

    // Cubic Hermite interpolation between retained samples.
    Vec<N, Real> at(Real t) const {
        if (t <= times.front()) return states.front();
        if (t >= times.back()) return states.back();
        const auto it = std::upper_bound(times.begin(), times.end(), t);
        const std::size_t i = static_cast<std::size_t>(it - times.begin()) - 1;
        const Real h = times[i + 1] - times[i];
        const Real s = (t - times[i]) / h;
        const Real h00 = (1 + 2 * s) * (1 - s) * (1 - s);
        const Real h10 = s * (1 - s) * (1 - s);
        const Real h01 = s * s * (3 - 2 * s);
        const Real h11 = s * s * (s - 1);
        Vec<N, Real> out;
        for (std::size_t k = 0; k < N; ++k)
            out[k] = h00 * states[i][k] + h10 * h * slopes[i][k] + h01 * states[i + 1][k] +
                     h11 * h * slopes[i + 1][k];
        return out;
    }
};

template <std::size_t N, class Real = double>
struct IntegratorConfig {
    Real t0 = 0;
    Real t_max = 10;
    Real rel_tol = Real(1e-10);
    Real abs_tol = Real(1e-12);
    Real max_step = Real(0.1);
    Real blowup_norm = Real(1e3);
    Real min_step = Real(1e-14);
    Real initial_step = 0;   // 0: automatic
    Real fixed_step = 0;     // > 0 disables error control and ignores max_step
    std::size_t max_steps = 20'000'000;
    bool record_steps = true; // false: keep only t0, sample_times and the final point
    std::function<bool(const Vec<N, Real>&)> blowup_trigger;
    std::function<InvariantSample(Real, const Vec<N, Real>&)> monitor;
    std::vector<EventSpec<N, Real>> events;
    std::vector<Real> sample_times;
};

namespace detail {

template <class Real>
Real parse_real(const char* s) {
    if constexpr (std::is_floating_point_v<Real>)
        return static_cast<Real>(std::strtold(s, nullptr));
    else
        return Real(s);
}

template <class Real>
struct Tableau {
    Real c[12];
    Real a[12][11];
    Real b[12];
    Real e3[3];
    Real e5[12];

    static const Tableau& get() {
        static const Tableau tab = [] {
            Tableau t{};
            for (int i = 0; i < 12; ++i) {
                t.c[i] = parse_real<Real>(dop853::kC[i]);
                t.b[i] = parse_real<Real>(dop853::kB[i]);
                t.e5[i] = parse_real<Real>(dop853::kE5[i]);
                for (int j = 0; j < 11; ++j)
                    t.a[i][j] = j < i ? parse_real<Real>(dop853::kA[i][j]) : Real(0);
            }
            for (int i = 0; i < 3; ++i) t.e3[i] = parse_real<Real>(dop853::kE3[i]);
            return t;
        }();
        return tab;
    }
};

template <class Real, std::size_t N>
bool all_finite(const Vec<N, Real>& v) {
    using std::isfinite;
    for (const auto& x : v)
        if (!isfinite(x)) return false;
    return true;
}

template <class Real, std::size_t N>
Real max_norm(const Vec<N, Real>& v) {
    using std::abs;
    Real m = 0;
    for (const auto& x : v) m = std::max(m, Real(abs(x)));
    return m;
}

// One DOP853 step. Returns the scaled error norm (infinite if any stage is not
// finite); ynew receives the 8th-order solution.
template <std::size_t N, class Real, class Rhs>
Real dop853_step(Rhs& rhs, Real t, const Vec<N, Real>& y, const Vec<N, Real>& k1, Real h,
                 Real rtol, Real atol, Vec<N, Real>& ynew, std::size_t& evals) {
    using std::abs;
    using std::sqrt;
    const auto& T = Tableau<Real>::get();
    std::array<Vec<N, Real>, 12> k;
    k[0] = k1;
    Vec<N, Real> tmp;
    for (int s = 1; s < 12; ++s) {
        for (std::size_t i = 0; i < N; ++i) {
            Real acc = 0;
            for (int j = 0; j < s; ++j) acc += T.a[s][j] * k[j][i];
            tmp[i] = y[i] + h * acc;
        }
        if (!all_finite<Real, N>(tmp)) return std::numeric_limits<Real>::infinity();
        k[s] = rhs(t + T.c[s] * h, tmp);
        ++evals;
    }
    Real err3 = 0, err5 = 0;
    for (std::size_t i = 0; i < N; ++i) {
        Real inc = 0;
        for (int j = 0; j < 12; ++j) inc += T.b[j] * k[j][i];
        ynew[i] = y[i] + h * inc;
        const Real sk = atol + rtol * std::max(Real(abs(y[i])), Real(abs(ynew[i])));
        const Real e3 = inc - T.e3[0] * k[0][i] - T.e3[1] * k[8][i] - T.e3[2] * k[11][i];
        Real e5 = 0;
        for (int j = 0; j < 12; ++j) e5 += T.e5[j] * k[j][i];
        err3 += (e3 / sk) * (e3 / sk);
        err5 += (e5 / sk) * (e5 / sk);
    }
    if (!all_finite<Real, N>(ynew)) return std::numeric_limits<Real>::infinity();
    Real deno = err5 + Real(0.01) * err3;
    if (deno <= 0) deno = 1;
    using std::isfinite;
    const Real err = abs(h) * err5 * sqrt(Real(1) / (Real(N) * deno));
    return isfinite(err) ? err : std::numeric_limits<Real>::infinity();
}

} // namespace detail

// Adaptive DOP853 with PI step control, exact landing on sample_times and
// event localization by re-stepping from the start of the bracketing step.
template <std::size_t N, class Real = double, class Rhs>
Trajectory<N, Real> integrate(Rhs&& rhs_in, const Vec<N, Real>& y0, const IntegratorConfig<N, Real>& cfg) {
    using std::abs;
    using std::pow;
    using std::sqrt;
    using V = Vec<N, Real>;

    if (!(cfg.rel_tol > 0) || !(cfg.abs_tol > 0) || !(cfg.blowup_norm > 0))
        throw Error(ErrorCode::BadArgument, "integrator tolerances and blowup_norm must be positive");
    if (!detail::all_finite<Real, N>(y0)) throw Error(ErrorCode::BadArgument, "initial state not finite");

    Trajectory<N, Real> tr;
    bool overflowed = false;
    auto rhs = [&](Real t, const V& y) -> V {
        try {
            return rhs_in(t, y);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::Overflow) throw;
            overflowed = true;
            V bad;
            bad.fill(std::numeric_limits<Real>::quiet_NaN());
            return bad;
        }
    };

    std::vector<Real> samples;
    for (const Real s : cfg.sample_times)
        if (s > cfg.t0 && s < cfg.t_max) samples.push_back(s);
    std::sort(samples.begin(), samples.end());
    std::size_t next_sample = 0;

    Real t = cfg.t0;
    V y = y0;
    V f = rhs(t, y);
    ++tr.rhs_evals;

    auto keep = [&](Real tt, const V& yy, const V& ff) {
        tr.times.push_back(tt);
        tr.states.push_back(yy);
        tr.slopes.push_back(ff);
        tr.invariants.push_back(cfg.monitor ? cfg.monitor(tt, yy) : InvariantSample{});
    };
    keep(t, y, f);

    auto finish = [&](TerminationKind kind, Real when, std::string name = {}) {
        tr.termination = {kind, static_cast<double>(when), std::move(name)};
        return tr;
    };
    if (!detail::all_finite<Real, N>(f)) return finish(TerminationKind::Blowup, t);

    std::vector<Real> g_prev(cfg.events.size());
    for (std::size_t e = 0; e < cfg.events.size(); ++e) g_prev[e] = cfg.events[e].g(t, y);

    const bool adaptive = !(cfg.fixed_step > 0);
    const Real span = cfg.t_max - cfg.t0;
    Real h;
    if (!adaptive) {
        h = cfg.fixed_step;
    } else if (cfg.initial_step > 0) {
        h = cfg.initial_step;
    } else {
        Real d0 = 0, d1 = 0;
        for (std::size_t i = 0; i < N; ++i) {
            const Real sk = cfg.abs_tol + cfg.rel_tol * abs(y[i]);
            d0 += (y[i] / sk) * (y[i] / sk);
            d1 += (f[i] / sk) * (f[i] / sk);
        }
        d0 = sqrt(d0 / Real(N));
        d1 = sqrt(d1 / Real(N));
        Real h0 = (d0 <= Real(1e-10) || d1 <= Real(1e-10)) ? Real(1e-6) : Real(0.01) * d0 / d1;
        h0 = std::min(h0, cfg.max_step);
        V y1;
        for (std::size_t i = 0; i < N; ++i) y1[i] = y[i] + h0 * f[i];
        const V f1 = rhs(t + h0, y1);
        ++tr.rhs_evals;
        Real d2 = 0;
        for (std::size_t i = 0; i < N; ++i) {
            const Real sk = cfg.abs_tol + cfg.rel_tol * abs(y[i]);
            d2 += ((f1[i] - f[i]) / sk) * ((f1[i] - f[i]) / sk);
        }
        d2 = sqrt(d2 / Real(N)) / h0;
        using std::isfinite;
        const Real dm = std::max(abs(d1), abs(d2));
        Real h1 = dm <= Real(1e-15) ? std::max(Real(1e-6), h0 * Real(1e-3))
                                    : Real(pow(Real(0.01) / dm, Real(1) / Real(8)));
        if (!isfinite(h1)) h1 = h0;
        h = std::min({Real(100) * h0, h1, cfg.max_step});
    }
    h = std::min(h, span);

    const Real beta = Real(0.04);
    const Real expo1 = Real(1) / Real(8) - beta * Real(0.2);
    const Real facc1 = Real(1) / Real(0.333);
    const Real facc2 = Real(1) / Real(6);
    const Real safe = Real(0.9);
    Real facold = Real(1e-4);
    bool last_rejected = false;
    overflowed = false;

    while (t < cfg.t_max) {
        if (tr.accepted + tr.rejected >= cfg.max_steps) return finish(TerminationKind::StepFailure, t);

        Real target = cfg.t_max;
        if (next_sample < samples.size()) target = std::min(target, samples[next_sample]);
        Real h_use = std::min({h, adaptive ? cfg.max_step : h, target - t});
        bool lands = h_use >= target - t;
        if (target - t - h_use < cfg.min_step) {
            h_use = target - t;
            lands = true;
        }
        if (h_use < cfg.min_step && !lands) return finish(TerminationKind::StepFailure, t);

        V ynew;
        const Real err = detail::dop853_step<N, Real>(rhs, t, y, f, h_use, cfg.rel_tol, cfg.abs_tol, ynew, tr.rhs_evals);
        if (overflowed) return finish(TerminationKind::Blowup, t);

        if (adaptive && !(err <= 1)) {
            ++tr.rejected;
            using std::isfinite;
            const Real fac11 = isfinite(err) ? Real(pow(err, expo1)) : Real(5);
            h = h_use / std::min(facc1, fac11 / safe);
            last_rejected = true;
            if (h < cfg.min_step) return finish(TerminationKind::StepFailure, t);
            continue;
        }

        // accepted
        const Real tnew = lands ? target : t + h_use;
        const V fnew = rhs(tnew, ynew);
        ++tr.rhs_evals;
        ++tr.accepted;
        if (overflowed || !detail::all_finite<Real, N>(fnew)) return finish(TerminationKind::Blowup, t);

        // events inside [t, tnew]
        std::size_t hit = cfg.events.size();
        Real hit_tau = h_use;
        std::vector<EventHit<N, Real>> passing;
        std::vector<Real> g_new(cfg.events.size());
        for (std::size_t e = 0; e < cfg.events.size(); ++e) {
            const auto& ev = cfg.events[e];
            g_new[e] = ev.g(tnew, ynew);
            const Real g0 = g_prev[e], g1 = g_new[e];
            bool crossed = (g0 < 0 && g1 >= 0) || (g0 > 0 && g1 <= 0);
            if (crossed && ev.direction == Direction::Rising) crossed = g0 < 0;
            if (crossed && ev.direction == Direction::Falling) crossed = g0 > 0;
            if (!crossed) continue;

            std::size_t dummy = 0;
            auto G = [&](Real tau) -> Real {
                if (tau <= 0) return g0;
                V yy;
                detail::dop853_step<N, Real>(rhs, t, y, f, tau, cfg.rel_tol, cfg.abs_tol, yy, dummy);
                return ev.g(t + tau, yy);
            };
            const Real ttol = Real(1e-12) * std::max(Real(1), Real(abs(tnew)));
            Real tau;
            if (g1 == 0) {
                tau = h_use;
            } else {
                std::uintmax_t iters = 200;
                const auto r = boost::math::tools::toms748_solve(
                    G, Real(0), h_use, g0, g1,
                    [ttol](Real a, Real b) { using std::abs; return abs(b - a) <= ttol; }, iters);
                tau = (r.first + r.second) / 2;
            }
            tr.rhs_evals += dummy;
            V yy;
            if (tau >= h_use) {
                yy = ynew;
                tau = h_use;
            } else {
                detail::dop853_step<N, Real>(rhs, t, y, f, tau, cfg.rel_tol, cfg.abs_tol, yy, tr.rhs_evals);
            }
            passing.push_back({ev.name, t + tau, yy});
            if (ev.terminal && (hit == cfg.events.size() || tau < hit_tau)) {
                hit = e;
                hit_tau = tau;
            }
        }
        std::sort(passing.begin(), passing.end(), [](const auto& a, const auto& b) { return a.t < b.t; });
        for (auto& p : passing)
            if (hit == cfg.events.size() || p.t <= t + hit_tau) tr.events.push_back(p);

        if (hit != cfg.events.size()) {
            const auto& ev = tr.events.back();
            const V fe = rhs(ev.t, ev.y);
            ++tr.rhs_evals;
            keep(ev.t, ev.y, fe);
            return finish(TerminationKind::Event, ev.t, cfg.events[hit].name);
        }

        t = tnew;
        y = ynew;
        f = fnew;
        g_prev = g_new;

        const bool at_sample = lands && next_sample < samples.size() && target == samples[next_sample];
        if (at_sample) ++next_sample;
        if (cfg.record_steps || at_sample || t >= cfg.t_max) keep(t, y, f);

        if (detail::max_norm<Real, N>(y) > cfg.blowup_norm || (cfg.blowup_trigger && cfg.blowup_trigger(y))) {
            if (!cfg.record_steps && !at_sample && t < cfg.t_max) keep(t, y, f);
            return finish(TerminationKind::Blowup, t);
        }

        if (adaptive) {
            const Real fac11 = pow(std::max(err, Real(1e-300)), expo1);
            Real fac = fac11 / pow(facold, beta);
            fac = std::max(facc2, std::min(facc1, fac / safe));
            Real hnew = h_use / fac;
            facold = std::max(err, Real(1e-4));
            if (last_rejected) hnew = std::min(hnew, h_use);
            // a step shortened only to land on a target should not shrink the next one
            if (lands && h_use < h) hnew = std::max(hnew, h);
            h = std::min(hnew, cfg.max_step);
            last_rejected = false;
        }
    }
    return finish(TerminationKind::ReachedTmax, t);
}

// Samples of a trajectory at the given times (Hermite between retained points).
template <std::size_t N, class Real>
std::vector<Vec<N, Real>> resample(const Trajectory<N, Real>& tr, const std::vector<Real>& ts) {
    std::vector<Vec<N, Real>> out;
    out.reserve(ts.size());
    for (const Real t : ts) out.push_back(tr.at(t));
    return out;
}

} // namespace detflow
