#include "detflow/shooting.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>

#include "detflow/disc.hpp"
#include "detflow/linear.hpp"

namespace detflow {

namespace {

const State3 kP1{1.0, 0.0, 0.0};

double dist_p1(const Vec<3>& s) {
    return std::sqrt((s[0] - 1.0) * (s[0] - 1.0) + s[1] * s[1] + s[2] * s[2]);
}

IntegratorConfig<3> base_config(const ShootConfig& cfg, double t_max) {
    IntegratorConfig<3> ic;
    ic.t_max = t_max;
    ic.rel_tol = cfg.rel_tol;
    ic.abs_tol = cfg.abs_tol;
    ic.max_step = cfg.max_step;
    ic.blowup_norm = cfg.blowup_norm;
    const double trig = cfg.x_trigger;
    ic.blowup_trigger = [trig](const Vec<3>& s) { return s[0] > trig; };
    return ic;
}

double decay_fit(const Trajectory<3>& tr) {
    double st = 0, sk = 0, stt = 0, stk = 0;
    int n = 0;
    for (std::size_t i = 1; i < tr.size(); ++i) {
        const double K = std::abs(tr.invariants[i].K);
        if (!(K > 1e-12 && K < 1e-2)) continue;
        const double t = tr.times[i], lk = std::log(K);
        st += t;
        sk += lk;
        stt += t * t;
        stk += t * lk;
        ++n;
    }
    if (n < 3) return 0.0;
    const double den = n * stt - st * st;
    if (den == 0.0) return 0.0;
    return -(n * stk - st * sk) / den;
}

ShootOutcome run_once(const Coefficients& c, double eps, const ShootConfig& cfg, double t_max) {
    ShootOutcome out;
    out.epsilon = eps;
    out.t_max = t_max;
    const InitialState init = initial_state(c, eps);

    IntegratorConfig<3> ic = base_config(cfg, t_max);
    ic.monitor = [&c](double, const Vec<3>& s) {
        InvariantSample m;
        m.K = invariant_K(c, State3::from(s));
        m.Q = invariant_Q(c, State3::from(s));
        return m;
    };
    if (cfg.saddle_capture) {
        EventSpec<3> cap;
        cap.name = "saddle-capture";
        const double r = cfg.capture_radius;
        cap.g = [r](double, const Vec<3>& s) { return dist_p1(s) - r; };
        cap.direction = Direction::Falling;
        ic.events.push_back(cap);
    }
    out.trajectory = integrate<3>([&c](double, const Vec<3>& s) { return system_rhs(c, s); },
                                  init.state.array(), ic);
    const auto& tr = out.trajectory;

    out.min_K = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < tr.size(); ++i) {
        const auto& s = tr.states[i];
        out.sup_norm = std::max(out.sup_norm, std::sqrt(s[0] * s[0] + s[1] * s[1] + s[2] * s[2]));
        out.sup_x = std::max(out.sup_x, std::abs(s[0]));
        out.min_K = std::min(out.min_K, tr.invariants[i].K);
        if (i > 0) out.q_increase = std::max(out.q_increase, tr.invariants[i].Q - tr.invariants[i - 1].Q);
    }
    out.final_K = tr.invariants.back().K;
    out.final_Q = tr.invariants.back().Q;

    switch (tr.termination.kind) {
    case TerminationKind::Blowup:
    case TerminationKind::StepFailure:
        // a step-size collapse here is the approach to the finite-time singularity
        out.verdict = Verdict::Blowup;
        out.blowup_time = tr.termination.time;
        return out;
    case TerminationKind::Event:
        out.verdict = Verdict::Convergent;
        out.captured = true;
        out.capture_time = tr.termination.time;
        out.lambda = q_limit(c);
        out.decay_rate = decay_fit(tr);
        break;
    case TerminationKind::ReachedTmax: {
        const double t0 = (1.0 - cfg.window_frac) * t_max;
        double qmin = std::numeric_limits<double>::infinity(), qmax = -qmin, qsum = 0.0;
        int n = 0;
        for (std::size_t i = 0; i < tr.size(); ++i) {
            if (tr.times[i] < t0) continue;
            const double q = tr.invariants[i].Q;
            qmin = std::min(qmin, q);
            qmax = std::max(qmax, q);
            qsum += q;
            ++n;
        }
        out.q_spread = n > 0 ? qmax - qmin : std::numeric_limits<double>::infinity();
        if (std::abs(out.final_K) < cfg.k_tol && out.q_spread < cfg.q_tol) {
            out.verdict = Verdict::Convergent;
            out.lambda = qsum / n;
            out.decay_rate = decay_fit(tr);
        } else {
            out.verdict = Verdict::Undecided;
        }
        break;
    }
    }
    if (out.verdict == Verdict::Convergent) {
        const auto band = lambda_band(c, cfg.lambda_margin);
        out.member = out.lambda >= band.first && out.lambda <= band.second;
    }
    return out;
}

} // namespace

const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::Blowup: return "blowup";
    case Verdict::Convergent: return "convergent";
    case Verdict::Undecided: return "undecided";
    }
    return "?";
}

InitialState initial_state(const Coefficients& c, double eps) {
    const double b = c.beta;
    const double e = 1.0 - eps;
    const double arg = ((2.0 * b + 0.5) - 0.5 * (1.0 + b) * e * e) / (1.5 * b);
    if (!(arg > 0.0)) throw Error(ErrorCode::NoRealU0, "initial constraint has no real u(0)");
    return {{0.0, e, 0.0}, 0.25 * std::log(arg)};
}

std::pair<double, double> lambda_band(const Coefficients& c, double margin) {
    const double lo = q_limit(c) - margin;
    double hi = q_limit(c) + margin;
    try {
        const DiscRange r = disc_range(c);
        hi = disc_q(c, r.C_lo) + margin;
    } catch (const Error&) {
    }
    return {lo, hi};
}

ShootOutcome classify_trajectory(const Coefficients& c, double eps, const ShootConfig& cfg) {
    if (!(eps >= 0.0)) throw Error(ErrorCode::BadArgument, "epsilon must be non-negative");
    double t_max = cfg.t_max;
    ShootOutcome out;
    for (int d = 0; d <= cfg.max_doublings; ++d) {
        out = run_once(c, eps, cfg, t_max);
        if (out.verdict != Verdict::Undecided) return out;
        t_max *= 2.0;
    }
    return out;
}

EpsBarResult find_eps_bar(const Coefficients& c, std::pair<double, double> bracket, double tol,
                          const ShootConfig& cfg, int scan_points) {
    if (!(bracket.first < bracket.second) || !(tol > 0.0) || scan_points < 1)
        throw Error(ErrorCode::BracketInvalid, "bracket must be increasing and tol positive");
    EpsBarResult res;
    res.tol = tol;

    auto record = [&](const ShootOutcome& o) {
        ++res.runs;
        if (o.verdict == Verdict::Undecided) ++res.undecided;
        if (o.member) res.lambda_trace.emplace_back(o.epsilon, o.lambda);
    };

    std::vector<double> grid;
    for (int i = 0; i <= scan_points; ++i)
        grid.push_back(bracket.first + (bracket.second - bracket.first) * i / scan_points);
    std::vector<std::future<ShootOutcome>> jobs;
    for (const double e : grid) {
        jobs.push_back(std::async(std::launch::async, [&c, &cfg, e] {
            ShootOutcome o = classify_trajectory(c, e, cfg);
            o.trajectory = {};
            return o;
        }));
    }
    std::vector<ShootOutcome> scan;
    for (auto& j : jobs) scan.push_back(j.get());

    if (!scan.front().member)
        throw Error(ErrorCode::BracketInvalid, "lower bracket end is not in the convergent set");
    std::size_t first_out = scan.size();
    for (std::size_t i = 0; i < scan.size(); ++i) {
        if (!scan[i].member) {
            first_out = i;
            break;
        }
    }
    if (first_out == scan.size())
        throw Error(ErrorCode::BracketInvalid, "upper bracket end is still in the convergent set");
    for (std::size_t i = 0; i <= first_out; ++i) record(scan[i]);

    double lo = grid[first_out - 1], hi = grid[first_out];
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        ShootOutcome o = classify_trajectory(c, mid, cfg);
        record(o);
        if (o.member)
            lo = mid;
        else
            hi = mid;
    }
    std::sort(res.lambda_trace.begin(), res.lambda_trace.end());
    res.eps_lo = lo;
    res.eps_hi = hi;
    res.eps_bar = 0.5 * (lo + hi);
    return res;
}

namespace {

Vec<5> profile_rhs(const Coefficients& c, const Vec<5>& s) {
    const auto f = system_rhs(c, std::array<double, 3>{s[0], s[1], s[2]});
    return {f[0], f[1], f[2], -s[0], exp4u(s[3])};
}

std::vector<double> grid_times(double t_max, double dt) {
    std::vector<double> ts;
    const auto n = static_cast<std::size_t>(std::llround(t_max / dt));
    for (std::size_t k = 1; k < n; ++k) ts.push_back(dt * k);
    return ts;
}

} // namespace

AdmissibleProfile raw_profile(const Coefficients& c, double eps, const ShootConfig& cfg, double dt) {
    const InitialState init = initial_state(c, eps);
    IntegratorConfig<5> ic;
    ic.t_max = cfg.t_max;
    ic.rel_tol = cfg.rel_tol;
    ic.abs_tol = cfg.abs_tol;
    ic.max_step = cfg.max_step;
    ic.blowup_norm = 1e300;
    const double trig = cfg.x_trigger, bn = cfg.blowup_norm;
    ic.blowup_trigger = [trig, bn](const Vec<5>& s) {
        return s[0] > trig || std::sqrt(s[0] * s[0] + s[1] * s[1] + s[2] * s[2]) > bn;
    };
    ic.sample_times = grid_times(cfg.t_max, dt);
    ic.record_steps = false;
    const auto tr = integrate<5>([&c](double, const Vec<5>& s) { return profile_rhs(c, s); },
                                 Vec<5>{init.state.x, init.state.y, init.state.z, init.u0, 0.0}, ic);
    AdmissibleProfile p;
    p.epsilon = eps;
    p.t = tr.times;
    p.states = tr.states;
    return p;
}

AdmissibleProfile admissible_profile(const Coefficients& c, double eps, const ShootConfig& cfg, double dt) {
    const InitialState init = initial_state(c, eps);
    IntegratorConfig<5> ic;
    ic.t_max = cfg.t_max;
    ic.rel_tol = cfg.rel_tol;
    ic.abs_tol = cfg.abs_tol;
    ic.max_step = cfg.max_step;
    ic.blowup_norm = 1e300;
    const double trig = cfg.x_trigger, bn = cfg.blowup_norm;
    ic.blowup_trigger = [trig, bn](const Vec<5>& s) {
        return s[0] > trig || std::sqrt(s[0] * s[0] + s[1] * s[1] + s[2] * s[2]) > bn;
    };
    ic.sample_times = grid_times(cfg.t_max, dt);
    ic.record_steps = false;

    // closest approach to (1,0,0) inside a small ball
    EventSpec<5> closest;
    closest.name = "closest-approach";
    closest.g = [&c](double, const Vec<5>& s) {
        const Vec<3> d{s[0] - 1.0, s[1], s[2]};
        if (std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]) > 0.05) return -1.0;
        const auto f = system_rhs(c, std::array<double, 3>{s[0], s[1], s[2]});
        return d[0] * f[0] + d[1] * f[1] + d[2] * f[2];
    };
    closest.direction = Direction::Rising;
    ic.events.push_back(closest);

    auto rhs = [&c](double, const Vec<5>& s) { return profile_rhs(c, s); };
    const auto tr = integrate<5>(rhs, Vec<5>{init.state.x, init.state.y, init.state.z, init.u0, 0.0}, ic);

    AdmissibleProfile p;
    p.epsilon = eps;
    if (tr.termination.kind != TerminationKind::Event) {
        p.t = tr.times;
        p.states = tr.states;
        return p;
    }

    const double ts = tr.termination.time;
    const Vec<5> s = tr.back();
    for (std::size_t i = 0; i + 1 < tr.size(); ++i) {
        p.t.push_back(tr.times[i]);
        p.states.push_back(tr.states[i]);
    }
    p.tail_used = true;
    p.switch_time = ts;
    p.switch_distance = std::sqrt((s[0] - 1.0) * (s[0] - 1.0) + s[1] * s[1] + s[2] * s[2]);

    // expand X - p1 in the eigenvectors (1, l, l^2) of the saddle
    const SpectralReport sr = spectral_report(c, kP1);
    std::array<double, 3> lam{};
    for (int i = 0; i < 3; ++i) lam[i] = sr.eig.values[i].real();   // descending: unstable first
    const std::array<double, 3> d{s[0] - 1.0, s[1], s[2]};
    std::array<double, 3> coef{};
    for (int i = 0; i < 3; ++i) {
        const double lj = lam[(i + 1) % 3], lk = lam[(i + 2) % 3];
        // Lagrange basis for the Vandermonde system sum_i c_i l_i^m = d_m
        coef[i] = (d[2] - (lj + lk) * d[1] + lj * lk * d[0]) / ((lam[i] - lj) * (lam[i] - lk));
    }
    p.discarded_unstable = std::abs(coef[0]);

    const double u_s = s[3], vol_s = s[4];
    auto x_tail = [&](double t) {
        const double r = t - ts;
        return 1.0 + coef[1] * std::exp(lam[1] * r) + coef[2] * std::exp(lam[2] * r);
    };
    auto state_tail = [&](double t) {
        const double r = t - ts;
        std::array<double, 3> out{1.0, 0.0, 0.0};
        for (int i = 1; i < 3; ++i) {
            const double e = coef[i] * std::exp(lam[i] * r);
            out[0] += e;
            out[1] += e * lam[i];
            out[2] += e * lam[i] * lam[i];
        }
        return out;
    };

    IntegratorConfig<2> tc;
    tc.t0 = ts;
    tc.t_max = cfg.t_max;
    tc.rel_tol = cfg.rel_tol;
    tc.abs_tol = cfg.abs_tol;
    tc.max_step = cfg.max_step;
    tc.blowup_norm = 1e300;
    tc.record_steps = false;
    tc.sample_times = grid_times(cfg.t_max, dt);
    const auto tail = integrate<2>(
        [&](double t, const Vec<2>& v) -> Vec<2> { return {-x_tail(t), exp4u(v[0])}; }, Vec<2>{u_s, vol_s}, tc);
    for (std::size_t i = 1; i < tail.size(); ++i) {
        const auto X = state_tail(tail.times[i]);
        p.t.push_back(tail.times[i]);
        p.states.push_back({X[0], X[1], X[2], tail.states[i][0], tail.states[i][1]});
    }
    // keep the switch point itself in the sample list
    p.t.insert(std::lower_bound(p.t.begin(), p.t.end(), ts), ts);
    auto it = p.states.begin() + (std::lower_bound(p.t.begin(), p.t.end(), ts) - p.t.begin());
    p.states.insert(it, s);
    return p;
}

AdmissibilityReport admissibility_check(const Coefficients& c, const AdmissibleProfile& prof, double window_frac,
                                        double tol, double band) {
    AdmissibilityReport r;
    if (prof.t.empty()) return r;
    const double t_end = prof.t.back();
    const double t0 = (1.0 - window_frac) * t_end;
    r.x_window_min = std::numeric_limits<double>::infinity();
    r.x_window_max = -r.x_window_min;
    for (std::size_t i = 0; i < prof.t.size(); ++i) {
        if (prof.t[i] < t0) continue;
        r.x_window_min = std::min(r.x_window_min, prof.states[i][0]);
        r.x_window_max = std::max(r.x_window_max, prof.states[i][0]);
        r.y_window_max = std::max(r.y_window_max, std::abs(prof.states[i][1]));
    }
    r.x_limit_ok = r.x_window_min >= 1.0 - band && r.x_window_max <= 1.0 + band;
    r.u2_limit_ok = r.y_window_max <= band;
    const auto& last = prof.states.back();
    r.volume = last[4];
    r.volume_ok = std::abs(r.volume - 2.0 / 3.0) <= tol;
    r.volume_from_q = invariant_Q(c, {last[0], last[1], last[2]}) / (96.0 * c.beta);
    return r;
}

SphereProfile sphere_lift(const std::vector<double>& t, const std::vector<double>& u) {
    SphereProfile sp;
    std::vector<double> xs, ws;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double x5 = std::tanh(t[i]);
        if (!(x5 < 1.0) || t[i] < 0.0) continue;
        const double logcosh = t[i] + std::log1p(std::exp(-2.0 * t[i])) - std::log(2.0);
        xs.push_back(x5);
        ws.push_back(u[i] + logcosh);
    }
    for (std::size_t k = xs.size(); k-- > 0;) {
        if (xs[k] == 0.0) continue;
        sp.x5.push_back(-xs[k]);
        sp.w.push_back(ws[k]);
    }
    for (std::size_t k = 0; k < xs.size(); ++k) {
        sp.x5.push_back(xs[k]);
        sp.w.push_back(ws[k]);
    }
    const std::size_t n = sp.x5.size();
    for (std::size_t i = 0; i < n; ++i) {
        sp.sup_abs_w = std::max(sp.sup_abs_w, std::abs(sp.w[i]));
        sp.max_asymmetry = std::max(sp.max_asymmetry, std::abs(sp.w[i] - sp.w[n - 1 - i]));
    }
    return sp;
}

GronwallReport gronwall_check(const Coefficients& c, double eps, double delta, double t_cap) {
    GronwallReport g;
    g.eps = eps;
    g.delta = delta;
    g.t_lo = -std::log(delta);
    g.t_hi = eps > 0.0 ? std::log(delta) - 0.5 * std::log(eps) : t_cap;
    g.t_hi = std::min(g.t_hi, t_cap);
    if (!(g.t_hi > g.t_lo)) return g;

    const PhiResult phi = linearized_phi(c, std::max(15.0, g.t_hi));
    g.A = phi.A;

    const int n = 400;
    std::vector<double> ts;
    for (int i = 0; i <= n; ++i) ts.push_back(g.t_lo + (g.t_hi - g.t_lo) * i / n);

    IntegratorConfig<3> ic;
    ic.t_max = g.t_hi;
    ic.rel_tol = 1e-13;
    ic.abs_tol = 1e-15;
    ic.max_step = 0.02;
    ic.sample_times = ts;
    const InitialState init = initial_state(c, eps);
    const auto tr = integrate<3>([&c](double, const Vec<3>& s) { return system_rhs(c, s); }, init.state.array(), ic);
    g.defined_on_window = tr.termination.kind == TerminationKind::ReachedTmax;
    if (!g.defined_on_window) return g;

    const double eA = eps * g.A;
    for (const double t : ts) {
        const auto X = tr.at(t);
        const auto P = phi.trajectory.at(t);
        const double th = std::tanh(t), s2 = 1.0 - th * th;
        const std::array<double, 3> X0{th, s2, -2.0 * s2 * th};
        const double em = std::exp(-2.0 * t), ep = std::exp(2.0 * t);
        // for eps = 0 the right side degenerates; compare against the leading decay instead
        const double rhs = eps > 0.0 ? delta * eA * ep : delta * em;
        const std::array<double, 3> lit{std::abs(X[0] - 1.0 + 2.0 * (em + eA * ep)),
                                        std::abs(X[1] - 4.0 * (em - eA * ep)),
                                        std::abs(X[2] + 8.0 * (em + eA * ep))};
        for (int k = 0; k < 3; ++k) {
            const double rem = std::abs(X[k] - X0[k] + eps * P[k + 1]);
            g.literal_ratio[k] = std::max(g.literal_ratio[k], lit[k] / rhs);
            g.remainder_ratio[k] = std::max(g.remainder_ratio[k], rem / rhs);
        }
    }
    for (int k = 0; k < 3; ++k) {
        g.literal_ok[k] = g.literal_ratio[k] <= 1.0;
        g.remainder_ok[k] = g.remainder_ratio[k] <= 1.0;
    }
    return g;
}

OmegaReport omega_invariance_check(const Coefficients& c, const Trajectory<3>& tr, double eta, double B, double tol) {
    OmegaReport r;
    r.eta = eta;
    r.B = B;
    const double q0 = q_limit(c);
    for (std::size_t i = 0; i < tr.size(); ++i) {
        const State3 s = State3::from(tr.states[i]);
        const double K = invariant_K(c, s), Q = invariant_Q(c, s);
        const double upper = (Q - q0 - eta) / B;
        const double viol = std::max(-K, K - upper);
        if (!r.entered) {
            if (viol <= 0.0) {
                r.entered = true;
                r.entry_time = tr.times[i];
            }
            continue;
        }
        if (viol > tol) {
            ++r.violations;
            r.max_violation = std::max(r.max_violation, viol);
        }
    }
    return r;
}

Trajectory<4> integrate_cylinder(const Coefficients& c, double eps, double t_end, double rel_tol, double abs_tol) {
    const InitialState init = initial_state(c, eps);
    IntegratorConfig<4> ic;
    ic.t_max = t_end;
    ic.rel_tol = rel_tol;
    ic.abs_tol = abs_tol;
    ic.max_step = 0.05;
    ic.blowup_norm = 1e6;
    return integrate<4>([&c](double, const Vec<4>& u) { return cylinder_rhs(c, u); },
                        Vec<4>{init.u0, 0.0, -(1.0 - eps), 0.0}, ic);
}

} // namespace detflow
