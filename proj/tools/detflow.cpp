#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <future>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "detflow/bubble.hpp"
#include "detflow/disc.hpp"
#include "detflow/hamiltonian.hpp"
#include "detflow/io.hpp"
#include "detflow/linear.hpp"
#include "detflow/model.hpp"
#include "detflow/shooting.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace detflow;

namespace {

constexpr int kOk = 0;
constexpr int kBadArgs = 2;
constexpr int kNumerical = 3;
constexpr int kCheckFailed = 4;

struct Output {
    fs::path dir;
    json files = json::object();

    void write(const std::string& name, const std::string& body) {
        io::write_atomic(dir / name, body);
        files[name] = io::sha256_hex(body);
    }
    void csv(const std::string& name, const io::Table& t) { write(name, t.to_csv()); }
    void json_file(const std::string& name, const json& j) { write(name, j.dump(2) + "\n"); }
};

struct Common {
    std::string coeffs = "paneitz";
    std::vector<double> gamma;
    std::string out = "out";
};

Coefficients resolve(const Common& c) {
    if (!c.gamma.empty()) return make_coefficients(c.gamma[0], c.gamma[1], c.gamma[2]);
    return preset(c.coeffs);
}

json coeff_json(const Coefficients& c) {
    return {{"name", c.name}, {"gamma", {c.gamma1, c.gamma2, c.gamma3}}, {"beta", c.beta}};
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw Error(ErrorCode::BadArgument, "not a number list: " + s);
        }
    }
    return out;
}

io::Table trajectory_table(const Coefficients& c, const Trajectory<3>& tr) {
    io::Table t{{"t", "x", "y", "z", "K", "Q"}, {}};
    for (std::size_t i = 0; i < tr.size(); ++i) {
        const State3 s = State3::from(tr.states[i]);
        t.rows.push_back({tr.times[i], s.x, s.y, s.z, invariant_K(c, s), invariant_Q(c, s)});
    }
    return t;
}

// ---- subcommands ---------------------------------------------------------

struct DelaunayOpts {
    int n = 11;
    std::string alphas;
};

json run_delaunay(const Coefficients& c, const DelaunayOpts& o, Output& out) {
    std::vector<double> alphas = o.alphas.empty() ? std::vector<double>{} : parse_list(o.alphas);
    if (alphas.empty())
        for (int i = 0; i < o.n; ++i) alphas.push_back(0.99 * i / std::max(1, o.n - 1));
    io::Table t{{"alpha", "H", "v_lo", "v_hi", "period", "avg_slope", "C_alpha"}, {}};
    for (double a : alphas) {
        const OrbitSummary s = delaunay_family(c, a);
        t.rows.push_back({a, s.H, s.v_lo, s.v_hi, s.period, s.avg_slope, s.bound_constant});
    }
    out.csv("delaunay.csv", t);
    const double sep = delaunay_energy(c.beta, 1.0);
    return {{"separatrix_energy", sep}, {"members", alphas.size()}};
}

struct OrbitOpts {
    double C = 0.0;
    double H = std::nan("");
    bool special = false;
    unsigned samples = 401;
};

json run_orbit(const Coefficients& c, const OrbitOpts& o, Output& out) {
    const PotentialSpec p = make_potential(o.C, c);
    io::Table t{{"t", "v", "vdot", "energy"}, {}};
    json summary;
    if (o.special) {
        const SpecialOrbit so = special_orbit(p, o.samples);
        for (std::size_t i = 0; i < so.samples.t.size(); ++i)
            t.rows.push_back({so.samples.t[i], so.samples.v[i], so.samples.vdot[i],
                              newton_energy(p, so.samples.v[i], so.samples.vdot[i])});
        summary = {{"kind", to_string(so.kind)}, {"H", so.H},           {"v_minus", so.v_minus},
                   {"v_plus", so.v_plus},       {"A", so.A},            {"k", so.k},
                   {"saddle_rate", so.saddle_rate}, {"excursion_time", so.excursion_time}};
    } else {
        if (std::isnan(o.H)) throw Error(ErrorCode::BadArgument, "--H or --special is required");
        const OrbitSummary s = orbit_summary(p, o.H);
        IntegratorConfig<2> ic;
        ic.t_max = s.period;
        ic.rel_tol = 1e-12;
        ic.abs_tol = 1e-14;
        for (unsigned i = 1; i + 1 < o.samples; ++i) ic.sample_times.push_back(s.period * i / (o.samples - 1));
        ic.record_steps = false;
        const auto tr = integrate<2>([&p](double, const Vec<2>& y) { return newton_field<double>(p, y); },
                                     Vec<2>{s.v_lo, 0.0}, ic);
        for (std::size_t i = 0; i < tr.size(); ++i)
            t.rows.push_back({tr.times[i], tr.states[i][0], tr.states[i][1],
                              newton_energy(p, tr.states[i][0], tr.states[i][1])});
        summary = {{"kind", to_string(s.kind)}, {"H", s.H},         {"v_lo", s.v_lo},
                   {"v_hi", s.v_hi},            {"period", s.period}, {"avg_slope", s.avg_slope},
                   {"C_alpha", s.bound_constant}};
    }
    out.csv("orbit.csv", t);
    out.json_file("orbit.json", summary);
    return summary;
}

struct ClassifyOpts {
    std::string Cs = "0";
    unsigned samples = 401;
};

json run_classify(const Coefficients& c, const ClassifyOpts& o, Output& out) {
    json list = json::array();
    for (double C : parse_list(o.Cs)) {
        const PotentialSpec p = make_potential(C, c);
        const CaseReport r = case_classify(p);
        json cps = json::array();
        for (const auto& cp : critical_points(p)) cps.push_back({{"v", cp.v}, {"V", cp.V}, {"kind", to_string(cp.kind)}});
        list.push_back({{"C", C},
                        {"case", to_string(r.label)},
                        {"threshold", std::isfinite(r.threshold) ? json(r.threshold) : json(nullptr)},
                        {"reflected", r.reflected},
                        {"critical_points", cps}});
    }
    io::Table t{{"panel", "C", "v", "V"}, {}};
    const auto panels = potential_figure(c, o.samples);
    for (std::size_t k = 0; k < panels.size(); ++k)
        for (std::size_t i = 0; i < panels[k].v.size(); ++i)
            t.rows.push_back({double(k), panels[k].C, panels[k].v[i], panels[k].V[i]});
    out.json_file("classification.json", list);
    out.csv("potential_panels.csv", t);
    return {{"potentials", list.size()}};
}

struct DiscOpts {
    unsigned grid = 9;
    unsigned samples = 512;
};

json run_disc(const Coefficients& c, const DiscOpts& o, Output& out) {
    const DiscRange r = disc_range(c);
    const auto chart = disc_chart(c, o.grid, o.samples);
    json orbits = json::array();
    for (std::size_t k = 0; k < chart.size(); ++k) {
        const auto& d = chart[k];
        io::Table t{{"t", "x", "y", "z", "K", "Q"}, {}};
        for (std::size_t i = 0; i < d.samples.size(); ++i) {
            const State3& s = d.samples[i];
            t.rows.push_back({d.t[i], s.x, s.y, s.z, invariant_K(c, s), invariant_Q(c, s)});
        }
        char name[32];
        std::snprintf(name, sizeof name, "disc_orbit_%02zu.csv", k);
        out.csv(name, t);
        orbits.push_back({{"file", name},
                          {"C", d.C},
                          {"kind", to_string(d.kind)},
                          {"period", std::isfinite(d.period) ? json(d.period) : json(nullptr)},
                          {"Q", disc_q(c, d.C)},
                          {"max_K", d.max_K},
                          {"max_Q_dev", d.max_Q_dev},
                          {"max_ode_residual", d.max_ode_residual}});
    }
    const json chart_json = {{"C_lo", r.C_lo}, {"C_hi", r.C_hi}, {"x_inner", r.x_inner}, {"level", r.level},
                             {"orbits", orbits}};
    out.json_file("chart.json", chart_json);
    return {{"C_lo", r.C_lo}, {"C_hi", r.C_hi}, {"orbits", chart.size()}};
}

json run_stationary(const Coefficients& c, Output& out) {
    json pts = json::array();
    for (const auto& p : stationary_points(c)) {
        const SpectralReport s = spectral_report(c, p);
        json vals = json::array(), vecs = json::array();
        for (int i = 0; i < 3; ++i) {
            vals.push_back({s.eig.values[i].real(), s.eig.values[i].imag()});
            vecs.push_back(s.eig.vectors[i] ? json(*s.eig.vectors[i]) : json(nullptr));
        }
        pts.push_back({{"x", p.x},
                       {"kind", to_string(s.kind)},
                       {"eigenvalues", vals},
                       {"eigenvectors", vecs},
                       {"charpoly", s.eig.charpoly},
                       {"max_charpoly_residual", s.eig.max_charpoly_residual},
                       {"max_vector_residual", s.eig.max_vector_residual}});
    }
    out.json_file("stationary.json", pts);
    return {{"points", pts.size()}};
}

struct LinearizeOpts {
    double T = 15.0;
    double window_lo = 12.0;
};

json run_linearize(const Coefficients& c, const LinearizeOpts& o, Output& out) {
    const PhiResult r = linearized_phi(c, o.T, o.window_lo);
    io::Table t{{"t", "phi", "phi1", "phi2", "phi3", "phi_e2t"}, {}};
    for (std::size_t i = 0; i < r.trajectory.size(); ++i) {
        const auto& s = r.trajectory.states[i];
        const double tt = r.trajectory.times[i];
        t.rows.push_back({tt, s[0], s[1], s[2], s[3], s[0] * std::exp(-2.0 * tt)});
    }
    out.csv("phi.csv", t);
    const json j = {{"A", r.A}, {"flatness", r.flatness}, {"ratios", r.ratios}, {"window", {r.window_lo, r.window_hi}},
                    {"initial", linearized_initial(c)}};
    out.json_file("phi.json", j);
    return j;
}

ShootConfig shoot_config(double t_max, double rtol, double atol) {
    ShootConfig cfg;
    cfg.t_max = t_max;
    cfg.rel_tol = rtol;
    cfg.abs_tol = atol;
    return cfg;
}

struct ShootOpts {
    double eps = 0.0;
    double t_max = 200.0;
    double rtol = 1e-10;
    double atol = 1e-12;
};

json outcome_json(const ShootOutcome& o) {
    return {{"epsilon", o.epsilon},     {"verdict", to_string(o.verdict)}, {"blowup_time", o.blowup_time},
            {"lambda", o.lambda},       {"decay_rate", o.decay_rate},      {"t_max", o.t_max},
            {"final_K", o.final_K},     {"final_Q", o.final_Q},            {"q_spread", o.q_spread},
            {"sup_norm", o.sup_norm},   {"min_K", o.min_K},                {"captured", o.captured},
            {"capture_time", o.capture_time}, {"member", o.member}};
}

json run_shoot(const Coefficients& c, const ShootOpts& o, Output& out) {
    const ShootOutcome r = classify_trajectory(c, o.eps, shoot_config(o.t_max, o.rtol, o.atol));
    out.csv("trajectory.csv", trajectory_table(c, r.trajectory));
    const json j = outcome_json(r);
    out.json_file("outcome.json", j);
    return j;
}

struct EpsBarOpts {
    std::string bracket = "0,10";
    double tol = 1e-6;
    double t_max = 200.0;
    double offset = 1e-6;
    int scan = 40;
};

json run_eps_bar(const Coefficients& c, const EpsBarOpts& o, Output& out) {
    const auto b = parse_list(o.bracket);
    if (b.size() != 2) throw Error(ErrorCode::BadArgument, "--bracket takes lo,hi");
    const ShootConfig cfg = shoot_config(o.t_max, 1e-10, 1e-12);
    const EpsBarResult r = find_eps_bar(c, {b[0], b[1]}, o.tol, cfg, o.scan);

    io::Table trace{{"epsilon", "lambda"}, {}};
    for (const auto& [e, l] : r.lambda_trace) trace.rows.push_back({e, l});
    out.csv("lambda_trace.csv", trace);

    const AdmissibleProfile p = admissible_profile(c, r.eps_bar - o.offset, cfg);
    const AdmissibilityReport a = admissibility_check(c, p);
    io::Table prof{{"t", "x", "y", "z", "u", "volume"}, {}};
    std::vector<double> u;
    for (std::size_t i = 0; i < p.t.size(); ++i) {
        const auto& s = p.states[i];
        prof.rows.push_back({p.t[i], s[0], s[1], s[2], s[3], s[4]});
        u.push_back(s[3]);
    }
    out.csv("profile.csv", prof);
    const SphereProfile sp = sphere_lift(p.t, u);
    io::Table sph{{"x5", "w"}, {}};
    for (std::size_t i = 0; i < sp.x5.size(); ++i) sph.rows.push_back({sp.x5[i], sp.w[i]});
    out.csv("sphere.csv", sph);

    const json j = {{"eps_bar", r.eps_bar},
                    {"eps_lo", r.eps_lo},
                    {"eps_hi", r.eps_hi},
                    {"tol", r.tol},
                    {"runs", r.runs},
                    {"undecided", r.undecided},
                    {"profile_epsilon", p.epsilon},
                    {"tail_used", p.tail_used},
                    {"switch_time", p.switch_time},
                    {"switch_distance", p.switch_distance},
                    {"discarded_unstable", p.discarded_unstable},
                    {"x_window", {a.x_window_min, a.x_window_max}},
                    {"volume", a.volume},
                    {"volume_from_q", a.volume_from_q},
                    {"sup_abs_w", sp.sup_abs_w}};
    out.json_file("eps_bar.json", j);
    return j;
}

struct BubbleOpts {
    std::string grid = "default";
    double rho = 1.0;
    double amplitude = 1.0;
};

json run_bubble(const BubbleOpts& o, Output& out) {
    const std::vector<double> eps = o.grid == "default" ? default_eps_grid() : parse_list(o.grid);
    std::vector<std::future<BubbleRun>> jobs;
    for (double e : eps)
        jobs.push_back(std::async(std::launch::async, [e, &o] { return bubble_integrals(e, o.rho, o.amplitude); }));
    std::vector<BubbleRun> runs;
    for (auto& j : jobs) runs.push_back(j.get());
    io::Table t{{"epsilon", "I_lap2", "I_cross", "I_grad4", "I_exp", "I_lower", "F_P", "F_tau"}, {}};
    for (const auto& r : runs) {
        const auto& I = r.integrals;
        t.rows.push_back({r.epsilon, I.I_lap2, I.I_cross, I.I_grad4, I.I_exp, I.I_lower, r.F_P, r.F_tau});
    }
    out.csv("bubble.csv", t);
    const SlopeFit f = slope_fit(runs);
    const json j = {{"slope_P", f.slope_P},
                    {"slope_tau", f.slope_tau},
                    {"slope_P_over_omega3", f.slope_P / kOmega3},
                    {"slope_tau_over_omega3", f.slope_tau / kOmega3},
                    {"naive_P", f.naive_P},
                    {"naive_tau", f.naive_tau},
                    {"slope_lap2", f.slope_lap2},
                    {"slope_cross", f.slope_cross},
                    {"slope_grad4", f.slope_grad4},
                    {"slope_lower", f.slope_lower},
                    {"slope_exp", f.slope_exp},
                    {"model_terms", f.model_terms},
                    {"cutoff", Cutoff::formula()},
                    {"rho", o.rho},
                    {"amplitude", o.amplitude}};
    out.json_file("fit.json", j);
    return j;
}

// Chain identities and exact solutions; any failure gives exit code 4.
struct VerifyOpts {
    unsigned states = 10000;
    unsigned seed = 7;
};

template <class F>
double flow_derivative(const Coefficients& c, const State3& s, F&& f) {
    const auto v = system_rhs(c, s);
    const double h = 1e-2 / (1.0 + std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]));
    auto at = [&](double k) { return f(State3{s.x + k * h * v[0], s.y + k * h * v[1], s.z + k * h * v[2]}); };
    return (at(-2.0) - 8.0 * at(-1.0) + 8.0 * at(1.0) - at(2.0)) / (12.0 * h);
}

json run_verify(const Coefficients& c, const VerifyOpts& o, Output& out, bool& ok) {
    json checks = json::array();
    auto add = [&](const std::string& name, double value, double tol) {
        const bool pass = value <= tol;
        ok = ok && pass;
        checks.push_back({{"check", name}, {"value", value}, {"tol", tol}, {"pass", pass}});
    };
    std::mt19937_64 rng(o.seed);
    std::uniform_real_distribution<double> U(-3.0, 3.0);
    const double qrate = (32.0 / 3.0) * (1.0 + c.beta);
    double rK = 0, rQ = 0, rF = 0, rG = 0;
    for (unsigned i = 0; i < o.states; ++i) {
        const State3 s{U(rng), U(rng), U(rng)};
        const double C = 10.0 * U(rng);
        const double K = invariant_K(c, s);
        const auto d = diagnostics(c, s, C);
        const double dK = flow_derivative(c, s, [&](const State3& q) { return invariant_K(c, q); });
        const double dQ = flow_derivative(c, s, [&](const State3& q) { return invariant_Q(c, q); });
        const double dF = flow_derivative(c, s, [&](const State3& q) { return diagnostics(c, q, C).F_C; });
        const double dG = flow_derivative(c, s, [&](const State3& q) { return diagnostics(c, q, C).G_C; });
        const double scale = 1.0 + std::abs(K) * (1.0 + std::abs(s.x));
        rK = std::max(rK, std::abs(dK + 4.0 * s.x * K) / scale);
        rQ = std::max(rQ, std::abs(dQ + qrate * K) / scale);
        rF = std::max(rF, std::abs(dF - 2.0 * s.y * d.G_C) / (1.0 + std::abs(d.F_C) + std::abs(s.y * d.G_C)));
        rG = std::max(rG, std::abs(dG - (2.0 / 3.0) * K) / scale);
    }
    add("dK/dt = -4xK", rK, 1e-9);
    add("dQ/dt = -(32/3)(1+beta)K", rQ, 1e-9);
    add("dF_C/dt = 2y G_C", rF, 1e-9);
    add("dG_C/dt = (2/3)K", rG, 1e-9);

    double st = 0;
    for (const auto& p : stationary_points(c)) st = std::max(st, std::abs(system_rhs(c, p)[2]));
    add("stationary residual", st, 1e-12);

    double round = 0, nt = 0;
    for (int i = 0; i <= 200; ++i) {
        const double t = 0.05 * i, th = std::tanh(t), s2 = 1.0 - th * th;
        const double zdot_exact = 4.0 * s2 * th * th - 2.0 * s2 * s2;
        round = std::max(round, std::abs(system_rhs(c, State3{th, s2, -2.0 * s2 * th})[2] - zdot_exact));
        nt = std::max(nt, std::abs(nt_residual(c, {t, -std::log(std::cosh(t)), -th, -s2, 2.0 * s2 * th})));
    }
    add("round solution residual", round, 1e-12);
    add("first integral on round solution", nt, 1e-12);

    if (c.beta > -1.0 && c.beta < -0.25) {
        const DiscRange r = disc_range(c);
        const DiscOrbit d = disc_orbit(c, 0.5 * (r.C_lo + r.C_hi));
        add("disc orbit K", d.max_K, 1e-8);
        add("disc orbit Q", d.max_Q_dev, 1e-8);
        add("disc orbit third-order residual", d.max_ode_residual, 1e-8);
    }
    out.json_file("checks.json", checks);
    return {{"checks", checks.size()}, {"all_pass", ok}};
}

// ---- driver --------------------------------------------------------------

std::string timestamp() {
    const std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return buf;
}

int replay(const std::string& manifest_path, bool verbose);

int run_cli(std::vector<std::string> args, bool record = true) {
    CLI::App app{"ODE reductions of critical metrics of regularized determinants"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "key=value configuration file; flags override it");
    Common common;
    app.add_option("--coeffs", common.coeffs, "preset: paneitz, half-torsion, conformal-laplacian")->capture_default_str();
    app.add_option("--gamma", common.gamma, "explicit gamma1 gamma2 gamma3")->expected(3);
    app.add_option("--out", common.out, "output directory")->capture_default_str();

    DelaunayOpts del;
    auto* s_del = app.add_subcommand("delaunay", "C = 0 periodic family");
    s_del->add_option("--n", del.n, "number of family members")->capture_default_str();
    s_del->add_option("--alpha", del.alphas, "comma-separated alpha values");

    OrbitOpts orb;
    auto* s_orb = app.add_subcommand("orbit", "single Newton orbit or special orbit");
    s_orb->add_option("--C", orb.C)->capture_default_str();
    s_orb->add_option("--H", orb.H, "energy level");
    s_orb->add_flag("--special", orb.special, "heteroclinic/homoclinic orbit");
    s_orb->add_option("--samples", orb.samples)->capture_default_str();

    ClassifyOpts cls;
    auto* s_cls = app.add_subcommand("classify-potential", "critical points and case of V_C");
    s_cls->add_option("--C", cls.Cs, "comma-separated C values")->capture_default_str();
    s_cls->add_option("--samples", cls.samples)->capture_default_str();

    DiscOpts dsc;
    auto* s_dsc = app.add_subcommand("disc", "invariant disc chart");
    s_dsc->add_option("--grid", dsc.grid)->capture_default_str();
    s_dsc->add_option("--samples", dsc.samples)->capture_default_str();

    auto* s_sta = app.add_subcommand("stationary", "stationary points and spectra");

    LinearizeOpts lin;
    auto* s_lin = app.add_subcommand("linearize", "linearized operator at the round solution");
    s_lin->add_option("--T", lin.T)->capture_default_str();
    s_lin->add_option("--window-lo", lin.window_lo)->capture_default_str();

    ShootOpts sho;
    auto* s_sho = app.add_subcommand("shoot", "classify one shooting trajectory");
    s_sho->add_option("--eps", sho.eps)->capture_default_str();
    s_sho->add_option("--t-max", sho.t_max)->capture_default_str();
    s_sho->add_option("--rtol", sho.rtol)->capture_default_str();
    s_sho->add_option("--atol", sho.atol)->capture_default_str();

    EpsBarOpts eb;
    auto* s_eb = app.add_subcommand("eps-bar", "bisection for the end of the convergent range");
    s_eb->add_option("--bracket", eb.bracket)->capture_default_str();
    s_eb->add_option("--tol", eb.tol)->capture_default_str();
    s_eb->add_option("--t-max", eb.t_max)->capture_default_str();
    s_eb->add_option("--offset", eb.offset, "profile is taken at eps_bar - offset")->capture_default_str();
    s_eb->add_option("--scan", eb.scan)->capture_default_str();

    BubbleOpts bub;
    auto* s_bub = app.add_subcommand("bubble", "bubble integrals and log(1/eps) slopes");
    s_bub->add_option("--eps-grid", bub.grid)->capture_default_str();
    s_bub->add_option("--rho", bub.rho)->capture_default_str();
    s_bub->add_option("--amplitude", bub.amplitude, "1 for w_eps, -1 for -w_eps")->capture_default_str();

    VerifyOpts ver;
    auto* s_ver = app.add_subcommand("verify-invariants", "chain identities and exact solutions");
    s_ver->add_option("--states", ver.states)->capture_default_str();
    s_ver->add_option("--seed", ver.seed)->capture_default_str();

    std::string manifest_path;
    bool verbose = false;
    auto* s_rep = app.add_subcommand("replay", "re-run a manifest and compare output digests");
    s_rep->add_option("manifest", manifest_path)->required();
    s_rep->add_flag("-v,--verbose", verbose);

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kBadArgs;
    }

    if (s_rep->parsed()) return replay(manifest_path, verbose);

    Output out{fs::path(common.out)};
    json summary;
    int rc = kOk;
    const auto t0 = std::chrono::steady_clock::now();
    std::string command;
    json coeffs;
    try {
        if (!common.gamma.empty() && common.gamma.size() != 3)
            throw Error(ErrorCode::BadArgument, "--gamma takes three values");
        const Coefficients c = resolve(common);
        coeffs = coeff_json(c);
        if (s_del->parsed()) {
            command = "delaunay";
            summary = run_delaunay(c, del, out);
        } else if (s_orb->parsed()) {
            command = "orbit";
            summary = run_orbit(c, orb, out);
        } else if (s_cls->parsed()) {
            command = "classify-potential";
            summary = run_classify(c, cls, out);
        } else if (s_dsc->parsed()) {
            command = "disc";
            summary = run_disc(c, dsc, out);
        } else if (s_sta->parsed()) {
            command = "stationary";
            summary = run_stationary(c, out);
        } else if (s_lin->parsed()) {
            command = "linearize";
            summary = run_linearize(c, lin, out);
        } else if (s_sho->parsed()) {
            command = "shoot";
            summary = run_shoot(c, sho, out);
        } else if (s_eb->parsed()) {
            command = "eps-bar";
            summary = run_eps_bar(c, eb, out);
        } else if (s_bub->parsed()) {
            command = "bubble";
            summary = run_bubble(bub, out);
        } else if (s_ver->parsed()) {
            command = "verify-invariants";
            bool ok = true;
            summary = run_verify(c, ver, out, ok);
            if (!ok) rc = kCheckFailed;
        }
    } catch (const Error& e) {
        std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
        switch (e.code()) {
        case ErrorCode::Overflow:
        case ErrorCode::PlateauNotFound:
        case ErrorCode::Undefined: return kNumerical;
        default: return kBadArgs;
        }
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kBadArgs;
    }

    std::cout << summary.dump(2) << "\n";
    if (!record) return rc;

    // argv without the output directory, so a replay can redirect it
    json argv = json::array();
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--out") {
            ++i;
            continue;
        }
        if (args[i].rfind("--out=", 0) == 0 || args[i] == "--config" || args[i].rfind("--config=", 0) == 0) {
            if (args[i] == "--config") ++i;
            continue;
        }
        argv.push_back(args[i]);
    }
    const json manifest = {
        {"command", command},
        {"argv", argv},
        {"config", app.config_to_str(false, false)},
        {"resolved", app.config_to_str(true, false)},
        {"coefficients", coeffs},
        {"version", DETFLOW_VERSION},
        {"timestamp", timestamp()},
        {"wall_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()},
        {"summary", summary},
        {"files", out.files}};
    io::write_atomic(out.dir / "manifest.json", manifest.dump(2) + "\n");
    return rc;
}

int replay(const std::string& manifest_path, bool verbose) {
    json m;
    try {
        m = json::parse(io::read_file(manifest_path));
    } catch (const std::exception& e) {
        std::cerr << "error: cannot read manifest: " << e.what() << "\n";
        return kBadArgs;
    }
    const fs::path dir = fs::temp_directory_path() / ("detflow-replay-" + std::to_string(std::random_device{}()));
    fs::create_directories(dir);
    io::write_atomic(dir / "replay.conf", m.at("config").get<std::string>());
    std::vector<std::string> args = m.at("argv").get<std::vector<std::string>>();
    args.insert(args.begin(), {"--config", (dir / "replay.conf").string(), "--out", (dir / "run").string()});
    const int rc = run_cli(args, false);
    if (rc != kOk && rc != kCheckFailed) return rc;
    int mismatches = 0;
    for (const auto& [name, digest] : m.at("files").items()) {
        std::string now;
        try {
            now = io::sha256_file(dir / "run" / name);
        } catch (const Error&) {
            now = "missing";
        }
        const bool same = now == digest.get<std::string>();
        if (!same) ++mismatches;
        if (verbose || !same) std::cerr << (same ? "same     " : "DIFFERS  ") << name << "\n";
    }
    fs::remove_all(dir);
    std::cerr << (mismatches == 0 ? "replay identical" : "replay differs") << " (" << m.at("files").size()
              << " files)\n";
    return mismatches == 0 ? kOk : kCheckFailed;
}

} // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run_cli(args);
}
