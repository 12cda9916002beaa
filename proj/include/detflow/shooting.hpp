#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "detflow/integrate.hpp"
#include "detflow/model.hpp"

namespace detflow {

struct InitialState {
    State3 state;
    double u0 = 0.0;
};

InitialState initial_state(const Coefficients& c, double eps);

struct ShootConfig {
    double k_tol = 1e-6;
    double q_tol = 1e-5;
    double window_frac = 0.2;
    double t_max = 200.0;
    int max_doublings = 4;
    double lambda_margin = 0.5;
    // A run that enters this ball around (1,0,0) is on the saddle's stable
    // manifold to working precision and is continued along the linear stable tail.
    double capture_radius = 1e-5;
    bool saddle_capture = true;

    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = 0.1;
    double blowup_norm = 1e3;
    double x_trigger = 3.0;
};

enum class Verdict { Blowup, Convergent, Undecided };
const char* to_string(Verdict v);

struct ShootOutcome {
    double epsilon = 0.0;
    Verdict verdict = Verdict::Undecided;
    double blowup_time = 0.0;
    double lambda = 0.0;
    double decay_rate = 0.0;
    double t_max = 0.0;           // horizon actually used
    double final_K = 0.0;
    double final_Q = 0.0;
    double q_spread = 0.0;        // oscillation of Q on the trailing window
    double sup_norm = 0.0;
    double sup_x = 0.0;
    double min_K = 0.0;
    double q_increase = 0.0;      // largest upward jump of Q between samples
    bool captured = false;
    double capture_time = 0.0;
    bool member = false;          // Convergent with Lambda in the admissible band
    Trajectory<3> trajectory;
};

std::pair<double, double> lambda_band(const Coefficients& c, double margin);

ShootOutcome classify_trajectory(const Coefficients& c, double eps, const ShootConfig& cfg = {});

struct EpsBarResult {
    double eps_bar = 0.0;
    double eps_lo = 0.0;   // last member
    double eps_hi = 0.0;   // first non-member
    std::vector<std::pair<double, double>> lambda_trace;   // (eps, Lambda) over members, sorted
    int undecided = 0;
    int runs = 0;
    double tol = 0.0;
};

EpsBarResult find_eps_bar(const Coefficients& c, std::pair<double, double> bracket, double tol,
                          const ShootConfig& cfg = {}, int scan_points = 40);

// State (x, y, z, u, volume) sampled on a uniform grid, with u' = -x and
// volume' = e^{4u}.
struct AdmissibleProfile {
    double epsilon = 0.0;
    std::vector<double> t;
    std::vector<std::array<double, 5>> states;
    bool tail_used = false;
    double switch_time = 0.0;
    double switch_distance = 0.0;
    double discarded_unstable = 0.0;
};

AdmissibleProfile admissible_profile(const Coefficients& c, double eps, const ShootConfig& cfg = {},
                                     double dt = 0.05);
// Raw forward integration of (x, y, z, u, volume), no stable-tail continuation.
AdmissibleProfile raw_profile(const Coefficients& c, double eps, const ShootConfig& cfg = {}, double dt = 0.05);

struct AdmissibilityReport {
    bool x_limit_ok = false;
    bool u2_limit_ok = false;
    double x_window_min = 0.0;
    double x_window_max = 0.0;
    double y_window_max = 0.0;
    double volume = 0.0;
    bool volume_ok = false;
    double volume_from_q = 0.0;   // Q(t_end) / (96 beta)
};

AdmissibilityReport admissibility_check(const Coefficients& c, const AdmissibleProfile& prof,
                                        double window_frac = 0.25, double tol = 1e-3,
                                        double band = 1e-3);

struct SphereProfile {
    std::vector<double> x5;
    std::vector<double> w;
    double sup_abs_w = 0.0;
    double max_asymmetry = 0.0;
};

SphereProfile sphere_lift(const std::vector<double>& t, const std::vector<double>& u);

struct GronwallReport {
    double eps = 0.0;
    double delta = 0.0;
    double A = 0.0;
    double t_lo = 0.0;
    double t_hi = 0.0;
    std::array<double, 3> literal_ratio{};     // max |lhs| / (delta eps A e^{2t})
    std::array<double, 3> remainder_ratio{};   // max |X - X0 - eps phi| / (delta eps A e^{2t})
    std::array<bool, 3> literal_ok{};
    std::array<bool, 3> remainder_ok{};
    bool defined_on_window = false;
};

// With eps = 0 the window ends at t_cap and the comparator is delta e^{-2t}. The round orbit
// approaches a saddle, so roundoff grows like e^{2t}; keep t_cap below about 8 in that case.
GronwallReport gronwall_check(const Coefficients& c, double eps, double delta, double t_cap = 60.0);

struct OmegaReport {
    double eta = 0.1;
    double B = 100.0;
    bool entered = false;
    double entry_time = 0.0;
    std::size_t violations = 0;
    double max_violation = 0.0;
};

OmegaReport omega_invariance_check(const Coefficients& c, const Trajectory<3>& tr, double eta = 0.1,
                                   double B = 100.0, double tol = 1e-9);

// x = -u' from the fourth-order cylinder equation, for cross-checking the
// reduced system; columns (t, u, u', u'', u''').
Trajectory<4> integrate_cylinder(const Coefficients& c, double eps, double t_end, double rel_tol = 1e-12,
                                 double abs_tol = 1e-14);

} // namespace detflow
