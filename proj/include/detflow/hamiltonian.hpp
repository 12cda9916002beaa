#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "detflow/model.hpp"

namespace detflow {

enum class CriticalKind { Max, Min, Inflection };
const char* to_string(CriticalKind k);

struct CriticalPoint {
    double v = 0.0;
    double V = 0.0;
    CriticalKind kind = CriticalKind::Max;
};

// Roots of V'_{C,beta}, sorted by v.
std::vector<CriticalPoint> critical_points(const PotentialSpec& p);

enum class PotentialCase { Case1, Case2, Case3, Coercive };
const char* to_string(PotentialCase c);

struct CaseReport {
    PotentialCase label = PotentialCase::Case1;
    double threshold = 0.0;   // |C_beta|; infinite in the coercive regime
    bool reflected = false;   // C < 0 handled through v -> -v
};

double case_threshold(double beta);
CaseReport case_classify(const PotentialSpec& p);

struct TurningPoints {
    double lo = 0.0;
    double hi = 0.0;
};

// The component of {V <= H} around the local minimum of V nearest to `near`.
TurningPoints turning_points(const PotentialSpec& p, double H, double near = 0.0);

double orbit_period(const PotentialSpec& p, double H, double near = 0.0);
double average_slope(const PotentialSpec& p, double H, double near = 0.0);

enum class OrbitKind { Constant, Periodic, Homoclinic, Heteroclinic };
const char* to_string(OrbitKind k);

struct OrbitSummary {
    double C = 0.0;
    double beta = 0.0;
    double H = 0.0;
    double alpha = 0.0;
    double v_lo = 0.0;
    double v_hi = 0.0;
    double period = std::numeric_limits<double>::infinity();
    double avg_slope = 0.0;
    OrbitKind kind = OrbitKind::Periodic;
    double bound_constant = 1.0;   // C_alpha: e^{2u} between |x|^{-2}/C_alpha and C_alpha |x|^{-2}
};

OrbitSummary orbit_summary(const PotentialSpec& p, double H, double near = 0.0);

// C = 0 family; alpha is the energy normalized between the well bottom and the
// separatrix, which for beta = -7/16 is alpha = 8/25 (H - 2/3).
double delaunay_energy(double beta, double alpha);
OrbitSummary delaunay_family(const Coefficients& c, double alpha);

struct SampledOrbit {
    std::vector<double> t;
    std::vector<double> v;
    std::vector<double> vdot;
};

struct SpecialOrbit {
    OrbitKind kind = OrbitKind::Heteroclinic;
    double C = 0.0;
    double beta = 0.0;
    double H = 0.0;
    double v_minus = 0.0;   // limit as t -> -infinity
    double v_plus = 0.0;    // limit as t -> +infinity
    double A = 0.0;         // heteroclinic amplitude, v = A tanh(k t)
    double k = 0.0;
    double exponent_near_zero = 0.0;   // metric ~ r^{e0} dx^2 near the origin
    double exponent_near_infinity = 0.0;
    double cone_factor = 0.0;          // A^2 for the explicit heteroclinic
    double saddle_rate = 0.0;
    double offset = 0.0;               // unstable-manifold launch offset (homoclinic)
    double excursion_time = 0.0;       // time spent away from the saddle (homoclinic)
    SampledOrbit samples;
};

SpecialOrbit special_orbit(const PotentialSpec& p, unsigned samples = 401);

// Closed forms of the explicit heteroclinic at C = 0.
double heteroclinic_v(double beta, double t);
double heteroclinic_u(double beta, double t);

// Newton vector field (v, v') -> (v', -V'(v)).
template <class Real>
std::array<Real, 2> newton_field(const PotentialSpec& p, const std::array<Real, 2>& s) {
    return {s[1], -potential_slope_t<Real>(p, s[0])};
}

inline double newton_energy(const PotentialSpec& p, double v, double vdot) {
    return 0.5 * vdot * vdot + potential_value(p, v);
}

// Plot data for the three potential panels (C = 0, 0 < C < threshold, C >= threshold).
struct PotentialPanel {
    double C = 0.0;
    std::vector<double> v;
    std::vector<double> V;
};
std::vector<PotentialPanel> potential_figure(const Coefficients& c, unsigned n = 401);

} // namespace detflow
