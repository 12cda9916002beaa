#pragma once

#include <array>
#include <string>
#include <string_view>

#include "detflow/error.hpp"

namespace detflow {

// (γ1, γ2, γ3) selects the functional; everything downstream only sees beta.
struct Coefficients {
    double gamma1 = 0.0;
    double gamma2 = 0.0;
    double gamma3 = 0.0;
    double beta = 0.0;
    std::string name = "custom";
};

Coefficients make_coefficients(double gamma1, double gamma2, double gamma3,
                               std::string name = "custom");
Coefficients preset(std::string_view name);

namespace presets {
Coefficients paneitz();
Coefficients half_torsion();
Coefficients conformal_laplacian();
} // namespace presets

struct CylState {
    double t = 0.0;
    double u = 0.0;
    double u1 = 0.0;
    double u2 = 0.0;
    double u3 = 0.0;
};

// x = -u', y = x', z = y'
struct State3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    std::array<double, 3> array() const { return {x, y, z}; }
    static State3 from(const std::array<double, 3>& a) { return {a[0], a[1], a[2]}; }
};

struct PotentialSpec {
    double C = 0.0;
    double beta = 0.0;
};

PotentialSpec make_potential(double C, double beta);
PotentialSpec make_potential(double C, const Coefficients& c);

// e^{4u} with the overflow guard; throws ErrorCode::Overflow past |4u| > 700.
double exp4u(double u);

double euler_rhs_u(const Coefficients& c, const CylState& s);
std::array<double, 4> cylinder_rhs(const Coefficients& c, const std::array<double, 4>& u);

template <class Real>
std::array<Real, 3> system_rhs_t(const Coefficients& c, const std::array<Real, 3>& s) {
    const Real b = Real(c.beta);
    const Real k = 1 / (1 + b);
    const Real x = s[0], y = s[1], z = s[2];
    const Real x2 = x * x;
    const Real zdot = -4 * x * z + 6 * k * x2 * y + 2 * y * y + 2 * (2 * b - 1) * k * y + 6 * k * x2 * x2 +
                      4 * (2 * b - 1) * k * x2 - 2 * (4 * b + 1) * k;
    return {y, z, zdot};
}

inline std::array<double, 3> system_rhs(const Coefficients& c, const std::array<double, 3>& s) {
    return system_rhs_t<double>(c, s);
}
inline std::array<double, 3> system_rhs(const Coefficients& c, const State3& s) {
    return system_rhs_t<double>(c, s.array());
}

// V_{C,beta} and its first two derivatives. Templated so the Newton equation
// can be run in extended precision.
template <class Real>
Real potential_value_t(const PotentialSpec& p, Real v) {
    const Real b = Real(p.beta);
    const Real v2 = v * v;
    return -v2 * v2 / (Real(2) * (1 + b)) + v2 * (1 - 2 * b) / (1 + b) - Real(p.C) * v / 9 +
           Real(2) / 3;
}

template <class Real>
Real potential_slope_t(const PotentialSpec& p, Real v) {
    const Real b = Real(p.beta);
    return -Real(2) * v * v * v / (1 + b) + Real(2) * v * (1 - 2 * b) / (1 + b) - Real(p.C) / 9;
}

inline double potential_value(const PotentialSpec& p, double v) { return potential_value_t(p, v); }
inline double potential_slope(const PotentialSpec& p, double v) { return potential_slope_t(p, v); }
double potential_curvature(const PotentialSpec& p, double v);
inline double newton_rhs(const PotentialSpec& p, double v) { return -potential_slope(p, v); }

double invariant_K(const Coefficients& c, const State3& s);
double invariant_Q(const Coefficients& c, const State3& s);

// Q at the boundary equilibrium (1,0,0); the admissible limit value of Q.
inline double q_limit(const Coefficients& c) { return 64.0 * c.beta; }

// Level of the Newton Hamiltonian y^2/2 + V_C(x) on which {G_C = 0} meets {K = 0}.
double disc_hamiltonian_level(double beta);

struct Diagnostics {
    double F_C = 0.0;
    double G_C = 0.0;
    double W = 0.0;
    double f = 0.0;
    bool f_defined = false;
    double G_script = 0.0;
    double G_script_dot = 0.0;
    double F_script = 0.0;
};

inline constexpr double kFFloor = 1e-13;

Diagnostics diagnostics(const Coefficients& c, const State3& s, double C);

double nt_residual(const Coefficients& c, const CylState& s);

} // namespace detflow
