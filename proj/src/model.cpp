#include "detflow/model.hpp"

#include <cmath>

namespace detflow {

Coefficients make_coefficients(double gamma1, double gamma2, double gamma3, std::string name) {
    if (gamma3 == 0.0)
        throw Error(ErrorCode::ZeroGamma3, "gamma3 must be nonzero");
    const double beta = gamma2 / (12.0 * gamma3);
    if (std::abs(beta + 1.0) < 1e-14)
        throw Error(ErrorCode::DegenerateBeta, "beta = -1 is degenerate");
    return {gamma1, gamma2, gamma3, beta, std::move(name)};
}

namespace presets {
Coefficients paneitz() { return make_coefficients(-0.25, -14.0, 8.0 / 3.0, "paneitz"); }
Coefficients half_torsion() { return make_coefficients(-13.0, -248.0, 116.0 / 3.0, "half-torsion"); }
Coefficients conformal_laplacian() {
    return make_coefficients(1.0, -4.0, -2.0 / 3.0, "conformal-laplacian");
}
} // namespace presets

Coefficients preset(std::string_view name) {
    if (name == "paneitz") return presets::paneitz();
    if (name == "half-torsion") return presets::half_torsion();
    if (name == "conformal-laplacian") return presets::conformal_laplacian();
    throw Error(ErrorCode::BadArgument, "unknown preset: " + std::string(name));
}

PotentialSpec make_potential(double C, double beta) {
    if (std::abs(beta + 1.0) < 1e-14)
        throw Error(ErrorCode::DegenerateBeta, "beta = -1 is degenerate");
    return {C, beta};
}

PotentialSpec make_potential(double C, const Coefficients& c) { return make_potential(C, c.beta); }

double exp4u(double u) {
    if (!(std::abs(4.0 * u) <= 700.0)) {
        if (4.0 * u < -700.0) return 0.0;
        throw Error(ErrorCode::Overflow, "e^{4u} overflow");
    }
    return std::exp(4.0 * u);
}

double euler_rhs_u(const Coefficients& c, const CylState& s) {
    const double b = c.beta;
    return (6.0 * b * exp4u(s.u) + 6.0 * s.u2 * s.u1 * s.u1 - (2.0 - 4.0 * b) * s.u2) / (1.0 + b);
}

std::array<double, 4> cylinder_rhs(const Coefficients& c, const std::array<double, 4>& u) {
    return {u[1], u[2], u[3], euler_rhs_u(c, {0.0, u[0], u[1], u[2], u[3]})};
}

double potential_curvature(const PotentialSpec& p, double v) {
    const double b = p.beta;
    return (-6.0 * v * v + 2.0 * (1.0 - 2.0 * b)) / (1.0 + b);
}

double invariant_K(const Coefficients& c, const State3& s) {
    const double b = c.beta;
    const double x2 = s.x * s.x;
    return -6.0 * s.x * s.z + 3.0 * s.y * s.y + 9.0 * x2 * x2 / (1.0 + b) -
           6.0 * x2 * (1.0 - 2.0 * b) / (1.0 + b) - 3.0 * (1.0 + 4.0 * b) / (1.0 + b);
}

double invariant_Q(const Coefficients& c, const State3& s) {
    const double b = c.beta;
    return -16.0 * (1.0 + b) * s.z + 32.0 * s.x * s.x * s.x + 32.0 * (2.0 * b - 1.0) * s.x;
}

double disc_hamiltonian_level(double beta) { return (7.0 + 16.0 * beta) / (6.0 * (1.0 + beta)); }

Diagnostics diagnostics(const Coefficients& c, const State3& s, double C) {
    const double b = c.beta;
    const PotentialSpec p{C, b};
    Diagnostics d;
    d.F_C = s.y * s.y + 2.0 * potential_value(p, s.x);
    d.G_C = s.z + potential_slope(p, s.x);

    const double K = invariant_K(c, s);
    const double Q = invariant_Q(c, s);
    d.W = K - 3.0 * s.x * (Q - q_limit(c)) / (8.0 * (1.0 + b));
    if (std::abs(K) >= kFFloor) {
        d.f = (Q - q_limit(c)) / K;
        d.f_defined = true;
    }

    // G'' >= (a/4) G^2 + bb G + cc along the flow; F is the matching first integral.
    const double a = 6.0 / (1.0 + b);
    const double bb = 2.0 * (2.0 * b - 1.0) / (1.0 + b);
    const double cc = -2.0 * (4.0 * b + 1.0) / (1.0 + b);
    const double g = s.y + 2.0 * s.x * s.x;
    const double gd = s.z + 4.0 * s.x * s.y;
    d.G_script = g;
    d.G_script_dot = gd;
    d.F_script = 0.5 * gd * gd - a / 12.0 * g * g * g - 0.5 * bb * g * g - cc * g;
    return d;
}

double nt_residual(const Coefficients& c, const CylState& s) {
    const double b = c.beta;
    const double N = (1.0 + b) * (s.u3 * s.u1 - 0.5 * s.u2 * s.u2) - 1.5 * std::pow(s.u1, 4) +
                     (1.0 - 2.0 * b) * s.u1 * s.u1 - 1.5 * b * exp4u(s.u);
    return 9.0 * (N + 2.0 * b + 0.5) / (1.0 + b);
}

} // namespace detflow
