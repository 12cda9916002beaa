#pragma once

#include <limits>
#include <vector>

#include "detflow/model.hpp"

namespace detflow {

struct DiscRange {
    double C_lo = 0.0;      // orbit collapses to the inner equilibrium
    double C_hi = 0.0;      // orbit becomes homoclinic to (1, 0, 0)
    double x_inner = 0.0;
    double level = 0.0;     // Newton energy of the disc orbits
};

DiscRange disc_range(const Coefficients& c);

// Value of Q on the disc orbit with constant C.
double disc_q(const Coefficients& c, double C);

enum class DiscKind { Center, Periodic, Homoclinic };
const char* to_string(DiscKind k);

struct DiscOrbit {
    double C = 0.0;
    DiscKind kind = DiscKind::Periodic;
    double period = std::numeric_limits<double>::infinity();
    std::vector<double> t;
    std::vector<State3> samples;
    // verification residuals over the samples
    double max_energy_residual = 0.0;   // |F_C - 2 level|
    double max_G = 0.0;
    double max_K = 0.0;
    double max_Q_dev = 0.0;             // |Q - disc_q|
    double max_ode_residual = 0.0;      // third-order equation along the lifted curve
};

DiscOrbit disc_orbit(const Coefficients& c, double C, unsigned samples = 512);
std::vector<DiscOrbit> disc_chart(const Coefficients& c, unsigned n, unsigned samples = 512);

bool disc_member(const Coefficients& c, const State3& s, double tol = 1e-6);

// Every (x, y) sample of `inner` lies inside the closed polygon of `outer`.
bool projection_contains(const DiscOrbit& outer, const DiscOrbit& inner);

} // namespace detflow
