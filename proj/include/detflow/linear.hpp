#pragma once

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "detflow/integrate.hpp"
#include "detflow/model.hpp"

namespace detflow {

using Mat3 = std::array<std::array<double, 3>, 3>;

std::vector<State3> stationary_points(const Coefficients& c);

Mat3 jacobian_at(const Coefficients& c, const State3& p);

enum class FixedPointKind { Saddle, CenterLike, Sink, Source, Nonhyperbolic };
const char* to_string(FixedPointKind k);

struct Eigen3 {
    std::array<std::complex<double>, 3> values;                    // real ones first, descending
    std::array<std::optional<std::array<double, 3>>, 3> vectors;   // unit vectors for real eigenvalues
    std::array<double, 3> charpoly{};                              // lambda^3 + c2 lambda^2 + c1 lambda + c0
    double max_charpoly_residual = 0.0;
    double max_vector_residual = 0.0;
};

Eigen3 eigen3(const Mat3& m);

struct SpectralReport {
    State3 point;
    Mat3 jacobian{};
    Eigen3 eig;
    FixedPointKind kind = FixedPointKind::Nonhyperbolic;
};

SpectralReport spectral_report(const Coefficients& c, const State3& p);

// Linearization of the fourth-order equation at the round solution u0 = -log cosh t.
std::array<double, 4> linearized_rhs(const Coefficients& c, double t, const std::array<double, 4>& phi);
std::array<double, 4> linearized_initial(const Coefficients& c);

struct PhiResult {
    Trajectory<4> trajectory;
    double A = 0.0;
    double flatness = 0.0;   // relative spread of phi e^{-2t} on the window
    std::array<double, 3> ratios{};   // phi'/phi, phi''/phi, phi'''/phi at t = T
    double window_lo = 12.0;
    double window_hi = 15.0;
};

PhiResult linearized_phi(const Coefficients& c, double T = 15.0, double window_lo = 12.0,
                         double rel_tol = 1e-12, double abs_tol = 1e-14, double flatness_tol = 1e-6);

} // namespace detflow
