#pragma once

#include <string>
#include <vector>

namespace detflow {

inline constexpr double kOmega3 = 2.0 * 3.14159265358979323846 * 3.14159265358979323846;

// Cutoff equal to 1 on r <= rho/2 and 0 on r >= rho:
// eta = 1 - (10 s^3 - 15 s^4 + 6 s^5), s = (2r - rho)/rho.
struct Cutoff {
    double rho = 1.0;
    double value(double r) const;
    double d1(double r) const;
    double d2(double r) const;
    static const char* formula();
};

struct BubbleIntegrals {
    double I_lap2 = 0.0;    // int (Lap w)^2
    double I_cross = 0.0;   // int Lap w |grad w|^2
    double I_grad4 = 0.0;   // int |grad w|^4
    double I_exp = 0.0;     // log of the mean of e^{4(w - wbar)} over the ball
    double I_lower = 0.0;   // int |grad w|^2
};

struct FunctionalWeights {
    std::string name;
    double lap2, cross, grad4, lower, exp;
};

FunctionalWeights paneitz_weights();
FunctionalWeights half_torsion_weights();
double evaluate(const FunctionalWeights& w, const BubbleIntegrals& I);

struct BubbleRun {
    double epsilon = 0.0;
    double cutoff_radius = 0.0;
    double amplitude = 1.0;   // w = amplitude * (-1/2) eta log(eps^2 + r^2)
    BubbleIntegrals integrals;
    double F_P = 0.0;
    double F_tau = 0.0;
};

// Radial profile and its derivatives (w, w', w'') at r.
struct RadialJet {
    double w, w1, w2;
};
RadialJet bubble_jet(double eps, const Cutoff& eta, double amplitude, double r);

BubbleRun bubble_integrals(double epsilon, double rho, double amplitude = 1.0, double rel_tol = 1e-10);

std::vector<double> default_eps_grid();

struct SlopeFit {
    double slope_P = 0.0;
    double slope_tau = 0.0;
    double naive_P = 0.0;     // plain linear fit in log(1/eps)
    double naive_tau = 0.0;
    double slope_lap2 = 0.0;
    double slope_cross = 0.0;
    double slope_grad4 = 0.0;
    double slope_lower = 0.0;
    double slope_exp = 0.0;
    int model_terms = 0;
};

// Leading coefficient of y against L = log(1/eps) in the model
// y = a L + b + c log L + d / L, truncated to the available data.
double log_slope(const std::vector<double>& L, const std::vector<double>& y, int terms);

SlopeFit slope_fit(const std::vector<BubbleRun>& runs);

// Leading log(1/eps) coefficients of F in units of omega_3, from the
// per-integral leading coefficients (4, -2, 1).
int leading_coefficient(const FunctionalWeights& w);

} // namespace detflow
