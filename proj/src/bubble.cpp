#include "detflow/bubble.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <Eigen/Dense>

#include "detflow/error.hpp"
#include "detflow/quadrature.hpp"

namespace detflow {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double Cutoff::value(double r) const {
    const double s = (2.0 * r - rho) / rho;
    if (s <= 0.0) return 1.0;
    if (s >= 1.0) return 0.0;
    return 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

double Cutoff::d1(double r) const {
    const double s = (2.0 * r - rho) / rho;
    if (s <= 0.0 || s >= 1.0) return 0.0;
    return -30.0 * s * s * (1.0 - s) * (1.0 - s) * (2.0 / rho);
}

double Cutoff::d2(double r) const {
    const double s = (2.0 * r - rho) / rho;
    if (s <= 0.0 || s >= 1.0) return 0.0;
    return -60.0 * s * (1.0 - s) * (1.0 - 2.0 * s) * (4.0 / (rho * rho));
}

const char* Cutoff::formula() { return "eta(r) = 1 - (10 s^3 - 15 s^4 + 6 s^5), s = clamp((2r - rho)/rho, 0, 1)"; }

FunctionalWeights paneitz_weights() { return {"paneitz", 18.0, 64.0, 32.0, -60.0, 112.0 * kPi * kPi}; }
FunctionalWeights half_torsion_weights() { return {"half-torsion", 216.0, 928.0, 464.0, -2352.0, 1984.0 * kPi * kPi}; }

double evaluate(const FunctionalWeights& w, const BubbleIntegrals& I) {
    return w.lap2 * I.I_lap2 + w.cross * I.I_cross + w.grad4 * I.I_grad4 + w.lower * I.I_lower + w.exp * I.I_exp;
}

RadialJet bubble_jet(double eps, const Cutoff& eta, double amplitude, double r) {
    const double q = eps * eps + r * r;
    const double g = std::log(q), g1 = 2.0 * r / q, g2 = 2.0 * (eps * eps - r * r) / (q * q);
    const double e0 = eta.value(r), e1 = eta.d1(r), e2 = eta.d2(r);
    const double k = -0.5 * amplitude;
    return {k * e0 * g, k * (e1 * g + e0 * g1), k * (e2 * g + 2.0 * e1 * g1 + e0 * g2)};
}

BubbleRun bubble_integrals(double epsilon, double rho, double amplitude, double rel_tol) {
    if (!(rho > 0.0) || !(epsilon > 0.0)) throw Error(ErrorCode::BadArgument, "epsilon and rho must be positive");
    if (!(epsilon < rho / 10.0)) throw Error(ErrorCode::EpsilonTooLarge, "epsilon must be below rho/10");
    const Cutoff eta{rho};

    // breakpoints: 0, eps, decades up to rho/2, rho
    std::vector<double> cuts{0.0, epsilon};
    for (double r = 10.0 * epsilon; r < 0.5 * rho; r *= 10.0) cuts.push_back(r);
    cuts.push_back(0.5 * rho);
    cuts.push_back(rho);

    auto radial = [&](auto&& density) {
        double total = 0.0;
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            const auto res = gl_doubling([&](double r) { return density(r) * r * r * r; }, cuts[i], cuts[i + 1],
                                         rel_tol * 1e-2, 32, 2048);
            total += res.value;
        }
        return kOmega3 * total;
    };

    BubbleRun run;
    run.epsilon = epsilon;
    run.cutoff_radius = rho;
    run.amplitude = amplitude;
    auto& I = run.integrals;
    auto lap = [&](double r) {
        const RadialJet j = bubble_jet(epsilon, eta, amplitude, r);
        return j.w2 + (r > 0.0 ? 3.0 * j.w1 / r : 3.0 * j.w2);
    };
    auto grad2 = [&](double r) {
        const double w1 = bubble_jet(epsilon, eta, amplitude, r).w1;
        return w1 * w1;
    };
    I.I_lap2 = radial([&](double r) { const double l = lap(r); return l * l; });
    I.I_cross = radial([&](double r) { return lap(r) * grad2(r); });
    I.I_grad4 = radial([&](double r) { const double g = grad2(r); return g * g; });
    I.I_lower = radial(grad2);

    const double vol = kOmega3 * std::pow(rho, 4) / 4.0;
    const double wbar = radial([&](double r) { return bubble_jet(epsilon, eta, amplitude, r).w; }) / vol;
    const double mean_exp =
        radial([&](double r) { return std::exp(4.0 * (bubble_jet(epsilon, eta, amplitude, r).w - wbar)); }) / vol;
    I.I_exp = std::log(mean_exp);

    run.F_P = evaluate(paneitz_weights(), I);
    run.F_tau = evaluate(half_torsion_weights(), I);
    return run;
}

std::vector<double> default_eps_grid() { return {1e-2, 3e-3, 1e-3, 3e-4, 1e-4, 3e-5, 1e-5}; }

double log_slope(const std::vector<double>& L, const std::vector<double>& y, int terms) {
    const int n = static_cast<int>(L.size());
    terms = std::clamp(terms, 1, std::min(4, n));
    Eigen::MatrixXd A(n, terms);
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i) {
        const double basis[4] = {L[i], 1.0, std::log(L[i]), 1.0 / L[i]};
        for (int j = 0; j < terms; ++j) A(i, j) = basis[j];
        b(i) = y[i];
    }
    const Eigen::VectorXd x = A.colPivHouseholderQr().solve(b);
    return x(0);
}

SlopeFit slope_fit(const std::vector<BubbleRun>& runs) {
    std::set<double> distinct;
    for (const auto& r : runs) distinct.insert(r.epsilon);
    if (distinct.size() < 3) throw Error(ErrorCode::InsufficientSpan, "need at least 3 distinct epsilon values");
    if (std::log10(*distinct.rbegin() / *distinct.begin()) < 2.0 - 1e-12)
        throw Error(ErrorCode::InsufficientSpan, "epsilon values must span at least two decades");
    if (leading_coefficient(paneitz_weights()) != -24 || leading_coefficient(half_torsion_weights()) != -528)
        throw Error(ErrorCode::Undefined, "leading coefficient identity failed");

    std::vector<double> L;
    std::vector<double> fp, ft, lap2, cross, grad4, lower, ex;
    for (const auto& r : runs) {
        L.push_back(std::log(1.0 / r.epsilon));
        fp.push_back(r.F_P);
        ft.push_back(r.F_tau);
        lap2.push_back(r.integrals.I_lap2);
        cross.push_back(r.integrals.I_cross);
        grad4.push_back(r.integrals.I_grad4);
        lower.push_back(r.integrals.I_lower);
        ex.push_back(r.integrals.I_exp);
    }
    const int terms = std::min(4, static_cast<int>(distinct.size()) - 1);
    SlopeFit f;
    f.model_terms = terms;
    f.slope_P = log_slope(L, fp, terms);
    f.slope_tau = log_slope(L, ft, terms);
    f.naive_P = log_slope(L, fp, 2);
    f.naive_tau = log_slope(L, ft, 2);
    // the polynomial-in-eps integrals carry no log L term
    f.slope_lap2 = log_slope(L, lap2, 2);
    f.slope_cross = log_slope(L, cross, 2);
    f.slope_grad4 = log_slope(L, grad4, 2);
    f.slope_lower = log_slope(L, lower, 2);
    f.slope_exp = log_slope(L, ex, terms);
    return f;
}

int leading_coefficient(const FunctionalWeights& w) {
    return static_cast<int>(std::lround(w.lap2)) * 4 + static_cast<int>(std::lround(w.cross)) * (-2) +
           static_cast<int>(std::lround(w.grad4)) * 1;
}

} // namespace detflow
