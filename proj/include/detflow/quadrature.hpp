#pragma once

#include <cmath>
#include <functional>
#include <vector>

namespace detflow {

struct GaussLegendreRule {
    std::vector<double> nodes;   // on [-1, 1]
    std::vector<double> weights;
};

// Cached n-point rule; safe to call concurrently.
const GaussLegendreRule& gauss_legendre(unsigned n);

double gl_integrate(const std::function<double(double)>& f, double a, double b, unsigned n);

struct QuadResult {
    double value = 0.0;
    double change = 0.0;   // difference between the last two refinements
    unsigned nodes = 0;    // 0 when the adaptive fallback was used
    bool converged = false;
};

// Gauss-Legendre with node doubling from n0 until successive values differ by
// less than tol (cap nodes). Falls back to adaptive Gauss-Kronrod otherwise.
QuadResult gl_doubling(const std::function<double(double)>& f, double a, double b,
                       double tol = 1e-10, unsigned n0 = 64, unsigned cap = 1024);

// Adaptive Gauss-Kronrod (61 point) with relative tolerance.
double gk_adaptive(const std::function<double(double)>& f, double a, double b, double rel_tol,
                   double* error_estimate = nullptr);

} // namespace detflow
