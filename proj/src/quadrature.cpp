#include "detflow/quadrature.hpp"

#include <map>
#include <memory>
#include <mutex>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/legendre.hpp>

#include "detflow/error.hpp"

namespace detflow {

const GaussLegendreRule& gauss_legendre(unsigned n) {
    static std::mutex mu;
    static std::map<unsigned, std::unique_ptr<GaussLegendreRule>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[n];
    if (slot) return *slot;
    if (n == 0) throw Error(ErrorCode::BadArgument, "Gauss-Legendre rule needs n >= 1");

    auto rule = std::make_unique<GaussLegendreRule>();
    // boost returns the non-negative zeros in increasing order
    const std::vector<double> zeros = boost::math::legendre_p_zeros<double>(static_cast<int>(n));
    auto weight = [n](double x) {
        const double dp = boost::math::legendre_p_prime<double>(static_cast<int>(n), x);
        return 2.0 / ((1.0 - x * x) * dp * dp);
    };
    for (auto it = zeros.rbegin(); it != zeros.rend(); ++it) {
        if (*it == 0.0) continue;
        rule->nodes.push_back(-*it);
        rule->weights.push_back(weight(*it));
    }
    if (n % 2 == 1) {
        rule->nodes.push_back(0.0);
        rule->weights.push_back(weight(0.0));
    }
    for (const double z : zeros) {
        if (z == 0.0) continue;
        rule->nodes.push_back(z);
        rule->weights.push_back(weight(z));
    }
    slot = std::move(rule);
    return *slot;
}

double gl_integrate(const std::function<double(double)>& f, double a, double b, unsigned n) {
    const auto& r = gauss_legendre(n);
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * f(c + h * r.nodes[i]);
    return h * s;
}

QuadResult gl_doubling(const std::function<double(double)>& f, double a, double b, double tol,
                       unsigned n0, unsigned cap) {
    QuadResult res;
    double prev = gl_integrate(f, a, b, n0);
    for (unsigned n = 2 * n0; n <= cap; n *= 2) {
        const double cur = gl_integrate(f, a, b, n);
        res.value = cur;
        res.change = std::abs(cur - prev);
        res.nodes = n;
        if (res.change < tol) {
            res.converged = true;
            return res;
        }
        prev = cur;
    }
    double err = 0.0;
    const double v = gk_adaptive(f, a, b, 1e-13, &err);
    res.value = v;
    res.change = err;
    res.nodes = 0;
    res.converged = err < tol;
    return res;
}

double gk_adaptive(const std::function<double(double)>& f, double a, double b, double rel_tol,
                   double* error_estimate) {
    double err = 0.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, rel_tol, &err);
    if (error_estimate) *error_estimate = err;
    return v;
}

} // namespace detflow
