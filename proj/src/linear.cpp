#include "detflow/linear.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace detflow {

const char* to_string(FixedPointKind k) {
    switch (k) {
    case FixedPointKind::Saddle: return "saddle";
    case FixedPointKind::CenterLike: return "center-like";
    case FixedPointKind::Sink: return "sink";
    case FixedPointKind::Source: return "source";
    case FixedPointKind::Nonhyperbolic: return "nonhyperbolic";
    }
    return "?";
}

std::vector<State3> stationary_points(const Coefficients& c) {
    std::vector<double> xs = {-1.0, 1.0};
    const double r = -(4.0 * c.beta + 1.0) / 3.0;
    if (r > 0.0 && std::abs(r - 1.0) > 1e-15) {
        xs.push_back(-std::sqrt(r));
        xs.push_back(std::sqrt(r));
    }
    std::sort(xs.begin(), xs.end());
    std::vector<State3> out;
    for (const double x : xs) out.push_back({x, 0.0, 0.0});
    return out;
}

Mat3 jacobian_at(const Coefficients& c, const State3& p) {
    const double b = c.beta;
    const double k = 1.0 / (1.0 + b);
    const double x = p.x, y = p.y, z = p.z;
    const double dx = -4.0 * z + 12.0 * k * x * y + 24.0 * k * x * x * x + 8.0 * (2.0 * b - 1.0) * k * x;
    const double dy = 6.0 * k * x * x + 4.0 * y + 2.0 * (2.0 * b - 1.0) * k;
    const double dz = -4.0 * x;
    return {{{0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}, {dx, dy, dz}}};
}

namespace {

std::array<double, 3> mat_vec(const Mat3& m, const std::array<double, 3>& v) {
    std::array<double, 3> out{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) out[i] += m[i][j] * v[j];
    return out;
}

std::array<double, 3> cross(const std::array<double, 3>& a, const std::array<double, 3>& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double norm(const std::array<double, 3>& a) { return std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]); }

} // namespace

Eigen3 eigen3(const Mat3& m) {
    Eigen3 e;
    // characteristic polynomial det(lambda I - M) = lambda^3 + c2 lambda^2 + c1 lambda + c0
    const double tr = m[0][0] + m[1][1] + m[2][2];
    const double minors = m[0][0] * m[1][1] - m[0][1] * m[1][0] + m[0][0] * m[2][2] - m[0][2] * m[2][0] +
                          m[1][1] * m[2][2] - m[1][2] * m[2][1];
    const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                       m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                       m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    const double c2 = -tr, c1 = minors, c0 = -det;
    e.charpoly = {c2, c1, c0};

    // depressed cubic lambda = s - c2/3
    const double shift = -c2 / 3.0;
    const double P = c1 - c2 * c2 / 3.0;
    const double Q = 2.0 * c2 * c2 * c2 / 27.0 - c2 * c1 / 3.0 + c0;
    const double disc = -(4.0 * P * P * P + 27.0 * Q * Q);
    const double scale = 4.0 * std::abs(P * P * P) + 27.0 * Q * Q;
    std::vector<double> real_roots;
    if (scale == 0.0) {
        real_roots = {shift, shift, shift};
    } else if (disc >= -1e-14 * scale) {
        if (P >= 0.0) {
            real_roots = {shift, shift, shift};
        } else {
            const double r = 2.0 * std::sqrt(-P / 3.0);
            const double phi = std::acos(std::clamp(1.5 * Q / P * std::sqrt(-3.0 / P), -1.0, 1.0)) / 3.0;
            for (int k = 0; k < 3; ++k) real_roots.push_back(shift + r * std::cos(phi - 2.0 * std::numbers::pi * k / 3.0));
        }
    }

    auto poly = [&](std::complex<double> l) { return ((l + c2) * l + c1) * l + c0; };
    auto dpoly = [&](std::complex<double> l) { return (3.0 * l + 2.0 * c2) * l + c1; };
    auto polish = [&](std::complex<double> l) {
        for (int it = 0; it < 3; ++it) {
            const auto d = dpoly(l);
            if (std::abs(d) < 1e-300) break;
            const auto next = l - poly(l) / d;
            if (std::abs(poly(next)) >= std::abs(poly(l))) break;
            l = next;
        }
        return l;
    };

    if (!real_roots.empty()) {
        std::sort(real_roots.begin(), real_roots.end(), std::greater<>());
        for (int i = 0; i < 3; ++i) e.values[i] = polish({real_roots[i], 0.0});
    } else {
        const double s = std::sqrt(-disc / 108.0);
        const double r = std::cbrt(-Q / 2.0 + s) + std::cbrt(-Q / 2.0 - s);
        const double lr = polish({shift + r, 0.0}).real();
        // deflate: lambda^2 + (c2 + lr) lambda + (c1 + lr (c2 + lr))
        const double bq = c2 + lr;
        const double cq = c1 + lr * bq;
        const double re = -bq / 2.0;
        const double im = std::sqrt(std::max(0.0, cq - re * re));
        e.values = {std::complex<double>(lr, 0.0), polish({re, im}), polish({re, -im})};
    }

    for (int i = 0; i < 3; ++i) {
        e.max_charpoly_residual = std::max(e.max_charpoly_residual, std::abs(poly(e.values[i])));
        if (std::abs(e.values[i].imag()) > 0.0) continue;
        const double l = e.values[i].real();
        Mat3 a = m;
        for (int k = 0; k < 3; ++k) a[k][k] -= l;
        // null vector from the largest cross product of two rows
        std::array<double, 3> best{};
        double bn = -1.0;
        for (int r1 = 0; r1 < 3; ++r1)
            for (int r2 = r1 + 1; r2 < 3; ++r2) {
                const auto v = cross(a[r1], a[r2]);
                const double n = norm(v);
                if (n > bn) {
                    bn = n;
                    best = v;
                }
            }
        if (bn <= 0.0) continue;
        for (auto& x : best) x /= bn;
        if (best[0] < 0.0 || (best[0] == 0.0 && best[1] < 0.0))
            for (auto& x : best) x = -x;
        e.vectors[i] = best;
        const auto Av = mat_vec(m, best);
        double res = 0.0;
        for (int k = 0; k < 3; ++k) res = std::max(res, std::abs(Av[k] - l * best[k]));
        e.max_vector_residual = std::max(e.max_vector_residual, res);
    }
    return e;
}

SpectralReport spectral_report(const Coefficients& c, const State3& p) {
    SpectralReport r;
    r.point = p;
    r.jacobian = jacobian_at(c, p);
    r.eig = eigen3(r.jacobian);
    int pos = 0, neg = 0, zero = 0;
    bool complex_center = false;
    for (const auto& l : r.eig.values) {
        if (std::abs(l.real()) < 1e-10) {
            ++zero;
            if (std::abs(l.imag()) > 0.0) complex_center = true;
        } else if (l.real() > 0.0) {
            ++pos;
        } else {
            ++neg;
        }
    }
    if (complex_center && zero == 2)
        r.kind = FixedPointKind::CenterLike;
    else if (zero > 0)
        r.kind = FixedPointKind::Nonhyperbolic;
    else if (pos > 0 && neg > 0)
        r.kind = FixedPointKind::Saddle;
    else if (pos == 3)
        r.kind = FixedPointKind::Source;
    else
        r.kind = FixedPointKind::Sink;
    return r;
}

std::array<double, 4> linearized_rhs(const Coefficients& c, double t, const std::array<double, 4>& phi) {
    const double b = c.beta;
    const double th = std::tanh(t);
    const double sech2 = 1.0 - th * th;
    // (1+b) phi'''' + [(2-4b) - 6 tanh^2] phi'' - 12 sech^2 tanh phi' - 24 b sech^4 phi = 0
    const double d4 = -(((2.0 - 4.0 * b) - 6.0 * th * th) * phi[2] - 12.0 * sech2 * th * phi[1] -
                        24.0 * b * sech2 * sech2 * phi[0]) /
                      (1.0 + b);
    return {phi[1], phi[2], phi[3], d4};
}

std::array<double, 4> linearized_initial(const Coefficients& c) {
    // linearizing the initial constraint at u''(0) = -1, u(0) = 0 with phi''(0) = 1
    return {(1.0 + c.beta) / (6.0 * c.beta), 0.0, 1.0, 0.0};
}

PhiResult linearized_phi(const Coefficients& c, double T, double window_lo, double rel_tol, double abs_tol,
                         double flatness_tol) {
    PhiResult r;
    r.window_lo = window_lo;
    r.window_hi = T;
    IntegratorConfig<4> cfg;
    cfg.t_max = T;
    cfg.rel_tol = rel_tol;
    cfg.abs_tol = abs_tol;
    cfg.max_step = 0.05;
    cfg.blowup_norm = 1e300;
    auto rhs = [&](double t, const Vec<4>& s) { return linearized_rhs(c, t, s); };
    r.trajectory = integrate<4>(rhs, linearized_initial(c), cfg);
    const auto& tr = r.trajectory;
    if (tr.termination.kind != TerminationKind::ReachedTmax)
        throw Error(ErrorCode::PlateauNotFound, "phi integration stopped early");

    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t i = 0; i < tr.size(); ++i) {
        if (tr.times[i] < window_lo) continue;
        const double a = tr.states[i][0] * std::exp(-2.0 * tr.times[i]);
        lo = std::min(lo, a);
        hi = std::max(hi, a);
    }
    const auto& last = tr.back();
    r.A = last[0] * std::exp(-2.0 * T);
    r.flatness = (hi - lo) / std::abs(r.A);
    r.ratios = {last[1] / last[0], last[2] / last[0], last[3] / last[0]};
    if (!(r.A > 0.0) || !(r.flatness < flatness_tol))
        throw Error(ErrorCode::PlateauNotFound, "phi e^{-2t} is not flat on the window");
    return r;
}

} // namespace detflow
