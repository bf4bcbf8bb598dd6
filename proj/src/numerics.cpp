#include "sheath/numerics.hpp"

#include "sheath/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace sheath::numerics {

std::vector<double> solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                                      std::span<const double> upper, std::span<const double> rhs) {
    const std::size_t n = diag.size();
    if (lower.size() != n || upper.size() != n || rhs.size() != n) {
        throw std::invalid_argument("tridiagonal: size mismatch");
    }
    std::vector<double> c(n), d(n);
    double pivot = diag[0];
    if (pivot == 0.0) throw SolverError("tridiagonal: zero pivot");
    c[0] = upper[0] / pivot;
    d[0] = rhs[0] / pivot;
    for (std::size_t i = 1; i < n; ++i) {
        pivot = diag[i] - lower[i] * c[i - 1];
        if (pivot == 0.0 || !std::isfinite(pivot)) throw SolverError("tridiagonal: zero pivot");
        c[i] = upper[i] / pivot;
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / pivot;
    }
    std::vector<double> x(n);
    x[n - 1] = d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
    return x;
}

double expm1_minus_x(double x) {
    if (std::abs(x) > 0.1) return std::expm1(x) - x;
    // Taylor series x^2/2! + x^3/3! + ..., converged to round-off for |x| <= 0.1
    double term = 0.5 * x * x;
    double sum = term;
    for (int k = 3; k < 20; ++k) {
        term *= x / k;
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

namespace {

// Dormand-Prince 5(4) tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace

double integrate_dopri5(const std::function<double(double, double)>& f, double z0, double z1, double y0,
                        double atol, double rtol, double& h, OdeStats* stats) {
    const double span = z1 - z0;
    if (span == 0.0) return y0;
    const double dir = span > 0 ? 1.0 : -1.0;
    if (!(h > 0.0)) h = std::abs(span);
    h = std::min(h, std::abs(span));
    double z = z0;
    double y = y0;
    double k1 = f(z, y);
    int guard = 0;
    while (dir * (z1 - z) > 0.0) {
        if (++guard > 1000000) throw SolverError("dopri5: step count exceeded");
        const double remaining = std::abs(z1 - z);
        bool last = false;
        double hs = h;
        if (hs >= remaining * (1.0 - 1e-12)) {
            hs = remaining;
            last = true;
        }
        const double s = dir * hs;
        const double k2 = f(z + c2 * s, y + s * a21 * k1);
        const double k3 = f(z + c3 * s, y + s * (a31 * k1 + a32 * k2));
        const double k4 = f(z + c4 * s, y + s * (a41 * k1 + a42 * k2 + a43 * k3));
        const double k5 = f(z + c5 * s, y + s * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const double k6 = f(z + s, y + s * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        const double y_new = y + s * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const double k7 = f(z + s, y_new);
        const double err = std::abs(s * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7));
        const double scale = atol + rtol * std::max(std::abs(y), std::abs(y_new));
        const double ratio = err / scale;
        if (ratio <= 1.0) {
            z = last ? z1 : z + s;
            y = y_new;
            k1 = k7;
            if (stats) ++stats->accepted;
            const double grow = ratio == 0.0 ? 5.0 : std::min(5.0, 0.9 * std::pow(ratio, -0.2));
            // keep the suggestion from a truncated final step meaningful
            h = last ? std::max(h, hs * grow) : hs * grow;
        } else {
            if (stats) ++stats->rejected;
            h = hs * std::max(0.1, 0.9 * std::pow(ratio, -0.2));
            if (h < 1e-14 * std::max(1.0, std::abs(z))) throw SolverError("dopri5: step size underflow");
        }
    }
    return y;
}

namespace {

std::size_t bracket(std::span<const double> xs, double x) {
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    std::size_t i = static_cast<std::size_t>(it - xs.begin());
    if (i == 0) return 0;
    return std::min(i - 1, xs.size() - 2);
}

}  // namespace

double hermite(std::span<const double> xs, std::span<const double> ys, std::span<const double> dys, double x) {
    x = std::clamp(x, xs.front(), xs.back());
    const std::size_t i = bracket(xs, x);
    const double h = xs[i + 1] - xs[i];
    const double t = (x - xs[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1;
    const double h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2;
    const double h11 = t3 - t2;
    return h00 * ys[i] + h10 * h * dys[i] + h01 * ys[i + 1] + h11 * h * dys[i + 1];
}

double linear(std::span<const double> xs, std::span<const double> ys, double x) {
    x = std::clamp(x, xs.front(), xs.back());
    const std::size_t i = bracket(xs, x);
    const double t = (x - xs[i]) / (xs[i + 1] - xs[i]);
    return (1 - t) * ys[i] + t * ys[i + 1];
}

double parabola(double x0, double y0, double x1, double y1, double x2, double y2, double x) {
    const double l0 = (x - x1) * (x - x2) / ((x0 - x1) * (x0 - x2));
    const double l1 = (x - x0) * (x - x2) / ((x1 - x0) * (x1 - x2));
    const double l2 = (x - x0) * (x - x1) / ((x2 - x0) * (x2 - x1));
    return l0 * y0 + l1 * y1 + l2 * y2;
}

std::vector<double> derivative(std::span<const double> xs, std::span<const double> ys) {
    const std::size_t n = xs.size();
    if (n < 3 || ys.size() != n) throw std::invalid_argument("derivative: need >= 3 matching points");
    std::vector<double> d(n);
    auto three_point = [&](std::size_t a, std::size_t b, std::size_t c, double x) {
        // derivative at x of the parabola through (a, b, c)
        const double xa = xs[a], xb = xs[b], xc = xs[c];
        return ys[a] * ((x - xb) + (x - xc)) / ((xa - xb) * (xa - xc)) +
               ys[b] * ((x - xa) + (x - xc)) / ((xb - xa) * (xb - xc)) +
               ys[c] * ((x - xa) + (x - xb)) / ((xc - xa) * (xc - xb));
    };
    d[0] = three_point(0, 1, 2, xs[0]);
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = three_point(i - 1, i, i + 1, xs[i]);
    d[n - 1] = three_point(n - 3, n - 2, n - 1, xs[n - 1]);
    return d;
}

std::vector<double> cumulative_trapezoid(std::span<const double> xs, std::span<const double> ys) {
    std::vector<double> out(xs.size(), 0.0);
    for (std::size_t i = 1; i < xs.size(); ++i) {
        out[i] = out[i - 1] + 0.5 * (xs[i] - xs[i - 1]) * (ys[i] + ys[i - 1]);
    }
    return out;
}

}  // namespace sheath::numerics
