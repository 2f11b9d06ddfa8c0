// Test-only reference routes, deliberately independent of the library's
// integrator, quadrature and closed-form OLS.
#ifndef DIVHJB_TESTS_ORACLES_HPP
#define DIVHJB_TESTS_ORACLES_HPP

#include <cmath>
#include <utility>

#include <Eigen/Dense>

namespace oracle {

struct PowerModel {
    long double mu = 0.26L, lambda = 0.1L, xi = 0.4L, beta = 0.05L, alpha = 0.5L;
};

inline PowerModel table_model() { return {}; }

// Power-utility ODE written out from scratch in long double.
inline long double vxx(const PowerModel& m, long double v, long double vx) {
    const long double c = std::pow(vx, -1.0L / (1.0L - m.alpha));
    const long double num = m.xi * m.beta * v - (m.xi * m.mu - m.beta - m.lambda) * vx -
                            m.xi * (1.0L - m.alpha) / m.alpha * std::pow(vx, -m.alpha / (1.0L - m.alpha));
    return num / (m.mu - c);
}

inline long double v0(const PowerModel& m, long double b) {
    const long double r = m.beta + m.lambda;
    return m.mu * b / r + (1.0L - m.alpha) / (m.alpha * r) * std::pow(b, -m.alpha / (1.0L - m.alpha));
}

// Fixed-step classical RK4 in long double from x = 0 to x_end.
inline std::pair<long double, long double> rk4_solve(const PowerModel& m, long double b, long double x_end,
                                                     long double h = 1e-4L) {
    long double v = v0(m, b), vx = b;
    const auto steps = static_cast<long>(std::llround(x_end / h));
    for (long i = 0; i < steps; ++i) {
        const long double k1v = vx, k1w = vxx(m, v, vx);
        const long double k2v = vx + h / 2 * k1w, k2w = vxx(m, v + h / 2 * k1v, vx + h / 2 * k1w);
        const long double k3v = vx + h / 2 * k2w, k3w = vxx(m, v + h / 2 * k2v, vx + h / 2 * k2w);
        const long double k4v = vx + h * k3w, k4w = vxx(m, v + h * k3v, vx + h * k3w);
        v += h / 6 * (k1v + 2 * k2v + 2 * k3v + k4v);
        vx += h / 6 * (k1w + 2 * k2w + 2 * k3w + k4w);
    }
    return {v, vx};
}

// Least squares through the full design matrix and a QR solve.
inline Eigen::Vector2d ols(const Eigen::VectorXd& basis, const Eigen::VectorXd& y) {
    Eigen::MatrixXd design(basis.size(), 2);
    design.col(0) = basis;
    design.col(1).setOnes();
    return design.colPivHouseholderQr().solve(y);
}

// Composite Simpson on [a, b] with n (even) panels.
template <typename F>
double simpson(F&& f, double a, double b, int n) {
    const double h = (b - a) / n;
    double sum = f(a) + f(b);
    for (int i = 1; i < n; ++i)
        sum += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return sum * h / 3.0;
}

} // namespace oracle

#endif // DIVHJB_TESTS_ORACLES_HPP
