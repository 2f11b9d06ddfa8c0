#ifndef DIVHJB_FITTING_HPP
#define DIVHJB_FITTING_HPP

#include <cmath>
#include <limits>

#include <Eigen/Core>

#include "divhjb/errors.hpp"

namespace divhjb {

/// c_hat(x) = a1 x + b1.
struct LinearFit {
    double a1 = 0.0;
    double b1 = 0.0;
    double sse = 0.0;

    double operator()(double x) const { return a1 * x + b1; }
};

/// v_hat(x) = a2 x^alpha + b2 with alpha held fixed.
struct PowerFit {
    double a2 = 0.0;
    double b2 = 0.0;
    double alpha = 1.0;
    double sse = 0.0;

    double operator()(double x) const { return a2 * std::pow(x, alpha) + b2; }
};

namespace detail {

struct AffineCoefficients {
    double slope;
    double intercept;
    double sse;
};

// Least squares for y ~ slope * basis + intercept via the centred normal
// equations.
template <typename BasisDerived, typename YDerived>
AffineCoefficients fit_affine(const Eigen::MatrixBase<BasisDerived>& basis, const Eigen::MatrixBase<YDerived>& ys) {
    const Eigen::Index n = basis.size();
    if (n != ys.size())
        throw DomainError("fit inputs differ in length");
    if (n < 2)
        throw DegenerateDesignError("least squares needs at least two samples");
    if (!basis.allFinite() || !ys.allFinite())
        throw NumericError("non-finite fit input");

    const double basis_mean = basis.mean();
    const double y_mean = ys.mean();
    const Eigen::VectorXd centred = basis.array() - basis_mean;
    const double sxx = centred.squaredNorm();
    const double scale = basis.cwiseAbs().maxCoeff();
    const double floor = static_cast<double>(n) * std::pow(64.0 * std::numeric_limits<double>::epsilon() * scale, 2);
    if (!(sxx > floor))
        throw DegenerateDesignError("least squares design is degenerate (all basis values equal)");

    const double slope = centred.dot((ys.array() - y_mean).matrix()) / sxx;
    const double intercept = y_mean - slope * basis_mean;
    const double sse = ((ys.array() - slope * basis.array() - intercept).square()).sum();
    return {slope, intercept, sse};
}

} // namespace detail

template <typename XDerived, typename YDerived>
LinearFit fit_linear(const Eigen::MatrixBase<XDerived>& xs, const Eigen::MatrixBase<YDerived>& ys) {
    const auto coef = detail::fit_affine(xs, ys);
    return {coef.slope, coef.intercept, coef.sse};
}

template <typename XDerived, typename YDerived>
PowerFit fit_power(const Eigen::MatrixBase<XDerived>& xs, const Eigen::MatrixBase<YDerived>& ys, double alpha) {
    if ((xs.array() < 0.0).any())
        throw DomainError("power fit requires non-negative abscissae");
    const Eigen::VectorXd basis = xs.array().pow(alpha);
    const auto coef = detail::fit_affine(basis, ys);
    return {coef.slope, coef.intercept, alpha, coef.sse};
}

} // namespace divhjb

#endif // DIVHJB_FITTING_HPP
