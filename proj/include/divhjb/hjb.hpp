#ifndef DIVHJB_HJB_HPP
#define DIVHJB_HJB_HPP

#include <cmath>
#include <optional>
#include <string>

#include <Eigen/Core>

#include "divhjb/errors.hpp"
#include "divhjb/model.hpp"

namespace divhjb {

namespace detail {

template <typename Scalar>
void require_exponential_claims(const BasicModelParams<Scalar>& params) {
    if (params.k != 1)
        throw NotSupportedError("the value-function ODE is implemented for exponential claims (k = 1) only");
}

} // namespace detail

/// v(0) implied by the integral form of the HJB equation at x = 0 for a
/// given initial slope b = v_x(0):
///   (beta + lambda) v(0) = mu b - c* b + U(c*),  c* = (U')^{-1}(b).
template <typename Scalar>
Scalar boundary_v0(const BasicModelParams<Scalar>& params, const BasicUtility<Scalar>& utility, Scalar b) {
    using std::log;
    using std::pow;
    if (!(b > Scalar(0)))
        throw DomainError("initial slope b must be positive");
    detail::require_exponential_claims(params);
    const Scalar rate = params.beta + params.lambda;
    if (utility.is_power()) {
        const Scalar alpha = utility.alpha();
        return params.mu * b / rate +
               (Scalar(1) - alpha) / (alpha * rate) * pow(b, -alpha / (Scalar(1) - alpha));
    }
    if (b > Scalar(1))
        return params.mu * b / rate;
    return (params.mu * b - (Scalar(1) - b) - log(b)) / rate;
}

/// Denominator of the explicit v_xx form, i.e. the coefficient of v_xx:
/// mu - c*(v_x) for power utility, mu + 1 - 1/v_x (or mu once c* = 0) for log.
template <typename Scalar>
Scalar rhs_denominator(const BasicModelParams<Scalar>& params, const BasicUtility<Scalar>& utility, Scalar vx) {
    using std::pow;
    if (utility.is_power())
        return params.mu - pow(vx, Scalar(-1) / (Scalar(1) - utility.alpha()));
    if (vx >= Scalar(1))
        return params.mu;
    return params.mu + Scalar(1) - Scalar(1) / vx;
}

/// v_xx for power utility from
///   mu v'' + (xi mu - beta - lambda) v' - xi beta v
///     + xi (1-alpha)/alpha v'^{-alpha/(1-alpha)} - v'^{-1/(1-alpha)} v'' = 0.
template <typename Scalar>
Scalar ode_rhs_power(const BasicModelParams<Scalar>& params, Scalar alpha, Scalar v, Scalar vx,
                     Scalar singular_tol = Scalar(1e-8)) {
    using std::abs;
    using std::pow;
    detail::require_exponential_claims(params);
    if (!(vx > Scalar(0)))
        throw DomainError("v_x must be positive");
    const Scalar c = pow(vx, Scalar(-1) / (Scalar(1) - alpha));
    const Scalar denominator = params.mu - c;
    if (!(abs(denominator) >= singular_tol))
        throw SingularityError("optimal rate equals the premium rate; ODE is singular", double(vx));
    const Scalar numerator = params.xi * params.beta * v -
                             (params.xi * params.mu - params.beta - params.lambda) * vx -
                             params.xi * (Scalar(1) - alpha) / alpha * pow(vx, -alpha / (Scalar(1) - alpha));
    return numerator / denominator;
}

/// v_xx for U(c) = ln(c + 1). Where v_x >= 1 the control is clamped to
/// c* = 0 and the equation reduces to mu v'' + (xi mu - beta - lambda) v'
/// - xi beta v = 0; both forms agree at v_x = 1.
template <typename Scalar>
Scalar ode_rhs_log(const BasicModelParams<Scalar>& params, Scalar v, Scalar vx,
                   Scalar singular_tol = Scalar(1e-8)) {
    using std::abs;
    using std::log;
    detail::require_exponential_claims(params);
    if (!(vx > Scalar(0)))
        throw DomainError("v_x must be positive");
    const Scalar xi = params.xi;
    if (vx >= Scalar(1))
        return (xi * params.beta * v - (xi * params.mu - params.beta - params.lambda) * vx) / params.mu;
    const Scalar denominator = params.mu + Scalar(1) - Scalar(1) / vx;
    if (!(abs(denominator) >= singular_tol))
        throw SingularityError("log-utility ODE is singular at v_x = 1/(mu + 1)", double(vx));
    const Scalar numerator = xi * params.beta * v + xi * log(vx) + xi -
                             (xi * params.mu + xi - params.beta - params.lambda) * vx;
    return numerator / denominator;
}

template <typename Scalar>
Scalar ode_rhs(const BasicModelParams<Scalar>& params, const BasicUtility<Scalar>& utility, Scalar v, Scalar vx,
               Scalar singular_tol = Scalar(1e-8)) {
    return utility.is_power() ? ode_rhs_power(params, utility.alpha(), v, vx, singular_tol)
                              : ode_rhs_log(params, v, vx, singular_tol);
}

struct GridMeta {
    ModelParams params;
    Utility utility = Utility::logarithmic();
    double b = 0.0;
};

enum class HaltReason { None, DerivativeFloor, Singularity, BlowUp, StepUnderflow };

std::string to_string(HaltReason reason);

/// Value function sampled on a uniform surplus grid starting at 0.
struct SolutionGrid {
    Eigen::VectorXd xs;
    Eigen::VectorXd v;
    Eigen::VectorXd vx;
    Eigen::VectorXd vxx;
    Eigen::VectorXd c;  ///< c[i] = inverse_marginal(utility, vx[i])
    GridMeta meta;
    HaltReason halt = HaltReason::None;
    double x_reached = 0.0;  ///< furthest surplus level the integrator got to

    Eigen::Index size() const { return xs.size(); }
    bool halted() const { return halt != HaltReason::None; }
    double x_last() const { return xs[xs.size() - 1]; }

    /// Cubic Hermite interpolation of v (resp. v_x) between grid nodes.
    double v_at(double x) const;
    double vx_at(double x) const;
    /// Linear interpolation of the stored optimal rate.
    double c_at(double x) const;
};

struct IntegrateOptions {
    double atol = 1e-9;
    double rtol = 1e-9;
    double output_step = 0.01;
    double singular_tol = 1e-8;
    double vx_floor = 1e-10;
    double blowup_cap = 1e12;
};

/// Integrates the value-function ODE from x = 0 with v(0) = boundary_v0(b)
/// and v_x(0) = b. Degenerate branches stop early with grid.halt set.
SolutionGrid integrate(const ModelParams& params, const Utility& utility, double b, double x_max,
                       const IntegrateOptions& options = {});

/// Left-hand side of the integral form of the HJB equation at surplus x:
///   mu v' - c* v' - (beta + lambda) v + U(c*) + lambda xi e^{-xi x} int_0^x v(z) e^{xi z} dz.
double hjb_residual(const SolutionGrid& grid, double x);

/// hjb_residual at every grid node, computed with one cumulative pass.
Eigen::VectorXd hjb_residuals(const SolutionGrid& grid);

enum class SolutionKind { Concave, Divergent, Indeterminate };

std::string to_string(SolutionKind kind);

struct SolutionClass {
    SolutionKind kind = SolutionKind::Indeterminate;
    double tail_start_x = 0.0;
    double vx_tail_change = 0.0;  ///< vx(last) - vx(tail start)
    double max_vxx_tail = 0.0;
};

/// Looks at the last 20% of the grid: Divergent if v_x strictly increases
/// there (the "bubble" branch), Concave if v_x strictly decreases with
/// v_xx < 0 throughout, Indeterminate otherwise or when fewer than 10
/// samples are available.
SolutionClass classify_solution(const SolutionGrid& grid);

/// Two-sided bound x + U(mu)/(lambda+beta) <= v(x) <= x + U(mu)/beta. It is
/// only expected to hold near x = 0; away from zero it is a diagnostic.
struct ValueBoundReport {
    double lower_at_zero = 0.0;
    double upper_at_zero = 0.0;
    bool holds_at_zero = false;
    std::optional<double> first_violation_x;
};

ValueBoundReport check_value_bounds(const SolutionGrid& grid);

} // namespace divhjb

#endif // DIVHJB_HJB_HPP
