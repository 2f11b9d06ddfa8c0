#ifndef DIVHJB_ASYMPTOTICS_HPP
#define DIVHJB_ASYMPTOTICS_HPP

#include <algorithm>
#include <array>
#include <cmath>

#include "divhjb/errors.hpp"
#include "divhjb/model.hpp"

namespace divhjb {

template <typename Scalar>
struct AsymptoticTriple {
    Scalar v{};
    Scalar vx{};
    Scalar c{};
};

/// Large-surplus behaviour under power utility:
///   v ~ ((1-alpha)/beta)^{1-alpha} x^alpha / alpha,  c* ~ beta x / (1-alpha).
/// Stated for rational alpha; the closed form is used for any alpha in (0, 1).
template <typename Scalar>
AsymptoticTriple<Scalar> power_asymptote(const BasicModelParams<Scalar>& params, Scalar alpha, Scalar x) {
    using std::pow;
    if (!(x > Scalar(0)))
        throw DomainError("asymptote requires x > 0");
    if (!(alpha > Scalar(0) && alpha < Scalar(1)))
        throw DomainError("power exponent must lie in (0, 1)");
    const Scalar scale = pow((Scalar(1) - alpha) / params.beta, Scalar(1) - alpha);
    return {scale * pow(x, alpha) / alpha, scale * pow(x, alpha - Scalar(1)),
            params.beta * x / (Scalar(1) - alpha)};
}

/// Large-surplus behaviour under U(c) = ln(c + 1):
///   v ~ (ln(beta (x+1)) - 1) / beta,  v_x ~ 1/(beta (x+1)),  c* ~ beta x + beta - 1.
/// c is not clamped here so that c = 1/v_x - 1 holds identically.
template <typename Scalar>
AsymptoticTriple<Scalar> log_asymptote(const BasicModelParams<Scalar>& params, Scalar x) {
    using std::log;
    if (!(x > Scalar(0)))
        throw DomainError("asymptote requires x > 0");
    const Scalar beta = params.beta;
    return {(log(beta * (x + Scalar(1))) - Scalar(1)) / beta, Scalar(1) / (beta * (x + Scalar(1))),
            beta * x + beta - Scalar(1)};
}

template <typename Scalar>
AsymptoticTriple<Scalar> asymptote(const BasicModelParams<Scalar>& params, const BasicUtility<Scalar>& utility,
                                   Scalar x) {
    return utility.is_power() ? power_asymptote(params, utility.alpha(), x) : log_asymptote(params, x);
}

/// Individual terms of the first-order (Riccati-substituted) equation in
/// y(v) = v_x. Power:
///   mu y_v y, (xi mu - beta - lambda) y, -xi beta v,
///   xi (1-alpha)/alpha y^{-alpha/(1-alpha)}, -y^{-alpha/(1-alpha)} y_v
/// Log:
///   (xi mu + xi - beta - lambda) y, -xi ln y, -xi beta v, -xi,
///   (mu + 1) y y_v, -y_v
template <typename Scalar>
std::array<Scalar, 6> riccati_terms(const BasicModelParams<Scalar>& params, const BasicUtility<Scalar>& utility,
                                    Scalar v, Scalar y, Scalar y_v) {
    using std::log;
    using std::pow;
    if (!(y > Scalar(0)))
        throw DomainError("Riccati form requires y > 0");
    const Scalar mu = params.mu, xi = params.xi, beta = params.beta, lambda = params.lambda;
    if (utility.is_power()) {
        const Scalar alpha = utility.alpha();
        const Scalar y_pow = pow(y, -alpha / (Scalar(1) - alpha));
        return {mu * y_v * y, (xi * mu - beta - lambda) * y, -xi * beta * v,
                xi * (Scalar(1) - alpha) / alpha * y_pow, -y_pow * y_v, Scalar(0)};
    }
    return {(xi * mu + xi - beta - lambda) * y, -xi * log(y), -xi * beta * v, -xi, (mu + Scalar(1)) * y * y_v, -y_v};
}

template <typename Scalar>
Scalar riccati_residual(const BasicModelParams<Scalar>& params, const BasicUtility<Scalar>& utility, Scalar v,
                        Scalar y, Scalar y_v) {
    const auto terms = riccati_terms(params, utility, v, y, y_v);
    Scalar sum(0);
    for (const auto& t : terms)
        sum += t;
    return sum;
}

/// Residual divided by its largest term in absolute value.
template <typename Scalar>
Scalar normalized_riccati_residual(const BasicModelParams<Scalar>& params, const BasicUtility<Scalar>& utility,
                                   Scalar v, Scalar y, Scalar y_v) {
    using std::abs;
    const auto terms = riccati_terms(params, utility, v, y, y_v);
    Scalar sum(0);
    Scalar largest(0);
    for (const auto& t : terms) {
        sum += t;
        if (abs(t) > largest)
            largest = abs(t);
    }
    return largest > Scalar(0) ? abs(sum) / largest : Scalar(0);
}

/// y(v) and dy/dv of the large-v asymptote in Riccati variables.
template <typename Scalar>
struct RiccatiPoint {
    Scalar y{};
    Scalar y_v{};
};

template <typename Scalar>
RiccatiPoint<Scalar> riccati_asymptote(const BasicModelParams<Scalar>& params, const BasicUtility<Scalar>& utility,
                                       Scalar v) {
    using std::exp;
    using std::pow;
    if (!(v > Scalar(0)))
        throw DomainError("Riccati asymptote requires v > 0");
    if (utility.is_power()) {
        const Scalar alpha = utility.alpha();
        const Scalar expo = (Scalar(1) - alpha) / alpha;
        const Scalar scale = pow((Scalar(1) - alpha) / (alpha * params.beta), expo);
        const Scalar y = scale * pow(v, -expo);
        return {y, -expo * y / v};
    }
    const Scalar y = exp(-params.beta * v - Scalar(1));
    return {y, -params.beta * y};
}

} // namespace divhjb

#endif // DIVHJB_ASYMPTOTICS_HPP
