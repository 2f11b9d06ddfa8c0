#ifndef DIVHJB_MODEL_HPP
#define DIVHJB_MODEL_HPP

#include <cmath>
#include <string>
#include <vector>

#include "divhjb/errors.hpp"

namespace divhjb {

/// Constants of the Cramer-Lundberg surplus process with Erlang(k, xi)
/// claims and the discount rate of the dividend stream.
template <typename Scalar>
struct BasicModelParams {
    Scalar mu{};      ///< premium rate
    Scalar lambda{};  ///< claim arrival intensity
    Scalar xi{};      ///< Erlang rate
    int k = 1;        ///< Erlang shape
    Scalar beta{};    ///< discount rate

    Scalar mean_claim() const { return Scalar(k) / xi; }

    template <typename Other>
    BasicModelParams<Other> cast() const {
        return {Other(mu), Other(lambda), Other(xi), k, Other(beta)};
    }
};

using ModelParams = BasicModelParams<double>;

enum class UtilityKind { Power, Logarithmic };

/// U(c) = c^alpha / alpha with 0 < alpha < 1, or U(c) = ln(c + 1).
template <typename Scalar>
class BasicUtility {
public:
    static BasicUtility power(Scalar alpha) {
        if (!(alpha > Scalar(0) && alpha < Scalar(1)))
            throw ValidationError("power utility exponent must lie in (0, 1)");
        return BasicUtility(UtilityKind::Power, alpha);
    }
    static BasicUtility logarithmic() { return BasicUtility(UtilityKind::Logarithmic, Scalar(0)); }

    UtilityKind kind() const { return kind_; }
    bool is_power() const { return kind_ == UtilityKind::Power; }
    /// Exponent of the power variant; zero for the logarithmic one.
    Scalar alpha() const { return alpha_; }

    template <typename Other>
    BasicUtility<Other> cast() const {
        return is_power() ? BasicUtility<Other>::power(Other(alpha_)) : BasicUtility<Other>::logarithmic();
    }

    friend bool operator==(const BasicUtility&, const BasicUtility&) = default;

private:
    BasicUtility(UtilityKind kind, Scalar alpha) : kind_(kind), alpha_(alpha) {}

    UtilityKind kind_;
    Scalar alpha_;
};

using Utility = BasicUtility<double>;

template <typename Scalar>
Scalar utility_eval(const BasicUtility<Scalar>& u, Scalar c) {
    using std::log1p;
    using std::pow;
    using std::sqrt;
    if (!(c >= Scalar(0)))
        throw DomainError("utility is defined for non-negative consumption only");
    if (u.is_power())
        return u.alpha() == Scalar(0.5) ? Scalar(2) * sqrt(c) : pow(c, u.alpha()) / u.alpha();
    return log1p(c);
}

/// U'(c). Infinite at c = 0 for the power variant.
template <typename Scalar>
Scalar utility_marginal(const BasicUtility<Scalar>& u, Scalar c) {
    using std::pow;
    if (!(c >= Scalar(0)))
        throw DomainError("marginal utility is defined for non-negative consumption only");
    if (u.is_power())
        return pow(c, u.alpha() - Scalar(1));
    return Scalar(1) / (c + Scalar(1));
}

/// Optimal dividend rate c* = (U')^{-1}(p). The logarithmic variant is
/// clamped at zero, since U'(0) = 1 is finite and p > 1 would otherwise
/// yield a negative rate.
template <typename Scalar>
Scalar inverse_marginal(const BasicUtility<Scalar>& u, Scalar p) {
    using std::pow;
    if (!(p > Scalar(0)))
        throw DomainError("inverse marginal utility requires a positive marginal value");
    if (u.is_power())
        return pow(p, Scalar(-1) / (Scalar(1) - u.alpha()));
    const Scalar c = Scalar(1) / p - Scalar(1);
    return c > Scalar(0) ? c : Scalar(0);
}

/// Throws ValidationError on non-positive fields, returns non-fatal warnings
/// (currently only the net-profit condition mu > lambda * k / xi).
std::vector<std::string> validate_params(const ModelParams& params);

} // namespace divhjb

#endif // DIVHJB_MODEL_HPP
