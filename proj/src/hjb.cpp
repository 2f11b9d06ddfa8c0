#include "divhjb/hjb.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "divhjb/ode.hpp"
#include "divhjb/quadrature.hpp"

namespace divhjb {

std::string to_string(HaltReason reason) {
    switch (reason) {
    case HaltReason::None: return "none";
    case HaltReason::DerivativeFloor: return "derivative-floor";
    case HaltReason::Singularity: return "singularity";
    case HaltReason::BlowUp: return "blow-up";
    case HaltReason::StepUnderflow: return "step-underflow";
    }
    return "unknown";
}

std::string to_string(SolutionKind kind) {
    switch (kind) {
    case SolutionKind::Concave: return "concave";
    case SolutionKind::Divergent: return "divergent";
    case SolutionKind::Indeterminate: return "indeterminate";
    }
    return "unknown";
}

namespace {

// Index i such that xs[i] <= x <= xs[i + 1]; the grid is uniform except
// possibly for its last panel.
Eigen::Index locate(const Eigen::VectorXd& xs, double x) {
    const Eigen::Index n = xs.size();
    if (n < 2)
        return 0;
    const double h = xs[1] - xs[0];
    auto i = static_cast<Eigen::Index>(std::floor(x / h));
    i = std::clamp<Eigen::Index>(i, 0, n - 2);
    while (i > 0 && xs[i] > x)
        --i;
    while (i < n - 2 && xs[i + 1] < x)
        ++i;
    return i;
}

double hermite(double x0, double x1, double f0, double f1, double d0, double d1, double x) {
    const double h = x1 - x0;
    const double t = (x - x0) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * f0 + (t3 - 2 * t2 + t) * h * d0 + (-2 * t3 + 3 * t2) * f1 +
           (t3 - t2) * h * d1;
}

void require_in_range(const SolutionGrid& grid, double x) {
    if (grid.size() == 0)
        throw RangeError("empty solution grid");
    const double slack = 1e-12 * (1.0 + grid.x_last());
    if (!(x >= -slack && x <= grid.x_last() + slack))
        throw RangeError("surplus level outside the solution grid");
}

} // namespace

double SolutionGrid::v_at(double x) const {
    require_in_range(*this, x);
    if (size() == 1)
        return v[0];
    const Eigen::Index i = locate(xs, x);
    return hermite(xs[i], xs[i + 1], v[i], v[i + 1], vx[i], vx[i + 1], x);
}

double SolutionGrid::vx_at(double x) const {
    require_in_range(*this, x);
    if (size() == 1)
        return vx[0];
    const Eigen::Index i = locate(xs, x);
    return hermite(xs[i], xs[i + 1], vx[i], vx[i + 1], vxx[i], vxx[i + 1], x);
}

double SolutionGrid::c_at(double x) const {
    require_in_range(*this, x);
    if (size() == 1)
        return c[0];
    const Eigen::Index i = locate(xs, x);
    const double t = std::clamp((x - xs[i]) / (xs[i + 1] - xs[i]), 0.0, 1.0);
    return (1.0 - t) * c[i] + t * c[i + 1];
}

SolutionGrid integrate(const ModelParams& params, const Utility& utility, double b, double x_max,
                       const IntegrateOptions& options) {
    detail::require_exponential_claims(params);
    if (!(x_max >= 0.0))
        throw DomainError("x_max must be non-negative");
    if (!(options.output_step > 0.0))
        throw ValidationError("output step must be positive");

    const double v0 = boundary_v0(params, utility, b);
    const double den0 = rhs_denominator(params, utility, b);
    const double vxx0 = ode_rhs(params, utility, v0, b, options.singular_tol);  // throws at x = 0
    const bool den_positive = den0 > 0.0;

    std::vector<double> xs_out, v_out, vx_out, vxx_out;
    const auto n_uniform = static_cast<std::size_t>(std::floor(x_max / options.output_step + 1e-9));
    std::vector<double> targets;
    targets.reserve(n_uniform + 2);
    for (std::size_t i = 0; i <= n_uniform; ++i)
        targets.push_back(static_cast<double>(i) * options.output_step);
    if (x_max - targets.back() > 1e-9 * options.output_step)
        targets.push_back(x_max);

    xs_out.push_back(0.0);
    v_out.push_back(v0);
    vx_out.push_back(b);
    vxx_out.push_back(vxx0);

    using State = OdeState<double, 2>;
    HaltReason last_rejection = HaltReason::None;
    auto rhs = [&](double, const State& y) -> std::optional<State> {
        const double vx = y[1];
        if (!(vx > 0.0)) {
            last_rejection = HaltReason::DerivativeFloor;
            return std::nullopt;
        }
        const double den = rhs_denominator(params, utility, vx);
        if ((den > 0.0) != den_positive || std::abs(den) < options.singular_tol) {
            last_rejection = HaltReason::Singularity;
            return std::nullopt;
        }
        const double vxx = ode_rhs(params, utility, y[0], vx, 0.0);
        if (!std::isfinite(vxx) || !std::isfinite(y[0])) {
            last_rejection = HaltReason::BlowUp;
            return std::nullopt;
        }
        return State(vx, vxx);
    };

    HaltReason halt = HaltReason::None;
    double x_reached = 0.0;
    std::size_t next = 1;
    auto observer = [&](const DenseSegment<double, 2>& seg, const State& y1) {
        while (next < targets.size() && targets[next] <= seg.x1() + 1e-12) {
            const State y = seg(std::min(targets[next], seg.x1()));
            if (!(y[1] > options.vx_floor)) {
                halt = HaltReason::DerivativeFloor;
                return false;
            }
            xs_out.push_back(targets[next]);
            v_out.push_back(y[0]);
            vx_out.push_back(y[1]);
            vxx_out.push_back(ode_rhs(params, utility, y[0], y[1], 0.0));
            ++next;
        }
        x_reached = seg.x1();
        if (!(y1[1] > options.vx_floor)) {
            halt = HaltReason::DerivativeFloor;
            return false;
        }
        const double vxx = ode_rhs(params, utility, y1[0], y1[1], 0.0);
        if (std::abs(vxx) > options.blowup_cap || std::abs(y1[0]) > options.blowup_cap) {
            halt = HaltReason::BlowUp;
            return false;
        }
        return true;
    };

    OdeTolerances<double> tol;
    tol.atol = options.atol;
    tol.rtol = options.rtol;
    const OdeStatus status = dopri5<double, 2>(rhs, 0.0, State(v0, b), x_max, tol, observer);
    switch (status) {
    case OdeStatus::Completed:
    case OdeStatus::StoppedByObserver:
        break;
    case OdeStatus::StepUnderflow:
    case OdeStatus::MaxSteps:
        halt = last_rejection == HaltReason::None ? HaltReason::StepUnderflow : last_rejection;
        break;
    case OdeStatus::InadmissibleStart:
        throw SingularityError("ODE is singular at x = 0", b);
    }

    SolutionGrid grid;
    const auto n = static_cast<Eigen::Index>(xs_out.size());
    grid.xs = Eigen::Map<const Eigen::VectorXd>(xs_out.data(), n);
    grid.v = Eigen::Map<const Eigen::VectorXd>(v_out.data(), n);
    grid.vx = Eigen::Map<const Eigen::VectorXd>(vx_out.data(), n);
    grid.vxx = Eigen::Map<const Eigen::VectorXd>(vxx_out.data(), n);
    grid.c = grid.vx.unaryExpr([&](double p) { return inverse_marginal(utility, p); });
    grid.meta = GridMeta{params, utility, b};
    grid.halt = halt;
    grid.x_reached = status == OdeStatus::Completed ? x_max : x_reached;
    return grid;
}

namespace {

// int_{x0}^{x1} v(z) e^{xi (z - anchor)} dz over one grid panel.
double panel_integral(const SolutionGrid& grid, Eigen::Index i, double x1, double anchor) {
    const double xi = grid.meta.params.xi;
    const double x0 = grid.xs[i];
    if (x1 <= x0)
        return 0.0;
    auto f = [&](double z) {
        const double v = hermite(grid.xs[i], grid.xs[i + 1], grid.v[i], grid.v[i + 1], grid.vx[i], grid.vx[i + 1], z);
        return v * std::exp(xi * (z - anchor));
    };
    return gauss_legendre8(f, x0, x1);
}

double residual_terms(const SolutionGrid& grid, double v, double vx, double integral) {
    const auto& p = grid.meta.params;
    const double c = inverse_marginal(grid.meta.utility, vx);
    return p.mu * vx - c * vx - (p.beta + p.lambda) * v + utility_eval(grid.meta.utility, c) +
           p.lambda * p.xi * integral;
}

} // namespace

double hjb_residual(const SolutionGrid& grid, double x) {
    require_in_range(grid, x);
    detail::require_exponential_claims(grid.meta.params);
    x = std::clamp(x, 0.0, grid.x_last());
    double integral = 0.0;
    if (grid.size() > 1 && x > 0.0) {
        const Eigen::Index last = locate(grid.xs, x);
        for (Eigen::Index i = 0; i < last; ++i)
            integral += panel_integral(grid, i, grid.xs[i + 1], x);
        integral += panel_integral(grid, last, x, x);
    }
    return residual_terms(grid, grid.v_at(x), grid.vx_at(x), integral);
}

Eigen::VectorXd hjb_residuals(const SolutionGrid& grid) {
    detail::require_exponential_claims(grid.meta.params);
    const Eigen::Index n = grid.size();
    Eigen::VectorXd out(n);
    double integral = 0.0;  // int_0^{x_i} v(z) e^{xi (z - x_i)} dz
    for (Eigen::Index i = 0; i < n; ++i) {
        if (i > 0) {
            const double h = grid.xs[i] - grid.xs[i - 1];
            integral = integral * std::exp(-grid.meta.params.xi * h) +
                       panel_integral(grid, i - 1, grid.xs[i], grid.xs[i]);
        }
        out[i] = residual_terms(grid, grid.v[i], grid.vx[i], integral);
    }
    return out;
}

SolutionClass classify_solution(const SolutionGrid& grid) {
    SolutionClass result;
    const Eigen::Index n = grid.size();
    if (n < 10)
        return result;
    const auto start = static_cast<Eigen::Index>(std::floor(0.8 * static_cast<double>(n - 1)));
    const Eigen::Index len = n - start;
    const auto tail_vx = grid.vx.tail(len);
    const auto tail_vxx = grid.vxx.tail(len);
    const Eigen::VectorXd diffs = tail_vx.tail(len - 1) - tail_vx.head(len - 1);

    result.tail_start_x = grid.xs[start];
    result.vx_tail_change = tail_vx[len - 1] - tail_vx[0];
    result.max_vxx_tail = tail_vxx.maxCoeff();

    if ((diffs.array() > 0.0).all())
        result.kind = SolutionKind::Divergent;
    else if ((diffs.array() < 0.0).all() && (tail_vxx.array() < 0.0).all())
        result.kind = SolutionKind::Concave;
    return result;
}

ValueBoundReport check_value_bounds(const SolutionGrid& grid) {
    const auto& p = grid.meta.params;
    const double u_mu = utility_eval(grid.meta.utility, p.mu);
    ValueBoundReport report;
    report.lower_at_zero = u_mu / (p.lambda + p.beta);
    report.upper_at_zero = u_mu / p.beta;
    report.holds_at_zero = grid.size() > 0 && grid.v[0] >= report.lower_at_zero && grid.v[0] <= report.upper_at_zero;
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
        const double x = grid.xs[i];
        if (grid.v[i] < x + report.lower_at_zero || grid.v[i] > x + report.upper_at_zero) {
            report.first_violation_x = x;
            break;
        }
    }
    return report;
}

} // namespace divhjb
