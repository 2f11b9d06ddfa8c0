#include "divhjb/shooting.hpp"

#include <algorithm>
#include <cmath>

#include "divhjb/parallel.hpp"
#include "divhjb/quadrature.hpp"
#include "divhjb/random.hpp"

namespace divhjb {

std::string to_string(RowStatus status) {
    switch (status) {
    case RowStatus::Evaluated: return "evaluated";
    case RowStatus::Halted: return "halted";
    case RowStatus::NoTrajectory: return "no-trajectory";
    case RowStatus::ImmediateRuin: return "immediate-ruin";
    }
    return "unknown";
}

double trajectory(double mu, const LinearFit& fit, double t) {
    if (!(fit.a1 > 0.0))
        throw DomainError("trajectory requires a positive fitted slope a1");
    if (!(t >= 0.0))
        throw DomainError("trajectory time must be non-negative");
    return (mu - fit.b1) / fit.a1 * -std::expm1(-fit.a1 * t);
}

namespace {

// trajectory with its a1 -> 0 limit x(t) = (mu - b1) t.
double path_position(double mu, const LinearFit& fit, double t) {
    return fit.a1 == 0.0 ? (mu - fit.b1) * t : trajectory(mu, fit, t);
}

// Quantile 1 - 1e-10 of an exponential with the given rate.
double truncation_point(double rate) { return -std::log(1e-10) / rate; }

void require_finite(double value, const char* what) {
    if (!std::isfinite(value))
        throw NumericError(std::string("non-finite value in ") + what);
}

double running_weight(const ModelParams& p, DiscountConvention convention) {
    return convention == DiscountConvention::AtPayment ? 1.0 : p.lambda / (p.lambda + p.beta);
}

ExpectationEstimate expectation_by_quadrature(const ModelParams& p, const Utility& u, const LinearFit& c_fit,
                                              const PowerFit& v_fit, DiscountConvention convention) {
    const double s_max = truncation_point(p.lambda);
    const double t_max = truncation_point(p.xi);
    const double alpha = v_fit.alpha;

    // E_T[v_hat+(x - T)] with t = x - w^2 to absorb the (x - t)^alpha
    // endpoint behaviour.
    auto jump_payoff = [&](double x) {
        if (!(x > 0.0))
            return 0.0;
        const double w_lo = x > t_max ? std::sqrt(x - t_max) : 0.0;
        auto integrand = [&](double w) {
            const double w2 = w * w;
            return p.xi * std::exp(-p.xi * (x - w2)) * (v_fit.a2 * std::pow(w2, alpha) + v_fit.b2) * 2.0 * w;
        };
        return integrate_adaptive(integrand, w_lo, std::sqrt(x), 1e-14, 1e-12).value;
    };
    auto jump_outer = [&](double s) {
        return p.lambda * std::exp(-(p.lambda + p.beta) * s) * jump_payoff(path_position(p.mu, c_fit, s));
    };
    // P(S > u) = e^{-lambda u} folds the inner time integral into one.
    auto running = [&](double s) {
        const double rate = std::max(0.0, c_fit(path_position(p.mu, c_fit, s)));
        return std::exp(-(p.lambda + p.beta) * s) * utility_eval(u, rate);
    };

    const double jump = integrate_adaptive(jump_outer, 0.0, s_max, 1e-13, 1e-11).value;
    const double run = running_weight(p, convention) * integrate_adaptive(running, 0.0, s_max, 1e-13, 1e-11).value;
    ExpectationEstimate est;
    est.value = jump + run;
    require_finite(est.value, "quadrature of A");
    return est;
}

ExpectationEstimate expectation_by_simulation(const ModelParams& p, const Utility& u, const LinearFit& c_fit,
                                              const PowerFit& v_fit, DiscountConvention convention,
                                              const MonteCarloMethod& mc) {
    if (mc.n == 0)
        throw DomainError("Monte Carlo sample count must be positive");
    constexpr std::size_t block_size = 8192;
    const std::size_t n_blocks = (mc.n + block_size - 1) / block_size;
    std::vector<RunningStats> blocks(n_blocks);

    parallel_blocks(n_blocks, resolve_threads(mc.threads), [&](std::size_t block) {
        RngStream rng = make_stream(mc.seed, block);
        const std::size_t begin = block * block_size;
        const std::size_t end = std::min(mc.n, begin + block_size);
        RunningStats stats;
        for (std::size_t i = begin; i < end; ++i) {
            const double s = sample_exponential(rng, p.lambda);
            const double t = sample_exponential(rng, p.xi);
            const double w = uniform01(rng) * s;
            const double x_s = path_position(p.mu, c_fit, s);
            const double jump = x_s > t ? std::exp(-p.beta * s) * v_fit(x_s - t) : 0.0;
            const double rate = std::max(0.0, c_fit(path_position(p.mu, c_fit, w)));
            const double discount =
                convention == DiscountConvention::AtPayment ? std::exp(-p.beta * w) : std::exp(-p.beta * s);
            const double sample = jump + s * discount * utility_eval(u, rate);
            require_finite(sample, "Monte Carlo sample of A");
            stats.push(sample);
        }
        blocks[block] = stats;
    });

    const RunningStats total = merge_pairwise(blocks);
    ExpectationEstimate est;
    est.value = total.mean;
    est.std_error = total.std_error();
    return est;
}

} // namespace

ExpectationEstimate expected_value_A(const ModelParams& params, const Utility& utility, const LinearFit& c_fit,
                                     const PowerFit& v_fit, const ExpectationMethod& method,
                                     DiscountConvention convention) {
    if (!(c_fit.a1 >= 0.0))
        throw DomainError("expected_value_A requires a non-negative fitted slope a1");
    if (!(params.mu - c_fit.b1 > 0.0)) {
        ExpectationEstimate ruined;
        ruined.immediate_ruin = true;
        return ruined;
    }
    if (const auto* mc = std::get_if<MonteCarloMethod>(&method))
        return expectation_by_simulation(params, utility, c_fit, v_fit, convention, *mc);
    return expectation_by_quadrature(params, utility, c_fit, v_fit, convention);
}

ShootingRow evaluate_slope(const ModelParams& params, const Utility& utility, double b,
                           const ShootingOptions& options) {
    if (!utility.is_power())
        throw NotSupportedError("the initial-slope search is defined for power utility only");
    if (options.n_fit < 2 || !(options.x_fit_max > 0.0))
        throw ValidationError("fit window needs n_fit >= 2 and x_fit_max > 0");

    ShootingRow row;
    row.b = b;
    row.a = boundary_v0(params, utility, b);

    const SolutionGrid grid = integrate(params, utility, b, options.x_fit_max, options.integration);
    row.solution_class = classify_solution(grid).kind;
    if (grid.x_last() < options.x_fit_max - 1e-12) {
        row.status = RowStatus::Halted;
        return row;
    }

    Eigen::VectorXd xs = Eigen::VectorXd::LinSpaced(options.n_fit, 0.0, options.x_fit_max);
    Eigen::VectorXd v(options.n_fit), c(options.n_fit);
    for (Eigen::Index i = 0; i < xs.size(); ++i) {
        v[i] = grid.v_at(xs[i]);
        c[i] = inverse_marginal(utility, grid.vx_at(xs[i]));
    }
    row.c_fit = fit_linear(xs, c);
    row.v_fit = fit_power(xs, v, utility.alpha());
    if (!(row.c_fit.a1 > 0.0)) {
        row.status = RowStatus::NoTrajectory;
        return row;
    }

    const ExpectationEstimate est =
        expected_value_A(params, utility, row.c_fit, row.v_fit, QuadratureMethod{}, options.convention);
    row.A = est.value;
    row.gap = row.a - row.A;
    if (est.immediate_ruin)
        row.status = RowStatus::ImmediateRuin;
    return row;
}

ShootingReport find_initial_slope(const ModelParams& params, const Utility& utility,
                                  const ShootingOptions& options) {
    if (!(options.b_start > 0.0) || !(options.d_start > 0.0) || !(options.epsilon > 0.0))
        throw ValidationError("b_start, d_start and epsilon must be positive");
    if (!(options.refine_factor > 1.0))
        throw ValidationError("refine_factor must exceed 1");
    if (options.max_iters == 0)
        throw ValidationError("max_iters must be positive");

    ShootingReport report;
    report.epsilon = options.epsilon;
    double d = options.d_start;
    report.schedule.push_back(d);

    auto evaluate = [&](double b) -> ShootingRow& {
        ShootingRow row;
        if (report.rows.empty()) {
            row = evaluate_slope(params, utility, b, options);
        } else {
            try {
                row = evaluate_slope(params, utility, b, options);
            } catch (const SingularityError&) {
                row.b = b;
                row.a = boundary_v0(params, utility, b);
                row.status = RowStatus::Halted;
            }
        }
        row.step = d;
        report.rows.push_back(row);
        return report.rows.back();
    };
    auto shrink = [&]() {
        d /= options.refine_factor;
        report.schedule.push_back(d);
    };
    auto accept = [&]() {
        report.rows.back().accepted = true;
        report.best_index = report.rows.size() - 1;
    };

    // The first integration must succeed; a row without a usable gap (for
    // example a divergent branch with decreasing c) walks downward until one
    // is found.
    if (!evaluate(options.b_start).has_gap()) {
        double b = options.b_start;
        while (!report.rows.back().has_gap()) {
            b -= d;
            if (!(b > 0.0) || report.rows.size() >= options.max_iters)
                throw NoDescentError("no candidate slope below b_start produced a finite gap");
            evaluate(b);
        }
    }
    accept();
    if (std::abs(report.best().gap) < options.epsilon) {
        report.converged = true;
        return report;
    }

    double direction = -1.0;
    bool first_step = true;
    while (report.rows.size() < options.max_iters && d >= options.d_min) {
        const ShootingRow best = report.best();
        const double candidate = best.b + direction * d;
        if (!(candidate > 0.0)) {
            shrink();
            continue;
        }
        const ShootingRow& row = evaluate(candidate);
        const bool improved = row.has_gap() && std::abs(row.gap) < std::abs(best.gap);
        const bool sign_flip = row.has_gap() && std::signbit(row.gap) != std::signbit(best.gap);

        if (first_step && !improved) {
            if (direction < 0.0) {
                direction = 1.0;
                continue;
            }
            throw NoDescentError("gap does not decrease in either direction from b_start");
        }
        first_step = false;

        if (!improved) {
            if (sign_flip)
                direction = -direction;
            shrink();
            continue;
        }
        const double relative_gain = (std::abs(best.gap) - std::abs(row.gap)) / std::abs(best.gap);
        accept();
        if (std::abs(row.gap) < options.epsilon) {
            report.converged = true;
            break;
        }
        if (sign_flip) {
            direction = -direction;
            shrink();
        } else if (relative_gain < options.stall_tol) {
            shrink();
        }
    }
    return report;
}

} // namespace divhjb
