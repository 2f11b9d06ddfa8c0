#ifndef DIVHJB_SIMULATE_HPP
#define DIVHJB_SIMULATE_HPP

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <variant>

#include "divhjb/hjb.hpp"
#include "divhjb/model.hpp"
#include "divhjb/random.hpp"

namespace divhjb {

struct ConstantStrategy {
    double c = 0.0;
};

struct LinearStrategy {
    double a1 = 0.0;
    double b1 = 0.0;
};

/// Feedback rate read off a solved grid (linear interpolation of c); beyond
/// the grid the large-surplus asymptote of the grid's utility is used.
struct GridStrategy {
    std::shared_ptr<const SolutionGrid> grid;
};

struct AsymptoticPowerStrategy {
    double alpha = 0.5;
};

struct AsymptoticLogStrategy {};

using Strategy =
    std::variant<ConstantStrategy, LinearStrategy, GridStrategy, AsymptoticPowerStrategy, AsymptoticLogStrategy>;

/// Dividend rate paid at surplus x; always >= 0.
double strategy_rate(const Strategy& strategy, const ModelParams& params, double x);

struct SimOptions {
    double h_sim = 0.01;    ///< RK4 step between claims for non-closed-form strategies
    double horizon = 0.0;   ///< 0: ln(1e8) / beta
    double root_tol = 1e-10;
    unsigned threads = 0;   ///< 0: DIVHJB_THREADS or hardware concurrency
};

/// Horizon beyond which the discount factor is below 1e-8.
double default_horizon(const ModelParams& params);

struct PathOutcome {
    double discounted_utility = 0.0;
    std::optional<double> ruin_time;
};

/// One path of X = R - C from x0 under `strategy` until ruin (X <= 0) or the
/// horizon, accumulating int e^{-beta t} U(c(X_t)) dt.
PathOutcome simulate_path(const ModelParams& params, const Utility& utility, const Strategy& strategy, double x0,
                          double horizon, RngStream& rng, const SimOptions& options = {});

struct SimResult {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n_paths = 0;
    double ruin_fraction = 0.0;
    double mean_ruin_time = 0.0;  ///< over ruined paths; 0 when none
};

/// Average of n_paths independent paths; path i draws from
/// make_stream(seed, i), so the result does not depend on the thread count.
SimResult estimate_value(const ModelParams& params, const Utility& utility, const Strategy& strategy, double x0,
                         std::size_t n_paths, std::uint64_t seed, const SimOptions& options = {});

} // namespace divhjb

#endif // DIVHJB_SIMULATE_HPP
