#include "divhjb/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "divhjb/ode.hpp"
#include "divhjb/parallel.hpp"
#include "divhjb/quadrature.hpp"

namespace divhjb {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double asymptotic_rate(const ModelParams& params, const Utility& utility, double x) {
    if (utility.is_power())
        return params.beta * x / (1.0 - utility.alpha());
    return std::max(0.0, params.beta * x + params.beta - 1.0);
}

// O(1) interpolation of c on the uniform output grid.
class GridRate {
public:
    GridRate(const SolutionGrid& grid, const ModelParams& params) : grid_(grid), params_(params) {
        if (grid.size() == 0)
            throw DomainError("grid strategy needs a non-empty grid");
        step_ = grid.size() > 1 ? grid.xs[1] - grid.xs[0] : 1.0;
        inv_step_ = 1.0 / step_;
    }

    double operator()(double x) const {
        const Eigen::Index n = grid_.size();
        if (x >= grid_.x_last())
            return x == grid_.x_last() ? grid_.c[n - 1] : asymptotic_rate(params_, grid_.meta.utility, x);
        if (n == 1)
            return grid_.c[0];
        auto i = std::min<Eigen::Index>(static_cast<Eigen::Index>(x * inv_step_), n - 2);
        double t;
        if (grid_.xs[i + 1] < x || i == n - 2) {  // possibly irregular last panel
            i = n - 2;
            t = (x - grid_.xs[i]) / (grid_.xs[i + 1] - grid_.xs[i]);
        } else {
            t = (x - grid_.xs[i]) * inv_step_;
        }
        return std::max(0.0, (1.0 - t) * grid_.c[i] + t * grid_.c[i + 1]);
    }

private:
    const SolutionGrid& grid_;
    const ModelParams& params_;
    double step_ = 1.0;
    double inv_step_ = 1.0;
};

// int_a^b e^{-beta u} du
double discount_integral(double beta, double a, double b) {
    return std::exp(-beta * a) * -std::expm1(-beta * (b - a)) / beta;
}

struct Segment {
    double x;
    double t;
    double utility;
};

// Advances the surplus between claims for a general rate function with RK4
// on (x, J), J' = e^{-beta u} U(c(x)). Returns the ruin time if x reaches 0.
// x' does not depend on t, so the discount is carried as a running factor.
template <typename Rate>
std::optional<double> advance_rk4(const ModelParams& p, const Utility& u, const Rate& rate, Segment& seg,
                                  double t_end, const SimOptions& options) {
    using State = Eigen::Vector2d;
    auto rhs = [&](double t, const State& y) -> State {
        const double c = rate(std::max(y[0], 0.0));
        return State(p.mu - c, std::exp(-p.beta * t) * utility_eval(u, c));
    };
    const double h_full = options.h_sim;
    const double half_factor = std::exp(-p.beta * 0.5 * h_full);
    const double full_factor = half_factor * half_factor;
    double x = seg.x;
    double t = seg.t;
    double discount = std::exp(-p.beta * t);
    double accumulated = 0.0;
    while (t < t_end) {
        const double h = std::min(h_full, t_end - t);
        double next_x;
        double gain;
        if (h == h_full) {
            const double c1 = rate(std::max(x, 0.0));
            const double k1 = p.mu - c1;
            const double c2 = rate(std::max(x + 0.5 * h * k1, 0.0));
            const double k2 = p.mu - c2;
            const double c3 = rate(std::max(x + 0.5 * h * k2, 0.0));
            const double k3 = p.mu - c3;
            const double c4 = rate(std::max(x + h * k3, 0.0));
            const double k4 = p.mu - c4;
            next_x = x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            gain = discount * h / 6.0 *
                   (utility_eval(u, c1) + 2.0 * half_factor * (utility_eval(u, c2) + utility_eval(u, c3)) +
                    full_factor * utility_eval(u, c4));
        } else {
            const State next = rk4_step(rhs, t, State(x, 0.0), h);
            next_x = next[0];
            gain = next[1];
        }
        if (!std::isfinite(next_x) || !std::isfinite(gain))
            throw NumericError("non-finite surplus in path simulation");
        if (next_x <= 0.0) {
            // Bisect the sub-step length at which the surplus first reaches 0.
            const State y(x, 0.0);
            double lo = 0.0, hi = h;
            State at_hi(next_x, gain);
            while (hi - lo > options.root_tol) {
                const double mid = 0.5 * (lo + hi);
                const State trial = rk4_step(rhs, t, y, mid);
                if (trial[0] <= 0.0) {
                    hi = mid;
                    at_hi = trial;
                } else {
                    lo = mid;
                }
            }
            seg.utility += accumulated + at_hi[1];
            seg.x = 0.0;
            seg.t = t + hi;
            return seg.t;
        }
        x = next_x;
        accumulated += gain;
        t += h;
        discount = h == h_full ? discount * full_factor : std::exp(-p.beta * t);
    }
    seg.x = x;
    seg.t = t_end;
    seg.utility += accumulated;
    return std::nullopt;
}

std::optional<double> advance_constant(const ModelParams& p, const Utility& u, double c, Segment& seg,
                                       double t_end) {
    const double drift = p.mu - c;
    const double flow = utility_eval(u, c);
    if (drift < 0.0) {
        const double hit = seg.t + seg.x / -drift;
        if (hit <= t_end) {
            seg.utility += flow * discount_integral(p.beta, seg.t, hit);
            seg.x = 0.0;
            seg.t = hit;
            return hit;
        }
    }
    seg.utility += flow * discount_integral(p.beta, seg.t, t_end);
    seg.x += drift * (t_end - seg.t);
    seg.t = t_end;
    return std::nullopt;
}

// x' = mu - b1 - a1 x relaxes to x* = (mu - b1)/a1; requires a1 > 0, b1 >= 0.
std::optional<double> advance_linear(const ModelParams& p, const Utility& u, const LinearStrategy& s, Segment& seg,
                                     double t_end) {
    const double target = (p.mu - s.b1) / s.a1;
    const double offset = seg.x - target;
    double stop = t_end;
    bool ruined = false;
    if (target < 0.0) {
        const double hit = seg.t + std::log(offset / -target) / s.a1;
        if (hit <= t_end) {
            stop = hit;
            ruined = true;
        }
    }
    const double t0 = seg.t;
    auto flow = [&](double t) {
        const double x = target + offset * std::exp(-s.a1 * (t - t0));
        return std::exp(-p.beta * t) * utility_eval(u, std::max(0.0, s.a1 * x + s.b1));
    };
    const double span = stop - t0;
    const auto panels = static_cast<int>(std::ceil(span));
    for (int k = 0; k < panels; ++k) {
        const double a = t0 + span * k / panels;
        const double b = t0 + span * (k + 1) / panels;
        seg.utility += gauss_legendre8(flow, a, b);
    }
    seg.t = stop;
    seg.x = ruined ? 0.0 : target + offset * std::exp(-s.a1 * span);
    return ruined ? std::optional<double>(stop) : std::nullopt;
}

template <typename Advance>
PathOutcome run_path(const ModelParams& p, double x0, double horizon, RngStream& rng, Advance&& advance) {
    PathOutcome out;
    if (!(x0 > 0.0)) {
        out.ruin_time = 0.0;
        return out;
    }
    Segment seg{x0, 0.0, 0.0};
    for (;;) {
        const double arrival = seg.t + sample_exponential(rng, p.lambda);
        const double stop = std::min(arrival, horizon);
        if (auto ruin = advance(seg, stop)) {
            out.discounted_utility = seg.utility;
            out.ruin_time = ruin;
            return out;
        }
        if (arrival >= horizon)
            break;
        seg.x -= sample_claim(rng, p.k, p.xi);
        if (seg.x <= 0.0) {
            out.ruin_time = seg.t;
            break;
        }
    }
    out.discounted_utility = seg.utility;
    return out;
}

} // namespace

double default_horizon(const ModelParams& params) { return std::log(1e8) / params.beta; }

double strategy_rate(const Strategy& strategy, const ModelParams& params, double x) {
    x = std::max(x, 0.0);
    return std::visit(
        overloaded{
            [&](const ConstantStrategy& s) { return std::max(0.0, s.c); },
            [&](const LinearStrategy& s) { return std::max(0.0, s.a1 * x + s.b1); },
            [&](const GridStrategy& s) { return GridRate(*s.grid, params)(x); },
            [&](const AsymptoticPowerStrategy& s) { return params.beta * x / (1.0 - s.alpha); },
            [&](const AsymptoticLogStrategy&) { return std::max(0.0, params.beta * x + params.beta - 1.0); },
        },
        strategy);
}

PathOutcome simulate_path(const ModelParams& params, const Utility& utility, const Strategy& strategy, double x0,
                          double horizon, RngStream& rng, const SimOptions& options) {
    if (!(x0 >= 0.0))
        throw DomainError("initial surplus must be non-negative");
    if (!(horizon > 0.0))
        throw DomainError("horizon must be positive");
    if (!(options.h_sim > 0.0))
        throw DomainError("simulation step must be positive");

    auto generic = [&](const auto& rate) {
        return run_path(params, x0, horizon, rng, [&](Segment& seg, double stop) {
            return advance_rk4(params, utility, rate, seg, stop, options);
        });
    };

    return std::visit(
        overloaded{
            [&](const ConstantStrategy& s) {
                const double c = std::max(0.0, s.c);
                return run_path(params, x0, horizon, rng, [&](Segment& seg, double stop) {
                    return advance_constant(params, utility, c, seg, stop);
                });
            },
            [&](const LinearStrategy& s) {
                if (s.a1 > 0.0 && s.b1 >= 0.0)
                    return run_path(params, x0, horizon, rng, [&](Segment& seg, double stop) {
                        return advance_linear(params, utility, s, seg, stop);
                    });
                return generic([&](double x) { return std::max(0.0, s.a1 * x + s.b1); });
            },
            [&](const GridStrategy& s) {
                if (!s.grid)
                    throw DomainError("grid strategy without a grid");
                return generic(GridRate(*s.grid, params));
            },
            [&](const AsymptoticPowerStrategy& s) {
                return generic([&](double x) { return params.beta * x / (1.0 - s.alpha); });
            },
            [&](const AsymptoticLogStrategy&) {
                return generic([&](double x) { return std::max(0.0, params.beta * x + params.beta - 1.0); });
            },
        },
        strategy);
}

SimResult estimate_value(const ModelParams& params, const Utility& utility, const Strategy& strategy, double x0,
                         std::size_t n_paths, std::uint64_t seed, const SimOptions& options) {
    if (n_paths == 0)
        throw DomainError("n_paths must be at least 1");
    const double horizon = options.horizon > 0.0 ? options.horizon : default_horizon(params);

    constexpr std::size_t block_size = 1024;
    const std::size_t n_blocks = (n_paths + block_size - 1) / block_size;
    struct BlockResult {
        RunningStats value;
        std::size_t ruined = 0;
        double ruin_time_sum = 0.0;
    };
    std::vector<BlockResult> blocks(n_blocks);

    parallel_blocks(n_blocks, resolve_threads(options.threads), [&](std::size_t block) {
        BlockResult result;
        const std::size_t begin = block * block_size;
        const std::size_t end = std::min(n_paths, begin + block_size);
        for (std::size_t i = begin; i < end; ++i) {
            RngStream rng = make_stream(seed, i);
            PathOutcome path;
            try {
                path = simulate_path(params, utility, strategy, x0, horizon, rng, options);
            } catch (const NumericError& e) {
                throw NumericError("path " + std::to_string(i) + ": " + e.what());
            }
            result.value.push(path.discounted_utility);
            if (path.ruin_time) {
                ++result.ruined;
                result.ruin_time_sum += *path.ruin_time;
            }
        }
        blocks[block] = result;
    });

    std::vector<RunningStats> stats;
    stats.reserve(n_blocks);
    std::size_t ruined = 0;
    std::vector<double> ruin_times;
    ruin_times.reserve(n_blocks);
    for (const auto& b : blocks) {
        stats.push_back(b.value);
        ruined += b.ruined;
        ruin_times.push_back(b.ruin_time_sum);
    }
    const RunningStats total = merge_pairwise(stats);

    // Pairwise sum of the per-block ruin-time sums, same fixed tree.
    while (ruin_times.size() > 1) {
        std::vector<double> next;
        for (std::size_t i = 0; i + 1 < ruin_times.size(); i += 2)
            next.push_back(ruin_times[i] + ruin_times[i + 1]);
        if (ruin_times.size() % 2 == 1)
            next.push_back(ruin_times.back());
        ruin_times = std::move(next);
    }

    SimResult result;
    result.mean = total.mean;
    result.std_error = total.std_error();
    result.n_paths = n_paths;
    result.ruin_fraction = static_cast<double>(ruined) / static_cast<double>(n_paths);
    result.mean_ruin_time = ruined > 0 ? ruin_times.front() / static_cast<double>(ruined) : 0.0;
    return result;
}

} // namespace divhjb
