#ifndef DIVHJB_SHOOTING_HPP
#define DIVHJB_SHOOTING_HPP

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "divhjb/fitting.hpp"
#include "divhjb/hjb.hpp"
#include "divhjb/model.hpp"

namespace divhjb {

/// Pre-claim surplus path started at 0 under the fitted rate c_hat:
/// x' = mu - (a1 x + b1), x(0) = 0, i.e. x(t) = (mu - b1)/a1 (1 - e^{-a1 t}).
double trajectory(double mu, const LinearFit& fit, double t);

/// Where the running-utility discount is applied in A.
enum class DiscountConvention {
    AtPayment,     ///< e^{-beta u} inside the time integral
    PaperLiteral,  ///< e^{-beta S} in front of the whole integral
};

struct QuadratureMethod {};

struct MonteCarloMethod {
    std::size_t n = 1'000'000;
    std::uint64_t seed = 1;
    unsigned threads = 0;  ///< 0: DIVHJB_THREADS or hardware concurrency
};

using ExpectationMethod = std::variant<QuadratureMethod, MonteCarloMethod>;

struct ExpectationEstimate {
    double value = 0.0;
    double std_error = 0.0;  ///< zero for quadrature
    /// Set when b1 >= mu: the fitted trajectory cannot leave 0, so ruin is
    /// immediate and A = 0.
    bool immediate_ruin = false;
};

/// A = E[e^{-beta S} v_hat+(x(S) - T)] + E[int_0^S disc(u) U(c_hat(x(u))) du]
/// with S ~ Exp(lambda) the first claim time and T ~ Exp(xi) its size;
/// v_hat+ is v_hat on (0, inf) and 0 otherwise (ruin pays nothing).
ExpectationEstimate expected_value_A(const ModelParams& params, const Utility& utility, const LinearFit& c_fit,
                                     const PowerFit& v_fit, const ExpectationMethod& method = QuadratureMethod{},
                                     DiscountConvention convention = DiscountConvention::AtPayment);

enum class RowStatus {
    Evaluated,
    Halted,         ///< integration stopped before the fit window ended
    NoTrajectory,   ///< fitted slope a1 <= 0, A undefined
    ImmediateRuin,  ///< fitted intercept b1 >= mu, A = 0
};

std::string to_string(RowStatus status);

struct ShootingRow {
    double b = 0.0;
    double a = 0.0;  ///< boundary_v0(b)
    double A = std::numeric_limits<double>::quiet_NaN();
    double gap = std::numeric_limits<double>::quiet_NaN();  ///< a - A
    SolutionKind solution_class = SolutionKind::Indeterminate;
    RowStatus status = RowStatus::Evaluated;
    double step = 0.0;       ///< d in force when the row was evaluated
    bool accepted = false;   ///< became the incumbent best slope
    LinearFit c_fit;
    PowerFit v_fit;

    bool has_gap() const { return gap == gap; }
};

struct ShootingOptions {
    double b_start = 1.9;
    double d_start = 0.01;
    double epsilon = 1e-3;
    std::size_t max_iters = 200;
    double refine_factor = 10.0;
    double stall_tol = 1e-3;
    double d_min = 1e-9;
    int n_fit = 11;
    double x_fit_max = 10.0;
    DiscountConvention convention = DiscountConvention::AtPayment;
    IntegrateOptions integration;
};

struct ShootingReport {
    std::vector<ShootingRow> rows;
    bool converged = false;
    double epsilon = 0.0;
    std::vector<double> schedule;  ///< step sizes d in the order used
    std::size_t best_index = 0;

    const ShootingRow& best() const { return rows.at(best_index); }
};

/// One pass of the self-consistency check for a candidate slope b:
/// integrate, fit c_hat and v_hat on the fit window, evaluate A by quadrature.
ShootingRow evaluate_slope(const ModelParams& params, const Utility& utility, double b,
                           const ShootingOptions& options = {});

/// Scan b in steps of d while |a - A| decreases; when a step fails to
/// improve, flips the sign of the gap, or improves by less than stall_tol
/// (relative), d is divided by refine_factor and the scan resumes from the
/// best b so far. Stops on |gap| < epsilon, after max_iters rows, or once
/// d < d_min.
ShootingReport find_initial_slope(const ModelParams& params, const Utility& utility,
                                  const ShootingOptions& options = {});

} // namespace divhjb

#endif // DIVHJB_SHOOTING_HPP
