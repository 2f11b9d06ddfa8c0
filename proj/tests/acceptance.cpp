// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "divhjb/asymptotics.hpp"
#include "divhjb/fitting.hpp"
#include "divhjb/hjb.hpp"
#include "divhjb/shooting.hpp"
#include "divhjb/simulate.hpp"
#include "fixtures.hpp"

using namespace divhjb;
using fixtures::sqrt_utility;
using fixtures::table_params;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;
};

std::string fmt(const char* pattern, auto... args) {
    char buffer[512];
    std::snprintf(buffer, sizeof buffer, pattern, args...);
    return buffer;
}

double relative(double value, double reference) { return std::abs(value - reference) / std::abs(reference); }

Eigen::Index node(const SolutionGrid& grid, double x) { return static_cast<Eigen::Index>(std::lround(x * 100.0)); }

Verdict boundary_closed_form() {
    Verdict v;
    double worst = 0.0;
    for (const auto& row : fixtures::kTable3)
        worst = std::max(worst, std::abs(boundary_v0(table_params(), sqrt_utility(), row.b) - row.a));
    v.pass = worst <= 1e-8;
    v.detail = fmt("8 rows, max |a - printed| = %.2e (limit 1e-8)", worst);
    return v;
}

Verdict table_branch(double b, const std::array<fixtures::TableRow, 11>& table, SolutionKind expected, bool check_c) {
    Verdict v;
    const auto grid = integrate(table_params(), sqrt_utility(), b, 10.0);
    double worst = 0.0, worst_c = 0.0;
    for (const auto& row : table) {
        const auto i = node(grid, row.x);
        worst = std::max({worst, relative(grid.v[i], row.v), relative(grid.vx[i], row.vx)});
        if (check_c) {
            worst = std::max(worst, relative(grid.c[i], row.c));
            worst_c = std::max(worst_c, relative(grid.c[i], std::pow(grid.vx[i], -2.0)));
        }
    }
    const auto kind = classify_solution(grid).kind;
    v.pass = !grid.halted() && worst <= 0.01 && kind == expected && worst_c <= 1e-6;
    v.detail = fmt("11 rows, max rel dev = %.2e (limit 1e-2), class = %s", worst, to_string(kind).c_str());
    if (check_c)
        v.detail += fmt(", max rel |c - vx^-2| = %.1e (limit 1e-6)", worst_c);
    return v;
}

Verdict asymptotic_agreement() {
    Verdict v;
    const auto grid = integrate(table_params(), sqrt_utility(), 1.9, 10.0);
    const auto asym = power_asymptote(table_params(), 0.5, 10.0);
    const double rv = grid.v[grid.size() - 1] / asym.v;
    const double rvx = grid.vx[grid.size() - 1] / asym.vx;
    v.pass = rv >= 0.985 && rv <= 1.005 && rvx >= 0.95 && rvx <= 1.0;
    v.detail = fmt("v(10)/%.4g = %.4f in [0.985, 1.005], vx(10)/%.4g = %.4f in [0.95, 1.0]", asym.v, rv, asym.vx, rvx);
    return v;
}

Verdict shooting_reproduction() {
    Verdict v;
    const auto report = find_initial_slope(table_params(), sqrt_utility());
    std::vector<double> gaps;
    for (const auto& row : report.rows)
        if (row.accepted)
            gaps.push_back(row.gap);
    bool monotone = true;
    for (std::size_t i = 1; i < gaps.size(); ++i)
        monotone = monotone && std::abs(gaps[i]) < std::abs(gaps[i - 1]);
    const auto& first = report.rows.front();
    const auto& best = report.best();
    const bool first_ok = std::abs(first.gap - 0.007713) < 5e-6;
    const bool plateau = best.gap >= 0.0050 && best.gap <= 0.0065;
    const bool slope = std::abs(best.b - 1.88185) <= 5e-4;
    const bool a_ok = relative(first.A, 6.794392618) <= 0.01;
    v.pass = monotone && first_ok && plateau && slope && a_ok;
    v.detail = fmt("%zu rows, %zu accepted, gaps %.6f -> %.6f (monotone: %s), best b = %.8f (|b - 1.88185| = %.1e), "
                   "A(1.9) = %.9f (rel dev %.1e), at-payment discount",
                   report.rows.size(), gaps.size(), gaps.front(), gaps.back(), monotone ? "yes" : "no", best.b,
                   std::abs(best.b - 1.88185), first.A, relative(first.A, 6.794392618));
    return v;
}

Verdict oracle_equivalence() {
    Verdict v;
    const auto row = evaluate_slope(table_params(), sqrt_utility(), 1.9);
    const auto quad = expected_value_A(table_params(), sqrt_utility(), row.c_fit, row.v_fit);
    const auto mc = expected_value_A(table_params(), sqrt_utility(), row.c_fit, row.v_fit,
                                     MonteCarloMethod{10'000'000, 20240601, 0});
    const double z = std::abs(quad.value - mc.value) / mc.std_error;
    v.pass = z <= 3.0;
    v.detail = fmt("quadrature %.9f, Monte Carlo (n=1e7) %.9f +- %.2e, |z| = %.2f (limit 3)", quad.value, mc.value,
                   mc.std_error, z);
    return v;
}

Verdict simulation_consistency() {
    Verdict v;
    const auto p = table_params();
    const double closed = utility_eval(sqrt_utility(), p.mu) / (p.beta + p.lambda);
    const auto constant = estimate_value(p, sqrt_utility(), ConstantStrategy{p.mu}, 1e-4, 1'000'000, 7);
    const double z = std::abs(constant.mean - closed) / constant.std_error;

    const auto grid = std::make_shared<const SolutionGrid>(integrate(p, sqrt_utility(), 1.9, 10.0));
    const double v5 = fixtures::kTable2[5].v;
    const auto feedback = estimate_value(p, sqrt_utility(), GridStrategy{grid}, 5.0, 200'000, 7);
    const double lo = 0.90 * v5;
    const double hi = (1.0 + 3.0 * feedback.std_error / feedback.mean) * v5;
    v.pass = z <= 3.0 && feedback.mean >= lo && feedback.mean <= hi;
    v.detail = fmt("constant: %.5f +- %.1e vs %.5f, |z| = %.2f; feedback at x0=5 (n=2e5): %.4f +- %.1e in [%.4f, %.4f]",
                   constant.mean, constant.std_error, closed, z, feedback.mean, feedback.std_error, lo, hi);
    return v;
}

bool identical(const SimResult& a, const SimResult& b) {
    return std::memcmp(&a.mean, &b.mean, sizeof(double)) == 0 &&
           std::memcmp(&a.std_error, &b.std_error, sizeof(double)) == 0 &&
           std::memcmp(&a.ruin_fraction, &b.ruin_fraction, sizeof(double)) == 0 &&
           std::memcmp(&a.mean_ruin_time, &b.mean_ruin_time, sizeof(double)) == 0;
}

Verdict property_suites() {
    Verdict v;
    const auto p = table_params();
    const auto grid = integrate(p, sqrt_utility(), 1.9, 10.0);

    const Eigen::VectorXd residuals = hjb_residuals(grid);
    const double hjb = (residuals.array().abs() / (1.0 + grid.v.array().abs())).maxCoeff();

    // Orthogonality of the fit residuals on the shooting window.
    const Eigen::VectorXd xs = Eigen::VectorXd::LinSpaced(11, 0.0, 10.0);
    Eigen::VectorXd vs(11), cs(11);
    for (Eigen::Index i = 0; i < 11; ++i) {
        vs[i] = grid.v_at(xs[i]);
        cs[i] = inverse_marginal(sqrt_utility(), grid.vx_at(xs[i]));
    }
    const auto lin = fit_linear(xs, cs);
    const auto pw = fit_power(xs, vs, 0.5);
    const Eigen::VectorXd basis = xs.array().sqrt();
    const Eigen::VectorXd r_lin = cs.array() - lin.a1 * xs.array() - lin.b1;
    const Eigen::VectorXd r_pow = vs.array() - pw.a2 * basis.array() - pw.b2;
    const double ols = std::max({std::abs(r_lin.sum()) / cs.cwiseAbs().sum(),
                                 std::abs(r_lin.dot(xs)) / xs.cwiseProduct(cs).cwiseAbs().sum(),
                                 std::abs(r_pow.sum()) / vs.cwiseAbs().sum(),
                                 std::abs(r_pow.dot(basis)) / basis.cwiseProduct(vs).cwiseAbs().sum()});

    bool power_decreasing = true;
    double previous = INFINITY;
    for (double level : {1e2, 1e3, 1e4}) {
        const auto pt = riccati_asymptote(p, sqrt_utility(), level);
        const double r = normalized_riccati_residual(p, sqrt_utility(), level, pt.y, pt.y_v);
        power_decreasing = power_decreasing && r < previous;
        previous = r;
    }
    using Big = boost::multiprecision::cpp_bin_float_50;
    const auto pb = p.cast<Big>();
    const auto log_u = BasicUtility<Big>::logarithmic();
    bool log_decreasing = true;
    Big previous_big = 1;
    for (int e = 2; e <= 4; ++e) {
        const Big level = pow(Big(10), e);
        const auto pt = riccati_asymptote(pb, log_u, level);
        const Big r = normalized_riccati_residual(pb, log_u, level, pt.y, pt.y_v);
        log_decreasing = log_decreasing && r < previous_big;
        previous_big = r;
    }

    const auto shared = std::make_shared<const SolutionGrid>(grid);
    SimOptions one, four;
    one.threads = 1;
    four.threads = 4;
    const auto s1 = estimate_value(p, sqrt_utility(), GridStrategy{shared}, 5.0, 5000, 3, one);
    const auto s4 = estimate_value(p, sqrt_utility(), GridStrategy{shared}, 5.0, 5000, 3, four);
    const auto a1 = expected_value_A(p, sqrt_utility(), lin, pw, MonteCarloMethod{200'000, 3, 1});
    const auto a4 = expected_value_A(p, sqrt_utility(), lin, pw, MonteCarloMethod{200'000, 3, 4});
    const bool deterministic = identical(s1, s4) && std::memcmp(&a1.value, &a4.value, sizeof(double)) == 0 &&
                               std::memcmp(&a1.std_error, &a4.std_error, sizeof(double)) == 0;

    v.pass = hjb <= 1e-3 && ols <= 1e-9 && power_decreasing && log_decreasing && deterministic;
    v.detail = fmt("HJB residual %.1e (limit 1e-3), OLS orthogonality %.1e (limit 1e-9), Riccati decreasing: "
                   "power %s, log %s, thread-count determinism: %s",
                   hjb, ols, power_decreasing ? "yes" : "no", log_decreasing ? "yes" : "no",
                   deterministic ? "byte-identical" : "differs");
    return v;
}

struct Criterion {
    int id;
    const char* name;
    double time_limit;  // seconds
    std::function<Verdict()> check;
};

} // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "boundary closed form", 1.0, boundary_closed_form},
        {2, "divergent branch", 1.0,
         [] { return table_branch(2.0, fixtures::kTable1, SolutionKind::Divergent, false); }},
        {3, "concave branch", 1.0, [] { return table_branch(1.9, fixtures::kTable2, SolutionKind::Concave, true); }},
        {4, "asymptotic agreement", 1.0, asymptotic_agreement},
        {5, "shooting reproduction", 60.0, shooting_reproduction},
        {6, "oracle equivalence", 60.0, oracle_equivalence},
        {7, "simulation consistency", 120.0, simulation_consistency},
        {8, "property suites", 60.0, property_suites},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Verdict verdict;
        try {
            verdict = c.check();
        } catch (const std::exception& e) {
            verdict = {false, std::string("exception: ") + e.what()};
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = seconds <= c.time_limit;
        const bool pass = verdict.pass && in_time;
        failures += pass ? 0 : 1;
        std::printf("[%s] criterion %d, %s: %s; %.2f s (limit %.0f s)\n", pass ? "PASS" : "FAIL", c.id, c.name,
                    verdict.detail.c_str(), seconds, c.time_limit);
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
