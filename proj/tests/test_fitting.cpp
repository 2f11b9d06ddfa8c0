#include <doctest.h>

#include <random>

#include "divhjb/fitting.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace divhjb;

namespace {

Eigen::VectorXd table2_column(double fixtures::TableRow::*field) {
    Eigen::VectorXd out(fixtures::kTable2.size());
    for (std::size_t i = 0; i < fixtures::kTable2.size(); ++i)
        out[static_cast<Eigen::Index>(i)] = fixtures::kTable2[i].*field;
    return out;
}

} // namespace

TEST_CASE("fit_linear examples") {
    const auto exact = fit_linear(Eigen::Vector3d(0, 1, 2), Eigen::Vector3d(1, 3, 5));
    CHECK(exact.a1 == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(exact.b1 == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(exact.sse == doctest::Approx(0.0).scale(1.0).epsilon(1e-28));

    const auto zero = fit_linear(Eigen::Vector2d(0, 1), Eigen::Vector2d(0, 0));
    CHECK(zero.a1 == 0.0);
    CHECK(zero.b1 == 0.0);

    CHECK_THROWS_AS(fit_linear(Eigen::Vector3d(2, 2, 2), Eigen::Vector3d(1, 2, 3)), DegenerateDesignError);
    CHECK_THROWS_AS(fit_linear(Eigen::VectorXd::Constant(1, 1.0), Eigen::VectorXd::Constant(1, 1.0)),
                    DegenerateDesignError);
    CHECK_THROWS_AS(fit_linear(Eigen::VectorXd(Eigen::Vector3d(0, 1, 2)), Eigen::VectorXd(Eigen::Vector2d(1, 3))),
                    DomainError);
}

TEST_CASE("fit_linear on the printed optimal-rate column") {
    const auto xs = table2_column(&fixtures::TableRow::x);
    const auto cs = table2_column(&fixtures::TableRow::c);
    const auto fit = fit_linear(xs, cs);
    CHECK(fit.a1 == doctest::Approx(0.07721272727272734).epsilon(1e-12));
    CHECK(fit.b1 == doctest::Approx(0.25826363636363603).epsilon(1e-12));
    const Eigen::Vector2d qr = oracle::ols(xs, cs);
    CHECK(fit.a1 == doctest::Approx(qr[0]).epsilon(1e-12));
    CHECK(fit.b1 == doctest::Approx(qr[1]).epsilon(1e-12));
    CHECK(fit(10.0) == doctest::Approx(fit.a1 * 10.0 + fit.b1));
}

TEST_CASE("fit_power examples") {
    const auto exact = fit_power(Eigen::Vector3d(0, 1, 4), Eigen::Vector3d(1, 3, 5), 0.5);
    CHECK(exact.a2 == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(exact.b2 == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(exact.sse < 1e-28);
    CHECK(exact.alpha == 0.5);

    const auto flat = fit_power(Eigen::Vector4d(0, 1, 4, 9), Eigen::Vector4d::Constant(3.25), 0.5);
    CHECK(flat.a2 == 0.0);
    CHECK(flat.b2 == doctest::Approx(3.25).epsilon(1e-15));

    CHECK_THROWS_AS(fit_power(Eigen::Vector3d(4, 4, 4), Eigen::Vector3d(1, 2, 3), 0.5), DegenerateDesignError);
    CHECK_THROWS_AS(fit_power(Eigen::Vector3d(-1, 1, 4), Eigen::Vector3d(1, 2, 3), 0.5), DomainError);
}

TEST_CASE("fit_power on the printed value column") {
    const auto xs = table2_column(&fixtures::TableRow::x);
    const auto vs = table2_column(&fixtures::TableRow::v);
    const auto fit = fit_power(xs, vs, 0.5);
    CHECK(fit.a2 == doctest::Approx(4.42226655).epsilon(1e-8));
    CHECK(fit.b2 == doctest::Approx(4.95555319).epsilon(1e-8));
    CHECK(fit.sse / 11.0 == doctest::Approx(0.7485274551955287).epsilon(1e-10));
    const Eigen::Vector2d qr = oracle::ols(xs.array().sqrt().matrix(), vs);
    CHECK(fit.a2 == doctest::Approx(qr[0]).epsilon(1e-12));
    CHECK(fit.b2 == doctest::Approx(qr[1]).epsilon(1e-12));
}

TEST_CASE("residuals are orthogonal to the design") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> xdist(0.0, 10.0);
    std::normal_distribution<double> noise(0.0, 0.3);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 5 + trial % 20;
        Eigen::VectorXd xs(n), ys(n);
        for (int i = 0; i < n; ++i) {
            xs[i] = xdist(rng);
            ys[i] = 0.4 * xs[i] + 1.7 + noise(rng);
        }
        const auto lin = fit_linear(xs, ys);
        const Eigen::VectorXd r = ys.array() - lin.a1 * xs.array() - lin.b1;
        const double scale = ys.cwiseAbs().sum() * (1.0 + xs.cwiseAbs().maxCoeff());
        REQUIRE(std::abs(r.sum()) <= 1e-9 * scale);
        REQUIRE(std::abs(r.dot(xs)) <= 1e-9 * scale);

        const auto pw = fit_power(xs, ys, 0.5);
        const Eigen::VectorXd basis = xs.array().sqrt();
        const Eigen::VectorXd rp = ys.array() - pw.a2 * basis.array() - pw.b2;
        REQUIRE(std::abs(rp.sum()) <= 1e-9 * scale);
        REQUIRE(std::abs(rp.dot(basis)) <= 1e-9 * scale);
        REQUIRE(pw.sse == doctest::Approx(rp.squaredNorm()).epsilon(1e-12));
    }
}

TEST_CASE("the fit minimizes the sum of squares") {
    const auto xs = table2_column(&fixtures::TableRow::x);
    const auto cs = table2_column(&fixtures::TableRow::c);
    const auto fit = fit_linear(xs, cs);
    for (double da : {-1e-3, 1e-3})
        for (double db : {-1e-3, 0.0, 1e-3}) {
            const double sse = (cs.array() - (fit.a1 + da) * xs.array() - (fit.b1 + db)).square().sum();
            CHECK(sse > fit.sse);
        }
}

TEST_CASE("shifting the data moves only the intercept") {
    const auto xs = table2_column(&fixtures::TableRow::x);
    const auto vs = table2_column(&fixtures::TableRow::v);
    const auto base = fit_power(xs, vs, 0.5);
    const auto moved = fit_power(xs, (vs.array() + 2.5).matrix(), 0.5);
    CHECK(moved.a2 == doctest::Approx(base.a2).epsilon(1e-12));
    CHECK(moved.b2 == doctest::Approx(base.b2 + 2.5).epsilon(1e-12));
    CHECK(moved.sse == doctest::Approx(base.sse).epsilon(1e-9));
}

TEST_CASE("fit_power with alpha = 1 is fit_linear") {
    const auto xs = table2_column(&fixtures::TableRow::x);
    const auto vs = table2_column(&fixtures::TableRow::v);
    const auto pw = fit_power(xs, vs, 1.0);
    const auto lin = fit_linear(xs, vs);
    CHECK(std::abs(pw.a2 - lin.a1) <= 1e-12 * std::abs(lin.a1));
    CHECK(std::abs(pw.b2 - lin.b1) <= 1e-12 * std::abs(lin.b1));
}

TEST_CASE("fits accept Eigen expressions") {
    const Eigen::VectorXd xs = Eigen::VectorXd::LinSpaced(11, 0.0, 10.0);
    const auto fit = fit_linear(xs, (3.0 * xs.array() - 1.0).matrix());
    CHECK(fit.a1 == doctest::Approx(3.0));
    CHECK(fit.b1 == doctest::Approx(-1.0));
}
