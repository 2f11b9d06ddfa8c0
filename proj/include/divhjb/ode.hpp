#ifndef DIVHJB_ODE_HPP
#define DIVHJB_ODE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>

#include <Eigen/Core>

namespace divhjb {

template <typename Scalar, int N>
using OdeState = Eigen::Matrix<Scalar, N, 1>;

template <typename Scalar>
struct OdeTolerances {
    Scalar atol = Scalar(1e-9);
    Scalar rtol = Scalar(1e-9);
    Scalar h_min = Scalar(1e-13);
    std::size_t max_steps = 2'000'000;
};

enum class OdeStatus {
    Completed,
    StoppedByObserver,
    StepUnderflow,
    MaxSteps,
    InadmissibleStart,
};

/// Continuous extension of one accepted Dormand-Prince step (4th order).
template <typename Scalar, int N>
struct DenseSegment {
    using State = OdeState<Scalar, N>;

    Scalar x0{};
    Scalar h{};
    std::array<State, 5> rcont;

    Scalar x1() const { return x0 + h; }

    State operator()(Scalar x) const {
        const Scalar theta = (x - x0) / h;
        const Scalar theta1 = Scalar(1) - theta;
        return rcont[0] + theta * (rcont[1] + theta1 * (rcont[2] + theta * (rcont[3] + theta1 * rcont[4])));
    }
};

namespace detail {

template <typename Scalar>
struct Dopri5Tableau {
    static constexpr Scalar c2 = Scalar(1) / 5, c3 = Scalar(3) / 10, c4 = Scalar(4) / 5, c5 = Scalar(8) / 9;
    static constexpr Scalar a21 = Scalar(1) / 5;
    static constexpr Scalar a31 = Scalar(3) / 40, a32 = Scalar(9) / 40;
    static constexpr Scalar a41 = Scalar(44) / 45, a42 = Scalar(-56) / 15, a43 = Scalar(32) / 9;
    static constexpr Scalar a51 = Scalar(19372) / 6561, a52 = Scalar(-25360) / 2187, a53 = Scalar(64448) / 6561,
                            a54 = Scalar(-212) / 729;
    static constexpr Scalar a61 = Scalar(9017) / 3168, a62 = Scalar(-355) / 33, a63 = Scalar(46732) / 5247,
                            a64 = Scalar(49) / 176, a65 = Scalar(-5103) / 18656;
    static constexpr Scalar a71 = Scalar(35) / 384, a73 = Scalar(500) / 1113, a74 = Scalar(125) / 192,
                            a75 = Scalar(-2187) / 6784, a76 = Scalar(11) / 84;
    static constexpr Scalar e1 = Scalar(71) / 57600, e3 = Scalar(-71) / 16695, e4 = Scalar(71) / 1920,
                            e5 = Scalar(-17253) / 339200, e6 = Scalar(22) / 525, e7 = Scalar(-1) / 40;
    static constexpr Scalar d1 = Scalar(-12715105075.0L) / Scalar(11282082432.0L),
                            d3 = Scalar(87487479700.0L) / Scalar(32700410799.0L),
                            d4 = Scalar(-10690763975.0L) / Scalar(1880347072.0L),
                            d5 = Scalar(701980252875.0L) / Scalar(199316789632.0L),
                            d6 = Scalar(-1453857185.0L) / Scalar(822651844.0L),
                            d7 = Scalar(69997945.0L) / Scalar(29380423.0L);
};

} // namespace detail

/// Adaptive Dormand-Prince 5(4) integration of y' = rhs(x, y) on [x0, x_end].
///
/// `rhs` returns std::optional<State>; an empty result marks the point as
/// inadmissible and rejects the step, which is retried with a smaller step
/// until h falls below tol.h_min. Every accepted step is passed to
/// `observer(segment, y1)`; returning false stops the integration.
template <typename Scalar, int N, typename Rhs, typename Observer>
OdeStatus dopri5(Rhs&& rhs, Scalar x0, const OdeState<Scalar, N>& y0, Scalar x_end,
                 const OdeTolerances<Scalar>& tol, Observer&& observer) {
    using State = OdeState<Scalar, N>;
    using T = detail::Dopri5Tableau<Scalar>;
    using std::abs;
    using std::max;
    using std::min;
    using std::pow;
    using std::sqrt;

    if (!(x_end > x0))
        return OdeStatus::Completed;

    std::optional<State> first = rhs(x0, y0);
    if (!first)
        return OdeStatus::InadmissibleStart;

    State y = y0;
    State k1 = *first;
    Scalar x = x0;
    const Scalar span = x_end - x0;

    // Initial step from the usual scale estimate, capped to the interval.
    Scalar h;
    {
        const State scale = (tol.atol + tol.rtol * y.cwiseAbs().array()).matrix();
        const Scalar d0 = sqrt((y.array() / scale.array()).square().mean());
        const Scalar d1 = sqrt((k1.array() / scale.array()).square().mean());
        h = (d0 < Scalar(1e-5) || d1 < Scalar(1e-5)) ? Scalar(1e-6) : Scalar(0.01) * d0 / d1;
        h = min(h, span);
    }

    bool last_rejected = false;
    for (std::size_t step = 0; step < tol.max_steps; ++step) {
        if (x + h > x_end)
            h = x_end - x;
        if (h < tol.h_min)
            return OdeStatus::StepUnderflow;

        auto fail = [&]() {
            h *= Scalar(0.25);
            last_rejected = true;
        };

        std::optional<State> k2 = rhs(x + T::c2 * h, y + h * T::a21 * k1);
        if (!k2) { fail(); continue; }
        std::optional<State> k3 = rhs(x + T::c3 * h, y + h * (T::a31 * k1 + T::a32 * *k2));
        if (!k3) { fail(); continue; }
        std::optional<State> k4 = rhs(x + T::c4 * h, y + h * (T::a41 * k1 + T::a42 * *k2 + T::a43 * *k3));
        if (!k4) { fail(); continue; }
        std::optional<State> k5 =
            rhs(x + T::c5 * h, y + h * (T::a51 * k1 + T::a52 * *k2 + T::a53 * *k3 + T::a54 * *k4));
        if (!k5) { fail(); continue; }
        std::optional<State> k6 =
            rhs(x + h, y + h * (T::a61 * k1 + T::a62 * *k2 + T::a63 * *k3 + T::a64 * *k4 + T::a65 * *k5));
        if (!k6) { fail(); continue; }
        const State y1 = y + h * (T::a71 * k1 + T::a73 * *k3 + T::a74 * *k4 + T::a75 * *k5 + T::a76 * *k6);
        std::optional<State> k7 = rhs(x + h, y1);
        if (!k7) { fail(); continue; }

        const State err_vec =
            h * (T::e1 * k1 + T::e3 * *k3 + T::e4 * *k4 + T::e5 * *k5 + T::e6 * *k6 + T::e7 * *k7);
        const State scale =
            (tol.atol + tol.rtol * y.cwiseAbs().cwiseMax(y1.cwiseAbs()).array()).matrix();
        const Scalar err = sqrt((err_vec.array() / scale.array()).square().mean());
        if (!(err == err)) { fail(); continue; }

        if (err > Scalar(1)) {
            h *= max(Scalar(0.2), Scalar(0.9) * pow(err, Scalar(-0.2)));
            last_rejected = true;
            continue;
        }

        DenseSegment<Scalar, N> seg;
        seg.x0 = x;
        seg.h = h;
        const State ydiff = y1 - y;
        const State bspl = h * k1 - ydiff;
        seg.rcont[0] = y;
        seg.rcont[1] = ydiff;
        seg.rcont[2] = bspl;
        seg.rcont[3] = ydiff - h * *k7 - bspl;
        seg.rcont[4] = h * (T::d1 * k1 + T::d3 * *k3 + T::d4 * *k4 + T::d5 * *k5 + T::d6 * *k6 + T::d7 * *k7);

        const bool reached_end = (x + h >= x_end);
        x = reached_end ? x_end : x + h;
        y = y1;
        k1 = *k7;

        if (!observer(static_cast<const DenseSegment<Scalar, N>&>(seg), static_cast<const State&>(y)))
            return OdeStatus::StoppedByObserver;
        if (reached_end)
            return OdeStatus::Completed;

        Scalar factor = Scalar(0.9) * pow(max(err, Scalar(1e-10)), Scalar(-0.2));
        factor = min(Scalar(5), max(Scalar(0.2), factor));
        if (last_rejected)
            factor = min(factor, Scalar(1));
        h *= factor;
        last_rejected = false;
    }
    return OdeStatus::MaxSteps;
}

/// One classical fourth-order Runge-Kutta step.
template <typename State, typename Scalar, typename Rhs>
State rk4_step(Rhs&& rhs, Scalar t, const State& y, Scalar h) {
    const State k1 = rhs(t, y);
    const State k2 = rhs(t + h / 2, State(y + (h / 2) * k1));
    const State k3 = rhs(t + h / 2, State(y + (h / 2) * k2));
    const State k4 = rhs(t + h, State(y + h * k3));
    return y + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
}

} // namespace divhjb

#endif // DIVHJB_ODE_HPP
