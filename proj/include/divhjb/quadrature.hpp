#ifndef DIVHJB_QUADRATURE_HPP
#define DIVHJB_QUADRATURE_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <queue>
#include <vector>

namespace divhjb {

template <typename Scalar>
struct QuadratureResult {
    Scalar value{};
    Scalar error{};
    std::size_t intervals = 0;
    bool converged = false;
};

namespace detail {

// Abscissae and weights of the 15-point Kronrod extension of the 7-point
// Gauss rule, nonnegative half (QUADPACK ordering, centre last).
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename Scalar>
struct Panel {
    Scalar a, b, value, error;
    bool operator<(const Panel& other) const { return error < other.error; }
};

template <typename Scalar, typename F>
Panel<Scalar> gauss_kronrod15(F& f, Scalar a, Scalar b) {
    using std::abs;
    const Scalar centre = (a + b) / 2;
    const Scalar half = (b - a) / 2;
    const Scalar fc = f(centre);
    Scalar kronrod = fc * Scalar(kKronrodWeights[7]);
    Scalar gauss = fc * Scalar(kGaussWeights[3]);
    for (int j = 0; j < 7; ++j) {
        const Scalar dx = half * Scalar(kKronrodNodes[j]);
        const Scalar sum = f(centre - dx) + f(centre + dx);
        kronrod += Scalar(kKronrodWeights[j]) * sum;
        if (j % 2 == 1)
            gauss += Scalar(kGaussWeights[j / 2]) * sum;
    }
    return {a, b, kronrod * half, abs((kronrod - gauss) * half)};
}

} // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) quadrature of f over [a, b].
/// Bisects the panel with the largest error estimate until the total
/// estimate is below max(abs_tol, rel_tol * |I|) or max_intervals is hit.
template <typename Scalar, typename F>
QuadratureResult<Scalar> integrate_adaptive(F&& f, Scalar a, Scalar b, Scalar abs_tol = Scalar(1e-12),
                                            Scalar rel_tol = Scalar(1e-10), std::size_t max_intervals = 2000) {
    using std::abs;
    using std::max;
    QuadratureResult<Scalar> result;
    if (a == b)
        return {Scalar(0), Scalar(0), 0, true};

    std::priority_queue<detail::Panel<Scalar>> panels;
    auto first = detail::gauss_kronrod15(f, a, b);
    Scalar total = first.value;
    Scalar error = first.error;
    panels.push(first);

    while (error > max(abs_tol, rel_tol * abs(total)) && panels.size() < max_intervals) {
        const auto worst = panels.top();
        panels.pop();
        const Scalar mid = (worst.a + worst.b) / 2;
        const auto left = detail::gauss_kronrod15(f, worst.a, mid);
        const auto right = detail::gauss_kronrod15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        panels.push(left);
        panels.push(right);
    }

    // Re-sum to shed the drift of the running updates.
    result.intervals = panels.size();
    total = Scalar(0);
    error = Scalar(0);
    while (!panels.empty()) {
        total += panels.top().value;
        error += panels.top().error;
        panels.pop();
    }
    result.value = total;
    result.error = error;
    result.converged = error <= max(abs_tol, rel_tol * abs(total));
    return result;
}

/// Fixed 8-point Gauss-Legendre rule on [a, b].
template <typename Scalar, typename F>
Scalar gauss_legendre8(F&& f, Scalar a, Scalar b) {
    static constexpr std::array<double, 4> nodes = {0.183434642495649804939476142360184,
                                                    0.525532409916328985817739049189246,
                                                    0.796666477413626739591553936475830,
                                                    0.960289856497536231683560868569473};
    static constexpr std::array<double, 4> weights = {0.362683783378361982965150449277196,
                                                      0.313706645877887287337962201986601,
                                                      0.222381034453374470544355994426241,
                                                      0.101228536290376259152531354309962};
    const Scalar centre = (a + b) / 2;
    const Scalar half = (b - a) / 2;
    Scalar sum(0);
    for (std::size_t j = 0; j < nodes.size(); ++j) {
        const Scalar dx = half * Scalar(nodes[j]);
        sum += Scalar(weights[j]) * (f(centre - dx) + f(centre + dx));
    }
    return sum * half;
}

} // namespace divhjb

#endif // DIVHJB_QUADRATURE_HPP
