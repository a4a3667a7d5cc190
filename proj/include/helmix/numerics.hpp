#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace helmix {

inline double fd_step(double at) {
    return std::cbrt(std::numeric_limits<double>::epsilon()) * std::max(1.0, std::abs(at));
}

inline double fd_step_second(double at) {
    return std::pow(std::numeric_limits<double>::epsilon(), 0.25) * std::max(1.0, std::abs(at));
}

inline double magnitude(double v) { return std::abs(v); }

struct QuadratureOptions {
    double abs_tol = 1e-12;
    double rel_tol = 1e-12;
    int max_intervals = 4000;
};

namespace detail {

// 7-point Gauss / 15-point Kronrod pair on [-1, 1].
inline constexpr std::array<double, 8> kronrod_nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kronrod_weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> gauss_weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class V>
struct Segment {
    double a, b;
    V value;
    double error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

template <class V, class F>
Segment<V> kronrod_segment(F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const V fc = f(c);
    V k = fc * kronrod_weights[7];
    V g = fc * gauss_weights[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kronrod_nodes[j];
        const V s = f(c - dx) + f(c + dx);
        k = k + s * kronrod_weights[j];
        if (j % 2 == 1) g = g + s * gauss_weights[j / 2];
    }
    k = k * h;
    g = g * h;
    const double err = magnitude(k - g);
    return Segment<V>{a, b, k, err};
}

}  // namespace detail

// Adaptive Gauss-Kronrod integration of a scalar- or aggregate-valued function.
// V must support V + V, V - V, V * double and an overload magnitude(const V&).
// Breakpoints inside (a, b) start the partition, which matters for kinked integrands.
template <class V, class F>
V integrate_adaptive(F f, double a, double b, const QuadratureOptions& opt = {},
                     const std::vector<double>& breakpoints = {}) {
    std::vector<double> cuts{a};
    const double lo = std::min(a, b), hi = std::max(a, b);
    for (double x : breakpoints)
        if (x > lo && x < hi) cuts.push_back(x);
    cuts.push_back(b);
    if (b < a)
        std::sort(cuts.begin() + 1, cuts.end() - 1, std::greater<double>());
    else
        std::sort(cuts.begin() + 1, cuts.end() - 1);

    std::priority_queue<detail::Segment<V>> heap;
    V total{};
    double total_err = 0.0;
    bool first = true;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        auto seg = detail::kronrod_segment<V>(f, cuts[i], cuts[i + 1]);
        total = first ? seg.value : total + seg.value;
        first = false;
        total_err += seg.error;
        heap.push(std::move(seg));
    }
    int intervals = static_cast<int>(heap.size());
    while (total_err > std::max(opt.abs_tol, opt.rel_tol * magnitude(total)) &&
           intervals < opt.max_intervals) {
        auto worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid == worst.a || mid == worst.b) {
            heap.push(worst);
            break;
        }
        auto left = detail::kronrod_segment<V>(f, worst.a, mid);
        auto right = detail::kronrod_segment<V>(f, mid, worst.b);
        total = total - worst.value + left.value + right.value;
        total_err += left.error + right.error - worst.error;
        heap.push(std::move(left));
        heap.push(std::move(right));
        ++intervals;
    }
    // Re-sum from the partition so that cancellation from the incremental updates does not linger.
    V sum{};
    bool init = true;
    while (!heap.empty()) {
        sum = init ? heap.top().value : sum + heap.top().value;
        init = false;
        heap.pop();
    }
    return sum;
}

}  // namespace helmix
