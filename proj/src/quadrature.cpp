#include "logdiff/quadrature.hpp"

#include "logdiff/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

namespace logdiff::quadrature {

namespace {

// Kronrod abscissae on [0,1); odd indices are the 10-point Gauss nodes.
constexpr std::array<double, 11> kKronrodNodes = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};

constexpr std::array<double, 11> kKronrodWeights = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

constexpr std::array<double, 5> kGaussWeights = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Panel {
    double a;
    double b;
    double value;
    double error;

    bool operator<(const Panel& other) const { return error < other.error; }
};

Panel rule21(const std::function<double(double)>& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = fc * kKronrodWeights[10];
    double gauss = 0.0;
    for (std::size_t j = 0; j < 10; ++j) {
        const double dx = half * kKronrodNodes[j];
        const double sum = f(center - dx) + f(center + dx);
        kronrod += kKronrodWeights[j] * sum;
        if (j % 2 == 1) {
            gauss += kGaussWeights[j / 2] * sum;
        }
    }
    kronrod *= half;
    gauss *= half;
    return Panel{a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace

Result gauss_kronrod(const std::function<double(double)>& f, double a, double b,
                     const Options& options) {
    Result result;
    if (a == b) {
        result.converged = true;
        return result;
    }
    if (!(std::isfinite(a) && std::isfinite(b))) {
        throw DomainError("gauss_kronrod: integration limits must be finite");
    }
    const double sign = b > a ? 1.0 : -1.0;
    const double lo = std::min(a, b);
    const double hi = std::max(a, b);

    std::priority_queue<Panel> panels;
    Panel first = rule21(f, lo, hi);
    result.evaluations = 21;
    double total = first.value;
    double error = first.error;
    panels.push(first);

    auto tolerance = [&] { return std::max(options.abs_tol, options.rel_tol * std::abs(total)); };

    while (error > tolerance() && panels.size() < options.max_intervals) {
        const Panel worst = panels.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            break;  // interval can no longer be split in double precision
        }
        panels.pop();
        const Panel left = rule21(f, worst.a, mid);
        const Panel right = rule21(f, mid, worst.b);
        result.evaluations += 42;
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        panels.push(left);
        panels.push(right);
    }

    // Re-sum from the panels to shed the drift of the running updates.
    total = 0.0;
    error = 0.0;
    result.intervals = panels.size();
    while (!panels.empty()) {
        total += panels.top().value;
        error += panels.top().error;
        panels.pop();
    }
    result.value = sign * total;
    result.error = error;
    result.converged = std::isfinite(total) && error <= tolerance();
    return result;
}

double interpolate(std::span<const double> x, std::span<const double> y, double at) {
    if (x.size() != y.size() || x.size() < 2) {
        throw SizeError("interpolate: need at least two matching nodes");
    }
    if (at < x.front() || at > x.back()) {
        throw DomainError("interpolate: point outside the node range");
    }
    auto it = std::upper_bound(x.begin(), x.end(), at);
    std::size_t i = it == x.end() ? x.size() - 1 : static_cast<std::size_t>(it - x.begin());
    i = std::max<std::size_t>(i, 1);
    const double w = (at - x[i - 1]) / (x[i] - x[i - 1]);
    return (1.0 - w) * y[i - 1] + w * y[i];
}

double trapezoid(std::span<const double> x, std::span<const double> y, double lo, double hi) {
    if (x.size() != y.size() || x.size() < 2) {
        throw SizeError("trapezoid: need at least two matching nodes");
    }
    if (lo > hi || lo < x.front() || hi > x.back()) {
        throw DomainError("trapezoid: interval outside the node range");
    }
    if (lo == hi) {
        return 0.0;
    }
    // First node strictly inside (lo, hi) and last node strictly inside.
    const auto first = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), lo) - x.begin());
    const auto past = static_cast<std::size_t>(std::lower_bound(x.begin(), x.end(), hi) - x.begin());

    const double y_lo = interpolate(x, y, lo);
    const double y_hi = interpolate(x, y, hi);
    if (first >= past) {
        return 0.5 * (hi - lo) * (y_lo + y_hi);
    }
    double sum = 0.5 * (x[first] - lo) * (y_lo + y[first]);
    for (std::size_t i = first + 1; i < past; ++i) {
        sum += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
    }
    sum += 0.5 * (hi - x[past - 1]) * (y[past - 1] + y_hi);
    return sum;
}

}  // namespace logdiff::quadrature
