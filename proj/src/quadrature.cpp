#include "subdiff/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace subdiff::quad {

namespace {

// Abscissae and weights of the 21-point Kronrod rule and the embedded 10-point
// Gauss rule (QUADPACK dqk21).
constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Segment {
    double a, b;
    Result r;
    bool operator<(const Segment& o) const { return r.error < o.r.error; }
};

}  // namespace

Result kronrod21(const std::function<double(double)>& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double resg = 0.0;
    double resk = kWgk[10] * fc;
    for (int j = 0; j < 10; ++j) {
        const double dx = half * kXgk[j];
        const double fsum = f(center - dx) + f(center + dx);
        resk += kWgk[j] * fsum;
        // Gauss nodes are the odd-indexed Kronrod nodes.
        if (j % 2 == 1) resg += kWg[j / 2] * fsum;
    }
    Result r;
    r.value = resk * half;
    r.error = std::abs((resk - resg) * half);
    r.intervals = 1;
    r.converged = std::isfinite(r.value);
    return r;
}

Result integrate(const std::function<double(double)>& f, double a, double b,
                 const Options& opts) {
    if (a == b) return Result{0.0, 0.0, 0, true};
    std::priority_queue<Segment> heap;
    Result first = kronrod21(f, a, b);
    double total = first.value;
    double err = first.error;
    heap.push({a, b, first});
    int count = 1;
    constexpr double eps = std::numeric_limits<double>::epsilon();
    while (err > std::max(opts.abs_tol, opts.rel_tol * std::abs(total)) &&
           count < opts.max_intervals) {
        Segment worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (std::abs(worst.b - worst.a) <= 64 * eps * std::max(std::abs(worst.a), std::abs(worst.b)))
            break;  // cannot bisect further
        heap.pop();
        Result left = kronrod21(f, worst.a, mid);
        Result right = kronrod21(f, mid, worst.b);
        total += left.value + right.value - worst.r.value;
        err += left.error + right.error - worst.r.error;
        heap.push({worst.a, mid, left});
        heap.push({mid, worst.b, right});
        ++count;
    }
    // Re-sum to shed the drift of the running updates.
    total = 0.0;
    err = 0.0;
    while (!heap.empty()) {
        total += heap.top().r.value;
        err += heap.top().r.error;
        heap.pop();
    }
    Result out;
    out.value = total;
    out.error = err;
    out.intervals = count;
    out.converged = std::isfinite(total) &&
                    err <= std::max(opts.abs_tol, opts.rel_tol * std::abs(total));
    return out;
}

}  // namespace subdiff::quad
