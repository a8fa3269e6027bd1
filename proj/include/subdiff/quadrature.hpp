#pragma once

#include <functional>

namespace subdiff::quad {

struct Result {
    double value = 0.0;
    double error = 0.0;   // estimated absolute error
    int intervals = 0;
    bool converged = false;
};

struct Options {
    double abs_tol = 1e-14;
    double rel_tol = 1e-14;
    int max_intervals = 2000;
};

/// Adaptive Gauss-Kronrod (G10/K21) integration of f over [a, b].
///
/// Global bisection of the interval with the largest Kronrod error estimate
/// until the summed estimate is below max(abs_tol, rel_tol * |value|).
/// Never throws; inspect `converged`.
Result integrate(const std::function<double(double)>& f, double a, double b,
                 const Options& opts = {});

/// Single 21-point Kronrod rule on [a, b] with the embedded 10-point Gauss
/// difference as error estimate.
Result kronrod21(const std::function<double(double)>& f, double a, double b);

}  // namespace subdiff::quad
