#pragma once

#include <array>
#include <numbers>
#include <span>
#include <vector>

#include "subdiff/forward_solver.hpp"
#include "subdiff/spectral_basis.hpp"
#include "subdiff/time_profile.hpp"

// Verification machinery. Nothing in here is used by the solvers.
namespace subdiff::oracle {

/// L1 approximation of the Caputo derivative of samples h(m * step), m = 0..N:
///   D h(t_n) ~ step^{-rho} / Gamma(2 - rho) sum_{j<n} ((j+1)^{1-rho} - j^{1-rho}) (h_{n-j} - h_{n-j-1}).
/// Entry 0 is 0. rho = 1 uses second-order central differences (one-sided at the ends).
/// Throws PreconditionError for fewer than 3 samples or rho outside (0, 1].
std::vector<double> caputo_l1(std::span<const double> samples, double step, double rho);

/// Second-order central Laplacian with zero boundary values.
/// Throws PreconditionError for fewer than 3 interior nodes on an axis.
GridFunction laplacian_fd(const GridFunction& h);

struct ResidualOptions {
    int time_steps = 2048;            ///< uniform steps on [0, T]
    std::array<int, 2> nodes{0, 0};   ///< 0 selects default_nodes()
    double window_start = -1.0;       ///< < 0 selects T / 10
    double window_end = -1.0;         ///< < 0 selects T
};

struct ResidualReport {
    double max_residual = 0.0;
    double l2_residual = 0.0;  ///< sqrt of the space-time mean of squared residuals
    std::size_t space_nodes = 0;
    std::size_t time_nodes = 0;
    double window_start = 0.0;
    double window_end = 0.0;
    int time_steps = 0;
};

/// Residual of D_t^rho u - Laplace u - f g over interior grid nodes and the
/// time nodes inside the window, using caputo_l1 and laplacian_fd.
ResidualReport residual_check(const ForwardSolution& u, const ResidualOptions& opts = {});

/// Same check for an explicitly given spectral trajectory u_k(m * step).
ResidualReport residual_check(const std::vector<SpectralCoeffs>& trajectory, double step, double rho,
                              const SpectralCoeffs& f, const TimeProfile& g, const ResidualOptions& opts = {});

/// b(t) = int_0^t eta^{rho-1} E_{rho,rho}(-lambda eta^rho) g(t - eta) d eta by adaptive
/// Gauss-Kronrod on dyadically graded panels towards eta = 0. Absolute error <= tol.
/// Throws AccuracyError if a panel does not converge, PreconditionError for tol <= 0.
double brute_duhamel(const TimeProfile& g, double rho, double lambda, double t, double tol);

/// The sign-changing source with a non-trivial solution that vanishes at t0 = 1.
struct Example1Scenario {
    double rho = 0.5;
    double b = 0.1;
    BoxDomain domain{};
    ModeIndex mode{};
    double lambda = 1.0;
    TimeProfile g;
    double g_start = 0.0;  ///< g(0)
    double g_end = 0.0;    ///< g(1)

    /// T(t) = t^rho (1 - t^b)
    double time_factor(double t) const;

    /// (u, f) = (0, 0) and (T(t) v, v), as forward problems with phi = 0.
    ForwardProblem trivial(int count) const;
    ForwardProblem nontrivial(int count) const;
};

/// Throws PreconditionError unless rho in (0, 1) and b > 0.
Example1Scenario example1_scenario(double rho, double b, const ModeIndex& mode = ModeIndex::of(1),
                                   const BoxDomain& domain = BoxDomain::interval(std::numbers::pi));

}  // namespace subdiff::oracle
