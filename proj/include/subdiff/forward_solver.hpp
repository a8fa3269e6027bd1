#pragma once

#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "subdiff/kernel.hpp"
#include "subdiff/spectral_basis.hpp"
#include "subdiff/time_profile.hpp"

namespace subdiff {

/// D_t^rho u - Laplace u = f(x) g(t) in the box, u = 0 on the boundary, u(., 0) = phi.
struct ForwardProblem {
    BoxDomain domain{};
    double rho = 1.0;
    SpectralCoeffs phi;  ///< initial data
    SpectralCoeffs f;    ///< spatial source factor
    TimeProfile g;
    double horizon = 1.0;
    DuhamelOptions kernel{};

    /// Throws PreconditionError / DomainError on inconsistent inputs
    /// (horizon <= 0, rho outside (0, 1], phi and f on different bases).
    void validate() const;
    int count() const { return phi.count(); }
};

/// phi_k E_rho(-lambda_k t^rho) for every mode.
SpectralCoeffs homogeneous_coeffs(const SpectralCoeffs& phi, double rho, double t);

/// f_k b_k(t) for every mode; modes with f_k = 0 are skipped.
SpectralCoeffs inhomogeneous_coeffs(const SpectralCoeffs& f, const TimeProfile& g, double rho, double t,
                                    const DuhamelOptions& opts = {});

GridFunction solve_homogeneous(const SpectralCoeffs& phi, double rho, double t, std::array<int, 2> nodes);
GridFunction solve_inhomogeneous(const SpectralCoeffs& f, const TimeProfile& g, double rho, double t,
                                 std::array<int, 2> nodes, const DuhamelOptions& opts = {});

/// Lazily evaluated series solution. Copies share the snapshot cache.
class ForwardSolution {
public:
    explicit ForwardSolution(ForwardProblem problem);

    const ForwardProblem& problem() const { return problem_; }

    /// u_k(t) for every retained mode; t in [0, horizon]. Cached by t.
    SpectralCoeffs coefficients(double t) const;

    /// u(., t) on the interior grid.
    GridFunction at(double t, std::array<int, 2> nodes) const;
    GridFunction at(double t) const { return at(t, default_nodes(problem_.domain)); }

    /// u_k(m * step) for m = 0..steps, with step * steps <= horizon.
    std::vector<SpectralCoeffs> trajectory(double step, int steps) const;

    /// lambda_K^{-1} (|phi_K| + |f_K|) at the last retained mode.
    double tail_indicator() const;

private:
    struct Cache {
        std::mutex mutex;
        std::map<double, SpectralCoeffs> snapshots;
    };

    void check_time(double t) const;

    ForwardProblem problem_;
    std::shared_ptr<Cache> cache_;
};

ForwardSolution solve(const ForwardProblem& problem);

}  // namespace subdiff
