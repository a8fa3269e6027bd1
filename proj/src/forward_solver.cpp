#include "subdiff/forward_solver.hpp"

#include <cmath>
#include <sstream>

#include "subdiff/errors.hpp"
#include "subdiff/special_functions.hpp"

namespace subdiff {

namespace {

std::vector<std::size_t> nonzero_modes(const SpectralCoeffs& c) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < c.size(); ++i)
        if (c[i] != 0.0) out.push_back(i);
    return out;
}

void check_rho(double rho) {
    if (!(rho > 0.0 && rho <= 1.0)) throw DomainError("forward: rho must lie in (0, 1]");
}

}  // namespace

void ForwardProblem::validate() const {
    domain.validate();
    check_rho(rho);
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw PreconditionError("forward: horizon must be positive");
    if (phi.count() <= 0) throw PreconditionError("forward: mode count must be positive");
    if (!(phi.domain() == domain) || !(f.domain() == domain))
        throw PreconditionError("forward: phi and f must live on the problem domain");
    if (phi.count() != f.count()) throw PreconditionError("forward: phi and f must retain the same modes");
    g.check_coverage(horizon);
}

SpectralCoeffs homogeneous_coeffs(const SpectralCoeffs& phi, double rho, double t) {
    check_rho(rho);
    if (t < 0.0) throw DomainError("forward: t must be non-negative");
    SpectralCoeffs out(phi.domain(), phi.count());
    const double tr = std::pow(t, rho);
    for (std::size_t i : nonzero_modes(phi)) out[i] = phi[i] * ml_one(rho, -phi.eigenvalues()[i] * tr);
    return out;
}

SpectralCoeffs inhomogeneous_coeffs(const SpectralCoeffs& f, const TimeProfile& g, double rho, double t,
                                    const DuhamelOptions& opts) {
    check_rho(rho);
    if (t < 0.0) throw DomainError("forward: t must be non-negative");
    SpectralCoeffs out(f.domain(), f.count());
    if (t == 0.0) return out;
    const auto modes = nonzero_modes(f);
    std::vector<double> eigs;
    for (std::size_t i : modes) eigs.push_back(f.eigenvalues()[i]);
    const auto b = duhamel_modes(g, rho, eigs, t, opts);
    for (std::size_t j = 0; j < modes.size(); ++j) out[modes[j]] = f[modes[j]] * b.values[j];
    return out;
}

GridFunction solve_homogeneous(const SpectralCoeffs& phi, double rho, double t, std::array<int, 2> nodes) {
    return synthesize(homogeneous_coeffs(phi, rho, t), nodes);
}

GridFunction solve_inhomogeneous(const SpectralCoeffs& f, const TimeProfile& g, double rho, double t,
                                 std::array<int, 2> nodes, const DuhamelOptions& opts) {
    return synthesize(inhomogeneous_coeffs(f, g, rho, t, opts), nodes);
}

ForwardSolution::ForwardSolution(ForwardProblem problem)
    : problem_(std::move(problem)), cache_(std::make_shared<Cache>()) {
    problem_.validate();
}

void ForwardSolution::check_time(double t) const {
    if (!(t >= 0.0 && t <= problem_.horizon)) {
        std::ostringstream os;
        os << "forward: t = " << t << " outside [0, " << problem_.horizon << "]";
        throw DomainError(os.str());
    }
}

SpectralCoeffs ForwardSolution::coefficients(double t) const {
    check_time(t);
    {
        std::lock_guard lock(cache_->mutex);
        if (auto it = cache_->snapshots.find(t); it != cache_->snapshots.end()) return it->second;
    }
    auto u = homogeneous_coeffs(problem_.phi, problem_.rho, t);
    const auto w = inhomogeneous_coeffs(problem_.f, problem_.g, problem_.rho, t, problem_.kernel);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] += w[i];
    std::lock_guard lock(cache_->mutex);
    return cache_->snapshots.emplace(t, std::move(u)).first->second;
}

GridFunction ForwardSolution::at(double t, std::array<int, 2> nodes) const {
    return synthesize(coefficients(t), nodes);
}

std::vector<SpectralCoeffs> ForwardSolution::trajectory(double step, int steps) const {
    if (!(step > 0.0) || steps < 1) throw PreconditionError("forward: trajectory needs step > 0 and steps >= 1");
    check_time(step * steps * (1.0 - 1e-12));
    const auto& p = problem_;
    std::vector<SpectralCoeffs> out(steps + 1, SpectralCoeffs(p.domain, p.count()));
    for (std::size_t i : nonzero_modes(p.phi)) {
        const double lambda = p.phi.eigenvalues()[i];
        for (int m = 0; m <= steps; ++m)
            out[m][i] = p.phi[i] * ml_one(p.rho, -lambda * std::pow(m * step, p.rho));
    }
    const auto modes = nonzero_modes(p.f);
    const auto n = static_cast<long>(modes.size());
    std::string failure;
#pragma omp parallel for schedule(dynamic)
    for (long j = 0; j < n; ++j) {
        const std::size_t i = modes[j];
        try {
            const auto b = duhamel_trajectory(p.g, p.rho, p.f.eigenvalues()[i], step, steps);
            for (int m = 0; m <= steps; ++m) out[m][i] += p.f[i] * b[m].value;
        } catch (const std::exception& e) {
#pragma omp critical
            failure = e.what();
        }
    }
    if (!failure.empty()) throw AccuracyError(failure);
    return out;
}

double ForwardSolution::tail_indicator() const {
    const std::size_t last = problem_.phi.size() - 1;
    return (std::abs(problem_.phi[last]) + std::abs(problem_.f[last])) / problem_.phi.eigenvalues()[last];
}

ForwardSolution solve(const ForwardProblem& problem) { return ForwardSolution(problem); }

}  // namespace subdiff
