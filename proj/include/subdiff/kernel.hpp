#pragma once

#include <span>
#include <string>
#include <vector>

#include "subdiff/time_profile.hpp"

namespace subdiff {

enum class DuhamelMethod { ClosedForm, ProductIntegration };

std::string to_string(DuhamelMethod m);

/// One Duhamel coefficient b(t) = int_0^t eta^{rho-1} E_{rho,rho}(-lambda eta^rho) g(t - eta) d eta.
struct DuhamelValue {
    double value = 0.0;
    double error = 0.0;  ///< estimated absolute error, >= 0
    DuhamelMethod method = DuhamelMethod::ClosedForm;
};

struct DuhamelOptions {
    int cells = 1024;  ///< product-integration mesh on [0, t]
};

/// Duhamel coefficients for every retained mode at a single time.
struct DuhamelKernel {
    double t = 0.0;
    double rho = 1.0;
    std::vector<double> values;
    std::vector<double> errors;
    DuhamelMethod method = DuhamelMethod::ClosedForm;
};

/// b_{k,rho}(t) for one mode.
///
/// Profiles with a power form sum_j a_j t^{beta_j} (constants, polynomials,
/// the example1 profile) use
///   b(t) = sum_j a_j Gamma(beta_j + 1) t^{beta_j + rho} E_{rho, rho + beta_j + 1}(-lambda t^rho),
/// which for g = c reduces to c t^rho E_{rho,rho+1}(-lambda t^rho). Sampled
/// profiles go through duhamel_product().
///
/// Throws DomainError for t <= 0 or lambda <= 0, CoverageError if samples do not cover [0, t].
DuhamelValue duhamel(const TimeProfile& g, double rho, double lambda, double t,
                     const DuhamelOptions& opts = {});

/// Product integration: g(t - eta) piecewise linear on a uniform mesh of `cells`
/// cells, integrated exactly against the kernel via its antiderivatives
///   A(eta) = eta^rho E_{rho,rho+1}(-lambda eta^rho),  B(eta) = eta^{rho+1} E_{rho,rho+2}(-lambda eta^rho).
/// The error estimate is |b_n - b_{n/2}| plus a rounding floor.
DuhamelValue duhamel_product(const TimeProfile& g, double rho, double lambda, double t, int cells);

/// All modes at one time; parallel over modes when OpenMP is enabled.
DuhamelKernel duhamel_modes(const TimeProfile& g, double rho, std::span<const double> eigenvalues, double t,
                            const DuhamelOptions& opts = {});

/// b(t_m) at t_m = m * step, m = 0..steps, for one mode. Power-form profiles are
/// evaluated in closed form at each t_m; sampled profiles reuse one set of
/// product-integration weights on the common mesh.
std::vector<DuhamelValue> duhamel_trajectory(const TimeProfile& g, double rho, double lambda, double step,
                                             int steps);

/// Partition of retained modes into invertible and null modes at t0.
struct ModeClassification {
    double t0 = 0.0;
    double rel_threshold = 1e-9;
    std::vector<std::size_t> regular_modes;  ///< positions with b(t0) != 0
    std::vector<std::size_t> null_modes;     ///< positions with b(t0) == 0 (to threshold)
    std::vector<double> thresholds;          ///< per position
    DuhamelKernel kernel;                    ///< b(t0) for every position

    bool is_null(std::size_t position) const;
};

/// Mode k is null iff |b_k(t0)| < rel_threshold * t0^rho / (1 + lambda_k t0^rho) + error_k.
ModeClassification classify(const TimeProfile& g, double rho, std::span<const double> eigenvalues, double t0,
                            double rel_threshold = 1e-9, const DuhamelOptions& opts = {});

enum class BoundHypothesis {
    SignDefinite,      ///< g has no zero on [0, t0]
    HeatWithNonzeroEnd,  ///< rho = 1, g in C^1, g(t0) != 0
    SmallTimeNonzeroStart,  ///< rho < 1, g in C^1, g(0) != 0 (t0 small)
    None,
};

std::string to_string(BoundHypothesis h);

/// Two-sided bound report on m_k = lambda_k |b_k(t0)| over regular modes.
struct BoundReport {
    BoundHypothesis hypothesis = BoundHypothesis::None;
    bool applicable = false;
    std::string notice;
    std::vector<double> margins;          ///< m_k for every position
    double lower = 0.0;                   ///< min over regular modes
    double upper = 0.0;                   ///< max over regular modes
    double ratio = 0.0;                   ///< upper / lower
    std::vector<std::size_t> violations;  ///< regular modes with m_k < violation_floor * upper
    bool holds = false;                   ///< applicable, no violations, finite ratio
};

BoundReport bound_check(const TimeProfile& g, double rho, std::span<const double> eigenvalues, double t0,
                        double violation_floor = 1e-8, const DuhamelOptions& opts = {});

}  // namespace subdiff
