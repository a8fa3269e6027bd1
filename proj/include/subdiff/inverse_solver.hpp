#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "subdiff/forward_solver.hpp"
#include "subdiff/kernel.hpp"
#include "subdiff/spectral_basis.hpp"

namespace subdiff {

/// Recover f from u(., 0) = phi and the snapshot u(., t0) = psi.
struct InverseProblem {
    BoxDomain domain{};
    double rho = 1.0;
    SpectralCoeffs phi;
    SpectralCoeffs psi;
    TimeProfile g;
    double t0 = 1.0;
    double horizon = 1.0;
    /// f_k on null modes; unspecified null modes take 0.
    std::map<ModeIndex, double> free_values;
    double rel_threshold = 1e-9;   ///< null-mode classification
    double solvability_tol = 1e-7; ///< r_k <= tol (1 + |phi_k|) + kernel error
    double free_decay_tau = -1.0;  ///< < 0 selects dim / 2 + 1 / 2
    DuhamelOptions kernel{};

    void validate() const;
    int count() const { return phi.count(); }
};

enum class Verdict { Unique, NonUniqueFamily, NoSolution };

std::string to_string(Verdict v);

struct NullModeCheck {
    std::size_t position = 0;
    ModeIndex mode{};
    double residual = 0.0;  ///< |psi_k - phi_k E_rho(-lambda_k t0^rho)|
    double tolerance = 0.0;
    bool pass = false;
};

struct SolvabilityReport {
    std::vector<NullModeCheck> checks;
    std::vector<std::size_t> violations;  ///< positions with residual > tolerance
    Verdict verdict = Verdict::Unique;
};

/// Free modes of the non-unique family with the values used and the decay
/// proxy for sum lambda_k^tau |f_k|^2 < infinity over them.
struct FamilyDescription {
    std::vector<std::size_t> positions;
    std::vector<ModeIndex> modes;
    std::vector<double> values;
    std::optional<DecayReport> decay;
};

struct InverseResult {
    SpectralCoeffs f;
    ModeClassification classification;
    SolvabilityReport report;
    FamilyDescription family;
    std::vector<double> amplification;       ///< 1 / (lambda_k |b_k(t0)|) on regular modes, 0 on null modes
    std::vector<std::size_t> near_singular;  ///< regular modes with |b_k| < 10 x threshold
    std::vector<std::string> warnings;
    double snapshot_error = 0.0;             ///< max_k |u_k(t0) - psi_k|
    std::optional<ForwardSolution> u;

    GridFunction f_grid(std::array<int, 2> nodes) const { return synthesize(f, nodes); }
};

/// Classification and solvability without throwing.
struct Assessment {
    ModeClassification classification;
    SolvabilityReport report;
};

Assessment assess(const InverseProblem& problem);

/// f_k = (psi_k - phi_k E_rho(-lambda_k t0^rho)) / b_k(t0) on regular modes, the free value on null modes.
/// Throws NoSolutionError listing the violating null modes, PreconditionError
/// for free values on modes that are not null.
InverseResult recover(const InverseProblem& problem);

struct UniquenessCertificate {
    std::vector<double> margins;  ///< lambda_k |b_k(t0)|
    std::vector<std::size_t> null_modes;
    bool unique = false;
    bool sign_definite = false;  ///< g has no zero on [0, horizon]
    std::string statement;
};

UniquenessCertificate uniqueness_certificate(const InverseProblem& problem);

struct RoundtripReport {
    double rel_l2_error = 0.0;  ///< ||f_rec - f_true|| / ||f_true|| (absolute when f_true = 0)
    double max_error = 0.0;     ///< max over grid nodes of |f_rec - f_true|
    Verdict verdict = Verdict::Unique;
    SpectralCoeffs f_recovered;
};

/// Forward solve to t0 (the horizon), then recover.
RoundtripReport roundtrip(const SpectralCoeffs& phi, const SpectralCoeffs& f_true, const TimeProfile& g, double rho,
                          double t0, const DuhamelOptions& kernel = {});

}  // namespace subdiff
