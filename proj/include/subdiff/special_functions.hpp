#pragma once

namespace subdiff {

/// Parameters of the two-parameter Mittag-Leffler function E_{rho,mu}.
struct MLParams {
    double rho = 1.0;  ///< order, in (0, 1]
    double mu = 1.0;   ///< second parameter, > 0

    /// Throws DomainError unless rho in (0,1] and mu > 0.
    void validate() const;
};

/// Gamma function for x > 0 (Lanczos, g = 7, nine coefficients).
/// Integer arguments up to 171 are returned exactly as factorials.
double gamma(double x);

/// 1/Gamma(x) for any real x; zero at the poles x = 0, -1, -2, ...
double rgamma(double x);

/// Beta function B(a, b) = Gamma(a) Gamma(b) / Gamma(a + b), a, b > 0.
double beta(double a, double b);

/// Two-parameter Mittag-Leffler function E_{rho,mu}(z) for real z <= 0.
///
/// Branches by |z|:
///   - power series summed in extended precision with compensation near 0,
///   - a real-axis inverse-Laplace integral in the intermediate range,
///   - the large-argument expansion -sum_k z^{-k} / Gamma(mu - rho k)
///     once its terms have dropped below double rounding.
/// rho = 1 is evaluated through exp and the mu-recursion.
/// Throws DomainError for z > 0, non-finite z, or invalid params.
double ml(const MLParams& params, double z);

/// Classical Mittag-Leffler function E_rho(z) = E_{rho,1}(z), z <= 0.
double ml_one(double rho, double z);

namespace detail {

enum class MLBranch { Origin, Series, Integral, Asymptotic, Exponential };

/// Branch that ml() would take for E_{rho,mu}(-x); for tests and diagnostics.
MLBranch ml_branch(const MLParams& params, double x);

/// Individual branches, exposed so tests can compare them in overlap regions.
double ml_series(double rho, double mu, double x);
double ml_integral(double rho, double mu, double x);
/// Returns NaN when the expansion has not converged to double precision at x.
double ml_asymptotic(double rho, double mu, double x);

}  // namespace detail

}  // namespace subdiff
