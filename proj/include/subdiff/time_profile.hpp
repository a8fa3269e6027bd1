#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace subdiff {

/// g(t) = c.
struct ConstantProfile {
    double value = 1.0;
};

/// The sign-changing source of the non-uniqueness example: g = D^rho T + lambda T
/// with T(t) = t^rho (1 - t^b), evaluated in closed form as
///   Gamma(rho+1) - Gamma(b+rho+1)/Gamma(b+1) t^b + lambda t^rho (1 - t^b).
struct Example1Profile {
    double rho = 0.5;
    double b = 0.1;
    double lambda = 1.0;

    /// T(t) = t^rho (1 - t^b), the time factor of the non-trivial solution.
    double time_factor(double t) const;
};

/// g(t) = sum_j coeffs[j] t^j.
struct PolynomialProfile {
    std::vector<double> coeffs;
};

/// Samples on strictly increasing times, monotone cubic (Fritsch-Carlson) in between.
struct SampledProfile {
    std::vector<double> times;
    std::vector<double> values;
};

/// The time factor g(t) of the source f(x) g(t).
class TimeProfile {
public:
    using Variant = std::variant<ConstantProfile, Example1Profile, PolynomialProfile, SampledProfile>;

    TimeProfile() : v_(ConstantProfile{1.0}) {}
    TimeProfile(Variant v);  // NOLINT: implicit from any alternative

    static TimeProfile constant(double c) { return TimeProfile(ConstantProfile{c}); }
    static TimeProfile example1(double rho, double b, double lambda) {
        return TimeProfile(Example1Profile{rho, b, lambda});
    }
    static TimeProfile polynomial(std::vector<double> coeffs) {
        return TimeProfile(PolynomialProfile{std::move(coeffs)});
    }
    static TimeProfile sampled(std::vector<double> times, std::vector<double> values);

    const Variant& variant() const { return v_; }
    std::string kind() const;

    double operator()(double t) const;

    /// Whether g is continuously differentiable on [0, T] (as a representation property).
    bool is_c1() const;

    /// Whether g has no zero on [0, horizon]. Exact for constants and samples;
    /// otherwise decided on a dense grid of 4097 points.
    bool sign_definite(double horizon) const;

    /// Representation as sum_j coef_j t^{power_j}, when one exists.
    /// Constants, polynomials and the example1 profile qualify.
    std::vector<std::pair<double, double>> power_terms() const;
    bool has_power_form() const { return !std::holds_alternative<SampledProfile>(v_); }

    /// Throws CoverageError if a sampled profile does not cover [0, t].
    void check_coverage(double t) const;

private:
    void validate() const;

    Variant v_;
    std::vector<double> slopes_;  // sampled profiles only
};

}  // namespace subdiff
