#include "subdiff/special_functions.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "subdiff/errors.hpp"
#include "subdiff/quadrature.hpp"

namespace subdiff {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Lanczos coefficients for g = 7, n = 9.
constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

// Series is used while |z|^{1/rho} stays below this; the cancellation factor
// E(|z|)/E(z) is then ~e^{2 * 6}, well inside long double headroom.
constexpr double kSeriesScale = 6.0;

// Asymptotic expansion is accepted when the envelope of the next term is
// below this fraction of the partial sum.
constexpr double kAsymptoticTol = 1e-17;
constexpr int kAsymptoticMaxTerms = 60;

const std::array<double, 172>& factorials() {
    static const std::array<double, 172> table = [] {
        std::array<double, 172> t{};
        t[0] = 1.0;
        for (std::size_t i = 1; i < t.size(); ++i) t[i] = t[i - 1] * static_cast<double>(i);
        return t;
    }();
    return table;
}

// sin(pi x) with argument reduction so that integers give exact zeros.
double sin_pi(double x) {
    double r = std::fmod(x, 2.0);
    if (r < 0) r += 2.0;
    if (r == 0.0 || r == 1.0) return 0.0;
    if (r > 1.0) return -std::sin(kPi * (r - 1.0));
    return std::sin(kPi * r);
}

double lanczos_gamma(double x) {
    if (x < 0.5) return kPi / (sin_pi(x) * lanczos_gamma(1.0 - x));
    const double xm = x - 1.0;
    double a = kLanczos[0];
    for (std::size_t i = 1; i < kLanczos.size(); ++i) a += kLanczos[i] / (xm + static_cast<double>(i));
    const double t = xm + kLanczosG + 0.5;
    // t^(xm+0.5) is split in two halves so that it does not overflow before Gamma does.
    const double half_pow = std::pow(t, 0.5 * (xm + 0.5));
    return std::sqrt(2.0 * kPi) * half_pow * (half_pow * std::exp(-t)) * a;
}

bool is_integer(double x) { return std::floor(x) == x; }

void check_z(double z) {
    if (!std::isfinite(z)) throw DomainError("ml: argument must be finite");
    if (z > 0.0) {
        std::ostringstream os;
        os << "ml: only z <= 0 is supported, got " << z;
        throw DomainError(os.str());
    }
}

// Envelope of |1/Gamma(y)| used to bound asymptotic terms that may vanish at poles.
double rgamma_envelope(double y) {
    if (y > 0.0) return y < 2.5 ? 1.2 : std::abs(rgamma(y));
    return gamma(1.0 - y) / kPi;
}

}  // namespace

void MLParams::validate() const {
    if (!(rho > 0.0 && rho <= 1.0)) {
        std::ostringstream os;
        os << "ml: rho must lie in (0, 1], got " << rho;
        throw DomainError(os.str());
    }
    if (!(mu > 0.0) || !std::isfinite(mu)) {
        std::ostringstream os;
        os << "ml: mu must be positive, got " << mu;
        throw DomainError(os.str());
    }
}

double gamma(double x) {
    if (!(x > 0.0)) {
        std::ostringstream os;
        os << "gamma: argument must be positive, got " << x;
        throw DomainError(os.str());
    }
    if (is_integer(x) && x <= 172.0) return factorials()[static_cast<std::size_t>(x) - 1];
    if (x > 171.7) return std::numeric_limits<double>::infinity();
    return lanczos_gamma(x);
}

double rgamma(double x) {
    if (x > 0.0) return x > 171.7 ? 0.0 : 1.0 / gamma(x);
    if (is_integer(x)) return 0.0;
    // Reflection: 1/Gamma(x) = sin(pi x) Gamma(1 - x) / pi.
    return sin_pi(x) * gamma(1.0 - x) / kPi;
}

double beta(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) {
        std::ostringstream os;
        os << "beta: arguments must be positive, got (" << a << ", " << b << ")";
        throw DomainError(os.str());
    }
    if (a + b > 171.0) {
        return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
    }
    return gamma(a) * gamma(b) / gamma(a + b);
}

namespace detail {

double ml_series(double rho, double mu, double x) {
    // sum_k (-x)^k / Gamma(rho k + mu), compensated (Neumaier) in long double.
    const long double lx = x;
    const long double lrho = rho;
    const long double lmu = mu;
    const double stop_arg = 2.0 * std::pow(x, 1.0 / rho) + 2.0;
    long double sum = 0.0L;
    long double comp = 0.0L;
    long double power = 1.0L;
    for (int k = 0; k < 100000; ++k) {
        const long double arg = lrho * k + lmu;
        const long double term = power / std::tgamma(arg);
        const long double t = sum + term;
        if (std::fabs(sum) >= std::fabs(term))
            comp += (sum - t) + term;
        else
            comp += (term - t) + sum;
        sum = t;
        if (static_cast<double>(arg) > stop_arg &&
            std::fabs(term) <= 1e-22L * std::fabs(sum + comp))
            break;
        power *= -lx;
        if (power == 0.0L) break;
    }
    return static_cast<double>(sum + comp);
}

double ml_integral(double rho, double mu, double x) {
    // Valid for 0 < rho < 1, 0 < mu < 1 + rho, x > 0: collapse of the Hankel
    // contour for E_{rho,mu}(-x) onto the negative real axis,
    //   (1/pi) int_0^inf e^{-r} r^{rho-mu} [r^rho sin(pi mu) + x sin(pi(mu-rho))]
    //          / (r^{2 rho} + 2 x r^rho cos(pi rho) + x^2) dr.
    // The substitution v = r^a, a = 1 + rho - mu, removes the endpoint singularity.
    const double a = 1.0 + rho - mu;
    const double s_mu = sin_pi(mu);
    const double s_mr = sin_pi(mu - rho);
    const double c_rho = std::cos(kPi * rho);
    const double inv_a = 1.0 / a;
    auto integrand = [&](double v) {
        if (v <= 0.0) {
            // r = 0: only the x-term survives, r^{rho} -> 0.
            return inv_a * x * s_mr / (x * x) / kPi;
        }
        const double r = std::pow(v, inv_a);
        const double rr = std::pow(r, rho);
        const double num = rr * s_mu + x * s_mr;
        const double den = rr * rr + 2.0 * x * rr * c_rho + x * x;
        return inv_a * std::exp(-r) * num / den / kPi;
    };
    const double r_peak = std::pow(x, 1.0 / rho);
    const double r_max = r_peak < 100.0 ? r_peak + 70.0 : 70.0;
    quad::Options opts;
    opts.abs_tol = 0.0;
    opts.rel_tol = 2e-15;
    opts.max_intervals = 4000;
    double total = 0.0;
    double err = 0.0;
    auto add = [&](double r0, double r1) {
        auto res = quad::integrate(integrand, std::pow(r0, a), std::pow(r1, a), opts);
        total += res.value;
        err += res.error;
    };
    if (r_peak < r_max) {
        add(0.0, 0.5 * r_peak);
        add(0.5 * r_peak, r_peak);
        add(r_peak, std::min(2.0 * r_peak, r_max));
        if (2.0 * r_peak < r_max) add(2.0 * r_peak, r_max);
    } else {
        add(0.0, r_max);
    }
    if (!(err <= 1e-12 * std::abs(total)) || !std::isfinite(total)) {
        std::ostringstream os;
        os << "ml: integral representation did not converge for rho=" << rho << " mu=" << mu
           << " x=" << x;
        throw AccuracyError(os.str());
    }
    return total;
}

double ml_asymptotic(double rho, double mu, double x) {
    // E_{rho,mu}(-x) ~ sum_{k>=1} (-1)^{k+1} x^{-k} / Gamma(mu - rho k).
    double sum = 0.0;
    double xpow = 1.0;
    const double inv_x = 1.0 / x;
    for (int k = 1; k <= kAsymptoticMaxTerms; ++k) {
        xpow *= inv_x;
        const double y = mu - rho * k;
        const double envelope = xpow * rgamma_envelope(y);
        if (k > 1 && sum != 0.0 && envelope <= kAsymptoticTol * std::abs(sum)) return sum;
        if (!std::isfinite(envelope)) return kNaN;
        const double term = xpow * rgamma(y);
        sum += (k % 2 == 1) ? term : -term;
    }
    return kNaN;
}

MLBranch ml_branch(const MLParams& p, double x) {
    if (x == 0.0) return MLBranch::Origin;
    if (p.rho == 1.0 && is_integer(p.mu) && x > kSeriesScale) return MLBranch::Exponential;
    if (std::pow(x, 1.0 / p.rho) <= kSeriesScale) return MLBranch::Series;
    if (!std::isnan(ml_asymptotic(p.rho, p.mu, x))) return MLBranch::Asymptotic;
    return MLBranch::Integral;
}

}  // namespace detail

namespace {

// E_{1,mu}(-x) for x beyond the series range.
double ml_rho_one(double mu, double x) {
    const double z = -x;
    if (is_integer(mu)) {
        // E_{1,1}(z) = e^z, E_{1,m+1}(z) = (E_{1,m}(z) - 1/Gamma(m)) / z.
        double val = std::exp(z);
        for (int m = 1; m < static_cast<int>(mu); ++m) val = (val - rgamma(m)) / z;
        return val;
    }
    const double asym = detail::ml_asymptotic(1.0, mu, x);
    if (!std::isnan(asym)) return asym + std::exp(z) * std::pow(x, 1.0 - mu);
    // Euler form E_{1,nu}(-x) = (1/Gamma(nu-1)) int_0^1 e^{-x s} (1-s)^{nu-2} ds, nu > 1,
    // with w = (1-s)^{nu-1} to remove the endpoint singularity.
    auto euler = [&](double nu) {
        const double inv = 1.0 / (nu - 1.0);
        auto f = [&](double w) { return inv * std::exp(-x * (1.0 - std::pow(w, inv))); };
        quad::Options opts;
        opts.abs_tol = 0.0;
        opts.rel_tol = 1e-15;
        auto res = quad::integrate(f, 0.0, 1.0, opts);
        return res.value * rgamma(nu - 1.0);
    };
    if (mu > 1.0) return euler(mu);
    return rgamma(mu) - x * euler(mu + 1.0);
}

}  // namespace

double ml(const MLParams& params, double z) {
    params.validate();
    check_z(z);
    const double rho = params.rho;
    const double mu = params.mu;
    const double x = -z;
    switch (detail::ml_branch(params, x)) {
        case detail::MLBranch::Origin:
            return rgamma(mu);
        case detail::MLBranch::Series:
            return detail::ml_series(rho, mu, x);
        case detail::MLBranch::Exponential:
            return ml_rho_one(mu, x);
        case detail::MLBranch::Asymptotic:
            return detail::ml_asymptotic(rho, mu, x);
        case detail::MLBranch::Integral:
            break;
    }
    if (rho == 1.0) return ml_rho_one(mu, x);
    // Shift mu down by rho until the contour integral converges at r = 0,
    // keeping clear of the boundary mu = 1 + rho; then recurse back up with
    // E_{rho,m+rho}(z) = (E_{rho,m}(z) - 1/Gamma(m)) / z.
    int steps = 0;
    double base = mu;
    while (base >= 1.0 + rho - 0.05) {
        base -= rho;
        ++steps;
    }
    double val = detail::ml_integral(rho, base, x);
    for (int i = 0; i < steps; ++i) {
        val = (val - rgamma(base)) / z;
        base += rho;
    }
    return val;
}

double ml_one(double rho, double z) { return ml(MLParams{rho, 1.0}, z); }

}  // namespace subdiff
