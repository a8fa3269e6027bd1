#include "subdiff/time_profile.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "subdiff/errors.hpp"
#include "subdiff/special_functions.hpp"

namespace subdiff {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Fritsch-Carlson slopes with the shape-preserving one-sided end conditions.
std::vector<double> pchip_slopes(const std::vector<double>& t, const std::vector<double>& y) {
    const std::size_t n = t.size();
    std::vector<double> m(n, 0.0);
    std::vector<double> h(n - 1), delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = t[i + 1] - t[i];
        delta[i] = (y[i + 1] - y[i]) / h[i];
    }
    if (n == 2) {
        m[0] = m[1] = delta[0];
        return m;
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (delta[i - 1] * delta[i] <= 0.0) continue;
        const double w1 = 2.0 * h[i] + h[i - 1];
        const double w2 = h[i] + 2.0 * h[i - 1];
        m[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
    auto end_slope = [](double h0, double h1, double d0, double d1) {
        double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (std::signbit(s) != std::signbit(d0) || d0 == 0.0)
            s = 0.0;
        else if (std::signbit(d0) != std::signbit(d1) && std::abs(s) > 3.0 * std::abs(d0))
            s = 3.0 * d0;
        return s;
    };
    m[0] = end_slope(h[0], h[1], delta[0], delta[1]);
    m[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    return m;
}

}  // namespace

double Example1Profile::time_factor(double t) const {
    return std::pow(t, rho) * (1.0 - std::pow(t, b));
}

TimeProfile::TimeProfile(Variant v) : v_(std::move(v)) {
    validate();
    if (auto* s = std::get_if<SampledProfile>(&v_)) slopes_ = pchip_slopes(s->times, s->values);
}

TimeProfile TimeProfile::sampled(std::vector<double> times, std::vector<double> values) {
    return TimeProfile(SampledProfile{std::move(times), std::move(values)});
}

void TimeProfile::validate() const {
    std::visit(overloaded{
                   [](const ConstantProfile& c) {
                       if (!std::isfinite(c.value)) throw PreconditionError("profile: constant must be finite");
                   },
                   [](const Example1Profile& e) {
                       if (!(e.rho > 0.0 && e.rho <= 1.0))
                           throw PreconditionError("profile: example1 rho must lie in (0, 1]");
                       if (!(e.b > 0.0)) throw PreconditionError("profile: example1 b must be positive");
                       if (!(e.lambda > 0.0))
                           throw PreconditionError("profile: example1 lambda must be positive");
                   },
                   [](const PolynomialProfile& p) {
                       if (p.coeffs.empty()) throw PreconditionError("profile: polynomial needs coefficients");
                       for (double c : p.coeffs)
                           if (!std::isfinite(c)) throw PreconditionError("profile: non-finite coefficient");
                   },
                   [](const SampledProfile& s) {
                       if (s.times.size() < 2 || s.times.size() != s.values.size())
                           throw PreconditionError("profile: samples need >= 2 matching times and values");
                       for (std::size_t i = 0; i < s.times.size(); ++i) {
                           if (!std::isfinite(s.times[i]) || !std::isfinite(s.values[i]))
                               throw PreconditionError("profile: non-finite sample");
                           if (i > 0 && !(s.times[i] > s.times[i - 1]))
                               throw PreconditionError("profile: sample times must increase strictly");
                       }
                   },
               },
               v_);
}

std::string TimeProfile::kind() const {
    return std::visit(overloaded{
                          [](const ConstantProfile&) { return std::string("constant"); },
                          [](const Example1Profile&) { return std::string("example1"); },
                          [](const PolynomialProfile&) { return std::string("polynomial"); },
                          [](const SampledProfile&) { return std::string("samples"); },
                      },
                      v_);
}

double TimeProfile::operator()(double t) const {
    return std::visit(
        overloaded{
            [](const ConstantProfile& c) { return c.value; },
            [t](const Example1Profile& e) {
                const double tb = std::pow(t, e.b);
                const double coeff = subdiff::gamma(e.b + e.rho + 1.0) / subdiff::gamma(e.b + 1.0);
                return subdiff::gamma(e.rho + 1.0) - coeff * tb + e.lambda * std::pow(t, e.rho) * (1.0 - tb);
            },
            [t](const PolynomialProfile& p) {
                double acc = 0.0;
                for (auto it = p.coeffs.rbegin(); it != p.coeffs.rend(); ++it) acc = acc * t + *it;
                return acc;
            },
            [this, t](const SampledProfile& s) {
                const auto& ts = s.times;
                if (t <= ts.front()) return s.values.front();
                if (t >= ts.back()) return s.values.back();
                const std::size_t i =
                    static_cast<std::size_t>(std::upper_bound(ts.begin(), ts.end(), t) - ts.begin()) - 1;
                const double h = ts[i + 1] - ts[i];
                const double u = (t - ts[i]) / h;
                const double h00 = (1 + 2 * u) * (1 - u) * (1 - u);
                const double h10 = u * (1 - u) * (1 - u);
                const double h01 = u * u * (3 - 2 * u);
                const double h11 = u * u * (u - 1);
                return h00 * s.values[i] + h10 * h * slopes_[i] + h01 * s.values[i + 1] +
                       h11 * h * slopes_[i + 1];
            },
        },
        v_);
}

bool TimeProfile::is_c1() const {
    if (const auto* e = std::get_if<Example1Profile>(&v_)) return e->rho == 1.0 && e->b >= 1.0;
    return true;
}

bool TimeProfile::sign_definite(double horizon) const {
    if (const auto* c = std::get_if<ConstantProfile>(&v_)) return c->value != 0.0;
    if (const auto* s = std::get_if<SampledProfile>(&v_)) {
        // The monotone cubic stays between neighbouring samples.
        const double g0 = (*this)(0.0);
        const double gh = (*this)(horizon);
        bool pos = g0 > 0.0 && gh > 0.0;
        bool neg = g0 < 0.0 && gh < 0.0;
        for (std::size_t i = 0; i < s->times.size(); ++i) {
            if (s->times[i] < 0.0 || s->times[i] > horizon) continue;
            pos = pos && s->values[i] > 0.0;
            neg = neg && s->values[i] < 0.0;
        }
        return pos || neg;
    }
    constexpr int n = 4096;
    bool pos = true, neg = true;
    for (int i = 0; i <= n; ++i) {
        const double v = (*this)(horizon * i / n);
        pos = pos && v > 0.0;
        neg = neg && v < 0.0;
    }
    return pos || neg;
}

std::vector<std::pair<double, double>> TimeProfile::power_terms() const {
    return std::visit(
        overloaded{
            [](const ConstantProfile& c) { return std::vector<std::pair<double, double>>{{c.value, 0.0}}; },
            [](const Example1Profile& e) {
                const double coeff = subdiff::gamma(e.b + e.rho + 1.0) / subdiff::gamma(e.b + 1.0);
                return std::vector<std::pair<double, double>>{
                    {subdiff::gamma(e.rho + 1.0), 0.0},
                    {-coeff, e.b},
                    {e.lambda, e.rho},
                    {-e.lambda, e.rho + e.b},
                };
            },
            [](const PolynomialProfile& p) {
                std::vector<std::pair<double, double>> terms;
                for (std::size_t j = 0; j < p.coeffs.size(); ++j)
                    if (p.coeffs[j] != 0.0) terms.emplace_back(p.coeffs[j], static_cast<double>(j));
                return terms;
            },
            [](const SampledProfile&) { return std::vector<std::pair<double, double>>{}; },
        },
        v_);
}

void TimeProfile::check_coverage(double t) const {
    if (const auto* s = std::get_if<SampledProfile>(&v_)) {
        if (s->times.front() > 0.0 || s->times.back() < t) {
            std::ostringstream os;
            os << "profile: samples cover [" << s->times.front() << ", " << s->times.back()
               << "] but [0, " << t << "] is required";
            throw CoverageError(os.str());
        }
    }
}

}  // namespace subdiff
