#include "subdiff/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "subdiff/errors.hpp"
#include "subdiff/special_functions.hpp"

namespace subdiff {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Relative accuracy assumed for each Mittag-Leffler evaluation in error estimates.
constexpr double kMLRelErr = 1e-14;

void check_args(double rho, double lambda, double t) {
    if (!(rho > 0.0 && rho <= 1.0)) throw DomainError("duhamel: rho must lie in (0, 1]");
    if (!(lambda > 0.0)) throw DomainError("duhamel: lambda must be positive");
    if (!(t > 0.0) || !std::isfinite(t)) {
        std::ostringstream os;
        os << "duhamel: t must be positive, got " << t;
        throw DomainError(os.str());
    }
}

DuhamelValue closed_form(const std::vector<std::pair<double, double>>& terms, double rho, double lambda,
                         double t) {
    const double z = -lambda * std::pow(t, rho);
    double sum = 0.0;
    double magnitude = 0.0;
    for (const auto& [coef, power] : terms) {
        const double term = coef * subdiff::gamma(power + 1.0) * std::pow(t, power + rho) *
                            ml(MLParams{rho, rho + power + 1.0}, z);
        sum += term;
        magnitude += std::abs(term);
    }
    DuhamelValue v;
    v.value = sum;
    v.error = (kMLRelErr + 4.0 * kEps * static_cast<double>(terms.size())) * magnitude;
    v.method = DuhamelMethod::ClosedForm;
    return v;
}

// Antiderivatives of the kernel at eta.
struct Antiderivatives {
    double a, b;
};

Antiderivatives antiderivatives(double rho, double lambda, double eta) {
    if (eta == 0.0) return {0.0, 0.0};
    const double er = std::pow(eta, rho);
    const double z = -lambda * er;
    return {er * ml(MLParams{rho, rho + 1.0}, z), er * eta * ml(MLParams{rho, rho + 2.0}, z)};
}

// Sum over cells of G_j wL_j + G_{j+1} wR_j with
//   wL = (B_{j+1} - B_j)/h - A_j,  wR = A_{j+1} - (B_{j+1} - B_j)/h.
// `stride` selects every stride-th node (stride 2 gives the coarse mesh).
struct PISum {
    double value, magnitude;
};

PISum pi_sum(const std::vector<Antiderivatives>& ab, const std::vector<double>& g, double h, int stride) {
    const std::size_t n = ab.size() - 1;
    const double hs = h * stride;
    double sum = 0.0, mag = 0.0;
    for (std::size_t j = 0; j + stride <= n; j += stride) {
        const auto& l = ab[j];
        const auto& r = ab[j + stride];
        const double mean_a = (r.b - l.b) / hs;
        const double c = g[j] * (mean_a - l.a) + g[j + stride] * (r.a - mean_a);
        sum += c;
        mag += std::abs(c);
    }
    return {sum, mag};
}

}  // namespace

std::string to_string(DuhamelMethod m) {
    return m == DuhamelMethod::ClosedForm ? "closed-form" : "product-integration";
}

DuhamelValue duhamel_product(const TimeProfile& g, double rho, double lambda, double t, int cells) {
    check_args(rho, lambda, t);
    g.check_coverage(t);
    if (cells < 2) throw PreconditionError("duhamel: product integration needs >= 2 cells");
    if (cells % 2 == 1) ++cells;
    const double h = t / cells;
    std::vector<Antiderivatives> ab(cells + 1);
    std::vector<double> gv(cells + 1);
    for (int j = 0; j <= cells; ++j) {
        const double eta = j == cells ? t : j * h;
        ab[j] = antiderivatives(rho, lambda, eta);
        gv[j] = g(t - eta);
    }
    const auto fine = pi_sum(ab, gv, h, 1);
    const auto coarse = pi_sum(ab, gv, h, 2);
    DuhamelValue v;
    v.value = fine.value;
    v.error = std::abs(fine.value - coarse.value) + (kMLRelErr + kEps * cells) * fine.magnitude;
    v.method = DuhamelMethod::ProductIntegration;
    return v;
}

DuhamelValue duhamel(const TimeProfile& g, double rho, double lambda, double t, const DuhamelOptions& opts) {
    check_args(rho, lambda, t);
    if (g.has_power_form()) return closed_form(g.power_terms(), rho, lambda, t);
    return duhamel_product(g, rho, lambda, t, opts.cells);
}

DuhamelKernel duhamel_modes(const TimeProfile& g, double rho, std::span<const double> eigenvalues, double t,
                            const DuhamelOptions& opts) {
    check_args(rho, 1.0, t);
    g.check_coverage(t);
    DuhamelKernel k;
    k.t = t;
    k.rho = rho;
    k.method = g.has_power_form() ? DuhamelMethod::ClosedForm : DuhamelMethod::ProductIntegration;
    const auto n = static_cast<long>(eigenvalues.size());
    k.values.assign(eigenvalues.size(), 0.0);
    k.errors.assign(eigenvalues.size(), 0.0);
    // Errors thrown inside the parallel region are re-raised after it.
    std::string failure;
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < n; ++i) {
        try {
            const auto v = duhamel(g, rho, eigenvalues[i], t, opts);
            k.values[i] = v.value;
            k.errors[i] = v.error;
        } catch (const std::exception& e) {
#pragma omp critical
            failure = e.what();
        }
    }
    if (!failure.empty()) throw AccuracyError(failure);
    return k;
}

std::vector<DuhamelValue> duhamel_trajectory(const TimeProfile& g, double rho, double lambda, double step,
                                             int steps) {
    check_args(rho, lambda, step);
    if (steps < 1) throw PreconditionError("duhamel: trajectory needs >= 1 step");
    const double horizon = step * steps;
    g.check_coverage(horizon);
    std::vector<DuhamelValue> out(steps + 1);
    out[0] = {0.0, 0.0, g.has_power_form() ? DuhamelMethod::ClosedForm : DuhamelMethod::ProductIntegration};
    if (g.has_power_form()) {
        const auto terms = g.power_terms();
        for (int m = 1; m <= steps; ++m) out[m] = closed_form(terms, rho, lambda, m * step);
        return out;
    }
    // Shared mesh: eta_j = j h and g_i = g(i h); b(t_m) = sum_j wL_j g_{m-j} + wR_j g_{m-j-1}.
    std::vector<Antiderivatives> ab(steps + 1);
    std::vector<double> gs(steps + 1);
    for (int j = 0; j <= steps; ++j) {
        ab[j] = antiderivatives(rho, lambda, j * step);
        gs[j] = g(j * step);
    }
    std::vector<double> wl(steps), wr(steps);
    for (int j = 0; j < steps; ++j) {
        const double mean_a = (ab[j + 1].b - ab[j].b) / step;
        wl[j] = mean_a - ab[j].a;
        wr[j] = ab[j + 1].a - mean_a;
    }
    std::vector<double> wl2, wr2;
    for (int j = 0; j + 2 <= steps; j += 2) {
        const double mean_a = (ab[j + 2].b - ab[j].b) / (2.0 * step);
        wl2.push_back(mean_a - ab[j].a);
        wr2.push_back(ab[j + 2].a - mean_a);
    }
    for (int m = 1; m <= steps; ++m) {
        double sum = 0.0, mag = 0.0;
        for (int j = 0; j < m; ++j) {
            const double c = wl[j] * gs[m - j] + wr[j] * gs[m - j - 1];
            sum += c;
            mag += std::abs(c);
        }
        out[m].value = sum;
        out[m].method = DuhamelMethod::ProductIntegration;
        double err = (kMLRelErr + kEps * m) * mag;
        if (m % 2 == 0) {
            double coarse = 0.0;
            for (int i = 0; 2 * i < m; ++i) coarse += wl2[i] * gs[m - 2 * i] + wr2[i] * gs[m - 2 * i - 2];
            err += std::abs(sum - coarse);
        } else if (m > 1) {
            err += out[m - 1].error;
        }
        out[m].error = err;
    }
    return out;
}

bool ModeClassification::is_null(std::size_t position) const {
    return std::binary_search(null_modes.begin(), null_modes.end(), position);
}

ModeClassification classify(const TimeProfile& g, double rho, std::span<const double> eigenvalues, double t0,
                            double rel_threshold, const DuhamelOptions& opts) {
    ModeClassification c;
    c.t0 = t0;
    c.rel_threshold = rel_threshold;
    c.kernel = duhamel_modes(g, rho, eigenvalues, t0, opts);
    const double t0r = std::pow(t0, rho);
    for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
        const double thr = rel_threshold * t0r / (1.0 + eigenvalues[i] * t0r) + c.kernel.errors[i];
        c.thresholds.push_back(thr);
        if (std::abs(c.kernel.values[i]) < thr)
            c.null_modes.push_back(i);
        else
            c.regular_modes.push_back(i);
    }
    return c;
}

std::string to_string(BoundHypothesis h) {
    switch (h) {
        case BoundHypothesis::SignDefinite: return "sign-definite";
        case BoundHypothesis::HeatWithNonzeroEnd: return "rho=1,g(t0)!=0";
        case BoundHypothesis::SmallTimeNonzeroStart: return "rho<1,g(0)!=0,small-t0";
        case BoundHypothesis::None: break;
    }
    return "none";
}

BoundReport bound_check(const TimeProfile& g, double rho, std::span<const double> eigenvalues, double t0,
                        double violation_floor, const DuhamelOptions& opts) {
    BoundReport r;
    if (g.sign_definite(t0)) {
        r.hypothesis = BoundHypothesis::SignDefinite;
    } else if (rho == 1.0 && g.is_c1() && g(t0) != 0.0) {
        r.hypothesis = BoundHypothesis::HeatWithNonzeroEnd;
    } else if (rho < 1.0 && g.is_c1() && g(0.0) != 0.0) {
        r.hypothesis = BoundHypothesis::SmallTimeNonzeroStart;
        r.notice = "bounds hold only for sufficiently small t0; checked empirically";
    }
    r.applicable = r.hypothesis != BoundHypothesis::None;
    if (!r.applicable) r.notice = "no two-sided bound hypothesis holds for this profile; margins reported only";

    const auto cls = classify(g, rho, eigenvalues, t0, 1e-9, opts);
    r.margins.resize(eigenvalues.size());
    for (std::size_t i = 0; i < eigenvalues.size(); ++i)
        r.margins[i] = eigenvalues[i] * std::abs(cls.kernel.values[i]);
    if (cls.regular_modes.empty()) return r;
    r.lower = std::numeric_limits<double>::infinity();
    for (std::size_t i : cls.regular_modes) {
        r.lower = std::min(r.lower, r.margins[i]);
        r.upper = std::max(r.upper, r.margins[i]);
    }
    r.ratio = r.upper / r.lower;
    for (std::size_t i : cls.regular_modes)
        if (r.margins[i] < violation_floor * r.upper) r.violations.push_back(i);
    r.holds = r.applicable && r.violations.empty() && std::isfinite(r.ratio);
    return r;
}

}  // namespace subdiff
