#include "subdiff/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "subdiff/errors.hpp"
#include "subdiff/quadrature.hpp"
#include "subdiff/special_functions.hpp"

namespace subdiff::oracle {

std::vector<double> caputo_l1(std::span<const double> samples, double step, double rho) {
    const std::size_t n = samples.size();
    if (n < 3) throw PreconditionError("caputo_l1: needs at least 3 samples");
    if (!(rho > 0.0 && rho <= 1.0)) throw PreconditionError("caputo_l1: rho must lie in (0, 1]");
    if (!(step > 0.0)) throw PreconditionError("caputo_l1: step must be positive");
    std::vector<double> d(n, 0.0);
    if (rho == 1.0) {
        d[0] = (-3.0 * samples[0] + 4.0 * samples[1] - samples[2]) / (2.0 * step);
        for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (samples[i + 1] - samples[i - 1]) / (2.0 * step);
        d[n - 1] = (3.0 * samples[n - 1] - 4.0 * samples[n - 2] + samples[n - 3]) / (2.0 * step);
        return d;
    }
    std::vector<double> a(n);
    for (std::size_t j = 0; j < n; ++j)
        a[j] = std::pow(static_cast<double>(j + 1), 1.0 - rho) - std::pow(static_cast<double>(j), 1.0 - rho);
    const double scale = std::pow(step, -rho) / subdiff::gamma(2.0 - rho);
    for (std::size_t i = 1; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < i; ++j) acc += a[j] * (samples[i - j] - samples[i - j - 1]);
        d[i] = scale * acc;
    }
    return d;
}

GridFunction laplacian_fd(const GridFunction& h) {
    const int nx = h.nodes[0];
    const int ny = h.domain.dim == 2 ? h.nodes[1] : 1;
    if (nx < 3 || (h.domain.dim == 2 && ny < 3))
        throw PreconditionError("laplacian_fd: needs at least 3 interior nodes per axis");
    GridFunction out(h.domain, h.nodes);
    const double hx2 = h.spacing(0) * h.spacing(0);
    const double hy2 = h.domain.dim == 2 ? h.spacing(1) * h.spacing(1) : 1.0;
    for (int i = 0; i < nx; ++i) {
        for (int j = 0; j < ny; ++j) {
            const double c = h.at(i, j);
            const double w = i > 0 ? h.at(i - 1, j) : 0.0;
            const double e = i + 1 < nx ? h.at(i + 1, j) : 0.0;
            double v = (w - 2.0 * c + e) / hx2;
            if (h.domain.dim == 2) {
                const double s = j > 0 ? h.at(i, j - 1) : 0.0;
                const double n = j + 1 < ny ? h.at(i, j + 1) : 0.0;
                v += (s - 2.0 * c + n) / hy2;
            }
            out.at(i, j) = v;
        }
    }
    return out;
}

ResidualReport residual_check(const std::vector<SpectralCoeffs>& trajectory, double step, double rho,
                              const SpectralCoeffs& f, const TimeProfile& g, const ResidualOptions& opts) {
    if (trajectory.size() < 3) throw PreconditionError("residual_check: needs at least 3 time nodes");
    const int steps = static_cast<int>(trajectory.size()) - 1;
    const double horizon = step * steps;
    const BoxDomain& domain = f.domain();
    const auto nodes = opts.nodes[0] > 0 ? opts.nodes : default_nodes(domain);

    ResidualReport r;
    r.time_steps = steps;
    r.window_start = opts.window_start < 0.0 ? horizon / 10.0 : opts.window_start;
    r.window_end = opts.window_end < 0.0 ? horizon : opts.window_end;

    // Modes that carry any content; everything else contributes exactly zero.
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < f.size(); ++i) {
        bool any = f[i] != 0.0;
        for (const auto& c : trajectory) any = any || c[i] != 0.0;
        if (any) active.push_back(i);
    }

    // Few active modes: tabulated shapes; otherwise the separable synthesis.
    const bool sparse = active.size() <= 32;
    const GridFunction probe(domain, nodes);
    std::vector<std::vector<double>> shapes;
    for (std::size_t i : active) {
        if (!sparse) break;
        std::vector<double> s(probe.size());
        for (int a = 0; a < probe.nodes[0]; ++a) {
            for (int b = 0; b < probe.nodes[1]; ++b) {
                double x[2] = {probe.coordinate(0, a), domain.dim == 2 ? probe.coordinate(1, b) : 0.0};
                s[static_cast<std::size_t>(a) * probe.nodes[1] + b] =
                    eigenfunction_at(domain, f.modes()[i], std::span<const double>(x, domain.dim));
            }
        }
        shapes.push_back(std::move(s));
    }
    auto field = [&](auto coeff) {
        if (!sparse) {
            SpectralCoeffs c(domain, f.count());
            for (std::size_t i : active) c[i] = coeff(i);
            return synthesize(c, nodes);
        }
        GridFunction out(domain, nodes);
        for (std::size_t q = 0; q < active.size(); ++q) {
            const double c = coeff(active[q]);
            if (c == 0.0) continue;
            for (std::size_t p = 0; p < out.size(); ++p) out.values[p] += c * shapes[q][p];
        }
        return out;
    };

    // The L1 operator is linear, so it acts on each mode's time series.
    std::vector<std::vector<double>> caputo(active.size());
    for (std::size_t q = 0; q < active.size(); ++q) {
        std::vector<double> series(trajectory.size());
        for (std::size_t m = 0; m < trajectory.size(); ++m) series[m] = trajectory[m][active[q]];
        caputo[q] = caputo_l1(series, step, rho);
    }
    const auto source = field([&](std::size_t i) { return f[i]; });

    double sum2 = 0.0;
    for (int m = 0; m <= steps; ++m) {
        const double t = m * step;
        if (t < r.window_start * (1.0 - 1e-12) || t > r.window_end * (1.0 + 1e-12)) continue;
        ++r.time_nodes;
        const auto u = field([&](std::size_t i) { return trajectory[m][i]; });
        std::vector<double> dmode(f.size(), 0.0);
        for (std::size_t q = 0; q < active.size(); ++q) dmode[active[q]] = caputo[q][m];
        const auto du = field([&](std::size_t i) { return dmode[i]; });
        const auto lap = laplacian_fd(u);
        const double gt = g(t);
        for (std::size_t p = 0; p < u.size(); ++p) {
            const double res = std::abs(du.values[p] - lap.values[p] - source.values[p] * gt);
            r.max_residual = std::max(r.max_residual, res);
            sum2 += res * res;
        }
    }
    r.space_nodes = probe.size();
    const double count = static_cast<double>(r.space_nodes * r.time_nodes);
    r.l2_residual = count > 0 ? std::sqrt(sum2 / count) : 0.0;
    return r;
}

ResidualReport residual_check(const ForwardSolution& u, const ResidualOptions& opts) {
    const auto& p = u.problem();
    const double step = p.horizon / opts.time_steps;
    return residual_check(u.trajectory(step, opts.time_steps), step, p.rho, p.f, p.g, opts);
}

double brute_duhamel(const TimeProfile& g, double rho, double lambda, double t, double tol) {
    if (!(tol > 0.0)) throw PreconditionError("brute_duhamel: tol must be positive");
    if (!(rho > 0.0 && rho <= 1.0)) throw DomainError("brute_duhamel: rho must lie in (0, 1]");
    if (!(lambda > 0.0) || !(t > 0.0)) throw DomainError("brute_duhamel: lambda and t must be positive");
    g.check_coverage(t);

    double gmax = 0.0;
    for (int i = 0; i <= 256; ++i) gmax = std::max(gmax, std::abs(g(t * i / 256.0)));
    gmax *= 2.0;

    // Panels [t 2^{-j-1}, t 2^{-j}]; the piece [0, eps] is bounded by
    // gmax eps^rho / (rho Gamma(rho)) since 0 < E_{rho,rho}(-x) <= 1 / Gamma(rho).
    const double tail_scale = gmax / (rho * subdiff::gamma(rho));
    int panels = 1;
    double eps = t / 2.0;
    while (tail_scale * std::pow(eps, rho) > tol / 4.0 && panels < 2000) {
        eps /= 2.0;
        ++panels;
    }
    const MLParams kernel{rho, rho};
    auto integrand = [&](double eta) {
        return std::pow(eta, rho - 1.0) * ml(kernel, -lambda * std::pow(eta, rho)) * g(t - eta);
    };
    quad::Options qo;
    qo.abs_tol = tol / (4.0 * panels);
    qo.rel_tol = 0.0;
    qo.max_intervals = 4000;
    double sum = 0.0;
    double hi = t;
    for (int j = 0; j < panels; ++j) {
        const double lo = hi / 2.0;
        const auto res = quad::integrate(integrand, lo, hi, qo);
        if (!res.converged) {
            std::ostringstream os;
            os << "brute_duhamel: panel [" << lo << ", " << hi << "] did not converge (error " << res.error
               << ")";
            throw AccuracyError(os.str());
        }
        sum += res.value;
        hi = lo;
    }
    return sum;
}

double Example1Scenario::time_factor(double t) const { return std::pow(t, rho) * (1.0 - std::pow(t, b)); }

ForwardProblem Example1Scenario::trivial(int count) const {
    ForwardProblem p;
    p.domain = domain;
    p.rho = rho;
    p.phi = SpectralCoeffs::zeros(domain, count);
    p.f = SpectralCoeffs::zeros(domain, count);
    p.g = g;
    p.horizon = 1.0;
    return p;
}

ForwardProblem Example1Scenario::nontrivial(int count) const {
    auto p = trivial(count);
    p.f = SpectralCoeffs::unit(domain, count, mode);
    return p;
}

Example1Scenario example1_scenario(double rho, double b, const ModeIndex& mode, const BoxDomain& domain) {
    if (!(rho > 0.0 && rho < 1.0)) throw PreconditionError("example1: rho must lie in (0, 1)");
    if (!(b > 0.0)) throw PreconditionError("example1: b must be positive");
    Example1Scenario s;
    s.rho = rho;
    s.b = b;
    s.domain = domain;
    s.mode = mode;
    s.lambda = eigenvalue(domain, mode);
    s.g = TimeProfile::example1(rho, b, s.lambda);
    s.g_start = s.g(0.0);
    s.g_end = s.g(1.0);
    return s;
}

}  // namespace subdiff::oracle
