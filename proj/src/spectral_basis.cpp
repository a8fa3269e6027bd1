#include "subdiff/spectral_basis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "subdiff/errors.hpp"

namespace subdiff {

namespace {

constexpr double kPi = std::numbers::pi;

// sqrt(2/L) sin(pi k i / (n+1)) for k = 1..count, i = 1..n, row k-1.
// Integer reduction keeps nodes of the sine exact.
std::vector<double> sine_table(double length, int count, int n) {
    std::vector<double> t(static_cast<std::size_t>(count) * n);
    const long period = 2L * (n + 1);
    const double norm = std::sqrt(2.0 / length);
    for (int k = 1; k <= count; ++k) {
        for (int i = 1; i <= n; ++i) {
            const long m = (static_cast<long>(k) * i) % period;
            double s;
            if (m == 0 || m == n + 1)
                s = 0.0;
            else
                s = std::sin(kPi * static_cast<double>(m) / (n + 1));
            t[static_cast<std::size_t>(k - 1) * n + (i - 1)] = norm * s;
        }
    }
    return t;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    return out;
}

}  // namespace

BoxDomain BoxDomain::interval(double length) {
    BoxDomain d{1, {length, 1.0}};
    d.validate();
    return d;
}

BoxDomain BoxDomain::rectangle(double length_x, double length_y) {
    BoxDomain d{2, {length_x, length_y}};
    d.validate();
    return d;
}

void BoxDomain::validate() const {
    if (dim != 1 && dim != 2) throw PreconditionError("domain: dim must be 1 or 2");
    for (int i = 0; i < dim; ++i) {
        if (!(lengths[i] > 0.0) || !std::isfinite(lengths[i]))
            throw PreconditionError("domain: side lengths must be positive");
    }
}

std::string ModeIndex::to_string(int dim) const {
    if (dim == 1) return std::to_string(k[0]);
    return std::to_string(k[0]) + ":" + std::to_string(k[1]);
}

double eigenvalue(const BoxDomain& domain, const ModeIndex& k) {
    double lambda = 0.0;
    for (int i = 0; i < domain.dim; ++i) {
        const double w = k.k[i] * kPi / domain.lengths[i];
        lambda += w * w;
    }
    return lambda;
}

double eigenfunction_at(const BoxDomain& domain, const ModeIndex& k, std::span<const double> x) {
    if (static_cast<int>(x.size()) != domain.dim)
        throw PreconditionError("eigenfunction_at: point dimension mismatch");
    double value = 1.0;
    for (int i = 0; i < domain.dim; ++i) {
        const double L = domain.lengths[i];
        if (x[i] < 0.0 || x[i] > L || !std::isfinite(x[i])) {
            std::ostringstream os;
            os << "eigenfunction_at: coordinate " << x[i] << " outside [0, " << L << "]";
            throw DomainError(os.str());
        }
        if (x[i] == 0.0 || x[i] == L) return 0.0;
        value *= std::sqrt(2.0 / L) * std::sin(k.k[i] * kPi * x[i] / L);
    }
    return value;
}

SpectralCoeffs::SpectralCoeffs(BoxDomain domain, int count) : domain_(domain), count_(count) {
    domain_.validate();
    if (count < 1) throw PreconditionError("spectral coefficients: count must be >= 1");
    if (domain_.dim == 1) {
        for (int k = 1; k <= count; ++k) modes_.push_back(ModeIndex::of(k));
    } else {
        for (int a = 1; a <= count; ++a)
            for (int b = 1; b <= count; ++b) modes_.push_back(ModeIndex::of(a, b));
    }
    std::vector<std::pair<double, ModeIndex>> keyed;
    keyed.reserve(modes_.size());
    for (const auto& m : modes_) keyed.emplace_back(eigenvalue(domain_, m), m);
    std::sort(keyed.begin(), keyed.end(), [](const auto& l, const auto& r) {
        if (l.first != r.first) return l.first < r.first;
        return l.second < r.second;
    });
    for (std::size_t i = 0; i < keyed.size(); ++i) {
        eigenvalues_.push_back(keyed[i].first);
        modes_[i] = keyed[i].second;
    }
    values_.assign(modes_.size(), 0.0);
}

SpectralCoeffs SpectralCoeffs::unit(const BoxDomain& domain, int count, const ModeIndex& k) {
    SpectralCoeffs c(domain, count);
    auto pos = c.position(k);
    if (!pos) throw PreconditionError("unit coefficients: mode " + k.to_string(domain.dim) + " not retained");
    c[*pos] = 1.0;
    return c;
}

std::optional<std::size_t> SpectralCoeffs::position(const ModeIndex& k) const {
    for (std::size_t i = 0; i < modes_.size(); ++i)
        if (modes_[i] == k) return i;
    return std::nullopt;
}

double SpectralCoeffs::at(const ModeIndex& k) const {
    auto pos = position(k);
    return pos ? values_[*pos] : 0.0;
}

double SpectralCoeffs::l2_norm() const {
    double s = 0.0;
    for (double v : values_) s += v * v;
    return std::sqrt(s);
}

GridFunction::GridFunction(BoxDomain d, std::array<int, 2> n) : domain(d), nodes(n) {
    domain.validate();
    if (domain.dim == 1) nodes[1] = 1;
    for (int i = 0; i < domain.dim; ++i)
        if (nodes[i] < 1) throw PreconditionError("grid: node count must be positive");
    values.assign(static_cast<std::size_t>(nodes[0]) * nodes[1], 0.0);
}

GridFunction GridFunction::sample(const BoxDomain& d, std::array<int, 2> n,
                                  const std::function<double(std::span<const double>)>& fn) {
    GridFunction g(d, n);
    std::array<double, 2> x{};
    for (int i = 0; i < g.nodes[0]; ++i) {
        x[0] = g.coordinate(0, i);
        for (int j = 0; j < g.nodes[1]; ++j) {
            if (d.dim == 2) x[1] = g.coordinate(1, j);
            g.at(i, j) = fn(std::span<const double>(x.data(), d.dim));
        }
    }
    return g;
}

double GridFunction::coordinate(int axis, int i) const {
    return (i + 1) * spacing(axis);
}

double GridFunction::spacing(int axis) const {
    return domain.lengths[axis] / (nodes[axis] + 1);
}

std::array<int, 2> default_nodes(const BoxDomain& domain) {
    return domain.dim == 1 ? std::array<int, 2>{255, 1} : std::array<int, 2>{127, 127};
}

SpectralCoeffs analyze(const GridFunction& h, int count) {
    const auto& d = h.domain;
    for (int a = 0; a < d.dim; ++a) {
        if (count > h.nodes[a]) {
            std::ostringstream os;
            os << "analyze: " << count << " modes requested but axis " << a << " resolves only "
               << h.nodes[a];
            throw PreconditionError(os.str());
        }
    }
    SpectralCoeffs c(d, count);
    const int n0 = h.nodes[0];
    const auto s0 = sine_table(d.lengths[0], count, n0);
    const double w0 = h.spacing(0);
    if (d.dim == 1) {
        for (std::size_t p = 0; p < c.size(); ++p) {
            const int k = c.modes()[p].k[0];
            const double* row = &s0[static_cast<std::size_t>(k - 1) * n0];
            double s = 0.0;
            for (int i = 0; i < n0; ++i) s += h.values[i] * row[i];
            c[p] = s * w0;
        }
        return c;
    }
    const int n1 = h.nodes[1];
    const auto s1 = sine_table(d.lengths[1], count, n1);
    const double w1 = h.spacing(1);
    // Transform along y first: tmp(i, k2).
    std::vector<double> tmp(static_cast<std::size_t>(n0) * count, 0.0);
    for (int i = 0; i < n0; ++i) {
        for (int k2 = 1; k2 <= count; ++k2) {
            const double* row = &s1[static_cast<std::size_t>(k2 - 1) * n1];
            double s = 0.0;
            for (int j = 0; j < n1; ++j) s += h.at(i, j) * row[j];
            tmp[static_cast<std::size_t>(i) * count + (k2 - 1)] = s * w1;
        }
    }
    for (std::size_t p = 0; p < c.size(); ++p) {
        const int k1 = c.modes()[p].k[0];
        const int k2 = c.modes()[p].k[1];
        const double* row = &s0[static_cast<std::size_t>(k1 - 1) * n0];
        double s = 0.0;
        for (int i = 0; i < n0; ++i) s += row[i] * tmp[static_cast<std::size_t>(i) * count + (k2 - 1)];
        c[p] = s * w0;
    }
    return c;
}

GridFunction synthesize(const SpectralCoeffs& c, std::array<int, 2> nodes) {
    const auto& d = c.domain();
    GridFunction g(d, nodes);
    const int count = c.count();
    const int n0 = g.nodes[0];
    const auto s0 = sine_table(d.lengths[0], count, n0);
    if (d.dim == 1) {
        for (std::size_t p = 0; p < c.size(); ++p) {
            if (c[p] == 0.0) continue;
            const double* row = &s0[static_cast<std::size_t>(c.modes()[p].k[0] - 1) * n0];
            for (int i = 0; i < n0; ++i) g.values[i] += c[p] * row[i];
        }
        return g;
    }
    const int n1 = g.nodes[1];
    const auto s1 = sine_table(d.lengths[1], count, n1);
    // Gather into a dense (k1, k2) array, then synthesise axis by axis.
    std::vector<double> dense(static_cast<std::size_t>(count) * count, 0.0);
    for (std::size_t p = 0; p < c.size(); ++p)
        dense[static_cast<std::size_t>(c.modes()[p].k[0] - 1) * count + (c.modes()[p].k[1] - 1)] = c[p];
    std::vector<double> tmp(static_cast<std::size_t>(n0) * count, 0.0);  // (i, k2)
    for (int k1 = 0; k1 < count; ++k1) {
        const double* row = &s0[static_cast<std::size_t>(k1) * n0];
        for (int k2 = 0; k2 < count; ++k2) {
            const double a = dense[static_cast<std::size_t>(k1) * count + k2];
            if (a == 0.0) continue;
            for (int i = 0; i < n0; ++i) tmp[static_cast<std::size_t>(i) * count + k2] += a * row[i];
        }
    }
    for (int i = 0; i < n0; ++i) {
        for (int k2 = 0; k2 < count; ++k2) {
            const double a = tmp[static_cast<std::size_t>(i) * count + k2];
            if (a == 0.0) continue;
            const double* row = &s1[static_cast<std::size_t>(k2) * n1];
            for (int j = 0; j < n1; ++j) g.at(i, j) += a * row[j];
        }
    }
    return g;
}

std::string to_string(DecayVerdict v) {
    return v == DecayVerdict::PlausiblyConvergent ? "plausibly-convergent" : "divergent-looking";
}

DecayReport decay_diagnostic(const SpectralCoeffs& c, double tau, double max_slope) {
    if (!(tau > 0.0)) throw PreconditionError("decay_diagnostic: tau must be positive");
    DecayReport r;
    r.tau = tau;
    double s = 0.0;
    for (std::size_t p = 0; p < c.size(); ++p) {
        s += std::pow(c.eigenvalues()[p], tau) * c[p] * c[p];
        r.partial_sums.push_back(s);
    }
    // Least-squares slope of log S_m against log m over the last half.
    const std::size_t n = r.partial_sums.size();
    const std::size_t first = n / 2;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int used = 0;
    for (std::size_t m = std::max<std::size_t>(first, 1); m <= n; ++m) {
        const double sm = r.partial_sums[m - 1];
        if (!(sm > 0.0)) continue;
        const double lx = std::log(static_cast<double>(m));
        const double ly = std::log(sm);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++used;
    }
    if (used >= 2) {
        const double denom = used * sxx - sx * sx;
        r.tail_slope = denom > 0.0 ? (used * sxy - sx * sy) / denom : 0.0;
    }
    r.verdict = r.tail_slope > max_slope ? DecayVerdict::DivergentLooking
                                         : DecayVerdict::PlausiblyConvergent;
    return r;
}

void write_csv(const GridFunction& h, std::ostream& os) {
    os << (h.domain.dim == 1 ? "x,value\n" : "x,y,value\n");
    os << std::setprecision(17);
    for (int i = 0; i < h.nodes[0]; ++i) {
        for (int j = 0; j < h.nodes[1]; ++j) {
            os << h.coordinate(0, i) << ',';
            if (h.domain.dim == 2) os << h.coordinate(1, j) << ',';
            os << h.at(i, j) << '\n';
        }
    }
}

GridFunction read_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw PreconditionError("csv: empty input");
    const auto header = split_csv(line);
    if (header.size() != 2 && header.size() != 3)
        throw PreconditionError("csv: expected header 'x,value' or 'x,y,value'");
    const int dim = static_cast<int>(header.size()) - 1;
    std::vector<std::array<double, 3>> rows;
    while (std::getline(is, line)) {
        if (trim(line).empty()) continue;
        const auto cells = split_csv(line);
        if (cells.size() != header.size())
            throw PreconditionError("csv: row has " + std::to_string(cells.size()) + " columns");
        std::array<double, 3> r{};
        for (std::size_t c = 0; c < cells.size(); ++c) {
            try {
                r[c] = std::stod(cells[c]);
            } catch (const std::exception&) {
                throw PreconditionError("csv: cannot parse '" + cells[c] + "'");
            }
            if (!std::isfinite(r[c])) throw PreconditionError("csv: non-finite value");
        }
        rows.push_back(r);
    }
    if (rows.empty()) throw PreconditionError("csv: no data rows");
    // Recover the tensor grid from the coordinate columns.
    std::vector<double> xs, ys;
    for (const auto& r : rows) {
        if (xs.empty() || xs.back() != r[0]) {
            if (std::find(xs.begin(), xs.end(), r[0]) == xs.end()) xs.push_back(r[0]);
        }
        if (dim == 2 && std::find(ys.begin(), ys.end(), r[1]) == ys.end()) ys.push_back(r[1]);
    }
    const int n0 = static_cast<int>(xs.size());
    const int n1 = dim == 2 ? static_cast<int>(ys.size()) : 1;
    if (static_cast<std::size_t>(n0) * n1 != rows.size())
        throw PreconditionError("csv: rows do not form a tensor grid");
    auto length_of = [](const std::vector<double>& c) {
        // Interior nodes i L/(n+1): L = first + last.
        const double L = c.front() + c.back();
        const double h = L / (static_cast<double>(c.size()) + 1);
        for (std::size_t i = 0; i < c.size(); ++i) {
            if (std::abs(c[i] - (i + 1) * h) > 1e-9 * L)
                throw PreconditionError("csv: coordinates are not a uniform interior grid");
        }
        return L;
    };
    BoxDomain d = dim == 1 ? BoxDomain::interval(length_of(xs))
                           : BoxDomain::rectangle(length_of(xs), length_of(ys));
    GridFunction g(d, {n0, n1});
    for (std::size_t r = 0; r < rows.size(); ++r) g.values[r] = rows[r][dim];
    return g;
}

GridFunction read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw PreconditionError("csv: cannot open " + path);
    return read_csv(in);
}

void write_csv_file(const GridFunction& h, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw PreconditionError("csv: cannot write " + path);
    write_csv(h, out);
}

}  // namespace subdiff
