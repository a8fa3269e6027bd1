#pragma once

#include <array>
#include <compare>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace subdiff {

/// Interval (0, L) or rectangle (0, L1) x (0, L2) with Dirichlet boundary.
struct BoxDomain {
    int dim = 1;
    std::array<double, 2> lengths{1.0, 1.0};

    static BoxDomain interval(double length);
    static BoxDomain rectangle(double length_x, double length_y);

    /// Throws PreconditionError unless dim in {1, 2} and all lengths > 0.
    void validate() const;
    bool operator==(const BoxDomain&) const = default;
};

/// Multi-index of a Dirichlet sine mode; unused trailing components are 0.
struct ModeIndex {
    std::array<int, 2> k{1, 0};

    static ModeIndex of(int k1) { return ModeIndex{{k1, 0}}; }
    static ModeIndex of(int k1, int k2) { return ModeIndex{{k1, k2}}; }

    auto operator<=>(const ModeIndex&) const = default;
    std::string to_string(int dim) const;
};

/// lambda_k = sum_i (k_i pi / L_i)^2.
double eigenvalue(const BoxDomain& domain, const ModeIndex& k);

/// L2-normalised eigenfunction prod_i sqrt(2/L_i) sin(k_i pi x_i / L_i).
/// Exactly zero on the boundary. Throws DomainError outside the closed box.
double eigenfunction_at(const BoxDomain& domain, const ModeIndex& k, std::span<const double> x);

/// Coefficients of a function in the sine eigenbasis.
///
/// Modes 1..count per axis, flattened by ascending eigenvalue with a
/// lexicographic tie-break on the index.
class SpectralCoeffs {
public:
    SpectralCoeffs() = default;
    SpectralCoeffs(BoxDomain domain, int count);

    static SpectralCoeffs zeros(const BoxDomain& domain, int count) { return {domain, count}; }
    /// Coefficient vector with a single unit entry (the eigenfunction v_k).
    static SpectralCoeffs unit(const BoxDomain& domain, int count, const ModeIndex& k);

    const BoxDomain& domain() const { return domain_; }
    int count() const { return count_; }
    std::size_t size() const { return values_.size(); }

    const std::vector<ModeIndex>& modes() const { return modes_; }
    const std::vector<double>& eigenvalues() const { return eigenvalues_; }
    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }

    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }

    /// Position of a mode in the flattened order, if retained.
    std::optional<std::size_t> position(const ModeIndex& k) const;
    double at(const ModeIndex& k) const;

    /// sqrt(sum |c_k|^2), the L2 norm of the represented function.
    double l2_norm() const;

private:
    BoxDomain domain_{};
    int count_ = 0;
    std::vector<ModeIndex> modes_;
    std::vector<double> eigenvalues_;
    std::vector<double> values_;
};

/// Samples on the uniform interior grid x_i = i L / (n + 1), i = 1..n per axis.
/// Boundary values are implicitly zero. Row-major, first axis slowest.
struct GridFunction {
    BoxDomain domain{};
    std::array<int, 2> nodes{0, 1};
    std::vector<double> values;

    GridFunction() = default;
    GridFunction(BoxDomain d, std::array<int, 2> n);

    /// Tabulate `fn` on the interior grid.
    static GridFunction sample(const BoxDomain& d, std::array<int, 2> n,
                               const std::function<double(std::span<const double>)>& fn);

    double coordinate(int axis, int i) const;
    double spacing(int axis) const;
    std::size_t size() const { return values.size(); }
    double& at(int i, int j = 0) { return values[static_cast<std::size_t>(i) * nodes[1] + j]; }
    double at(int i, int j = 0) const { return values[static_cast<std::size_t>(i) * nodes[1] + j]; }
};

/// Default grid for a domain: 255 nodes in 1-D, 127 x 127 in 2-D.
std::array<int, 2> default_nodes(const BoxDomain& domain);

/// Discrete sine transform (type I) scaled so that coefficient k approximates (h, v_k).
/// Throws PreconditionError if count exceeds the node count on any axis.
SpectralCoeffs analyze(const GridFunction& h, int count);

/// Pointwise sum of c_k v_k(x) on the interior grid with the given node counts.
GridFunction synthesize(const SpectralCoeffs& c, std::array<int, 2> nodes);

enum class DecayVerdict { PlausiblyConvergent, DivergentLooking };

std::string to_string(DecayVerdict v);

struct DecayReport {
    double tau = 0.0;
    std::vector<double> partial_sums;  ///< S_m = sum_{k<=m} lambda_k^tau |c_k|^2
    double tail_slope = 0.0;           ///< d log S_m / d log m over the last half
    DecayVerdict verdict = DecayVerdict::PlausiblyConvergent;
};

/// Numerical stand-in for the smoothness requirement that
/// sum lambda_k^tau |c_k|^2 converges. The verdict is advisory.
DecayReport decay_diagnostic(const SpectralCoeffs& c, double tau, double max_slope = 0.1);

/// CSV with header: coordinate columns (x or x,y) then `value`.
void write_csv(const GridFunction& h, std::ostream& os);
GridFunction read_csv(std::istream& is);
GridFunction read_csv_file(const std::string& path);
void write_csv_file(const GridFunction& h, const std::string& path);

}  // namespace subdiff
