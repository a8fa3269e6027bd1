#pragma once

#include <exception>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace subdiff::app {

using Json = nlohmann::ordered_json;

enum ExitCode : int { Ok = 0, Failure = 1, ConfigInvalid = 2, NoSolution = 3, Accuracy = 4 };

/// Exit code for an exception escaping a run.
int exit_code_for(const std::exception& e);

/// One coefficient of a sparse spectral specification: mode index and value.
using Term = std::pair<std::vector<int>, double>;

/// Source of phi, psi or f.
///   zero | sine-mode{index, scale} | bubble{scale} | gaussian{center, width, scale}
///   | csv{path} | coefficients{terms}
struct FieldSpec {
    std::string kind = "zero";
    std::vector<int> index;
    double scale = 1.0;
    std::vector<double> center;
    double width = 0.2;
    std::string path;
    std::vector<Term> terms;

    bool operator==(const FieldSpec&) const = default;
};

/// g(t): constant{value} | example1{rho, b, lambda} | polynomial{coeffs} | samples{times, values}.
struct ProfileSpec {
    std::string kind = "constant";
    double value = 1.0;
    double rho = -1.0;     ///< example1; < 0 takes the problem rho
    double b = 0.1;
    double lambda = -1.0;  ///< example1; < 0 takes the eigenvalue of `mode`
    std::vector<int> mode{1};
    std::vector<double> coeffs;
    std::vector<double> times;
    std::vector<double> values;

    bool operator==(const ProfileSpec&) const = default;
};

struct RunConfig {
    std::string kind = "forward";  ///< forward | inverse | diagnose | example1 | roundtrip | verify
    std::vector<double> lengths{3.141592653589793};
    double rho = 0.5;
    int modes = 64;
    std::vector<int> nodes;        ///< empty selects the default grid
    double t0 = 1.0;
    double horizon = 1.0;
    std::vector<double> times;     ///< snapshot times; empty selects {horizon} or {t0}
    FieldSpec phi;
    FieldSpec psi;
    FieldSpec f;
    ProfileSpec g;
    double null_threshold = 1e-9;
    double solvability_tol = 1e-7;
    int kernel_cells = 1024;
    std::vector<Term> free_values;
    int residual_steps = 512;      ///< 0 skips the residual summary in forward reports
    double b = 0.1;                ///< example1
    std::vector<int> mode{1};      ///< example1
    std::string output = "out";

    bool operator==(const RunConfig&) const = default;
};

/// Defaults for a command; `roundtrip` and `example1` run with no further input.
RunConfig default_config(const std::string& kind);

/// Overlay `j` on the defaults for `kind`, validate and resolve defaults.
/// Throws ConfigError with a dotted field path.
RunConfig parse_config(const Json& j, const std::string& kind);
RunConfig load_config(const std::string& path, const std::string& kind);

/// Fills resolved defaults (nodes, times, profile parameters) and validates.
void resolve(RunConfig& c);

Json to_json(const RunConfig& c);

struct RunOutcome {
    int exit_code = Ok;
    std::string message;
    std::vector<std::string> artifacts;  ///< written files, relative to the output directory
};

/// Execute the configured command, writing artifacts and manifest.json into c.output.
/// Never throws; failures are reported through the exit code and message.
RunOutcome run(const RunConfig& c);

/// E_{rho,mu}(z) formatted with 15 significant digits.
std::string ml_eval(double rho, double mu, double z);

std::string version();

}  // namespace subdiff::app
