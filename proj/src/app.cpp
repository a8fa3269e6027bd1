#include "subdiff/app.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <set>
#include <sstream>

#include "subdiff/errors.hpp"
#include "subdiff/forward_solver.hpp"
#include "subdiff/inverse_solver.hpp"
#include "subdiff/kernel.hpp"
#include "subdiff/oracles.hpp"
#include "subdiff/special_functions.hpp"
#include "subdiff/spectral_basis.hpp"

namespace subdiff::app {

namespace fs = std::filesystem;

namespace {

const std::set<std::string> kKinds{"forward", "inverse", "diagnose", "example1", "roundtrip", "verify"};

// ---- JSON reading ----------------------------------------------------------

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void check_keys(const Json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
    for (const auto& [key, _] : j.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
            throw ConfigError(join(path, key), "unknown field");
    }
}

template <class T>
void read(const Json& j, const std::string& path, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(join(path, key), "wrong type");
    }
}

// A length may be a number or the string "pi".
double read_length(const Json& v, const std::string& path) {
    if (v.is_string() && v.get<std::string>() == "pi") return std::numbers::pi;
    if (v.is_number()) return v.get<double>();
    throw ConfigError(path, "expected a number or \"pi\"");
}

std::vector<Term> read_terms(const Json& j, const std::string& path) {
    if (!j.is_array()) throw ConfigError(path, "expected an array of {index, value}");
    std::vector<Term> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string p = path + "[" + std::to_string(i) + "]";
        check_keys(j[i], p, {"index", "value"});
        Term t;
        read(j[i], p, "index", t.first);
        if (!j[i].contains("value")) throw ConfigError(p + ".value", "required");
        read(j[i], p, "value", t.second);
        out.push_back(t);
    }
    return out;
}

Json write_terms(const std::vector<Term>& terms) {
    Json a = Json::array();
    for (const auto& [index, value] : terms) a.push_back(Json{{"index", index}, {"value", value}});
    return a;
}

FieldSpec read_field(const Json& j, const std::string& path) {
    FieldSpec f;
    if (!j.is_object() || !j.contains("kind")) throw ConfigError(join(path, "kind"), "required");
    read(j, path, "kind", f.kind);
    if (f.kind == "zero") {
        check_keys(j, path, {"kind"});
    } else if (f.kind == "sine-mode") {
        check_keys(j, path, {"kind", "index", "scale"});
        f.index = {1};
        read(j, path, "index", f.index);
        read(j, path, "scale", f.scale);
    } else if (f.kind == "bubble") {
        check_keys(j, path, {"kind", "scale"});
        read(j, path, "scale", f.scale);
    } else if (f.kind == "gaussian") {
        check_keys(j, path, {"kind", "center", "width", "scale"});
        read(j, path, "center", f.center);
        read(j, path, "width", f.width);
        read(j, path, "scale", f.scale);
    } else if (f.kind == "csv") {
        check_keys(j, path, {"kind", "path"});
        read(j, path, "path", f.path);
    } else if (f.kind == "coefficients") {
        check_keys(j, path, {"kind", "terms"});
        if (j.contains("terms")) f.terms = read_terms(j["terms"], join(path, "terms"));
    } else {
        throw ConfigError(join(path, "kind"), "unknown field source '" + f.kind + "'");
    }
    return f;
}

Json write_field(const FieldSpec& f) {
    Json j{{"kind", f.kind}};
    if (f.kind == "sine-mode") {
        j["index"] = f.index;
        j["scale"] = f.scale;
    } else if (f.kind == "bubble") {
        j["scale"] = f.scale;
    } else if (f.kind == "gaussian") {
        j["center"] = f.center;
        j["width"] = f.width;
        j["scale"] = f.scale;
    } else if (f.kind == "csv") {
        j["path"] = f.path;
    } else if (f.kind == "coefficients") {
        j["terms"] = write_terms(f.terms);
    }
    return j;
}

ProfileSpec read_profile(const Json& j, const std::string& path) {
    ProfileSpec g;
    if (!j.is_object() || !j.contains("kind")) throw ConfigError(join(path, "kind"), "required");
    read(j, path, "kind", g.kind);
    if (g.kind == "constant") {
        check_keys(j, path, {"kind", "value"});
        read(j, path, "value", g.value);
    } else if (g.kind == "example1") {
        check_keys(j, path, {"kind", "rho", "b", "lambda", "mode"});
        read(j, path, "rho", g.rho);
        read(j, path, "b", g.b);
        read(j, path, "lambda", g.lambda);
        read(j, path, "mode", g.mode);
    } else if (g.kind == "polynomial") {
        check_keys(j, path, {"kind", "coeffs"});
        read(j, path, "coeffs", g.coeffs);
    } else if (g.kind == "samples") {
        check_keys(j, path, {"kind", "times", "values"});
        read(j, path, "times", g.times);
        read(j, path, "values", g.values);
    } else {
        throw ConfigError(join(path, "kind"), "unknown profile '" + g.kind + "'");
    }
    return g;
}

Json write_profile(const ProfileSpec& g) {
    Json j{{"kind", g.kind}};
    if (g.kind == "constant") {
        j["value"] = g.value;
    } else if (g.kind == "example1") {
        j["rho"] = g.rho;
        j["b"] = g.b;
        j["lambda"] = g.lambda;
        j["mode"] = g.mode;
    } else if (g.kind == "polynomial") {
        j["coeffs"] = g.coeffs;
    } else if (g.kind == "samples") {
        j["times"] = g.times;
        j["values"] = g.values;
    }
    return j;
}

// ---- construction of solver inputs -----------------------------------------

BoxDomain make_domain(const RunConfig& c) {
    return c.lengths.size() == 1 ? BoxDomain::interval(c.lengths[0]) : BoxDomain::rectangle(c.lengths[0], c.lengths[1]);
}

std::array<int, 2> make_nodes(const RunConfig& c) {
    return c.nodes.size() == 1 ? std::array<int, 2>{c.nodes[0], 1} : std::array<int, 2>{c.nodes[0], c.nodes[1]};
}

ModeIndex make_mode(const std::vector<int>& index) {
    return index.size() == 1 ? ModeIndex::of(index[0]) : ModeIndex::of(index[0], index[1]);
}

void check_index(const std::vector<int>& index, const RunConfig& c, const std::string& path) {
    if (index.size() != c.lengths.size()) throw ConfigError(path, "index needs one entry per axis");
    for (int k : index)
        if (k < 1 || k > c.modes) throw ConfigError(path, "index outside 1.." + std::to_string(c.modes));
}

SpectralCoeffs make_field(const FieldSpec& f, const RunConfig& c, const std::string& path) {
    const auto domain = make_domain(c);
    const auto nodes = make_nodes(c);
    const int dim = domain.dim;
    if (f.kind == "zero") return SpectralCoeffs::zeros(domain, c.modes);
    if (f.kind == "sine-mode") {
        // sin(k pi x / L) per axis, i.e. sqrt(L / 2) v_k per axis.
        double norm = f.scale;
        for (int a = 0; a < dim; ++a) norm *= std::sqrt(domain.lengths[a] / 2.0);
        auto s = SpectralCoeffs::unit(domain, c.modes, make_mode(f.index));
        for (std::size_t i = 0; i < s.size(); ++i) s[i] *= norm;
        return s;
    }
    if (f.kind == "coefficients") {
        SpectralCoeffs s(domain, c.modes);
        for (const auto& [index, value] : f.terms) s[*s.position(make_mode(index))] += value;
        return s;
    }
    GridFunction h;
    if (f.kind == "bubble") {
        h = GridFunction::sample(domain, nodes, [&](std::span<const double> x) {
            double v = f.scale;
            for (int a = 0; a < dim; ++a) v *= x[a] * (domain.lengths[a] - x[a]);
            return v;
        });
    } else if (f.kind == "gaussian") {
        // Shifted down by its largest boundary value, then rescaled to peak `scale`.
        double dmin = std::numeric_limits<double>::infinity();
        for (int a = 0; a < dim; ++a) dmin = std::min({dmin, f.center[a], domain.lengths[a] - f.center[a]});
        const double w2 = 2.0 * f.width * f.width;
        const double floor = std::exp(-dmin * dmin / w2);
        h = GridFunction::sample(domain, nodes, [&](std::span<const double> x) {
            double r2 = 0.0;
            for (int a = 0; a < dim; ++a) r2 += (x[a] - f.center[a]) * (x[a] - f.center[a]);
            return f.scale * std::max(0.0, std::exp(-r2 / w2) - floor) / (1.0 - floor);
        });
    } else {
        h = read_csv_file(f.path);
        if (h.domain.dim != dim) throw ConfigError(join(path, "path"), "grid dimension does not match the domain");
        for (int a = 0; a < dim; ++a)
            if (std::abs(h.domain.lengths[a] - domain.lengths[a]) > 1e-9 * domain.lengths[a])
                throw ConfigError(join(path, "path"), "grid extent does not match the domain lengths");
        h.domain = domain;
        if (h.nodes[0] < c.modes || (dim == 2 && h.nodes[1] < c.modes))
            throw ConfigError(join(path, "path"), "grid resolves fewer nodes than the requested mode count");
    }
    return analyze(h, c.modes);
}

TimeProfile make_profile(const ProfileSpec& g) {
    if (g.kind == "constant") return TimeProfile::constant(g.value);
    if (g.kind == "example1") return TimeProfile::example1(g.rho, g.b, g.lambda);
    if (g.kind == "polynomial") return TimeProfile::polynomial(g.coeffs);
    return TimeProfile::sampled(g.times, g.values);
}

// ---- output ----------------------------------------------------------------

void write_text(const fs::path& file, const std::string& text) {
    std::ofstream os(file, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + file.string());
    os << text;
}

void write_json(const fs::path& file, const Json& j) { write_text(file, j.dump(2) + "\n"); }

std::string mode_name(const ModeIndex& m, int dim) { return m.to_string(dim); }

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

Json mode_list(const SpectralCoeffs& c, const std::vector<std::size_t>& positions) {
    Json a = Json::array();
    for (std::size_t i : positions) a.push_back(mode_name(c.modes()[i], c.domain().dim));
    return a;
}

struct Context {
    const RunConfig& cfg;
    fs::path dir;
    std::vector<std::string> artifacts;

    void json(const std::string& name, const Json& j) {
        write_json(dir / name, j);
        artifacts.push_back(name);
    }
    void grid(const std::string& name, const GridFunction& h) {
        write_csv_file(h, (dir / name).string());
        artifacts.push_back(name);
    }
    void text(const std::string& name, const std::string& s) {
        write_text(dir / name, s);
        artifacts.push_back(name);
    }
};

std::string snapshot_name(const std::string& stem, std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s_%03zu.csv", stem.c_str(), i);
    return buf;
}

DuhamelOptions kernel_options(const RunConfig& c) { return DuhamelOptions{c.kernel_cells}; }

Json residual_json(const oracle::ResidualReport& r) {
    return Json{{"max", r.max_residual},  {"l2", r.l2_residual},          {"time_steps", r.time_steps},
                {"window", {r.window_start, r.window_end}}, {"space_nodes", r.space_nodes},
                {"time_nodes", r.time_nodes}};
}

// ---- commands --------------------------------------------------------------

int run_forward(Context& ctx) {
    const auto& c = ctx.cfg;
    ForwardProblem p;
    p.domain = make_domain(c);
    p.rho = c.rho;
    p.phi = make_field(c.phi, c, "phi");
    p.f = make_field(c.f, c, "f");
    p.g = make_profile(c.g);
    p.horizon = c.horizon;
    p.kernel = kernel_options(c);
    const ForwardSolution u(p);
    Json files = Json::array();
    for (std::size_t i = 0; i < c.times.size(); ++i) {
        const auto name = snapshot_name("u", i);
        ctx.grid(name, u.at(c.times[i], make_nodes(c)));
        files.push_back(name);
    }
    Json report{{"command", "forward"},
                {"modes", c.modes},
                {"retained", p.phi.size()},
                {"tail_indicator", u.tail_indicator()},
                {"times", c.times},
                {"files", files}};
    if (c.residual_steps > 0) {
        oracle::ResidualOptions ro;
        ro.time_steps = c.residual_steps;
        ro.nodes = make_nodes(c);
        report["residual"] = residual_json(oracle::residual_check(u, ro));
    }
    ctx.json("forward.json", report);
    return Ok;
}

InverseProblem inverse_problem(const RunConfig& c) {
    InverseProblem p;
    p.domain = make_domain(c);
    p.rho = c.rho;
    p.phi = make_field(c.phi, c, "phi");
    p.psi = make_field(c.psi, c, "psi");
    p.g = make_profile(c.g);
    p.t0 = c.t0;
    p.horizon = c.horizon;
    for (const auto& [index, value] : c.free_values) p.free_values[make_mode(index)] = value;
    p.rel_threshold = c.null_threshold;
    p.solvability_tol = c.solvability_tol;
    p.kernel = kernel_options(c);
    return p;
}

Json solvability_json(const InverseProblem& p, const Assessment& a) {
    Json residuals = Json::array(), tolerances = Json::array();
    for (const auto& chk : a.report.checks) {
        residuals.push_back(chk.residual);
        tolerances.push_back(chk.tolerance);
    }
    return Json{{"verdict", to_string(a.report.verdict)},
                {"t0", p.t0},
                {"null_modes", mode_list(p.phi, a.classification.null_modes)},
                {"residuals", residuals},
                {"tolerances", tolerances},
                {"violations", mode_list(p.phi, a.report.violations)}};
}

int run_inverse(Context& ctx) {
    const auto& c = ctx.cfg;
    const auto p = inverse_problem(c);
    const auto a = assess(p);
    Json report = solvability_json(p, a);
    if (a.report.verdict == Verdict::NoSolution) {
        report["amplification"] = Json::array();
        ctx.json("solvability.json", report);
        throw NoSolutionError("inverse: snapshot violates the solvability condition", a.report.violations);
    }
    const auto r = recover(p);
    Json amp = Json::array();
    for (double v : r.amplification) amp.push_back(v);
    report["amplification"] = amp;
    report["near_singular"] = mode_list(p.phi, r.near_singular);
    report["snapshot_error"] = r.snapshot_error;
    Json family{{"free_modes", mode_list(p.phi, r.family.positions)}, {"values", r.family.values}};
    if (r.family.decay)
        family["decay"] = {{"tau", r.family.decay->tau},
                           {"tail_slope", r.family.decay->tail_slope},
                           {"verdict", to_string(r.family.decay->verdict)}};
    report["family"] = family;
    report["warnings"] = r.warnings;
    ctx.grid("f.csv", r.f_grid(make_nodes(c)));
    Json files = Json::array();
    for (std::size_t i = 0; i < c.times.size(); ++i) {
        const auto name = snapshot_name("u", i);
        ctx.grid(name, r.u->at(c.times[i], make_nodes(c)));
        files.push_back(name);
    }
    report["times"] = c.times;
    report["files"] = files;
    ctx.json("solvability.json", report);
    return Ok;
}

int run_diagnose(Context& ctx) {
    const auto& c = ctx.cfg;
    const auto domain = make_domain(c);
    const SpectralCoeffs basis(domain, c.modes);
    const auto g = make_profile(c.g);
    const auto cls = classify(g, c.rho, basis.eigenvalues(), c.t0, c.null_threshold, kernel_options(c));
    std::ostringstream csv;
    csv << "k,lambda,b_value,error_estimate,class\n";
    for (std::size_t i = 0; i < basis.size(); ++i) {
        csv << mode_name(basis.modes()[i], domain.dim) << ',' << fmt(basis.eigenvalues()[i]) << ','
            << fmt(cls.kernel.values[i]) << ',' << fmt(cls.kernel.errors[i]) << ','
            << (cls.is_null(i) ? "null" : "regular") << '\n';
    }
    ctx.text("modes.csv", csv.str());
    const auto bounds = bound_check(g, c.rho, basis.eigenvalues(), c.t0, 1e-8, kernel_options(c));
    Json report{{"command", "diagnose"},
                {"t0", c.t0},
                {"method", to_string(cls.kernel.method)},
                {"null_modes", mode_list(basis, cls.null_modes)},
                {"regular_count", cls.regular_modes.size()},
                {"bounds",
                 {{"hypothesis", to_string(bounds.hypothesis)},
                  {"applicable", bounds.applicable},
                  {"notice", bounds.notice},
                  {"lower", bounds.lower},
                  {"upper", bounds.upper},
                  {"ratio", bounds.ratio},
                  {"violations", mode_list(basis, bounds.violations)},
                  {"holds", bounds.holds}}}};
    ctx.json("diagnose.json", report);
    return Ok;
}

int run_example1(Context& ctx) {
    const auto& c = ctx.cfg;
    const auto domain = make_domain(c);
    const auto s = oracle::example1_scenario(c.rho, c.b, make_mode(c.mode), domain);
    const SpectralCoeffs basis(domain, c.modes);
    const auto cls = classify(s.g, c.rho, basis.eigenvalues(), 1.0, c.null_threshold, kernel_options(c));

    InverseProblem p;
    p.domain = domain;
    p.rho = c.rho;
    p.phi = SpectralCoeffs::zeros(domain, c.modes);
    p.psi = p.phi;
    p.g = s.g;
    p.t0 = 1.0;
    p.horizon = 1.0;
    p.rel_threshold = c.null_threshold;
    p.kernel = kernel_options(c);
    const auto verdict = assess(p).report.verdict;

    Json solutions = Json::array();
    for (bool nontrivial : {false, true}) {
        const ForwardSolution u(nontrivial ? s.nontrivial(c.modes) : s.trivial(c.modes));
        oracle::ResidualOptions ro;
        ro.time_steps = c.residual_steps > 0 ? c.residual_steps : 2048;
        ro.nodes = make_nodes(c);
        const auto r = oracle::residual_check(u, ro);
        solutions.push_back(Json{{"name", nontrivial ? "T(t) v, v" : "0, 0"},
                                 {"snapshot_norm", u.coefficients(1.0).l2_norm()},
                                 {"residual", residual_json(r)}});
    }

    std::ostringstream csv;
    csv << "t,g,T\n";
    for (int i = 0; i <= 100; ++i) {
        const double t = i / 100.0;
        csv << fmt(t) << ',' << fmt(s.g(t)) << ',' << fmt(s.time_factor(t)) << '\n';
    }
    ctx.text("example1_profile.csv", csv.str());

    Json report{{"command", "example1"},
                {"rho", c.rho},
                {"b", c.b},
                {"mode", mode_name(s.mode, domain.dim)},
                {"lambda", s.lambda},
                {"g0", s.g_start},
                {"g1", s.g_end},
                {"g_changes_sign", s.g_start > 0.0 && s.g_end < 0.0},
                {"t0", 1.0},
                {"null_modes", mode_list(basis, cls.null_modes)},
                {"verdict", to_string(verdict)},
                {"solutions", solutions}};
    ctx.json("example1.json", report);
    return Ok;
}

int run_roundtrip(Context& ctx) {
    const auto& c = ctx.cfg;
    const auto phi = make_field(c.phi, c, "phi");
    const auto f = make_field(c.f, c, "f");
    const auto r = roundtrip(phi, f, make_profile(c.g), c.rho, c.t0, kernel_options(c));
    ctx.grid("f_recovered.csv", synthesize(r.f_recovered, make_nodes(c)));
    ctx.json("roundtrip.json", Json{{"command", "roundtrip"},
                                    {"verdict", to_string(r.verdict)},
                                    {"rel_error", r.rel_l2_error},
                                    {"max_error", r.max_error},
                                    {"modes", c.modes}});
    return Ok;
}

struct Check {
    std::string name;
    double value;
    double tolerance;
};

int run_verify(Context& ctx) {
    const double pi = std::numbers::pi;
    const auto one = TimeProfile::constant(1.0);
    std::vector<Check> checks;

    checks.push_back({"ml_half_at_minus_one", std::abs(ml_one(0.5, -1.0) - 0.42758357615580700441), 1e-14});
    checks.push_back({"brute_vs_closed_duhamel",
                      std::abs(oracle::brute_duhamel(one, 0.5, 100.0, 1.0, 1e-12) - duhamel(one, 0.5, 100.0, 1.0).value),
                      1e-8});
    {
        std::vector<double> lin(65);
        for (int m = 0; m <= 64; ++m) lin[m] = m / 64.0;
        const auto d = oracle::caputo_l1(lin, 1.0 / 64, 0.5);
        checks.push_back({"l1_derivative_of_t", std::abs(d[64] - 1.0 / subdiff::gamma(1.5)), 1e-13});
    }
    {
        const auto line = BoxDomain::interval(pi);
        const auto v = synthesize(SpectralCoeffs::unit(line, 4, ModeIndex::of(1)), {255, 1});
        const auto l = oracle::laplacian_fd(v);
        double e = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) e = std::max(e, std::abs(l.values[i] + v.values[i]));
        checks.push_back({"fd_laplacian_eigenrelation", e, std::pow(pi / 256, 2)});
    }
    {
        const auto line = BoxDomain::interval(pi);
        ForwardProblem p;
        p.domain = line;
        p.rho = 1.0;
        p.phi = SpectralCoeffs::unit(line, 64, ModeIndex::of(1));
        p.f = SpectralCoeffs::zeros(line, 64);
        p.g = one;
        const ForwardSolution u(p);
        oracle::ResidualOptions ro;
        ro.time_steps = 256;
        checks.push_back({"heat_residual", oracle::residual_check(u, ro).max_residual, 1e-3});
        double e = 0.0;
        for (double t : {0.1, 0.5, 1.0}) e = std::max(e, std::abs(u.coefficients(t)[0] - std::exp(-t)));
        checks.push_back({"heat_degeneration", e, 1e-10});
    }
    {
        const auto s = oracle::example1_scenario(0.5, 0.1);
        checks.push_back({"example1_g0", std::abs(s.g_start - std::sqrt(pi) / 2), 1e-12});
        checks.push_back({"example1_g1_negative", std::max(0.0, s.g_end), 0.0});
        const auto r = oracle::residual_check(ForwardSolution(s.nontrivial(64)));
        checks.push_back({"example1_nontrivial_residual", r.max_residual, 5e-3});
    }
    {
        const auto line = BoxDomain::interval(pi);
        const auto bubble = analyze(
            GridFunction::sample(line, {255, 1}, [&](std::span<const double> x) { return x[0] * (pi - x[0]); }), 64);
        const auto r = roundtrip(SpectralCoeffs::unit(line, 64, ModeIndex::of(1)), bubble, one, 0.7, 1.0);
        checks.push_back({"roundtrip_bubble", r.rel_l2_error, 1e-6});
    }

    Json list = Json::array();
    bool all = true;
    for (const auto& chk : checks) {
        const bool pass = chk.value <= chk.tolerance;
        all = all && pass;
        list.push_back(Json{{"name", chk.name}, {"value", chk.value}, {"tolerance", chk.tolerance}, {"pass", pass}});
    }
    ctx.json("verify.json", Json{{"command", "verify"}, {"pass", all}, {"checks", list}});
    return all ? Ok : Accuracy;
}

}  // namespace

std::string version() { return SUBDIFF_VERSION; }

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const DomainError*>(&e) ||
        dynamic_cast<const PreconditionError*>(&e) || dynamic_cast<const CoverageError*>(&e))
        return ConfigInvalid;
    if (dynamic_cast<const NoSolutionError*>(&e)) return NoSolution;
    if (dynamic_cast<const AccuracyError*>(&e)) return Accuracy;
    return Failure;
}

RunConfig default_config(const std::string& kind) {
    if (!kKinds.count(kind)) throw ConfigError("kind", "unknown command '" + kind + "'");
    RunConfig c;
    c.kind = kind;
    if (kind == "forward" || kind == "roundtrip") {
        c.phi.kind = "sine-mode";
        c.phi.index = {1};
    }
    if (kind == "roundtrip") {
        c.rho = 0.7;
        c.f.kind = "bubble";
    } else if (kind == "example1") {
        c.g.kind = "example1";
        c.residual_steps = 2048;
    }
    return c;
}

RunConfig parse_config(const Json& j, const std::string& kind) {
    RunConfig c = default_config(kind);
    if (j.is_null()) {
        resolve(c);
        return c;
    }
    check_keys(j, "", {"kind", "domain", "rho", "modes", "nodes", "time", "phi", "psi", "f", "g", "thresholds",
                       "kernel", "free_values", "residual", "example1", "output"});
    if (j.contains("kind")) {
        std::string k;
        read(j, "", "kind", k);
        if (k != kind) throw ConfigError("kind", "config is for '" + k + "' but the command is '" + kind + "'");
    }
    if (j.contains("domain")) {
        const auto& d = j["domain"];
        check_keys(d, "domain", {"lengths"});
        if (d.contains("lengths")) {
            const auto& l = d["lengths"];
            if (!l.is_array()) throw ConfigError("domain.lengths", "expected an array");
            c.lengths.clear();
            for (std::size_t i = 0; i < l.size(); ++i)
                c.lengths.push_back(read_length(l[i], "domain.lengths[" + std::to_string(i) + "]"));
        }
    }
    read(j, "", "rho", c.rho);
    read(j, "", "modes", c.modes);
    read(j, "", "nodes", c.nodes);
    if (j.contains("time")) {
        const auto& t = j["time"];
        check_keys(t, "time", {"t0", "horizon", "snapshots"});
        read(t, "time", "t0", c.t0);
        read(t, "time", "horizon", c.horizon);
        read(t, "time", "snapshots", c.times);
    }
    if (j.contains("phi")) c.phi = read_field(j["phi"], "phi");
    if (j.contains("psi")) c.psi = read_field(j["psi"], "psi");
    if (j.contains("f")) c.f = read_field(j["f"], "f");
    if (j.contains("g")) c.g = read_profile(j["g"], "g");
    if (j.contains("thresholds")) {
        const auto& t = j["thresholds"];
        check_keys(t, "thresholds", {"null_relative", "solvability"});
        read(t, "thresholds", "null_relative", c.null_threshold);
        read(t, "thresholds", "solvability", c.solvability_tol);
    }
    if (j.contains("kernel")) {
        check_keys(j["kernel"], "kernel", {"cells"});
        read(j["kernel"], "kernel", "cells", c.kernel_cells);
    }
    if (j.contains("free_values")) c.free_values = read_terms(j["free_values"], "free_values");
    if (j.contains("residual")) {
        check_keys(j["residual"], "residual", {"time_steps"});
        read(j["residual"], "residual", "time_steps", c.residual_steps);
    }
    if (j.contains("example1")) {
        check_keys(j["example1"], "example1", {"b", "mode"});
        read(j["example1"], "example1", "b", c.b);
        read(j["example1"], "example1", "mode", c.mode);
    }
    read(j, "", "output", c.output);
    if (kind == "inverse" && !j.contains("psi")) throw ConfigError("psi", "required for inverse");
    resolve(c);
    return c;
}

RunConfig load_config(const std::string& path, const std::string& kind) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("config", "cannot open '" + path + "'");
    Json j;
    try {
        j = Json::parse(is);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config", std::string("invalid JSON: ") + e.what());
    }
    return parse_config(j, kind);
}

void resolve(RunConfig& c) {
    if (!kKinds.count(c.kind)) throw ConfigError("kind", "unknown command '" + c.kind + "'");
    if (c.lengths.empty() || c.lengths.size() > 2) throw ConfigError("domain.lengths", "one or two lengths required");
    for (double l : c.lengths)
        if (!(l > 0.0) || !std::isfinite(l)) throw ConfigError("domain.lengths", "lengths must be positive");
    const int dim = static_cast<int>(c.lengths.size());
    if (!(c.rho > 0.0 && c.rho <= 1.0)) throw ConfigError("rho", "must lie in (0, 1]");
    if (c.modes < 1) throw ConfigError("modes", "must be positive");
    if (c.nodes.empty()) {
        const auto n = default_nodes(make_domain(c));
        c.nodes.assign(n.begin(), n.begin() + dim);
    }
    if (static_cast<int>(c.nodes.size()) != dim) throw ConfigError("nodes", "one node count per axis required");
    for (int n : c.nodes)
        if (n < 3) throw ConfigError("nodes", "at least 3 interior nodes per axis");
    if (!(c.horizon > 0.0) || !std::isfinite(c.horizon)) throw ConfigError("time.horizon", "must be positive");
    if (!(c.t0 > 0.0 && c.t0 <= c.horizon)) throw ConfigError("time.t0", "must lie in (0, horizon]");
    if (c.times.empty()) c.times = {c.kind == "inverse" ? c.t0 : c.horizon};
    for (double t : c.times)
        if (!(t >= 0.0 && t <= c.horizon)) throw ConfigError("time.snapshots", "times must lie in [0, horizon]");
    if (c.kernel_cells < 2) throw ConfigError("kernel.cells", "at least 2 cells");
    if (!(c.null_threshold > 0.0)) throw ConfigError("thresholds.null_relative", "must be positive");
    if (!(c.solvability_tol > 0.0)) throw ConfigError("thresholds.solvability", "must be positive");
    if (c.residual_steps < 0 || c.residual_steps == 1) throw ConfigError("residual.time_steps", "0 or >= 2");

    const bool need_grid = c.kind == "forward" || c.kind == "inverse" || c.kind == "roundtrip";
    auto check_field = [&](const FieldSpec& f, const std::string& path) {
        if (f.kind == "sine-mode") check_index(f.index, c, join(path, "index"));
        if (f.kind == "gaussian") {
            if (static_cast<int>(f.center.size()) != dim) throw ConfigError(join(path, "center"), "one entry per axis");
            for (int a = 0; a < dim; ++a)
                if (!(f.center[a] > 0.0 && f.center[a] < c.lengths[a]))
                    throw ConfigError(join(path, "center"), "must lie inside the domain");
            if (!(f.width > 0.0)) throw ConfigError(join(path, "width"), "must be positive");
        }
        if (f.kind == "csv" && !fs::exists(f.path)) throw ConfigError(join(path, "path"), "file not found: " + f.path);
        if (f.kind == "coefficients")
            for (std::size_t i = 0; i < f.terms.size(); ++i)
                check_index(f.terms[i].first, c, join(path, "terms[" + std::to_string(i) + "].index"));
        if ((f.kind == "bubble" || f.kind == "gaussian") && need_grid)
            for (int n : c.nodes)
                if (n < c.modes) throw ConfigError("nodes", "fewer nodes than modes; coefficients would alias");
    };
    check_field(c.phi, "phi");
    check_field(c.psi, "psi");
    check_field(c.f, "f");
    for (std::size_t i = 0; i < c.free_values.size(); ++i)
        check_index(c.free_values[i].first, c, "free_values[" + std::to_string(i) + "].index");

    if (c.kind == "example1") {
        if (!(c.rho < 1.0)) throw ConfigError("rho", "example1 needs rho in (0, 1)");
        if (!(c.b > 0.0)) throw ConfigError("example1.b", "must be positive");
        check_index(c.mode, c, "example1.mode");
        if (!(c.horizon == 1.0 && c.t0 == 1.0)) throw ConfigError("time", "example1 is posed with t0 = T = 1");
        c.g = ProfileSpec{};
        c.g.kind = "example1";
        c.g.rho = c.rho;
        c.g.b = c.b;
        c.g.mode = c.mode;
    }
    auto& g = c.g;
    if (g.kind == "example1") {
        if (g.rho < 0.0) g.rho = c.rho;
        if (g.lambda < 0.0) {
            check_index(g.mode, c, "g.mode");
            g.lambda = eigenvalue(make_domain(c), make_mode(g.mode));
        }
    }
    try {
        const auto profile = make_profile(g);
        profile.check_coverage(c.horizon);
    } catch (const PreconditionError& e) {
        throw ConfigError("g", e.what());
    } catch (const CoverageError& e) {
        throw ConfigError("g", e.what());
    }
}

Json to_json(const RunConfig& c) {
    Json j;
    j["kind"] = c.kind;
    j["domain"] = {{"lengths", c.lengths}};
    j["rho"] = c.rho;
    j["modes"] = c.modes;
    j["nodes"] = c.nodes;
    j["time"] = {{"t0", c.t0}, {"horizon", c.horizon}, {"snapshots", c.times}};
    j["phi"] = write_field(c.phi);
    j["psi"] = write_field(c.psi);
    j["f"] = write_field(c.f);
    j["g"] = write_profile(c.g);
    j["thresholds"] = {{"null_relative", c.null_threshold}, {"solvability", c.solvability_tol}};
    j["kernel"] = {{"cells", c.kernel_cells}};
    j["free_values"] = write_terms(c.free_values);
    j["residual"] = {{"time_steps", c.residual_steps}};
    j["example1"] = {{"b", c.b}, {"mode", c.mode}};
    j["output"] = c.output;
    return j;
}

RunOutcome run(const RunConfig& c) {
    RunOutcome out;
    Context ctx{c, fs::path(c.output), {}};
    try {
        fs::create_directories(ctx.dir);
    } catch (const std::exception& e) {
        out.exit_code = Failure;
        out.message = e.what();
        return out;
    }
    try {
        if (c.kind == "forward")
            out.exit_code = run_forward(ctx);
        else if (c.kind == "inverse")
            out.exit_code = run_inverse(ctx);
        else if (c.kind == "diagnose")
            out.exit_code = run_diagnose(ctx);
        else if (c.kind == "example1")
            out.exit_code = run_example1(ctx);
        else if (c.kind == "roundtrip")
            out.exit_code = run_roundtrip(ctx);
        else
            out.exit_code = run_verify(ctx);
        if (out.exit_code == Accuracy) out.message = "verification checks failed";
    } catch (const std::exception& e) {
        out.exit_code = exit_code_for(e);
        out.message = e.what();
    }
    Json manifest{{"version", version()},
                  {"command", c.kind},
                  {"config", to_json(c)},
                  {"status", {{"exit_code", out.exit_code}, {"message", out.message}}},
                  {"artifacts", ctx.artifacts}};
    try {
        write_json(ctx.dir / "manifest.json", manifest);
        ctx.artifacts.push_back("manifest.json");
    } catch (const std::exception& e) {
        if (out.exit_code == Ok) out.exit_code = Failure;
        out.message = e.what();
    }
    out.artifacts = ctx.artifacts;
    return out;
}

std::string ml_eval(double rho, double mu, double z) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15g", ml(MLParams{rho, mu}, z));
    return buf;
}

}  // namespace subdiff::app
