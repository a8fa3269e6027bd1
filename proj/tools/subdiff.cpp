#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "subdiff/app.hpp"
#include "subdiff/errors.hpp"

using subdiff::app::Json;

namespace {

struct Overrides {
    std::string config;
    std::optional<std::string> out;
    std::optional<double> rho, t0, b;
    std::optional<int> modes;
    std::optional<long long> seed;  // reserved; no command is stochastic
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config, "JSON configuration file");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--rho", o.rho, "fractional order in (0, 1]");
    cmd->add_option("--modes", o.modes, "retained modes per axis");
    cmd->add_option("--t0", o.t0, "observation time");
    cmd->add_option("--b", o.b, "example1 exponent");
    cmd->add_option("--seed", o.seed, "reserved");
}

int run_command(const std::string& kind, const Overrides& o) {
    try {
        Json j = Json::object();
        if (!o.config.empty()) {
            std::ifstream is(o.config, std::ios::binary);
            if (!is) throw subdiff::ConfigError("config", "cannot open '" + o.config + "'");
            try {
                j = Json::parse(is);
            } catch (const nlohmann::json::parse_error& e) {
                throw subdiff::ConfigError("config", std::string("invalid JSON: ") + e.what());
            }
        }
        if (o.out) j["output"] = *o.out;
        if (o.rho) j["rho"] = *o.rho;
        if (o.modes) j["modes"] = *o.modes;
        if (o.t0) j["time"]["t0"] = *o.t0;
        if (o.b) j["example1"]["b"] = *o.b;
        const auto cfg = subdiff::app::parse_config(j, kind);
        const auto outcome = subdiff::app::run(cfg);
        if (outcome.exit_code != 0) std::cerr << "subdiff " << kind << ": " << outcome.message << "\n";
        else std::cout << cfg.output << "/manifest.json\n";
        return outcome.exit_code;
    } catch (const subdiff::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return subdiff::app::ConfigInvalid;
    } catch (const std::exception& e) {
        std::cerr << "subdiff " << kind << ": " << e.what() << "\n";
        return subdiff::app::exit_code_for(e);
    }
}

}  // namespace

int main(int argc, char** argv) {
#ifdef _OPENMP
    if (const char* env = std::getenv("SUBDIFF_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) omp_set_num_threads(n);
    }
#endif
    CLI::App app{"Forward and inverse source problems for subdiffusion"};
    app.set_version_flag("--version", subdiff::app::version());
    app.require_subcommand(1);

    Overrides o;
    const std::pair<const char*, const char*> commands[] = {
        {"forward", "forward"},         {"invert", "inverse"},       {"diagnose-modes", "diagnose"},
        {"example1", "example1"},       {"roundtrip", "roundtrip"},  {"verify", "verify"},
    };
    std::string selected;
    for (const auto& [name, kind] : commands) {
        auto* cmd = app.add_subcommand(name);
        add_common(cmd, o);
        cmd->callback([&selected, k = std::string(kind)] { selected = k; });
    }

    double rho = 0.5, mu = 1.0, z = 0.0;
    auto* ml = app.add_subcommand("ml-eval", "print E_{rho,mu}(z)");
    ml->add_option("--rho", rho)->required();
    ml->add_option("--mu", mu);
    ml->add_option("--z", z)->required();
    ml->callback([&selected] { selected = "ml-eval"; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : subdiff::app::ConfigInvalid;
    }

    if (selected == "ml-eval") {
        try {
            std::cout << subdiff::app::ml_eval(rho, mu, z) << "\n";
            return 0;
        } catch (const std::exception& e) {
            std::cerr << "ml-eval: " << e.what() << "\n";
            return subdiff::app::exit_code_for(e);
        }
    }
    return run_command(selected, o);
}
