// Command-line front end. Every subcommand reads an optional flat config
// file and applies flag overrides on top of it.

#include "eiginf/harness.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace {

struct cli_flags {
    std::string config;
    std::map<std::string, std::string> overrides;
    std::string eigs;  // estimate: eigenvalue file
};

void add_common(CLI::App* sub, cli_flags& f)
{
    sub->add_option("--config", f.config, "flat key = value config file");
    auto ov = [&](const char* flag, const char* key, const char* help) {
        sub->add_option_function<std::string>(
            flag, [&f, key](const std::string& v) { f.overrides[key] = v; }, help);
    };
    ov("--powers", "powers", "comma-separated powers");
    ov("--mults", "mults", "comma-separated multiplicities");
    ov("--N", "N", "number of sensors");
    ov("--M", "M", "number of samples");
    ov("--sigma2", "sigma2", "noise variance (overrides --snr-db)");
    ov("--snr-db", "snr_db", "comma-separated SNR grid in dB");
    ov("--trials", "trials", "Monte Carlo trials");
    ov("--seed", "seed", "base seed");
    ov("--out", "out", "output CSV path (default stdout)");
    ov("--estimators", "estimators", "comma-separated subset of stieltjes,classical,moment");
    ov("--scenario", "scenario", "a, b, custom or noise");
    ov("--threads", "threads", "worker threads");
    sub->add_option_function<std::vector<std::string>>(
        "--set",
        [&f](const std::vector<std::string>& kvs) {
            for (const auto& kv : kvs) {
                auto eq = kv.find('=');
                if (eq == std::string::npos) throw CLI::ValidationError("--set", "expects key=value");
                f.overrides[kv.substr(0, eq)] = kv.substr(eq + 1);
            }
        },
        "any config key as key=value");
}

void emit(const std::string& path, const std::string& text)
{
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream os(path);
    if (!os) throw eiginf::resource_error("cannot write " + path);
    os << text;
}

std::vector<double> read_eigs(const std::string& path)
{
    std::ifstream is(path);
    if (!is) throw eiginf::config_error("cannot open eigenvalue file " + path);
    std::vector<double> v;
    std::string tok;
    while (is >> tok) {
        for (char& ch : tok)
            if (ch == ',') ch = ' ';
        std::istringstream ts(tok);
        double x;
        while (ts >> x) v.push_back(x);
    }
    return v;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Blind multi-source power estimation from sample covariance eigenvalues"};
    app.require_subcommand(1);
    cli_flags flags;
    const char* names[][2] = {
        {"density", "limiting eigenvalue density on a grid"},
        {"support", "support intervals and per-power separability"},
        {"separability", "critical c0 or c sweeps"},
        {"estimate", "power estimates from one draw or an eigenvalue file"},
        {"nmse", "Monte Carlo NMSE per estimator and power"},
        {"cdf", "sorted per-trial estimates"},
        {"rci", "rate of correct multiplicity inference"},
    };
    std::map<std::string, CLI::App*> subs;
    for (auto& nm : names) {
        CLI::App* s = app.add_subcommand(nm[0], nm[1]);
        add_common(s, flags);
        subs[nm[0]] = s;
    }
    subs["estimate"]->add_option("--eigs", flags.eigs, "file of eigenvalues (whitespace or comma separated)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        eiginf::experiment_config cfg;
        if (!flags.config.empty()) cfg = eiginf::load_config(flags.config);
        for (const auto& [k, v] : flags.overrides) eiginf::set_config_value(cfg, k, v);
        eiginf::validate_config(cfg);

        std::string cmd = app.get_subcommands().front()->get_name();
        if (cmd == "density") {
            auto r = eiginf::run_density(cfg);
            emit(cfg.out, r.csv);
            std::cerr << "support intervals: " << r.support.size() << "\n";
        } else if (cmd == "support") {
            emit(cfg.out, eiginf::run_support(cfg));
        } else if (cmd == "separability") {
            emit(cfg.out, eiginf::run_separability(cfg));
        } else if (cmd == "estimate") {
            if (!flags.eigs.empty()) {
                std::vector<double> lam = read_eigs(flags.eigs);
                emit(cfg.out, eiginf::run_estimate(cfg, &lam));
            } else {
                emit(cfg.out, eiginf::run_estimate(cfg));
            }
        } else if (cmd == "nmse") {
            auto r = eiginf::run_nmse(cfg);
            emit(cfg.out, r.csv);
            if (!cfg.dump.empty()) emit(cfg.dump, r.dump_csv);
            for (double snr : cfg.snr_db) std::cerr << "nmse sweep done at " << snr << " dB\n";
        } else if (cmd == "cdf") {
            emit(cfg.out, eiginf::run_estimator_cdf(cfg));
        } else if (cmd == "rci") {
            auto r = eiginf::run_rci(cfg);
            emit(cfg.out, r.csv);
        }
    } catch (const eiginf::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const eiginf::contract_error& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const eiginf::domain_error& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const eiginf::numerical_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const eiginf::resource_error& e) {
        std::cerr << "resource cap: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
