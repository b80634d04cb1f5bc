#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "dpre/errors.hpp"
#include "dpre/experiment.hpp"
#include "dpre/stats_tests.hpp"

int main(int argc, char** argv)
{
    using namespace dpre;

    // the config file must be known before flags bind, so flags can override it
    std::string config_path;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--config" && i + 1 < argc)
            config_path = argv[i + 1];
        else if (a.rfind("--config=", 0) == 0)
            config_path = a.substr(9);
    }

    ExperimentConfig cfg;
    try {
        if (!config_path.empty()) {
            std::ifstream is(config_path);
            if (!is)
                throw ConfigError("cannot open config file: " + config_path);
            nlohmann::json j;
            is >> j;
            cfg = config_from_json(j);
        }
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 3;
    }

    CLI::App app{"near-level energy statistics of directed polymers on Z^d"};
    app.require_subcommand(1);

    std::string dist_str = dist_name(cfg.dist);
    std::string config_echo;
    int trials = 200;
    std::uint64_t st_samples = 1000, st_seed = kDefaultSeed;
    double st_b = 2.0;

    const auto bind = [&](CLI::App* c) {
        c->add_option("--config", config_echo, "JSON config file; flags override its values");
        c->add_option("--dim", cfg.d, "lattice dimension d");
        c->add_option("--n", cfg.n_ladder, "polymer length N; sweep takes several");
        c->add_option("--dist", dist_str, "environment law: gaussian | uniform | cexp");
        c->add_option("--c", cfg.c, "level prefactor c in E_N = c N^alpha");
        c->add_option("--alpha", cfg.alpha, "level exponent alpha");
        c->add_option("--b", cfg.b_list, "window widths in units of delta_N");
        c->add_option("--samples", cfg.samples, "environment samples M");
        c->add_option("--seed", cfg.seed, "master seed");
        c->add_option("--gmax", cfg.g_max, "gap collection cutoff G_max");
        c->add_option("--mode", cfg.mode, "pointprocess | zet | combinatorics | cf-bounds | decorrelation");
        c->add_option("--out", cfg.out_path, "report JSON path; stdout when empty");
        c->add_option("--samples-out", cfg.samples_path, "per-sample JSON-lines path");
        c->add_option("--workers", cfg.workers, "worker threads, 0 = library default");
        c->add_option("--eps", cfg.eps, "decorrelation covariance threshold");
        c->add_option("--eta-class", cfg.eta_class, "pair-overlap class exponent");
        c->add_option("--tuple-len", cfg.tuple_len, "cf-bounds tuple length");
        c->add_option("--cf-tuples", cfg.cf_tuples, "cf-bounds tuples per N");
        c->add_flag("--i-know", cfg.lift_budgets, "lift the enumeration/tuple budgets");
    };

    CLI::App* run = app.add_subcommand("run", "single-N experiment");
    bind(run);
    CLI::App* sweep = app.add_subcommand("sweep", "N-ladder trend experiment");
    bind(sweep);
    CLI::App* self = app.add_subcommand("selftest", "synthetic-null calibration of the GOF tests");
    self->add_option("--trials", trials, "meta-trials");
    self->add_option("--samples", st_samples, "draws per trial");
    self->add_option("--seed", st_seed, "master seed");
    self->add_option("--b", st_b, "Poisson null mean");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 3;
    }

    try {
        if (self->parsed()) {
            const SelftestReport rep = run_selftest(trials, st_samples, st_seed, st_b);
            std::cout << rep.to_json().dump(2) << "\n";
            return rep.ok ? 0 : 2;
        }
        cfg.dist = dist_from_name(dist_str);
        const ExperimentReport rep = run->parsed() ? run_experiment(cfg) : sweep_experiment(cfg);
        if (cfg.out_path.empty()) {
            std::cout << rep.to_json().dump(2) << "\n";
        } else {
            write_report(rep, cfg.out_path);
            std::cout << "report: " << cfg.out_path << " stats_ok=" << (rep.stats_ok ? "true" : "false") << "\n";
        }
        return exit_code_for(rep);
    } catch (const BudgetExceeded& e) {
        std::cerr << "budget error: " << e.what() << "\n";
        return 3;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
