#ifndef DPRE_EXPERIMENT_HPP
#define DPRE_EXPERIMENT_HPP

// Orchestration: resolved configs, the five run modes, trend sweeps over an
// N ladder, report/record serialization, and exit-code mapping.

#include <cstdint>
#include <string>
#include <vector>

#include "dpre/environment.hpp"
#include "dpre/levels.hpp"
#include "dpre/path.hpp"

#include "json.hpp"

namespace dpre {

inline constexpr const char* kEngineVersion = "0.1.0";
// Default master seed; every report echoes the seed actually used.
inline constexpr std::uint64_t kDefaultSeed = 20260816;

struct ExperimentConfig {
    int d = 1;
    std::vector<int> n_ladder = {16}; // run wants one entry, sweep any number
    DistKind dist = DistKind::gaussian;
    double c = 0.0;
    double alpha = 0.0;
    std::vector<double> b_list = {0.5, 1.0, 2.0};
    std::uint64_t samples = 1000;
    std::uint64_t seed = kDefaultSeed;
    double g_max = 50.0;
    std::string mode = "pointprocess"; // pointprocess | zet | combinatorics | cf-bounds | decorrelation
    std::string out_path;              // report JSON; stdout when empty
    std::string samples_path;          // per-sample JSON lines; skipped when empty
    int workers = 0;                   // 0 = library default
    bool lift_budgets = false;         // the --i-know flag
    double eps = 0.5;                  // decorrelation covariance threshold
    double eta_class = 0.4;            // R-class exponent knob
    int tuple_len = 2;                 // cf-bounds tuple length
    std::uint64_t cf_tuples = 200;     // cf-bounds tuples per N

    Limits limits() const;
    LevelSpec level() const { return LevelSpec{c, alpha}; }
};

// Declarative config file schema: the same keys config_to_json emits; "n"
// accepts a scalar or an array. Unknown keys are rejected.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);
void validate_config(const ExperimentConfig& cfg); // throws ConfigError

// Which convergence regime the (dist, d, alpha) combination lives in, so
// out-of-regime runs are visibly flagged in every report.
struct RegimeFlag {
    std::string name;
    bool in_regime = false;
};
RegimeFlag regime_flag(const ExperimentConfig& cfg);

struct ExperimentReport {
    nlohmann::json config; // fully resolved echo
    nlohmann::json body;   // mode-specific aggregates; sweeps add a "trend" table
    bool stats_ok = true;
    double wall_seconds = 0.0;

    nlohmann::json to_json() const;
};

ExperimentReport run_experiment(const ExperimentConfig& cfg);   // single N
ExperimentReport sweep_experiment(const ExperimentConfig& cfg); // whole ladder

// Report JSON to out_path; a sweep's trend table additionally lands next to
// it as CSV (out stem + "_trend.csv").
void write_report(const ExperimentReport& rep, const std::string& out_path);

// 0 = all statistical verdicts pass, 2 = some verdict failed. Budget and
// config errors surface as exceptions and map to exit 3 in the CLI.
int exit_code_for(const ExperimentReport& rep);

} // namespace dpre

#endif
