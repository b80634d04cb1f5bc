#include "dpre/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>

#include "dpre/energy.hpp"
#include "dpre/errors.hpp"
#include "dpre/gaussian.hpp"
#include "dpre/point_process.hpp"
#include "dpre/stats_tests.hpp"
#include "dpre/walk_stats.hpp"

namespace dpre {

Limits ExperimentConfig::limits() const
{
    if (!lift_budgets)
        return Limits{};
    return Limits{std::uint64_t{1} << 62, std::uint64_t{1} << 62};
}

namespace {

const std::set<std::string>& known_modes()
{
    static const std::set<std::string> m = {"pointprocess", "zet", "combinatorics", "cf-bounds", "decorrelation"};
    return m;
}

} // namespace

ExperimentConfig config_from_json(const nlohmann::json& j)
{
    static const std::set<std::string> known = {
        "dim",  "n",    "dist",    "c",           "alpha",   "b",         "samples",   "seed",
        "gmax", "mode", "out",     "samples_out", "workers", "i_know",    "eps",       "eta_class",
        "tuple_len", "cf_tuples"};
    for (const auto& [key, _] : j.items())
        if (!known.count(key))
            throw ConfigError("config: unknown key '" + key + "'");

    ExperimentConfig cfg;
    if (j.contains("dim"))
        cfg.d = j.at("dim").get<int>();
    if (j.contains("n")) {
        if (j.at("n").is_array())
            cfg.n_ladder = j.at("n").get<std::vector<int>>();
        else
            cfg.n_ladder = {j.at("n").get<int>()};
    }
    if (j.contains("dist"))
        cfg.dist = dist_from_name(j.at("dist").get<std::string>());
    if (j.contains("c"))
        cfg.c = j.at("c").get<double>();
    if (j.contains("alpha"))
        cfg.alpha = j.at("alpha").get<double>();
    if (j.contains("b"))
        cfg.b_list = j.at("b").get<std::vector<double>>();
    if (j.contains("samples"))
        cfg.samples = j.at("samples").get<std::uint64_t>();
    if (j.contains("seed"))
        cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("gmax"))
        cfg.g_max = j.at("gmax").get<double>();
    if (j.contains("mode"))
        cfg.mode = j.at("mode").get<std::string>();
    if (j.contains("out"))
        cfg.out_path = j.at("out").get<std::string>();
    if (j.contains("samples_out"))
        cfg.samples_path = j.at("samples_out").get<std::string>();
    if (j.contains("workers"))
        cfg.workers = j.at("workers").get<int>();
    if (j.contains("i_know"))
        cfg.lift_budgets = j.at("i_know").get<bool>();
    if (j.contains("eps"))
        cfg.eps = j.at("eps").get<double>();
    if (j.contains("eta_class"))
        cfg.eta_class = j.at("eta_class").get<double>();
    if (j.contains("tuple_len"))
        cfg.tuple_len = j.at("tuple_len").get<int>();
    if (j.contains("cf_tuples"))
        cfg.cf_tuples = j.at("cf_tuples").get<std::uint64_t>();
    return cfg;
}

nlohmann::json config_to_json(const ExperimentConfig& cfg)
{
    return {{"dim", cfg.d},
            {"n", cfg.n_ladder},
            {"dist", dist_name(cfg.dist)},
            {"c", cfg.c},
            {"alpha", cfg.alpha},
            {"b", cfg.b_list},
            {"samples", cfg.samples},
            {"seed", cfg.seed},
            {"gmax", cfg.g_max},
            {"mode", cfg.mode},
            {"out", cfg.out_path},
            {"samples_out", cfg.samples_path},
            {"workers", cfg.workers},
            {"i_know", cfg.lift_budgets},
            {"eps", cfg.eps},
            {"eta_class", cfg.eta_class},
            {"tuple_len", cfg.tuple_len},
            {"cf_tuples", cfg.cf_tuples}};
}

void validate_config(const ExperimentConfig& cfg)
{
    if (cfg.d < 1)
        throw ConfigError("config: dim must be >= 1");
    if (cfg.n_ladder.empty())
        throw ConfigError("config: empty N ladder");
    for (int n : cfg.n_ladder)
        if (n < 1)
            throw ConfigError("config: N must be >= 1");
    if (!known_modes().count(cfg.mode))
        throw ConfigError("config: unknown mode '" + cfg.mode + "'");
    if (cfg.samples < 1)
        throw ConfigError("config: samples must be >= 1");
    if (!(cfg.g_max > 0.0))
        throw ConfigError("config: gmax must be positive");
    if (cfg.b_list.empty())
        throw ConfigError("config: empty window list");
    for (double b : cfg.b_list) {
        if (!(b > 0.0))
            throw ConfigError("config: window widths must be positive");
        if (b > cfg.g_max)
            throw ConfigError("config: window width exceeds gmax");
    }
    if (!(cfg.alpha >= 0.0))
        throw ConfigError("config: alpha must be >= 0");
    if (!(cfg.eta_class > 0.0 && cfg.eta_class < 0.5))
        throw ConfigError("config: eta_class must lie in (0, 0.5)");
    if (cfg.tuple_len < 1 || cfg.tuple_len > 4)
        throw ConfigError("config: tuple_len must be 1..4");
    if (cfg.mode == "zet" && cfg.b_list.size() > 4)
        throw ConfigError("config: zet mode takes at most 4 windows (the tuple length)");
    // budget gate before any work; enumeration modes touch (2d)^N paths
    if (cfg.mode != "cf-bounds")
        for (int n : cfg.n_ladder)
            path_count(cfg.d, n, cfg.limits().enum_cap);
}

RegimeFlag regime_flag(const ExperimentConfig& cfg)
{
    if (cfg.dist == DistKind::gaussian && cfg.d == 1 && cfg.alpha < 0.25)
        return {"gaussian_d1_alpha_lt_quarter", true};
    if (cfg.dist == DistKind::gaussian && cfg.d >= 2 && cfg.alpha < 0.5)
        return {"gaussian_dge2_alpha_lt_half", true};
    if (cfg.dist != DistKind::gaussian && cfg.alpha == 0.0)
        return {"nongaussian_flat_levels", true};
    return {"outside_proved_regimes", false};
}

nlohmann::json ExperimentReport::to_json() const
{
    return {{"engine_version", kEngineVersion},
            {"config", config},
            {"regime", body.contains("regime") ? body.at("regime") : nlohmann::json()},
            {"body", body},
            {"stats_ok", stats_ok},
            {"wall_seconds", wall_seconds}};
}

namespace {

struct ModeResult {
    nlohmann::json body;
    nlohmann::json trend_row; // flat scalars for the sweep table
    bool ok = true;
    std::vector<std::string> sample_lines;
};

ModeResult run_pointprocess(const ExperimentConfig& cfg, int n)
{
    const Limits lim = cfg.limits();
    const double e = level_value(cfg.level(), n);
    const double delta = delta_n(cfg.d, n, e);
    const std::uint64_t total = path_count(cfg.d, n, lim.enum_cap);

    ModeResult mr;
    std::vector<std::vector<double>> gap_lists;
    gap_lists.reserve(cfg.samples);
    std::vector<std::vector<std::uint64_t>> counts_by_b(cfg.b_list.size());
    for (std::uint64_t s = 0; s < cfg.samples; ++s) {
        const EnvField env{cfg.seed, s, cfg.dist};
        GapProcess gp = all_gaps(cfg.d, n, env, e, cfg.g_max, lim, cfg.workers);
        const auto wc = window_counts(gp, cfg.b_list);
        for (std::size_t j = 0; j < wc.size(); ++j)
            counts_by_b[j].push_back(wc[j]);
        nlohmann::json line = {{"n", n}, {"sample", s}, {"counts", wc}, {"gaps", gp.gaps}};
        mr.sample_lines.push_back(line.dump());
        gap_lists.push_back(std::move(gp.gaps));
    }

    const OrderStatSeries os = collect_order_stats(gap_lists, 2);
    nlohmann::json windows = nlohmann::json::array();
    bool ok = true;
    double gof_p_min = 1.0;
    double mean_err_max = 0.0;
    for (std::size_t j = 0; j < cfg.b_list.size(); ++j) {
        const double b = cfg.b_list[j];
        double mean = 0.0;
        for (std::uint64_t c : counts_by_b[j])
            mean += static_cast<double>(c);
        mean /= static_cast<double>(cfg.samples);
        const double band = 3.0 * std::sqrt(b / static_cast<double>(cfg.samples));
        const TestVerdict gof = poisson_gof(counts_by_b[j], b, 0.01);
        ok = ok && gof.pass;
        gof_p_min = std::min(gof_p_min, gof.p_value);
        mean_err_max = std::max(mean_err_max, std::abs(mean - b));
        windows.push_back({{"b", b},
                           {"mean_count", mean},
                           {"expected", b},
                           {"mean_abs_err", std::abs(mean - b)},
                           {"band_3sigma", band},
                           {"mean_in_band", std::abs(mean - b) <= band},
                           {"gof", gof.to_json()}});
    }

    const TestVerdict ks1 = gamma_order_stat_test(os.by_k[0], 1);
    const TestVerdict ks2 = gamma_order_stat_test(os.by_k[1], 2);
    ok = ok && ks1.pass && ks2.pass;

    mr.body = {{"n", n},
               {"e_level", e},
               {"delta_n", delta},
               {"total_paths", total},
               {"windows", windows},
               {"order_stats",
                {{"k1", ks1.to_json()},
                 {"k2", ks2.to_json()},
                 {"missing_k1", os.missing[0]},
                 {"missing_k2", os.missing[1]}}}};
    mr.ok = ok;
    mr.trend_row = {{"n", n},
                    {"ks_k1", ks1.statistic},
                    {"ks_k2", ks2.statistic},
                    {"gof_p_min", gof_p_min},
                    {"mean_count_err_max", mean_err_max}};
    return mr;
}

ModeResult run_decorrelation(const ExperimentConfig& cfg, int n)
{
    const Limits lim = cfg.limits();
    const double e = level_value(cfg.level(), n);
    const double b = cfg.b_list.front();

    ModeResult mr;
    std::uint64_t qualifying = 0, pairs = 0, violating = 0, bad_samples = 0;
    double max_cov = 0.0;
    for (std::uint64_t s = 0; s < cfg.samples; ++s) {
        const EnvField env{cfg.seed, s, cfg.dist};
        const auto entries = collect_near_level(cfg.d, n, env, e, b, lim, cfg.workers);
        const PairDecorrelation pd = near_pair_decorrelation(cfg.d, n, entries, b, cfg.eps);
        qualifying += pd.qualifying;
        pairs += pd.pairs;
        violating += pd.violating_pairs;
        bad_samples += pd.violating_pairs > 0 ? 1 : 0;
        max_cov = std::max(max_cov, pd.max_cov);
        nlohmann::json line = {{"n", n},
                               {"sample", s},
                               {"qualifying", pd.qualifying},
                               {"pairs", pd.pairs},
                               {"violating", pd.violating_pairs},
                               {"max_cov", pd.max_cov}};
        mr.sample_lines.push_back(line.dump());
    }
    const double freq = static_cast<double>(bad_samples) / static_cast<double>(cfg.samples);
    const double pair_share = pairs > 0 ? static_cast<double>(violating) / static_cast<double>(pairs) : 0.0;
    mr.body = {{"n", n},
               {"b", b},
               {"eps", cfg.eps},
               {"qualifying_total", qualifying},
               {"pairs_total", pairs},
               {"violating_total", violating},
               {"samples_with_violation", bad_samples},
               {"violating_frequency", freq},
               {"pair_violation_share", pair_share},
               {"max_cov", max_cov}};
    mr.trend_row = {{"n", n}, {"violating_frequency", freq}, {"pair_violation_share", pair_share}, {"max_cov", max_cov}};
    return mr;
}

ModeResult run_combinatorics(const ExperimentConfig& cfg, int n)
{
    const Limits lim = cfg.limits();
    const Histogram ph = pair_coincidence_histogram(cfg.d, n, lim);
    const Histogram rh = return_count_histogram(cfg.d, 2 * n, lim);
    const bool identity_ok = ph == rh;
    const double hi_frac = high_coincidence_fraction(cfg.d, n, cfg.eta_class, lim);

    ModeResult mr;
    mr.body = {{"n", n},
               {"identity_ok", identity_ok},
               {"pair_coincidence_hist", hist_to_json(ph)},
               {"return_count_hist", hist_to_json(rh)},
               {"high_coincidence_fraction", hi_frac},
               {"eta", cfg.eta_class}};
    mr.ok = identity_ok;
    mr.trend_row = {{"n", n}, {"identity_ok", identity_ok ? 1 : 0}, {"high_coincidence_fraction", hi_frac}};
    return mr;
}

ModeResult run_zet(const ExperimentConfig& cfg, int n)
{
    const WindowSpec w{cfg.b_list};
    const ZetResult zr = zet_sum(cfg.d, n, cfg.level(), w, cfg.eta_class, cfg.limits(), cfg.workers);
    ModeResult mr;
    mr.body = zr.to_json();
    mr.body["abs_err"] = std::abs(zr.sum - zr.target);
    mr.trend_row = {{"n", n},
                    {"sum", zr.sum},
                    {"abs_err", std::abs(zr.sum - zr.target)},
                    {"inside_share", zr.inside_share}};
    return mr;
}

ModeResult run_cf_bounds(const ExperimentConfig& cfg, int n)
{
    const Limits lim = cfg.limits();
    const std::uint64_t total = path_count(cfg.d, n, lim.enum_cap);
    const int l = cfg.tuple_len;
    const double thresh =
        cfg.d == 1 ? std::pow(n, cfg.eta_class + 0.5) : std::pow(n, cfg.eta_class); // meeting-count form

    constexpr std::uint64_t kTagTuple = 21;
    SampleRng rng(cfg.seed, kTagTuple, static_cast<std::uint64_t>(n));
    CfBoundsReport agg;
    agg.zeta_hat = std::numeric_limits<double>::infinity();
    std::uint64_t kept = 0, skipped = 0;
    const std::uint64_t max_draws = 64 * std::max<std::uint64_t>(cfg.cf_tuples, 1);
    for (std::uint64_t att = 0; att < max_draws && kept < cfg.cf_tuples; ++att) {
        std::vector<PathId> ids(l);
        for (auto& id : ids)
            id = rng.next_below(total);
        bool dup = false;
        for (int i = 0; i < l; ++i)
            for (int j = i + 1; j < l; ++j)
                dup = dup || ids[i] == ids[j];
        if (dup) {
            ++skipped;
            continue;
        }
        const PathTuple t = tuple_from_ids(cfg.d, n, ids);
        bool inside = true;
        for (int i = 0; i < l && inside; ++i)
            for (int j = i + 1; j < l; ++j)
                inside = inside && coincidences(t.paths[i], t.paths[j], false) <= thresh;
        if (!inside) {
            ++skipped;
            continue;
        }
        const CfBoundsReport rep = berry_esseen_check(t, cfg.dist);
        agg.c_hat = std::max(agg.c_hat, rep.c_hat);
        agg.zeta_hat = std::min(agg.zeta_hat, rep.zeta_hat);
        agg.max_shell_abs = std::max(agg.max_shell_abs, rep.max_shell_abs);
        agg.max_abs_diff = std::max(agg.max_abs_diff, rep.max_abs_diff);
        agg.inner_radius = rep.inner_radius;
        agg.outer_radius = rep.outer_radius;
        ++kept;
    }
    if (kept == 0)
        throw ConfigError("cf-bounds: no inside-class tuples found, raise cf_tuples or eta_class");

    ModeResult mr;
    mr.body = {{"n", n},
               {"tuple_len", l},
               {"tuples", kept},
               {"skipped_draws", skipped},
               {"c_hat_max", agg.c_hat},
               {"zeta_hat_min", agg.zeta_hat},
               {"max_shell_abs", agg.max_shell_abs},
               {"max_abs_diff", agg.max_abs_diff},
               {"inner_radius", agg.inner_radius},
               {"outer_radius", agg.outer_radius}};
    mr.trend_row = {{"n", n},
                    {"c_hat_max", agg.c_hat},
                    {"zeta_hat_min", agg.zeta_hat},
                    {"max_abs_diff", agg.max_abs_diff}};
    return mr;
}

ModeResult dispatch(const ExperimentConfig& cfg, int n)
{
    if (cfg.mode == "pointprocess")
        return run_pointprocess(cfg, n);
    if (cfg.mode == "decorrelation")
        return run_decorrelation(cfg, n);
    if (cfg.mode == "combinatorics")
        return run_combinatorics(cfg, n);
    if (cfg.mode == "zet")
        return run_zet(cfg, n);
    return run_cf_bounds(cfg, n);
}

void write_sample_lines(const ExperimentConfig& cfg, const std::vector<std::string>& lines, bool append)
{
    if (cfg.samples_path.empty() || lines.empty())
        return;
    std::ofstream os(cfg.samples_path, append ? std::ios::app : std::ios::trunc);
    if (!os)
        throw ConfigError("cannot open samples_out path: " + cfg.samples_path);
    for (const auto& l : lines)
        os << l << '\n';
}

} // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg)
{
    validate_config(cfg);
    if (cfg.n_ladder.size() != 1)
        throw ConfigError("run expects a single N; use sweep for a ladder");
    const auto t0 = std::chrono::steady_clock::now();

    ModeResult mr = dispatch(cfg, cfg.n_ladder[0]);
    write_sample_lines(cfg, mr.sample_lines, false);

    ExperimentReport rep;
    rep.config = config_to_json(cfg);
    const RegimeFlag rf = regime_flag(cfg);
    rep.body = std::move(mr.body);
    rep.body["regime"] = {{"name", rf.name}, {"in_regime", rf.in_regime}};
    rep.stats_ok = mr.ok;
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

ExperimentReport sweep_experiment(const ExperimentConfig& cfg)
{
    validate_config(cfg);
    const auto t0 = std::chrono::steady_clock::now();

    nlohmann::json runs = nlohmann::json::array();
    nlohmann::json trend = nlohmann::json::array();
    bool ok = true;
    bool first = true;
    for (int n : cfg.n_ladder) {
        ModeResult mr = dispatch(cfg, n);
        write_sample_lines(cfg, mr.sample_lines, !first);
        first = false;
        ok = ok && mr.ok;
        runs.push_back(std::move(mr.body));
        trend.push_back(std::move(mr.trend_row));
    }

    ExperimentReport rep;
    rep.config = config_to_json(cfg);
    const RegimeFlag rf = regime_flag(cfg);
    rep.body = {{"runs", runs}, {"trend", trend},
                {"regime", {{"name", rf.name}, {"in_regime", rf.in_regime}}}};
    rep.stats_ok = ok;
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

void write_report(const ExperimentReport& rep, const std::string& out_path)
{
    if (out_path.empty())
        return;
    std::ofstream os(out_path);
    if (!os)
        throw ConfigError("cannot open report path: " + out_path);
    os << rep.to_json().dump(2) << '\n';

    if (!rep.body.contains("trend"))
        return;
    std::string stem = out_path;
    const auto dot = stem.rfind(".json");
    if (dot != std::string::npos && dot == stem.size() - 5)
        stem.resize(dot);
    std::ofstream cs(stem + "_trend.csv");
    if (!cs)
        throw ConfigError("cannot open trend CSV path: " + stem + "_trend.csv");
    const auto& trend = rep.body.at("trend");
    if (trend.empty())
        return;
    bool firstcol = true;
    for (const auto& [key, _] : trend.front().items()) {
        cs << (firstcol ? "" : ",") << key;
        firstcol = false;
    }
    cs << '\n';
    for (const auto& row : trend) {
        firstcol = true;
        for (const auto& [_, val] : row.items()) {
            cs << (firstcol ? "" : ",") << val.dump();
            firstcol = false;
        }
        cs << '\n';
    }
}

int exit_code_for(const ExperimentReport& rep) { return rep.stats_ok ? 0 : 2; }

} // namespace dpre
