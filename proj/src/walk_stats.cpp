#include "dpre/walk_stats.hpp"

#include <omp.h>

#include <array>
#include <cmath>
#include <cstring>
#include <vector>

#include "dpre/rng.hpp"

namespace dpre {

namespace {

int resolve_workers(int w) { return w > 0 ? w : omp_get_max_threads(); }

// Depth-first scan of all (2d)^n walks, counting visits to the origin.
// One shared site buffer per scan; steps are applied and undone in place.
struct VisitScan {
    int d;
    int n;
    Histogram hist;
    std::array<std::int32_t, kMaxEnumDim> x{};
    int nonzero_axes = 0; // x == origin iff no axis is nonzero

    void run() {
        descend(0, 1);
    }

    void descend(int depth, int visits) {
        if (depth == n) {
            ++hist[static_cast<std::uint64_t>(visits)];
            return;
        }
        for (int k = 0; k < 2 * d; ++k) {
            const int axis = k >> 1;
            const std::int32_t sign = (k & 1) ? -1 : 1;
            const std::int32_t before = x[axis];
            x[axis] += sign;
            nonzero_axes += (x[axis] != 0) - (before != 0);
            descend(depth + 1, visits + (nonzero_axes == 0 ? 1 : 0));
            x[axis] = before;
            nonzero_axes += (before != 0) - (x[axis] + sign != 0);
        }
    }
};

} // namespace

Histogram return_count_histogram(int d, int horizon, const Limits& lim) {
    if (d < 1 || d > kMaxEnumDim) throw std::invalid_argument("return_count_histogram: d out of range");
    path_count(d, horizon, lim.enum_cap);
    VisitScan scan{d, horizon, {}, {}, 0};
    scan.run();
    return scan.hist;
}

Histogram pair_coincidence_histogram(int d, int n, const Limits& lim) {
    const std::uint64_t total = path_count_unchecked(d, n);
    if (total > lim.enum_cap || total * total / total != total || total * total > lim.enum_cap)
        throw BudgetExceeded("pair histogram over (2d)^(2n) = " + std::to_string(total) + "^2 pairs exceeds cap " +
                             std::to_string(lim.enum_cap));
    const auto paths = enumerate_paths(d, n, lim);
    const auto P = static_cast<std::int64_t>(paths.size());

    Histogram hist;
#pragma omp parallel
    {
        Histogram local;
#pragma omp for schedule(static)
        for (std::int64_t i = 0; i < P; ++i) {
            for (std::int64_t j = 0; j < P; ++j) {
                const int s = coincidences(paths[static_cast<std::size_t>(i)], paths[static_cast<std::size_t>(j)], true);
                ++local[static_cast<std::uint64_t>(s)];
            }
        }
#pragma omp critical
        for (const auto& [k, c] : local) hist[k] += c;
    }
    return hist;
}

double high_coincidence_fraction(int d, int n, double eta, const Limits& lim) {
    const Histogram h = pair_coincidence_histogram(d, n, lim);
    const double threshold = std::pow(static_cast<double>(n), 0.5 + eta);
    std::uint64_t total = 0, high = 0;
    for (const auto& [s_incl, c] : h) {
        total += c;
        if (static_cast<double>(s_incl) - 1.0 >= threshold) high += c; // covariance count excludes the origin
    }
    return static_cast<double>(high) / static_cast<double>(total);
}

namespace {

constexpr std::uint64_t kTagWalk = 1;
constexpr std::uint64_t kTagEscape = 2;

struct WalkAccum {
    Histogram visit_hist;
    Histogram first_return_hist;
    std::uint64_t censored = 0;
    std::uint64_t escapes = 0;
    std::uint64_t late_returns = 0;

    void merge(const WalkAccum& o) {
        for (const auto& [k, c] : o.visit_hist) visit_hist[k] += c;
        for (const auto& [k, c] : o.first_return_hist) first_return_hist[k] += c;
        censored += o.censored;
        escapes += o.escapes;
        late_returns += o.late_returns;
    }
};

} // namespace

ReturnStats return_stats_mc(int d, int n, std::uint64_t samples, std::uint64_t seed, const ReturnStatsOptions& opt) {
    if (d < 1) throw std::invalid_argument("return_stats_mc: d < 1");
    const bool track_escape = d >= 3;
    const auto M = static_cast<std::int64_t>(samples);
    const int workers = resolve_workers(opt.workers);

    WalkAccum total;
#pragma omp parallel num_threads(workers)
    {
        WalkAccum local;
        std::vector<std::int64_t> pos(static_cast<std::size_t>(d));
#pragma omp for schedule(static)
        for (std::int64_t sample = 0; sample < M; ++sample) {
            SampleRng rng(seed, kTagWalk, static_cast<std::uint64_t>(sample));
            std::fill(pos.begin(), pos.end(), 0);
            int nonzero = 0;
            std::uint64_t visits = 1;
            std::uint64_t first_return = 0;
            for (int m = 1; m <= n; ++m) {
                const auto k = rng.next_below(2u * static_cast<std::uint64_t>(d));
                const auto axis = static_cast<std::size_t>(k >> 1);
                const std::int64_t before = pos[axis];
                pos[axis] += (k & 1) ? -1 : 1;
                nonzero += (pos[axis] != 0) - (before != 0);
                if (nonzero == 0) {
                    ++visits;
                    if (first_return == 0) first_return = static_cast<std::uint64_t>(m);
                }
            }
            ++local.visit_hist[visits];
            if (first_return > 0)
                ++local.first_return_hist[first_return];
            else
                ++local.censored;

            if (track_escape) {
                SampleRng erng(seed, kTagEscape, static_cast<std::uint64_t>(sample));
                std::fill(pos.begin(), pos.end(), 0);
                nonzero = 0;
                std::uint64_t returned_at = 0;
                for (std::uint64_t m = 1; m <= opt.escape_horizon; ++m) {
                    const auto k = erng.next_below(2u * static_cast<std::uint64_t>(d));
                    const auto axis = static_cast<std::size_t>(k >> 1);
                    const std::int64_t before = pos[axis];
                    pos[axis] += (k & 1) ? -1 : 1;
                    nonzero += (pos[axis] != 0) - (before != 0);
                    if (nonzero == 0) { returned_at = m; break; }
                }
                if (returned_at == 0)
                    ++local.escapes;
                else if (returned_at > opt.escape_horizon / 4)
                    ++local.late_returns;
            }
        }
#pragma omp critical
        total.merge(local);
    }

    ReturnStats rs;
    rs.d = d;
    rs.n = n;
    rs.samples = samples;
    rs.visit_hist = std::move(total.visit_hist);
    rs.first_return_hist = std::move(total.first_return_hist);
    rs.first_return_censored = total.censored;
    if (track_escape) {
        rs.escape_prob = static_cast<double>(total.escapes) / static_cast<double>(samples);
        rs.escape_horizon = opt.escape_horizon;
        rs.escape_bias_estimate = static_cast<double>(total.late_returns) / static_cast<double>(samples);
    }
    return rs;
}

void hist_to_csv(std::ostream& os, const Histogram& h, const std::string& key_name) {
    os << key_name << ",count\n";
    for (const auto& [k, c] : h) os << k << ',' << c << '\n';
}

nlohmann::json hist_to_json(const Histogram& h) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, c] : h) j[std::to_string(k)] = c;
    return j;
}

nlohmann::json ReturnStats::to_json() const {
    nlohmann::json j{{"d", d},
                     {"n", n},
                     {"samples", samples},
                     {"visit_hist", hist_to_json(visit_hist)},
                     {"first_return_hist", hist_to_json(first_return_hist)},
                     {"first_return_censored", first_return_censored}};
    if (escape_prob) {
        j["escape_prob"] = *escape_prob;
        j["escape_horizon"] = escape_horizon;
        j["escape_bias_estimate"] = escape_bias_estimate;
    }
    return j;
}

} // namespace dpre
