#include "dpre/point_process.hpp"

#include <algorithm>

#include "dpre/errors.hpp"

namespace dpre {

std::vector<std::uint64_t> window_counts(const GapProcess& gp, std::span<const double> b)
{
    std::vector<std::uint64_t> out;
    out.reserve(b.size());
    for (double bi : b) {
        if (!(bi >= 0.0))
            throw ConfigError("window_counts: negative window width");
        if (bi > gp.g_max)
            throw ConfigError("window_counts: window wider than the collection cutoff g_max");
        const auto it = std::upper_bound(gp.gaps.begin(), gp.gaps.end(), bi);
        out.push_back(static_cast<std::uint64_t>(it - gp.gaps.begin()));
    }
    return out;
}

PairDecorrelation near_pair_decorrelation(int d, int n, std::span<const GapEntry> entries, double b, double eps)
{
    PairDecorrelation out;
    std::vector<Path> qual;
    for (const GapEntry& e : entries)
        if (e.gap <= b)
            qual.push_back(path_from_id(d, n, e.id));
    out.qualifying = qual.size();
    for (std::size_t i = 0; i < qual.size(); ++i)
        for (std::size_t j = i + 1; j < qual.size(); ++j) {
            ++out.pairs;
            const double cov = static_cast<double>(coincidences(qual[i], qual[j], false)) / n;
            out.max_cov = std::max(out.max_cov, cov);
            if (cov > eps)
                ++out.violating_pairs;
        }
    return out;
}

OrderStatSeries collect_order_stats(const std::vector<std::vector<double>>& gap_lists, int k_max)
{
    if (k_max < 1)
        throw ConfigError("collect_order_stats: k_max must be positive");
    OrderStatSeries out;
    out.k_max = k_max;
    out.by_k.resize(k_max);
    out.missing.assign(k_max, 0);
    for (const auto& gaps : gap_lists)
        for (int k = 1; k <= k_max; ++k) {
            if (gaps.size() >= static_cast<std::size_t>(k))
                out.by_k[k - 1].push_back(gaps[k - 1]);
            else
                ++out.missing[k - 1];
        }
    return out;
}

} // namespace dpre
