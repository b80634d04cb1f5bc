#include "dpre/stats_tests.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

#include "dpre/errors.hpp"

namespace dpre {

nlohmann::json TestVerdict::to_json() const
{
    return {{"pass", pass},         {"statistic", statistic}, {"p_value", p_value},
            {"threshold", threshold}, {"n_obs", n_obs},         {"detail", detail}};
}

TestVerdict poisson_gof(const std::vector<std::uint64_t>& counts, double mean, double level)
{
    if (counts.empty())
        throw std::invalid_argument("poisson_gof: no observations");
    if (!(mean >= 0.0))
        throw std::invalid_argument("poisson_gof: negative mean");

    TestVerdict v;
    v.n_obs = counts.size();
    v.threshold = level;
    const double m = static_cast<double>(counts.size());

    if (mean == 0.0) {
        const bool all_zero = std::all_of(counts.begin(), counts.end(), [](std::uint64_t c) { return c == 0; });
        v.pass = all_zero;
        v.p_value = all_zero ? 1.0 : 0.0;
        v.detail = "degenerate Poisson(0)";
        return v;
    }

    std::uint64_t kmax = 0;
    for (std::uint64_t c : counts)
        kmax = std::max(kmax, c);

    // observed and expected per raw cell 0..kmax, plus the > kmax tail
    std::vector<double> obs(kmax + 2, 0.0), expd(kmax + 2, 0.0);
    for (std::uint64_t c : counts)
        obs[c] += 1.0;
    double pmf = std::exp(-mean); // k = 0
    double cdf = 0.0;
    for (std::uint64_t k = 0; k <= kmax; ++k) {
        expd[k] = m * pmf;
        cdf += pmf;
        pmf *= mean / static_cast<double>(k + 1);
    }
    expd[kmax + 1] = m * std::max(0.0, 1.0 - cdf);

    // merge adjacent cells until each expected mass reaches 5
    std::vector<double> mo, me;
    double ao = 0.0, ae = 0.0;
    for (std::size_t k = 0; k < expd.size(); ++k) {
        ao += obs[k];
        ae += expd[k];
        if (ae >= 5.0) {
            mo.push_back(ao);
            me.push_back(ae);
            ao = ae = 0.0;
        }
    }
    if (ae > 0.0 || ao > 0.0) {
        if (!me.empty()) {
            mo.back() += ao;
            me.back() += ae;
        } else {
            mo.push_back(ao);
            me.push_back(ae);
        }
    }

    if (me.size() < 2) {
        v.pass = true;
        v.p_value = 1.0;
        v.detail = "single cell after merging, nothing to test";
        return v;
    }

    double chi2 = 0.0;
    for (std::size_t i = 0; i < me.size(); ++i)
        chi2 += (mo[i] - me[i]) * (mo[i] - me[i]) / me[i];
    const int dof = static_cast<int>(me.size()) - 1;
    v.statistic = chi2;
    v.p_value = boost::math::gamma_q(0.5 * dof, 0.5 * chi2);
    v.pass = v.p_value >= level;
    std::ostringstream os;
    os << "cells=" << me.size() << " dof=" << dof;
    v.detail = os.str();
    return v;
}

double ks_statistic(std::vector<double> values, const std::function<double(double)>& cdf)
{
    if (values.empty())
        throw std::invalid_argument("ks_statistic: no observations");
    std::sort(values.begin(), values.end());
    const double m = static_cast<double>(values.size());
    double dmax = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double f = cdf(values[i]);
        dmax = std::max(dmax, std::max(f - static_cast<double>(i) / m, static_cast<double>(i + 1) / m - f));
    }
    return dmax;
}

TestVerdict gamma_order_stat_test(std::span<const double> values, int k, double crit_scale)
{
    if (k < 1)
        throw std::invalid_argument("gamma_order_stat_test: k must be positive");
    if (values.empty())
        throw std::invalid_argument("gamma_order_stat_test: no observations");
    TestVerdict v;
    v.n_obs = values.size();
    const double kk = k;
    v.statistic = ks_statistic(std::vector<double>(values.begin(), values.end()), [kk](double x) {
        return x <= 0.0 ? 0.0 : boost::math::gamma_p(kk, x);
    });
    v.threshold = crit_scale * 1.358 / std::sqrt(static_cast<double>(values.size()));
    v.p_value = std::numeric_limits<double>::quiet_NaN();
    v.pass = v.statistic <= v.threshold;
    std::ostringstream os;
    os << "KS vs Gamma(" << k << ",1)";
    v.detail = os.str();
    return v;
}

// ------------------------------------------------------------ null draws

double exp_draw(SampleRng& rng) { return -std::log1p(-rng.next_u01()); }

double gamma_int_draw(SampleRng& rng, int k)
{
    double s = 0.0;
    for (int i = 0; i < k; ++i)
        s += exp_draw(rng);
    return s;
}

std::uint64_t poisson_draw(SampleRng& rng, double lambda)
{
    // Knuth's product method; fine for the small lambdas used here.
    const double limit = std::exp(-lambda);
    std::uint64_t k = 0;
    double p = 1.0;
    do {
        p *= rng.next_u01();
        ++k;
    } while (p > limit);
    return k - 1;
}

// ------------------------------------------------------------- selftest

nlohmann::json SelftestReport::to_json() const
{
    return {{"trials", trials},
            {"samples", samples},
            {"b", b},
            {"poisson_passes", poisson_passes},
            {"exp_passes", exp_passes},
            {"gamma2_passes", gamma2_passes},
            {"poisson_band", {poisson_lo, trials}},
            {"ks_band", {ks_lo, ks_hi}},
            {"ok", ok}};
}

SelftestReport run_selftest(int trials, std::uint64_t samples, std::uint64_t seed, double b)
{
    if (trials < 1 || samples < 1)
        throw ConfigError("run_selftest: trials and samples must be positive");
    SelftestReport rep;
    rep.trials = trials;
    rep.samples = samples;
    rep.b = b;

    constexpr std::uint64_t kTagPoisson = 11, kTagExp = 12, kTagGamma2 = 13;
    for (int t = 0; t < trials; ++t) {
        SampleRng rp(seed, kTagPoisson, static_cast<std::uint64_t>(t));
        std::vector<std::uint64_t> counts(samples);
        for (auto& c : counts)
            c = poisson_draw(rp, b);
        rep.poisson_passes += poisson_gof(counts, b, 0.01).pass ? 1 : 0;

        SampleRng re(seed, kTagExp, static_cast<std::uint64_t>(t));
        std::vector<double> ev(samples);
        for (auto& x : ev)
            x = exp_draw(re);
        rep.exp_passes += gamma_order_stat_test(ev, 1, 1.0).pass ? 1 : 0;

        SampleRng rg(seed, kTagGamma2, static_cast<std::uint64_t>(t));
        std::vector<double> gv(samples);
        for (auto& x : gv)
            x = gamma_int_draw(rg, 2);
        rep.gamma2_passes += gamma_order_stat_test(gv, 2, 1.0).pass ? 1 : 0;
    }

    const double tt = trials;
    const double p_sd = std::sqrt(tt * 0.99 * 0.01);
    rep.poisson_lo = static_cast<int>(std::ceil(0.99 * tt - 3.0 * p_sd - 1e-9));
    const double k_sd = std::sqrt(tt * 0.95 * 0.05);
    rep.ks_lo = static_cast<int>(std::ceil(0.95 * tt - 3.0 * k_sd - 1e-9));
    rep.ks_hi = std::min(trials, static_cast<int>(std::floor(0.95 * tt + 3.0 * k_sd + 1e-9)));

    rep.ok = rep.poisson_passes >= rep.poisson_lo && rep.exp_passes >= rep.ks_lo && rep.exp_passes <= rep.ks_hi &&
             rep.gamma2_passes >= rep.ks_lo && rep.gamma2_passes <= rep.ks_hi;
    return rep;
}

} // namespace dpre
