#ifndef DPRE_ENVIRONMENT_HPP
#define DPRE_ENVIRONMENT_HPP

// Random environment eta(n, x), iid over space-time sites, mean 0 and
// variance 1, realized as a pure function of (master_seed, sample_index,
// n, x). Reading a site twice gives the same value, fields never
// materialize storage, and results are independent of query order.

#include <complex>
#include <cstdint>
#include <span>
#include <string>

#include "dpre/rng.hpp"

namespace dpre {

enum class DistKind {
    gaussian, // standard normal
    uniform,  // uniform on [-sqrt(3), sqrt(3)]
    cexp,     // Exp(1) - 1
};

DistKind dist_from_name(const std::string& name); // "gaussian" | "uniform" | "cexp"
std::string dist_name(DistKind k);

// Characteristic function E exp(itX) of the environment marginal.
std::complex<double> char_fn(DistKind k, double t);

// Upper envelope constant: |char_fn(k, t)| <= env_decay_const(k) / |t|.
// (For the gaussian the decay is faster; the 1/t envelope still holds.)
double env_decay_const(DistKind k);

// Standard normal quantile (Wichura's AS241, double precision).
double inv_normal_cdf(double p);

struct EnvField {
    std::uint64_t master_seed = 0;
    std::uint64_t sample_index = 0;
    DistKind kind = DistKind::gaussian;

    // Word layout absorbed into the hash, in order: master_seed,
    // sample_index, (d << 32) | n, then each coordinate sign-extended to 64
    // bits. Changing any word decorrelates the value.
    std::uint64_t site_hash(std::int64_t n, std::span<const std::int32_t> x) const {
        std::uint64_t h = mix64(master_seed ^ kGolden);
        h = absorb(h, sample_index);
        h = absorb(h, (static_cast<std::uint64_t>(x.size()) << 32) | static_cast<std::uint32_t>(n));
        for (std::int32_t c : x) h = absorb(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(c)));
        return h;
    }

    double value_at(std::int64_t n, std::span<const std::int32_t> x) const;
};

// Quantile transform shared by EnvField and the benchmark/test helpers.
double sample_from_u01(DistKind k, double u);

} // namespace dpre

#endif
