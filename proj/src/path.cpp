#include "dpre/path.hpp"

#include <limits>
#include <stdexcept>
#include <string>

namespace dpre {

std::uint64_t path_count_unchecked(int d, int n) {
    if (d < 1 || n < 0) throw std::invalid_argument("path_count: need d >= 1, n >= 0");
    const std::uint64_t base = 2u * static_cast<std::uint64_t>(d);
    std::uint64_t c = 1;
    for (int i = 0; i < n; ++i) {
        if (c > std::numeric_limits<std::uint64_t>::max() / base)
            throw std::overflow_error("path_count: (2d)^n overflows 64 bits");
        c *= base;
    }
    return c;
}

std::uint64_t path_count(int d, int n, std::uint64_t cap) {
    const std::uint64_t c = path_count_unchecked(d, n);
    if (c > cap)
        throw BudgetExceeded("enumeration of (2" + std::string("d)^n = ") + std::to_string(c) +
                             " objects exceeds cap " + std::to_string(cap));
    return c;
}

static void check_dims(int d, int n) {
    if (d < 1 || d > kMaxEnumDim) throw std::invalid_argument("path: d out of range [1," + std::to_string(kMaxEnumDim) + "]");
    if (n < 0) throw std::invalid_argument("path: negative n");
}

Path path_from_steps(int d, int n, std::span<const std::uint8_t> digits) {
    check_dims(d, n);
    if (static_cast<int>(digits.size()) != n) throw std::invalid_argument("path: digit count != n");
    Path p;
    p.d = d;
    p.n = n;
    p.steps.assign(digits.begin(), digits.end());
    p.sites.assign(static_cast<std::size_t>(n + 1) * d, 0);
    for (int i = 1; i <= n; ++i) {
        const std::uint8_t k = digits[i - 1];
        if (k >= 2 * d) throw std::invalid_argument("path: step digit out of range");
        const int axis = k >> 1;
        const std::int32_t sign = (k & 1) ? -1 : 1;
        for (int j = 0; j < d; ++j) p.sites[static_cast<std::size_t>(i) * d + j] = p.sites[static_cast<std::size_t>(i - 1) * d + j];
        p.sites[static_cast<std::size_t>(i) * d + axis] += sign;
    }
    return p;
}

Path path_from_id(int d, int n, PathId id) {
    check_dims(d, n);
    const std::uint64_t total = path_count_unchecked(d, n);
    if (id >= total) throw std::invalid_argument("path: id out of range");
    const std::uint64_t base = 2u * static_cast<std::uint64_t>(d);
    std::vector<std::uint8_t> digits(static_cast<std::size_t>(n));
    for (int i = n - 1; i >= 0; --i) { // least significant digit = last step
        digits[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(id % base);
        id /= base;
    }
    return path_from_steps(d, n, digits);
}

PathId id_of(const Path& p) {
    const std::uint64_t base = 2u * static_cast<std::uint64_t>(p.d);
    PathId id = 0;
    for (int i = 0; i < p.n; ++i) id = id * base + p.steps[static_cast<std::size_t>(i)];
    return id;
}

PathTuple tuple_from_ids(int d, int n, std::span<const PathId> ids) {
    PathTuple t;
    t.d = d;
    t.n = n;
    t.paths.reserve(ids.size());
    for (PathId id : ids) t.paths.push_back(path_from_id(d, n, id));
    return t;
}

int coincidences(const Path& a, const Path& b, bool include_origin) {
    if (a.d != b.d || a.n != b.n) throw std::invalid_argument("coincidences: mismatched (d, n)");
    const int d = a.d;
    int s = 0;
    for (int m = include_origin ? 0 : 1; m <= a.n; ++m) {
        const std::int32_t* xa = a.site(m);
        const std::int32_t* xb = b.site(m);
        bool eq = true;
        for (int j = 0; j < d; ++j)
            if (xa[j] != xb[j]) { eq = false; break; }
        if (eq) ++s;
    }
    return s;
}

std::vector<Path> enumerate_paths(int d, int n, const Limits& lim) {
    const std::uint64_t total = path_count(d, n, lim.enum_cap);
    std::vector<Path> out;
    out.reserve(static_cast<std::size_t>(total));
    for (std::uint64_t id = 0; id < total; ++id) out.push_back(path_from_id(d, n, id));
    return out;
}

} // namespace dpre
