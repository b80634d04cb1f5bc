#ifndef DPRE_PATH_HPP
#define DPRE_PATH_HPP

// Nearest-neighbour lattice paths on Z^d started at the origin, identified
// with base-(2d) digit strings of their steps (most significant digit =
// first step, so paths sharing a step prefix occupy a contiguous PathId
// range). Digit k encodes the step along axis k>>1 with sign -1 if k is odd.

#include <cstdint>
#include <span>
#include <vector>

#include "dpre/errors.hpp"

namespace dpre {

using PathId = std::uint64_t;

struct Limits {
    std::uint64_t enum_cap  = std::uint64_t{1} << 26; // max enumerated objects
    std::uint64_t tuple_cap = std::uint64_t{1} << 24; // max zet tuples
};

// Highest dimension the exhaustive-enumeration kernels accept; Monte Carlo
// walks are not capped. The path budget makes larger d unreachable anyway.
inline constexpr int kMaxEnumDim = 16;

// (2d)^n, throwing BudgetExceeded once the count passes `cap`.
std::uint64_t path_count(int d, int n, std::uint64_t cap);

// Overflow-checked (2d)^n with no budget applied (may still throw on
// 64-bit overflow).
std::uint64_t path_count_unchecked(int d, int n);

struct Path {
    int d = 1;
    int n = 0;
    std::vector<std::uint8_t> steps; // n digits in [0, 2d)
    std::vector<std::int32_t> sites; // (n+1) x d, row-major, sites[0..d)=0

    const std::int32_t* site(int m) const { return sites.data() + static_cast<std::size_t>(m) * d; }
};

Path path_from_id(int d, int n, PathId id);
Path path_from_steps(int d, int n, std::span<const std::uint8_t> digits);
PathId id_of(const Path& p);

struct PathTuple {
    int d = 1;
    int n = 0;
    std::vector<Path> paths;
};

// Ordered tuple of paths decoded from ids; all share (d, n).
PathTuple tuple_from_ids(int d, int n, std::span<const PathId> ids);

// Number of meeting times of two equal-length paths: m in [0,n] when
// include_origin (both walks share the origin, so m=0 always counts there),
// m in [1,n] otherwise. Throws std::invalid_argument on mismatched (d, n).
int coincidences(const Path& a, const Path& b, bool include_origin);

// All (2d)^n paths in PathId order. Budget-checked.
std::vector<Path> enumerate_paths(int d, int n, const Limits& lim = {});

} // namespace dpre

#endif
