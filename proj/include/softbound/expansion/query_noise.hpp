#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "softbound/core/types.hpp"

namespace softbound::expansion {

/// Exchanges start/end descriptions on exactly round(fraction * n) records
/// picked by a seeded mt19937_64. The swapped flag is toggled on each
/// touched record, so two full passes restore the input.
inline std::vector<ExpandedQuery> inject_query_noise(std::vector<ExpandedQuery> records, double fraction,
                                                     std::uint64_t seed) {
    if (!(fraction >= 0.0 && fraction <= 1.0)) throw InvariantError("noise fraction must lie in [0, 1]");
    const auto n = records.size();
    const auto k = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
    if (k == 0) return records;
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t j = 0; j < k; ++j) {
        auto& r = records[idx[j]];
        std::swap(r.start_desc, r.end_desc);
        r.swapped = !r.swapped;
    }
    return records;
}

}  // namespace softbound::expansion
