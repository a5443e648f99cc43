#pragma once

#include <cstdint>
#include <vector>

#include "qwalk/ml.hpp"
#include "qwalk/rng.hpp"

namespace qwalk::ml::internal {

inline void shuffle_indices(std::vector<int>& v, SplitMix64& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.next() % i);
        std::swap(v[i - 1], v[j]);
    }
}

struct SplitResult {
    std::vector<int> train;
    std::vector<int> holdout;
};

// Stratified split: per class, a seeded shuffle then the first
// round(fraction * count) indices (at least 1, at most count - 1) go to
// the holdout set.  Throws unless both classes have >= 2 samples.
SplitResult stratified_split(const std::vector<Sample>& samples, double fraction,
                             std::uint64_t seed);

}  // namespace qwalk::ml::internal
