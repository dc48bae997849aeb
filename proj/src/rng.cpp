#include "topoprune/rng.hpp"

namespace topoprune {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t phase_tag) {
    return SplitMix64::keyed(master, {phase_tag}).next();
}

}  // namespace topoprune
