#pragma once

#include <cstdint>
#include <random>

namespace fedsac {

/// Independent, reproducible seed for (master seed, index, stream). Used so
/// that episode i sees the same environment whichever scheduler runs it.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index, std::uint32_t stream = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), stream};
    std::uint32_t out[2];
    seq.generate(out, out + 2);
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

enum SeedStream : std::uint32_t { kEnvStream = 1, kAgentStream = 2 };

}  // namespace fedsac
