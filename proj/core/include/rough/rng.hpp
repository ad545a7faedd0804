#pragma once

#include <cstdint>
#include <random>

namespace rough {

// Independent engine for (seed, path, stream). Results depend only on these
// three numbers, never on which thread simulates the path.
inline std::mt19937_64 path_engine(std::uint64_t seed, std::uint64_t path, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(path), static_cast<std::uint32_t>(path >> 32),
                    stream};
  return std::mt19937_64(seq);
}

}  // namespace rough
