#pragma once

// Binary policy checkpoints.
//
// Layout (little-endian throughout):
//   "FEDSACPL"            8-byte magic
//   u32 version           currently 1
//   u32 K                 worker count
//   u32 n, then n x u32   layer sizes, input first
//   u32 c, then c x f64   normalization caps
//   f64 x num_params      weights in Mlp declaration order

#include <iosfwd>
#include <optional>
#include <string>

#include "fedsac/sac_agent.hpp"

namespace fedsac {

inline constexpr std::uint32_t kCheckpointVersion = 1;

void write_policy(std::ostream& out, const TrainedPolicy& policy);
void save_policy(const std::string& path, const TrainedPolicy& policy);

/// Throws std::runtime_error on a bad header, inconsistent shapes, a
/// truncated or oversized payload, or when expected_workers is given and
/// differs from the stored K. Nothing is returned unless the whole file is
/// valid.
TrainedPolicy read_policy(std::istream& in, std::optional<int> expected_workers = std::nullopt);
TrainedPolicy load_policy(const std::string& path, std::optional<int> expected_workers = std::nullopt);

}  // namespace fedsac
