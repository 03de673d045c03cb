#pragma once

#include <cstdint>
#include <vector>

#include "ambitalk/model.hpp"
#include "ambitalk/tessellation.hpp"

namespace ambitalk {

struct InstanceOptions {
  int max_pieces = 5;
  int min_words = 2;
  int max_words = 3;
  int max_members = 4;
  /// Every cell is at least this fraction of the state width.
  double min_cell_fraction = 0.05;
};

struct GameInstance {
  GameSpec spec;
  CommunicationDevice device;
};

/// Reproducible random game: piecewise-constant prior, contiguous cells in
/// a random word order, finite G-set and an error interval inside (0, 1).
GameInstance random_instance(std::uint64_t seed, const InstanceOptions &options = {});

/// Instances for seeds base, base + 1, ..., base + count - 1.
std::vector<GameInstance> seeded_instances(std::uint64_t base, std::size_t count,
                                           const InstanceOptions &options = {});

} // namespace ambitalk
