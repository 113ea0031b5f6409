#pragma once

#include <cstdint>

#include "dnp/molgraph.hpp"

namespace dnpgcn {

/// Edge cutoff for synthetic graphs; distances are still encoded against kProteinCutoff.
inline constexpr double kSyntheticCutoff = 7.0;

/// `n_per_class` pairs of graphs. Both graphs of a pair share node positions,
/// adjacency, chemical features and group id; class 0 points every direction
/// away from the centroid, class 1 points it tangentially around a random
/// axis. Each graph then gets its own random rigid motion. Edges use dnp.
Dataset gen_orientation_dataset(int n_per_class, std::uint64_t seed);

/// `n_per_class` pairs: class 0 is a jittered right-handed helix with tangent
/// directions (edges to the next two nodes along the chain), class 1 is its
/// mirror image. Each graph then gets its own random rigid motion. Edges use dnp.
Dataset gen_chirality_dataset(int n_per_class, std::uint64_t seed);

}  // namespace dnpgcn
