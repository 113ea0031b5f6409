#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dnp/descriptor.hpp"
#include "dnp/structure_io.hpp"

namespace dnpgcn {

enum class DescriptorKind { Dnp, Distance, DistanceTheta, Ppf };

std::string_view to_string(DescriptorKind kind);
/// Accepts "dnp", "distance", "distance-theta", "ppf". Throws ConfigError.
DescriptorKind parse_descriptor_kind(std::string_view name);

inline constexpr double kProteinCutoff = 15.0;
inline constexpr double kDegenerateDirection = 1e-6;
inline constexpr std::size_t kEdgeFeatureWidth = 4;
inline constexpr std::size_t kResidueFeatureWidth = 21;
inline constexpr std::size_t kElementFeatureWidth = 10;

struct GraphNode {
  std::vector<double> features;
  DirectionalNode geometry;
};

/// Undirected edge, stored once with i < j.
struct GraphEdge {
  std::size_t i = 0;
  std::size_t j = 0;
  std::vector<double> raw;
  std::array<double, kEdgeFeatureWidth> encoded{};
};

struct MolGraph {
  std::string id;
  std::vector<GraphNode> nodes;
  std::vector<GraphEdge> edges;
  std::optional<int> label;
  /// Graphs sharing a group are kept in the same cross-validation fold.
  std::optional<int> group;
  DescriptorKind descriptor = DescriptorKind::Dnp;
  /// Distances are divided by this before entering the network.
  double distance_scale = kProteinCutoff;

  std::size_t feature_width() const { return nodes.empty() ? 0 : nodes.front().features.size(); }
};

class EdgeFeatureError : public Error {
 public:
  EdgeFeatureError(std::size_t i, std::size_t j, const std::string& what)
      : Error("edge (" + std::to_string(i) + ", " + std::to_string(j) + "): " + what), i_(i), j_(j) {}
  std::size_t i() const { return i_; }
  std::size_t j() const { return j_; }

 private:
  std::size_t i_, j_;
};

/// One-hot over the 20 standard amino acids plus an "unknown" bucket.
std::vector<double> residue_one_hot(std::string_view residue_name);
/// One-hot over {C, N, O, S, P, F, Cl, Br, I, other}.
std::vector<double> element_one_hot(std::string_view element);

/// Node per residue at its C-alpha, direction C-alpha -> carboxyl C, edge
/// when the C-alpha distance is strictly below `cutoff`. Edges are
/// featurized with the dnp descriptor.
MolGraph build_protein_graph(std::span<const Residue> residues, double cutoff = kProteinCutoff);

/// Node per heavy atom, direction from the molecule centroid to the atom,
/// edge per bond. Edges are featurized with the dnp descriptor.
MolGraph build_molecule_graph(const SmallMolecule& mol);

/// Recomputes raw and encoded features of every edge with `kind`.
/// Encoded dnp: [alpha/pi, beta/pi, (gamma+pi)/(2pi), d/scale]; distance:
/// [d/scale, 0, 0, 0]; distance-theta: [d/scale, theta/pi, 0, 0];
/// ppf: [d/scale, a1/pi, a2/pi, a3/pi].
MolGraph featurize_edges(MolGraph g, DescriptorKind kind);

/// Applies `t` to every node position and direction. Edge features are
/// recomputed with the graph's current descriptor.
MolGraph transform_graph(const MolGraph& g, const RigidTransform& t);

struct Dataset {
  std::vector<MolGraph> graphs;
  int class_count = 0;
  /// Inverse-frequency weights N / (K * n_k); 1 for classes with no members.
  std::vector<double> class_weights;
  std::size_t feature_width = 0;
};

/// Validates labels and feature widths and derives class weights.
/// `class_count` defaults to max label + 1.
Dataset make_dataset(std::vector<MolGraph> graphs, std::optional<int> class_count = std::nullopt);

/// Same graphs re-featurized with another descriptor; weights are kept.
Dataset refeaturize(const Dataset& ds, DescriptorKind kind);

}  // namespace dnpgcn
