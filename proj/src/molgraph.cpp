#include "dnp/molgraph.hpp"

#include <algorithm>
#include <array>

namespace dnpgcn {

std::string_view to_string(DescriptorKind kind) {
  switch (kind) {
    case DescriptorKind::Dnp: return "dnp";
    case DescriptorKind::Distance: return "distance";
    case DescriptorKind::DistanceTheta: return "distance-theta";
    case DescriptorKind::Ppf: return "ppf";
  }
  return "dnp";
}

DescriptorKind parse_descriptor_kind(std::string_view name) {
  if (name == "dnp") return DescriptorKind::Dnp;
  if (name == "distance") return DescriptorKind::Distance;
  if (name == "distance-theta") return DescriptorKind::DistanceTheta;
  if (name == "ppf") return DescriptorKind::Ppf;
  throw ConfigError("unknown descriptor '" + std::string(name) +
                    "' (expected dnp, distance, distance-theta or ppf)");
}

namespace {

constexpr std::array<std::string_view, 20> kAminoAcids = {
    "ALA", "ARG", "ASN", "ASP", "CYS", "GLN", "GLU", "GLY", "HIS", "ILE",
    "LEU", "LYS", "MET", "PHE", "PRO", "SER", "THR", "TRP", "TYR", "VAL"};

constexpr std::array<std::string_view, 9> kElements = {"C", "N", "O", "S", "P", "F", "Cl", "Br", "I"};

std::vector<double> one_hot(std::size_t width, std::size_t hot) {
  std::vector<double> v(width, 0.0);
  v[hot] = 1.0;
  return v;
}

DirectionalNode oriented_or_bare(const Vec3& position, const Vec3& displacement) {
  if (norm(displacement) < kDegenerateDirection) return DirectionalNode(position);
  return DirectionalNode::oriented(position, displacement);
}

void encode(GraphEdge& e, const DirectionalNode& a, const DirectionalNode& b, DescriptorKind kind,
            double scale) {
  switch (kind) {
    case DescriptorKind::Dnp: {
      const auto q = dnp(a, b);
      e.raw = {q.alpha, q.beta, q.gamma, q.d};
      e.encoded = {q.alpha / kPi, q.beta / kPi, (q.gamma + kPi) / (2.0 * kPi), q.d / scale};
      break;
    }
    case DescriptorKind::Distance: {
      const double d = distance_only(a, b);
      e.raw = {d};
      e.encoded = {d / scale, 0.0, 0.0, 0.0};
      break;
    }
    case DescriptorKind::DistanceTheta: {
      const auto dt = distance_theta(a, b);
      e.raw = {dt.d, dt.theta};
      e.encoded = {dt.d / scale, dt.theta / kPi, 0.0, 0.0};
      break;
    }
    case DescriptorKind::Ppf: {
      const auto f = ppf(a, b);
      e.raw = {f[0], f[1], f[2], f[3]};
      e.encoded = {f[0] / scale, f[1] / kPi, f[2] / kPi, f[3] / kPi};
      break;
    }
  }
}

}  // namespace

std::vector<double> residue_one_hot(std::string_view residue_name) {
  const auto it = std::find(kAminoAcids.begin(), kAminoAcids.end(), residue_name);
  return one_hot(kResidueFeatureWidth, static_cast<std::size_t>(it - kAminoAcids.begin()));
}

std::vector<double> element_one_hot(std::string_view element) {
  const auto it = std::find(kElements.begin(), kElements.end(), element);
  return one_hot(kElementFeatureWidth, static_cast<std::size_t>(it - kElements.begin()));
}

MolGraph build_protein_graph(std::span<const Residue> residues, double cutoff) {
  if (residues.size() < 2) throw Error("protein graph needs at least 2 residues");
  if (!(cutoff > 0.0)) throw ConfigError("protein edge cutoff must be positive");

  MolGraph g;
  g.distance_scale = cutoff;
  for (const auto& r : residues) {
    GraphNode n;
    n.features = residue_one_hot(r.name);
    if (r.carboxyl_c) n.geometry = oriented_or_bare(r.c_alpha, *r.carboxyl_c - r.c_alpha);
    else n.geometry = DirectionalNode(r.c_alpha);
    g.nodes.push_back(std::move(n));
  }
  for (std::size_t i = 0; i < residues.size(); ++i)
    for (std::size_t j = i + 1; j < residues.size(); ++j)
      if (norm(residues[j].c_alpha - residues[i].c_alpha) < cutoff) g.edges.push_back({i, j, {}, {}});
  return featurize_edges(std::move(g), DescriptorKind::Dnp);
}

MolGraph build_molecule_graph(const SmallMolecule& mol) {
  if (mol.atoms.empty()) throw Error("molecule has no heavy atoms");
  if (mol.atoms.size() < 2 || mol.bonds.empty())
    throw Error("molecule graph needs at least 2 heavy atoms and 1 bond");

  Vec3 centroid;
  for (const auto& a : mol.atoms) centroid += a.position;
  centroid = centroid / static_cast<double>(mol.atoms.size());

  MolGraph g;
  for (const auto& a : mol.atoms) {
    GraphNode n;
    n.features = element_one_hot(a.element);
    n.geometry = oriented_or_bare(a.position, a.position - centroid);
    g.nodes.push_back(std::move(n));
  }
  for (const auto& [i, j] : mol.bonds) g.edges.push_back({std::min(i, j), std::max(i, j), {}, {}});
  return featurize_edges(std::move(g), DescriptorKind::Dnp);
}

MolGraph featurize_edges(MolGraph g, DescriptorKind kind) {
  for (auto& e : g.edges) {
    if (e.i >= g.nodes.size() || e.j >= g.nodes.size() || e.i == e.j)
      throw EdgeFeatureError(e.i, e.j, "edge endpoints out of range or equal");
    try {
      encode(e, g.nodes[e.i].geometry, g.nodes[e.j].geometry, kind, g.distance_scale);
    } catch (const EdgeFeatureError&) {
      throw;
    } catch (const Error& err) {
      throw EdgeFeatureError(e.i, e.j, err.what());
    }
  }
  g.descriptor = kind;
  return g;
}

MolGraph transform_graph(const MolGraph& g, const RigidTransform& t) {
  MolGraph out = g;
  for (auto& n : out.nodes) n.geometry = n.geometry.transformed(t);
  return featurize_edges(std::move(out), g.descriptor);
}

Dataset make_dataset(std::vector<MolGraph> graphs, std::optional<int> class_count) {
  if (graphs.empty()) throw Error("dataset is empty");
  Dataset ds;
  ds.feature_width = graphs.front().feature_width();
  int max_label = -1;
  for (const auto& g : graphs) {
    if (!g.label) throw Error("graph '" + g.id + "' has no label");
    if (*g.label < 0) throw Error("graph '" + g.id + "' has a negative label");
    max_label = std::max(max_label, *g.label);
    for (const auto& n : g.nodes)
      if (n.features.size() != ds.feature_width)
        throw Error("graph '" + g.id + "' has node feature width " + std::to_string(n.features.size()) +
                    ", expected " + std::to_string(ds.feature_width));
  }
  ds.class_count = class_count.value_or(max_label + 1);
  if (max_label >= ds.class_count)
    throw Error("label " + std::to_string(max_label) + " outside [0, " + std::to_string(ds.class_count) + ")");

  std::vector<std::size_t> counts(static_cast<std::size_t>(ds.class_count), 0);
  for (const auto& g : graphs) ++counts[static_cast<std::size_t>(*g.label)];
  ds.class_weights.assign(counts.size(), 1.0);
  for (std::size_t k = 0; k < counts.size(); ++k)
    if (counts[k] > 0)
      ds.class_weights[k] = static_cast<double>(graphs.size()) /
                            (static_cast<double>(ds.class_count) * static_cast<double>(counts[k]));
  ds.graphs = std::move(graphs);
  return ds;
}

Dataset refeaturize(const Dataset& ds, DescriptorKind kind) {
  Dataset out = ds;
  for (auto& g : out.graphs) g = featurize_edges(std::move(g), kind);
  return out;
}

}  // namespace dnpgcn
