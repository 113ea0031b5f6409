#include "dnp/synthetic.hpp"

#include <cmath>
#include <random>

namespace dnpgcn {

namespace {

struct Template {
  std::vector<Vec3> positions;
  std::vector<std::vector<double>> features;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
};

std::vector<double> random_element(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, kElementFeatureWidth - 1);
  std::vector<double> f(kElementFeatureWidth, 0.0);
  f[pick(rng)] = 1.0;
  return f;
}

MolGraph realize(const Template& t, const std::vector<Vec3>& directions, const RigidTransform& motion,
                 std::string id, int label, int group) {
  MolGraph g;
  g.id = std::move(id);
  g.label = label;
  g.group = group;
  for (std::size_t k = 0; k < t.positions.size(); ++k)
    g.nodes.push_back({t.features[k], DirectionalNode(t.positions[k], directions[k]).transformed(motion)});
  for (const auto& [i, j] : t.edges) g.edges.push_back({i, j, {}, {}});
  return featurize_edges(std::move(g), DescriptorKind::Dnp);
}

// Self-avoiding-ish chain with 3.8 A steps; edges below the synthetic cutoff.
Template random_chain(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> size(8, 16);
  const int n = size(rng);
  Template t;
  Vec3 p;
  for (int k = 0; k < n; ++k) {
    for (int attempt = 0; attempt < 100; ++attempt) {
      const Vec3 candidate = k == 0 ? Vec3{} : p + 3.8 * random_unit_vector(rng);
      bool clash = false;
      for (const auto& q : t.positions) clash = clash || norm(candidate - q) < 3.0;
      if (!clash || attempt == 99) {
        p = candidate;
        break;
      }
    }
    t.positions.push_back(p);
    t.features.push_back(random_element(rng));
  }
  for (std::size_t i = 0; i < t.positions.size(); ++i)
    for (std::size_t j = i + 1; j < t.positions.size(); ++j)
      if (norm(t.positions[j] - t.positions[i]) < kSyntheticCutoff) t.edges.emplace_back(i, j);
  return t;
}

Dataset finish(std::vector<MolGraph> graphs) { return make_dataset(std::move(graphs), 2); }

}  // namespace

Dataset gen_orientation_dataset(int n_per_class, std::uint64_t seed) {
  if (n_per_class < 1) throw ConfigError("need at least one graph per class");
  std::mt19937_64 rng(derive_seed(seed, "orientation"));
  std::normal_distribution<double> jitter(0.0, 0.1);
  std::vector<MolGraph> graphs;
  for (int pair = 0; pair < n_per_class; ++pair) {
    Template t = random_chain(rng);
    for (auto& p : t.positions) p += Vec3{jitter(rng), jitter(rng), jitter(rng)};
    Vec3 centroid;
    for (const auto& p : t.positions) centroid += p;
    centroid = centroid / static_cast<double>(t.positions.size());

    // Radial and tangential fields; an axis is redrawn until no node sits near it.
    std::vector<Vec3> radial, tangential;
    for (const auto& p : t.positions) radial.push_back(normalize(p - centroid));
    for (int attempt = 0; tangential.size() != t.positions.size(); ++attempt) {
      tangential.clear();
      const Vec3 axis = random_unit_vector(rng);
      for (const auto& p : t.positions) {
        const Vec3 c = cross(axis, p - centroid);
        if (norm(c) < 0.5 && attempt < 50) break;
        tangential.push_back(normalize(c));
      }
    }
    const auto base = "orientation-" + std::to_string(pair);
    graphs.push_back(realize(t, radial, random_rigid_transform(rng()), base + "-a", 0, pair));
    graphs.push_back(realize(t, tangential, random_rigid_transform(rng()), base + "-b", 1, pair));
  }
  return finish(std::move(graphs));
}

Dataset gen_chirality_dataset(int n_per_class, std::uint64_t seed) {
  if (n_per_class < 1) throw ConfigError("need at least one graph per class");
  std::mt19937_64 rng(derive_seed(seed, "chirality"));
  std::uniform_int_distribution<int> size(8, 16);
  std::uniform_real_distribution<double> radius(1.5, 3.0), turn(0.6, 1.4), rise(0.8, 2.0);
  std::normal_distribution<double> jitter(0.0, 0.1);
  std::vector<MolGraph> graphs;
  for (int pair = 0; pair < n_per_class; ++pair) {
    const int n = size(rng);
    const double r = radius(rng), phi = turn(rng), pitch = rise(rng);
    Template t;
    std::vector<Vec3> dirs;
    for (int k = 0; k < n; ++k) {
      const double a = phi * k;
      t.positions.push_back(Vec3{r * std::cos(a), r * std::sin(a), pitch * k} +
                            Vec3{jitter(rng), jitter(rng), jitter(rng)});
      dirs.push_back(normalize(Vec3{-r * phi * std::sin(a), r * phi * std::cos(a), pitch}));
      t.features.push_back(random_element(rng));
    }
    for (int k = 0; k + 1 < n; ++k) {
      t.edges.emplace_back(k, k + 1);
      if (k + 2 < n) t.edges.emplace_back(k, k + 2);
    }
    const auto base = "chirality-" + std::to_string(pair);
    graphs.push_back(realize(t, dirs, random_rigid_transform(rng()), base + "-r", 0, pair));
    const RigidTransform mirrored = random_rigid_transform(rng()).after(mirror_xy());
    graphs.push_back(realize(t, dirs, mirrored, base + "-l", 1, pair));
  }
  return finish(std::move(graphs));
}

}  // namespace dnpgcn
