#include "dnp/checks.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "dnp/descriptor.hpp"

namespace dnpgcn {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string describe(const DirectionalNode& n) {
  std::ostringstream s;
  s.precision(17);
  const auto& p = n.position();
  s << "pos=(" << p.x << ", " << p.y << ", " << p.z << ")";
  if (const auto& d = n.direction()) s << " dir=(" << d->x << ", " << d->y << ", " << d->z << ")";
  else s << " dir=none";
  return s.str();
}

std::string describe_pair(const DirectionalNode& a, const DirectionalNode& b) {
  return "a: " + describe(a) + "; b: " + describe(b);
}

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(3);
  s << x;
  return s.str();
}

Vec3 random_point(std::mt19937_64& rng, double span) {
  std::uniform_real_distribution<double> u(-span, span);
  return {u(rng), u(rng), u(rng)};
}

// Mix of general pairs and every corner configuration.
std::pair<DirectionalNode, DirectionalNode> random_pair(std::mt19937_64& rng) {
  const Vec3 pa = random_point(rng, 10.0);
  Vec3 pb = random_point(rng, 10.0);
  while (norm(pb - pa) < 0.1) pb = random_point(rng, 10.0);
  const Vec3 line = normalize(pb - pa);
  switch (std::uniform_int_distribution<int>(0, 9)(rng)) {
    case 0: return {DirectionalNode(pa), DirectionalNode(pb)};
    case 1: return {DirectionalNode(pa), DirectionalNode(pb, random_unit_vector(rng))};
    case 2: return {DirectionalNode(pa, line), DirectionalNode(pb, -line)};
    case 3: return {DirectionalNode(pa, -line), DirectionalNode(pb, line)};
    case 4: return {DirectionalNode(pa, line), DirectionalNode(pb, line)};
    case 5: return {DirectionalNode(pa, line), DirectionalNode(pb, random_unit_vector(rng))};
    default: return {DirectionalNode(pa, random_unit_vector(rng)), DirectionalNode(pb, random_unit_vector(rng))};
  }
}

// Reflection of `v` through the plane orthogonal to unit `n`.
Vec3 reflect(const Vec3& v, const Vec3& n) { return v - 2.0 * dot(v, n) * n; }

// Rotation of `v` about unit axis `k` (Rodrigues).
Vec3 rotate_about(const Vec3& v, const Vec3& k, double angle) {
  return std::cos(angle) * v + std::sin(angle) * cross(k, v) + (1.0 - std::cos(angle)) * dot(k, v) * k;
}

double max_abs_diff(const std::array<double, 4>& x, const std::array<double, 4>& y) {
  double m = 0.0;
  for (std::size_t k = 0; k < 4; ++k) m = std::max(m, std::abs(x[k] - y[k]));
  return m;
}

DirectionalNode general_node(std::mt19937_64& rng) { return {random_point(rng, 10.0), random_unit_vector(rng)}; }

}  // namespace

CheckReport check_invariance(long trials, std::uint64_t seed) {
  const auto t0 = Clock::now();
  CheckReport r{"invariance", trials, true, 0.0, 1e-9, {}, {}, 0.0};
  std::mt19937_64 rng(derive_seed(seed, "invariance"));
  for (long t = 0; t < trials; ++t) {
    const auto [a, b] = random_pair(rng);
    const RigidTransform m = random_rigid_transform(rng());
    const double dev = max_abs_diff(dnp(a, b).as_array(), dnp(a.transformed(m), b.transformed(m)).as_array());
    if (dev > r.max_error) r.max_error = dev;
    if (!(dev < r.threshold) && r.passed) {
      r.passed = false;
      r.counterexample = describe_pair(a, b) + "; deviation " + fmt(dev);
    }
  }
  r.seconds = elapsed(t0);
  return r;
}

CheckReport check_symmetry(long trials, std::uint64_t seed) {
  const auto t0 = Clock::now();
  CheckReport r{"symmetry", trials, true, 0.0, 0.0, {}, {}, 0.0};
  std::mt19937_64 rng(derive_seed(seed, "symmetry"));
  long ties = 0;
  for (long t = 0; t < trials; ++t) {
    DirectionalNode a, b;
    if (t % 5 == 0) {
      // Mirror-symmetric about the bisecting plane, then spun about the line:
      // both angles to the connecting line are equal.
      const Vec3 pa = random_point(rng, 10.0), pb = random_point(rng, 10.0);
      const Vec3 n = normalize(pb - pa);
      const Vec3 ua = random_unit_vector(rng);
      const double spin = std::uniform_real_distribution<double>(0.0, 2.0 * kPi)(rng);
      a = DirectionalNode(pa, ua);
      b = DirectionalNode::oriented(pb, rotate_about(reflect(ua, n), n, spin));
      ++ties;
    } else {
      std::tie(a, b) = random_pair(rng);
    }
    const auto ab = dnp(a, b), ba = dnp(b, a);
    const double dev = max_abs_diff(ab.as_array(), ba.as_array());
    r.max_error = std::max(r.max_error, dev);
    if (!(ab == ba) && r.passed) {
      r.passed = false;
      r.counterexample = describe_pair(a, b) + "; deviation " + fmt(dev);
    }
  }
  r.notes.push_back(std::to_string(ties) + " pairs built with tied angles");
  r.seconds = elapsed(t0);
  return r;
}

CheckReport check_injectivity(long trials, std::uint64_t seed) {
  const auto t0 = Clock::now();
  CheckReport r{"injectivity", trials, true, 0.0, 1e-6, {}, {}, 0.0};
  std::mt19937_64 rng(derive_seed(seed, "injectivity"));
  double max_quad = 0.0;
  for (long t = 0; t < trials;) {
    const DirectionalNode a = general_node(rng), b = general_node(rng);
    if (norm(b.position() - a.position()) < 0.1 || classify(a, b) != DnpCase::General) continue;
    ++t;
    const auto q = dnp(a, b);
    const auto frame = canonical_frame(a, b);
    std::string failure;
    double quad_err = 0.0, rmsd = 0.0;
    try {
      const auto [s, g] = reconstruct_canonical_pair(q);
      quad_err = max_abs_diff(q.as_array(), dnp(s, g).as_array());
      const auto& src = frame.source;
      const auto& tgt = frame.target;
      const Vec3 original[4] = {src.position(), src.position() + *src.direction(), tgt.position(),
                                tgt.position() + *tgt.direction()};
      const Vec3 rebuilt[4] = {s.position(), s.position() + *s.direction(), g.position(),
                               g.position() + *g.direction()};
      rmsd = kabsch_rmsd(original, rebuilt);
    } catch (const Error& e) {
      failure = e.what();
    }
    max_quad = std::max(max_quad, quad_err);
    r.max_error = std::max(r.max_error, rmsd);
    const bool ok = failure.empty() && quad_err < 1e-9 && rmsd < r.threshold;
    if (!ok && r.passed) {
      r.passed = false;
      r.counterexample = describe_pair(a, b) + "; quadruplet error " + fmt(quad_err) + ", rmsd " + fmt(rmsd) +
                         (failure.empty() ? "" : ", " + failure);
    }
  }
  r.notes.push_back("max quadruplet round-trip error " + fmt(max_quad) + " (limit 1e-9)");
  r.seconds = elapsed(t0);
  return r;
}

CheckReport check_chirality(long trials, std::uint64_t seed) {
  const auto t0 = Clock::now();
  CheckReport r{"chirality", trials, true, 0.0, 1e-12, {}, {}, 0.0};
  std::mt19937_64 rng(derive_seed(seed, "chirality"));
  long nondegenerate = 0, flipped = 0, gamma_kept = 0, beta_reflected = 0, dnp_differs = 0;
  double max_ppf = 0.0;
  for (long t = 0; t < trials;) {
    const DirectionalNode a = general_node(rng), b = general_node(rng);
    const Vec3 l = b.position() - a.position();
    if (norm(l) < 0.1) continue;
    // Non-planar: the two directions and the connecting line span space.
    if (std::abs(dot(cross(*a.direction(), *b.direction()), normalize(l))) < 0.1) continue;
    ++t;
    const RigidTransform m = random_rigid_transform(rng()).after(mirror_xy());
    const DirectionalNode ma = a.transformed(m), mb = b.transformed(m);
    const double ppf_dev = max_abs_diff(ppf(a, b), ppf(ma, mb));
    max_ppf = std::max(max_ppf, ppf_dev);
    const auto q = dnp(a, b), qm = dnp(ma, mb);
    if (max_abs_diff(q.as_array(), qm.as_array()) > 1e-6) ++dnp_differs;
    const bool degenerate = classify(a, b) != DnpCase::General || q.beta < 1e-6 || q.beta > kPi - 1e-6 ||
                            std::abs(q.gamma) < 1e-6 || std::abs(std::abs(q.gamma) - kPi) < 1e-6;
    if (std::abs(qm.gamma - q.gamma) < 1e-9) ++gamma_kept;
    if (std::abs(qm.beta - (kPi - q.beta)) < 1e-9) ++beta_reflected;
    bool ok = ppf_dev <= r.threshold;
    if (!degenerate) {
      ++nondegenerate;
      const bool flip = std::abs(qm.gamma + q.gamma) < 1e-9;
      flipped += flip;
      ok = ok && flip;
    }
    if (!ok && r.passed) {
      r.passed = false;
      std::ostringstream s;
      s.precision(12);
      s << describe_pair(a, b) << "; gamma " << q.gamma << " -> mirrored " << qm.gamma << ", beta " << q.beta
        << " -> " << qm.beta << ", ppf deviation " << ppf_dev;
      r.counterexample = s.str();
    }
  }
  r.max_error = max_ppf;
  r.notes.push_back("max ppf deviation " + fmt(max_ppf) + " (limit 1e-12)");
  r.notes.push_back("gamma sign flipped in " + std::to_string(flipped) + "/" + std::to_string(nondegenerate) +
                    " non-degenerate pairs");
  r.notes.push_back("gamma unchanged in " + std::to_string(gamma_kept) + "/" + std::to_string(trials) +
                    ", beta -> pi - beta in " + std::to_string(beta_reflected) + "/" + std::to_string(trials));
  r.notes.push_back("dnp quadruplet differs in " + std::to_string(dnp_differs) + "/" + std::to_string(trials));
  r.seconds = elapsed(t0);
  return r;
}

double gradient_relative_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-4});
}

CheckReport check_gradients(long trials, std::uint64_t seed) {
  const auto t0 = Clock::now();
  CheckReport r{"gradients", trials, true, 0.0, 1e-5, {}, {}, 0.0};
  std::mt19937_64 rng(derive_seed(seed, "gradients"));
  std::uniform_real_distribution<double> unit(0.0, 1.0), bias(-0.2, 0.2);
  long entries = 0, reprobed = 0, unresolved = 0;

  for (long t = 0; t < trials; ++t) {
    MolGraph g;
    for (int i = 0; i < 5; ++i) {
      std::vector<double> f(kElementFeatureWidth, 0.0);
      f[rng() % kElementFeatureWidth] = 1.0;
      g.nodes.push_back({f, DirectionalNode(random_point(rng, 3.0), random_unit_vector(rng))});
    }
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = i + 1; j < 5; ++j)
        if (unit(rng) < 0.6) g.edges.push_back({i, j, {}, {}});
    g = featurize_edges(std::move(g), DescriptorKind::Dnp);
    const auto batch = make_batch(g);
    const std::vector<int> y{static_cast<int>(rng() % 2)};
    const std::vector<double> w{0.5 + unit(rng), 0.5 + unit(rng)};

    for (int combo = 0; combo < 8; ++combo) {
      ModelConfig cfg;
      cfg.width = 6;
      cfg.depth = 2;
      cfg.node_features = static_cast<int>(kElementFeatureWidth);
      cfg.classes = 2;
      cfg.norm = NormMode::None;
      cfg.edge_in_node_update = combo & 1;
      cfg.edge_update = combo & 2;
      cfg.edge_in_readout = combo & 4;
      // Evaluate at a generic point: zero biases would put dead rectifier
      // rows exactly on their kink.
      ModelParams p = init_params(cfg, rng());
      for (auto& [name, m] : parameter_refs(p, cfg))
        if (name.ends_with(".b"))
          for (Eigen::Index k = 0; k < m->size(); ++k) m->data()[k] = bias(rng);

      const auto trace = forward(batch, p, cfg, Phase::Train);
      const auto grad = backward(batch, trace, batch_loss(trace.logits, y, w).dlogits, p, cfg);
      const auto pattern = activation_pattern(trace);
      auto refs = parameter_refs(p, cfg);
      const auto grefs = parameter_refs(grad, cfg);
      for (std::size_t ti = 0; ti < refs.size(); ++ti) {
        Matrix& m = *refs[ti].second;
        for (Eigen::Index k = 0; k < m.size(); ++k) {
          const double orig = m.data()[k];
          double numeric = 0.0;
          bool smooth = false;
          // A step that moves a rectifier input across zero measures a kink,
          // not the derivative; shrink it until both probes stay on this piece.
          for (double h = 1e-5; h >= 1e-8 && !smooth; h /= 10.0) {
            if (h < 1e-5) ++reprobed;
            m.data()[k] = orig + h;
            const auto tp = forward(batch, p, cfg, Phase::Train);
            m.data()[k] = orig - h;
            const auto tm = forward(batch, p, cfg, Phase::Train);
            m.data()[k] = orig;
            numeric = (batch_loss(tp.logits, y, w).loss - batch_loss(tm.logits, y, w).loss) / (2.0 * h);
            smooth = activation_pattern(tp) == pattern && activation_pattern(tm) == pattern;
          }
          if (!smooth) ++unresolved;
          ++entries;
          const double analytic = grefs[ti].second->data()[k];
          const double err = gradient_relative_error(analytic, numeric);
          r.max_error = std::max(r.max_error, err);
          if (!(err < r.threshold) && r.passed) {
            r.passed = false;
            std::ostringstream s;
            s.precision(12);
            s << "graph " << t << ", flags (node_update " << cfg.edge_in_node_update << ", edge_update "
              << cfg.edge_update << ", readout " << cfg.edge_in_readout << "), " << refs[ti].first << "[" << k
              << "]: analytic " << analytic << ", numeric " << numeric;
            r.counterexample = s.str();
          }
        }
      }
    }
  }
  r.notes.push_back(std::to_string(entries) + " parameter entries checked, " + std::to_string(reprobed) +
                    " re-probed with smaller steps, " + std::to_string(unresolved) + " still crossing a kink");
  r.seconds = elapsed(t0);
  return r;
}

CheckReport check_embedding_invariance(long trials, std::uint64_t seed) {
  const auto t0 = Clock::now();
  CheckReport r{"embedding", trials, true, 0.0, 1e-6, {}, {}, 0.0};
  std::mt19937_64 rng(derive_seed(seed, "embedding"));
  ModelConfig cfg;
  cfg.node_features = static_cast<int>(kResidueFeatureWidth);
  const ModelParams p = init_params(cfg, rng());
  for (long t = 0; t < trials; ++t) {
    std::vector<Residue> residues;
    Vec3 ca;
    const int n = 10 + static_cast<int>(rng() % 11);
    for (int k = 0; k < n; ++k) {
      ca += 3.8 * random_unit_vector(rng);
      Residue res;
      static const char* names[] = {"ALA", "GLY", "SER", "LEU", "TRP", "HIS", "UNK"};
      res.name = names[rng() % 7];
      res.c_alpha = ca;
      if (rng() % 10) res.carboxyl_c = ca + 1.53 * random_unit_vector(rng);
      residues.push_back(res);
    }
    const MolGraph g = build_protein_graph(residues);
    const MolGraph moved = transform_graph(g, random_rigid_transform(rng()));
    const Matrix a = forward(make_batch(g), p, cfg, Phase::Eval).readout;
    const Matrix b = forward(make_batch(moved), p, cfg, Phase::Eval).readout;
    const double dev = (a - b).cwiseAbs().maxCoeff();
    r.max_error = std::max(r.max_error, dev);
    if (!(dev <= r.threshold) && r.passed) {
      r.passed = false;
      r.counterexample = "structure " + std::to_string(t) + " with " + std::to_string(n) + " residues; deviation " + fmt(dev);
    }
  }
  r.seconds = elapsed(t0);
  return r;
}

}  // namespace dnpgcn
