#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dnp/network.hpp"

namespace dnpgcn {

struct CheckReport {
  std::string name;
  long trials = 0;
  bool passed = false;
  double max_error = 0.0;
  double threshold = 0.0;
  std::string counterexample;      // first violating input, empty when none
  std::vector<std::string> notes;  // extra measurements
  double seconds = 0.0;
};

/// Random directional pairs (including corner cases) under random rigid
/// motions; max componentwise quadruplet deviation < 1e-9.
CheckReport check_invariance(long trials, std::uint64_t seed);

/// dnp(a, b) == dnp(b, a) bit for bit, a fifth of the pairs built with
/// exactly tied angles.
CheckReport check_symmetry(long trials, std::uint64_t seed);

/// General-case pairs rebuilt from their quadruplet: quadruplet round-trip
/// error < 1e-9 and Kabsch RMSD of the four defining points < 1e-6.
CheckReport check_injectivity(long trials, std::uint64_t seed);

/// Mirrored non-planar pairs: point pair features must agree within 1e-12
/// and the dnp gamma must change sign in every non-degenerate case.
CheckReport check_chirality(long trials, std::uint64_t seed);

/// Central differences (step 1e-5) against backward() on random 5-node
/// graphs, every trainable tensor, all eight edge-pathway combinations,
/// no normalization; max relative error < 1e-5.
CheckReport check_gradients(long trials, std::uint64_t seed);

/// Readout vectors of random protein-like structures and their rigid
/// motions agree within 1e-6 componentwise.
CheckReport check_embedding_invariance(long trials, std::uint64_t seed);

/// Relative error used by the gradient check: |a - n| / max(|a|, |n|, 1e-4).
double gradient_relative_error(double analytic, double numeric);

}  // namespace dnpgcn
