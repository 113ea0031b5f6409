#include "doctest.h"

#include "dnp/checks.hpp"

using namespace dnpgcn;

TEST_CASE("descriptor property suites") {
  const auto inv = check_invariance(2000, 3);
  CHECK(inv.passed);
  CHECK(inv.max_error < 1e-9);
  CHECK(inv.counterexample.empty());

  const auto sym = check_symmetry(2000, 3);
  CHECK(sym.passed);
  CHECK(sym.max_error == 0.0);

  const auto inj = check_injectivity(2000, 3);
  CHECK(inj.passed);
  CHECK(inj.max_error < 1e-6);
}

TEST_CASE("chirality suite reports what mirroring does") {
  const auto r = check_chirality(200, 3);
  // ppf is mirror-blind to machine precision.
  CHECK(r.max_error <= 1e-12);
  // Mirroring keeps gamma and reflects beta, so the sign-flip requirement
  // fails and the report carries a counterexample.
  CHECK_FALSE(r.passed);
  CHECK_FALSE(r.counterexample.empty());
  bool beta_note = false;
  for (const auto& n : r.notes) beta_note = beta_note || n.find("beta -> pi - beta in 200/200") != std::string::npos;
  CHECK(beta_note);
}

TEST_CASE("gradient and embedding suites") {
  const auto g = check_gradients(3, 5);
  CHECK(g.passed);
  CHECK(g.max_error < 1e-5);
  const auto e = check_embedding_invariance(10, 5);
  CHECK(e.passed);
  CHECK(e.max_error <= 1e-6);
}

TEST_CASE("relative error floor") {
  CHECK(gradient_relative_error(1.0, 1.0) == 0.0);
  CHECK(gradient_relative_error(2.0, 1.0) == 0.5);
  CHECK(gradient_relative_error(1e-12, 0.0) == doctest::Approx(1e-8));
}
