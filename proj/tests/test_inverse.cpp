#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "pencil/forward.hpp"
#include "pencil/inverse.hpp"

using namespace pencil;

TEST_CASE("order one matches the hand solution") {
  std::mt19937_64 g(99);
  for (int i = 0; i < 100; ++i) {
    const cplx sp = oracle::disk(g, 3.0);
    const cplx sm = oracle::disk(g, 3.0);
    const auto r = inverse::invert_coefficients(SpectralData({sp}, {sm}));
    CHECK(std::abs(r.potential.p(1) - oracle::order1_p(sp, sm)) < 1e-14);
    CHECK(std::abs(r.potential.q(1) - oracle::order1_q(sp, sm)) < 1e-14);
  }
}

TEST_CASE("worked order-2 data") {
  SpectralData s({-0.8, -0.18}, {-1.2, -0.98});
  std::vector<inverse::OrderSystem> systems;
  const auto r = inverse::invert_coefficients(s, &systems);
  CHECK(std::abs(r.potential.p(1) - 0.2) < 1e-14);
  CHECK(std::abs(r.potential.q(1) - 1.0) < 1e-14);
  CHECK(std::abs(r.potential.p(2)) < 1e-14);
  CHECK(std::abs(r.potential.q(2)) < 1e-14);
  CHECK(std::abs(r.jost.vtab(Branch::plus, 1, 2) - 0.32) < 1e-14);
  CHECK(std::abs(r.jost.vtab(Branch::minus, 1, 2) - 0.72) < 1e-14);
  CHECK(std::abs(r.jost.v(Branch::plus, 2) - 0.02) < 1e-14);

  REQUIRE(systems.size() == 2);
  for (const auto& sys : systems) {
    const double a = sys.alpha;
    CHECK(sys.determinant() == -2.0 * a);
    CHECK(std::abs(-a * sys.p() + sys.q() - sys.rhs_plus) < 1e-14);
    CHECK(std::abs(a * sys.p() + sys.q() - sys.rhs_minus) < 1e-14);
  }
}

TEST_CASE("zero data gives the zero potential") {
  const auto r = inverse::invert_coefficients(SpectralData::zero(5));
  for (int n = 1; n <= 5; ++n) {
    CHECK(r.potential.p(n) == cplx(0.0));
    CHECK(r.potential.q(n) == cplx(0.0));
  }
  CHECK(r.crosscheck.max_residual == 0.0);
}

TEST_CASE("roundtrip in both directions") {
  for (std::uint64_t seed = 100; seed < 110; ++seed) {
    const Potential pot = oracle::random_potential(seed, 12);
    const auto fr = forward::solve(pot);
    const auto r = inverse::invert_coefficients(fr.spectral);
    for (int n = 1; n <= 12; ++n) {
      CHECK(std::abs(r.potential.p(n) - pot.p(n)) <= 1e-10 * std::abs(pot.p(n)));
      CHECK(std::abs(r.potential.q(n) - pot.q(n)) <= 1e-10 * std::abs(pot.q(n)));
    }
    CHECK(r.crosscheck.max_residual < 1e-12);
    // the rebuilt table is the forward table
    const auto again = forward::jost_coefficients(r.potential);
    for (Branch b : kBranches) {
      for (int n = 1; n <= 12; ++n) {
        CHECK(std::abs(again.vtab(b, n, n) - fr.spectral.s(b, n)) <=
              1e-10 * std::abs(fr.spectral.s(b, n)));
      }
    }
  }
}

TEST_CASE("prefixes: truncating data truncates the potential") {
  const Potential pot = oracle::random_potential(7, 10);
  const auto s = forward::solve(pot).spectral;
  const auto full = inverse::invert_coefficients(s);
  const auto part = inverse::invert_coefficients(s.resized(4));
  for (int n = 1; n <= 4; ++n) {
    CHECK(std::abs(full.potential.p(n) - part.potential.p(n)) < 1e-15);
  }
}

TEST_CASE("degenerate data is still processed") {
  std::vector<cplx> big(6, cplx(50.0, -20.0));
  const auto r = inverse::invert_coefficients(SpectralData(big, big));
  for (int n = 1; n <= 6; ++n) {
    CHECK(std::isfinite(std::abs(r.potential.p(n))));
    CHECK(std::isfinite(std::abs(r.potential.q(n))));
  }
  // and forward reproduces it
  const auto back = forward::solve(r.potential).spectral;
  for (int n = 1; n <= 6; ++n) {
    CHECK(std::abs(back.plus(n) - big[n - 1]) < 1e-6 * std::abs(big[n - 1]));
  }
}

TEST_CASE("coefficient gap") {
  Potential a({1.0, 2.0}, {0.0, 0.0});
  Potential b({1.0, 2.5}, {0.0, -1.0});
  CHECK(inverse::max_coefficient_gap(a, b) == 1.0);
}
