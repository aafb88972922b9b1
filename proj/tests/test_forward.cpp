#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>

#include "oracles.hpp"
#include "pencil/forward.hpp"

using namespace pencil;
using oracle::kPi;

namespace {

Potential worked() { return Potential({0.2}, {1.0}).resized(2); }

// Recovers V_α and V_{nα}, n <= α, from the ODE series by partial fractions:
// c_α(λ) = V_α + Σ_n V_{nα} / (n ± 2λ) sampled at α + 1 values of λ.
std::vector<cplx> partial_fractions(const Potential& pot, int alpha, int sg) {
  const auto p = oracle::to_vec(pot.p_coeffs());
  const auto q = oracle::to_vec(pot.q_coeffs());
  const int m = alpha + 1;
  Eigen::MatrixXcd a(m, m);
  Eigen::VectorXcd rhs(m);
  for (int r = 0; r < m; ++r) {
    const cplx lambda{0.37 + 0.61 * r, 0.23 - 0.11 * r};
    rhs(r) = oracle::ode_series(p, q, lambda, sg, alpha)[alpha];
    a(r, 0) = 1.0;
    for (int n = 1; n <= alpha; ++n) a(r, n) = 1.0 / (double(n) + sg * 2.0 * lambda);
  }
  const Eigen::VectorXcd x = a.fullPivLu().solve(rhs);
  return {x.data(), x.data() + m};
}

}  // namespace

TEST_CASE("worked order-2 example") {
  const JostTable t = forward::jost_coefficients(worked());
  const auto plus = Branch::plus;
  const auto minus = Branch::minus;
  CHECK(std::abs(t.v(plus, 1) - (-0.2)) < 1e-14);
  CHECK(std::abs(t.v(minus, 1) - 0.2) < 1e-14);
  CHECK(std::abs(t.vtab(plus, 1, 1) - (-0.8)) < 1e-14);
  CHECK(std::abs(t.vtab(minus, 1, 1) - (-1.2)) < 1e-14);
  CHECK(std::abs(t.v(plus, 2) - 0.02) < 1e-14);
  CHECK(std::abs(t.v(minus, 2) - 0.02) < 1e-14);
  CHECK(std::abs(t.vtab(plus, 1, 2) - 0.32) < 1e-14);
  CHECK(std::abs(t.vtab(minus, 1, 2) - 0.72) < 1e-14);
  CHECK(std::abs(t.vtab(plus, 2, 2) - (-0.18)) < 1e-14);
  CHECK(std::abs(t.vtab(minus, 2, 2) - (-0.98)) < 1e-14);

  const SpectralData s = forward::spectral_data(t);
  CHECK(std::abs(s.plus(2) - (-0.18)) < 1e-14);
  CHECK(std::abs(s.minus(1) - (-1.2)) < 1e-14);
}

TEST_CASE("zero potential gives the free solution") {
  const auto fr = forward::solve(Potential::zero(4));
  for (Branch b : kBranches) {
    for (int a = 1; a <= 4; ++a) {
      CHECK(fr.jost.v(b, a) == cplx(0.0));
      for (int n = 1; n <= a; ++n) CHECK(fr.jost.vtab(b, n, a) == cplx(0.0));
    }
  }
  const cplx lambda{0.3, 0.1};
  const cplx x{1.1, 0.0};
  CHECK(std::abs(forward::evaluate_e(fr.jost, x, lambda, Branch::plus) -
                 std::exp(kI * lambda * x)) < 1e-15);
  CHECK(forward::wronskian_residual(fr.jost, x, lambda) < 1e-15);
  CHECK(fr.decay_diag.sum_abs_q == 0.0);
  CHECK_FALSE(fr.decay_diag.geometric_rate);
}

TEST_CASE("tables match the partial-fraction decomposition of the ODE series") {
  const Potential pot = oracle::random_potential(11, 6);
  const JostTable t = forward::jost_coefficients(pot);
  for (Branch b : kBranches) {
    for (int a = 1; a <= 6; ++a) {
      const auto pf = partial_fractions(pot, a, sign(b));
      CHECK(std::abs(pf[0] - t.v(b, a)) < 1e-10);
      for (int n = 1; n <= a; ++n) {
        CHECK(std::abs(pf[n] - t.vtab(b, n, a)) < 1e-10);
      }
    }
  }
}

TEST_CASE("evaluate_e equals the ODE series") {
  const Potential pot = oracle::random_potential(5, 8);
  const JostTable t = forward::jost_coefficients(pot);
  const auto p = oracle::to_vec(pot.p_coeffs());
  const auto q = oracle::to_vec(pot.q_coeffs());
  for (Branch b : kBranches) {
    for (cplx lambda : {cplx(0.3, 0.2), cplx(-1.7, 0.0), cplx(2.2, -0.4)}) {
      const auto c = oracle::ode_series(p, q, lambda, sign(b), 8);
      for (cplx x : {cplx(0.0), cplx(1.3), cplx(2.0, 0.5)}) {
        const cplx want = oracle::ode_solution(c, x, lambda, sign(b));
        CHECK(std::abs(forward::evaluate_e(t, x, lambda, b) - want) < 1e-13);
      }
    }
  }
}

TEST_CASE("closing relation holds on forward tables") {
  // V_{n,n+β}^± = S_n^± (V_β^∓ + Σ_{m≤β} V_{mβ}^∓ / (m + n))
  const Potential pot = oracle::random_potential(8, 9);
  const auto fr = forward::solve(pot);
  for (Branch b : kBranches) {
    const Branch o = opposite(b);
    for (int n = 1; n <= 9; ++n) {
      for (int beta = 1; n + beta <= 9; ++beta) {
        cplx rhs = fr.jost.v(o, beta);
        for (int m = 1; m <= beta; ++m) rhs += fr.jost.vtab(o, m, beta) / double(m + n);
        rhs *= fr.spectral.s(b, n);
        CHECK(std::abs(fr.jost.vtab(b, n, n + beta) - rhs) < 1e-14);
      }
    }
  }
}

TEST_CASE("resonances and limit solutions") {
  const Potential pot = oracle::random_potential(2, 5);
  const JostTable t = forward::jost_coefficients(pot);
  CHECK_THROWS_AS(forward::evaluate_e(t, 0.3, -1.0, Branch::plus), ResonanceError);
  CHECK_THROWS_AS(forward::evaluate_e(t, 0.3, 1.5, Branch::minus), ResonanceError);
  try {
    forward::evaluate_e(t, 0.3, -1.5, Branch::plus);
    FAIL("expected a resonance");
  } catch (const ResonanceError& e) {
    CHECK(e.mode() == 3);
  }
  CHECK_NOTHROW(forward::evaluate_e(t, 0.3, -1.5, Branch::minus));

  // e_n^+ = lim (n + 2λ) e_+(x, λ) as λ -> -n/2
  const int n = 2;
  const cplx x{0.9, 0.2};
  const double eps = 1e-7;
  const cplx lambda = -0.5 * n + eps;
  const cplx approx = (double(n) + 2.0 * lambda) * forward::evaluate_e(t, x, lambda, Branch::plus);
  CHECK(std::abs(approx - forward::limit_solution_e_n(t, n, x, Branch::plus)) < 1e-6);
  CHECK_THROWS_AS(forward::limit_solution_e_n(t, 6, x, Branch::plus), IndexError);
}

TEST_CASE("limit solutions are proportional to the opposite Jost solution") {
  const Potential pot = oracle::random_potential(21, 10);
  const JostTable t = forward::jost_coefficients(pot);
  // truncation tails vanish for large Im x
  std::vector<cplx> xs{cplx(0.0, 6.0), cplx(1.0, 6.0), cplx(2.5, 7.0)};
  for (Branch b : kBranches) {
    for (int n = 1; n <= 4; ++n) CHECK(forward::dependence_check(t, n, xs, b) < 1e-12);
  }
}

TEST_CASE("Wronskian and ODE residual") {
  const Potential pot = oracle::random_potential(4, 10);
  const JostTable t = forward::jost_coefficients(pot);
  const cplx lambda{0.41, 0.13};
  const cplx w0 = forward::wronskian(t, cplx(0.3, 4.0), lambda);
  CHECK(std::abs(w0 - 2.0 * kI * lambda) < 1e-12);
  for (cplx x : {cplx(1.0, 4.0), cplx(2.0, 5.0), cplx(0.1, 3.0)}) {
    CHECK(forward::wronskian_residual(t, x, lambda) < 1e-12);
    for (Branch b : kBranches) {
      CHECK(forward::ode_residual(pot, t, x, lambda, b) < 1e-12);
    }
  }
}

TEST_CASE("kernel K") {
  const JostTable t = forward::jost_coefficients(worked());
  const double tt = 0.7;
  const double u = 1.4;
  // only the α = 1 row for a one-mode check
  const JostTable t1 = forward::jost_coefficients(Potential({0.2}, {1.0}));
  const cplx want = t1.vtab(Branch::plus, 1, 1) * std::exp(-tt) *
                    std::exp(-(u - tt) / 2.0) / (2.0 * kI);
  CHECK(std::abs(forward::kernel_K(t1, tt, u, Branch::plus) - want) < 1e-15);
  CHECK_THROWS_AS(forward::kernel_K(t, 1.0, 0.5, Branch::plus), DomainError);
}

TEST_CASE("psi product is identically one") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const JostTable t = forward::jost_coefficients(oracle::random_potential(seed, 12));
    const auto prod = forward::psi_product_coefficients(t);
    CHECK(prod[0] == cplx(1.0));
    for (std::size_t a = 1; a < prod.size(); ++a) CHECK(std::abs(prod[a]) < 1e-14);
    // the product of the truncated series has tails beyond order N
    const cplx tt{4.0, 0.9};
    CHECK(std::abs(forward::psi(t, tt, Branch::plus) * forward::psi(t, tt, Branch::minus) - 1.0) <
          1e-12);
  }
}

TEST_CASE("shift covariance") {
  const Potential pot = oracle::random_potential(9, 8);
  const SpectralData s = forward::solve(pot).spectral;
  for (cplx a : {cplx(kPi / 3), cplx(kPi), cplx(1.0, 0.5)}) {
    const SpectralData shifted = forward::solve(shift_potential(pot, a)).spectral;
    const SpectralData want = forward::shift_spectral_data(s, a);
    for (Branch b : kBranches) {
      for (int n = 1; n <= 8; ++n) {
        CHECK(std::abs(shifted.s(b, n) - want.s(b, n)) < 1e-14);
      }
    }
  }
  CHECK_THROWS_AS(forward::shift_spectral_data(s, cplx(0.0, -0.1)), DomainError);
}

TEST_CASE("transition function") {
  SpectralData s({2.0, 1.0}, {0.0, 3.0});
  const cplx t{0.5, 0.2};
  const cplx want = 2.0 * std::exp(-t / 2.0) + 1.0 * std::exp(-t);
  CHECK(std::abs(forward::transition_z(s, t, Branch::plus) - want) < 1e-15);
}

TEST_CASE("decay diagnostics and convergence sums") {
  const Potential pot = oracle::random_potential(6, 12);
  const auto fr = forward::solve(pot);
  double sum = 0.0;
  for (int n = 1; n <= 12; ++n) sum += n * std::abs(pot.p(n));
  CHECK(fr.decay_diag.sum_n_abs_p == doctest::Approx(sum));
  REQUIRE(fr.decay_diag.geometric_rate);
  CHECK(*fr.decay_diag.geometric_rate < 0.7);

  REQUIRE(forward::table_decay_rate(fr.jost));
  CHECK(*forward::table_decay_rate(fr.jost) < 0.8);
  for (Branch b : kBranches) {
    const auto cs = forward::convergence_sums(fr.jost, b);
    CHECK(std::isfinite(cs.weighted_v));
    CHECK(std::isfinite(cs.weighted_table));
    CHECK(cs.weighted_diagonal > 0.0);
  }
}
