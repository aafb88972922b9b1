#include "pencil/forward.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace pencil::forward {

namespace {

using Column = JostTable::Column;

void check_resonance(int order, cplx lambda, Branch b) {
  const double sg = sign(b);
  for (int n = 1; n <= order; ++n) {
    if (std::abs(static_cast<double>(n) + sg * 2.0 * lambda) <
        kResonanceGuard) {
      throw ResonanceError(n);
    }
  }
}

// Coefficients c_α of u(x) = Σ_{α=0}^{N} c_α e^{iαx}, e_± = e^{±iλx} u.
std::vector<cplx> solution_coefficients(const JostTable& jost, cplx lambda,
                                        Branch b) {
  const int order = jost.order();
  const double sg = sign(b);
  std::vector<cplx> c(static_cast<std::size_t>(order) + 1);
  c[0] = 1.0;
  for (int alpha = 1; alpha <= order; ++alpha) {
    cplx acc = jost.v(b, alpha);
    for (int n = 1; n <= alpha; ++n) {
      acc += jost.vtab(b, n, alpha) / (static_cast<double>(n) + sg * 2.0 * lambda);
    }
    c[static_cast<std::size_t>(alpha)] = acc;
  }
  return c;
}

}  // namespace

JostTable jost_coefficients(const Potential& pot) {
  const int order = pot.order();
  const auto p = pot.p_coeffs();
  const auto q = pot.q_coeffs();
  auto pm = [&](int n) { return p[static_cast<std::size_t>(n - 1)]; };
  auto qm = [&](int n) { return q[static_cast<std::size_t>(n - 1)]; };

  std::array<Column, 2> v{Column(order), Column(order)};
  std::array<Column, 2> tri{Column(JostTable::packed_size(order)),
                            Column(JostTable::packed_size(order))};

  for (Branch b : kBranches) {
    const double sg = sign(b);
    Column& vb = v[slot(b)];
    Column& tb = tri[slot(b)];
    auto V = [&](int n) -> cplx& { return vb[static_cast<std::size_t>(n - 1)]; };
    auto T = [&](int n, int a) -> cplx& { return tb[JostTable::packed_index(n, a)]; };

    // Running column sums Σ_{n≤s} V_{ns}, needed by the diagonal step.
    std::vector<cplx> column_sum(static_cast<std::size_t>(order) + 1);

    for (int a = 1; a <= order; ++a) {
      const double da = a;
      V(a) = -sg * (pm(a) + convolve_at(vb, p, a)) / da;

      for (int n = 1; n < a; ++n) {
        cplx acc{};
        for (int s = n; s < a; ++s) {
          acc += (qm(a - s) - sg * n * pm(a - s)) * T(n, s);
        }
        T(n, a) = -acc / (da * (a - n));
      }

      cplx inner = da * da * V(a) + qm(a);
      for (int s = 1; s < a; ++s) {
        inner += qm(a - s) * V(s) +
                 sg * pm(a - s) * column_sum[static_cast<std::size_t>(s)];
      }
      cplx off_diagonal{};
      for (int n = 1; n < a; ++n) off_diagonal += T(n, a);
      T(a, a) = -inner / da - off_diagonal;
      column_sum[static_cast<std::size_t>(a)] = off_diagonal + T(a, a);
    }
  }
  return {std::move(v), std::move(tri)};
}

SpectralData spectral_data(const JostTable& jost) {
  const int order = jost.order();
  std::vector<cplx> sp(order), sm(order);
  for (int n = 1; n <= order; ++n) {
    sp[n - 1] = jost.vtab(Branch::plus, n, n);
    sm[n - 1] = jost.vtab(Branch::minus, n, n);
  }
  return {std::move(sp), std::move(sm)};
}

DecayDiagnostics decay_diagnostics(const Potential& pot) {
  DecayDiagnostics d;
  std::vector<double> mags(static_cast<std::size_t>(pot.order()));
  for (int n = 1; n <= pot.order(); ++n) {
    d.sum_n_abs_p += n * std::abs(pot.p(n));
    d.sum_abs_q += std::abs(pot.q(n));
    mags[n - 1] = std::max(std::abs(pot.p(n)), std::abs(pot.q(n)));
  }
  d.geometric_rate = geometric_rate(mags);
  return d;
}

ForwardResult solve(const Potential& pot) {
  JostTable jost = jost_coefficients(pot);
  SpectralData spectral = spectral_data(jost);
  return {std::move(jost), std::move(spectral), decay_diagnostics(pot)};
}

JostValue evaluate_e_derivs(const JostTable& jost, cplx x, cplx lambda,
                            Branch b) {
  check_resonance(jost.order(), lambda, b);
  const auto c = solution_coefficients(jost, lambda, b);
  const double sg = sign(b);
  const cplx w = std::exp(kI * x);
  cplx wa = 1.0;
  JostValue out{0.0, 0.0, 0.0};
  for (std::size_t a = 0; a < c.size(); ++a) {
    const cplx k = kI * (static_cast<double>(a) + sg * lambda);  // d/dx factor
    const cplx term = c[a] * wa;
    out.value += term;
    out.d1 += k * term;
    out.d2 += k * k * term;
    wa *= w;
  }
  const cplx carrier = std::exp(sg * kI * lambda * x);
  out.value *= carrier;
  out.d1 *= carrier;
  out.d2 *= carrier;
  return out;
}

cplx evaluate_e(const JostTable& jost, cplx x, cplx lambda, Branch b) {
  return evaluate_e_derivs(jost, x, lambda, b).value;
}

cplx limit_solution_e_n(const JostTable& jost, int n, cplx x, Branch b) {
  if (n < 1 || n > jost.order()) {
    throw IndexError("limit solution: mode " + std::to_string(n) +
                     " outside 1.." + std::to_string(jost.order()));
  }
  cplx acc{};
  for (int a = n; a <= jost.order(); ++a) {
    acc += jost.vtab(b, n, a) * std::exp(kI * static_cast<double>(a) * x);
  }
  return acc * std::exp(-kI * x * (0.5 * n));
}

double dependence_check(const JostTable& jost, int n,
                        std::span<const cplx> xs, Branch b) {
  const cplx s_n = jost.vtab(b, n, n);
  // e_∓ at λ = ∓n/2.
  const Branch other = opposite(b);
  const cplx lambda = -sign(b) * 0.5 * n;
  double worst = 0.0;
  for (const cplx& x : xs) {
    const cplx lhs = limit_solution_e_n(jost, n, x, b);
    const cplx rhs = s_n * evaluate_e(jost, x, lambda, other);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

cplx wronskian(const JostTable& jost, cplx x, cplx lambda) {
  const JostValue ep = evaluate_e_derivs(jost, x, lambda, Branch::plus);
  const JostValue em = evaluate_e_derivs(jost, x, lambda, Branch::minus);
  return ep.d1 * em.value - ep.value * em.d1;
}

double wronskian_residual(const JostTable& jost, cplx x, cplx lambda) {
  return std::abs(wronskian(jost, x, lambda) - 2.0 * kI * lambda);
}

double ode_residual(const Potential& pot, const JostTable& jost, cplx x,
                    cplx lambda, Branch b) {
  const JostValue e = evaluate_e_derivs(jost, x, lambda, b);
  const cplx r = -e.d2 + 2.0 * lambda * pot.p_at(x) * e.value +
                 pot.q_at(x) * e.value - lambda * lambda * e.value;
  return std::abs(r);
}

cplx kernel_K(const JostTable& jost, double t, double u, Branch b) {
  if (u < t) throw DomainError("kernel_K needs u >= t");
  cplx acc{};
  for (int n = 1; n <= jost.order(); ++n) {
    const double tail = std::exp(-(u - t) * n / 2.0);
    cplx row{};
    for (int a = n; a <= jost.order(); ++a) {
      row += jost.vtab(b, n, a) * std::exp(-a * t);
    }
    acc += row * tail;
  }
  return acc / (2.0 * kI);
}

cplx psi(const JostTable& jost, cplx t, Branch b) {
  return 1.0 + eval_exp_series(jost.v_coeffs(b), t, 1.0);
}

std::vector<cplx> psi_product_coefficients(const JostTable& jost) {
  const int order = jost.order();
  std::vector<cplx> plus(static_cast<std::size_t>(order) + 1);
  std::vector<cplx> minus(plus.size());
  plus[0] = minus[0] = 1.0;
  for (int n = 1; n <= order; ++n) {
    plus[n] = jost.v(Branch::plus, n);
    minus[n] = jost.v(Branch::minus, n);
  }
  std::vector<cplx> prod(plus.size());
  for (std::size_t a = 0; a < prod.size(); ++a) {
    for (std::size_t s = 0; s <= a; ++s) prod[a] += plus[s] * minus[a - s];
  }
  return prod;
}

cplx transition_z(const SpectralData& s, cplx t, Branch b) {
  return eval_exp_series(s.coeffs(b), t, 0.5);
}

SpectralData shift_spectral_data(const SpectralData& s, cplx a) {
  if (a.imag() < 0.0) throw DomainError("shift needs Im a >= 0");
  std::vector<cplx> sp(s.coeffs(Branch::plus).begin(), s.coeffs(Branch::plus).end());
  std::vector<cplx> sm(s.coeffs(Branch::minus).begin(), s.coeffs(Branch::minus).end());
  for (std::size_t j = 0; j < sp.size(); ++j) {
    const cplx phase = std::exp(kI * a * static_cast<double>(j + 1));
    sp[j] *= phase;
    sm[j] *= phase;
  }
  return {std::move(sp), std::move(sm)};
}

ConvergenceSums convergence_sums(const JostTable& jost, Branch b) {
  ConvergenceSums out;
  for (int n = 1; n <= jost.order(); ++n) {
    out.weighted_v += static_cast<double>(n) * n * std::abs(jost.v(b, n));
    double row = 0.0;
    for (int a = n + 1; a <= jost.order(); ++a) {
      row += static_cast<double>(a) * (a - n) * std::abs(jost.vtab(b, n, a));
    }
    out.weighted_table += row / n;
    out.weighted_diagonal += n * std::abs(jost.vtab(b, n, n));
  }
  return out;
}

std::optional<double> table_decay_rate(const JostTable& jost) {
  std::vector<double> mags(static_cast<std::size_t>(jost.order()));
  for (int a = 1; a <= jost.order(); ++a) {
    double m = 0.0;
    for (Branch b : kBranches) {
      for (int n = 1; n <= a; ++n) m = std::max(m, std::abs(jost.vtab(b, n, a)));
    }
    mags[a - 1] = m;
  }
  return geometric_rate(mags);
}

}  // namespace pencil::forward
