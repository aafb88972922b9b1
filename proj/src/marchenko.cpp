// Operator route of the inverse problem. Conventions are tabulated in
// inverse.hpp.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pencil/forward.hpp"
#include "pencil/inverse.hpp"
#include "pencil/linalg.hpp"

namespace pencil::inverse {

namespace {

Eigen::VectorXcd as_vector(std::span<const cplx> c) {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(c.size()));
  for (std::size_t j = 0; j < c.size(); ++j) v(static_cast<Eigen::Index>(j)) = c[j];
  return v;
}

// Σ_n c_n e^{-n x/2}
cplx half_exp_sum(const Eigen::VectorXcd& c, cplx x) {
  const cplx w = std::exp(-0.5 * x);
  cplx wn = w;
  cplx acc{};
  for (Eigen::Index n = 0; n < c.size(); ++n) {
    acc += c(n) * wn;
    wn *= w;
  }
  return acc;
}

// Σ_n c_n ∫_t^∞ e^{-nu/2} du = Σ_n c_n 2 e^{-nt/2} / n
cplx half_exp_integral(const Eigen::VectorXcd& c, cplx t) {
  const cplx w = std::exp(-0.5 * t);
  cplx wn = w;
  cplx acc{};
  for (Eigen::Index n = 0; n < c.size(); ++n) {
    acc += c(n) * 2.0 * wn / static_cast<double>(n + 1);
    wn *= w;
  }
  return acc;
}

// Transition data of the reconstruction equation: ζ = z / 2.
SpectralData transition_data(const SpectralData& s) { return s.scaled(0.5); }

CoupledSolution solve_coupled(const MarchenkoOperators& ops,
                              const SpectralData& sigma,
                              std::array<cplx, 2> forcing) {
  CoupledSolution sol;
  std::array<Eigen::MatrixXcd, 2> r;
  for (Branch b : kBranches) r[slot(b)] = resolvent(ops, b).matrix;

  for (Branch b : kBranches) {
    const Branch o = opposite(b);
    const Eigen::VectorXcd rhs = forcing[slot(b)] * (ops.f1(b) * ops.e_vec) +
                                 forcing[slot(o)] * (ops.f2(b) * ops.e_vec);
    sol.w[slot(b)] = r[slot(b)] * rhs;
  }
  for (Branch b : kBranches) {
    const Branch o = opposite(b);
    const Eigen::VectorXcd sig = as_vector(sigma.coeffs(b));
    sol.a[slot(b)] =
        sig.cwiseProduct(forcing[slot(b)] * ops.e_vec + sol.w[slot(o)]);
  }
  return sol;
}

constexpr std::array<cplx, 2> kForcingP{cplx{1.0, 0.0}, cplx{1.0, 0.0}};
constexpr std::array<cplx, 2> kForcingQ{cplx{0.0, 1.0}, cplx{0.0, -1.0}};

// P^±(t, s) = c^± <e, B^±(s)> + <c^∓ e + w^±, A^±(s, t)>
cplx sample_vector_form(const MarchenkoOperators& ops, const SpectralData& sigma,
                        const CoupledSolution& sol, std::array<cplx, 2> forcing,
                        Branch b, cplx s) {
  const Branch o = opposite(b);
  const int order = ops.order;
  cplx value{};
  for (int m = 1; m <= order; ++m) {
    const cplx b_m = sigma.s(b, m) * std::exp(-0.5 * m * s);
    cplx a_m{};
    for (int k = 1; k <= order; ++k) {
      a_m += 2.0 * sigma.s(o, m) * sigma.s(b, k) / static_cast<double>(m + k) *
             std::exp(-0.5 * k * s) * std::exp(-0.5 * (m + k) * ops.t);
    }
    const cplx e_m = ops.e_vec(m - 1);
    value += forcing[slot(b)] * e_m * b_m +
             (forcing[slot(o)] * e_m + sol.w[slot(b)](m - 1)) * a_m;
  }
  return value;
}

}  // namespace

MarchenkoOperators build_operators(const SpectralData& s, cplx t) {
  if (t.real() < 0.0) throw DomainError("operators need Re t >= 0");
  const int order = s.order();
  MarchenkoOperators ops;
  ops.t = t;
  ops.order = order;
  ops.e_vec.resize(order);
  for (int n = 1; n <= order; ++n) ops.e_vec(n - 1) = std::exp(-0.5 * n * t);

  for (Branch b : kBranches) {
    const Branch o = opposite(b);
    Eigen::MatrixXcd f1(order, order);
    Eigen::MatrixXcd f2(order, order);
    for (int m = 1; m <= order; ++m) {
      for (int n = 1; n <= order; ++n) {
        f1(m - 1, n - 1) = 2.0 * s.s(b, n) / static_cast<double>(m + n) *
                           std::exp(-0.5 * (m + n) * t);
        cplx acc{};
        for (int k = 1; k <= order; ++k) {
          acc += 4.0 * s.s(o, n) * s.s(b, k) /
                 static_cast<double>((n + k) * (m + k)) *
                 std::exp(-0.5 * (m + k) * t) * std::exp(-0.5 * (n + k) * t);
        }
        f2(m - 1, n - 1) = acc;
      }
    }
    if (b == Branch::plus) {
      ops.f1_plus = std::move(f1);
      ops.f2_plus = std::move(f2);
    } else {
      ops.f1_minus = std::move(f1);
      ops.f2_minus = std::move(f2);
    }
  }
  return ops;
}

Resolvent resolvent(const MarchenkoOperators& ops, Branch b) {
  const Eigen::MatrixXcd& f2 = ops.f2(b);
  const Eigen::MatrixXcd a =
      Eigen::MatrixXcd::Identity(ops.order, ops.order) - f2;
  const Eigen::VectorXd sv = linalg::singular_values(a);
  const Eigen::VectorXd fv = linalg::singular_values(f2);
  const double f2_norm = fv.size() ? fv(0) : 0.0;
  Resolvent r;
  r.sigma_min = sv.size() ? sv(sv.size() - 1) : 1.0;
  r.condition = r.sigma_min > 0.0 ? sv(0) / r.sigma_min
                                  : std::numeric_limits<double>::infinity();
  if (!(r.sigma_min > kSingularFraction * f2_norm) || r.sigma_min == 0.0) {
    throw SingularOperator("I - F2 is numerically singular", r.sigma_min);
  }
  r.matrix = a.partialPivLu().inverse();
  return r;
}

cplx CoupledSolution::at(Branch b, cplx s) const {
  return half_exp_sum(a[slot(b)], s);
}

cplx CoupledSolution::integral(Branch b, cplx t) const {
  return half_exp_integral(a[slot(b)], t);
}

Eigen::VectorXcd PQSolution::alpha_coeffs(Branch b) const {
  // α^± = ½(P^± ∓ iQ^±)
  return 0.5 * (p.a[slot(b)] - static_cast<double>(sign(b)) * kI * q.a[slot(b)]);
}

Eigen::VectorXcd PQSolution::beta_coeffs(Branch b) const {
  // β^∓ = ½(P^± ± iQ^±), i.e. β^b is built from the opposite branch.
  const Branch o = opposite(b);
  return 0.5 * (p.a[slot(o)] + static_cast<double>(sign(o)) * kI * q.a[slot(o)]);
}

cplx PQSolution::alpha_integral(Branch b) const {
  return half_exp_integral(alpha_coeffs(b), t);
}

cplx PQSolution::beta_integral(Branch b) const {
  return half_exp_integral(beta_coeffs(b), t);
}

PQSolution solve_PQ(const SpectralData& s, cplx t, std::span<const cplx> s_grid) {
  const SpectralData sigma = transition_data(s);
  const MarchenkoOperators ops = build_operators(sigma, t);
  PQSolution out;
  out.t = t;
  out.p = solve_coupled(ops, sigma, kForcingP);
  out.q = solve_coupled(ops, sigma, kForcingQ);
  out.s_grid.assign(s_grid.begin(), s_grid.end());
  for (Branch b : kBranches) {
    auto& ps = out.p_samples[slot(b)];
    auto& qs = out.q_samples[slot(b)];
    ps.reserve(s_grid.size());
    qs.reserve(s_grid.size());
    for (const cplx& sv : s_grid) {
      ps.push_back(sample_vector_form(ops, sigma, out.p, kForcingP, b, sv));
      qs.push_back(sample_vector_form(ops, sigma, out.q, kForcingQ, b, sv));
    }
  }
  return out;
}

cplx psi_squared(const PQSolution& pq, Branch b) {
  const Branch o = opposite(b);
  const cplx num = 1.0 - (pq.alpha_integral(b) - pq.beta_integral(b));
  const cplx den = 1.0 - (pq.alpha_integral(o) - pq.beta_integral(o));
  return num / den;
}

namespace {

cplx checked_ratio(const PQSolution& pq, Branch b) {
  const cplx r = psi_squared(pq, b);
  if (!std::isfinite(r.real()) || !std::isfinite(r.imag()) ||
      std::abs(r) < 1e-12) {
    throw BranchAmbiguity("Psi^2 ratio degenerates at t = (" +
                          std::to_string(pq.t.real()) + ", " +
                          std::to_string(pq.t.imag()) + ")");
  }
  return r;
}

cplx nearest_root(cplx squared, cplx previous) {
  const cplx r = std::sqrt(squared);
  return std::abs(r - previous) <= std::abs(-r - previous) ? r : -r;
}

// A root step is trusted when the chosen root is much closer to the previous
// value than its negative.
bool unambiguous(cplx squared, cplx previous) {
  const cplx r = std::sqrt(squared);
  const double near = std::min(std::abs(r - previous), std::abs(r + previous));
  return near < 0.5 * std::abs(r);
}

}  // namespace

PsiSamples psi_from_PQ(std::span<const PQSolution> path) {
  PsiSamples out;
  std::array<cplx, 2> previous{1.0, 1.0};
  for (const PQSolution& pq : path) {
    out.t.push_back(pq.t);
    for (Branch b : kBranches) {
      const cplx r = checked_ratio(pq, b);
      previous[slot(b)] = nearest_root(r, previous[slot(b)]);
      out.psi[slot(b)].push_back(previous[slot(b)]);
    }
  }
  return out;
}

namespace {

// Moves both Ψ values from `from` to `to` along the segment, halving steps
// until every square root choice is clear.
void continue_psi(const SpectralData& s, cplx from, cplx to,
                  std::array<cplx, 2>& current, int depth = 0) {
  const PQSolution pq = solve_PQ(s, to, {});
  const std::array<cplx, 2> r{checked_ratio(pq, Branch::plus),
                              checked_ratio(pq, Branch::minus)};
  if (!unambiguous(r[0], current[0]) || !unambiguous(r[1], current[1])) {
    if (depth > 30) {
      throw BranchAmbiguity("Psi branch cannot be continued along the path");
    }
    const cplx mid = 0.5 * (from + to);
    continue_psi(s, from, mid, current, depth + 1);
    continue_psi(s, mid, to, current, depth + 1);
    return;
  }
  for (Branch b : kBranches) {
    current[slot(b)] = nearest_root(r[slot(b)], current[slot(b)]);
  }
}

}  // namespace

std::array<cplx, 2> psi_at(const SpectralData& s, cplx t, double far, int steps) {
  std::array<cplx, 2> current{1.0, 1.0};
  const cplx start = t + far;
  cplx from = start;
  for (int k = 1; k <= steps; ++k) {
    const cplx to = start - far * static_cast<double>(k) / steps;
    continue_psi(s, from, to, current);
    from = to;
  }
  return current;
}

cplx kernel_from_pq(const PQSolution& pq, cplx psi_plus, cplx psi_minus,
                      cplx s, Branch b) {
  const Branch o = opposite(b);
  const cplx psi_same = b == Branch::plus ? psi_plus : psi_minus;
  const cplx psi_other = b == Branch::plus ? psi_minus : psi_plus;
  const cplx k_true = psi_other * half_exp_sum(pq.alpha_coeffs(b), s) +
                      psi_same * half_exp_sum(pq.beta_coeffs(o), s);
  return k_true / kI;
}

RouteSamples sample_route(const SpectralData& s, std::span<const cplx> t_grid) {
  RouteSamples out;
  out.t.assign(t_grid.begin(), t_grid.end());
  std::array<cplx, 2> psi{1.0, 1.0};
  for (std::size_t j = 0; j < t_grid.size(); ++j) {
    const cplx t = t_grid[j];
    if (j == 0) {
      psi = psi_at(s, t);
    } else {
      continue_psi(s, t_grid[j - 1], t, psi);
    }
    const PQSolution pq = solve_PQ(s, t, {});
    for (Branch b : kBranches) {
      out.psi[slot(b)].push_back(psi[slot(b)]);
      out.kernel_diag[slot(b)].push_back(kernel_from_pq(pq, psi[0], psi[1], t, b));
    }
  }
  return out;
}

Potential reconstruct_pq(const RouteSamples& samples, Branch b, int order,
                         int fit_order) {
  const auto& t = samples.t;
  const auto& psi = samples.psi[slot(b)];
  const auto& kd = samples.kernel_diag[slot(b)];
  const double sg = sign(b);
  for (const cplx& v : psi) {
    if (std::abs(v) < 1e-10) throw ZeroPsi("Psi vanishes on the grid");
  }

  std::vector<cplx> psi_minus_one(psi.size());
  for (std::size_t j = 0; j < psi.size(); ++j) psi_minus_one[j] = psi[j] - 1.0;
  const ExpFit psi_fit = fit_exp_coefficients(t, psi_minus_one, fit_order, 1.0);
  const ExpFit k_fit = fit_exp_coefficients(t, kd, fit_order, 1.0);

  // Termwise derivatives of Σ c_n e^{-nt}.
  auto derivative = [](const std::vector<cplx>& c, int times) {
    std::vector<cplx> d(c.size());
    for (std::size_t n = 0; n < c.size(); ++n) {
      d[n] = c[n] * std::pow(-static_cast<double>(n + 1), times);
    }
    return d;
  };
  const auto psi_d1 = derivative(psi_fit.coeffs, 1);
  const auto psi_d2 = derivative(psi_fit.coeffs, 2);
  const auto k_d1 = derivative(k_fit.coeffs, 1);

  std::vector<cplx> pbar(t.size()), qbar(t.size());
  for (std::size_t j = 0; j < t.size(); ++j) {
    const cplx ps = psi[j];
    const cplx d1 = eval_exp_series(psi_d1, t[j], 1.0);
    const cplx d2 = eval_exp_series(psi_d2, t[j], 1.0);
    const cplx k_true = kI * kd[j];
    const cplx k_true_d1 = kI * eval_exp_series(k_d1, t[j], 1.0);
    pbar[j] = kI * sg * d1 / ps;
    qbar[j] = (d2 - 2.0 * k_true_d1 - 2.0 * kI * sg * pbar[j] * k_true) / ps;
  }
  const ExpFit pbar_fit = fit_exp_coefficients(t, pbar, fit_order, 1.0);
  const ExpFit qbar_fit = fit_exp_coefficients(t, qbar, fit_order, 1.0);

  std::vector<cplx> pb(pbar_fit.coeffs.begin(), pbar_fit.coeffs.begin() + order);
  std::vector<cplx> qb(qbar_fit.coeffs.begin(), qbar_fit.coeffs.begin() + order);
  return from_semiaxis(SemiaxisPotential(std::move(pb), std::move(qb)));
}

Potential operator_route(const SpectralData& s, Branch b) {
  const int order = s.order();
  const int m = std::max(64, 4 * order);
  const auto grid = line_fit_grid(m);
  return reconstruct_pq(sample_route(s, grid), b, order, m / 2);
}

double homogeneous_triviality(const SpectralData& s, cplx t, cplx a) {
  const MarchenkoOperators ops =
      build_operators(forward::shift_spectral_data(s, a), t);
  const Eigen::VectorXd sv = linalg::singular_values(
      Eigen::MatrixXcd::Identity(ops.order, ops.order) - ops.f2_plus);
  return sv(sv.size() - 1);
}

}  // namespace pencil::inverse
