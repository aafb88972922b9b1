#pragma once

// Direct problem: Jost coefficients, spectral data, and evaluation of the
// Jost-type solutions e_±(x, λ) of
//
//   -y'' + 2λ p(x) y + q(x) y = λ² y,
//
// e_±(x, λ) = e^{±iλx} (1 + Σ V_n^± e^{inx} + Σ_n Σ_{α≥n} V_{nα}^± e^{iαx} / (n ± 2λ)),
//
// together with the residual oracles used to certify them.

#include <optional>
#include <span>

#include "pencil/series.hpp"

namespace pencil::forward {

/// |n ± 2λ| below this is treated as a resonance.
inline constexpr double kResonanceGuard = 1e-8;

struct DecayDiagnostics {
  double sum_n_abs_p = 0.0;             // Σ n |p_n|, truncated
  double sum_abs_q = 0.0;               // Σ |q_n|, truncated
  std::optional<double> geometric_rate; // of max(|p_n|, |q_n|)
};

struct ForwardResult {
  JostTable jost;
  SpectralData spectral;
  DecayDiagnostics decay_diag;
};

/// Runs the recurrences in increasing α, for both branches:
///   α V_α^± = ∓(p_α + Σ_{s<α} V_s^± p_{α-s}),
///   α(α-n) V_{nα}^± = -Σ_{s=n}^{α-1} (q_{α-s} ∓ n p_{α-s}) V_{ns}^±,  n < α,
///   α² V_α^± + α Σ_{n≤α} V_{nα}^± + Σ_{s<α} (q_{α-s} V_s^± ± p_{α-s} Σ_{n≤s} V_{ns}^±) + q_α = 0.
JostTable jost_coefficients(const Potential& pot);

/// S_n^± = V_nn^±.
SpectralData spectral_data(const JostTable& jost);

DecayDiagnostics decay_diagnostics(const Potential& pot);

ForwardResult solve(const Potential& pot);

/// Value and first two x-derivatives of a Jost-type solution.
struct JostValue {
  cplx value;
  cplx d1;
  cplx d2;
};

/// e_±(x, λ) from the truncated series. Throws ResonanceError(n) when
/// |n ± 2λ| < kResonanceGuard for some n <= N.
cplx evaluate_e(const JostTable& jost, cplx x, cplx lambda, Branch b);

/// As evaluate_e, with termwise first and second derivatives.
JostValue evaluate_e_derivs(const JostTable& jost, cplx x, cplx lambda,
                            Branch b);

/// e_n^±(x) = lim_{λ→∓n/2} (n ± 2λ) e_±(x, λ) = Σ_{α=n}^{N} V_{nα}^± e^{iαx} e^{-inx/2}.
cplx limit_solution_e_n(const JostTable& jost, int n, cplx x, Branch b);

/// max_x |e_n^±(x) - S_n^± e_∓(x, ∓n/2)| over the samples.
double dependence_check(const JostTable& jost, int n,
                        std::span<const cplx> xs, Branch b);

/// W = e_+' e_- - e_+ e_-', which equals 2iλ; returns |W - 2iλ|.
cplx wronskian(const JostTable& jost, cplx x, cplx lambda);
double wronskian_residual(const JostTable& jost, cplx x, cplx lambda);

/// |-e'' + 2λ p(x) e + q(x) e - λ² e| with every piece from truncated series.
double ode_residual(const Potential& pot, const JostTable& jost, cplx x,
                    cplx lambda, Branch b);

/// K^±(t, u) = (1/2i) Σ_n Σ_{α≥n} V_{nα}^± e^{-αt} e^{-(u-t)n/2}, u >= t.
cplx kernel_K(const JostTable& jost, double t, double u, Branch b);

/// Ψ^±(t) = 1 + Σ V_n^± e^{-nt}. Accepts complex t.
cplx psi(const JostTable& jost, cplx t, Branch b);

/// Coefficients of Ψ^+ · Ψ^- up to order N (position 0 is order 0, which
/// is 1 for any table; every other entry vanishes for forward tables).
std::vector<cplx> psi_product_coefficients(const JostTable& jost);

/// z^±(t) = Σ S_m^± e^{-tm/2}.
cplx transition_z(const SpectralData& s, cplx t, Branch b);

/// S_n^± e^{ian}. Throws DomainError for Im a < 0.
SpectralData shift_spectral_data(const SpectralData& s, cplx a);

/// Truncated convergence sums attached to the kernel representation:
///   Σ n² |V_n^±|,  Σ_n (1/n) Σ_{α>n} α(α-n) |V_{nα}^±|,  Σ n |V_nn^±|.
struct ConvergenceSums {
  double weighted_v = 0.0;
  double weighted_table = 0.0;
  double weighted_diagonal = 0.0;
};
ConvergenceSums convergence_sums(const JostTable& jost, Branch b);

/// Geometric rate of max_n |V_{nα}^±| over α (both branches).
std::optional<double> table_decay_rate(const JostTable& jost);

}  // namespace pencil::forward
