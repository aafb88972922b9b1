#pragma once

// Inverse problem: reconstruct (p_n, q_n) from S_n^±.
//
// Two independent routes:
//  * coefficient route (canonical): order-by-order recursion, exact;
//  * operator route: the Marchenko-type equation solved through the
//    matrices F¹, F², the resolvent (I - F²)^{-1}, the auxiliary kernels
//    P, Q and the function Ψ, then p̄, q̄ from Ψ and K(t, t).
//
// Operator-route conventions (each pinned by the "convention table" test):
//
//  | item                     | choice                                                |
//  |--------------------------|-------------------------------------------------------|
//  | transition function      | ζ^±(x) = ½ Σ S_m^± e^{-mx/2}, i.e. operators of S/2    |
//  | Marchenko unknown        | i·K^±(t,s), K in the forward kernel_K normalization   |
//  | forcing                  | i·K^± = Ψ^∓ ζ^±(t+s) + ∫_t^∞ i·K^∓(t,u) ζ^±(u+s) du   |
//  | F¹ in the vector eq.     | same branch: w^± = R^± (c^± F¹^± + c^∓ F²^±) e         |
//  | P, Q forcing (c^+, c^-)  | P: (1, 1);  Q: (i, -i)                                 |
//  | α, β                     | α^± = ½(P^± ∓ iQ^±),  β^∓ = ½(P^± ± iQ^±)              |
//  | kernel                   | i·K^± = Ψ^∓ α^± + Ψ^± β^∓                               |
//  | Ψ                        | (Ψ^±)² = (1 - ∫[α^± - β^±]) / (1 - ∫[α^∓ - β^∓]),      |
//  |                          | branch continued from Ψ(+∞) = 1                        |
//  | p̄                        | p̄ = ±i Ψ^±' / Ψ^±                                      |
//  | q̄                        | q̄ = (Ψ'' - 2K_d' ∓ 2i p̄ K_d) / Ψ,  K_d = i·K^±(t,t)    |
//
// The determinant criterion keeps the unscaled F²(S); see characterize.hpp.

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <vector>

#include "pencil/series.hpp"

namespace pencil::inverse {

struct ResidualReport {
  std::vector<double> closing_residual;    // position α-1: max over n < α, both branches
  std::optional<double> route_mismatch; // coefficient route vs operator route
  double max_residual = 0.0;
};

struct InverseResult {
  Potential potential;
  JostTable jost;
  ResidualReport crosscheck;
};

/// The order-α system obtained by substituting the V_α relation into the
/// diagonal relation for both branches:
///   (-α) p_α + q_α = rhs_plus,   (+α) p_α + q_α = rhs_minus.
struct OrderSystem {
  int alpha = 1;
  cplx rhs_plus;
  cplx rhs_minus;
  double determinant() const noexcept { return -2.0 * alpha; }
  cplx p() const { return (rhs_minus - rhs_plus) / (2.0 * alpha); }
  cplx q() const { return 0.5 * (rhs_plus + rhs_minus); }
};

/// Coefficient route. Never divides by data-dependent quantities.
InverseResult invert_coefficients(const SpectralData& s);

/// Same recursion, also returning every order-α system it solved.
InverseResult invert_coefficients(const SpectralData& s,
                                  std::vector<OrderSystem>* systems);

// ---------------------------------------------------------------------------
// Operator route

/// Smallest singular value of I - F² below this fraction of ‖F²‖ is singular.
inline constexpr double kSingularFraction = 1e-12;

struct MarchenkoOperators {
  cplx t;
  int order = 0;
  Eigen::MatrixXcd f1_plus, f1_minus;  // F¹_{mn} = 2 S_n / (m+n) e^{-(m+n)t/2}
  Eigen::MatrixXcd f2_plus, f2_minus;  // F²^± = F¹^± F¹^∓ (k-sum truncated at N)
  Eigen::VectorXcd e_vec;              // e^{-nt/2}

  const Eigen::MatrixXcd& f1(Branch b) const {
    return b == Branch::plus ? f1_plus : f1_minus;
  }
  const Eigen::MatrixXcd& f2(Branch b) const {
    return b == Branch::plus ? f2_plus : f2_minus;
  }
};

/// Entrywise from the defining formulas. Accepts complex t with Re t >= 0.
MarchenkoOperators build_operators(const SpectralData& s, cplx t);

struct Resolvent {
  Eigen::MatrixXcd matrix;
  double sigma_min = 1.0;   // of I - F²
  double condition = 1.0;
};

/// (I - F²^±)^{-1} by partially pivoted LU; SingularOperator when σ_min(I - F²)
/// is below kSingularFraction·‖F²‖₂.
Resolvent resolvent(const MarchenkoOperators& ops, Branch b);

/// One solution of the coupled system
///   X^±(t, s) = c^± ζ^±(t+s) + ∫_t^∞ X^∓(t, u) ζ^±(u+s) du
/// stored as exponential sums X^±(t, s) = Σ_n a_n^± e^{-ns/2}.
struct CoupledSolution {
  std::array<Eigen::VectorXcd, 2> a;  // indexed by slot(branch)
  std::array<Eigen::VectorXcd, 2> w;  // ∫_t^∞ X^±(t,u) e^{-nu/2} du

  cplx at(Branch b, cplx s) const;
  /// ∫_t^∞ X^±(t, u) du, in closed form.
  cplx integral(Branch b, cplx t) const;
};

struct PQSolution {
  cplx t;
  CoupledSolution p;  // forcing (1, 1)
  CoupledSolution q;  // forcing (i, -i)
  std::vector<cplx> s_grid;
  std::array<std::vector<cplx>, 2> p_samples;  // P^±(t, s_j)
  std::array<std::vector<cplx>, 2> q_samples;  // Q^±(t, s_j)

  /// α^±(t, s) and β^±(t, s) as exponential sums.
  Eigen::VectorXcd alpha_coeffs(Branch b) const;
  Eigen::VectorXcd beta_coeffs(Branch b) const;
  /// ∫_t^∞ α^±(t, u) du and ∫_t^∞ β^±(t, u) du.
  cplx alpha_integral(Branch b) const;
  cplx beta_integral(Branch b) const;
};

/// Solves the P and Q equations at t (Re t >= 0) and samples them on `s_grid`
/// via P^± = c^± <e, B^±(s)> + <c^∓ e + w^±, A^±(s, t)>.
PQSolution solve_PQ(const SpectralData& s, cplx t, std::span<const cplx> s_grid);

/// Ψ^±(t) samples along a path of PQ solutions.
struct PsiSamples {
  std::vector<cplx> t;
  std::array<std::vector<cplx>, 2> psi;  // indexed by slot(branch)
};

/// The squared ratio for Ψ^+ at one t (Ψ^- uses its reciprocal).
cplx psi_squared(const PQSolution& pq, Branch b);

/// Square roots of the ratio, each chosen nearest to the previous sample;
/// `path` must start where Ψ ≈ 1 (large Re t). BranchAmbiguity when
/// |Ψ²| < 1e-12 on the path.
PsiSamples psi_from_PQ(std::span<const PQSolution> path);

/// Ψ^±(t) at one point, continued along the horizontal ray from Re t + far.
std::array<cplx, 2> psi_at(const SpectralData& s, cplx t, double far = 24.0,
                           int steps = 48);

/// K^±(t, s) in the forward kernel_K normalization: i·K^± = Ψ^∓ α^± + Ψ^± β^∓.
cplx kernel_from_pq(const PQSolution& pq, cplx psi_plus, cplx psi_minus,
                      cplx s, Branch b);

/// Samples of Ψ^± and K^±(t, t) on a t-grid, as needed by reconstruct_pq.
struct RouteSamples {
  std::vector<cplx> t;
  std::array<std::vector<cplx>, 2> psi;
  std::array<std::vector<cplx>, 2> kernel_diag;
};

RouteSamples sample_route(const SpectralData& s, std::span<const cplx> t_grid);

/// p̄, q̄ from Ψ^± and K^±(t,t) on the grid using exponential fits with
/// `fit_order` modes and termwise differentiation; returns the first
/// `order` coefficients of p, q. Throws ZeroPsi when |Ψ| < 1e-10 on the grid.
Potential reconstruct_pq(const RouteSamples& samples, Branch b, int order,
                         int fit_order);

/// Whole operator route on the line grid t_j = 2πi j / M, M = max(64, 4N).
Potential operator_route(const SpectralData& s, Branch b = Branch::plus);

/// max_n over |Δp_n|, |Δq_n|.
double max_coefficient_gap(const Potential& a, const Potential& b);

/// Fills crosscheck.route_mismatch by running the operator route.
void crosscheck_routes(const SpectralData& s, InverseResult& result);

/// σ_min(I - F²^+(t)) for the data shifted by a (S_n e^{ian}).
double homogeneous_triviality(const SpectralData& s, cplx t, cplx a);

}  // namespace pencil::inverse
