#pragma once

// Numerical test of the two solvability conditions on spectral data:
//   1. Σ n² |S_n^±| < ∞, reported as weighted sums plus a fitted decay rate;
//   2. D(z) ≠ 0 on Im z ≥ 0, where
//        D(z) = det‖δ_nm − Σ_k 4 S_m^− S_k^+ / ((m+k)(n+k)) e^{i(m+k)z/2} e^{i(n+k)z/2}‖.
//
// The "pairing" argument selects which branch plays S^+ in the formula
// above; Branch::minus swaps the roles. Both are reported.

#include <optional>
#include <string>
#include <vector>

#include "pencil/series.hpp"

namespace pencil::characterize {

inline constexpr double kDefaultTolZero = 1e-9;
/// Fitted rates at or above this are flagged as slow decay.
inline constexpr double kSlowDecayRate = 0.65;
/// Winding contours never go below this imaginary part.
inline constexpr double kWindingImMin = 0.1;

struct Condition1 {
  double weighted_sum_plus = 0.0;   // Σ n² |S_n^+|
  double weighted_sum_minus = 0.0;  // Σ n² |S_n^-|
  std::optional<double> decay_rate; // fitted on max(|S_n^+|, |S_n^-|)
  bool slow_decay = false;
};

Condition1 condition1_report(const SpectralData& s);

/// Truncation of D to order N (data padded with zeros or truncated).
/// DomainError when Im z < 0.
cplx determinant_D(const SpectralData& s, cplx z, int order,
                   Branch pairing = Branch::plus);

struct DeterminantGrid {
  GridSpec spec;
  int order = 0;
  std::vector<cplx> values;  // row-major: index k * nx + j for point (j, k)
  double min_modulus = 0.0;
  cplx argmin_z;

  cplx at(int j, int k) const { return values[static_cast<std::size_t>(k) * spec.nx + j]; }
};

/// Samples D on the grid. `threads` = 0 uses the hardware concurrency.
/// Output does not depend on the thread count.
DeterminantGrid determinant_grid(const SpectralData& s, const GridSpec& spec,
                                 int order, Branch pairing = Branch::plus,
                                 unsigned threads = 0);

/// Winding number of D along the positively oriented boundary of the
/// rectangle [re_min, re_max] × [im_min, im_max]. nx and ny set the initial
/// sampling of the horizontal and vertical sides; steps are halved until the
/// phase change between neighbours is below π/2. ZeroOnContour when
/// |D| <= tol_zero at a boundary sample.
int boundary_winding(const SpectralData& s, const GridSpec& rect, int order,
                     double tol_zero = kDefaultTolZero,
                     Branch pairing = Branch::plus);

struct DeltaComparison {
  cplx delta;  // det(I - F²^+(t)) from the inverse-route operators
  cplx d;      // D(it)
  double discrepancy = 0.0;
};

DeltaComparison delta_vs_D(const SpectralData& s, double t, int order);

/// Sum of the singular values of the truncated F²^+(t).
double trace_norm_diag(const SpectralData& s, double t, int order);

enum class Verdict { pass, fail_condition1_diagnostic, fail_condition2 };
const char* to_string(Verdict v) noexcept;

struct ZeroCandidate {
  cplx z;             // grid point
  double modulus = 0.0;
  bool certified = false;  // a small contour around z winds at least once
};

struct CharacterizationReport {
  Condition1 condition1;
  int order = 0;
  double tol_zero = kDefaultTolZero;
  DeterminantGrid det_grid;            // pairing plus
  double min_modulus_minus = 0.0;      // pairing minus on the same grid
  cplx argmin_z_minus;
  GridSpec winding_rect;
  std::optional<int> boundary_winding; // empty when D vanishes on the contour
  std::vector<ZeroCandidate> zeros;
  Verdict verdict = Verdict::pass;
  std::string explanation;
};

/// Re z ∈ [0, 4π) with nx = 128 (so the last column is 4π - step),
/// Im z ∈ [0, max(3, 2 ln(1/r))] with ny = 64.
GridSpec default_grid(const Condition1& c1);

/// The rectangle for the winding count of a report: the grid's Re range
/// widened by half a step on each side, Im from max(im_min, 0.1).
GridSpec winding_rectangle(const GridSpec& grid);

CharacterizationReport characterize(const SpectralData& s, int order,
                                    std::optional<GridSpec> grid = std::nullopt,
                                    double tol_zero = kDefaultTolZero,
                                    unsigned threads = 0);

}  // namespace pencil::characterize
