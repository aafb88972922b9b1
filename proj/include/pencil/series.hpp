#pragma once

// Domain types and truncated exponential-series algebra shared by the
// forward, inverse and characterization solvers.
//
// Index convention: every coefficient sequence is 1-indexed in the data model
// (mode n = 1 is e^{ix}); accessors take the mode number n, while the raw
// spans returned by `*_coeffs()` hold mode n at position n - 1.

#include <array>
#include <complex>
#include <optional>
#include <span>
#include <vector>

#include "pencil/errors.hpp"

namespace pencil {

using cplx = std::complex<double>;

inline constexpr cplx kI{0.0, 1.0};

/// Selects the ± branch of the Jost solutions, spectral data and kernels.
enum class Branch { plus, minus };

constexpr int sign(Branch b) noexcept { return b == Branch::plus ? 1 : -1; }
constexpr Branch opposite(Branch b) noexcept {
  return b == Branch::plus ? Branch::minus : Branch::plus;
}
constexpr std::size_t slot(Branch b) noexcept {
  return b == Branch::plus ? 0 : 1;
}
constexpr const char* to_string(Branch b) noexcept {
  return b == Branch::plus ? "plus" : "minus";
}
inline constexpr std::array<Branch, 2> kBranches{Branch::plus, Branch::minus};

/// Truncated one-sided Fourier coefficients of p(x) = Σ p_n e^{inx} and
/// q(x) = Σ q_n e^{inx}, n = 1..N. There is no n = 0 mode.
class Potential {
 public:
  Potential(std::vector<cplx> p, std::vector<cplx> q);
  static Potential zero(int order);

  int order() const noexcept { return static_cast<int>(p_.size()); }
  cplx p(int n) const;
  cplx q(int n) const;
  std::span<const cplx> p_coeffs() const noexcept { return p_; }
  std::span<const cplx> q_coeffs() const noexcept { return q_; }

  /// Zero-padded or truncated copy at another order.
  Potential resized(int order) const;

  /// p(x), q(x) from the truncated series at complex x.
  cplx p_at(cplx x) const;
  cplx q_at(cplx x) const;

 private:
  std::vector<cplx> p_;
  std::vector<cplx> q_;
};

/// Coefficients of p̄(t) = Σ pbar_n e^{-nt} and q̄(t) = Σ qbar_n e^{-nt}
/// on the semiaxis, where pbar_n = i p_n and qbar_n = -q_n.
class SemiaxisPotential {
 public:
  SemiaxisPotential(std::vector<cplx> pbar, std::vector<cplx> qbar);

  int order() const noexcept { return static_cast<int>(pbar_.size()); }
  cplx pbar(int n) const;
  cplx qbar(int n) const;
  std::span<const cplx> pbar_coeffs() const noexcept { return pbar_; }
  std::span<const cplx> qbar_coeffs() const noexcept { return qbar_; }

 private:
  std::vector<cplx> pbar_;
  std::vector<cplx> qbar_;
};

/// The two sequences S_n^+ and S_n^-, n = 1..N. Canonical convention:
/// S_n^± = V_nn^± exactly.
class SpectralData {
 public:
  SpectralData(std::vector<cplx> s_plus, std::vector<cplx> s_minus);
  static SpectralData zero(int order);

  int order() const noexcept { return static_cast<int>(plus_.size()); }
  cplx s(Branch b, int n) const;
  cplx plus(int n) const { return s(Branch::plus, n); }
  cplx minus(int n) const { return s(Branch::minus, n); }
  std::span<const cplx> coeffs(Branch b) const noexcept {
    return b == Branch::plus ? std::span<const cplx>(plus_)
                             : std::span<const cplx>(minus_);
  }

  SpectralData resized(int order) const;
  /// Both sequences multiplied by `factor`.
  SpectralData scaled(cplx factor) const;

 private:
  std::vector<cplx> plus_;
  std::vector<cplx> minus_;
};

/// Jost coefficients V_n^± and the triangular tables V_{nα}^±,
/// 1 <= n <= α <= N. Triangular storage is packed by column:
/// entry (n, α) lives at α(α-1)/2 + n - 1.
class JostTable {
 public:
  using Column = std::vector<cplx>;

  /// `v[slot(b)]` has N entries; `tri[slot(b)]` has N(N+1)/2 packed entries.
  JostTable(std::array<Column, 2> v, std::array<Column, 2> tri);
  static JostTable zero(int order);

  int order() const noexcept { return static_cast<int>(v_[0].size()); }
  cplx v(Branch b, int n) const;
  cplx vtab(Branch b, int n, int alpha) const;
  std::span<const cplx> v_coeffs(Branch b) const noexcept {
    return v_[slot(b)];
  }

  static constexpr std::size_t packed_index(int n, int alpha) noexcept {
    return static_cast<std::size_t>(alpha) * (alpha - 1) / 2 + (n - 1);
  }
  static constexpr std::size_t packed_size(int order) noexcept {
    return static_cast<std::size_t>(order) * (order + 1) / 2;
  }

 private:
  std::array<Column, 2> v_;
  std::array<Column, 2> tri_;
};

/// Rectangle of the closed upper half-plane sampled on an nx × ny lattice.
/// Samples include both endpoints of each range.
struct GridSpec {
  double re_min = 0.0;
  double re_max = 1.0;
  double im_min = 0.0;
  double im_max = 1.0;
  int nx = 2;
  int ny = 2;

  /// Throws DomainError unless re_min < re_max, 0 <= im_min <= im_max and
  /// nx, ny >= 2.
  void validate() const;
  double re(int j) const noexcept {
    return re_min + (re_max - re_min) * j / (nx - 1);
  }
  double im(int k) const noexcept {
    return im_min + (im_max - im_min) * k / (ny - 1);
  }
  cplx point(int j, int k) const noexcept { return {re(j), im(k)}; }
};

SemiaxisPotential to_semiaxis(const Potential& pot);
Potential from_semiaxis(const SemiaxisPotential& semi);

/// Coefficients multiplied by e^{ian}: the potential translated by x -> x + a.
Potential shift_potential(const Potential& pot, cplx a);

/// Σ_{s=1}^{α-1} a_{α-s} b_s with 1-indexed sequences (empty sum for α = 1).
cplx convolve_at(std::span<const cplx> a, std::span<const cplx> b, int alpha);

/// Σ_n c_n e^{-n·scale·t}, n = 1..c.size().
cplx eval_exp_series(std::span<const cplx> c, cplx t, double scale);

/// Result of a least-squares exponential fit.
struct ExpFit {
  std::vector<cplx> coeffs;  // position 0 -> n = 1
  double residual_norm = 0.0;
  double condition = 1.0;    // of the column-scaled design matrix
};

/// Coefficients c_1..c_order minimizing ‖Σ c_n e^{-n·scale·t_j} - value_j‖₂.
/// Nodes may be complex with Re(scale·t_j) >= 0. Throws IllConditioned when
/// the column-scaled design has condition number above 1e13.
ExpFit fit_exp_coefficients(std::span<const cplx> t,
                            std::span<const cplx> values, int order,
                            double scale);

/// t_j = 0.5 + 0.25 j, j = 0..2N-1.
std::vector<cplx> default_fit_grid(int order);

/// t_j = offset + 2πi j / m, j = 0..m-1: the exponential fit on these nodes
/// is a discrete Fourier projection.
std::vector<cplx> line_fit_grid(int m, double offset = 0.0);

/// Rate r of the log-linear fit |m_n| ~ C r^n over the nonzero entries
/// (n = position + 1). Empty when fewer than two entries are nonzero.
std::optional<double> geometric_rate(std::span<const double> magnitudes);

/// Throws NonFiniteInput if any entry is NaN or infinite.
void require_finite(std::span<const cplx> values, const char* what);

}  // namespace pencil
