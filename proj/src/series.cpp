#include "pencil/series.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace pencil {

namespace {

cplx at_mode(std::span<const cplx> seq, int n, const char* what) {
  if (n < 1 || n > static_cast<int>(seq.size())) {
    throw IndexError(std::string(what) + ": mode " + std::to_string(n) +
                     " outside 1.." + std::to_string(seq.size()));
  }
  return seq[static_cast<std::size_t>(n - 1)];
}

std::vector<cplx> resize_copy(std::span<const cplx> seq, int order) {
  std::vector<cplx> out(static_cast<std::size_t>(order), cplx{});
  std::copy_n(seq.begin(), std::min<std::size_t>(seq.size(), out.size()),
              out.begin());
  return out;
}

cplx fourier_sum(std::span<const cplx> c, cplx x) {
  const cplx w = std::exp(kI * x);
  cplx wn = w;
  cplx acc{};
  for (const cplx& cn : c) {
    acc += cn * wn;
    wn *= w;
  }
  return acc;
}

}  // namespace

void require_finite(std::span<const cplx> values, const char* what) {
  for (const cplx& v : values) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw NonFiniteInput(std::string(what) + " contains a non-finite value");
    }
  }
}

Potential::Potential(std::vector<cplx> p, std::vector<cplx> q)
    : p_(std::move(p)), q_(std::move(q)) {
  if (p_.empty() || p_.size() != q_.size()) {
    throw DomainError("potential needs p and q of equal positive length");
  }
  require_finite(p_, "p");
  require_finite(q_, "q");
}

Potential Potential::zero(int order) {
  if (order < 1) throw DomainError("order must be positive");
  return {std::vector<cplx>(order), std::vector<cplx>(order)};
}

cplx Potential::p(int n) const { return at_mode(p_, n, "p"); }
cplx Potential::q(int n) const { return at_mode(q_, n, "q"); }

Potential Potential::resized(int order) const {
  if (order < 1) throw DomainError("order must be positive");
  return {resize_copy(p_, order), resize_copy(q_, order)};
}

cplx Potential::p_at(cplx x) const { return fourier_sum(p_, x); }
cplx Potential::q_at(cplx x) const { return fourier_sum(q_, x); }

SemiaxisPotential::SemiaxisPotential(std::vector<cplx> pbar,
                                     std::vector<cplx> qbar)
    : pbar_(std::move(pbar)), qbar_(std::move(qbar)) {
  if (pbar_.empty() || pbar_.size() != qbar_.size()) {
    throw DomainError("semiaxis potential needs equal positive lengths");
  }
}

cplx SemiaxisPotential::pbar(int n) const { return at_mode(pbar_, n, "pbar"); }
cplx SemiaxisPotential::qbar(int n) const { return at_mode(qbar_, n, "qbar"); }

SpectralData::SpectralData(std::vector<cplx> s_plus, std::vector<cplx> s_minus)
    : plus_(std::move(s_plus)), minus_(std::move(s_minus)) {
  if (plus_.empty() || plus_.size() != minus_.size()) {
    throw DomainError("spectral data needs S^+ and S^- of equal positive length");
  }
  require_finite(plus_, "s_plus");
  require_finite(minus_, "s_minus");
}

SpectralData SpectralData::zero(int order) {
  if (order < 1) throw DomainError("order must be positive");
  return {std::vector<cplx>(order), std::vector<cplx>(order)};
}

cplx SpectralData::s(Branch b, int n) const {
  return at_mode(coeffs(b), n, b == Branch::plus ? "s_plus" : "s_minus");
}

SpectralData SpectralData::resized(int order) const {
  if (order < 1) throw DomainError("order must be positive");
  return {resize_copy(plus_, order), resize_copy(minus_, order)};
}

SpectralData SpectralData::scaled(cplx factor) const {
  std::vector<cplx> p = plus_;
  std::vector<cplx> m = minus_;
  for (auto& v : p) v *= factor;
  for (auto& v : m) v *= factor;
  return {std::move(p), std::move(m)};
}

JostTable::JostTable(std::array<Column, 2> v, std::array<Column, 2> tri)
    : v_(std::move(v)), tri_(std::move(tri)) {
  const std::size_t n = v_[0].size();
  if (n == 0 || v_[1].size() != n || tri_[0].size() != packed_size(n) ||
      tri_[1].size() != packed_size(n)) {
    throw DomainError("inconsistent Jost table dimensions");
  }
}

JostTable JostTable::zero(int order) {
  if (order < 1) throw DomainError("order must be positive");
  const auto n = static_cast<std::size_t>(order);
  return {{Column(n), Column(n)},
          {Column(packed_size(order)), Column(packed_size(order))}};
}

cplx JostTable::v(Branch b, int n) const {
  return at_mode(v_[slot(b)], n, "V");
}

cplx JostTable::vtab(Branch b, int n, int alpha) const {
  if (n < 1 || alpha < n || alpha > order()) {
    throw IndexError("V_{n,alpha}: (" + std::to_string(n) + ", " +
                     std::to_string(alpha) + ") outside the triangle");
  }
  return tri_[slot(b)][packed_index(n, alpha)];
}

void GridSpec::validate() const {
  if (!(re_min < re_max)) throw DomainError("grid: need re_min < re_max");
  if (!(im_min >= 0.0) || !(im_min <= im_max)) {
    throw DomainError("grid: need 0 <= im_min <= im_max");
  }
  if (nx < 2 || ny < 2) throw DomainError("grid: need nx, ny >= 2");
}

SemiaxisPotential to_semiaxis(const Potential& pot) {
  std::vector<cplx> pbar(pot.p_coeffs().begin(), pot.p_coeffs().end());
  std::vector<cplx> qbar(pot.q_coeffs().begin(), pot.q_coeffs().end());
  for (auto& v : pbar) v *= kI;
  for (auto& v : qbar) v = -v;
  return {std::move(pbar), std::move(qbar)};
}

Potential from_semiaxis(const SemiaxisPotential& semi) {
  std::vector<cplx> p(semi.pbar_coeffs().begin(), semi.pbar_coeffs().end());
  std::vector<cplx> q(semi.qbar_coeffs().begin(), semi.qbar_coeffs().end());
  for (auto& v : p) v *= -kI;
  for (auto& v : q) v = -v;
  return {std::move(p), std::move(q)};
}

Potential shift_potential(const Potential& pot, cplx a) {
  std::vector<cplx> p(pot.p_coeffs().begin(), pot.p_coeffs().end());
  std::vector<cplx> q(pot.q_coeffs().begin(), pot.q_coeffs().end());
  for (std::size_t j = 0; j < p.size(); ++j) {
    const cplx phase = std::exp(kI * a * static_cast<double>(j + 1));
    p[j] *= phase;
    q[j] *= phase;
  }
  return {std::move(p), std::move(q)};
}

cplx convolve_at(std::span<const cplx> a, std::span<const cplx> b, int alpha) {
  if (alpha < 1) throw IndexError("convolve_at: alpha must be >= 1");
  const auto need = static_cast<std::size_t>(alpha - 1);
  if (need > a.size() || need > b.size()) {
    throw IndexError("convolve_at: alpha " + std::to_string(alpha) +
                     " exceeds sequence length");
  }
  cplx acc{};
  for (int s = 1; s < alpha; ++s) {
    acc += a[static_cast<std::size_t>(alpha - s - 1)] *
           b[static_cast<std::size_t>(s - 1)];
  }
  return acc;
}

cplx eval_exp_series(std::span<const cplx> c, cplx t, double scale) {
  const cplx w = std::exp(-scale * t);
  cplx wn = w;
  cplx acc{};
  for (const cplx& cn : c) {
    acc += cn * wn;
    wn *= w;
  }
  return acc;
}

ExpFit fit_exp_coefficients(std::span<const cplx> t,
                            std::span<const cplx> values, int order,
                            double scale) {
  if (order < 1) throw DomainError("fit: order must be positive");
  if (t.size() != values.size()) {
    throw DomainError("fit: sample and value counts differ");
  }
  if (t.size() < static_cast<std::size_t>(order)) {
    throw DomainError("fit: need at least `order` samples");
  }
  for (const cplx& tj : t) {
    if ((scale * tj).real() < 0.0) {
      throw DomainError("fit: nodes need Re(scale·t) >= 0");
    }
  }

  const auto rows = static_cast<Eigen::Index>(t.size());
  Eigen::MatrixXcd design(rows, order);
  for (Eigen::Index j = 0; j < rows; ++j) {
    const cplx w = std::exp(-scale * t[static_cast<std::size_t>(j)]);
    cplx wn = w;
    for (int n = 0; n < order; ++n) {
      design(j, n) = wn;
      wn *= w;
    }
  }
  Eigen::VectorXd col_norm = design.colwise().norm().transpose();
  for (int n = 0; n < order; ++n) {
    if (col_norm(n) == 0.0) {
      throw IllConditioned("fit: design column underflows to zero",
                           std::numeric_limits<double>::infinity());
    }
    design.col(n) /= col_norm(n);
  }

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(design);
  const auto& sv = svd.singularValues();
  const double cond = sv(sv.size() - 1) > 0.0
                          ? sv(0) / sv(sv.size() - 1)
                          : std::numeric_limits<double>::infinity();
  if (!(cond <= 1e13)) {
    throw IllConditioned("fit: rank-deficient exponential design", cond);
  }

  Eigen::VectorXcd rhs(rows);
  for (Eigen::Index j = 0; j < rows; ++j) {
    rhs(j) = values[static_cast<std::size_t>(j)];
  }
  const Eigen::VectorXcd scaled = design.colPivHouseholderQr().solve(rhs);

  ExpFit out;
  out.condition = cond;
  out.residual_norm = (design * scaled - rhs).norm();
  out.coeffs.resize(static_cast<std::size_t>(order));
  for (int n = 0; n < order; ++n) {
    out.coeffs[static_cast<std::size_t>(n)] = scaled(n) / col_norm(n);
  }
  return out;
}

std::vector<cplx> default_fit_grid(int order) {
  std::vector<cplx> t(static_cast<std::size_t>(2 * order));
  for (std::size_t j = 0; j < t.size(); ++j) t[j] = 0.5 + 0.25 * j;
  return t;
}

std::vector<cplx> line_fit_grid(int m, double offset) {
  std::vector<cplx> t(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    t[static_cast<std::size_t>(j)] = {offset, 2.0 * std::numbers::pi * j / m};
  }
  return t;
}

std::optional<double> geometric_rate(std::span<const double> magnitudes) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (std::size_t j = 0; j < magnitudes.size(); ++j) {
    if (!(magnitudes[j] > 0.0) || !std::isfinite(magnitudes[j])) continue;
    const double x = static_cast<double>(j + 1);
    const double y = std::log(magnitudes[j]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  if (count < 2) return std::nullopt;
  const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  return std::exp(slope);
}

}  // namespace pencil
