#include "pencil/characterize.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <thread>

#include "pencil/inverse.hpp"
#include "pencil/linalg.hpp"

namespace pencil::characterize {

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::MatrixXcd d_matrix(const SpectralData& s, cplx z, Branch pairing) {
  const int order = s.order();
  const Branch other = opposite(pairing);
  // h_j = e^{i j z / 2}
  std::vector<cplx> h(static_cast<std::size_t>(2 * order) + 1);
  const cplx step = std::exp(0.5 * kI * z);
  h[0] = 1.0;
  for (std::size_t j = 1; j < h.size(); ++j) h[j] = h[j - 1] * step;

  Eigen::MatrixXcd m(order, order);
  for (int n = 1; n <= order; ++n) {
    for (int col = 1; col <= order; ++col) {
      cplx acc{};
      for (int k = 1; k <= order; ++k) {
        acc += 4.0 * s.s(other, col) * s.s(pairing, k) /
               static_cast<double>((col + k) * (n + k)) * h[col + k] * h[n + k];
      }
      m(n - 1, col - 1) = (n == col ? 1.0 : 0.0) - acc;
    }
  }
  return m;
}

class Contour {
 public:
  Contour(const SpectralData& s, double tol_zero, Branch pairing)
      : s_(s), tol_zero_(tol_zero), pairing_(pairing) {}

  cplx eval(cplx z) const {
    const cplx d = linalg::determinant(d_matrix(s_, z, pairing_));
    if (std::abs(d) <= tol_zero_) {
      throw ZeroOnContour("D vanishes on the winding contour", z);
    }
    return d;
  }

  // Phase change of D from z0 to z1, halving until each step is below π/2.
  double walk(cplx z0, cplx d0, cplx z1, cplx d1, int depth = 0) const {
    const double step = std::arg(d1 / d0);
    if (std::abs(step) < 0.5 * kPi) return step;
    if (depth > 40) {
      throw ZeroOnContour("phase continuation did not resolve", 0.5 * (z0 + z1));
    }
    const cplx zm = 0.5 * (z0 + z1);
    const cplx dm = eval(zm);
    return walk(z0, d0, zm, dm, depth + 1) + walk(zm, dm, z1, d1, depth + 1);
  }

  double side(cplx from, cplx to, int segments) const {
    double total = 0.0;
    cplx z0 = from;
    cplx d0 = eval(z0);
    for (int j = 1; j <= segments; ++j) {
      const cplx z1 = from + (to - from) * (static_cast<double>(j) / segments);
      const cplx d1 = eval(z1);
      total += walk(z0, d0, z1, d1);
      z0 = z1;
      d0 = d1;
    }
    return total;
  }

 private:
  const SpectralData& s_;
  double tol_zero_;
  Branch pairing_;
};

bool is_local_min(const DeterminantGrid& g, int j, int k) {
  const double here = std::abs(g.at(j, k));
  for (int dk = -1; dk <= 1; ++dk) {
    for (int dj = -1; dj <= 1; ++dj) {
      if (dj == 0 && dk == 0) continue;
      const int jj = j + dj;
      const int kk = k + dk;
      if (jj < 0 || kk < 0 || jj >= g.spec.nx || kk >= g.spec.ny) continue;
      const double there = std::abs(g.at(jj, kk));
      // ties go to the first point in row-major order
      const bool earlier = kk < k || (kk == k && jj < j);
      if (earlier ? there <= here : there < here) return false;
    }
  }
  return true;
}

}  // namespace

Condition1 condition1_report(const SpectralData& s) {
  Condition1 c;
  std::vector<double> mags(static_cast<std::size_t>(s.order()));
  for (int n = 1; n <= s.order(); ++n) {
    const double w = static_cast<double>(n) * n;
    c.weighted_sum_plus += w * std::abs(s.s(Branch::plus, n));
    c.weighted_sum_minus += w * std::abs(s.s(Branch::minus, n));
    mags[n - 1] =
        std::max(std::abs(s.s(Branch::plus, n)), std::abs(s.s(Branch::minus, n)));
  }
  c.decay_rate = geometric_rate(mags);
  c.slow_decay = c.decay_rate && *c.decay_rate >= kSlowDecayRate;
  return c;
}

cplx determinant_D(const SpectralData& s, cplx z, int order, Branch pairing) {
  if (z.imag() < 0.0) throw DomainError("D(z) needs Im z >= 0");
  if (order < 1) throw DomainError("truncation order must be >= 1");
  const SpectralData data = s.order() == order ? s : s.resized(order);
  return linalg::determinant(d_matrix(data, z, pairing));
}

DeterminantGrid determinant_grid(const SpectralData& s, const GridSpec& spec,
                                 int order, Branch pairing, unsigned threads) {
  spec.validate();
  if (order < 1) throw DomainError("truncation order must be >= 1");
  const SpectralData data = s.order() == order ? s : s.resized(order);

  DeterminantGrid g;
  g.spec = spec;
  g.order = order;
  const std::size_t count = static_cast<std::size_t>(spec.nx) * spec.ny;
  g.values.assign(count, cplx{});

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));

  std::vector<std::exception_ptr> failures(threads);
  auto work = [&](unsigned id) {
    try {
      for (std::size_t idx = id; idx < count; idx += threads) {
        const int j = static_cast<int>(idx % spec.nx);
        const int k = static_cast<int>(idx / spec.nx);
        g.values[idx] = linalg::determinant(d_matrix(data, spec.point(j, k), pairing));
      }
    } catch (...) {
      failures[id] = std::current_exception();
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned id = 0; id < threads; ++id) pool.emplace_back(work, id);
    for (auto& t : pool) t.join();
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }

  std::size_t best = 0;
  for (std::size_t idx = 1; idx < count; ++idx) {
    if (std::abs(g.values[idx]) < std::abs(g.values[best])) best = idx;
  }
  g.min_modulus = std::abs(g.values[best]);
  g.argmin_z = spec.point(static_cast<int>(best % spec.nx),
                          static_cast<int>(best / spec.nx));
  return g;
}

int boundary_winding(const SpectralData& s, const GridSpec& rect, int order,
                     double tol_zero, Branch pairing) {
  rect.validate();
  if (order < 1) throw DomainError("truncation order must be >= 1");
  const SpectralData data = s.order() == order ? s : s.resized(order);
  const Contour c(data, tol_zero, pairing);
  const cplx a{rect.re_min, rect.im_min};
  const cplx b{rect.re_max, rect.im_min};
  const cplx d{rect.re_max, rect.im_max};
  const cplx e{rect.re_min, rect.im_max};
  const int hx = rect.nx - 1;
  const int hy = rect.ny - 1;
  const double total =
      c.side(a, b, hx) + c.side(b, d, hy) + c.side(d, e, hx) + c.side(e, a, hy);
  return static_cast<int>(std::lround(total / (2.0 * kPi)));
}

DeltaComparison delta_vs_D(const SpectralData& s, double t, int order) {
  if (t < 0.0) throw DomainError("delta_vs_D needs t >= 0");
  const SpectralData data = s.order() == order ? s : s.resized(order);
  const auto ops = inverse::build_operators(data, t);
  DeltaComparison out;
  out.delta = linalg::determinant(
      Eigen::MatrixXcd::Identity(ops.order, ops.order) - ops.f2_plus);
  out.d = determinant_D(data, {0.0, t}, order);
  out.discrepancy = std::abs(out.delta - out.d);
  return out;
}

double trace_norm_diag(const SpectralData& s, double t, int order) {
  if (t < 0.0) throw DomainError("trace_norm_diag needs t >= 0");
  const SpectralData data = s.order() == order ? s : s.resized(order);
  const auto ops = inverse::build_operators(data, t);
  return linalg::singular_values(ops.f2_plus).sum();
}

const char* to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::pass:
      return "pass";
    case Verdict::fail_condition1_diagnostic:
      return "fail_condition1_diagnostic";
    case Verdict::fail_condition2:
      return "fail_condition2";
  }
  return "unknown";
}

GridSpec default_grid(const Condition1& c1) {
  GridSpec g;
  g.nx = 128;
  g.ny = 64;
  g.re_min = 0.0;
  g.re_max = 4.0 * kPi * (g.nx - 1) / g.nx;
  g.im_min = 0.0;
  double top = 3.0;
  if (c1.decay_rate && *c1.decay_rate > 0.0 && *c1.decay_rate < 1.0) {
    top = std::max(top, 2.0 * std::log(1.0 / *c1.decay_rate));
  }
  g.im_max = top;
  return g;
}

GridSpec winding_rectangle(const GridSpec& grid) {
  GridSpec r = grid;
  const double half = 0.5 * (grid.re_max - grid.re_min) / (grid.nx - 1);
  r.re_min -= half;
  r.re_max += half;
  r.im_min = std::max(grid.im_min, kWindingImMin);
  if (r.im_max <= r.im_min) r.im_max = r.im_min + 1.0;
  return r;
}

CharacterizationReport characterize(const SpectralData& s, int order,
                                    std::optional<GridSpec> grid,
                                    double tol_zero, unsigned threads) {
  CharacterizationReport rep;
  const SpectralData data = s.order() == order ? s : s.resized(order);
  rep.order = order;
  rep.tol_zero = tol_zero;
  rep.condition1 = condition1_report(data);
  const GridSpec spec = grid ? *grid : default_grid(rep.condition1);

  rep.det_grid = determinant_grid(data, spec, order, Branch::plus, threads);
  const DeterminantGrid minus = determinant_grid(data, spec, order, Branch::minus, threads);
  rep.min_modulus_minus = minus.min_modulus;
  rep.argmin_z_minus = minus.argmin_z;

  rep.winding_rect = winding_rectangle(spec);
  try {
    rep.boundary_winding = boundary_winding(data, rep.winding_rect, order, tol_zero);
  } catch (const ZeroOnContour&) {
    rep.boundary_winding.reset();
  }

  const DeterminantGrid& g = rep.det_grid;
  const double hx = (spec.re_max - spec.re_min) / (spec.nx - 1);
  const double hy = (spec.im_max - spec.im_min) / (spec.ny - 1);
  for (int k = 0; k < spec.ny; ++k) {
    for (int j = 0; j < spec.nx; ++j) {
      if (!is_local_min(g, j, k)) continue;
      ZeroCandidate zc;
      zc.z = spec.point(j, k);
      zc.modulus = std::abs(g.at(j, k));
      GridSpec box;
      box.re_min = zc.z.real() - hx;
      box.re_max = zc.z.real() + hx;
      box.im_min = std::max(0.0, zc.z.imag() - hy);
      box.im_max = zc.z.imag() + hy;
      box.nx = box.ny = 3;
      try {
        zc.certified = boundary_winding(data, box, order, tol_zero) != 0;
      } catch (const ZeroOnContour&) {
        zc.certified = true;
      }
      if (zc.certified || zc.modulus < tol_zero) rep.zeros.push_back(zc);
    }
  }

  const double min_mod = std::min(g.min_modulus, rep.min_modulus_minus);
  if (min_mod < tol_zero) {
    rep.verdict = Verdict::fail_condition2;
    rep.explanation = "min |D| on the grid is below tol_zero";
  } else if (!rep.boundary_winding) {
    rep.verdict = Verdict::fail_condition2;
    rep.explanation = "D vanishes on the winding contour";
  } else if (*rep.boundary_winding != 0) {
    rep.verdict = Verdict::fail_condition2;
    rep.explanation = "D has " + std::to_string(*rep.boundary_winding) +
                      " zeros inside the winding rectangle";
  } else if (rep.condition1.slow_decay) {
    rep.verdict = Verdict::fail_condition1_diagnostic;
    rep.explanation = "D has no zeros on the grid but S_n decays slowly";
  } else {
    rep.verdict = Verdict::pass;
    rep.explanation = "D has no zeros on the grid and S_n decays geometrically";
  }
  return rep;
}

}  // namespace pencil::characterize
