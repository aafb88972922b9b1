#include "pencil/inverse.hpp"

#include <algorithm>
#include <cmath>

#include "pencil/forward.hpp"

namespace pencil::inverse {

namespace {
using Column = JostTable::Column;
}

InverseResult invert_coefficients(const SpectralData& s) {
  return invert_coefficients(s, nullptr);
}

InverseResult invert_coefficients(const SpectralData& s,
                                  std::vector<OrderSystem>* systems) {
  const int order = s.order();
  std::vector<cplx> p(static_cast<std::size_t>(order));
  std::vector<cplx> q(static_cast<std::size_t>(order));
  auto pm = [&](int n) { return p[static_cast<std::size_t>(n - 1)]; };
  auto qm = [&](int n) { return q[static_cast<std::size_t>(n - 1)]; };

  std::array<Column, 2> v{Column(order), Column(order)};
  std::array<Column, 2> tri{Column(JostTable::packed_size(order)),
                            Column(JostTable::packed_size(order))};
  auto V = [&](Branch b, int n) -> cplx& {
    return v[slot(b)][static_cast<std::size_t>(n - 1)];
  };
  auto T = [&](Branch b, int n, int a) -> cplx& {
    return tri[slot(b)][JostTable::packed_index(n, a)];
  };

  ResidualReport report;
  report.closing_residual.assign(static_cast<std::size_t>(order), 0.0);
  if (systems) systems->clear();

  for (int a = 1; a <= order; ++a) {
    // (i) off-diagonal entries from the closing recurrence, (ii) diagonal = data.
    for (Branch b : kBranches) {
      const Branch o = opposite(b);
      for (int n = 1; n < a; ++n) {
        const int beta = a - n;
        cplx acc = V(o, beta);
        for (int m = 1; m <= beta; ++m) {
          acc += T(o, m, beta) / static_cast<double>(m + n);
        }
        T(b, n, a) = s.s(b, n) * acc;
      }
      T(b, a, a) = s.s(b, a);
    }

    // (iii) the 2×2 system for (p_α, q_α).
    std::array<cplx, 2> rhs{};
    for (Branch b : kBranches) {
      const double sg = sign(b);
      const cplx c = convolve_at(v[slot(b)], p, a);
      cplx column{};
      for (int n = 1; n <= a; ++n) column += T(b, n, a);
      cplx d{};
      for (int sidx = 1; sidx < a; ++sidx) {
        cplx lower{};
        for (int n = 1; n <= sidx; ++n) lower += T(b, n, sidx);
        d += qm(a - sidx) * V(b, sidx) + sg * pm(a - sidx) * lower;
      }
      rhs[slot(b)] = sg * static_cast<double>(a) * c -
                     static_cast<double>(a) * column - d;
    }
    const OrderSystem sys{a, rhs[0], rhs[1]};
    p[static_cast<std::size_t>(a - 1)] = sys.p();
    q[static_cast<std::size_t>(a - 1)] = sys.q();
    if (systems) systems->push_back(sys);

    // (iv) V_α, (v) the independent off-diagonal relation as a residual.
    double worst = 0.0;
    for (Branch b : kBranches) {
      const double sg = sign(b);
      V(b, a) = -sg * (pm(a) + convolve_at(v[slot(b)], p, a)) /
                static_cast<double>(a);
      for (int n = 1; n < a; ++n) {
        cplx r = static_cast<double>(a) * (a - n) * T(b, n, a);
        for (int sidx = n; sidx < a; ++sidx) {
          r += (qm(a - sidx) - sg * n * pm(a - sidx)) * T(b, n, sidx);
        }
        worst = std::max(worst, std::abs(r));
      }
    }
    report.closing_residual[static_cast<std::size_t>(a - 1)] = worst;
  }

  report.max_residual = report.closing_residual.empty()
                            ? 0.0
                            : *std::max_element(report.closing_residual.begin(),
                                                report.closing_residual.end());
  return {Potential(std::move(p), std::move(q)),
          JostTable(std::move(v), std::move(tri)), std::move(report)};
}

double max_coefficient_gap(const Potential& a, const Potential& b) {
  const int order = std::min(a.order(), b.order());
  double gap = 0.0;
  for (int n = 1; n <= order; ++n) {
    gap = std::max({gap, std::abs(a.p(n) - b.p(n)), std::abs(a.q(n) - b.q(n))});
  }
  return gap;
}

void crosscheck_routes(const SpectralData& s, InverseResult& result) {
  const Potential op = operator_route(s);
  const double gap = max_coefficient_gap(result.potential, op);
  result.crosscheck.route_mismatch = gap;
  result.crosscheck.max_residual = std::max(result.crosscheck.max_residual, gap);
}

}  // namespace pencil::inverse
