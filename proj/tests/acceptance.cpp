// Acceptance suite: one PASS/FAIL line per criterion.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "pencil/characterize.hpp"
#include "pencil/cli.hpp"
#include "pencil/forward.hpp"
#include "pencil/inverse.hpp"
#include "pencil/io.hpp"

using namespace pencil;
using oracle::kPi;

namespace {

constexpr int kSuiteSize = 50;
constexpr int kSuiteOrder = 12;
constexpr std::uint64_t kSuiteSeed = 1000;

Potential suite_potential(int i, double rate = 0.5) {
  return oracle::random_potential(kSuiteSeed + static_cast<std::uint64_t>(i), kSuiteOrder, rate);
}

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double rel(cplx got, cplx want) {
  const double d = std::abs(got - want);
  return want == cplx(0.0) ? d : d / std::abs(want);
}

// Sample points for the Wronskian and ODE criteria: real x, λ off resonance.
const std::vector<double> kX{0.3, 1.4, 2.6, 3.9, 5.1};
const std::vector<cplx> kLambda{cplx(0.37, 0.21), cplx(-0.83, 0.1), cplx(1.26, 0.0),
                                cplx(-1.61, 0.35), cplx(0.12, 0.9)};

Outcome c1_order_one() {
  std::mt19937_64 g(1);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const cplx sp = oracle::disk(g, 2.0);
    const cplx sm = oracle::disk(g, 2.0);
    const auto r = inverse::invert_coefficients(SpectralData({sp}, {sm}));
    worst = std::max({worst, std::abs(r.potential.p(1) - oracle::order1_p(sp, sm)),
                      std::abs(r.potential.q(1) - oracle::order1_q(sp, sm))});
  }
  return {worst <= 1e-14, "max error " + fmt("%.3g", worst)};
}

Outcome c2_worked() {
  const JostTable t = forward::jost_coefficients(Potential({0.2}, {1.0}).resized(2));
  const Branch P = Branch::plus, M = Branch::minus;
  const std::vector<std::pair<cplx, double>> pairs{
      {t.v(P, 1), -0.2},         {t.v(M, 1), 0.2},          {t.vtab(P, 1, 1), -0.8},
      {t.vtab(M, 1, 1), -1.2},   {t.v(P, 2), 0.02},         {t.v(M, 2), 0.02},
      {t.vtab(P, 1, 2), 0.32},   {t.vtab(M, 1, 2), 0.72},   {t.vtab(P, 2, 2), -0.18},
      {t.vtab(M, 2, 2), -0.98}};
  double worst = 0.0;
  for (const auto& [got, want] : pairs) worst = std::max(worst, std::abs(got - want));
  return {worst <= 1e-14, "max error " + fmt("%.3g", worst)};
}

Outcome c3_roundtrip() {
  double coef = 0.0;
  double spec = 0.0;
  for (int i = 0; i < kSuiteSize; ++i) {
    const Potential pot = suite_potential(i);
    const SpectralData s = forward::solve(pot).spectral;
    const auto r = inverse::invert_coefficients(s);
    const SpectralData back = forward::solve(r.potential).spectral;
    for (int n = 1; n <= kSuiteOrder; ++n) {
      coef = std::max({coef, rel(r.potential.p(n), pot.p(n)), rel(r.potential.q(n), pot.q(n))});
      for (Branch b : kBranches) spec = std::max(spec, rel(back.s(b, n), s.s(b, n)));
    }
  }
  return {coef <= 1e-10 && spec <= 1e-10,
          "coefficient rel " + fmt("%.3g", coef) + ", spectral rel " + fmt("%.3g", spec)};
}

Outcome c4_overdetermination() {
  double worst = 0.0;
  for (int i = 0; i < kSuiteSize; ++i) {
    const auto r = inverse::invert_coefficients(forward::solve(suite_potential(i)).spectral);
    for (double v : r.crosscheck.closing_residual) worst = std::max(worst, v);
  }
  return {worst <= 1e-12, "max residual " + fmt("%.3g", worst)};
}

struct ResidualSweep {
  double wronskian = 0.0;
  double spread = 0.0;  // max over λ of max_{x,x'} |W(x) - W(x')|
  double ode = 0.0;
};

ResidualSweep sweep(double rate) {
  ResidualSweep out;
  for (int i = 0; i < kSuiteSize; ++i) {
    const Potential pot = suite_potential(i, rate).resized(14);
    const JostTable t = forward::jost_coefficients(pot);
    for (std::size_t k = 0; k < kLambda.size(); ++k) {
      out.wronskian = std::max(out.wronskian, forward::wronskian_residual(t, kX[k], kLambda[k]));
      std::vector<cplx> w;
      for (double x : kX) w.push_back(forward::wronskian(t, x, kLambda[k]));
      for (const cplx& a : w) {
        for (const cplx& b : w) out.spread = std::max(out.spread, std::abs(a - b));
      }
      for (Branch b : kBranches) {
        out.ode = std::max(out.ode, forward::ode_residual(pot, t, kX[k], kLambda[k], b));
      }
    }
  }
  return out;
}

Outcome c5_wronskian(const ResidualSweep& r) {
  const bool ok = r.wronskian <= 1e-8 && r.spread <= 10 * 1e-8;
  return {ok, "max |W - 2i lambda| " + fmt("%.3g", r.wronskian) + ", x-spread " +
                  fmt("%.3g", r.spread)};
}

Outcome c6_ode(const ResidualSweep& r, const ResidualSweep& halved) {
  const double ratio = halved.ode / r.ode;
  const bool ok = r.ode <= 1e-7 && ratio <= 1e-4;
  return {ok, "max residual " + fmt("%.3g", r.ode) + ", halved-rate residual " +
                  fmt("%.3g", halved.ode) + " (ratio " + fmt("%.3g", ratio) + ")"};
}

Outcome c7_psi_product() {
  double worst = 0.0;
  for (int i = 0; i < kSuiteSize; ++i) {
    const auto prod =
        forward::psi_product_coefficients(forward::jost_coefficients(suite_potential(i)));
    worst = std::max(worst, std::abs(prod[0] - 1.0));
    for (std::size_t a = 1; a < prod.size(); ++a) worst = std::max(worst, std::abs(prod[a]));
  }
  return {worst <= 1e-12, "max deviation " + fmt("%.3g", worst)};
}

Outcome c8_shift() {
  double worst = 0.0;
  for (int i = 0; i < kSuiteSize; ++i) {
    const Potential pot = suite_potential(i);
    const SpectralData s = forward::solve(pot).spectral;
    for (cplx a : {cplx(kPi / 3), cplx(kPi), cplx(1.0, 0.5)}) {
      const SpectralData shifted = forward::solve(shift_potential(pot, a)).spectral;
      for (Branch b : kBranches) {
        for (int n = 1; n <= kSuiteOrder; ++n) {
          const cplx want = std::exp(kI * a * double(n)) * s.s(b, n);
          worst = std::max(worst, std::abs(shifted.s(b, n) - want));
        }
      }
    }
  }
  return {worst <= 1e-10, "max error " + fmt("%.3g", worst)};
}

Outcome c9_determinant() {
  const cplx sp{-0.8, 0.0}, sm{-1.2, 0.0};
  const SpectralData s({sp}, {sm});
  double worst = 0.0;
  for (int n : {1, 2, 4, 8}) {
    for (cplx z : {cplx(0.0), cplx(0.7, 0.0), cplx(1.1, 0.4), cplx(3.0, 2.0), cplx(-2.5, 0.05)}) {
      const cplx want = 1.0 - sp * sm * std::exp(2.0 * kI * z);
      worst = std::max(worst, std::abs(characterize::determinant_D(s, z, n) - want));
    }
  }
  const cplx d0 = characterize::determinant_D(s, 0.0, 1);
  const auto cmp = characterize::delta_vs_D(s, 0.0, 1);
  const bool ok = worst <= 1e-14 && std::abs(d0 - 0.04) <= 1e-14 && cmp.discrepancy <= 1e-14;
  return {ok, "closed-form error " + fmt("%.3g", worst) + ", D(0) = " + fmt("%.17g", d0.real()) +
                  ", |Delta(0) - D(0)| " + fmt("%.3g", cmp.discrepancy)};
}

Outcome c10_verdicts() {
  int passed = 0;
  double min_mod = INFINITY;
  bool windings_zero = true;
  for (int i = 0; i < kSuiteSize; ++i) {
    const SpectralData s = forward::solve(suite_potential(i)).spectral;
    const auto rep = characterize::characterize(s, kSuiteOrder);
    passed += rep.verdict == characterize::Verdict::pass;
    min_mod = std::min(min_mod, rep.det_grid.min_modulus);
    windings_zero = windings_zero && rep.boundary_winding == 0;
  }

  // S_1^± = 2, padded to several orders. The grid is half-open in Re with
  // step 2π/128, so Re 0 and π are grid points.
  const GridSpec rect{-kPi / 2, 3 * kPi / 2, 0.1, 3.0, 128, 64};
  GridSpec grid = rect;
  grid.re_max = 3 * kPi / 2 - 2 * kPi / 128;
  const std::vector<cplx> expected{cplx(0.0, std::log(2.0)), cplx(kPi, std::log(2.0))};
  bool family_ok = true;
  std::string family;
  for (int n : {1, 4, 12}) {
    const SpectralData s = SpectralData({2.0}, {2.0}).resized(n);
    const int w = characterize::boundary_winding(s, rect, n);
    const auto rep = characterize::characterize(s, n, grid);
    double far = 0.0;  // worst distance between expected and grid zeros, both ways
    for (const cplx& e : expected) {
      double best = INFINITY;
      for (const auto& z : rep.zeros) best = std::min(best, std::abs(z.z - e));
      far = std::max(far, best);
    }
    for (const auto& z : rep.zeros) {
      double best = INFINITY;
      for (const cplx& e : expected) best = std::min(best, std::abs(z.z - e));
      far = std::max(far, best);
    }
    const bool ok = w == 2 && far <= 1e-2 &&
                    rep.verdict == characterize::Verdict::fail_condition2;
    family_ok = family_ok && ok;
    family += " N=" + std::to_string(n) + ": winding " + std::to_string(w) + ", zero offset " +
              fmt("%.3g", far) + ";";
  }
  const bool ok = passed == kSuiteSize && windings_zero && min_mod > 1e-2 && family_ok;
  return {ok, std::to_string(passed) + "/" + std::to_string(kSuiteSize) +
                  " pass, min |D| " + fmt("%.3g", min_mod) + ";" + family};
}

Outcome c11_routes() {
  double worst = 0.0;
  for (int i = 0; i < kSuiteSize; ++i) {
    const SpectralData s = forward::solve(suite_potential(i)).spectral;
    const auto coef = inverse::invert_coefficients(s);
    const Potential op = inverse::operator_route(s);
    worst = std::max(worst, inverse::max_coefficient_gap(coef.potential, op));
  }
  return {worst <= 1e-6, "max gap " + fmt("%.3g", worst)};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome c12_determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::path(PENCIL_TEST_TMP) / "acceptance";
  fs::create_directories(dir);
  const SpectralData s = forward::solve(suite_potential(0)).spectral;
  const fs::path input = dir / "suite0.json";
  io::write_text_file(input.string(), io::dump(io::spectral_to_json(s)));

  std::vector<std::string> csvs;
  for (unsigned threads : {0u, 0u, 16u, 3u}) {
    cli::JobConfig c;
    c.command = cli::Command::characterize;
    c.input_path = input.string();
    c.output_path = (dir / ("report_" + std::to_string(csvs.size()) + ".json")).string();
    c.report_path = (dir / ("grid_" + std::to_string(csvs.size()) + ".csv")).string();
    c.threads = threads;
    std::ostringstream err;
    if (cli::run(c, err) != cli::kOk) return {false, "characterize failed: " + err.str()};
    csvs.push_back(slurp(*c.report_path));
  }
  bool same = true;
  for (std::size_t i = 1; i < csvs.size(); ++i) {
    same = same && csvs[i] == csvs[0];
  }
  return {same && !csvs[0].empty(),
          std::to_string(csvs.size()) + " runs (threads 0, 0, 16, 3), CSV " +
              std::to_string(csvs[0].size()) + " bytes, " + (same ? "identical" : "different")};
}

}  // namespace

int main() {
  const ResidualSweep base = sweep(0.5);
  const ResidualSweep halved = sweep(0.25);
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"order-1 closed form", c1_order_one},
      {"forward worked example", c2_worked},
      {"roundtrip", c3_roundtrip},
      {"internal overdetermination", c4_overdetermination},
      {"Wronskian", [&] { return c5_wronskian(base); }},
      {"ODE residual", [&] { return c6_ode(base, halved); }},
      {"psi product", c7_psi_product},
      {"shift covariance", c8_shift},
      {"determinant closed form", c9_determinant},
      {"characterization verdicts", c10_verdicts},
      {"route agreement", c11_routes},
      {"determinism", c12_determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o{false, ""};
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s criterion %2zu (%s): %s\n", o.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
