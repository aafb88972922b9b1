#include "pencil/cli.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "pencil/forward.hpp"
#include "pencil/inverse.hpp"
#include "pencil/io.hpp"

namespace pencil::cli {

namespace {

using io::Json;

constexpr std::array<double, 5> kValidateX{0.0, 0.9, 2.3, 4.1, 5.7};
const std::array<cplx, 5> kValidateLambda{cplx{0.31, 0.2}, cplx{-0.73, 0.05},
                                          cplx{1.17, 0.0}, cplx{-2.21, 0.4},
                                          cplx{0.05, 1.3}};

const char* kIndexNote = "array position j holds mode n = j + 1";

Json optional_number(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

template <class T, class Parse>
T load(const JobConfig& c, Parse parse) {
  try {
    T value = parse(io::read_json_file(c.input_path));
    return c.order ? value.resized(*c.order) : value;
  } catch (const NonFiniteInput& e) {
    throw SchemaError(e.what(), "");
  }
}

Potential load_potential(const JobConfig& c) {
  return load<Potential>(c, io::parse_potential);
}

SpectralData load_spectral(const JobConfig& c) {
  return load<SpectralData>(c, io::parse_spectral);
}

int do_forward(const JobConfig& c) {
  const auto fr = forward::solve(load_potential(c));
  Json doc = io::spectral_to_json(fr.spectral);
  doc["index_convention"] = kIndexNote;
  Json decay;
  decay["sum_n_abs_p"] = fr.decay_diag.sum_n_abs_p;
  decay["sum_abs_q"] = fr.decay_diag.sum_abs_q;
  decay["geometric_rate"] = optional_number(fr.decay_diag.geometric_rate);
  doc["decay"] = decay;
  io::write_text_file(c.output_path, io::dump(doc));
  return kOk;
}

int do_inverse(const JobConfig& c) {
  const SpectralData s = load_spectral(c);
  auto result = inverse::invert_coefficients(s);
  Json route_error = nullptr;
  try {
    inverse::crosscheck_routes(s, result);
  } catch (const Error& e) {
    route_error = Json{{"kind", e.kind()}, {"message", e.what()}};
  }
  Json doc = io::potential_to_json(result.potential);
  doc["index_convention"] = kIndexNote;
  Json res;
  Json closing = Json::array();
  for (double r : result.crosscheck.closing_residual) closing.push_back(r);
  res["closing_relation"] = closing;
  res["route_mismatch"] = optional_number(result.crosscheck.route_mismatch);
  res["routes_agree"] =
      result.crosscheck.route_mismatch
          ? Json(*result.crosscheck.route_mismatch <= c.route_tol)
          : Json(nullptr);
  res["route_tol"] = c.route_tol;
  res["route_error"] = route_error;
  res["max_residual"] = result.crosscheck.max_residual;
  doc["residuals"] = res;
  io::write_text_file(c.output_path, io::dump(doc));
  return kOk;
}

int do_roundtrip(const JobConfig& c) {
  const Potential pot = load_potential(c);
  const auto fr = forward::solve(pot);
  const auto inv = inverse::invert_coefficients(fr.spectral);
  const auto back = forward::spectral_data(inv.jost);

  double scale = 0.0;
  for (int n = 1; n <= pot.order(); ++n) {
    scale = std::max({scale, std::abs(pot.p(n)), std::abs(pot.q(n))});
  }
  const double abs_err = inverse::max_coefficient_gap(pot, inv.potential);
  double spectral_err = 0.0;
  for (Branch b : kBranches) {
    for (int n = 1; n <= pot.order(); ++n) {
      spectral_err = std::max(spectral_err,
                              std::abs(back.s(b, n) - fr.spectral.s(b, n)));
    }
  }
  Json doc;
  doc["order"] = pot.order();
  doc["max_abs_error"] = abs_err;
  doc["max_relative_error"] = scale > 0.0 ? abs_err / scale : abs_err;
  doc["spectral_max_error"] = spectral_err;
  doc["closing_residual"] = inv.crosscheck.max_residual;
  io::write_text_file(c.output_path, io::dump(doc));
  return kOk;
}

int do_validate(const JobConfig& c) {
  const Potential pot = load_potential(c);
  const auto fr = forward::solve(pot);
  Json samples = Json::array();
  double max_w = 0.0;
  double max_ode = 0.0;
  for (std::size_t i = 0; i < kValidateX.size(); ++i) {
    const double x = kValidateX[i];
    const cplx lambda = kValidateLambda[i];
    const double w = forward::wronskian_residual(fr.jost, x, lambda);
    const double op = forward::ode_residual(pot, fr.jost, x, lambda, Branch::plus);
    const double om = forward::ode_residual(pot, fr.jost, x, lambda, Branch::minus);
    max_w = std::max(max_w, w);
    max_ode = std::max({max_ode, op, om});
    Json row;
    row["x"] = x;
    row["lambda"] = io::complex_to_json(lambda);
    row["wronskian_residual"] = w;
    row["ode_residual_plus"] = op;
    row["ode_residual_minus"] = om;
    samples.push_back(row);
  }
  std::vector<cplx> xs(kValidateX.begin(), kValidateX.end());
  Json dependence = Json::array();
  double max_dep = 0.0;
  for (int n = 1; n <= pot.order(); ++n) {
    const double dp = forward::dependence_check(fr.jost, n, xs, Branch::plus);
    const double dm = forward::dependence_check(fr.jost, n, xs, Branch::minus);
    max_dep = std::max({max_dep, dp, dm});
    dependence.push_back(Json{{"n", n}, {"plus", dp}, {"minus", dm}});
  }
  Json doc;
  doc["order"] = pot.order();
  doc["samples"] = samples;
  doc["dependence"] = dependence;
  doc["max_wronskian_residual"] = max_w;
  doc["max_ode_residual"] = max_ode;
  doc["max_dependence_residual"] = max_dep;
  io::write_text_file(c.output_path, io::dump(doc));
  return kOk;
}

int do_characterize(const JobConfig& c) {
  const SpectralData s = load_spectral(c);
  const auto rep =
      characterize::characterize(s, s.order(), c.grid, c.tol_zero, c.threads);
  const std::string csv_path =
      c.report_path ? *c.report_path : c.output_path + ".grid.csv";
  io::write_text_file(csv_path, io::determinant_csv(rep.det_grid));

  Json doc;
  doc["order"] = rep.order;
  doc["verdict"] = characterize::to_string(rep.verdict);
  doc["explanation"] = rep.explanation;
  Json c1;
  c1["weighted_sum_plus"] = rep.condition1.weighted_sum_plus;
  c1["weighted_sum_minus"] = rep.condition1.weighted_sum_minus;
  c1["decay_rate"] = optional_number(rep.condition1.decay_rate);
  c1["slow_decay"] = rep.condition1.slow_decay;
  doc["condition1"] = c1;
  Json det;
  det["grid"] = io::grid_to_json(rep.det_grid.spec);
  det["min_modulus"] = rep.det_grid.min_modulus;
  det["argmin_z"] = io::complex_to_json(rep.det_grid.argmin_z);
  det["min_modulus_minus"] = rep.min_modulus_minus;
  det["argmin_z_minus"] = io::complex_to_json(rep.argmin_z_minus);
  det["tol_zero"] = rep.tol_zero;
  det["csv"] = csv_path;
  doc["determinant"] = det;
  Json wind;
  wind["rectangle"] = io::grid_to_json(rep.winding_rect);
  wind["count"] = rep.boundary_winding ? Json(*rep.boundary_winding) : Json(nullptr);
  doc["winding"] = wind;
  Json zeros = Json::array();
  for (const auto& z : rep.zeros) {
    zeros.push_back(Json{{"z", io::complex_to_json(z.z)},
                         {"abs_D", z.modulus},
                         {"certified", z.certified}});
  }
  doc["zeros"] = zeros;
  io::write_text_file(c.output_path, io::dump(doc));
  return rep.verdict == characterize::Verdict::fail_condition2 ? kVerdictFail : kOk;
}

void report_error(std::ostream& err, const char* kind, const std::string& message,
                  int code, const std::string* pointer = nullptr) {
  Json e;
  e["kind"] = kind;
  e["message"] = message;
  e["exit_code"] = code;
  if (pointer) e["pointer"] = *pointer;
  err << io::dump(Json{{"error", e}});
}

}  // namespace

void JobConfig::validate() const {
  if (order && *order < 1) throw DomainError("--order must be >= 1");
  if (input_path.empty()) throw DomainError("--input is required");
  if (output_path.empty()) throw DomainError("--output is required");
  if (grid && command != Command::characterize) {
    throw DomainError("--grid applies to characterize only");
  }
  if (grid) grid->validate();
  if (!(tol_zero > 0.0)) throw DomainError("--tol-zero must be positive");
  if (!(route_tol > 0.0)) throw DomainError("--route-tol must be positive");
}

std::optional<Command> parse_command(const std::string& name) {
  if (name == "forward") return Command::forward;
  if (name == "inverse") return Command::inverse;
  if (name == "roundtrip") return Command::roundtrip;
  if (name == "characterize") return Command::characterize;
  if (name == "validate") return Command::validate;
  return std::nullopt;
}

const char* to_string(Command c) noexcept {
  switch (c) {
    case Command::forward:
      return "forward";
    case Command::inverse:
      return "inverse";
    case Command::roundtrip:
      return "roundtrip";
    case Command::characterize:
      return "characterize";
    case Command::validate:
      return "validate";
  }
  return "unknown";
}

GridSpec parse_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) parts.push_back(item);
  if (parts.size() != 6) {
    throw DomainError("--grid expects re0,re1,im0,im1,nx,ny");
  }
  GridSpec g;
  try {
    std::size_t used = 0;
    auto number = [&](const std::string& s) {
      const double v = std::stod(s, &used);
      if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
      return v;
    };
    auto count = [&](const std::string& s) {
      const int v = std::stoi(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    };
    g.re_min = number(parts[0]);
    g.re_max = number(parts[1]);
    g.im_min = number(parts[2]);
    g.im_max = number(parts[3]);
    g.nx = count(parts[4]);
    g.ny = count(parts[5]);
  } catch (const std::logic_error&) {
    throw DomainError("--grid has a malformed field: " + text);
  }
  g.validate();
  return g;
}

int run(const JobConfig& config, std::ostream& err) {
  try {
    config.validate();
  } catch (const Error& e) {
    report_error(err, "UsageError", e.what(), kInputError);
    return kInputError;
  }
  try {
    switch (config.command) {
      case Command::forward:
        return do_forward(config);
      case Command::inverse:
        return do_inverse(config);
      case Command::roundtrip:
        return do_roundtrip(config);
      case Command::characterize:
        return do_characterize(config);
      case Command::validate:
        return do_validate(config);
    }
    return kOk;
  } catch (const SchemaError& e) {
    report_error(err, e.kind(), e.what(), kInputError, &e.pointer());
    return kInputError;
  } catch (const IoError& e) {
    report_error(err, e.kind(), e.what(), kInputError);
    return kInputError;
  } catch (const Error& e) {
    report_error(err, e.kind(), e.what(), kSolverError);
    return kSolverError;
  } catch (const std::exception& e) {
    report_error(err, "InternalError", e.what(), kSolverError);
    return kSolverError;
  }
}

int main_entry(int argc, const char* const* argv, std::ostream& out,
               std::ostream& err) {
  CLI::App app{"Direct and inverse spectral problem for -y'' + 2 lambda p y + q y = lambda^2 y"};
  std::string command;
  std::optional<int> order;
  std::string grid_text;
  JobConfig config;
  std::string report;
  app.add_option("command", command,
                 "forward | inverse | roundtrip | characterize | validate")
      ->required();
  app.add_option("--input", config.input_path, "input JSON")->required();
  app.add_option("--output", config.output_path, "output JSON")->required();
  app.add_option("--order", order, "pad or truncate the input to N modes");
  app.add_option("--grid", grid_text, "re0,re1,im0,im1,nx,ny (characterize)");
  app.add_option("--tol-zero", config.tol_zero, "threshold for |D| = 0");
  app.add_option("--route-tol", config.route_tol,
                 "tolerance for the inverse route-agreement flag");
  app.add_option("--report", report, "determinant grid CSV path");
  app.add_option("--threads", config.threads,
                 "worker threads for the determinant grid (0: all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    report_error(err, "UsageError", e.what(), kInputError);
    return kInputError;
  }

  const auto cmd = parse_command(command);
  if (!cmd) {
    report_error(err, "UsageError", "unknown command: " + command, kInputError);
    return kInputError;
  }
  config.command = *cmd;
  config.order = order;
  if (!report.empty()) config.report_path = report;
  try {
    if (!grid_text.empty()) config.grid = parse_grid(grid_text);
    config.validate();
  } catch (const Error& e) {
    report_error(err, "UsageError", e.what(), kInputError);
    return kInputError;
  }
  return run(config, err);
}

}  // namespace pencil::cli
