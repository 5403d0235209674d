// qcoarse: parameter sweeps and single-point evaluations from the command line.
//
//   qcoarse sweep <jobfile> --csv <path> [--svg <path>]
//   qcoarse point <system> [--param k=v ...]
//
// Exit codes: 0 success, 1 I/O failure, 2 validation error, 3 optimizer or
// quadrature non-convergence.

#include "qcoarse/sweep.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

constexpr int kExitIo = 1;
constexpr int kExitValidation = 2;
constexpr int kExitConvergence = 3;

std::pair<std::string, double> parse_assignment(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0)
    throw qcoarse::ValidationError("--param expects name=value, got '" + text + "'");
  const std::string name = text.substr(0, eq);
  return {name, qcoarse::detail::parse_number(text.substr(eq + 1), "--param " + name)};
}

int run_sweep_command(const std::string& job, const std::string& csv, const std::string& svg,
                      std::optional<int> order, std::optional<int> starts, unsigned threads) {
  auto spec = qcoarse::load_job(job);
  if (order) spec.options.quadrature_order = *order;
  if (starts) spec.options.starts = *starts;
  const auto result = qcoarse::run_sweep(spec, threads);
  qcoarse::emit_csv(result, csv);
  if (!svg.empty()) qcoarse::emit_svg(result, svg);
  std::size_t failed = 0;
  for (const auto& row : result.rows) failed += !row.converged;
  if (failed) {
    std::cerr << "qcoarse: optimizer did not converge at " << failed << " of " << result.rows.size()
              << " points (see the converged column)\n";
    return kExitConvergence;
  }
  return 0;
}

int run_point_command(const std::string& system_name, const std::vector<std::string>& params,
                      std::optional<int> order, std::optional<int> starts, bool verbose) {
  const auto system = qcoarse::parse_system(system_name, "point <system>");
  std::vector<std::pair<std::string, double>> overrides;
  for (const auto& p : params) overrides.push_back(parse_assignment(p));
  const auto resolved = qcoarse::resolve_params(system, overrides);
  qcoarse::validate_params(system, resolved);
  qcoarse::RunOptions opt;
  if (order) opt.quadrature_order = *order;
  if (starts) opt.starts = *starts;
  if (opt.starts < 0) throw qcoarse::ValidationError("--starts must be >= 0");
  if (opt.quadrature_order < 1 || opt.quadrature_order > qcoarse::kMaxHermiteOrder)
    throw qcoarse::ValidationError("--quadrature-order must lie in [1, " +
                                   std::to_string(qcoarse::kMaxHermiteOrder) + "]");
  const auto r = qcoarse::evaluate_point(system, resolved, opt);
  std::printf("%.12g\n", r.value);
  if (verbose) {
    std::fprintf(stderr, "argmax:");
    for (double x : r.argmax) std::fprintf(stderr, " %.12g", x);
    std::fprintf(stderr, "\nevaluations: %ld\nstarts: %d\nconverged: %s\n", r.evaluations, r.starts_used,
                 r.converged ? "true" : "false");
  }
  if (!r.converged) {
    std::cerr << "qcoarse: optimizer did not converge\n";
    return kExitConvergence;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bell-CHSH and Leggett-Garg values under coarsened measurements"};
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<int> order;
  std::optional<int> starts;
  app.add_option("--quadrature-order", order, "Gauss-Hermite order per axis for reference averaging");
  app.add_option("--starts", starts, "optimizer lattice starts (0 means 3^d)");

  auto* sweep = app.add_subcommand("sweep", "run a job file and write CSV (and optionally SVG)");
  std::string job, csv, svg;
  unsigned threads = 0;
  sweep->add_option("jobfile", job, "job file")->required();
  sweep->add_option("--csv", csv, "CSV output path")->required();
  sweep->add_option("--svg", svg, "SVG output path");
  sweep->add_option("--threads", threads, "worker threads (0 = hardware concurrency)");

  auto* point = app.add_subcommand("point", "print the optimized value at one parameter point");
  std::string system;
  std::vector<std::string> params;
  bool verbose = false;
  point->add_option("system", system, "system name")->required();
  point->add_option("--param", params, "parameter assignment name=value (repeatable)");
  point->add_flag("--verbose,-v", verbose, "also print the argmax and optimizer statistics");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*sweep) return run_sweep_command(job, csv, svg, order, starts, threads);
    return run_point_command(system, params, order, starts, verbose);
  } catch (const qcoarse::ValidationError& e) {
    std::cerr << "qcoarse: invalid input: " << e.what() << "\n";
    return kExitValidation;
  } catch (const qcoarse::ConvergenceError& e) {
    std::cerr << "qcoarse: no convergence: " << e.what() << "\n";
    return kExitConvergence;
  } catch (const qcoarse::OutputError& e) {
    std::cerr << "qcoarse: " << e.what() << "\n";
    return kExitIo;
  }
}
