// gravitensor: command-line front end of the verification harness.

#include <chrono>
#include <ctime>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gravitensor/harness/deviations.hpp"
#include "gravitensor/harness/report.hpp"

namespace {

using namespace gravitensor;

struct Flags {
  std::string config_path;
  std::optional<std::string> case_name;
  std::optional<int> n;
  std::optional<int> order;
  std::optional<double> eps;
  std::optional<double> mass;
  std::optional<std::uint64_t> seed;
  std::vector<int> levels;
  std::optional<int> samples;
  std::optional<std::string> stress_form;
  std::string report_path;
  std::string format;
  bool timestamp = false;
  bool deviations = false;
};

CaseConfig resolve_config(const Flags& f) {
  CaseConfig cfg = f.config_path.empty() ? CaseConfig{} : load_config(f.config_path);
  if (f.case_name) cfg.case_name = *f.case_name;
  if (f.n) cfg.n = *f.n;
  if (f.order) cfg.stencil_order = *f.order;
  if (f.eps) cfg.epsilon = *f.eps;
  if (f.mass) cfg.mass = *f.mass;
  if (f.seed) cfg.seed = *f.seed;
  if (!f.levels.empty()) cfg.levels = f.levels;
  if (f.samples) cfg.oracle_samples = *f.samples;
  if (f.stress_form) {
    if (*f.stress_form == "sqrt_outside") cfg.stress_form = StressForm::SqrtOutside;
    else if (*f.stress_form == "sqrt_inside") cfg.stress_form = StressForm::SqrtInside;
    else throw ConfigError("stress form must be sqrt_outside or sqrt_inside");
  }
  cfg.validate();
  return cfg;
}

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

int emit(const std::string& command, const Flags& f, const CaseConfig& cfg, const IdentityReport* suite,
         const ConvergenceReport* conv, const std::string& default_format) {
  const auto format = parse_format(f.format.empty() ? default_format : f.format);
  const std::optional<std::string> stamp = f.timestamp ? std::optional(utc_now()) : std::nullopt;
  const std::string body = format == ReportFormat::Json ? report_json(command, cfg, suite, conv, stamp)
                                                        : report_text(command, cfg, suite, conv);
  bool pass = true;
  if (suite) pass = pass && suite->all_pass();
  if (conv) pass = pass && conv->all_pass();
  if (f.report_path.empty()) {
    std::cout << body;
  } else {
    write_file(f.report_path, body);
    std::cout << command << " " << cfg.case_name << ": " << (pass ? "PASS" : "FAIL") << " (report " << f.report_path
              << ")\n";
  }
  return pass ? 0 : 1;
}

void add_case_flags(CLI::App& app, Flags& f) {
  app.add_option("--config", f.config_path, "JSON config file; flags override its keys")->check(CLI::ExistingFile);
  app.add_option("--case", f.case_name, "flat, weakfield, conformal, random_smooth, vector_matter, gauge_experiment");
  app.add_option("--n", f.n, "points per active axis");
  app.add_option("--order", f.order, "stencil order (2 or 4)");
  app.add_option("--eps", f.eps, "metric perturbation amplitude");
  app.add_option("--mass", f.mass, "vector field mass");
  app.add_option("--seed", f.seed, "seed for random_smooth and oracle sampling");
  app.add_option("--levels", f.levels, "grid sizes for the convergence study")->delimiter(',');
  app.add_option("--samples", f.samples, "oracle sample points");
  app.add_option("--stress-form", f.stress_form, "sqrt_outside or sqrt_inside");
  app.add_option("--report", f.report_path, "write the report to this file");
  app.add_option("--format", f.format, "json or text");
  app.add_flag("--timestamp", f.timestamp, "include a generation timestamp in JSON output");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-difference verification of gravitational field identities on a periodic lattice"};
  app.fallthrough();
  Flags f;
  add_case_flags(app, f);
  app.add_flag("--deviations", f.deviations, "print the printed-versus-implemented formula list and exit");

  auto* verify = app.add_subcommand("verify", "run the identity, oracle and gauge checks for one case");
  auto* convergence = app.add_subcommand("convergence", "measure convergence order over --levels");
  auto* oracle = app.add_subcommand("oracle", "run only the derivative oracles");
  auto* report = app.add_subcommand("report", "run verify and convergence and emit one report");
  app.require_subcommand(0, 1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (f.deviations) {
    std::cout << kDeviations;
    return 0;
  }
  if (app.get_subcommands().empty()) {
    std::cerr << app.help();
    return 2;
  }

  try {
    const CaseConfig cfg = resolve_config(f);
    if (verify->parsed()) {
      const auto suite = run_suite(cfg);
      return emit("verify", f, cfg, &suite, nullptr, "text");
    }
    if (oracle->parsed()) {
      const auto suite = run_suite(cfg, {.identities = false, .oracles = true, .gauge = false});
      return emit("oracle", f, cfg, &suite, nullptr, "text");
    }
    if (convergence->parsed()) {
      const auto conv = convergence_study(cfg, cfg.levels);
      return emit("convergence", f, cfg, nullptr, &conv, "text");
    }
    if (report->parsed()) {
      const auto suite = run_suite(cfg);
      const auto conv = convergence_study(cfg, cfg.levels);
      return emit("report", f, cfg, &suite, &conv, "json");
    }
  } catch (const Error& e) {
    std::cerr << "gravitensor: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "gravitensor: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
