#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "kdvdg/errors.hpp"
#include "kdvdg/harness.hpp"

namespace {

struct CliOptions {
  kdv::RunConfig cfg;
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> overrides;
};

void add_common_flags(CLI::App* cmd, CliOptions& opts) {
  auto capture = [&opts](const std::string& key) {
    return [&opts, key](const std::string& value) {
      opts.overrides.emplace_back(key, value);
    };
  };
  cmd->add_option("--config", opts.config_path,
                  "configuration file with key = value lines");
  cmd->add_option_function<std::string>("--problem", capture("problem"),
                                        "linear | mkdv4 | custom");
  cmd->add_option_function<std::string>("--degree", capture("degree"),
                                        "polynomial degree q >= 1");
  cmd->add_option_function<std::string>("--cells", capture("cells"),
                                        "number of mesh cells");
  cmd->add_option_function<std::string>("--dt", capture("dt"), "time step");
  cmd->add_option_function<std::string>("--tfinal", capture("tfinal"),
                                        "final time");
  cmd->add_option_function<std::string>("--sigma", capture("sigma"),
                                        "penalty parameter (default 10 q^2)");
  cmd->add_option_function<std::string>("--newton-tol", capture("newton-tol"),
                                        "nonlinear solver tolerance");
  cmd->add_option_function<std::string>(
      "--domain-mode", capture("domain-mode"),
      "scaled-40 | sn-auto-period | paper-literal | custom");
  cmd->add_option_function<std::string>("--domain-length",
                                        capture("domain-length"),
                                        "domain length for custom modes");
  cmd->add_option_function<std::string>("--alpha", capture("alpha"),
                                        "flux coefficient");
  cmd->add_option_function<std::string>("--m", capture("m"),
                                        "flux exponent for custom problems");
  cmd->add_option_function<std::string>("--sn-k", capture("sn-k"),
                                        "sn modulus/parameter value");
  cmd->add_option_function<std::string>("--sn-convention",
                                        capture("sn-convention"),
                                        "modulus | parameter");
  cmd->add_option_function<std::string>("--sn-periods", capture("sn-periods"),
                                        "spatial periods in the domain");
  cmd->add_option_function<std::string>("--wave-index", capture("wave-index"),
                                        "linear solution wave index l");
  cmd->add_option_function<std::string>("--c1", capture("c1"),
                                        "linear solution sine amplitude");
  cmd->add_option_function<std::string>("--c2", capture("c2"),
                                        "linear solution cosine amplitude");
  cmd->add_option_function<std::string>("--ic", capture("ic"),
                                        "exact | sinusoid");
  cmd->add_option_function<std::string>(
      "--levels", capture("levels"), "comma-separated cell counts for EOC");
  cmd->add_option_function<std::string>("--coupling", capture("coupling"),
                                        "fixed | h10 | equal | paper");
  cmd->add_flag_callback(
      "--paper-coupling",
      [&opts]() { opts.overrides.emplace_back("coupling", "paper"); },
      "reproduce the published tau = 10 h coupling");
  cmd->add_option_function<std::string>(
      "--constants", [&opts](const std::string& value) {
        std::stringstream ss(value);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
          const auto eq = tok.find('=');
          if (eq == std::string::npos)
            throw CLI::ValidationError("--constants expects name=value pairs");
          opts.overrides.emplace_back(tok.substr(0, eq), tok.substr(eq + 1));
        }
      },
      "analysis constants, e.g. ca2cb2=1,creg=1");
  cmd->add_flag_callback(
      "--sh-diagnostics",
      [&opts]() { opts.overrides.emplace_back("sh-diagnostics", "1"); },
      "verify the average-matching projector identity (needs N odd, q even)");
  cmd->add_flag_callback(
      "--skip-certificate",
      [&opts]() { opts.overrides.emplace_back("skip-certificate", "1"); },
      "skip the exact-solution residual certificate gate");
  cmd->add_option_function<std::string>("--out", capture("out"),
                                        "CSV output path (default stdout)");
  cmd->add_option_function<std::string>(
      "--eta-out", capture("eta-out"),
      "per-step estimator component CSV (estimate only)");
  cmd->add_option_function<std::string>("--json", capture("json"),
                                        "JSON mirror of the CSV rows");
}

kdv::RunConfig finalize(const CliOptions& opts) {
  kdv::RunConfig cfg;
  if (!opts.config_path.empty()) {
    std::ifstream in(opts.config_path);
    if (!in) throw kdv::ConfigError("cannot open config: " + opts.config_path);
    cfg = kdv::parse_config_file(in);
  }
  for (const auto& [key, value] : opts.overrides)
    kdv::apply_config_entry(cfg, key, value);
  return cfg;
}

std::unique_ptr<std::ofstream> open_or_null(const std::string& path) {
  if (path.empty()) return nullptr;
  auto os = std::make_unique<std::ofstream>(path);
  if (!*os) throw kdv::ConfigError("cannot open output: " + path);
  return os;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-conservative discontinuous Galerkin solver for "
               "generalized KdV equations"};
  app.require_subcommand(1);

  CliOptions conserve_opts, eoc_opts, estimate_opts;
  auto* conserve = app.add_subcommand(
      "conserve", "track invariant deviations along a run");
  add_common_flags(conserve, conserve_opts);
  auto* eoc = app.add_subcommand("eoc", "refinement study with EOC table");
  add_common_flags(eoc, eoc_opts);
  auto* estimate = app.add_subcommand(
      "estimate", "per-step a posteriori estimator and accumulated bound");
  add_common_flags(estimate, estimate_opts);
  app.add_subcommand("selftest", "operator and special-function checks");

  CLI11_PARSE(app, argc, argv);

  try {
    if (conserve->parsed()) {
      kdv::RunConfig cfg = finalize(conserve_opts);
      auto file = open_or_null(cfg.out_path);
      std::ostream& os = file ? *file : std::cout;
      const auto summary = kdv::run_conserve(cfg, os);
      std::cout << "steps=" << summary.steps
                << " max_mass_dev=" << kdv::csv_double(summary.max_mass_dev)
                << " max_momentum_dev="
                << kdv::csv_double(summary.max_momentum_dev)
                << " max_energy_dev="
                << kdv::csv_double(summary.max_energy_dev);
      if (summary.max_higher_dev)
        std::cout << " max_higher_dev="
                  << kdv::csv_double(*summary.max_higher_dev);
      std::cout << "\n";
    } else if (eoc->parsed()) {
      kdv::RunConfig cfg = finalize(eoc_opts);
      const auto result = kdv::run_eoc(cfg);
      if (auto file = open_or_null(cfg.out_path))
        kdv::write_eoc_csv(result, *file);
      kdv::write_eoc_text(result, std::cout);
      if (result.aborted) return 2;
    } else if (estimate->parsed()) {
      kdv::RunConfig cfg = finalize(estimate_opts);
      auto file = open_or_null(cfg.out_path);
      auto eta_file = open_or_null(cfg.eta_out_path);
      std::ostream& os = file ? *file : std::cout;
      const auto result = kdv::run_estimate(cfg, os, eta_file.get());
      if (!result.rows.empty()) {
        const auto& last = result.rows.back();
        std::cout << "final t=" << kdv::csv_double(last.t)
                  << " eta=" << kdv::csv_double(last.eta_total)
                  << " H=" << kdv::csv_double(last.bound);
        if (result.has_errors)
          std::cout << " err_enorm=" << kdv::csv_double(last.err_enorm)
                    << " effectivity=" << kdv::csv_double(last.effectivity);
        if (result.c4 > 0.0)
          std::cout << " C4=" << kdv::csv_double(result.c4);
        std::cout << "\n";
      }
    } else {
      return kdv::selftest(std::cout) ? 0 : 1;
    }
  } catch (const kdv::NewtonDivergenceError& e) {
    std::cerr << "solver divergence at step " << e.step_index << ": "
              << e.what() << " (residual " << e.last_residual << ")\n";
    return 2;
  } catch (const kdv::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 3;
  } catch (const kdv::ParityError& e) {
    std::cerr << "parity error: " << e.what() << "\n";
    return 3;
  } catch (const kdv::PeriodicityError& e) {
    std::cerr << "periodicity error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
