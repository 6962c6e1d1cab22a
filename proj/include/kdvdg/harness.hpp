#ifndef KDVDG_HARNESS_HPP
#define KDVDG_HARNESS_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kdvdg/eoc.hpp"
#include "kdvdg/estimators.hpp"
#include "kdvdg/exact.hpp"
#include "kdvdg/problem.hpp"

namespace kdv {

enum class ProblemKind { linear, mkdv4, custom };
enum class DomainMode { scaled40, sn_auto_period, paper_literal, custom };
enum class Coupling { fixed, tau_h_over_10, tau_equal_h, paper };
enum class InitialKind { exact_solution, sinusoid };

struct RunConfig {
  ProblemKind problem = ProblemKind::linear;
  int m = 2;            // custom problems only
  double alpha = 0.5;   // flux coefficient
  int degree = 1;       // q
  int cells = 100;      // N
  double tau = 0.2;
  double tfinal = 1.0;
  double sigma = 0.0;   // <= 0 selects the default 10 q^2
  double newton_tol = 1e-12;

  DomainMode domain_mode = DomainMode::scaled40;
  double domain_length = 40.0; // scaled40 / custom modes
  int sn_periods = 4;
  double sn_k = 0.9;
  EllipticConvention sn_convention = EllipticConvention::modulus;
  int wave_index = 1; // linear solution l
  double c1 = 1.0, c2 = 0.0;
  InitialKind initial = InitialKind::exact_solution;

  std::vector<int> levels{25, 51, 101, 201}; // cells per EOC level
  Coupling coupling = Coupling::tau_h_over_10;

  BoundConstants constants;
  bool sh_diagnostics = false;
  bool skip_certificate = false;

  std::string out_path;     // empty -> stdout
  std::string eta_out_path; // per-step estimator component stream
  std::string json_path;    // optional JSON mirror

  double sigma_or_default() const {
    return sigma > 0.0 ? sigma : 10.0 * degree * degree;
  }
  void validate() const; // throws ConfigError
};

/// Parse `key = value` lines; '#' starts a comment. Unknown keys are
/// rejected. CLI flags are applied on top through the same setter.
RunConfig parse_config_file(std::istream& in);
void apply_config_entry(RunConfig& cfg, const std::string& key,
                        const std::string& value);

/// Everything a driver needs for one run at a given resolution.
struct ProblemSetup {
  ProblemSpec spec;
  double domain_length = 0.0;
  int cells = 0;
  std::optional<ExactSolution> exact; // absent -> bound-only mode
  InitialData initial;                // analytic, with derivatives
  bool paper_literal = false;
};
ProblemSetup make_setup(const RunConfig& cfg, int cells_override = -1);

struct ConserveSummary {
  int steps = 0;
  double max_mass_dev = 0.0;
  double max_momentum_dev = 0.0;
  double max_energy_dev = 0.0;
  std::optional<double> max_higher_dev;
  double energy_initial = 0.0;
};

/// One row per accepted step: t, mass_dev, momentum_dev, energy_dev.
ConserveSummary run_conserve(const RunConfig& cfg, std::ostream& csv);

struct EstimateRow {
  double t = 0.0;
  double err_enorm = 0.0;
  double err_lm = 0.0;
  double eta_total = 0.0;
  double bound = 0.0;
  double effectivity = 0.0;
};

struct EstimateResult {
  std::vector<EstimateRow> rows;
  bool has_errors = false; // false in bound-only mode
  double c4 = 0.0;         // m = 4 only
};

/// CSV columns: t, err_enorm, err_Lm, eta_total, H, effectivity. The
/// optional second stream receives the per-step estimator components
/// (t, eta_total, eta_volume, eta_jumpUx, eta_jumpU, eta_jumpV, noncon, H).
EstimateResult run_estimate(const RunConfig& cfg, std::ostream& csv,
                            std::ostream* eta_csv);

struct EocLevel {
  int cells = 0;
  double h = 0.0;
  double tau = 0.0;
  ErrorNorms error;
  double eta = 0.0;
  double bound = 0.0;
  double effectivity = 0.0;
};

struct EocResult {
  std::vector<EocLevel> levels;
  EocTable table;
  bool aborted = false; // a level's solver failed; table is partial
  std::string abort_reason;
};

/// Levels run concurrently; rows are joined in level order.
EocResult run_eoc(const RunConfig& cfg);

void write_eoc_csv(const EocResult& result, std::ostream& os);
void write_eoc_text(const EocResult& result, std::ostream& os);

/// Temporal convergence study: fixed mesh rich enough that the spatial
/// error is negligible, tau halved, final-time L2 error against the exact
/// solution.
struct TemporalOrderResult {
  std::vector<double> taus;
  std::vector<double> errors;
  std::vector<double> eocs;
};
TemporalOrderResult temporal_order_study(const RunConfig& cfg,
                                         const std::vector<double>& taus);

/// Quick operator/special-function property checks; prints one line per
/// check, returns true when all pass.
bool selftest(std::ostream& os);

/// Round-trip numeric formatting used in every CSV (17 significant digits).
std::string csv_double(double v);

} // namespace kdv

#endif
