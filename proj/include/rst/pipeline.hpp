#pragma once

#include <optional>
#include <string>

#include "rst/charsolve.hpp"
#include "rst/frechet.hpp"

namespace rst {

// Experimental plan for the statistical suites.  All bands and budgets live
// here; the CLI populates it from flags.
struct ExperimentPlan {
  std::string rule_file;
  int grid_points = 2048;
  std::uint64_t seed = 20240801;
  int samples = 2000;
  int jobs = 1;
  double p = 2;                                  // moment order (2^k)
  std::vector<int> moll_levels = {3, 4, 5};      // uniform suite
  int conv_fine = 6;                             // n1 of the convergence pairs
  std::vector<int> conv_coarse = {3, 4, 5};      // n2 values
  std::vector<int> phi_levels = {2, 3, 4, 5, 6};
  int center_level = 0;                          // phi level used for centering
  double slope_band = 0.2;                       // |slope - target| tolerance
  double uniformity_band = 2.5;                  // log2 spread of fitted constants
  double moll_rate_kappa = 0.6;
  double moll_rate_constant = 8.0;               // frozen calibration constant
  int moll_rate_probes = 20;
  std::string out_dir;
};

struct ChainStepReport {
  std::string tree;
  int chain_index = 0;
  bool negative = false;
  bool aborted = false;                     // upstream failure stopped this step
  std::vector<MomentFit> fits;              // one per mollification level
  double constant_spread = 0;               // log2 spread over mollifications
  double gamma_route_constant = 0;          // positive-degree route
  bool pass = false;
};

struct UniformReport {
  std::vector<ChainStepReport> steps;
  std::map<int, NegCharacter<double>> characters;  // per mollification level
  bool pass = false;
  std::string summary;
};

UniformReport run_uniform_bounds(const ExperimentPlan& plan, const StructureSpec& spec);

struct ConvergenceRow {
  std::string tree;
  std::vector<int> coarse_levels;
  std::vector<double> log2_weighted_diff;
  double theta = 0;
  double theta_se = 0;
  bool pass = false;
};

struct ConvergenceReport {
  bool gate_pass = false;                 // mollification-rate gate
  double gate_worst = 0;
  std::vector<ConvergenceRow> rows;
  bool pass = false;
  std::string summary;
};

ConvergenceReport run_convergence(const ExperimentPlan& plan, const StructureSpec& spec);

struct TransferRow {
  std::string tree;
  std::vector<double> char_values;    // per level
  std::vector<double> diffs;          // successive absolute differences
  bool cauchy = false;
  double final_mean = 0, final_se = 0;
  bool centered = false;
};

struct TransferReport {
  std::vector<int> levels;
  std::vector<TransferRow> rows;
  bool pass = false;
  std::string summary;
};

TransferReport transfer_bphz(const ExperimentPlan& plan, const StructureSpec& spec);

// --- reporting -----------------------------------------------------------------

std::string config_hash(const ExperimentPlan& plan, const StructureSpec& spec);

// deterministic CSV emission; returns the written paths
std::vector<std::string> emit_uniform_report(const ExperimentPlan& plan,
                                             const StructureSpec& spec,
                                             const UniformReport& rep);
std::vector<std::string> emit_convergence_report(const ExperimentPlan& plan,
                                                 const StructureSpec& spec,
                                                 const ConvergenceReport& rep);
std::vector<std::string> emit_transfer_report(const ExperimentPlan& plan,
                                              const StructureSpec& spec,
                                              const TransferReport& rep);

// character table file: lines "<tree key> = <value>"
void write_character_table(const std::string& path, const NegCharacter<double>& g);
NegCharacter<double> read_character_table(const std::string& path, const ContextPtr& ctx);

// flat binary field files with a small header, plus CSV export
void write_field(const std::string& path, const Field& f, const std::string& label);
Field read_field(const std::string& path, std::string* label = nullptr);
void export_field_csv(const std::string& path, const Field& f);

std::string kernel_selftest_report(const SingularKernel& K, const SemigroupKernel& sk);

}  // namespace rst
