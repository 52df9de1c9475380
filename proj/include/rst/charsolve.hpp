#pragma once

#include <optional>

#include "rst/model.hpp"

namespace rst {

// Cached per-sample statistics: pairings of every needed tree against the
// centering kernels phi^n (and optionally a fixed psi), plus the Jtilde
// character values at the origin.  Everything downstream (character solves,
// moment regressions, convergence sweeps) is linear algebra over these.
struct SampleValues {
  std::map<std::string, std::vector<double>> phi;  // tree key -> value per level
  std::map<std::string, double> psi;               // tree key -> <Pi_0 tau, psi>
  std::map<std::string, double> jtilde0;           // generator key -> -(D^k K * Pi_0 tau)(0)
};

struct EnsemblePlan {
  std::uint64_t seed = 1;
  int count = 1000;        // total samples (antithetic pairs count as two)
  bool antithetic = true;
  int moll_level = 3;
  std::vector<int> phi_levels = {0};
  bool want_psi = false;
  bool want_jtilde = false;
  int jobs = 1;
};

// trees needed by the solves: basis, chain, and every contracted tree of an
// extraction of a negative tree
std::vector<TreePtr> trees_for_ensemble(const StructureSpec& spec);
// generator closure requested by character inversion over the basis
std::vector<JFactor> generators_for_ensemble(const StructureSpec& spec,
                                             const HopfAlgebra<double>& H);

std::vector<SampleValues> run_ensemble(const ModelFactory& factory, const SemigroupKernel& sk,
                                       const EnsemblePlan& plan,
                                       const Field* placed_psi = nullptr);

struct MomentStat {
  double mean = 0;
  double se = 0;
  int n = 0;
};
MomentStat mean_se(const std::vector<double>& xs);
// folds antithetic pairs (2i, 2i+1) into single observations first, so the
// standard error reflects the actual number of independent draws
MomentStat mean_se_paired(const std::vector<double>& xs, bool antithetic);

// --- centering solves ---------------------------------------------------------

// b-BPHZ: walk the negative trees in chain order; choose g(tau) so that the
// ensemble estimate of E[Pi-bar_0 tau(phi^{level})] is exactly zero, freezing
// lower-order values.  `level_index` indexes plan.phi_levels.
struct CharSolveReport {
  NegCharacter<double> character;
  std::vector<std::string> notes;  // conditioning / variance flags
};
CharSolveReport solve_bbphz(const StructureSpec& spec,
                            const std::vector<SampleValues>& samples, int level_index,
                            double se_flag_ratio = 0.0);

// BPHZ: center E[(Pi-hat_0 F-hat_0^{-1} tau)(psi)] = 0 for a fixed unit-mass
// psi, using the per-sample characters at the origin.
CharSolveReport solve_bphz(const StructureSpec& spec,
                           std::shared_ptr<const HopfAlgebra<double>> H,
                           const std::vector<SampleValues>& samples, double psi_mass);

// centered expectations of a renormalised model on fresh samples
std::map<std::string, MomentStat> centered_expectations(
    const StructureSpec& spec, const NegCharacter<double>& g,
    const std::vector<SampleValues>& samples, int level_index, bool antithetic = true);

// BPHZ-centered expectations E[(Pi-hat F-hat^{-1} tau)(psi)] on fresh samples
std::map<std::string, MomentStat> bphz_centered_expectations(
    const StructureSpec& spec, std::shared_ptr<const HopfAlgebra<double>> H,
    const NegCharacter<double>& g, const std::vector<SampleValues>& samples,
    bool antithetic = true);

// --- moment harness -------------------------------------------------------------

struct MomentFit {
  std::string tree;
  double p = 2;
  std::vector<int> levels;
  std::vector<double> log2_moments;
  std::vector<double> moment_se;
  double slope = 0;
  double slope_se = 0;
  double target = 0;   // -p * |tau|^{(shift)}
  bool pass = false;
};

// per-tree log2 regression of p-th moments of Pi-bar_0 tau(phi_0^n) vs n
std::vector<MomentFit> kolmogorov_harness(const StructureSpec& spec,
                                          const NegCharacter<double>& g,
                                          const std::vector<SampleValues>& samples,
                                          const std::vector<int>& levels,
                                          const std::vector<TreePtr>& trees, double p,
                                          int shift, double band);

// transports every cached statistic through M_g, producing the sample values
// of the renormalised model Pi o M_g (preparation for relative solves)
std::vector<SampleValues> transport_samples(const StructureSpec& spec,
                                            const NegCharacter<double>& g,
                                            const std::vector<SampleValues>& samples);

// renormalised pairing of one tree for one sample, at a phi level index
double renormalised_pairing(const StructureSpec& spec, const NegCharacter<double>& g,
                            const SampleValues& sv, const TreePtr& tau, int level_index);

}  // namespace rst
