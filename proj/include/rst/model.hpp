#pragma once

#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "rst/basis.hpp"
#include "rst/extraction.hpp"
#include "rst/kernel.hpp"
#include "rst/noise.hpp"
#include "rst/semigroup.hpp"

namespace rst {

// Pi_z tau represented in separated form: a sum of terms
//     coeff_field(z) * (w - z)^m * base_field(w),
// closed under pointwise products and kernel integration with recentering.
// This gives all base points at once through a handful of convolutions with
// compactly supported kernels x -> D^k K(x) (-x)^a.
struct ModelTerm {
  MultiIndex poly;   // exponent of (w - z)
  Field coeff;       // function of the base point z
  Field base;        // function of the evaluation point w
};

class ModelTermList {
 public:
  std::vector<ModelTerm> terms;

  // value field w -> value at base point z fixed: not materialized; instead:
  // diagonal evaluation (w = z): sum over terms with poly = 0 of coeff*base
  Field diagonal() const;
  // pairing field z -> <Pi_z tau, psi_z^lambda>: convolutions against the
  // placed test profile times (.)^m
  Field pair_centered(const TestFunction& psi, double lambda) const;
  Field pair_kernel(const Field& even_kernel) const;  // e.g. phi^n
  // explicit field w -> Pi_z tau(w) for one fixed z
  Field realise(const std::vector<double>& z) const;
  // single pairing <Pi_z tau, psi> for an arbitrary placed test field
  double pair_at(const std::vector<double>& z, const Field& placed) const;
};

// Kernel assignment: one singular kernel per kernel label.
struct KernelAssignment {
  std::map<std::string, std::shared_ptr<const SingularKernel>> kernels;

  const SingularKernel& of(const std::string& name) const { return *kernels.at(name); }
};

KernelAssignment standard_kernels(const GridPtr& grid, const LabelSet& labels,
                                  int annihilation_order = 1);

// Admissible model built from a smooth (mollified) noise realisation, with an
// optional renormalisation map applied symbol-by-symbol.  All evaluations are
// lazy and memoized per tree.
class Model {
 public:
  Model(StructureSpec structure, GridPtr grid, KernelAssignment kernels,
        std::shared_ptr<const Mollifier> mollifier, NoiseRealisation noise, int moll_level,
        std::optional<RenormMap<double>> renorm = std::nullopt);

  const StructureSpec& structure() const { return structure_; }
  const GridPtr& grid() const { return grid_; }
  int mollification_level() const { return moll_level_; }
  const NoiseRealisation& noise() const { return noise_; }
  const KernelAssignment& kernels() const { return kernels_; }
  const std::shared_ptr<const Mollifier>& mollifier() const { return mollifier_; }
  bool renormalised() const { return renorm_.has_value(); }
  const RenormMap<double>* renorm() const { return renorm_ ? &*renorm_ : nullptr; }

  // canonical-lift term list of a single tree symbol (pre-renormalisation)
  const ModelTermList& canonical(const TreePtr& tau) const;

  // Pi_z tau with the model's renormalisation applied (Pi o M_g)
  ModelTermList renormalised_terms(const TreePtr& tau) const;

  // pairing field z -> <Pi_z tau, phi_z^n> (renormalised)
  Field pair_field(const TreePtr& tau, const SemigroupKernel& sk, int level) const;
  // single pairing at a base point against an arbitrary placed test field
  double pair(const TreePtr& tau, const std::vector<double>& z, const Field& placed) const;

  // f_z character table as fields: z -> f_z(J_k tau); computed lazily
  const Field& fx_field(const JFactor& f) const;
  // the character f_x at one grid point
  Character<double> fx_at(const std::vector<double>& x) const;
  // Gamma_xy = F_x^{-1} F_y
  Character<double> gamma_xy(const std::vector<double>& x, const std::vector<double>& y) const;

  std::shared_ptr<const HopfAlgebra<double>> hopf() const { return hopf_; }

  // (D^k K_label * Pi_y tau)(y) as a field over y (renormalised terms)
  Field kernel_diag(LabelId label, const MultiIndex& k, const TreePtr& tau) const;

  // mollified noise field of a label
  const Field& smooth_noise(const std::string& label) const;

 private:
  ModelTermList compute_canonical(const TreePtr& tau) const;

  StructureSpec structure_;
  GridPtr grid_;
  KernelAssignment kernels_;
  std::shared_ptr<const Mollifier> mollifier_;
  NoiseRealisation noise_;
  int moll_level_;
  std::optional<RenormMap<double>> renorm_;
  std::shared_ptr<const HopfAlgebra<double>> hopf_;

  mutable std::map<std::string, Field> smooth_noise_;
  mutable std::map<std::string, ModelTermList> canon_memo_;
  mutable std::map<std::string, Field> fx_memo_;
};

// Builds the canonical lift (optionally renormalised) of a noise sample.
struct ModelFactory {
  StructureSpec structure;
  GridPtr grid;
  KernelAssignment kernels;
  std::shared_ptr<const Mollifier> mollifier;

  ModelFactory(StructureSpec s, GridPtr g, int kernel_annihilation = 1);

  Model lift(const NoiseRealisation& noise, int moll_level,
             std::optional<RenormMap<double>> renorm = std::nullopt) const;
  Model lift_seed(std::uint64_t seed, int moll_level, bool antithetic = false,
                  std::optional<RenormMap<double>> renorm = std::nullopt) const;
};

// Model norm report: empirical sup over probes of the two displayed bounds.
struct ModelNormReport {
  double pi_norm = 0;     // sup lambda^{-|tau|} |Pi_x tau(psi_x^lambda)| / basis
  double gamma_norm = 0;  // sup |Gamma_xy tau|_beta / |x-y|^{|tau|-beta}
};

ModelNormReport model_norms(const Model& model, double gamma_cut, const Region& region,
                            const std::vector<double>& lambdas, int probe_budget,
                            std::uint64_t seed);

}  // namespace rst
