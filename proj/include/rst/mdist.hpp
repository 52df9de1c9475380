#pragma once

#include <memory>
#include <optional>

#include "rst/charsolve.hpp"
#include "rst/model.hpp"

namespace rst {

// Modelled distribution: grid map x -> coefficients over trees of degree < gamma.
// Coefficients are stored per tree key; trees need not belong to the generated
// basis (pointed integration plants new symbols), only to the evaluator's
// closure.
class ModelledField {
 public:
  ModelledField() = default;
  ModelledField(std::shared_ptr<const Model> model, double gamma)
      : model_(std::move(model)), gamma_(gamma) {}

  const std::shared_ptr<const Model>& model() const { return model_; }
  double gamma() const { return gamma_; }

  void set(const TreePtr& tau, Field coeff);
  void add(const TreePtr& tau, const Field& coeff, double scale = 1.0);
  const Field* coeff(const std::string& key) const;
  const std::map<std::string, std::pair<TreePtr, Field>>& coeffs() const { return coeffs_; }
  bool empty() const { return coeffs_.empty(); }

  // drops components of degree >= bound (the projection Q_{<bound})
  ModelledField projected(double bound) const;
  ModelledField operator*(double c) const;
  ModelledField operator+(const ModelledField& o) const;
  ModelledField operator-(const ModelledField& o) const;

  // distinct component degrees, ascending
  std::vector<double> degrees() const;
  // l^2 over components of one degree, pointwise
  Field component_norm(double zeta) const;

 private:
  std::shared_ptr<const Model> model_;
  double gamma_ = 0;
  std::map<std::string, std::pair<TreePtr, Field>> coeffs_;
};

// f(y) = Gamma_{y x} tau as a modelled field (coefficients are fields in y)
ModelledField gamma_lift(std::shared_ptr<const Model> model, const TreePtr& tau,
                         const std::vector<double>& x, double gamma);

// Taylor lift of a smooth grid function to order < gamma (polynomial sector)
ModelledField taylor_lift(std::shared_ptr<const Model> model, const Field& g, double gamma);

// --- norms ---------------------------------------------------------------------

struct MdNorm {
  double local = 0;
  double translation = 0;
};

// Besov modelled-distribution seminorm pair; the h-integral is discretized
// over dyadic shells |h|_s in [2^{-m-1}, 2^{-m}) with shell-uniform offsets.
MdNorm md_norm(const ModelledField& f, double p, double q, const Region& region,
               int shell_lo, int shell_hi);

struct PointedSpec {
  double gamma = 0;
  double nu = 0;
  std::vector<double> x;
  double p = 2;
};

double pointed_norm(const ModelledField& f, const PointedSpec& spec, int level_lo, int level_hi);

// --- reconstruction --------------------------------------------------------------

// R f at the finest usable level: the field y -> Pi_y f(y)(phi_y^N)
Field reconstruct(const ModelledField& f, const SemigroupKernel& sk, int level);
// smooth-model limit of the reconstruction: y -> Pi_y f(y)(y)
Field reconstruct_pointwise(const ModelledField& f);
// convenience pairing <R f, psi>
double pair_distribution(const Field& rf, const Field& placed_psi);

struct CandidateReport {
  double constant = 0;                // max over levels of the scaled bound
  std::vector<double> per_level;      // scaled constants per level
  bool growing = false;               // flagged when the constants grow with level
};

// measures || sup_eta <zeta - Pi_x f(x), eta_x^lambda> ||_{L^p} / lambda^gamma
CandidateReport candidate_check(const ModelledField& f, double gamma, const Field& zeta,
                                const std::vector<TestFunction>& probes, double p,
                                const Region& region, int level_lo, int level_hi);

// --- pointed operations ----------------------------------------------------------

// Q_{<gamma}(f1 * f2) with gamma = min(gamma1 + alpha2, gamma2 + alpha1)
ModelledField pointed_multiply(const ModelledField& f1, const ModelledField& f2);

// f . chi_lambda(. - x) with the Taylor lift of the rescaled plateau
ModelledField localize(const ModelledField& f, double lambda, const std::vector<double>& x,
                       int jet_order);

// Pointed abstract integration K_{gamma,nu}^{x,p} f = I f + J f + N_gamma f - T^x f.
// `rf` is the reconstruction (or the supplied candidate when gamma <= 0).
ModelledField pointed_schauder(const ModelledField& f, const std::string& kernel_label,
                               const PointedSpec& spec, const Field& rf);

// abstract gradient D^k on the sector spanned by polynomials and planted
// trees: X^j -> j!/(j-k)! X^{j-k}, I_m(sigma) -> I_{m+k}(sigma)
ModelledField abstract_gradient(const ModelledField& f, const MultiIndex& k);

// sup over coefficient directions of the B^{-kappa}_{p,p} norm
double sobolev_coeff_norm(const ModelledField& f, const SemigroupKernel& sk, double kappa,
                          double p, const Region& region, int level_hi);

}  // namespace rst
