#pragma once

#include "rst/mdist.hpp"

namespace rst {

// degree data of the pointed family attached to a tree
struct TreeDegrees {
  double alpha = 0;      // lowest non-polynomial degree in the smallest sector
  double gamma_tau = 0;  // alpha + |s|/2 - n_tau * kappa_bar
  double deg2 = 0;       // |tau| + |s|/2
};

TreeDegrees tree_degrees(const Model& model, const TreePtr& tau, double kappa_bar);

// structural test from the classification of trees with gamma_tau <= 0:
// tau = Xi_t . X^k . prod I(sigma_i) with |t| < -|s|/2
bool is_bad_tree(const Model& model, const TreePtr& tau);

struct HResult {
  ModelledField field;
  PointedSpec spec;
  bool has_candidate = false;
  Field candidate;  // candidate for the pointed reconstruction when gamma <= 0
};

// The recursive family of pointed modelled distributions describing the
// derivative of the model in a noise direction.  Memoized per tree.
class HFamily {
 public:
  HFamily(std::shared_ptr<const Model> model, const SemigroupKernel* sk, Direction eta,
          std::vector<double> base_point, double kappa_bar);

  const HResult& of(const TreePtr& tau);

  // reconstruction of H_tau (the candidate when gamma_tau <= 0), as a field
  Field reconstruction(const TreePtr& tau);

  const std::shared_ptr<const Model>& model() const { return model_; }

 private:
  HResult build(const TreePtr& tau);
  Field eta_level(const std::string& label);  // rho^n * eta_label

  std::shared_ptr<const Model> model_;
  const SemigroupKernel* sk_;
  Direction eta_;
  std::vector<double> x_;
  double kappa_bar_;
  std::map<std::string, HResult> memo_;
  std::map<std::string, Field> eta_smooth_;
};

// sup over random unit-H directions of the pointed norm of H_tau
struct HNormReport {
  std::string tree;
  double sup_norm = 0;
  std::vector<double> per_direction;
};
HNormReport h_norm_report(std::shared_ptr<const Model> model, const SemigroupKernel& sk,
                          const TreePtr& tau, const std::vector<double>& x, double kappa_bar,
                          int directions, std::uint64_t seed);

// finite-difference verification of the derivative identity
struct FdRow {
  double eps;
  double fd;       // [Pi^eps - Pi]/eps
  double rh;       // (R H)(psi)
  double discrepancy;
};
struct FdReport {
  std::string tree;
  std::vector<FdRow> rows;
  std::vector<double> ratios;  // discrepancy(eps) / discrepancy(eps/2)
  bool linear_exact = false;   // all discrepancies at the quadrature floor
};

FdReport frechet_fd_check(const ModelFactory& factory, const SemigroupKernel& sk,
                          std::uint64_t noise_seed, int moll_level,
                          const NegCharacter<double>& g, const TreePtr& tau,
                          const Direction& eta, const Field& placed_psi,
                          const std::vector<double>& eps_list, double kappa_bar);

}  // namespace rst
