#pragma once

#include <map>
#include <string>

#include "rst/grid.hpp"
#include "rst/labels.hpp"

namespace rst {

// Stationary Gaussian noise per label.  reg = 0 samples lattice white noise
// (i.i.d. Gaussians scaled by cellvol^{-1/2}); reg != 0 shapes the spectrum by
// ((1+|omega|^2)^{1/2})^{-reg} per factor, so the pairing variance is the
// H^{-reg} norm of the test function and the spectral gap inequality holds
// with the H^{-reg} gradient norm.
Field sample_noise_field(GridPtr grid, std::uint64_t seed, double reg);

inline Field sample_white_noise_field(GridPtr grid, std::uint64_t seed) {
  return sample_noise_field(std::move(grid), seed, 0.0);
}

// One realisation of all noise labels.
struct NoiseRealisation {
  std::map<std::string, Field> fields;  // label name -> field

  const Field& of(const std::string& name) const { return fields.at(name); }
};

NoiseRealisation sample_noise(GridPtr grid, const LabelSet& labels, std::uint64_t seed,
                              bool antithetic = false);

// Smooth direction with finite H = prod_t H^{reg t} norm (l1 over labels).
struct Direction {
  std::map<std::string, Field> fields;

  double h_norm(const LabelSet& labels) const;
  Direction scaled(double c) const;
};

// random smooth unit-H direction: low-pass filtered Gaussian, normalized
Direction sample_smooth_direction(GridPtr grid, const LabelSet& labels, std::uint64_t seed,
                                  int cutoff_level = 3);

}  // namespace rst
