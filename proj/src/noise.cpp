#include "rst/noise.hpp"

#include <cmath>

#include "rst/util.hpp"

namespace rst {

Field sample_noise_field(GridPtr grid, std::uint64_t seed, double reg) {
  Field f(grid);
  std::uint64_t state = seed;
  const double amp = 1.0 / std::sqrt(grid->cell_volume());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = amp * normal_sample(state);
  if (reg != 0.0) {
    f = spectral_filter(f, [reg](const std::vector<double>& omega) {
      double w2 = 1.0;
      for (double o : omega) w2 += o * o;
      return std::pow(w2, -reg / 2.0);
    });
  }
  return f;
}

NoiseRealisation sample_noise(GridPtr grid, const LabelSet& labels, std::uint64_t seed,
                              bool antithetic) {
  NoiseRealisation out;
  for (LabelId t : labels.noise_labels()) {
    const Label& lab = labels[t];
    std::uint64_t s = stream_seed(seed, fnv1a(lab.name));
    Field f = sample_noise_field(grid, s, lab.reg.to_double());
    if (antithetic) f *= -1.0;
    out.fields.emplace(lab.name, std::move(f));
  }
  return out;
}

double Direction::h_norm(const LabelSet& labels) const {
  double t = 0;
  for (LabelId id : labels.noise_labels()) {
    const Label& lab = labels[id];
    t += sobolev_norm(fields.at(lab.name), lab.reg.to_double());
  }
  return t;
}

Direction Direction::scaled(double c) const {
  Direction out;
  for (const auto& [name, f] : fields) out.fields.emplace(name, f * c);
  return out;
}

Direction sample_smooth_direction(GridPtr grid, const LabelSet& labels, std::uint64_t seed,
                                  int cutoff_level) {
  Direction out;
  const double cutoff = std::pow(2.0, cutoff_level) * 2.0 * M_PI / grid->len[0];
  for (LabelId t : labels.noise_labels()) {
    const Label& lab = labels[t];
    std::uint64_t s = stream_seed(seed, fnv1a("dir-" + lab.name));
    Field f = sample_noise_field(grid, s, 0.0);
    f = spectral_filter(f, [cutoff](const std::vector<double>& omega) {
      double w = 0;
      for (double o : omega) w += o * o;
      return std::exp(-w / (cutoff * cutoff));
    });
    out.fields.emplace(lab.name, std::move(f));
  }
  double n = out.h_norm(labels);
  return n > 0 ? out.scaled(1.0 / n) : out;
}

}  // namespace rst
