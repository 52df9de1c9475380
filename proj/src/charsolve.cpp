#include "rst/charsolve.hpp"

#include <cmath>
#include <thread>

#include "rst/util.hpp"

namespace rst {

namespace {

using ExtractionTable = std::map<std::string, std::vector<ExtractionTerm>>;

// extraction terms per tree with zero-symbol contractions dropped
ExtractionTable build_extraction_table(const StructureSpec& spec,
                                       const std::vector<TreePtr>& trees) {
  ExtractionTable table;
  auto negatives = spec.negative_keys();
  for (const auto& tau : trees) {
    if (table.count(tau->key())) continue;
    std::vector<ExtractionTerm> kept;
    for (auto& term : extraction_coproduct(tau, negatives))
      if (!tree_is_zero_symbol(term.contracted)) kept.push_back(std::move(term));
    table.emplace(tau->key(), std::move(kept));
  }
  return table;
}

bool is_full_extraction(const ExtractionTerm& term, const std::string& tau_key) {
  return term.extracted.components.size() == 1 &&
         term.extracted.components[0]->key() == tau_key && term.contracted->is_polynomial();
}

Field reflect(const Field& f) {
  const Grid& g = *f.grid();
  Field out(f.grid());
  for (std::size_t i = 0; i < f.size(); ++i) {
    auto ix = g.unflat(i);
    std::vector<int> neg(g.d);
    for (std::size_t a = 0; a < g.d; ++a) neg[a] = -ix[a];
    out[g.flat(neg)] = f[i];
  }
  return out;
}

std::vector<TreePtr> negatives_in_chain_order(const StructureSpec& spec) {
  std::vector<TreePtr> negs = spec.negatives;
  std::sort(negs.begin(), negs.end(), [](const TreePtr& a, const TreePtr& b) {
    if (a->noise_count() != b->noise_count()) return a->noise_count() < b->noise_count();
    if (a->degree() != b->degree()) return a->degree() < b->degree();
    return a->key() < b->key();
  });
  return negs;
}

double transported_value(const ExtractionTable& table, const NegCharacter<double>& g,
                         const std::string& tau_key,
                         const std::map<std::string, double>& base_values) {
  double v = 0;
  for (const auto& term : table.at(tau_key)) {
    double w = g.on_forest(term.extracted);
    if (w == 0.0) continue;
    auto it = base_values.find(term.contracted->key());
    if (it == base_values.end())
      throw std::runtime_error("transported_value: missing tree " + term.contracted->key());
    v += w * it->second;
  }
  return v;
}

// per-sample character of the renormalised model at the origin (x = 0, where
// the Jtilde -> J conversion is trivial)
Character<double> sample_fx0(const ContextPtr& ctx, const ExtractionTable& table,
                             const NegCharacter<double>& g, const SampleValues& sv) {
  auto jfn = [ctx, &table, g, &sv](const JFactor& f) {
    if (ctx->labels[f.label].kind == LabelKind::Noise) return sv.jtilde0.at(f.key_string());
    double v = 0;
    for (const auto& term : table.at(f.tree->key())) {
      double w = g.on_forest(term.extracted);
      if (w == 0.0) continue;
      JFactor raw{f.label, f.k, term.contracted};
      auto it = sv.jtilde0.find(raw.key_string());
      if (it == sv.jtilde0.end()) {
        if (term.contracted->is_polynomial()) continue;  // J of polynomials vanishes
        throw std::runtime_error("sample_fx0: missing generator " + raw.key_string());
      }
      v += w * it->second;
    }
    return v;
  };
  return Character<double>([](std::size_t) { return 0.0; }, jfn);
}

}  // namespace

std::vector<TreePtr> trees_for_ensemble(const StructureSpec& spec) {
  std::map<std::string, TreePtr> pool;
  for (const auto& t : spec.basis) pool.emplace(t->key(), t);
  for (const auto& t : spec.chain) pool.emplace(t->key(), t);
  auto negatives = spec.negative_keys();
  for (const auto& tau : spec.negatives) {
    for (const auto& term : extraction_coproduct(tau, negatives))
      if (!tree_is_zero_symbol(term.contracted))
        pool.emplace(term.contracted->key(), term.contracted);
  }
  std::vector<TreePtr> out;
  for (auto& [k, t] : pool) out.push_back(t);
  return out;
}

std::vector<JFactor> generators_for_ensemble(const StructureSpec& spec,
                                             const HopfAlgebra<double>& H) {
  auto recorder = std::make_shared<std::map<std::string, JFactor>>();
  std::function<void(const JFactor&)> request = [&](const JFactor& f) {
    if (recorder->count(f.key_string())) return;
    recorder->emplace(f.key_string(), f);
    H.delta_plus_gen(f).for_each([&](const TPlusTensorKey& key, const double&) {
      for (const auto& g : key.left.factors()) request(g);
      for (const auto& g : key.right.factors()) request(g);
    });
  };
  for (const auto& tau : spec.basis) {
    H.delta(tau).for_each([&](const TensorKey& key, const double&) {
      for (const auto& g : key.right.factors()) request(g);
    });
  }
  // the extraction transport also evaluates generators on contracted trees
  auto extra = trees_for_ensemble(spec);
  std::vector<JFactor> base;
  for (auto& [k, f] : *recorder) base.push_back(f);
  for (const auto& f : base) {
    for (const auto& t : extra) {
      if (t->is_polynomial()) continue;
      JFactor g{f.label, f.k, t};
      if (!recorder->count(g.key_string()) && g.degree().is_positive())
        recorder->emplace(g.key_string(), g);
    }
  }
  std::vector<JFactor> out;
  for (auto& [k, f] : *recorder) out.push_back(f);
  return out;
}

std::vector<SampleValues> run_ensemble(const ModelFactory& factory, const SemigroupKernel& sk,
                                       const EnsemblePlan& plan, const Field* placed_psi) {
  const StructureSpec& spec = factory.structure;
  auto trees = trees_for_ensemble(spec);
  auto H = std::make_shared<HopfAlgebra<double>>(spec.context());
  std::vector<JFactor> gens;
  if (plan.want_jtilde) gens = generators_for_ensemble(spec, *H);

  // reflected kernel fields used by the jtilde pairings
  std::map<std::string, Field> refl_kernels;
  if (plan.want_jtilde) {
    for (const auto& gen : gens) {
      const auto& ctx = spec.context();
      if (ctx->labels[gen.label].kind == LabelKind::Noise) continue;
      std::string key = ctx->labels[gen.label].name + "|" + gen.k.str();
      if (!refl_kernels.count(key))
        refl_kernels.emplace(key, reflect(factory.kernels.of(ctx->labels[gen.label].name)
                                              .total(gen.k)));
    }
  }

  std::vector<SampleValues> out(std::size_t(plan.count));
  auto worker = [&](int lo, int hi) {
    for (int i = lo; i < hi; ++i) {
      std::uint64_t s = stream_seed(plan.seed, std::uint64_t(plan.antithetic ? i / 2 : i));
      bool anti = plan.antithetic && (i % 2 == 1);
      Model m = factory.lift_seed(s, plan.moll_level, anti);
      std::vector<double> origin(m.grid()->d, 0.0);
      SampleValues sv;
      for (const auto& tau : trees) {
        std::vector<double> vals;
        vals.reserve(plan.phi_levels.size());
        for (int lvl : plan.phi_levels) vals.push_back(m.canonical(tau).pair_at(origin, sk.phi(lvl)));
        sv.phi.emplace(tau->key(), std::move(vals));
        if (placed_psi)
          sv.psi.emplace(tau->key(), m.canonical(tau).pair_at(origin, *placed_psi));
      }
      for (const auto& gen : gens) {
        const auto& ctx = spec.context();
        double v;
        if (ctx->labels[gen.label].kind == LabelKind::Noise) {
          Field dk = gen.k.is_zero()
                         ? m.smooth_noise(ctx->labels[gen.label].name)
                         : convolve(m.mollifier()->deriv_level(m.mollification_level(), gen.k),
                                    m.noise().of(ctx->labels[gen.label].name));
          v = -dk[0];
        } else {
          const std::string key = ctx->labels[gen.label].name + "|" + gen.k.str();
          v = -m.canonical(gen.tree).pair_at(origin, refl_kernels.at(key));
        }
        sv.jtilde0.emplace(gen.key_string(), v);
      }
      out[std::size_t(i)] = std::move(sv);
    }
  };
  int jobs = std::max(1, plan.jobs);
  if (jobs == 1) {
    worker(0, plan.count);
  } else {
    std::vector<std::thread> pool;
    int chunk = (plan.count + jobs - 1) / jobs;
    for (int j = 0; j < jobs; ++j) {
      int lo = j * chunk, hi = std::min(plan.count, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back(worker, lo, hi);
    }
    for (auto& t : pool) t.join();
  }
  return out;
}

MomentStat mean_se(const std::vector<double>& xs) {
  MomentStat st;
  st.n = int(xs.size());
  if (xs.empty()) return st;
  double s = 0;
  for (double x : xs) s += x;
  st.mean = s / double(xs.size());
  double v = 0;
  for (double x : xs) v += (x - st.mean) * (x - st.mean);
  if (xs.size() > 1) st.se = std::sqrt(v / double(xs.size() - 1) / double(xs.size()));
  return st;
}

MomentStat mean_se_paired(const std::vector<double>& xs, bool antithetic) {
  if (!antithetic || xs.size() < 2) return mean_se(xs);
  std::vector<double> folded(xs.size() / 2);
  for (std::size_t i = 0; i < folded.size(); ++i) folded[i] = 0.5 * (xs[2 * i] + xs[2 * i + 1]);
  return mean_se(folded);
}

double renormalised_pairing(const StructureSpec& spec, const NegCharacter<double>& g,
                            const SampleValues& sv, const TreePtr& tau, int level_index) {
  static thread_local std::map<const StructureSpec*, ExtractionTable> cache;
  auto& table = cache[&spec];
  if (!table.count(tau->key())) {
    auto negatives = spec.negative_keys();
    std::vector<ExtractionTerm> kept;
    for (auto& term : extraction_coproduct(tau, negatives))
      if (!tree_is_zero_symbol(term.contracted)) kept.push_back(std::move(term));
    table.emplace(tau->key(), std::move(kept));
  }
  double v = 0;
  for (const auto& term : table.at(tau->key())) {
    double w = g.on_forest(term.extracted);
    if (w == 0.0) continue;
    v += w * sv.phi.at(term.contracted->key()).at(std::size_t(level_index));
  }
  return v;
}

CharSolveReport solve_bbphz(const StructureSpec& spec,
                            const std::vector<SampleValues>& samples, int level_index,
                            double se_flag_ratio) {
  CharSolveReport rep;
  auto negs = negatives_in_chain_order(spec);
  ExtractionTable table = build_extraction_table(spec, negs);

  for (const auto& tau : negs) {
    double denom = 0;
    bool have_full = false;
    std::vector<double> known_vals(samples.size(), 0.0);
    for (const auto& term : table.at(tau->key())) {
      if (is_full_extraction(term, tau->key())) {
        have_full = true;
        denom = samples.empty()
                    ? 0.0
                    : samples[0].phi.at(term.contracted->key())[std::size_t(level_index)];
        continue;
      }
      double w = rep.character.on_forest(term.extracted);
      if (w == 0.0) continue;
      for (std::size_t i = 0; i < samples.size(); ++i)
        known_vals[i] += w * samples[i].phi.at(term.contracted->key())[std::size_t(level_index)];
    }
    if (!have_full) {
      rep.notes.push_back("tree " + tau->key() + ": no full extraction available");
      continue;
    }
    if (std::fabs(denom) < 1e-9) {
      rep.notes.push_back("tree " + tau->key() + ": degenerate centering denominator");
      continue;
    }
    MomentStat st = mean_se(known_vals);
    double value = -st.mean / denom;
    if (se_flag_ratio > 0 && st.se > 0 &&
        std::fabs(value) < se_flag_ratio * st.se / std::fabs(denom))
      rep.notes.push_back("tree " + tau->key() + ": estimator variance dominates the solve");
    rep.character.set(tau, value);
  }
  return rep;
}

std::map<std::string, MomentStat> centered_expectations(
    const StructureSpec& spec, const NegCharacter<double>& g,
    const std::vector<SampleValues>& samples, int level_index, bool antithetic) {
  std::map<std::string, MomentStat> out;
  for (const auto& tau : spec.negatives) {
    std::vector<double> vals(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i)
      vals[i] = renormalised_pairing(spec, g, samples[i], tau, level_index);
    out.emplace(tau->key(), mean_se_paired(vals, antithetic));
  }
  return out;
}

std::vector<SampleValues> transport_samples(const StructureSpec& spec,
                                            const NegCharacter<double>& g,
                                            const std::vector<SampleValues>& samples) {
  auto all = trees_for_ensemble(spec);
  ExtractionTable table = build_extraction_table(spec, all);
  const auto& ctx = spec.context();
  std::vector<SampleValues> out(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const SampleValues& sv = samples[i];
    SampleValues t;
    for (const auto& [key, vals] : sv.phi) {
      auto it = table.find(key);
      if (it == table.end()) {
        t.phi.emplace(key, vals);
        continue;
      }
      std::vector<double> tv(vals.size(), 0.0);
      for (const auto& term : it->second) {
        double w = g.on_forest(term.extracted);
        if (w == 0.0) continue;
        const auto& src = sv.phi.at(term.contracted->key());
        for (std::size_t li = 0; li < tv.size(); ++li) tv[li] += w * src[li];
      }
      t.phi.emplace(key, std::move(tv));
    }
    for (const auto& [key, v] : sv.psi) {
      auto it = table.find(key);
      if (it == table.end()) {
        t.psi.emplace(key, v);
        continue;
      }
      double tv = 0;
      for (const auto& term : it->second) {
        double w = g.on_forest(term.extracted);
        if (w == 0.0) continue;
        tv += w * sv.psi.at(term.contracted->key());
      }
      t.psi.emplace(key, tv);
    }
    for (const auto& [key, v] : sv.jtilde0) t.jtilde0.emplace(key, v);
    out[i] = std::move(t);
  }
  // recompute transported jtilde values from the raw ones
  std::map<std::string, JFactor> gens;
  {
    HopfAlgebra<double> H(ctx);
    for (const auto& f : generators_for_ensemble(spec, H)) gens.emplace(f.key_string(), f);
  }
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const SampleValues& sv = samples[i];
    if (sv.jtilde0.empty()) continue;
    for (const auto& [key, gen] : gens) {
      if (!sv.jtilde0.count(key)) continue;
      if (ctx->labels[gen.label].kind == LabelKind::Noise) continue;
      auto it = table.find(gen.tree->key());
      if (it == table.end()) continue;
      double tv = 0;
      for (const auto& term : it->second) {
        double w = g.on_forest(term.extracted);
        if (w == 0.0) continue;
        if (term.contracted->is_polynomial()) continue;
        JFactor raw{gen.label, gen.k, term.contracted};
        auto jt = sv.jtilde0.find(raw.key_string());
        if (jt == sv.jtilde0.end())
          throw std::runtime_error("transport_samples: missing generator " + raw.key_string());
        tv += w * jt->second;
      }
      out[i].jtilde0[key] = tv;
    }
  }
  return out;
}

CharSolveReport solve_bphz(const StructureSpec& spec,
                           std::shared_ptr<const HopfAlgebra<double>> H,
                           const std::vector<SampleValues>& samples, double psi_mass) {
  CharSolveReport rep;
  auto negs = negatives_in_chain_order(spec);
  auto all = trees_for_ensemble(spec);
  ExtractionTable table = build_extraction_table(spec, all);

  for (const auto& tau : negs) {
    bool have_full = false;
    for (const auto& term : table.at(tau->key()))
      if (is_full_extraction(term, tau->key())) have_full = true;
    if (!have_full) {
      rep.notes.push_back("tree " + tau->key() + ": no full extraction available");
      continue;
    }
    std::vector<double> vals(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const SampleValues& sv = samples[i];
      Character<double> fx0 = sample_fx0(spec.context(), table, rep.character, sv);
      Character<double> inv = invert_character(H, fx0);
      double v = 0;
      gamma_of_character(*H, inv, tau).for_each([&](const TreeKey& k, const double& c) {
        v += c * transported_value(table, rep.character, k.tree->key(), sv.psi);
      });
      vals[i] = v;
    }
    MomentStat st = mean_se(vals);
    rep.character.set(tau, -st.mean / psi_mass);
  }
  return rep;
}

std::map<std::string, MomentStat> bphz_centered_expectations(
    const StructureSpec& spec, std::shared_ptr<const HopfAlgebra<double>> H,
    const NegCharacter<double>& g, const std::vector<SampleValues>& samples,
    bool antithetic) {
  std::map<std::string, MomentStat> out;
  auto all = trees_for_ensemble(spec);
  ExtractionTable table = build_extraction_table(spec, all);
  for (const auto& tau : spec.negatives) {
    std::vector<double> vals(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const SampleValues& sv = samples[i];
      Character<double> fx0 = sample_fx0(spec.context(), table, g, sv);
      Character<double> inv = invert_character(H, fx0);
      double v = 0;
      gamma_of_character(*H, inv, tau).for_each([&](const TreeKey& k, const double& c) {
        v += c * transported_value(table, g, k.tree->key(), sv.psi);
      });
      vals[i] = v;
    }
    out.emplace(tau->key(), mean_se_paired(vals, antithetic));
  }
  return out;
}

std::vector<MomentFit> kolmogorov_harness(const StructureSpec& spec,
                                          const NegCharacter<double>& g,
                                          const std::vector<SampleValues>& samples,
                                          const std::vector<int>& levels,
                                          const std::vector<TreePtr>& trees, double p,
                                          int shift, double band) {
  if (levels.size() < 4)
    throw std::invalid_argument("kolmogorov_harness: fewer than 4 levels resolved");
  std::vector<MomentFit> out;
  for (const auto& tau : trees) {
    MomentFit fit;
    fit.tree = tau->key();
    fit.p = p;
    fit.levels = levels;
    std::vector<double> xs, ys;
    for (std::size_t li = 0; li < levels.size(); ++li) {
      std::vector<double> vals(samples.size());
      for (std::size_t i = 0; i < samples.size(); ++i) {
        double v = renormalised_pairing(spec, g, samples[i], tau, int(li));
        vals[i] = std::pow(std::fabs(v), p);
      }
      MomentStat st = mean_se(vals);
      fit.log2_moments.push_back(std::log2(std::max(st.mean, 1e-300)));
      fit.moment_se.push_back(st.se);
      xs.push_back(double(levels[li]));
      ys.push_back(fit.log2_moments.back());
    }
    LineFit lf = fit_line(xs, ys);
    fit.slope = lf.slope;
    fit.slope_se = lf.slope_se;
    fit.target = -p * tau->degree(shift, spec.rule.kappa).to_double();
    fit.pass = std::fabs(fit.slope - fit.target) <= band;
    out.push_back(std::move(fit));
  }
  return out;
}

}  // namespace rst
