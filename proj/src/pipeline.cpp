#include "rst/pipeline.hpp"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rst/util.hpp"

namespace rst {

namespace {

std::vector<TreePtr> negatives_in_chain_order(const StructureSpec& spec) {
  std::vector<TreePtr> negs = spec.negatives;
  std::sort(negs.begin(), negs.end(), [](const TreePtr& a, const TreePtr& b) {
    if (a->noise_count() != b->noise_count()) return a->noise_count() < b->noise_count();
    if (a->degree() != b->degree()) return a->degree() < b->degree();
    return a->key() < b->key();
  });
  return negs;
}

struct SuiteContext {
  GridPtr grid;
  std::shared_ptr<ModelFactory> factory;
  std::shared_ptr<SemigroupKernel> sk;
};

SuiteContext make_suite(const ExperimentPlan& plan, const StructureSpec& spec) {
  SuiteContext ctx;
  ctx.grid = Grid::make(spec.context()->scaling, plan.grid_points);
  ctx.factory = std::make_shared<ModelFactory>(spec, ctx.grid);
  ctx.sk = std::make_shared<SemigroupKernel>(ctx.grid, 2);
  return ctx;
}

}  // namespace

UniformReport run_uniform_bounds(const ExperimentPlan& plan, const StructureSpec& spec) {
  UniformReport rep;
  SuiteContext suite = make_suite(plan, spec);

  // shift budget: use N - j with N from the rule file constants
  const int N = spec.rule.shift_budget;

  // ensembles and solved characters per mollification level
  std::map<int, std::vector<SampleValues>> banks;
  for (std::size_t mi = 0; mi < plan.moll_levels.size(); ++mi) {
    int m = plan.moll_levels[mi];
    EnsemblePlan ep;
    ep.seed = stream_seed(plan.seed, 1000 + std::uint64_t(m));
    ep.count = plan.samples;
    ep.moll_level = m;
    ep.phi_levels.clear();
    ep.phi_levels.push_back(plan.center_level);
    for (int lvl : plan.phi_levels) ep.phi_levels.push_back(lvl);
    ep.jobs = plan.jobs;
    banks[m] = run_ensemble(*suite.factory, *suite.sk, ep);
    rep.characters[m] = solve_bbphz(spec, banks[m], 0).character;
  }

  // one sample model per mollification for the positive-degree route
  std::map<int, std::shared_ptr<Model>> probes;
  for (int m : plan.moll_levels)
    probes[m] = std::make_shared<Model>(suite.factory->lift_seed(
        stream_seed(plan.seed, 5000 + std::uint64_t(m)), m, false,
        RenormMap<double>(rep.characters[m], spec.negative_keys())));

  bool chain_alive = true;
  rep.pass = true;
  for (std::size_t j = 0; j < spec.chain.size(); ++j) {
    const TreePtr& tau = spec.chain[j];
    ChainStepReport step;
    step.tree = tau->key();
    step.chain_index = int(j) + 1;
    step.negative = tau->degree().is_negative();
    step.aborted = !chain_alive;
    if (step.aborted) {
      rep.steps.push_back(std::move(step));
      continue;
    }

    if (step.negative) {
      std::vector<double> intercepts;
      bool all_pass = true;
      for (int m : plan.moll_levels) {
        // drop the centering level (index 0) from the regression values
        std::vector<SampleValues> view;
        view.reserve(banks[m].size());
        for (const auto& sv : banks[m]) {
          SampleValues s;
          for (const auto& [k, v] : sv.phi)
            s.phi.emplace(k, std::vector<double>(v.begin() + 1, v.end()));
          view.push_back(std::move(s));
        }
        auto fits = kolmogorov_harness(spec, rep.characters[m], view, plan.phi_levels, {tau},
                                       plan.p, N - int(j) - 1, plan.slope_band);
        step.fits.push_back(fits[0]);
        all_pass = all_pass && fits[0].pass;
        // uniform-bound constant: the level curve normalized by the pinned
        // target exponent, maximized over levels
        double c_m = -1e300;
        for (std::size_t li = 0; li < plan.phi_levels.size(); ++li)
          c_m = std::max(c_m, fits[0].log2_moments[li] -
                                  fits[0].target * double(plan.phi_levels[li]));
        intercepts.push_back(c_m);
      }
      double lo = 1e300, hi = -1e300;
      for (double v : intercepts) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      step.constant_spread = hi - lo;
      // the slope test gates the induction; the constant spread is reported
      // against its own band (the approach to the fixed-lattice limit)
      step.pass = all_pass && step.constant_spread <= plan.uniformity_band;
      if (!all_pass) chain_alive = false;
    } else {
      // positive degree: the recentering route; measure the Gamma-coefficient
      // constant over probe pairs on each mollification's model
      double worst = 0;
      for (int m : plan.moll_levels) {
        const auto& model = probes[m];
        auto& H = *model->hopf();
        std::uint64_t state = stream_seed(plan.seed, 7000 + std::uint64_t(m));
        for (int t = 0; t < 12; ++t) {
          int span = plan.grid_points / 4;
          std::vector<double> x{model->grid()->h(0) *
                                double(plan.grid_points / 8 + splitmix64(state) % std::uint64_t(span))};
          std::vector<double> y{model->grid()->h(0) *
                                double(plan.grid_points / 8 + splitmix64(state) % std::uint64_t(span))};
          double dist = model->grid()->snorm(model->grid()->displacement(x, y));
          if (dist <= 0) continue;
          Character<double> gxy = model->gamma_xy(x, y);
          gamma_of_character(H, gxy, tau).for_each([&](const TreeKey& k, const double& c) {
            if (k.tree->key() == tau->key()) return;
            double beta = k.tree->degree().to_double();
            worst = std::max(worst,
                             std::fabs(c) / std::pow(dist, tau->degree().to_double() - beta));
          });
        }
      }
      step.gamma_route_constant = worst;
      step.pass = std::isfinite(worst);
      if (!step.pass) chain_alive = false;
    }
    rep.pass = rep.pass && step.pass;
    rep.steps.push_back(std::move(step));
  }
  std::ostringstream os;
  os << "uniform-bounds: " << (rep.pass ? "pass" : "FAIL") << " over " << rep.steps.size()
     << " chain steps";
  rep.summary = os.str();
  return rep;
}

ConvergenceReport run_convergence(const ExperimentPlan& plan, const StructureSpec& spec) {
  ConvergenceReport rep;
  SuiteContext suite = make_suite(plan, spec);
  const int N = spec.rule.shift_budget;

  // mollification-rate gate
  {
    Mollifier moll(suite.grid, 2);
    double worst = 0;
    for (int i = 0; i < plan.moll_rate_probes; ++i) {
      Field f = sample_white_noise_field(suite.grid, stream_seed(plan.seed, 40 + std::uint64_t(i)));
      f *= 1.0 / f.l2_norm();
      for (int n = 1; n <= std::min(4, moll.max_level()); ++n) {
        double err = sobolev_norm(f - moll.apply(f, n), -plan.moll_rate_kappa);
        worst = std::max(worst, err / std::pow(2.0, -n * plan.moll_rate_kappa / 2.0));
      }
    }
    rep.gate_worst = worst;
    rep.gate_pass = worst <= plan.moll_rate_constant;
  }

  // coupled ensembles across mollification levels: same seeds
  std::vector<int> levels = plan.conv_coarse;
  levels.push_back(plan.conv_fine);
  std::map<int, std::vector<SampleValues>> banks;
  std::map<int, NegCharacter<double>> chars;
  for (int m : levels) {
    EnsemblePlan ep;
    ep.seed = stream_seed(plan.seed, 2000);  // common seeds: coupled differences
    ep.count = plan.samples;
    ep.moll_level = m;
    ep.phi_levels.clear();
    ep.phi_levels.push_back(plan.center_level);
    for (int lvl : plan.phi_levels) ep.phi_levels.push_back(lvl);
    ep.jobs = plan.jobs;
    banks[m] = run_ensemble(*suite.factory, *suite.sk, ep);
    chars[m] = solve_bbphz(spec, banks[m], 0).character;
  }

  rep.pass = rep.gate_pass;
  for (const auto& tau : negatives_in_chain_order(spec)) {
    ConvergenceRow row;
    row.tree = tau->key();
    row.coarse_levels = plan.conv_coarse;
    std::size_t jpos = spec.chain_position(tau);
    double shifted_deg = tau->degree(N - int(jpos), spec.rule.kappa).to_double();
    std::vector<double> xs;
    for (int n2 : plan.conv_coarse) {
      double weighted = 0;
      for (std::size_t li = 0; li < plan.phi_levels.size(); ++li) {
        std::vector<double> diffs(banks[n2].size());
        for (std::size_t i = 0; i < diffs.size(); ++i) {
          double a = renormalised_pairing(spec, chars[plan.conv_fine], banks[plan.conv_fine][i],
                                          tau, int(li) + 1);
          double b = renormalised_pairing(spec, chars[n2], banks[n2][i], tau, int(li) + 1);
          diffs[i] = std::pow(std::fabs(a - b), plan.p);
        }
        MomentStat st = mean_se(diffs);
        double w = std::pow(2.0, plan.p * plan.phi_levels[li] * shifted_deg);
        weighted = std::max(weighted, w * st.mean);
      }
      row.log2_weighted_diff.push_back(std::log2(std::max(weighted, 1e-300)));
      xs.push_back(double(n2));
    }
    if (plan.conv_coarse.size() >= 2) {
      LineFit lf = fit_line(xs, row.log2_weighted_diff);
      row.theta = -lf.slope / plan.p;
      row.theta_se = lf.slope_se / plan.p;
      double sep = row.theta_se > 0 ? row.theta / row.theta_se : (row.theta > 0 ? 1e9 : 0.0);
      row.pass = row.theta > 0 && sep >= 2.0;
    }
    rep.pass = rep.pass && row.pass;
    rep.rows.push_back(std::move(row));
  }
  std::ostringstream os;
  os << "convergence: gate " << (rep.gate_pass ? "pass" : "FAIL") << " (worst "
     << format_double(rep.gate_worst) << "), theta fits "
     << (rep.pass ? "pass" : "FAIL");
  rep.summary = os.str();
  return rep;
}

TransferReport transfer_bphz(const ExperimentPlan& plan, const StructureSpec& spec) {
  TransferReport rep;
  SuiteContext suite = make_suite(plan, spec);
  auto H = std::make_shared<HopfAlgebra<double>>(spec.context());

  // fixed unit-mass psi
  TestFunction psi = TestFunction::bump_profile(suite.grid, 2);
  Field placed = psi.place(std::vector<double>(suite.grid->d, 0.0), 0.25);
  placed *= 1.0 / placed.integral();

  std::vector<int> levels = plan.conv_coarse;
  levels.insert(levels.begin(), plan.conv_coarse.front() - 1);
  rep.levels = levels;

  // the transfer character is relative: it recentres the already-renormalised
  // model, so it stays bounded as the mollification is removed
  std::map<int, NegCharacter<double>> chars;
  std::map<int, NegCharacter<double>> base_chars;
  for (int m : levels) {
    EnsemblePlan ep;
    ep.seed = stream_seed(plan.seed, 3000);  // coupled across levels
    ep.count = plan.samples;
    ep.moll_level = m;
    ep.phi_levels = {plan.center_level};
    ep.want_psi = true;
    ep.want_jtilde = true;
    ep.jobs = plan.jobs;
    auto bank = run_ensemble(*suite.factory, *suite.sk, ep, &placed);
    base_chars[m] = solve_bbphz(spec, bank, 0).character;
    auto transported = transport_samples(spec, base_chars[m], bank);
    chars[m] = solve_bphz(spec, H, transported, 1.0).character;
  }

  rep.pass = true;
  for (const auto& tau : negatives_in_chain_order(spec)) {
    TransferRow row;
    row.tree = tau->key();
    for (int m : levels) row.char_values.push_back(chars[m].on_tree(tau));
    for (std::size_t i = 0; i + 1 < row.char_values.size(); ++i)
      row.diffs.push_back(std::fabs(row.char_values[i + 1] - row.char_values[i]));
    row.cauchy = true;
    for (std::size_t i = 0; i + 1 < row.diffs.size(); ++i) {
      if (row.diffs[i + 1] > row.diffs[i] + 1e-12) row.cauchy = false;
    }
    rep.pass = rep.pass && row.cauchy;
    rep.rows.push_back(std::move(row));
  }

  // final-level centering on fresh seeds
  {
    int m = levels.back();
    EnsemblePlan ep;
    ep.seed = stream_seed(plan.seed, 4000);
    ep.count = plan.samples;
    ep.moll_level = m;
    ep.phi_levels = {plan.center_level};
    ep.want_psi = true;
    ep.want_jtilde = true;
    ep.jobs = plan.jobs;
    auto fresh = run_ensemble(*suite.factory, *suite.sk, ep, &placed);
    auto transported = transport_samples(spec, base_chars[m], fresh);
    auto cs = bphz_centered_expectations(spec, H, chars[m], transported);
    for (auto& row : rep.rows) {
      const MomentStat& st = cs.at(row.tree);
      row.final_mean = st.mean;
      row.final_se = st.se;
      row.centered = std::fabs(st.mean) <= 3.0 * st.se + 1e-12;
      rep.pass = rep.pass && row.centered;
    }
  }
  std::ostringstream os;
  os << "transfer: " << (rep.pass ? "pass" : "FAIL") << " over " << rep.rows.size()
     << " negative trees";
  rep.summary = os.str();
  return rep;
}

// --- reporting -------------------------------------------------------------------

std::string config_hash(const ExperimentPlan& plan, const StructureSpec& spec) {
  std::ostringstream os;
  os << spec.rule.source_text << "|" << plan.grid_points << "|" << plan.seed << "|"
     << plan.samples << "|" << plan.p << "|";
  for (int m : plan.moll_levels) os << m << ",";
  os << "|" << plan.conv_fine << "|";
  for (int m : plan.conv_coarse) os << m << ",";
  os << "|";
  for (int m : plan.phi_levels) os << m << ",";
  os << "|" << format_double(plan.slope_band) << "|" << format_double(plan.uniformity_band)
     << "|" << format_double(plan.moll_rate_kappa) << "|"
     << format_double(plan.moll_rate_constant);
  return to_hex(fnv1a(os.str()));
}

namespace {
std::ofstream open_out(const std::string& dir, const std::string& name, std::string* path_out,
                       std::vector<std::string>& written) {
  std::filesystem::create_directories(dir.empty() ? "." : dir);
  std::string path = (dir.empty() ? "." : dir) + "/" + name;
  if (path_out) *path_out = path;
  written.push_back(path);
  return std::ofstream(path);
}
}  // namespace

std::vector<std::string> emit_uniform_report(const ExperimentPlan& plan,
                                             const StructureSpec& spec,
                                             const UniformReport& rep) {
  std::vector<std::string> written;
  auto slopes = open_out(plan.out_dir, "uniform_slopes.csv", nullptr, written);
  slopes << "tree,chain_index,moll_level,p,slope,slope_se,target,band,pass\n";
  for (const auto& step : rep.steps) {
    for (std::size_t mi = 0; mi < step.fits.size(); ++mi) {
      const MomentFit& f = step.fits[mi];
      slopes << step.tree << "," << step.chain_index << "," << plan.moll_levels[mi] << ","
             << format_double(f.p) << "," << format_double(f.slope) << ","
             << format_double(f.slope_se) << "," << format_double(f.target) << ","
             << format_double(plan.slope_band) << "," << (f.pass ? 1 : 0) << "\n";
    }
  }
  auto moments = open_out(plan.out_dir, "uniform_moments.csv", nullptr, written);
  moments << "tree,chain_index,moll_level,level,log2_moment\n";
  for (const auto& step : rep.steps) {
    for (std::size_t mi = 0; mi < step.fits.size(); ++mi) {
      const MomentFit& f = step.fits[mi];
      for (std::size_t li = 0; li < f.levels.size(); ++li)
        moments << step.tree << "," << step.chain_index << "," << plan.moll_levels[mi] << ","
                << f.levels[li] << "," << format_double(f.log2_moments[li]) << "\n";
    }
  }
  auto chars = open_out(plan.out_dir, "uniform_characters.csv", nullptr, written);
  chars << "moll_level,tree,value\n";
  for (const auto& [m, g] : rep.characters)
    for (const auto& [key, v] : g.table()) chars << m << "," << key << "," << format_double(v) << "\n";
  auto summary = open_out(plan.out_dir, "uniform_summary.txt", nullptr, written);
  summary << rep.summary << "\n" << "config " << config_hash(plan, spec) << " seed " << plan.seed
          << "\n";
  for (const auto& step : rep.steps)
    summary << "step " << step.chain_index << " " << step.tree << ": "
            << (step.aborted ? "aborted" : (step.pass ? "pass" : "FAIL"))
            << (step.negative ? "" : " (gamma route)") << " spread "
            << format_double(step.constant_spread) << "\n";
  return written;
}

std::vector<std::string> emit_convergence_report(const ExperimentPlan& plan,
                                                 const StructureSpec& spec,
                                                 const ConvergenceReport& rep) {
  std::vector<std::string> written;
  auto csv = open_out(plan.out_dir, "convergence.csv", nullptr, written);
  csv << "tree,n2,log2_weighted_diff,theta,theta_se,pass\n";
  for (const auto& row : rep.rows)
    for (std::size_t i = 0; i < row.coarse_levels.size(); ++i)
      csv << row.tree << "," << row.coarse_levels[i] << ","
          << format_double(row.log2_weighted_diff[i]) << "," << format_double(row.theta) << ","
          << format_double(row.theta_se) << "," << (row.pass ? 1 : 0) << "\n";
  auto summary = open_out(plan.out_dir, "convergence_summary.txt", nullptr, written);
  summary << rep.summary << "\nconfig " << config_hash(plan, spec) << " seed " << plan.seed
          << "\nmollification gate worst " << format_double(rep.gate_worst) << " le "
          << format_double(plan.moll_rate_constant) << ": " << (rep.gate_pass ? "pass" : "FAIL")
          << "\n";
  return written;
}

std::vector<std::string> emit_transfer_report(const ExperimentPlan& plan,
                                              const StructureSpec& spec,
                                              const TransferReport& rep) {
  std::vector<std::string> written;
  auto csv = open_out(plan.out_dir, "transfer_chars.csv", nullptr, written);
  csv << "tree,level,value\n";
  for (const auto& row : rep.rows)
    for (std::size_t i = 0; i < rep.levels.size(); ++i)
      csv << row.tree << "," << rep.levels[i] << "," << format_double(row.char_values[i]) << "\n";
  auto summary = open_out(plan.out_dir, "transfer_summary.txt", nullptr, written);
  summary << rep.summary << "\nconfig " << config_hash(plan, spec) << " seed " << plan.seed
          << "\n";
  for (const auto& row : rep.rows) {
    summary << row.tree << ": diffs";
    for (double d : row.diffs) summary << " " << format_double(d);
    summary << " cauchy=" << (row.cauchy ? 1 : 0) << " final "
            << format_double(row.final_mean) << " se " << format_double(row.final_se)
            << " centered=" << (row.centered ? 1 : 0) << "\n";
  }
  return written;
}

void write_character_table(const std::string& path, const NegCharacter<double>& g) {
  std::ofstream os(path);
  for (const auto& [key, v] : g.table()) os << key << " = " << format_double(v) << "\n";
}

NegCharacter<double> read_character_table(const std::string& path, const ContextPtr& ctx) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open character table '" + path + "'");
  NegCharacter<double> g;
  std::string line;
  while (std::getline(is, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.rfind('=');
    if (eq == std::string::npos)
      throw std::runtime_error("character table: expected '<tree> = <value>'");
    TreePtr tau = parse_tree(ctx, trim(line.substr(0, eq)));
    g.set(tau, std::stod(trim(line.substr(eq + 1))));
  }
  return g;
}

void write_field(const std::string& path, const Field& f, const std::string& label) {
  std::ofstream os(path, std::ios::binary);
  const Grid& g = *f.grid();
  os.write("RSTF", 4);
  std::uint32_t d = std::uint32_t(g.d);
  os.write(reinterpret_cast<const char*>(&d), 4);
  for (std::size_t a = 0; a < g.d; ++a) {
    std::uint32_t n = std::uint32_t(g.n[a]);
    os.write(reinterpret_cast<const char*>(&n), 4);
    double len = g.len[a], s = g.s[a];
    os.write(reinterpret_cast<const char*>(&len), 8);
    os.write(reinterpret_cast<const char*>(&s), 8);
  }
  std::uint32_t lab_n = std::uint32_t(label.size());
  os.write(reinterpret_cast<const char*>(&lab_n), 4);
  os.write(label.data(), std::streamsize(label.size()));
  os.write(reinterpret_cast<const char*>(f.data()), std::streamsize(f.size() * 8));
}

Field read_field(const std::string& path, std::string* label) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open field file '" + path + "'");
  char magic[4];
  is.read(magic, 4);
  if (std::memcmp(magic, "RSTF", 4) != 0)
    throw std::runtime_error("field file '" + path + "': bad magic");
  std::uint32_t d = 0;
  is.read(reinterpret_cast<char*>(&d), 4);
  std::vector<Rational> s;
  int points = 0;
  double period = 1.0;
  std::vector<double> sd;
  for (std::uint32_t a = 0; a < d; ++a) {
    std::uint32_t n = 0;
    double len = 0, sv = 0;
    is.read(reinterpret_cast<char*>(&n), 4);
    is.read(reinterpret_cast<char*>(&len), 8);
    is.read(reinterpret_cast<char*>(&sv), 8);
    points = int(n);
    period = len;
    sd.push_back(sv);
    s.push_back(Rational(std::llround(sv * 64), 64));
  }
  std::uint32_t lab_n = 0;
  is.read(reinterpret_cast<char*>(&lab_n), 4);
  std::string lab(lab_n, '\0');
  is.read(lab.data(), lab_n);
  if (label) *label = lab;
  GridPtr g = Grid::make(ScalingSpec(s), points, period);
  Field f(g);
  is.read(reinterpret_cast<char*>(f.data()), std::streamsize(f.size() * 8));
  return f;
}

void export_field_csv(const std::string& path, const Field& f) {
  std::ofstream os(path);
  const Grid& g = *f.grid();
  os << "index";
  for (std::size_t a = 0; a < g.d; ++a) os << ",x" << a;
  os << ",value\n";
  for (std::size_t i = 0; i < f.size(); ++i) {
    os << i;
    auto x = g.point(g.unflat(i));
    for (double v : x) os << "," << format_double(v);
    os << "," << format_double(f[i]) << "\n";
  }
}

std::string kernel_selftest_report(const SingularKernel& K, const SemigroupKernel& sk) {
  std::ostringstream os;
  os << "singular kernel: beta " << format_double(K.beta()) << ", levels " << K.levels()
     << ", annihilation order " << K.annihilation_order() << "\n";
  os << "  worst level moment residual: " << format_double(K.worst_moment_residual()) << "\n";
  MultiIndex z(K.grid()->d);
  auto ratios = K.scaling_ratios(z);
  os << "  sup|K_n| / 2^{n(|s|-beta)}:";
  for (double r : ratios) os << " " << format_double(r);
  os << "\n";
  os << "semigroup kernel: levels 0.." << sk.max_level() << ", moment order "
     << sk.moment_order() << "\n";
  os << "  worst rho moment residual: " << format_double(sk.worst_moment_residual()) << "\n";
  double worst = 0;
  for (int n = 2; n < sk.max_level() - 1; ++n) {
    Field resid = sk.phi(n) - convolve(sk.rho(n), sk.phi(n + 1));
    worst = std::max(worst, resid.sup_norm());
  }
  os << "  semigroup identity residual (fft route): " << format_double(worst) << "\n";
  return os.str();
}

}  // namespace rst
