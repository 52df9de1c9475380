// Command-line front end: tree/coproduct inspection, ensemble simulation,
// renormalisation character solves, reconstruction probes and the
// statistical verification suites.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "rst/pipeline.hpp"
#include "rst/util.hpp"

using namespace rst;

namespace {

struct Common {
  std::string rule_file = "configs/t1.rules";
  std::uint64_t seed = 20240801;
  int jobs = 1;
  std::string out;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--rule", c.rule_file, "rule specification file");
  cmd->add_option("--seed", c.seed, "master seed");
  cmd->add_option("--jobs", c.jobs, "worker threads");
  cmd->add_option("--out", c.out, "output directory");
}

std::string out_dir(const Common& c) {
  if (!c.out.empty()) return c.out;
  const char* cache = std::getenv("RST_CACHE_DIR");
  return cache ? std::string(cache) : std::string("rst-out");
}

StructureSpec load_structure(const Common& c) {
  RuleSpec rule = parse_rule_file(c.rule_file);
  return generate_basis(rule);
}

ExperimentPlan make_plan(const Common& c, int grid_points, int samples) {
  ExperimentPlan plan;
  plan.rule_file = c.rule_file;
  plan.grid_points = grid_points;
  plan.seed = c.seed;
  plan.samples = samples;
  plan.jobs = c.jobs;
  plan.out_dir = out_dir(c);
  return plan;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"decorated-tree renormalisation toolkit"};
  app.require_subcommand(1);

  Common c;

  auto* gen = app.add_subcommand("gen-trees", "generate the truncated basis and chain");
  add_common(gen, c);
  gen->callback([&] {
    StructureSpec spec = load_structure(c);
    HopfAlgebra<Rational> H(spec.context());
    std::cout << "basis (" << spec.basis.size() << " trees):\n";
    for (const auto& t : spec.basis)
      std::cout << "  " << t->key() << "  deg " << t->degree().str() << "  noises "
                << t->noise_count() << "\n";
    std::cout << "negative trees:";
    for (const auto& t : spec.negatives) std::cout << " " << t->key();
    std::cout << "\nchain:";
    for (const auto& t : spec.chain) std::cout << " " << t->key();
    std::cout << "\n";
    ValidationReport rep = validate_assumptions(spec, H);
    std::cout << "assumption report: " << rep.str();
    ValidationReport closure = verify_sector_closure(spec, H, c.seed, 3);
    std::cout << "sector closure: " << closure.str();
  });

  auto* cop = app.add_subcommand("coproduct", "print the coproduct of a tree");
  std::string tree_expr = "I[l,0](Xi)*Xi";
  add_common(cop, c);
  cop->add_option("--tree", tree_expr, "tree expression");
  cop->callback([&] {
    StructureSpec spec = load_structure(c);
    HopfAlgebra<Rational> H(spec.context());
    TreePtr tau = parse_tree(spec.context(), tree_expr);
    std::cout << "Delta(" << tau->key() << ") = " << H.delta(tau).str() << "\n";
    std::cout << "Delta^-(" << tau->key() << ") terms:\n";
    for (const auto& term : extraction_coproduct(tau, spec.negative_keys()))
      std::cout << "  " << term.extracted.key_string() << " (x) " << term.contracted->key()
                << (tree_is_zero_symbol(term.contracted) ? "  [zero symbol]" : "") << "\n";
  });

  auto* ren = app.add_subcommand("renorm", "apply a renormalisation character to a tree");
  std::string char_file;
  add_common(ren, c);
  ren->add_option("--char", char_file, "character table file")->required();
  ren->add_option("--tree", tree_expr, "tree expression");
  ren->callback([&] {
    StructureSpec spec = load_structure(c);
    NegCharacter<double> g = read_character_table(char_file, spec.context());
    RenormMap<double> M(g, spec.negative_keys());
    TreePtr tau = parse_tree(spec.context(), tree_expr);
    std::cout << "M_g(" << tau->key() << ") = " << M.apply(tau).str() << "\n";
  });

  auto* sim = app.add_subcommand("simulate", "canonical-lift ensemble moments");
  int sim_level = 3;
  int sim_seeds = 1000;
  int sim_grid = 512;
  add_common(sim, c);
  sim->add_option("--level", sim_level, "mollification level");
  sim->add_option("--seeds", sim_seeds, "ensemble size");
  sim->add_option("--grid", sim_grid, "grid points per axis");
  sim->callback([&] {
    StructureSpec spec = load_structure(c);
    GridPtr grid = Grid::make(spec.context()->scaling, sim_grid);
    ModelFactory factory(spec, grid);
    SemigroupKernel sk(grid, 2);
    EnsemblePlan ep;
    ep.seed = c.seed;
    ep.count = sim_seeds;
    ep.moll_level = sim_level;
    ep.phi_levels = {0, 2, 3, 4, 5};
    ep.jobs = c.jobs;
    auto bank = run_ensemble(factory, sk, ep);
    std::filesystem::create_directories(out_dir(c));
    std::string path = out_dir(c) + "/moments.csv";
    std::ofstream os(path);
    os << "tree,level,p,estimate,se\n";
    for (const auto& tau : trees_for_ensemble(spec)) {
      for (std::size_t li = 0; li < ep.phi_levels.size(); ++li) {
        std::vector<double> sq(bank.size());
        for (std::size_t i = 0; i < bank.size(); ++i) {
          double v = bank[i].phi.at(tau->key())[li];
          sq[i] = v * v;
        }
        MomentStat st = mean_se(sq);
        os << tau->key() << "," << ep.phi_levels[li] << ",2," << format_double(st.mean) << ","
           << format_double(st.se) << "\n";
      }
    }
    std::string kernel_name =
        spec.context()->labels[spec.context()->labels.kernel_labels()[0]].name;
    std::ofstream rep(out_dir(c) + "/kernel_selftest.txt");
    rep << kernel_selftest_report(factory.kernels.of(kernel_name), sk);
    std::cout << "wrote " << path << " and kernel_selftest.txt\n";
  });

  auto* rc = app.add_subcommand("renorm-char", "solve the centering characters");
  std::string mode = "bbphz";
  int rc_level = 3;
  int rc_seeds = 2000;
  int rc_grid = 512;
  add_common(rc, c);
  rc->add_option("--mode", mode, "bbphz or bphz")->check(CLI::IsMember({"bbphz", "bphz"}));
  rc->add_option("--level", rc_level, "mollification level");
  rc->add_option("--seeds", rc_seeds, "ensemble size");
  rc->add_option("--grid", rc_grid, "grid points per axis");
  rc->callback([&] {
    StructureSpec spec = load_structure(c);
    GridPtr grid = Grid::make(spec.context()->scaling, rc_grid);
    ModelFactory factory(spec, grid);
    SemigroupKernel sk(grid, 2);
    EnsemblePlan ep;
    ep.seed = c.seed;
    ep.count = rc_seeds;
    ep.moll_level = rc_level;
    ep.phi_levels = {0};
    ep.jobs = c.jobs;
    NegCharacter<double> g;
    if (mode == "bbphz") {
      auto bank = run_ensemble(factory, sk, ep);
      auto rep = solve_bbphz(spec, bank, 0);
      for (const auto& n : rep.notes) std::cout << "note: " << n << "\n";
      g = rep.character;
    } else {
      TestFunction psi = TestFunction::bump_profile(grid, 2);
      Field placed = psi.place(std::vector<double>(grid->d, 0.0), 0.25);
      placed *= 1.0 / placed.integral();
      ep.want_psi = true;
      ep.want_jtilde = true;
      auto bank = run_ensemble(factory, sk, ep, &placed);
      auto H = std::make_shared<HopfAlgebra<double>>(spec.context());
      auto rep = solve_bphz(spec, H, bank, 1.0);
      for (const auto& n : rep.notes) std::cout << "note: " << n << "\n";
      g = rep.character;
    }
    std::filesystem::create_directories(out_dir(c));
    std::string path = out_dir(c) + "/" + mode + "_character.txt";
    write_character_table(path, g);
    std::cout << "wrote " << path << "\n";
  });

  auto* rec = app.add_subcommand("reconstruct", "reconstruction probe of a Taylor lift");
  std::string field_file;
  double rec_gamma = 2.0;
  std::string rec_levels = "2..5";
  add_common(rec, c);
  rec->add_option("--field", field_file, "input field file (binary)")->required();
  rec->add_option("--gamma", rec_gamma, "lift order");
  rec->add_option("--levels", rec_levels, "level range a..b");
  rec->callback([&] {
    StructureSpec spec = load_structure(c);
    Field g = read_field(field_file);
    GridPtr grid = g.grid();
    ModelFactory factory(spec, grid);
    SemigroupKernel sk(grid, 2);
    auto model = std::make_shared<Model>(factory.lift_seed(c.seed, 3));
    ModelledField f = taylor_lift(model, g, rec_gamma);
    Field rf = reconstruct_pointwise(f);

    auto dots = rec_levels.find("..");
    int a = std::stoi(rec_levels.substr(0, dots));
    int b = std::stoi(rec_levels.substr(dots + 2));
    std::filesystem::create_directories(out_dir(c));
    std::string path = out_dir(c) + "/reconstruct_pairs.csv";
    std::ofstream os(path);
    os << "x,lambda,value\n";
    std::vector<double> xs, ys;
    for (int n = a; n <= b; ++n) {
      Field pf(grid);
      for (const auto& [k, tc] : f.coeffs()) {
        Field pc = model->renormalised_terms(tc.first).pair_kernel(sk.phi(n));
        pf += tc.second.hadamard(pc);
      }
      Field err = convolve(sk.phi(n), rf) - pf;
      for (std::size_t i = 0; i < err.size(); i += err.size() / 16)
        os << format_double(grid->point(grid->unflat(i))[0]) << ","
           << format_double(std::pow(2.0, -n)) << "," << format_double(err[i]) << "\n";
      xs.push_back(n);
      ys.push_back(std::log2(std::max(lp_norm_region(err, 2, Region::full(*grid)), 1e-300)));
    }
    LineFit fit = fit_line(xs, ys);
    std::cout << "reconstruction deviation slope " << format_double(-fit.slope)
              << " (target >= " << format_double(rec_gamma - 0.1) << ")\n";
    std::cout << "wrote " << path << "\n";
  });

  auto* fd = app.add_subcommand("frechet-check", "finite-difference derivative check");
  std::string fd_tree = "I[l,0](Xi)*Xi";
  std::string fd_eps = "1e-2,5e-3,2.5e-3";
  int fd_grid = 256;
  int fd_level = 2;
  add_common(fd, c);
  fd->add_option("--tree", fd_tree, "tree expression");
  fd->add_option("--eps", fd_eps, "comma-separated epsilon list");
  fd->add_option("--grid", fd_grid, "grid points");
  fd->add_option("--level", fd_level, "mollification level");
  fd->callback([&] {
    StructureSpec spec = load_structure(c);
    GridPtr grid = Grid::make(spec.context()->scaling, fd_grid);
    ModelFactory factory(spec, grid);
    SemigroupKernel sk(grid, 2);
    std::vector<double> eps;
    for (const auto& part : rst::split(fd_eps, ',')) eps.push_back(std::stod(rst::trim(part)));
    EnsemblePlan ep;
    ep.seed = stream_seed(c.seed, 77);
    ep.count = 400;
    ep.moll_level = fd_level;
    ep.phi_levels = {0};
    ep.jobs = c.jobs;
    auto bank = run_ensemble(factory, sk, ep);
    NegCharacter<double> g = solve_bbphz(spec, bank, 0).character;

    TestFunction psi = TestFunction::bump_profile(grid, 2);
    Field placed = psi.place(std::vector<double>(grid->d, 0.0), 0.125);
    Direction eta =
        sample_smooth_direction(grid, spec.context()->labels, stream_seed(c.seed, 5));
    FdReport rep = frechet_fd_check(factory, sk, stream_seed(c.seed, 9), fd_level, g,
                                    parse_tree(spec.context(), fd_tree), eta, placed, eps,
                                    spec.rule.kappa_bar.to_double());
    std::filesystem::create_directories(out_dir(c));
    std::string path = out_dir(c) + "/frechet_check.csv";
    std::ofstream os(path);
    os << "tree,eps,fd,rh,discrepancy\n";
    for (const auto& row : rep.rows)
      os << rep.tree << "," << format_double(row.eps) << "," << format_double(row.fd) << ","
         << format_double(row.rh) << "," << format_double(row.discrepancy) << "\n";
    if (rep.linear_exact) std::cout << "discrepancy at quadrature floor (linear symbol)\n";
    for (double r : rep.ratios) std::cout << "halving ratio " << format_double(r) << "\n";
    std::cout << "wrote " << path << "\n";
  });

  int suite_grid = 4096;
  int suite_samples = 2000;
  auto* vu = app.add_subcommand("verify-uniform", "uniform-bounds sweep");
  add_common(vu, c);
  vu->add_option("--grid", suite_grid, "grid points");
  vu->add_option("--samples", suite_samples, "ensemble size");
  vu->callback([&] {
    StructureSpec spec = load_structure(c);
    ExperimentPlan plan = make_plan(c, suite_grid, suite_samples);
    UniformReport rep = run_uniform_bounds(plan, spec);
    for (const auto& p : emit_uniform_report(plan, spec, rep)) std::cout << "wrote " << p << "\n";
    std::cout << rep.summary << "\n";
    if (!rep.pass) std::exit(1);
  });

  auto* vc = app.add_subcommand("verify-convergence", "mollification-convergence sweep");
  add_common(vc, c);
  vc->add_option("--grid", suite_grid, "grid points");
  vc->add_option("--samples", suite_samples, "ensemble size");
  vc->callback([&] {
    StructureSpec spec = load_structure(c);
    ExperimentPlan plan = make_plan(c, suite_grid, suite_samples);
    ConvergenceReport rep = run_convergence(plan, spec);
    for (const auto& p : emit_convergence_report(plan, spec, rep))
      std::cout << "wrote " << p << "\n";
    std::cout << rep.summary << "\n";
    if (!rep.pass) std::exit(1);
  });

  auto* tb = app.add_subcommand("transfer-bphz", "character transfer suite");
  add_common(tb, c);
  tb->add_option("--grid", suite_grid, "grid points");
  tb->add_option("--samples", suite_samples, "ensemble size");
  tb->callback([&] {
    StructureSpec spec = load_structure(c);
    ExperimentPlan plan = make_plan(c, suite_grid, suite_samples);
    TransferReport rep = transfer_bphz(plan, spec);
    for (const auto& p : emit_transfer_report(plan, spec, rep)) std::cout << "wrote " << p << "\n";
    std::cout << rep.summary << "\n";
    if (!rep.pass) std::exit(1);
  });

  CLI11_PARSE(app, argc, argv);
  return 0;
}
