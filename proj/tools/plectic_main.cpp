#include <iostream>

#include "CLI11.hpp"
#include "plectic/cli.hpp"

// Thin argv layer: every subcommand fills the same RunConfig and the whole
// report is produced by run_command, so anything the binary can do is also
// reachable in-process from the tests.

int main(int argc, char** argv) {
  plectic::RunConfig cfg;
  CLI::App app{"exact arithmetic for anticyclotomic invariants of semistable curves"};
  app.require_subcommand(1);

  auto common = [&cfg](CLI::App* sub, const char* name) {
    sub->callback([&cfg, name]() { cfg.command = name; });
    sub->add_flag_callback(
        "--machine", [&cfg]() { cfg.mode = plectic::OutputMode::machine; },
        "line-stable `key = value` output only");
  };

  CLI::App* check = app.add_subcommand("check", "hypothesis checklist for a (curve, field, p) triple");
  common(check, "check");
  check->add_option("--curve", cfg.curve_file, "curve description file")->required();
  check->add_option("--field", cfg.D, "imaginary quadratic discriminant");
  check->add_option("--p", cfg.p, "working prime");

  CLI::App* ap = app.add_subcommand("ap", "Hecke eigenvalue of a curve at a prime");
  common(ap, "ap");
  ap->add_option("--curve", cfg.curve_file, "curve description file")->required();
  ap->add_option("--ell", cfg.ell, "prime to evaluate at")->required();

  CLI::App* lv = app.add_subcommand("lvalue", "special value of the (twisted) L-series at s = 1");
  common(lv, "lvalue");
  lv->add_option("--curve", cfg.curve_file, "curve description file")->required();
  lv->add_option("--twist", cfg.twist, "fundamental twisting discriminant (1 = no twist)");
  lv->add_option("--tolerance", cfg.tolerance, "bound on the truncation tail");

  CLI::App* sieve = app.add_subcommand("sieve", "k-admissible primes for a (curve, field, p) triple");
  common(sieve, "sieve");
  sieve->add_option("--curve", cfg.curve_file, "curve description file")->required();
  sieve->add_option("--field", cfg.D, "imaginary quadratic discriminant");
  sieve->add_option("--p", cfg.p, "working prime");
  sieve->add_option("--k", cfg.k, "congruence exponent");
  sieve->add_option("--bound", cfg.bound, "sieve upper limit");

  CLI::App* tree = app.add_subcommand("tree", "sphere / covering / orbit dumps of the local tree");
  common(tree, "tree");
  tree->add_option("--p", cfg.p, "residue prime of the tree");
  tree->add_option("--depth", cfg.depth, "distance from the torus-fixed vertex");
  tree->add_flag("--sphere", cfg.sphere, "list the vertices at the given depth");
  tree->add_flag("--covering", cfg.covering, "list the boundary balls of the covering");
  tree->add_flag("--orbit", cfg.orbit, "list the torus orbit of a deep edge");

  CLI::App* demo = app.add_subcommand("integrate-demo",
                                      "multiplicative integral vs group-ring derivative on synthetic data");
  common(demo, "integrate-demo");
  demo->add_option("--p", cfg.p, "working prime");
  demo->add_option("--k", cfg.k, "coefficient precision exponent");
  demo->add_option("--depth", cfg.depth, "tower depth of the synthetic system");
  demo->add_option("--seed", cfg.seed, "deterministic seed");

  CLI::App* derive = app.add_subcommand("derive", "derivative ladder and stabilized invariant of a point system");
  common(derive, "derive");
  derive->add_option("--system", cfg.system_file, "point-system file")->required();
  derive->add_option("--ap", cfg.a_p, "Frobenius sign at p (+1 or -1)");
  derive->add_option("--eps", cfg.epsilon, "functional-equation sign");
  derive->add_option("--tate-val", cfg.tate_val, "ord_p of the Tate parameter");

  CLI::App* iw = app.add_subcommand("iwasawa", "kappa classes, rank bounds, and bipartite consistency");
  common(iw, "iwasawa");
  iw->add_option("--system", cfg.system_file, "point-system file")->required();
  iw->add_option("--bipartite", cfg.bipartite_file, "bipartite-data JSON file");
  iw->add_option("--ap", cfg.a_p, "Frobenius sign at p (+1 or -1)");
  iw->add_option("--eps", cfg.epsilon, "functional-equation sign");
  iw->add_option("--tate-val", cfg.tate_val, "ord_p of the Tate parameter");
  iw->add_option("--delta-plus", cfg.delta_plus, "torsion correction on the + eigenspace");
  iw->add_option("--delta-minus", cfg.delta_minus, "torsion correction on the - eigenspace");
  iw->add_option("--trunc", cfg.trunc, "T-adic truncation order");

  CLI::App* ex = app.add_subcommand("examples", "the three bundled worked examples, re-verified");
  common(ex, "examples");
  ex->add_flag("--skip-lvalues", cfg.skip_lvalues, "integer facts only, no L-series sums");
  ex->add_option("--tolerance", cfg.tolerance, "bound on the L-series truncation tail");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? plectic::exit_ok : plectic::exit_config_error;
  }
  return plectic::run_command(cfg, std::cout, std::cerr);
}
