#pragma once

#include <ostream>
#include <stdexcept>
#include <string>

#include "plectic/curve.hpp"
#include "plectic/heegner.hpp"
#include "plectic/integrate.hpp"
#include "plectic/iwasawa.hpp"

// Command dispatch and the file formats the binary consumes.  Everything is
// testable in-process: run_command writes a complete report to the supplied
// stream and returns the process exit status, so the unit tests exercise the
// exact surface the executable exposes.

namespace plectic {

enum class OutputMode { human, machine };

struct RunConfig {
  std::string command;
  std::string curve_file;
  std::string system_file;
  std::string bipartite_file;

  i64 D = -8;          // imaginary quadratic discriminant
  u64 p = 5;           // working prime
  int k = 1;           // coefficient precision exponent
  int depth = 2;       // tower depth
  i64 ell = 0;         // prime argument of `ap`
  i64 twist = 1;       // twisting discriminant for `lvalue`
  double tolerance = 1e-6;
  u64 bound = 1000;    // sieve upper limit
  int a_p = 1;         // normalization sign for derive / iwasawa
  int epsilon = 1;     // functional-equation sign fed to derive
  int tate_val = 1;    // ord_p of the Tate parameter, carried as a multiplier
  int delta_plus = 0, delta_minus = 0;  // torsion corrections in split tables
  unsigned trunc = 4;  // T-adic truncation of the Iwasawa ring
  u64 seed = 1;        // deterministic seed for the synthetic demo
  bool sphere = false, covering = false, orbit = false;  // tree dumps
  bool skip_lvalues = false;  // examples: leave out the analytic block
  OutputMode mode = OutputMode::human;
};

inline constexpr int exit_ok = 0;
inline constexpr int exit_check_failed = 1;
inline constexpr int exit_config_error = 2;
inline constexpr int exit_computation_failed = 3;

// bad inputs (flags, file contents) as opposed to failures of the
// computation they configure
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CurveFile {
  CurveModel curve;
  bool rho_surjective_asserted = false;
  std::string citation;
  // rank lines are echoed as asserted metadata, never computed
  i64 asserted_rank_Q = -1;  // -1 = absent
  i64 asserted_rank_K = -1;
};

// Curve file: `key = value` lines (label, a1..a6, conductor, optional
// asserted flags), # comments and blank lines ignored.  Throws ConfigError
// with the offending line on any malformed input.
CurveFile parse_curve_text(const std::string& text, const std::string& origin);
CurveFile load_curve_file(const std::string& path);

// Point-system file: header `p k depth rank`, then one line per level n
// holding (p+1)p^(n-1) * rank integers in group-major order.
PointSystem parse_system_text(const std::string& text, const std::string& origin);
PointSystem load_system_file(const std::string& path);

// Bipartite data as JSON: ring parameters once at the top, every algebra
// element as its coefficient array.
BipartiteData parse_bipartite_json(const std::string& text, const std::string& origin);
BipartiteData load_bipartite_file(const std::string& path);

// Dispatches cfg.command, writes the full report to `out` (nothing is
// written on a config error) and diagnostics to `err`; returns the exit
// status.  Commands: check, ap, lvalue, sieve, tree, integrate-demo,
// derive, iwasawa, examples.
int run_command(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace plectic
