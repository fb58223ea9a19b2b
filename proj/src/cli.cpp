#include "plectic/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "plectic/boundary.hpp"
#include "plectic/tree.hpp"

namespace plectic {

namespace {

// ---------------------------------------------------------------------------
// report buffer: both modes emit `key = value` facts; human mode adds section
// headers and prose, machine mode stays line-stable

class Report {
 public:
  explicit Report(OutputMode m) : mode_(m) {}
  OutputMode mode() const { return mode_; }

  void section(const std::string& title) {
    if (mode_ == OutputMode::human) buf_ << "\n-- " << title << " --\n";
  }
  void note(const std::string& text) {
    if (mode_ == OutputMode::human) buf_ << text << "\n";
  }
  void kv(const std::string& key, const std::string& value) {
    buf_ << key << " = " << value << "\n";
  }
  void kv(const std::string& key, const char* value) { kv(key, std::string(value)); }
  void kv(const std::string& key, bool value) { kv(key, value ? "true" : "false"); }
  template <typename T>
  void kv(const std::string& key, T value) {
    buf_ << key << " = " << value << "\n";
  }
  void kvd(const std::string& key, double value) {
    char tmp[64];
    std::snprintf(tmp, sizeof tmp, "%.9g", value);
    kv(key, std::string(tmp));
  }
  std::string str() const { return buf_.str(); }

 private:
  OutputMode mode_;
  std::ostringstream buf_;
};

const char* sign_str(int s) { return s >= 0 ? "+1" : "-1"; }
const char* mode_str(OutputMode m) { return m == OutputMode::machine ? "machine" : "human"; }

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

i64 parse_int(const std::string& s, const std::string& origin) {
  try {
    size_t pos = 0;
    i64 v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(origin + ": not an integer: '" + s + "'");
  }
}

bool parse_flag(const std::string& s, const std::string& origin) {
  if (s == "yes" || s == "true" || s == "1") return true;
  if (s == "no" || s == "false" || s == "0") return false;
  throw ConfigError(origin + ": expected yes/no: '" + s + "'");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// bundled example fixtures (identical to the files shipped under fixtures/)

constexpr const char* kFixture37a = R"(# the rank-one curve of minimal conductor; pairs with D = -8, p = 37
label = 37a
a1 = 0
a2 = 0
a3 = 1
a4 = -1
a6 = 0
conductor = 37
rho_mod_p_surjective = yes
citation = conductor-p curve with p >= 11, so the residual image is full
asserted_rank_Q = 1
asserted_rank_K = 2
)";

constexpr const char* kFixture109a = R"(# the unique curve of conductor 109; pairs with D = -8, p = 109
label = 109a
a1 = 1
a2 = -1
a3 = 0
a4 = -8
a6 = -7
conductor = 109
rho_mod_p_surjective = yes
citation = conductor-p curve with p >= 11, so the residual image is full
asserted_rank_Q = 0
asserted_rank_K = 2
)";

constexpr const char* kFixture817a = R"(# conductor 817 = 19 * 43; pairs with D = -7, p = 19
label = 817a
a1 = 0
a2 = 1
a3 = 1
a4 = 1
a6 = 6
conductor = 817
rho_mod_p_surjective = yes
citation = residual image mod 19 is full per the standard isogeny tables
asserted_rank_Q = 2
asserted_rank_K = 2
)";

}  // namespace

// ---------------------------------------------------------------------------
// file formats

CurveFile parse_curve_text(const std::string& text, const std::string& origin) {
  std::map<std::string, std::string> kvs;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected `key = value`");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key or value");
    if (!kvs.emplace(key, value).second)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
  }

  static const char* known[] = {"label",       "a1",
                                "a2",          "a3",
                                "a4",          "a6",
                                "conductor",   "rho_mod_p_surjective",
                                "citation",    "asserted_rank_Q",
                                "asserted_rank_K"};
  for (const auto& [key, value] : kvs) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw ConfigError(origin + ": unknown key '" + key + "'");
  }
  for (const char* req : {"label", "a1", "a2", "a3", "a4", "a6", "conductor"})
    if (!kvs.count(req)) throw ConfigError(origin + ": missing required key '" + req + "'");

  CurveFile out;
  i64 cond = parse_int(kvs["conductor"], origin + ": conductor");
  if (cond <= 0) throw ConfigError(origin + ": conductor must be positive");
  try {
    out.curve = CurveModel::make(kvs["label"], parse_int(kvs["a1"], origin + ": a1"),
                                 parse_int(kvs["a2"], origin + ": a2"),
                                 parse_int(kvs["a3"], origin + ": a3"),
                                 parse_int(kvs["a4"], origin + ": a4"),
                                 parse_int(kvs["a6"], origin + ": a6"), (u64)cond);
  } catch (const std::exception& e) {
    throw ConfigError(origin + ": invalid curve model: " + e.what());
  }
  if (kvs.count("rho_mod_p_surjective"))
    out.rho_surjective_asserted = parse_flag(kvs["rho_mod_p_surjective"], origin);
  if (kvs.count("citation")) out.citation = kvs["citation"];
  if (kvs.count("asserted_rank_Q")) {
    out.asserted_rank_Q = parse_int(kvs["asserted_rank_Q"], origin + ": asserted_rank_Q");
    if (out.asserted_rank_Q < 0) throw ConfigError(origin + ": asserted_rank_Q must be >= 0");
  }
  if (kvs.count("asserted_rank_K")) {
    out.asserted_rank_K = parse_int(kvs["asserted_rank_K"], origin + ": asserted_rank_K");
    if (out.asserted_rank_K < 0) throw ConfigError(origin + ": asserted_rank_K must be >= 0");
  }
  return out;
}

CurveFile load_curve_file(const std::string& path) {
  return parse_curve_text(read_file(path), path);
}

PointSystem parse_system_text(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto next_data_line = [&]() -> std::string {
    while (std::getline(in, line)) {
      ++lineno;
      std::string t = trim(line);
      if (!t.empty() && t[0] != '#') return t;
    }
    throw ConfigError(origin + ": unexpected end of file");
  };

  std::istringstream head(next_data_line());
  i64 p = 0, k = 0, depth = 0, rank = 0;
  if (!(head >> p >> k >> depth >> rank))
    throw ConfigError(origin + ": header line must be `p k depth rank`");
  std::string extra;
  if (head >> extra) throw ConfigError(origin + ": trailing tokens on the header line");
  if (p < 2 || k < 1 || depth < 1 || rank < 1)
    throw ConfigError(origin + ": header values out of range");

  std::vector<std::vector<std::vector<u64>>> level;
  for (int n = 1; n <= depth; ++n) {
    u64 h = level_order((u64)p, n);
    std::istringstream row(next_data_line());
    std::vector<std::vector<u64>> entries((size_t)h, std::vector<u64>((size_t)rank, 0));
    for (u64 j = 0; j < h; ++j)
      for (i64 c = 0; c < rank; ++c) {
        i64 v;
        if (!(row >> v))
          throw ConfigError(origin + ":" + std::to_string(lineno) + ": level " +
                            std::to_string(n) + " needs " + std::to_string(h * (u64)rank) +
                            " integers");
        if (v < 0) throw ConfigError(origin + ": negative entry at level " + std::to_string(n));
        entries[j][(size_t)c] = (u64)v;
      }
    if (row >> extra)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": trailing tokens at level " +
                        std::to_string(n));
    level.push_back(std::move(entries));
  }
  try {
    return PointSystem::make((u64)p, (int)k, (int)depth, (int)rank, std::move(level));
  } catch (const std::exception& e) {
    throw ConfigError(origin + ": " + e.what());
  }
}

PointSystem load_system_file(const std::string& path) {
  return parse_system_text(read_file(path), path);
}

BipartiteData parse_bipartite_json(const std::string& text, const std::string& origin) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  try {
    u64 p = j.at("p").get<u64>();
    unsigned k = j.at("k").get<unsigned>();
    unsigned trunc = j.at("trunc").get<unsigned>();
    IwasawaElem probe = IwasawaElem::zero(p, k, trunc);  // validates the ring
    u64 mod = probe.modulus();

    auto elem = [&](const nlohmann::json& arr) {
      if (!arr.is_array() || arr.size() != trunc)
        throw std::invalid_argument("every element needs exactly trunc coefficients");
      IwasawaElem e = IwasawaElem::zero(p, k, trunc);
      for (unsigned i = 0; i < trunc; ++i) e.c[i] = arr.at(i).get<u64>() % mod;
      return e;
    };

    BipartiteData data;
    for (const auto& nj : j.value("nodes", nlohmann::json::array())) {
      BipartiteNode node;
      node.m = nj.at("m").get<std::vector<u64>>();
      node.indefinite = nj.at("indefinite").get<bool>();
      if (node.indefinite)
        for (const auto& kj : nj.at("kappa")) node.kappa.push_back(elem(kj));
      else
        node.lambda = elem(nj.at("lambda"));
      data.nodes.push_back(std::move(node));
    }
    for (const auto& ej : j.value("edges", nlohmann::json::array())) {
      BipartiteEdge edge;
      edge.m = ej.at("m").get<std::vector<u64>>();
      edge.ell = ej.at("ell").get<u64>();
      for (const auto& lj : ej.at("loc")) edge.loc.push_back(elem(lj));
      data.edges.push_back(std::move(edge));
    }
    return data;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(origin + ": " + e.what());
  }
}

BipartiteData load_bipartite_file(const std::string& path) {
  return parse_bipartite_json(read_file(path), path);
}

// ---------------------------------------------------------------------------
// commands

namespace {

CurveFile require_curve(const RunConfig& cfg) {
  if (cfg.curve_file.empty()) throw ConfigError(cfg.command + ": --curve <file> is required");
  return load_curve_file(cfg.curve_file);
}

PointSystem require_system(const RunConfig& cfg) {
  if (cfg.system_file.empty()) throw ConfigError(cfg.command + ": --system <file> is required");
  PointSystem ps = load_system_file(cfg.system_file);
  SystemReport rep = validate_point_system(ps);
  if (!rep.ok) throw ConfigError(cfg.system_file + ": " + rep.message);
  return ps;
}

FieldData require_field(i64 D) {
  try {
    return FieldData::make(D);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("--field: ") + e.what());
  }
}

void require_sign(int v, const std::string& flag) {
  if (v != 1 && v != -1) throw ConfigError(flag + " must be +1 or -1");
}

void echo_base(const RunConfig& cfg, Report& rep) {
  rep.kv("config.command", cfg.command);
  rep.kv("config.mode", mode_str(cfg.mode));
}

int cmd_check(const RunConfig& cfg, Report& rep) {
  CurveFile cf = require_curve(cfg);
  FieldData K = require_field(cfg.D);
  echo_base(cfg, rep);
  rep.kv("config.curve_file", cfg.curve_file);
  rep.kv("config.field_D", cfg.D);
  rep.kv("config.p", cfg.p);

  rep.section("hypothesis checklist for " + cf.curve.str());
  rep.kv("check.label", cf.curve.label);
  HypothesisReport hr = check_hypotheses(cf.curve, K, cfg.p, cf.rho_surjective_asserted,
                                         cf.citation);
  for (const CheckItem& item : hr.items) {
    const char* word = item.status == CheckStatus::pass       ? "PASS"
                       : item.status == CheckStatus::asserted ? "ASSERTED"
                                                              : "FAIL";
    if (rep.mode() == OutputMode::human) {
      rep.note(item.name + ": " + word + (item.detail.empty() ? "" : " — " + item.detail));
    } else {
      rep.kv("check." + item.name, item.status == CheckStatus::pass       ? "pass"
                                   : item.status == CheckStatus::asserted ? "asserted"
                                                                          : "fail");
      if (!item.detail.empty()) rep.kv("check." + item.name + ".detail", item.detail);
    }
  }
  rep.kv("check.all", hr.all_ok() ? "pass" : "fail");
  return hr.all_ok() ? exit_ok : exit_check_failed;
}

int cmd_ap(const RunConfig& cfg, Report& rep) {
  CurveFile cf = require_curve(cfg);
  if (cfg.ell <= 0 || !is_prime((u64)cfg.ell))
    throw ConfigError("ap: --ell must be a prime");
  if (cfg.ell > 10000000) throw ConfigError("ap: --ell beyond the enumeration budget");
  echo_base(cfg, rep);
  rep.kv("config.curve_file", cfg.curve_file);
  rep.kv("config.ell", cfg.ell);

  rep.section("trace of Frobenius for " + cf.curve.str());
  rep.kv("curve.label", cf.curve.label);
  rep.kv("curve.conductor", cf.curve.N);
  rep.kv("curve.a_" + std::to_string(cfg.ell), a_ell(cf.curve, (u64)cfg.ell));
  if (cf.curve.N % (u64)cfg.ell == 0 && cfg.ell >= 5) {
    ReductionInfo ri = reduction_type(cf.curve, (u64)cfg.ell);
    rep.kv("curve.reduction_at_" + std::to_string(cfg.ell), reduction_type_name(ri.type));
    rep.kv("curve.tate_valuation_at_" + std::to_string(cfg.ell), ri.tate_val);
  }
  return exit_ok;
}

int cmd_lvalue(const RunConfig& cfg, Report& rep) {
  CurveFile cf = require_curve(cfg);
  if (!(cfg.tolerance > 0) || cfg.tolerance >= 1)
    throw ConfigError("lvalue: --tolerance must lie in (0, 1)");
  CurveModel model = cf.curve;
  int sign = 0;
  try {
    sign = cfg.twist == 1 ? root_number(cf.curve) : twisted_root_number(cf.curve, cfg.twist);
    if (cfg.twist != 1) model = quadratic_twist(cf.curve, cfg.twist);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("lvalue: ") + e.what());
  }
  echo_base(cfg, rep);
  rep.kv("config.curve_file", cfg.curve_file);
  rep.kv("config.twist", cfg.twist);
  rep.kvd("config.tolerance", cfg.tolerance);

  rep.section("L-series of " + model.str() + " at s = 1");
  LValueResult r = l_value_with_sign(model, sign, cfg.tolerance);
  rep.kv("lvalue.label", model.label);
  rep.kv("lvalue.conductor", model.N);
  rep.kv("lvalue.sign", sign_str(r.sign));
  rep.kv("lvalue.forced_zero", r.forced_zero);
  rep.kvd("lvalue.value", r.value);
  rep.kvd("lvalue.tail", r.tail);
  rep.kv("lvalue.terms", r.terms);
  return exit_ok;
}

int cmd_sieve(const RunConfig& cfg, Report& rep) {
  CurveFile cf = require_curve(cfg);
  FieldData K = require_field(cfg.D);
  if (cfg.k < 1 || cfg.k > 12) throw ConfigError("sieve: --k must lie in [1, 12]");
  if (cfg.bound < 2 || cfg.bound > 2000000)
    throw ConfigError("sieve: --bound must lie in [2, 2000000]");
  std::vector<AdmissiblePrime> found;
  try {
    found = admissible_sieve(cf.curve, K, cfg.p, (unsigned)cfg.k, cfg.bound);
  } catch (const std::domain_error& e) {
    throw ConfigError(std::string("sieve: ") + e.what());
  }
  echo_base(cfg, rep);
  rep.kv("config.curve_file", cfg.curve_file);
  rep.kv("config.field_D", cfg.D);
  rep.kv("config.p", cfg.p);
  rep.kv("config.k", cfg.k);
  rep.kv("config.bound", cfg.bound);

  rep.section("admissible primes for " + cf.curve.label + " up to " + std::to_string(cfg.bound));
  rep.kv("sieve.count", found.size());
  for (size_t i = 0; i < found.size(); ++i) {
    rep.kv("sieve.ell_" + std::to_string(i), found[i].ell);
    rep.kv("sieve.sign_" + std::to_string(i), sign_str(found[i].sign));
  }
  return exit_ok;
}

int cmd_tree(const RunConfig& cfg, Report& rep) {
  if (!is_prime(cfg.p) || cfg.p < 3) throw ConfigError("tree: --p must be an odd prime");
  if (cfg.depth < 1 || cfg.depth > 6) throw ConfigError("tree: --depth must lie in [1, 6]");
  if (level_order(cfg.p, cfg.depth) > 20000)
    throw ConfigError("tree: sphere too large to dump, lower --depth");
  int prec = std::min(max_padic_prec(cfg.p), cfg.depth + 6);
  TorusData t = TorusData::standard(cfg.p, prec);
  echo_base(cfg, rep);
  rep.kv("config.p", cfg.p);
  rep.kv("config.depth", cfg.depth);
  rep.kv("config.sphere", cfg.sphere);
  rep.kv("config.covering", cfg.covering);
  rep.kv("config.orbit", cfg.orbit);

  rep.section("torus-fixed geometry at p = " + std::to_string(cfg.p));
  rep.kv("tree.p", cfg.p);
  rep.kv("tree.depth", cfg.depth);
  rep.kv("tree.nonresidue", t.u);
  rep.kv("tree.fixed_vertex", t.fixed.str());

  if (cfg.sphere) {
    std::vector<TreeVertex> verts = sphere(t, cfg.depth);
    rep.kv("tree.sphere_size", verts.size());
    for (size_t i = 0; i < verts.size(); ++i)
      rep.kv("tree.vertex_" + std::to_string(i), verts[i].str());
  }
  if (cfg.covering) {
    std::vector<BoundaryBall> balls = covering(t, cfg.depth);
    rep.kv("tree.covering_size", balls.size());
    for (size_t i = 0; i < balls.size(); ++i)
      rep.kv("tree.ball_" + std::to_string(i), balls[i].str());
  }
  if (cfg.orbit) {
    TorusGenerator g = generator_for_depth(t, cfg.depth);
    rep.kv("tree.generator",
           std::to_string(g.x) + " + " + std::to_string(g.y) + "*sqrt(" + std::to_string(t.u) +
               ")" + (t.root_scale != 1 ? " (scale " + std::to_string(t.root_scale) + ")" : ""));
    std::vector<TreeEdge> path = consecutive_edges(t, cfg.depth);
    for (size_t i = 0; i < path.size(); ++i)
      rep.kv("tree.path_edge_" + std::to_string(i), path[i].str());
    std::vector<TreeEdge> orbit =
        orbit_of_edge(t, g, path.back(), level_order(cfg.p, cfg.depth));
    rep.kv("tree.orbit_size", orbit.size());
    for (size_t i = 0; i < orbit.size(); ++i)
      rep.kv("tree.orbit_edge_" + std::to_string(i), orbit[i].str());
  }
  return exit_ok;
}

int cmd_integrate_demo(const RunConfig& cfg, Report& rep) {
  if (!is_prime(cfg.p) || cfg.p < 3) throw ConfigError("integrate-demo: --p must be an odd prime");
  if (cfg.k < 1 || cfg.k > 4) throw ConfigError("integrate-demo: --k must lie in [1, 4]");
  if (cfg.depth < 1 || cfg.depth > 4)
    throw ConfigError("integrate-demo: --depth must lie in [1, 4]");
  echo_base(cfg, rep);
  rep.kv("config.p", cfg.p);
  rep.kv("config.k", cfg.k);
  rep.kv("config.depth", cfg.depth);
  rep.kv("config.seed", cfg.seed);

  PointSystem ps = spread_point_system(cfg.p, cfg.k, 1, {}, cfg.depth, cfg.seed);
  int prec = std::min(max_padic_prec(cfg.p), cfg.depth + cfg.k + 6);
  TorusData t = TorusData::standard(cfg.p, prec);
  std::vector<HarmonicMeasure> mu = measure_from_system(t, ps);
  BoundaryFn f = [](const TorusData& td, i128 a, i128 b) { return f_psi(td, a, b); };

  rep.section("two routes to the same invariant");
  std::vector<NormOneElem> product = integrate_mult(t, mu, f, cfg.k);
  rep.kv("integrate.product", product[0].str());
  bool stable = integration_stabilized(t, mu, f, cfg.k);
  rep.kv("integrate.stabilized", stable);

  std::vector<u64> via_integral = derivative_via_integration(t, ps, cfg.depth);
  std::vector<std::vector<u64>> via_groupring = kolyvagin_derivative(ps, cfg.depth);
  rep.kv("integrate.route_integral", via_integral[0]);
  rep.kv("integrate.route_groupring", via_groupring[0][0]);
  bool agree = via_integral[0] == via_groupring[0][0];
  rep.kv("integrate.routes_agree", agree);
  return (agree && stable) ? exit_ok : exit_check_failed;
}

int cmd_derive(const RunConfig& cfg, Report& rep) {
  PointSystem ps = require_system(cfg);
  require_sign(cfg.a_p, "--ap");
  require_sign(cfg.epsilon, "--eps");
  if (cfg.tate_val < 1) throw ConfigError("--tate-val must be >= 1");
  echo_base(cfg, rep);
  rep.kv("config.system_file", cfg.system_file);
  rep.kv("config.a_p", sign_str(cfg.a_p));
  rep.kv("config.epsilon", sign_str(cfg.epsilon));
  rep.kv("config.tate_val", cfg.tate_val);

  DerivedInvariant inv = mock_invariant(ps, cfg.a_p, cfg.epsilon, cfg.tate_val);
  rep.section("derivative ladder");
  rep.kv("derive.p", ps.p);
  rep.kv("derive.k", ps.k);
  rep.kv("derive.depth", ps.depth);
  rep.kv("derive.rank", ps.rank);
  for (int n = 1; n <= ps.depth; ++n) {
    std::string joined;
    for (int c = 0; c < ps.rank; ++c)
      joined += (c ? "," : "") + std::to_string(inv.ladder[n - 1][c]);
    rep.kv("derive.ladder_" + std::to_string(n), joined);
  }
  std::string value;
  for (int c = 0; c < ps.rank; ++c) value += (c ? "," : "") + std::to_string(inv.value[c]);
  rep.kv("derive.value", value);
  rep.kv("derive.stable_level", inv.stable_level);
  rep.kv("derive.stabilized", inv.stabilized);
  rep.kv("derive.sign", sign_str(inv.sign));
  rep.kv("derive.q_multiplier", inv.q_multiplier);
  if (!inv.stabilized)
    rep.note("ladder still moving at the deepest level: supply depth > k for a stable value");
  return inv.stabilized ? exit_ok : exit_check_failed;
}

int cmd_iwasawa(const RunConfig& cfg, Report& rep) {
  PointSystem ps = require_system(cfg);
  require_sign(cfg.a_p, "--ap");
  require_sign(cfg.epsilon, "--eps");
  if (cfg.tate_val < 1) throw ConfigError("--tate-val must be >= 1");
  if (cfg.delta_plus < 0 || cfg.delta_plus > 1 || cfg.delta_minus < 0 || cfg.delta_minus > 1)
    throw ConfigError("--delta-plus / --delta-minus must be 0 or 1");
  if (cfg.trunc < 2 || cfg.trunc > 7) throw ConfigError("--trunc must lie in [2, 7]");
  echo_base(cfg, rep);
  rep.kv("config.system_file", cfg.system_file);
  if (!cfg.bipartite_file.empty()) rep.kv("config.bipartite_file", cfg.bipartite_file);
  rep.kv("config.a_p", sign_str(cfg.a_p));
  rep.kv("config.epsilon", sign_str(cfg.epsilon));
  rep.kv("config.tate_val", cfg.tate_val);
  rep.kv("config.delta_plus", cfg.delta_plus);
  rep.kv("config.delta_minus", cfg.delta_minus);
  rep.kv("config.trunc", cfg.trunc);

  KappaClass kc = kappa_from_system(ps, cfg.a_p, cfg.tate_val, cfg.trunc);
  rep.section("kappa class and rank bounds");
  rep.kv("iwasawa.p", kc.p);
  rep.kv("iwasawa.k", kc.k);
  rep.kv("iwasawa.trunc", kc.trunc);
  rep.kv("iwasawa.rank", kc.rank);
  rep.kv("iwasawa.levels", kc.level.size());
  rep.kv("iwasawa.multiplier", kc.multiplier);
  for (size_t n = 0; n < kc.level.size(); ++n)
    rep.kv("iwasawa.aug_zero_" + std::to_string(n + 1), (bool)kc.augmentation_zero[n]);
  for (size_t n = 0; n + 1 < kc.level.size(); ++n)
    rep.kv("iwasawa.cores_ok_" + std::to_string(n + 1), (bool)kc.corestriction_ok[n]);
  for (u64 c = 0; c < kc.rank; ++c)
    rep.kv("iwasawa.kappa_" + std::to_string(c), kc.level.back()[c].str());

  bool ok = kc.certified();
  std::optional<int> ord = kappa_ord(kc);
  if (!ord) {
    rep.kv("iwasawa.ord", "infinite");
    rep.kv("iwasawa.rank_bound", "refused: the class vanishes at the deepest level");
    ok = false;
  } else {
    RankReport rr = rank_report(kc, cfg.epsilon, cfg.delta_plus, cfg.delta_minus);
    rep.kv("iwasawa.ord", rr.ord_kappa);
    rep.kv("iwasawa.char_ord_bound", rr.char_ord_bound);
    rep.kv("iwasawa.rank_bound", rr.rank_bound_value);
    for (size_t i = 0; i < rr.table.size(); ++i) {
      rep.kv("iwasawa.split_" + std::to_string(i),
             "(" + std::to_string(rr.table[i].r_plus) + "," +
                 std::to_string(rr.table[i].r_minus) + ")");
      rep.kv("iwasawa.split_" + std::to_string(i) + ".max", rr.table[i].max_rank_delta);
    }
  }

  if (!cfg.bipartite_file.empty()) {
    BipartiteData data = load_bipartite_file(cfg.bipartite_file);
    BipartiteReport br = validate_bipartite(data);
    rep.kv("iwasawa.bipartite", br.ok ? "pass" : "fail");
    for (size_t i = 0; i < br.failures.size(); ++i)
      rep.kv("iwasawa.bipartite_failure_" + std::to_string(i), br.failures[i]);
    ok = ok && br.ok;
  }
  return ok ? exit_ok : exit_check_failed;
}

// one worked example: common integer facts, expected-value verification, and
// the optional analytic block
struct ExampleOutcome {
  bool ok = true;
  CurveFile cf;
};

ExampleOutcome example_common(Report& rep, const std::string& key, const char* fixture, i64 D,
                              u64 p, const char* want_reduction, i64 want_ap, int want_tate,
                              int want_rnQ, u64 want_nplus, u64 want_nminus) {
  ExampleOutcome out;
  out.cf = parse_curve_text(fixture, "builtin:" + key);
  const CurveModel& E = out.cf.curve;
  FieldData K = FieldData::make(D);

  rep.kv(key + ".label", E.label);
  rep.kv(key + ".curve", E.str());
  rep.kv(key + ".conductor", E.N);
  rep.kv(key + ".field_D", D);
  rep.kv(key + ".p", p);

  const char* sp = splitting_name(K.splitting_at(p));
  rep.kv(key + ".splitting_at_p", sp);
  out.ok &= std::string(sp) == "inert";

  ReductionInfo ri = reduction_type(E, p);
  rep.kv(key + ".reduction_at_p", reduction_type_name(ri.type));
  rep.kv(key + ".a_p", ri.a_p);
  rep.kv(key + ".tate_valuation", ri.tate_val);
  out.ok &= std::string(reduction_type_name(ri.type)) == want_reduction && ri.a_p == want_ap &&
            ri.tate_val == want_tate;

  int rnQ = root_number(E);
  int rnK = root_number_over_K(E, D);
  rep.kv(key + ".root_number_Q", sign_str(rnQ));
  rep.kv(key + ".root_number_K", sign_str(rnK));
  out.ok &= rnQ == want_rnQ && rnK == 1;

  Factorization fac = factor_N(E, K, p);
  rep.kv(key + ".n_plus", fac.n_plus);
  rep.kv(key + ".n_minus", fac.n_minus);
  out.ok &= fac.n_plus == want_nplus && fac.n_minus == want_nminus;

  rep.kv(key + ".asserted_rank_Q", out.cf.asserted_rank_Q);
  rep.kv(key + ".asserted_rank_K", out.cf.asserted_rank_K);

  HypothesisReport hr =
      check_hypotheses(E, K, p, out.cf.rho_surjective_asserted, out.cf.citation);
  rep.kv(key + ".hypotheses", hr.all_ok() ? "pass" : "fail");
  out.ok &= hr.all_ok();
  return out;
}

int cmd_examples(const RunConfig& cfg, Report& rep) {
  echo_base(cfg, rep);
  rep.kv("config.skip_lvalues", cfg.skip_lvalues);
  rep.kvd("config.tolerance", cfg.tolerance);
  const double tol = cfg.tolerance;
  bool all = true;

  // ---- conductor 37 over Q(sqrt(-2)) ----
  rep.section("Example 1: conductor 37, K = Q(sqrt(-2)), p = 37");
  ExampleOutcome e1 =
      example_common(rep, "example1", kFixture37a, -8, 37, "nonsplit", -1, 1, -1, 1, 1);
  bool ok1 = e1.ok;
  if (!cfg.skip_lvalues) {
    // sign -1 forces the Q-side zero, and with it the whole K-side product
    LValueResult l1 = l_value(e1.cf.curve, tol);
    rep.kv("example1.lvalue_Q_forced_zero", l1.forced_zero);
    rep.kvd("example1.lvalue_Q", l1.value);
    rep.kv("example1.lvalue_K_vanishes", l1.forced_zero);
    ok1 &= l1.forced_zero && l1.value == 0.0;
  }
  rep.kv("example1.status", ok1 ? "ok" : "mismatch");
  all &= ok1;

  // ---- conductor 109 over Q(sqrt(-2)) ----
  rep.section("Example 2: conductor 109, K = Q(sqrt(-2)), p = 109");
  ExampleOutcome e2 =
      example_common(rep, "example2", kFixture109a, -8, 109, "split", 1, 1, 1, 1, 1);
  bool ok2 = e2.ok;
  if (!cfg.skip_lvalues) {
    // here the Q-side survives and the twisted side vanishes numerically
    LValueResult l2 = l_value(e2.cf.curve, tol);
    rep.kvd("example2.lvalue_Q", l2.value);
    rep.kv("example2.lvalue_Q_nonzero", std::fabs(l2.value) > 1e-3);
    CurveModel tw2 = quadratic_twist(e2.cf.curve, -8);
    LValueResult l2t = l_value_with_sign(tw2, twisted_root_number(e2.cf.curve, -8), tol);
    rep.kvd("example2.lvalue_twist", l2t.value);
    rep.kv("example2.lvalue_twist_vanishes", std::fabs(l2t.value) < 1e-4);
    rep.kv("example2.lvalue_K_vanishes", std::fabs(l2.value * l2t.value) < 1e-4);
    ok2 &= std::fabs(l2.value) > 1e-3 && std::fabs(l2t.value) < 1e-4;
  }
  rep.kv("example2.status", ok2 ? "ok" : "mismatch");
  all &= ok2;

  // ---- conductor 817 over Q(sqrt(-7)) ----
  rep.section("Example 3: conductor 817 = 19*43, K = Q(sqrt(-7)), p = 19");
  ExampleOutcome e3 =
      example_common(rep, "example3", kFixture817a, -7, 19, "nonsplit", -1, 2, 1, 43, 1);
  bool ok3 = e3.ok;
  FieldData K3 = FieldData::make(-7);
  rep.kv("example3.splitting_at_43", splitting_name(K3.splitting_at(43)));
  ok3 &= K3.splitting_at(43) == 1;
  if (!cfg.skip_lvalues) {
    // the vanishing side is now the untwisted one; the twist stays away from 0
    LValueResult l3 = l_value(e3.cf.curve, tol);
    rep.kvd("example3.lvalue_Q", l3.value);
    rep.kv("example3.lvalue_Q_vanishes", std::fabs(l3.value) < 1e-4);
    CurveModel tw3 = quadratic_twist(e3.cf.curve, -7);
    LValueResult l3t = l_value_with_sign(tw3, twisted_root_number(e3.cf.curve, -7), tol);
    rep.kvd("example3.lvalue_twist", l3t.value);
    rep.kv("example3.lvalue_twist_nonzero", std::fabs(l3t.value) > 1e-3);
    rep.kv("example3.lvalue_K_vanishes", std::fabs(l3.value * l3t.value) < 1e-4);
    ok3 &= std::fabs(l3.value) < 1e-4 && std::fabs(l3t.value) > 1e-3;
  }
  rep.kv("example3.status", ok3 ? "ok" : "mismatch");
  all &= ok3;

  rep.kv("examples.all", all ? "ok" : "mismatch");
  return all ? exit_ok : exit_check_failed;
}

}  // namespace

int run_command(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  Report rep(cfg.mode);
  int code = exit_ok;
  try {
    if (cfg.command == "check") code = cmd_check(cfg, rep);
    else if (cfg.command == "ap") code = cmd_ap(cfg, rep);
    else if (cfg.command == "lvalue") code = cmd_lvalue(cfg, rep);
    else if (cfg.command == "sieve") code = cmd_sieve(cfg, rep);
    else if (cfg.command == "tree") code = cmd_tree(cfg, rep);
    else if (cfg.command == "integrate-demo") code = cmd_integrate_demo(cfg, rep);
    else if (cfg.command == "derive") code = cmd_derive(cfg, rep);
    else if (cfg.command == "iwasawa") code = cmd_iwasawa(cfg, rep);
    else if (cfg.command == "examples") code = cmd_examples(cfg, rep);
    else throw ConfigError("unknown command: " + cfg.command);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return exit_config_error;
  } catch (const std::exception& e) {
    err << "computation failed: " << e.what() << "\n";
    return exit_computation_failed;
  }
  out << rep.str();
  return code;
}

}  // namespace plectic
