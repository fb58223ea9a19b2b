#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "plectic/cli.hpp"
#include "plectic/iwasawa.hpp"

using namespace plectic;

namespace {

const std::string fx = PLECTIC_FIXTURE_DIR;

struct RunResult {
  int code = -1;
  std::string out, err;
};

RunResult run(const RunConfig& cfg) {
  std::ostringstream out, err;
  RunResult r;
  r.code = run_command(cfg, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

bool has_line(const std::string& text, const std::string& line) {
  std::istringstream in(text);
  std::string cur;
  while (std::getline(in, cur))
    if (cur == line) return true;
  return false;
}

RunConfig machine_cfg(const std::string& command) {
  RunConfig cfg;
  cfg.command = command;
  cfg.mode = OutputMode::machine;
  return cfg;
}

// minimal well-formed inline curve text
const char* kInlineCurve =
    "label = t37\n"
    "a1 = 0\na2 = 0\na3 = 1\na4 = -1\na6 = 0\n"
    "conductor = 37\n";

}  // namespace

TEST_CASE("curve files: fixtures parse, malformed inputs are rejected with their origin") {
  CurveFile one = load_curve_file(fx + "/example1.curve");
  CHECK(one.curve.label == "37a");
  CHECK(one.curve.N == 37);
  CHECK(one.rho_surjective_asserted);
  CHECK(!one.citation.empty());
  CHECK(one.asserted_rank_Q == 1);
  CHECK(one.asserted_rank_K == 2);

  CurveFile three = load_curve_file(fx + "/example3.curve");
  CHECK(three.curve.a2 == 1);
  CHECK(three.curve.N == 817);
  CHECK(three.asserted_rank_Q == 2);

  // inline text without the optional keys: absent ranks read back as -1
  CurveFile inl = parse_curve_text(kInlineCurve, "inline");
  CHECK(inl.curve.label == "t37");
  CHECK(!inl.rho_surjective_asserted);
  CHECK(inl.asserted_rank_Q == -1);

  auto rejects = [](const std::string& text, const char* needle) {
    try {
      parse_curve_text(text, "origin");
      FAIL_CHECK("accepted: " << text);
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("origin") != std::string::npos);
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  rejects("a1 = 0\n", "missing required key");
  rejects(std::string(kInlineCurve) + "a1 = 1\n", "duplicate key 'a1'");
  rejects(std::string(kInlineCurve) + "color = blue\n", "unknown key 'color'");
  rejects("label = x\na1 = q\na2 = 0\na3 = 1\na4 = -1\na6 = 0\nconductor = 37\n",
          "not an integer");
  rejects("just some words\n", "expected `key = value`");
  rejects(std::string(kInlineCurve) + "rho_mod_p_surjective = maybe\n", "expected yes/no");
  rejects(std::string(kInlineCurve) + "asserted_rank_Q = -3\n", "must be >= 0");
  // arithmetic that contradicts itself: conductor 35 for the discriminant of 37a
  rejects("label = x\na1 = 0\na2 = 0\na3 = 1\na4 = -1\na6 = 0\nconductor = 35\n",
          "invalid curve model");

  CHECK_THROWS_AS(load_curve_file(fx + "/no_such_file.curve"), ConfigError);
}

TEST_CASE("point-system files: header, shape, and coherence are enforced") {
  PointSystem ps = load_system_file(fx + "/sample.system");
  CHECK(ps.p == 5);
  CHECK(ps.k == 1);
  CHECK(ps.depth == 3);
  CHECK(ps.rank == 1);
  CHECK(validate_point_system(ps).ok);

  // a one-level system inline, comments and blank lines skipped
  PointSystem tiny = parse_system_text("# tower\n\n5 1 1 1\n1 2 3 4 0 0\n", "inline");
  CHECK(tiny.depth == 1);
  CHECK(tiny.level[0][3][0] == 4);
  CHECK(validate_point_system(tiny).ok);

  auto rejects = [](const std::string& text, const char* needle) {
    try {
      parse_system_text(text, "origin");
      FAIL_CHECK("accepted: " << text);
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  rejects("5 1 1\n1 2 3 4 0 0\n", "header");
  rejects("5 1 1 1 9\n1 2 3 4 0 0\n", "trailing tokens on the header");
  rejects("5 0 1 1\n1 2 3 4 0 0\n", "out of range");
  rejects("5 1 1 1\n1 2 3\n", "needs 6 integers");
  rejects("5 1 1 1\n1 2 3 4 0 0 7\n", "trailing tokens at level 1");
  rejects("5 1 1 1\n1 2 3 -4 0 0\n", "negative entry");
  rejects("5 1 2 1\n1 2 3 4 0 0\n", "unexpected end of file");

  // parse accepts an incoherent tower; validation is a separate verdict
  PointSystem skew = parse_system_text(
      "5 1 2 1\n1 2 3 4 0 0\n1 2 3 4 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 1 0 0 0 0 4\n",
      "inline");
  SystemReport verdict = validate_point_system(skew);
  CHECK(!verdict.ok);
  CHECK(verdict.level == 2);
}

TEST_CASE("bipartite JSON: fixture round-trip and malformed documents") {
  BipartiteData data = load_bipartite_file(fx + "/sample_bipartite.json");
  CHECK(data.nodes.size() == 3);
  CHECK(data.edges.size() == 2);
  CHECK(validate_bipartite(data).ok);
  CHECK(data.nodes[1].lambda.str() == "6 + 5*T + 4*T^2 + 5*T^3");

  CHECK_THROWS_AS(parse_bipartite_json("not json at all", "origin"), ConfigError);
  CHECK_THROWS_AS(parse_bipartite_json(R"({"k": 2, "trunc": 4})", "origin"), ConfigError);
  // coefficient arrays must have exactly trunc entries
  CHECK_THROWS_AS(parse_bipartite_json(
                      R"({"p": 5, "k": 2, "trunc": 4,
                          "nodes": [{"m": [], "indefinite": true, "kappa": [[1, 2]]}],
                          "edges": []})",
                      "origin"),
                  ConfigError);
  // an indefinite node carries kappa, not lambda
  CHECK_THROWS_AS(parse_bipartite_json(
                      R"({"p": 5, "k": 2, "trunc": 4,
                          "nodes": [{"m": [], "indefinite": true, "lambda": [1, 0, 0, 0]}],
                          "edges": []})",
                      "origin"),
                  ConfigError);
}

TEST_CASE("run_command: machine reports are line-stable key = value facts") {
  RunConfig cfg = machine_cfg("examples");
  cfg.skip_lvalues = true;
  RunResult r = run(cfg);
  CHECK(r.code == exit_ok);
  CHECK(r.err.empty());
  CHECK(has_line(r.out, "example1.splitting_at_p = inert"));
  CHECK(has_line(r.out, "example1.reduction_at_p = nonsplit"));
  CHECK(has_line(r.out, "example1.a_p = -1"));
  CHECK(has_line(r.out, "example1.root_number_Q = -1"));
  CHECK(has_line(r.out, "example2.reduction_at_p = split"));
  CHECK(has_line(r.out, "example2.root_number_K = +1"));
  CHECK(has_line(r.out, "example3.n_plus = 43"));
  CHECK(has_line(r.out, "example3.n_minus = 1"));
  CHECK(has_line(r.out, "example3.splitting_at_43 = split"));
  CHECK(has_line(r.out, "examples.all = ok"));

  // every nonempty machine line is of the form `key = value`
  std::istringstream lines(r.out);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    CHECK(line.find(" = ") != std::string::npos);
  }

  RunConfig tr = machine_cfg("tree");
  tr.p = 5;
  tr.depth = 2;
  tr.sphere = true;
  RunResult rt = run(tr);
  CHECK(rt.code == exit_ok);
  CHECK(has_line(rt.out, "tree.sphere_size = 30"));
  CHECK(rt.out.find("tree.vertex_29 = ") != std::string::npos);

  RunConfig ap = machine_cfg("ap");
  ap.curve_file = fx + "/example1.curve";
  ap.ell = 2;
  RunResult ra = run(ap);
  CHECK(ra.code == exit_ok);
  CHECK(ra.out.find("a_2 = -2") != std::string::npos);
}

TEST_CASE("run_command: derive and iwasawa consume the sample fixtures") {
  RunConfig dv = machine_cfg("derive");
  dv.system_file = fx + "/sample.system";
  RunResult rd = run(dv);
  CHECK(rd.code == exit_ok);
  CHECK(has_line(rd.out, "derive.stabilized = true"));
  CHECK(has_line(rd.out, "derive.value = 1"));

  RunConfig iw = machine_cfg("iwasawa");
  iw.system_file = fx + "/sample.system";
  iw.bipartite_file = fx + "/sample_bipartite.json";
  RunResult ri = run(iw);
  CHECK(ri.code == exit_ok);
  CHECK(has_line(ri.out, "iwasawa.cores_ok_1 = true"));
  CHECK(has_line(ri.out, "iwasawa.ord = 1"));
  CHECK(has_line(ri.out, "iwasawa.rank_bound = 3"));
  CHECK(has_line(ri.out, "iwasawa.bipartite = pass"));

  RunConfig demo = machine_cfg("integrate-demo");
  demo.p = 5;
  demo.k = 2;
  demo.depth = 3;
  RunResult rm = run(demo);
  CHECK(rm.code == exit_ok);
  CHECK(has_line(rm.out, "integrate.routes_agree = true"));
  CHECK(has_line(rm.out, "integrate.stabilized = true"));
}

TEST_CASE("run_command: human mode wraps the same facts in readable sections") {
  RunConfig cfg;
  cfg.command = "check";
  cfg.curve_file = fx + "/example1.curve";
  cfg.D = -8;
  cfg.p = 37;
  RunResult r = run(cfg);
  CHECK(r.code == exit_ok);
  CHECK(r.out.find("-- hypothesis checklist") != std::string::npos);
  CHECK(r.out.find("p_inert_in_K: PASS") != std::string::npos);
  CHECK(r.out.find("rho_mod_p_surjective: ASSERTED") != std::string::npos);
  CHECK(has_line(r.out, "check.all = pass"));

  // the same checklist fails loudly at a good prime
  cfg.p = 5;
  RunResult bad = run(cfg);
  CHECK(bad.code == exit_check_failed);
  CHECK(bad.out.find("multiplicative_at_p: FAIL") != std::string::npos);
  CHECK(has_line(bad.out, "check.all = fail"));
}

TEST_CASE("run_command: exit statuses separate config, check, and computation failures") {
  // config error: missing file, nothing on stdout, diagnosis on stderr
  RunConfig missing = machine_cfg("check");
  missing.curve_file = fx + "/no_such_file.curve";
  RunResult rm = run(missing);
  CHECK(rm.code == exit_config_error);
  CHECK(rm.out.empty());
  CHECK(rm.err.find("config error") != std::string::npos);

  // config error: malformed file contents, still no partial report
  const char* tmp_path = "cli_test_bad_curve.tmp";
  {
    std::ofstream tmp(tmp_path);
    tmp << "label = broken\na1 = 0\n";
  }
  RunConfig broken = machine_cfg("check");
  broken.curve_file = tmp_path;
  RunResult rb = run(broken);
  std::remove(tmp_path);
  CHECK(rb.code == exit_config_error);
  CHECK(rb.out.empty());
  CHECK(rb.err.find("missing required key") != std::string::npos);

  RunConfig unknown = machine_cfg("frobnicate");
  RunResult ru = run(unknown);
  CHECK(ru.code == exit_config_error);
  CHECK(ru.err.find("unknown command") != std::string::npos);

  // flag validation: a sign that is not a sign
  RunConfig badap = machine_cfg("derive");
  badap.system_file = fx + "/sample.system";
  badap.a_p = 2;
  CHECK(run(badap).code == exit_config_error);

  // computation failure: a good prime past the point-count budget
  RunConfig heavy = machine_cfg("ap");
  heavy.curve_file = fx + "/example1.curve";
  heavy.ell = 1000003;
  RunResult rh = run(heavy);
  CHECK(rh.code == exit_computation_failed);
  CHECK(rh.out.empty());
  CHECK(rh.err.find("computation failed") != std::string::npos);

  // check failure: an incoherent system is a config error...
  RunConfig skew = machine_cfg("derive");
  const char* skew_path = "cli_test_skew_system.tmp";
  {
    std::ofstream tmp(skew_path);
    tmp << "5 1 2 1\n1 2 3 4 0 0\n"
        << "1 2 3 4 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 1 0 0 0 0 4\n";
  }
  skew.system_file = skew_path;
  RunResult rs = run(skew);
  std::remove(skew_path);
  CHECK(rs.code == exit_config_error);
  CHECK(rs.err.find("does not trace") != std::string::npos);
}

TEST_CASE("the installed binary exposes the exact same surface") {
  const std::string bin = PLECTIC_BIN_PATH;
  auto capture = [&](const std::string& args, int* code) {
    std::string cmd = bin + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[512];
    while (fgets(buf, sizeof buf, pipe)) out += buf;
    int status = pclose(pipe);
    *code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return out;
  };

  int code = -1;
  std::string out = capture("examples --machine --skip-lvalues", &code);
  CHECK(code == 0);
  CHECK(has_line(out, "example1.splitting_at_p = inert"));
  CHECK(has_line(out, "examples.all = ok"));

  out = capture("tree --p 5 --depth 2 --sphere --machine", &code);
  CHECK(code == 0);
  CHECK(has_line(out, "tree.sphere_size = 30"));

  out = capture("ap --curve " + fx + "/example1.curve --ell 2 --machine", &code);
  CHECK(code == 0);
  CHECK(out.find("a_2 = -2") != std::string::npos);

  // argv-level misuse is a config error
  capture("tree --p 5 --no-such-flag", &code);
  CHECK(code == exit_config_error);
  capture("derive", &code);  // missing required --system
  CHECK(code == exit_config_error);
}
