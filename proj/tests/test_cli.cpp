#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "corpus.hpp"
#include "feyn/cli.hpp"
#include "json.hpp"

using namespace feyn;
using nlohmann::json;

namespace {

const std::string kCli = FEYN_CLI_PATH;

std::string graph(const std::string& name) { return corpus::data_path("data/graphs/" + name + ".graph"); }
std::string phi(const std::string& name) { return corpus::data_path("data/phi/" + name + ".json"); }

RunConfig config(const std::string& command, const std::string& g) {
  RunConfig c;
  c.command = command;
  c.graph_path = graph(g);
  return c;
}

// numbers agree to 1e-9 relative; everything else exactly
bool close(const json& a, const json& b, std::string& where) {
  if (a.is_number() && b.is_number()) {
    double x = a.get<double>(), y = b.get<double>();
    if (std::abs(x - y) <= 1e-12 + 1e-9 * std::max(std::abs(x), std::abs(y))) return true;
    where += " " + a.dump() + " vs " + b.dump();
    return false;
  }
  if (a.type() != b.type()) {
    where += " type";
    return false;
  }
  if (a.is_object()) {
    if (a.size() != b.size()) {
      where += " keys";
      return false;
    }
    for (auto& [k, v] : a.items()) {
      if (!b.contains(k)) {
        where += " missing " + k;
        return false;
      }
      std::string sub = where + "." + k;
      if (!close(v, b[k], sub)) {
        where = sub;
        return false;
      }
    }
    return true;
  }
  if (a.is_array()) {
    if (a.size() != b.size()) {
      where += " length";
      return false;
    }
    for (size_t i = 0; i < a.size(); ++i) {
      std::string sub = where + "[" + std::to_string(i) + "]";
      if (!close(a[i], b[i], sub)) {
        where = sub;
        return false;
      }
    }
    return true;
  }
  return a == b;
}

void golden(const std::string& name, const RunConfig& cfg) {
  auto r = run(cfg);
  REQUIRE_MESSAGE(r.exit_code == 0, name << ": " << r.error);
  const std::string path = corpus::data_path("tests/golden/" + name + ".json");
  if (std::getenv("FEYN_UPDATE_GOLDEN")) {
    std::ofstream(path) << r.output;
    return;
  }
  std::ifstream in(path);
  REQUIRE_MESSAGE(in.good(), "missing golden file " << path << " (regenerate with FEYN_UPDATE_GOLDEN=1)");
  std::stringstream ss;
  ss << in.rdbuf();
  std::string where = name;
  CHECK_MESSAGE(close(json::parse(r.output), json::parse(ss.str()), where), where);
}

int exit_status(const std::string& args) {
  int rc = std::system((kCli + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST_CASE("golden outputs of the structural commands") {
  for (std::string g : {"single_edge", "bigon", "triangle"})
    for (std::string cmd : {"classify", "kirchhoff", "minverse", "dinverse", "corners"})
      golden(g + "_" + cmd, config(cmd, g));
}

TEST_CASE("golden outputs of the integrals") {
  struct Case {
    std::string graph, phi;
  };
  for (auto& c : std::vector<Case>{{"single_edge", "two_vertex_d1"}, {"bigon", "two_vertex_d1"},
                                   {"triangle", "three_vertex_d1"}}) {
    auto cfg = config("eval", c.graph);
    cfg.phi_path = phi(c.phi);
    cfg.eps = 0.1;
    cfg.L = "1";
    golden(c.graph + "_eval", cfg);
  }
  auto a = config("anomaly", "bigon");
  a.phi_path = phi("two_vertex_d1");
  golden("bigon_anomaly", a);
  auto q = config("quadratic-check", "triangle");
  q.phi_path = phi("three_vertex_d1");
  golden("triangle_quadratic-check", q);
}

TEST_CASE("output is byte-identical across runs") {
  auto cfg = config("eval", "triangle");
  cfg.phi_path = phi("three_vertex_d1");
  auto a = run(cfg), b = run(cfg);
  REQUIRE(a.exit_code == 0);
  CHECK(a.output == b.output);
  cfg.command = "mc-oracle";
  cfg.samples = 20000;
  cfg.seed = 5;
  auto c = run(cfg), d = run(cfg);
  REQUIRE(c.exit_code == 0);
  CHECK(c.output == d.output);
  cfg.seed = 6;
  CHECK(run(cfg).output != c.output);
}

TEST_CASE("text and csv renderings carry the same keys") {
  auto cfg = config("classify", "triangle");
  auto j = json::parse(run(cfg).output);
  cfg.output = "text";
  auto text = run(cfg).output;
  cfg.output = "csv";
  auto csv = run(cfg).output;
  CHECK(csv.rfind("key,value\n", 0) == 0);
  for (auto& [k, v] : j.items()) {
    CHECK(text.find(k + ": ") != std::string::npos);
    CHECK(csv.find("\n" + k + ",") != std::string::npos);
  }
}

TEST_CASE("the --d option overrides the file dimension") {
  auto cfg = config("classify", "triangle");
  cfg.d = 2;
  auto j = json::parse(run(cfg).output);
  CHECK(j["d"] == 2);
  CHECK(j["laman"] == true);
}

TEST_CASE("exit codes") {
  const std::string tri = " --graph " + graph("triangle");
  CHECK(exit_status("classify" + tri) == 0);
  CHECK(exit_status("") == 1);
  CHECK(exit_status("frobnicate" + tri) == 1);
  CHECK(exit_status("classify --graph /nonexistent.graph") == 1);
  CHECK(exit_status("eval" + tri) == 1);  // --phi missing
  CHECK(exit_status("eval" + tri + " --phi " + phi("three_vertex_d1") + " --eps 0.01 --max-evals 50") == 3);
  CHECK(exit_status("eval" + tri + " --phi " + phi("three_vertex_d1") + " --eps -1") == 1);
  // the triangle is not Laman in one dimension: reported, not an error
  CHECK(exit_status("anomaly" + tri + " --phi " + phi("three_vertex_d1")) == 0);
  CHECK(exit_status("boundary-decay" + tri + " --phi " + phi("three_vertex_d1")) == 2);

  std::string loop = "/tmp/feyn_cli_loop.graph";
  std::ofstream(loop) << "dim 1\nvertices 2\nedge 1 2\nedge 1 1\n";
  CHECK(exit_status("classify --graph " + loop) == 1);
}

TEST_CASE("boundary decay fails its check in one dimension") {
  auto cfg = config("boundary-decay", "triangle");
  cfg.phi_path = phi("three_vertex_d1");
  auto r = run(cfg);
  CHECK(r.exit_code == 2);
  auto two = config("boundary-decay", "single_edge");
  two.d = 2;
  two.phi_path = phi("two_vertex_d2");
  auto ok = run(two);
  CHECK(ok.exit_code == 0);
}
