#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "feyn/quadrature.hpp"

namespace feyn {

struct RunConfig {
  std::string command;
  std::string graph_path;
  std::optional<int> d;  // overrides the dimension in the graph file
  std::string phi_path;
  std::string output = "json";  // json | csv | text
  double eps = 0.1;
  std::string L = "1";  // "inf" allowed
  std::optional<double> rtol, atol;
  std::optional<long> max_evals;
  int threads = 1;
  bool mc = false;
  long samples = 100000;
  std::uint64_t seed = 1;
  bool short_circuit = true;
  std::vector<double> Ls{1, 2, 4, 8};
  double tol = 1e-4;
  double face_radius = 1e-7;
};

struct RunResult {
  int exit_code = 0;  // 0 ok, 1 parse/usage, 2 identity violated, 3 non-convergence
  std::string output;
  std::string error;
};

RunResult run(const RunConfig& cfg);
int cli_main(int argc, char** argv);

}  // namespace feyn
