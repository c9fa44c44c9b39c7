#pragma once
// Small path and file helpers shared by the tests.

#include "snapbeam/solver.hpp"

#include <cstdlib>
#include <sys/wait.h>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace oracles {

/// Sign changes of the discrete d(lambda) sequence, zero increments skipped.
inline int dlambda_sign_changes(const std::vector<double>& lambdas) {
  int changes = 0, last = 0;
  for (std::size_t i = 0; i + 1 < lambdas.size(); ++i) {
    const double d = lambdas[i + 1] - lambdas[i];
    const int s = (d > 0) - (d < 0);
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

inline std::vector<double> lambdas_of(const snapbeam::EquilibriumPath& path) {
  std::vector<double> out;
  for (const auto& p : path.points) out.push_back(p.state.lambda);
  return out;
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Numeric CSV rows (header and '#' lines skipped).
inline std::vector<std::vector<double>> read_numeric_csv(const std::string& path) {
  std::vector<std::vector<double>> rows;
  std::ifstream in(path);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
    rows.push_back(row);
  }
  return rows;
}

/// Runs a shell command, returning its exit status.
inline int run(const std::string& command) {
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace oracles
