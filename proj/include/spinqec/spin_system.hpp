#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spinqec/operator.hpp"

namespace spinqec {

enum class CouplingRegime { weak, strong };

// Molecule configuration: chemical shifts and couplings in Hz, relaxation
// constants in seconds. Immutable after construction/load.
struct SpinSystem {
  int n = 0;
  std::vector<std::string> labels;
  std::vector<double> nu_hz;
  Eigen::MatrixXd j_hz;                 // symmetric, zero diagonal
  std::vector<CouplingRegime> regime;   // n*n, row-major, pair (i,j) 1-based
  std::vector<double> t2_s;
  std::vector<double> t1_s;             // empty when not provided; carried, unused by the noise model

  CouplingRegime regime_at(int i, int j) const { return regime[(i - 1) * n + (j - 1)]; }
  bool has_t1() const { return !t1_s.empty(); }
};

// Throws std::invalid_argument naming the offending field.
void validate(const SpinSystem& s);

// H = -pi sum_i nu_i Z_i + (pi/2) sum_{i<j} [ weak: J_ij Z_i Z_j |
// strong: J_ij (X_i X_j + Y_i Y_j + Z_i Z_j) ],  in rad/s.
Operator build_hamiltonian(const SpinSystem& s);

// Config file is JSON (comments allowed); see configs/tce.json for the schema.
SpinSystem parse_spin_system(const std::string& json_text, const std::string& origin = "<config>");
SpinSystem load_spin_system(const std::string& path);

}  // namespace spinqec
