#pragma once

#include <array>
#include <vector>

#include "spinqec/operator.hpp"
#include "spinqec/spin_system.hpp"

namespace spinqec {

// Uncorrelated per-qubit phase-flip channel for three qubits. The Kraus set
// is the 8-fold tensor expansion of {sqrt(1-p_i) I, sqrt(p_i) Z_i}; when the
// T1 extension is enabled it grows to the dephasing/amplitude-damping
// product set.
struct DephasingChannel {
  std::array<double, 3> p{};  // phase-flip probability per qubit
  std::vector<Operator> kraus;
};

// p(t) = (1 - exp(-t/T2)) / 2, so coherences decay as exp(-t/T2).
double p_from_delay(double t_s, double t2_s);

DephasingChannel make_channel(double t_s, const SpinSystem& s);
DephasingChannel make_channel_from_p(const std::array<double, 3>& p);

// Optional extension: composes per-qubit amplitude damping with rate 1/T1 on
// top of the dephasing. Off by default everywhere; excluded from acceptance.
DephasingChannel make_channel_with_t1(double t_s, const SpinSystem& s);

// Kraus-sum route: sum_k K rho K^dag.
Operator apply_channel(const DephasingChannel& ch, const Operator& state);

// Independent route for pure dephasing: scales each Pauli-string component by
// prod_{i: string has X or Y on i} (1 - 2 p_i). Agrees with the Kraus route
// to 1e-12.
Operator apply_channel_pauli(const DephasingChannel& ch, const Operator& state);

}  // namespace spinqec
