#pragma once

#include <Eigen/Dense>
#include <complex>

namespace spinqec {

// Dense complex operator on an n-qubit register. States are traceless
// deviation operators, gates are unitaries; both share this representation.
using Operator = Eigen::MatrixXcd;

enum class Pauli { I, X, Y, Z };

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kUnitaryTol = 1e-10;

Operator pauli_matrix(Pauli p);  // 2x2

// Operator acting as p on qubit `qubit` (1-based) and identity elsewhere.
// Qubit 1 is the leftmost tensor factor.
Operator pauli_embed(int n_qubits, int qubit, Pauli p);

// Kronecker product; refuses results above 2^20 on a side.
Operator kron(const Operator& a, const Operator& b);

bool is_hermitian(const Operator& a, double tol = kHermitianTol);
bool is_unitary(const Operator& a, double tol = kUnitaryTol);

// exp(-i h t) for Hermitian h via eigendecomposition.
Operator expm_hermitian(const Operator& h, double t_s);

// |Tr(u^dag v)| / dim; invariant under a global phase of either argument.
double unitary_fidelity(const Operator& u, const Operator& v);

// Re Tr(observable * state).
double expect(const Operator& observable, const Operator& state);

// exp(-i (angle/2)(cos(phase) X + sin(phase) Y)) on one qubit of the register.
Operator rotation(int n_qubits, int qubit, double angle_rad, double phase_rad);

}  // namespace spinqec
