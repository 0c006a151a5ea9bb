#include "spinqec/operator.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace spinqec {

using std::complex;

Operator pauli_matrix(Pauli p) {
  Operator m(2, 2);
  switch (p) {
    case Pauli::I:
      m << 1, 0, 0, 1;
      break;
    case Pauli::X:
      m << 0, 1, 1, 0;
      break;
    case Pauli::Y:
      m << 0, complex<double>(0, -1), complex<double>(0, 1), 0;
      break;
    case Pauli::Z:
      m << 1, 0, 0, -1;
      break;
  }
  return m;
}

Operator kron(const Operator& a, const Operator& b) {
  const Eigen::Index rows = a.rows() * b.rows();
  const Eigen::Index cols = a.cols() * b.cols();
  if (rows > (1 << 20) || cols > (1 << 20))
    throw std::invalid_argument("kron: result dimension exceeds 2^20");
  Operator out(rows, cols);
  for (Eigen::Index r = 0; r < a.rows(); ++r)
    for (Eigen::Index c = 0; c < a.cols(); ++c)
      out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
  return out;
}

Operator pauli_embed(int n_qubits, int qubit, Pauli p) {
  if (n_qubits < 1) throw std::invalid_argument("pauli_embed: n_qubits must be >= 1");
  if (qubit < 1 || qubit > n_qubits)
    throw std::invalid_argument("pauli_embed: qubit index " + std::to_string(qubit) +
                                " out of range [1," + std::to_string(n_qubits) + "]");
  Operator out = Operator::Identity(1, 1);
  for (int k = 1; k <= n_qubits; ++k)
    out = kron(out, pauli_matrix(k == qubit ? p : Pauli::I));
  return out;
}

bool is_hermitian(const Operator& a, double tol) {
  if (a.rows() != a.cols()) return false;
  return (a - a.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

bool is_unitary(const Operator& a, double tol) {
  if (a.rows() != a.cols()) return false;
  Operator d = a.adjoint() * a - Operator::Identity(a.rows(), a.cols());
  return d.cwiseAbs().maxCoeff() <= tol;
}

Operator expm_hermitian(const Operator& h, double t_s) {
  if (!is_hermitian(h))
    throw std::invalid_argument("expm_hermitian: input is not Hermitian within tolerance");
  Eigen::SelfAdjointEigenSolver<Operator> es(h);
  const Eigen::VectorXd& w = es.eigenvalues();
  const Operator& v = es.eigenvectors();
  Eigen::VectorXcd phases(w.size());
  for (Eigen::Index k = 0; k < w.size(); ++k)
    phases(k) = std::exp(complex<double>(0, -w(k) * t_s));
  return v * phases.asDiagonal() * v.adjoint();
}

double unitary_fidelity(const Operator& u, const Operator& v) {
  if (u.rows() != v.rows() || u.cols() != v.cols())
    throw std::invalid_argument("unitary_fidelity: dimension mismatch");
  return std::abs((u.adjoint() * v).trace()) / static_cast<double>(u.rows());
}

double expect(const Operator& observable, const Operator& state) {
  if (observable.rows() != state.rows() || observable.cols() != state.cols())
    throw std::invalid_argument("expect: dimension mismatch");
  return (observable * state).trace().real();
}

Operator rotation(int n_qubits, int qubit, double angle_rad, double phase_rad) {
  const Operator ax = std::cos(phase_rad) * pauli_embed(n_qubits, qubit, Pauli::X) +
                      std::sin(phase_rad) * pauli_embed(n_qubits, qubit, Pauli::Y);
  const Eigen::Index dim = ax.rows();
  return std::cos(angle_rad / 2) * Operator::Identity(dim, dim) -
         complex<double>(0, std::sin(angle_rad / 2)) * ax;
}

}  // namespace spinqec
