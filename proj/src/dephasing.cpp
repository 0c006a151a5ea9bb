#include "spinqec/dephasing.hpp"

#include <cmath>
#include <stdexcept>

namespace spinqec {

double p_from_delay(double t_s, double t2_s) {
  if (t_s < 0) throw std::invalid_argument("p_from_delay: t must be >= 0");
  if (!(t2_s > 0)) throw std::invalid_argument("p_from_delay: t2 must be > 0");
  return (1.0 - std::exp(-t_s / t2_s)) / 2.0;
}

namespace {

std::array<double, 3> p_for(double t_s, const SpinSystem& s) {
  if (s.n != 3) throw std::invalid_argument("make_channel: 3-spin system required");
  if (static_cast<int>(s.t2_s.size()) != 3)
    throw std::invalid_argument("make_channel: t2 missing");
  return {p_from_delay(t_s, s.t2_s[0]), p_from_delay(t_s, s.t2_s[1]),
          p_from_delay(t_s, s.t2_s[2])};
}

// all tensor products of the per-qubit Kraus lists
std::vector<Operator> tensor_expand(const std::array<std::vector<Operator>, 3>& per_qubit) {
  std::vector<Operator> out;
  for (const Operator& a : per_qubit[0])
    for (const Operator& b : per_qubit[1])
      for (const Operator& c : per_qubit[2]) out.push_back(kron(kron(a, b), c));
  return out;
}

}  // namespace

DephasingChannel make_channel_from_p(const std::array<double, 3>& p) {
  DephasingChannel ch;
  ch.p = p;
  std::array<std::vector<Operator>, 3> kq;
  for (int i = 0; i < 3; ++i) {
    if (p[i] < 0 || p[i] > 0.5)
      throw std::invalid_argument("make_channel: p must lie in [0, 1/2]");
    kq[i].push_back(std::sqrt(1.0 - p[i]) * pauli_matrix(Pauli::I));
    kq[i].push_back(std::sqrt(p[i]) * pauli_matrix(Pauli::Z));
  }
  ch.kraus = tensor_expand(kq);
  return ch;
}

DephasingChannel make_channel(double t_s, const SpinSystem& s) {
  return make_channel_from_p(p_for(t_s, s));
}

DephasingChannel make_channel_with_t1(double t_s, const SpinSystem& s) {
  if (!s.has_t1()) throw std::invalid_argument("make_channel_with_t1: config lacks t1");
  DephasingChannel ch;
  ch.p = p_for(t_s, s);
  std::array<std::vector<Operator>, 3> kq;
  for (int i = 0; i < 3; ++i) {
    const double gamma = 1.0 - std::exp(-t_s / s.t1_s[i]);
    Operator a0(2, 2), a1(2, 2);
    a0 << 1, 0, 0, std::sqrt(1.0 - gamma);
    a1 << 0, std::sqrt(gamma), 0, 0;
    for (const Operator& d :
         {std::sqrt(1.0 - ch.p[i]) * pauli_matrix(Pauli::I), std::sqrt(ch.p[i]) * pauli_matrix(Pauli::Z)}) {
      kq[i].push_back(d * a0);
      kq[i].push_back(d * a1);
    }
  }
  ch.kraus = tensor_expand(kq);
  return ch;
}

Operator apply_channel(const DephasingChannel& ch, const Operator& state) {
  if (ch.kraus.empty() || ch.kraus.front().rows() != state.rows() ||
      state.rows() != state.cols())
    throw std::invalid_argument("apply_channel: dimension mismatch");
  Operator out = Operator::Zero(state.rows(), state.cols());
  for (const Operator& k : ch.kraus) out += k * state * k.adjoint();
  return out;
}

Operator apply_channel_pauli(const DephasingChannel& ch, const Operator& state) {
  if (state.rows() != 8 || state.cols() != 8)
    throw std::invalid_argument("apply_channel_pauli: 8x8 state required");
  Operator out = Operator::Zero(8, 8);
  const Pauli axes[4] = {Pauli::I, Pauli::X, Pauli::Y, Pauli::Z};
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c) {
        const Operator str = kron(kron(pauli_matrix(axes[a]), pauli_matrix(axes[b])),
                                  pauli_matrix(axes[c]));
        const std::complex<double> coeff = (str * state).trace() / 8.0;
        double scale = 1.0;
        const int s_abc[3] = {a, b, c};
        for (int q = 0; q < 3; ++q)
          if (s_abc[q] == 1 || s_abc[q] == 2) scale *= 1.0 - 2.0 * ch.p[q];
        out += coeff * scale * str;
      }
  return out;
}

}  // namespace spinqec
