#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "spinqec/dephasing.hpp"
#include "test_helpers.hpp"

using namespace spinqec;
using namespace spinqec::test;

TEST_CASE("p_from_delay closed form") {
  CHECK(p_from_delay(0.0, 1.7) == 0.0);
  CHECK(p_from_delay(1e6 * 0.3, 0.3) == doctest::Approx(0.5).epsilon(1e-12));
  // t = t2: (1 - e^-1)/2, evaluated through expm1 as an independent route
  CHECK(p_from_delay(0.42, 0.42) == doctest::Approx(-std::expm1(-1.0) / 2).epsilon(1e-14));
  CHECK_THROWS_AS(p_from_delay(-1e-9, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(p_from_delay(0.1, 0.0), std::invalid_argument);
}

TEST_CASE("quoted T2 set at t = 0.1 s") {
  const SpinSystem s = tce_like();  // t2 = (3.0, 1.1, 0.6)
  const DephasingChannel ch = make_channel(0.1, s);
  CHECK(ch.p[0] == doctest::Approx(-std::expm1(-0.1 / 3.0) / 2).epsilon(1e-14));
  CHECK(ch.p[1] == doctest::Approx(-std::expm1(-0.1 / 1.1) / 2).epsilon(1e-14));
  CHECK(ch.p[2] == doctest::Approx(-std::expm1(-0.1 / 0.6) / 2).epsilon(1e-14));
  CHECK(ch.p[0] == doctest::Approx(0.0163920).epsilon(1e-4));
  CHECK(ch.p[1] == doctest::Approx(0.0434496).epsilon(1e-4));
  CHECK(ch.p[2] == doctest::Approx(0.0767592).epsilon(1e-4));
}

TEST_CASE("t = 0 channel is the identity map") {
  const SpinSystem s = tce_like();
  const DephasingChannel ch = make_channel(0.0, s);
  std::mt19937_64 rng(3);
  const Operator rho = random_hermitian(8, rng);
  CHECK(max_abs_diff(apply_channel(ch, rho), rho) <= 1e-14);
}

TEST_CASE("completeness and unitality") {
  const SpinSystem s = tce_like();
  for (double t : {0.01, 0.1, 0.37, 2.0}) {
    const DephasingChannel ch = make_channel(t, s);
    Operator sum = Operator::Zero(8, 8);
    for (const auto& k : ch.kraus) sum += k.adjoint() * k;
    CHECK(max_abs_diff(sum, Operator::Identity(8, 8)) <= 1e-12);
    CHECK(max_abs_diff(apply_channel(ch, Operator::Identity(8, 8)),
                       Operator::Identity(8, 8)) <= 1e-12);
  }
}

TEST_CASE("X on the data qubit scales by 1-2p, Z is fixed") {
  const DephasingChannel ch = make_channel_from_p({0.0, 0.25, 0.0});
  const Operator x2 = pauli_embed(3, 2, Pauli::X);
  const Operator z2 = pauli_embed(3, 2, Pauli::Z);
  CHECK(max_abs_diff(apply_channel(ch, x2), Operator(0.5 * x2)) <= 1e-13);
  CHECK(max_abs_diff(apply_channel(ch, z2), z2) <= 1e-13);

  const DephasingChannel none = make_channel_from_p({0, 0, 0});
  std::mt19937_64 rng(4);
  const Operator rho = random_hermitian(8, rng);
  CHECK(max_abs_diff(apply_channel(none, rho), rho) == 0.0);
}

TEST_CASE("semigroup composition in t") {
  const SpinSystem s = tce_like();
  std::mt19937_64 rng(5);
  const Operator rho = random_hermitian(8, rng);
  const double t1 = 0.07, t2 = 0.11;
  const Operator two_step =
      apply_channel(make_channel(t1, s), apply_channel(make_channel(t2, s), rho));
  const Operator one_step = apply_channel(make_channel(t1 + t2, s), rho);
  CHECK(max_abs_diff(two_step, one_step) <= 1e-10);
}

TEST_CASE("Kraus route agrees with the Pauli-scaling route") {
  const SpinSystem s = tce_like();
  std::mt19937_64 rng(6);
  for (int rep = 0; rep < 20; ++rep) {
    const Operator rho = random_hermitian(8, rng);
    const DephasingChannel ch = make_channel(0.02 + 0.01 * rep, s);
    CHECK(max_abs_diff(apply_channel(ch, rho), apply_channel_pauli(ch, rho)) <= 1e-12);
  }
}

TEST_CASE("Pauli strings scale by the product of e^{-t/T2} over X/Y qubits") {
  const SpinSystem s = tce_like();
  const double t = 0.13;
  const DephasingChannel ch = make_channel(t, s);
  const Operator str = pauli_embed(3, 1, Pauli::X) * pauli_embed(3, 2, Pauli::Y);
  const double want = std::exp(-t / 3.0) * std::exp(-t / 1.1);
  CHECK(max_abs_diff(apply_channel(ch, str), Operator(want * str)) <= 1e-12);
  const Operator zz = pauli_embed(3, 1, Pauli::Z) * pauli_embed(3, 3, Pauli::Z);
  CHECK(max_abs_diff(apply_channel(ch, zz), zz) <= 1e-12);
}

TEST_CASE("state preserves hermiticity and trace") {
  const SpinSystem s = tce_like();
  std::mt19937_64 rng(7);
  const Operator rho = random_hermitian(8, rng);
  const Operator out = apply_channel(make_channel(0.09, s), rho);
  CHECK(is_hermitian(out, 1e-12));
  CHECK(std::abs((out.trace() - rho.trace())) <= 1e-12);
}

TEST_CASE("t1 extension stays trace preserving") {
  SpinSystem s = tce_like();
  s.t1_s = {10.0, 20.0, 20.0};
  const DephasingChannel ch = make_channel_with_t1(0.1, s);
  CHECK(ch.kraus.size() == 64);
  Operator sum = Operator::Zero(8, 8);
  for (const auto& k : ch.kraus) sum += k.adjoint() * k;
  CHECK(max_abs_diff(sum, Operator::Identity(8, 8)) <= 1e-12);

  SpinSystem no_t1 = tce_like();
  CHECK_THROWS_AS(make_channel_with_t1(0.1, no_t1), std::invalid_argument);
}

TEST_CASE("dimension mismatches are rejected") {
  const DephasingChannel ch = make_channel_from_p({0.1, 0.1, 0.1});
  CHECK_THROWS_AS(apply_channel(ch, Operator::Identity(4, 4)), std::invalid_argument);
  CHECK_THROWS_AS(make_channel_from_p({0.6, 0.0, 0.0}), std::invalid_argument);
}
