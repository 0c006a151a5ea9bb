#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include "spinqec/sequence.hpp"
#include "test_helpers.hpp"

using namespace spinqec;
using namespace spinqec::test;
using cd = std::complex<double>;

TEST_CASE("zero-length delay is the identity") {
  const SpinSystem s = tce_like();
  CHECK(max_abs_diff(segment_propagator(Segment::delay(0.0), s, PulseModel::timed),
                     Operator::Identity(8, 8)) <= 1e-14);
}

TEST_CASE("ideal hard pi pulse is -i X on the target spin") {
  const SpinSystem s = tce_like();
  const Operator u =
      segment_propagator(Segment::hard(1, M_PI, 0.0, 20e-6), s, PulseModel::ideal);
  CHECK(max_abs_diff(u, Operator(cd(0, -1) * pauli_embed(3, 1, Pauli::X))) <= 1e-13);
}

TEST_CASE("delay under a single chemical shift gives the diagonal phases") {
  const double nu = 100.0, t = 0.0137;
  const SpinSystem s = make_system({nu, 0, 0}, 0, 0, 0);
  const Operator u = segment_propagator(Segment::delay(t), s, PulseModel::timed);
  for (int b = 0; b < 8; ++b) {
    const cd want = std::exp(cd(0, (b < 4 ? 1.0 : -1.0) * M_PI * nu * t));
    CHECK(std::abs(u(b, b) - want) <= 1e-12);
  }
}

TEST_CASE("empty sequence is the identity") {
  const SpinSystem s = tce_like();
  PulseSequence seq;
  CHECK(max_abs_diff(sequence_propagator(seq, s, PulseModel::timed),
                     Operator::Identity(8, 8)) == 0.0);
}

TEST_CASE("hahn echo cancels Zeeman phases when J = 0") {
  const SpinSystem s = make_system({237.0, -41.0, 95.0}, 0, 0, 0);
  const double t = 0.017;
  PulseSequence seq;
  seq.segments.push_back(Segment::delay(t));
  for (int q = 1; q <= 3; ++q) seq.segments.push_back(Segment::hard(q, M_PI, 0.0, 0.0));
  seq.segments.push_back(Segment::delay(t));
  for (int q = 1; q <= 3; ++q) seq.segments.push_back(Segment::hard(q, M_PI, 0.0, 0.0));
  const Operator u = sequence_propagator(seq, s, PulseModel::ideal);
  CHECK(unitary_fidelity(u, Operator::Identity(8, 8)) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("bare delay does not refocus") {
  const SpinSystem s = tce_like();
  PulseSequence seq;
  seq.segments.push_back(Segment::delay(0.2));
  const Operator u = sequence_propagator(seq, s, PulseModel::timed);
  CHECK(unitary_fidelity(u, Operator::Identity(8, 8)) < 0.9);
}

TEST_CASE("unresolved shaped pulse is a link error") {
  const SpinSystem s = tce_like();
  Segment seg = Segment::shaped(nullptr, "missing.pulse");
  CHECK_THROWS_WITH_AS(segment_propagator(seg, s, PulseModel::timed),
                       doctest::Contains("unresolved"), std::runtime_error);
}

TEST_CASE("timed hard pulse with no drift equals the ideal rotation") {
  const SpinSystem s = make_system({0, 0, 0}, 0, 0, 0);
  const Segment seg = Segment::hard(2, M_PI / 2, 1.1, 20e-6);
  CHECK(max_abs_diff(segment_propagator(seg, s, PulseModel::timed),
                     segment_propagator(seg, s, PulseModel::ideal)) <= 1e-12);
}

TEST_CASE("reversed, phase-inverted pulse train undoes itself") {
  const SpinSystem s = make_system({0, 0, 0}, 0, 0, 0);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ang(0.1, 2 * M_PI), ph(0, 2 * M_PI);
  std::uniform_int_distribution<int> spin(1, 3);
  PulseSequence fwd;
  for (int k = 0; k < 12; ++k) {
    fwd.segments.push_back(Segment::hard(spin(rng), ang(rng), ph(rng), 0.0));
    fwd.segments.push_back(Segment::delay(0.001 * k));
  }
  PulseSequence rev;
  for (auto it = fwd.segments.rbegin(); it != fwd.segments.rend(); ++it) {
    Segment seg = *it;
    if (seg.kind == Segment::Kind::hard_pulse) seg.phase_rad += M_PI;
    rev.segments.push_back(seg);
  }
  const Operator u = sequence_propagator(fwd, s, PulseModel::ideal);
  const Operator v = sequence_propagator(rev, s, PulseModel::ideal);
  CHECK(max_abs_diff(Operator(v * u), Operator::Identity(8, 8)) <= 1e-9);
}

TEST_CASE("sequence propagators are unitary") {
  const SpinSystem s = tce_like();
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> ang(0.1, 2 * M_PI);
  PulseSequence seq;
  for (int k = 0; k < 6; ++k) {
    seq.segments.push_back(Segment::delay(0.003));
    seq.segments.push_back(Segment::hard(1 + k % 3, ang(rng), ang(rng), 20e-6));
  }
  CHECK(is_unitary(sequence_propagator(seq, s, PulseModel::timed), 1e-10));
}

TEST_CASE("total duration is the segment sum") {
  PulseSequence seq;
  seq.segments.push_back(Segment::delay(0.25));
  seq.segments.push_back(Segment::hard(1, M_PI, 0, 20e-6));
  CHECK(seq.total_duration_s() == doctest::Approx(0.25002).epsilon(1e-15));
}

TEST_CASE("hard pulse angle range enforced") {
  CHECK_THROWS_AS(Segment::hard(1, 0.0, 0, 1e-5), std::invalid_argument);
  CHECK_THROWS_AS(Segment::hard(1, 7.0, 0, 1e-5), std::invalid_argument);
  CHECK_THROWS_AS(Segment::delay(-1.0), std::invalid_argument);
}

TEST_CASE("sequence serialization round trip") {
  const SpinSystem s = tce_like();
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "spinqec_seq_test";
  fs::create_directories(dir);

  ControlPulse p;
  p.n_slices = 3;
  p.dt_s = 1e-4;
  p.channels = per_spin_xy_channels(3);
  p.amps.resize(3, 6);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uni(-1000, 1000);
  for (int j = 0; j < 3; ++j)
    for (int c = 0; c < 6; ++c) p.amps(j, c) = uni(rng);
  p.target_name = "test";
  p.fidelity = 0.5;

  PulseSequence seq;
  seq.name = "roundtrip";
  seq.segments.push_back(Segment::delay(0.0123456789012345));
  seq.segments.push_back(Segment::hard(2, M_PI, M_PI / 2, 20e-6));
  seq.segments.push_back(Segment::shaped(std::make_shared<ControlPulse>(p)));

  const std::string path = (dir / "roundtrip.seq").string();
  save_sequence(path, seq);
  const PulseSequence back = load_sequence(path);

  REQUIRE(back.segments.size() == 3);
  CHECK(back.segments[0].duration_s == seq.segments[0].duration_s);  // bit-exact round trip
  CHECK(back.segments[1].phase_rad == seq.segments[1].phase_rad);
  REQUIRE(back.segments[2].pulse);
  CHECK(back.segments[2].pulse->amps == p.amps);
  CHECK(max_abs_diff(sequence_propagator(back, s, PulseModel::timed),
                     sequence_propagator(seq, s, PulseModel::timed)) == 0.0);
  fs::remove_all(dir);
}
