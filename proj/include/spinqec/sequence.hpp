#pragma once

#include <memory>
#include <string>
#include <vector>

#include "spinqec/control_pulse.hpp"
#include "spinqec/operator.hpp"
#include "spinqec/spin_system.hpp"

namespace spinqec {

// `ideal` treats hard pulses as instantaneous rotations; `timed` evolves the
// internal Hamiltonian together with the constant rf term for the pulse
// duration. Shaped pulses always propagate slice by slice.
enum class PulseModel { ideal, timed };

struct Segment {
  enum class Kind { delay, hard_pulse, shaped_pulse };
  Kind kind = Kind::delay;
  double duration_s = 0;

  // hard_pulse
  int spin = 0;  // 1-based
  double angle_rad = 0;
  double phase_rad = 0;

  // shaped_pulse
  std::shared_ptr<const ControlPulse> pulse;
  std::string pulse_file;  // serialization reference

  static Segment delay(double t_s);
  static Segment hard(int spin, double angle_rad, double phase_rad, double duration_s);
  static Segment shaped(std::shared_ptr<const ControlPulse> p, std::string file = {});
};

struct PulseSequence {
  std::string name;
  std::vector<Segment> segments;

  double total_duration_s() const;
};

Operator segment_propagator(const Segment& seg, const SpinSystem& s, PulseModel model);
// Variant with a prebuilt Hamiltonian, for callers evaluating many segments.
Operator segment_propagator(const Segment& seg, const Operator& h, PulseModel model);

// Time-ordered product, last segment leftmost.
Operator sequence_propagator(const PulseSequence& seq, const SpinSystem& s, PulseModel model);

// Line-oriented text: DELAY <s> | HARD <spin> <angle> <phase> <dur> |
// SHAPED <pulse-file> <spin-mask>. Pulse files are written next to the
// sequence file and re-read on load.
void save_sequence(const std::string& path, const PulseSequence& seq);
PulseSequence load_sequence(const std::string& path);

}  // namespace spinqec
