#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spinqec/operator.hpp"

namespace spinqec {

enum class Axis { x, y };

// One rf control line: drives (1/2) X or (1/2) Y on a spin. Amplitudes are
// nutation frequencies in rad/s, so a constant amp*dt = pi slice is a pi flip.
struct ControlChannel {
  int spin = 0;  // 1-based
  Axis axis = Axis::x;
};

struct ControlPulse {
  int n_slices = 0;
  double dt_s = 0;
  std::vector<ControlChannel> channels;
  Eigen::MatrixXd amps;  // n_slices x n_channels, rad/s
  std::string target_name;
  double fidelity = 0;  // achieved design fidelity, 0 when unknown

  double duration_s() const { return n_slices * dt_s; }
};

// Throws std::invalid_argument when slice count, dt or amp shape is off.
void validate(const ControlPulse& p);

// {x,y} pair per spin, spin-major: x1 y1 x2 y2 ...
std::vector<ControlChannel> per_spin_xy_channels(int n_spins);

// (1/2) * embedded Pauli for the channel.
Operator channel_operator(const ControlChannel& ch, int n_qubits);

// Product over slices of exp(-i (h + sum_ch amp * C_ch) dt), first slice acts first.
Operator pulse_propagator(const ControlPulse& p, const Operator& h);

// Rotates the (x, y) amplitude pairs of the listed spins by `phase`. For a
// spin set closed under the drift Hamiltonian's exchange terms this equals
// conjugating the propagator by a collective z rotation.
ControlPulse rotate_pulse_phase(const ControlPulse& p, const std::vector<int>& spins, double phase);

// Bitmask of spins with a nonzero amplitude somewhere in the pulse.
unsigned spin_mask(const ControlPulse& p);

// Text pulse files round-trip bit-exactly (17 significant digits).
void save_pulse(const std::string& path, const ControlPulse& p);
ControlPulse load_pulse(const std::string& path);

}  // namespace spinqec
