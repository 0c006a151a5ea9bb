#pragma once

#include <memory>
#include <vector>

#include "spinqec/grape.hpp"
#include "spinqec/parallel.hpp"
#include "spinqec/sequence.hpp"
#include "spinqec/spin_system.hpp"

namespace spinqec {

// Refocusing template on (H, C1, C2): four equal sub-delays, each followed by
// a hard pi pulse on H and a selective pi pulse on one carbon, alternating
// C2, C1, C2, C1. Eight pulse slots total; the slot phases are free. The
// positions give every spin and every spin pair a sign-balanced toggling
// pattern, so with suitable phases the full Hamiltonian (strong carbon
// coupling included) refocuses to leading order; the exhaustive phase search
// handles the rest.
struct RefocusTemplate {
  double hard_pulse_s = 20e-6;
  double selective_pulse_s = 2e-3;
  static constexpr int n_groups = 4;
  static constexpr int n_slots = 8;
  // carbon targeted by the selective slot of group g (0-based)
  int carbon_of_group(int g) const { return g % 2 == 0 ? 3 : 2; }
};

// Base (phase-0) selective pi pulses for the two carbons. Slot phases are
// applied by rotating both carbon channel pairs, which conjugates the
// propagator by a collective carbon z rotation exactly.
struct SelectivePulses {
  std::shared_ptr<const ControlPulse> c1;
  std::shared_ptr<const ControlPulse> c2;
};

// GRAPE-synthesizes the two selective pulses (deterministic for a fixed seed).
SelectivePulses synthesize_selective_pulses(const SpinSystem& s, const GrapeOptions& opt = {},
                                            double goal = 0.99999, int max_iter = 20000,
                                            Exec exec = Exec::par);

PulseSequence make_refocusing_sequence(const SpinSystem& s, double total_delay_s,
                                       const std::vector<double>& phases,
                                       const SelectivePulses& sel,
                                       const RefocusTemplate& tpl = {});
// Convenience overload; synthesizes the selective pulses first.
PulseSequence make_refocusing_sequence(const SpinSystem& s, double total_delay_s,
                                       const std::vector<double>& phases);

// |Tr(U_refocus)| / 8 under the timed model.
double verify_refocusing(const PulseSequence& seq, const SpinSystem& s);

struct PhaseSearchResult {
  std::vector<double> phases;
  double fidelity = 0;
  double selective_fidelity_c1 = 0;  // design fidelity of the synthesized pulses
  double selective_fidelity_c2 = 0;
};

// Exhaustive search over {0, pi/2, pi, 3pi/2} per slot (4^8 candidates),
// deterministic lexicographic tie-break. Reports the best found even when it
// misses the target fidelity.
PhaseSearchResult phase_search(const SpinSystem& s, double total_delay_s,
                               const SelectivePulses& sel, Exec exec = Exec::par,
                               const RefocusTemplate& tpl = {});
PhaseSearchResult phase_search(const SpinSystem& s, double total_delay_s, Exec exec = Exec::par);

}  // namespace spinqec
