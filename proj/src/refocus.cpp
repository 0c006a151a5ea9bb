#include "spinqec/refocus.hpp"

#include <cmath>
#include <stdexcept>

namespace spinqec {

namespace {

constexpr double kPhaseGrid[4] = {0.0, M_PI / 2, M_PI, 3 * M_PI / 2};

double sub_delay(const SpinSystem& s, double total_delay_s, const RefocusTemplate& tpl) {
  if (s.n != 3) throw std::invalid_argument("refocusing template requires a 3-spin system");
  const double pulse_time =
      tpl.n_groups * tpl.hard_pulse_s + tpl.n_groups * tpl.selective_pulse_s;
  const double d = (total_delay_s - pulse_time) / tpl.n_groups;
  if (!(d > 0))
    throw std::invalid_argument("refocusing: total_delay must exceed the pulse time budget");
  return d;
}

}  // namespace

SelectivePulses synthesize_selective_pulses(const SpinSystem& s, const GrapeOptions& opt,
                                            double goal, int max_iter, Exec exec) {
  RefocusTemplate tpl;
  SelectivePulses sel;
  auto r1 = selective_pi_pulse(s, 2, tpl.selective_pulse_s, goal, max_iter, opt, exec);
  auto r2 = selective_pi_pulse(s, 3, tpl.selective_pulse_s, goal, max_iter, opt, exec);
  sel.c1 = std::make_shared<ControlPulse>(std::move(r1.first));
  sel.c2 = std::make_shared<ControlPulse>(std::move(r2.first));
  return sel;
}

PulseSequence make_refocusing_sequence(const SpinSystem& s, double total_delay_s,
                                       const std::vector<double>& phases,
                                       const SelectivePulses& sel, const RefocusTemplate& tpl) {
  if (static_cast<int>(phases.size()) != tpl.n_slots)
    throw std::invalid_argument("refocusing: expected " + std::to_string(tpl.n_slots) +
                                " slot phases, got " + std::to_string(phases.size()));
  if (!sel.c1 || !sel.c2)
    throw std::invalid_argument("refocusing: selective pulses not provided");
  const double d = sub_delay(s, total_delay_s, tpl);

  PulseSequence seq;
  seq.name = "refocus";
  const std::vector<int> carbons{2, 3};
  for (int g = 0; g < tpl.n_groups; ++g) {
    seq.segments.push_back(Segment::delay(d));
    seq.segments.push_back(Segment::hard(1, M_PI, phases[2 * g], tpl.hard_pulse_s));
    const int carbon = tpl.carbon_of_group(g);
    const auto& base = carbon == 2 ? sel.c1 : sel.c2;
    auto rotated = std::make_shared<ControlPulse>(
        rotate_pulse_phase(*base, carbons, phases[2 * g + 1]));
    seq.segments.push_back(Segment::shaped(
        std::move(rotated), "refocus_c" + std::to_string(carbon - 1) + "_g" +
                                std::to_string(g) + ".pulse"));
  }
  return seq;
}

PulseSequence make_refocusing_sequence(const SpinSystem& s, double total_delay_s,
                                       const std::vector<double>& phases) {
  return make_refocusing_sequence(s, total_delay_s, phases, synthesize_selective_pulses(s));
}

double verify_refocusing(const PulseSequence& seq, const SpinSystem& s) {
  if (s.n != 3) throw std::invalid_argument("verify_refocusing: 3-spin system required");
  const Operator u = sequence_propagator(seq, s, PulseModel::timed);
  return unitary_fidelity(u, Operator::Identity(u.rows(), u.cols()));
}

PhaseSearchResult phase_search(const SpinSystem& s, double total_delay_s,
                               const SelectivePulses& sel, Exec exec,
                               const RefocusTemplate& tpl) {
  const double d = sub_delay(s, total_delay_s, tpl);
  const Operator h = build_hamiltonian(s);
  const Operator u_delay = expm_hermitian(h, d);
  const std::vector<int> carbons{2, 3};

  // 4 phase variants per slot kind; carbon variants are exact collective-z
  // conjugates of the base pulses
  Operator hard_var[4];
  Operator c1_var[4], c2_var[4];
  for (int k = 0; k < 4; ++k) {
    const Segment hp = Segment::hard(1, M_PI, kPhaseGrid[k], tpl.hard_pulse_s);
    hard_var[k] = segment_propagator(hp, h, PulseModel::timed);
    c1_var[k] = pulse_propagator(rotate_pulse_phase(*sel.c1, carbons, kPhaseGrid[k]), h);
    c2_var[k] = pulse_propagator(rotate_pulse_phase(*sel.c2, carbons, kPhaseGrid[k]), h);
  }

  // group block propagators: carbon_pulse * hard_pulse * delay
  // U_total = blk3 * blk2 * blk1 * blk0
  std::vector<Operator> blk[4];
  for (int g = 0; g < 4; ++g) {
    const Operator* cvar = tpl.carbon_of_group(g) == 2 ? c1_var : c2_var;
    blk[g].resize(16);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) blk[g][a * 4 + b] = cvar[b] * (hard_var[a] * u_delay);
  }
  // pair products: lo = blk1*blk0 over (p0..p3), hi = blk3*blk2 over (p4..p7)
  std::vector<Operator> lo(256), hi(256);
  parallel_for(256, exec, [&](std::int64_t i) {
    lo[static_cast<size_t>(i)] = blk[1][i & 15] * blk[0][(i >> 4) & 15];
    hi[static_cast<size_t>(i)] = blk[3][i & 15] * blk[2][(i >> 4) & 15];
  });

  const std::int64_t n_cand = 1 << 16;  // candidate index is the phase vector read as base-4,
  std::vector<double> fid(n_cand);      // slot 0 most significant
  parallel_for(n_cand, exec, [&](std::int64_t idx) {
    const Operator& l = lo[static_cast<size_t>(idx >> 8)];
    const Operator& r = hi[static_cast<size_t>(idx & 255)];
    fid[static_cast<size_t>(idx)] = std::abs((r * l).trace()) / 8.0;
  });

  std::int64_t best = 0;
  for (std::int64_t i = 1; i < n_cand; ++i)
    if (fid[static_cast<size_t>(i)] > fid[static_cast<size_t>(best)]) best = i;

  PhaseSearchResult out;
  out.phases.resize(tpl.n_slots);
  for (int k = tpl.n_slots - 1; k >= 0; --k) {
    out.phases[static_cast<size_t>(k)] = kPhaseGrid[best & 3];
    best >>= 2;
  }
  out.fidelity =
      verify_refocusing(make_refocusing_sequence(s, total_delay_s, out.phases, sel, tpl), s);
  out.selective_fidelity_c1 = sel.c1->fidelity;
  out.selective_fidelity_c2 = sel.c2->fidelity;
  return out;
}

PhaseSearchResult phase_search(const SpinSystem& s, double total_delay_s, Exec exec) {
  return phase_search(s, total_delay_s, synthesize_selective_pulses(s), exec);
}

}  // namespace spinqec
