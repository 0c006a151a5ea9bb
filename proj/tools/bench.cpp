// Serial-vs-OpenMP comparison for the three data-parallel kernels: the
// refocusing phase search, the GRAPE gradient, and the experiment sweep.
// The serial path runs identical per-element code, so outputs must match
// bit for bit; this target reports wall times and the speedup.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>

#include "spinqec/grape.hpp"
#include "spinqec/qec.hpp"
#include "spinqec/refocus.hpp"

using namespace spinqec;

namespace {

using clock_type = std::chrono::steady_clock;

template <typename F>
double time_best_of(int reps, F&& fn) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = clock_type::now();
    fn();
    const auto t1 = clock_type::now();
    best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
  }
  return best;
}

SpinSystem tce_like() {
  SpinSystem s;
  s.n = 3;
  s.labels = {"H", "C1", "C2"};
  s.nu_hz = {50.0, 600.5, -600.5};
  s.t2_s = {3.0, 1.1, 0.6};
  s.j_hz = Eigen::MatrixXd::Zero(3, 3);
  s.j_hz(0, 1) = s.j_hz(1, 0) = 200.9;
  s.j_hz(0, 2) = s.j_hz(2, 0) = 9.1;
  s.j_hz(1, 2) = s.j_hz(2, 1) = 103.1;
  s.regime.assign(9, CouplingRegime::weak);
  s.regime[1 * 3 + 2] = s.regime[2 * 3 + 1] = CouplingRegime::strong;
  return s;
}

// cheap stand-in selective pulses so the benchmark times the search itself
SelectivePulses flat_selective_pulses(const SpinSystem& s) {
  SelectivePulses sel;
  for (int spin : {2, 3}) {
    ControlPulse p;
    p.n_slices = 50;
    p.dt_s = 40e-6;
    p.channels = per_spin_xy_channels(s.n);
    p.amps = Eigen::MatrixXd::Zero(p.n_slices, static_cast<Eigen::Index>(p.channels.size()));
    p.amps.col(2 * (spin - 1)).setConstant(M_PI / p.duration_s());
    p.target_name = "flat_pi_spin" + std::to_string(spin);
    (spin == 2 ? sel.c1 : sel.c2) = std::make_shared<ControlPulse>(std::move(p));
  }
  return sel;
}

}  // namespace

int main() {
  const SpinSystem s = tce_like();
  std::printf("threads available: %d\n\n", max_threads());
  std::printf("%-28s %12s %12s %9s\n", "kernel", "serial [s]", "openmp [s]", "speedup");

  {
    const SelectivePulses sel = flat_selective_pulses(s);
    double f_seq = 0, f_par = 0;
    const double ts = time_best_of(3, [&] { f_seq = phase_search(s, 0.2, sel, Exec::seq).fidelity; });
    const double tp = time_best_of(3, [&] { f_par = phase_search(s, 0.2, sel, Exec::par).fidelity; });
    std::printf("%-28s %12.4f %12.4f %8.2fx%s\n", "phase_search (4^8)", ts, tp, ts / tp,
                f_seq == f_par ? "" : "  MISMATCH");
  }

  {
    GrapeOptions opt;
    ControlPulse p = make_initial_pulse(s, 340, 40e-6, opt.seed, opt.init_amp);
    const Operator target = toffoli_correct() * decode_unitary();
    Eigen::MatrixXd g_seq, g_par;
    const double ts = time_best_of(3, [&] { g_seq = grape_gradient(p, s, target, Exec::seq); });
    const double tp = time_best_of(3, [&] { g_par = grape_gradient(p, s, target, Exec::par); });
    std::printf("%-28s %12.4f %12.4f %8.2fx%s\n", "grape_gradient (340 slices)", ts, tp, ts / tp,
                g_seq == g_par ? "" : "  MISMATCH");
  }

  {
    std::vector<double> times(200);
    for (size_t i = 0; i < times.size(); ++i) times[i] = 0.2 * static_cast<double>(i) / 199.0;
    ExperimentOptions opt;
    ExperimentResult r_seq, r_par;
    opt.exec = Exec::seq;
    const double ts = time_best_of(3, [&] {
      r_seq = run_experiment(ExperimentMode::ec, s, times, PipelinePulses::ideal, nullptr, opt);
    });
    opt.exec = Exec::par;
    const double tp = time_best_of(3, [&] {
      r_par = run_experiment(ExperimentMode::ec, s, times, PipelinePulses::ideal, nullptr, opt);
    });
    bool same = r_seq.rows.size() == r_par.rows.size();
    for (size_t i = 0; same && i < r_seq.rows.size(); ++i)
      same = r_seq.rows[i].f == r_par.rows[i].f && r_seq.rows[i].f_x == r_par.rows[i].f_x &&
             r_seq.rows[i].f_y == r_par.rows[i].f_y && r_seq.rows[i].f_z == r_par.rows[i].f_z;
    std::printf("%-28s %12.4f %12.4f %8.2fx%s\n", "ec sweep (200 delays)", ts, tp, ts / tp,
                same ? "" : "  MISMATCH");
  }
  return 0;
}
