#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "spinqec/control_pulse.hpp"
#include "spinqec/operator.hpp"
#include "spinqec/parallel.hpp"
#include "spinqec/spin_system.hpp"

namespace spinqec {

struct GrapeOptions {
  double amp_cap = 2 * 3.14159265358979323846 * 1e4;  // rad/s
  double init_amp = 2 * 3.14159265358979323846 * 50;  // random init scale, rad/s
  std::uint64_t seed = 20110901;
  double init_step = 1.0;
  int lbfgs_history = 10;
  int stall_window = 20;
  double stall_rel = 1e-12;
};

enum class GrapeExit { converged, max_iter, stalled };

struct GrapeReport {
  int iterations = 0;
  std::vector<double> fidelity_trace;  // accepted value per iteration, non-decreasing
  double final_fidelity = 0;
  double gradient_norm = 0;  // at exit
  GrapeExit exit_reason = GrapeExit::max_iter;
};

const char* grape_exit_name(GrapeExit e);

// Random small-amplitude pulse on {x,y} channels of every spin.
ControlPulse make_initial_pulse(const SpinSystem& s, int n_slices, double dt_s,
                                std::uint64_t seed, double init_amp);

// Phi = |Tr(target^dag U(p))| / dim with U(p) the slice-product propagator.
double grape_fidelity(const ControlPulse& p, const SpinSystem& s, const Operator& target);

// Exact gradient of Phi w.r.t. every slice amplitude (eigendecomposition of
// each slice generator, no first-order approximation).
Eigen::MatrixXd grape_gradient(const ControlPulse& p, const SpinSystem& s,
                               const Operator& target, Exec exec = Exec::par);

// Monotone ascent with backtracking line search (step halved until the
// clipped candidate improves Phi); search direction is L-BFGS-preconditioned
// with a plain-gradient fallback. Stops on goal, max_iter, or relative
// improvement below stall_rel over stall_window iterations. Returns the
// best-seen pulse.
std::pair<ControlPulse, GrapeReport> grape_optimize(const ControlPulse& init,
                                                    const SpinSystem& s, const Operator& target,
                                                    double goal, int max_iter,
                                                    const GrapeOptions& opt = {},
                                                    Exec exec = Exec::par);

// Runs grape_optimize from fresh random pulses (seed, seed+1, ...) until the
// goal is met or the restart budget is spent; keeps the best result.
std::pair<ControlPulse, GrapeReport> grape_optimize_multistart(
    const SpinSystem& s, const Operator& target, const std::string& name, int n_slices,
    double dt_s, double goal, int max_iter, const GrapeOptions& opt, int restarts,
    Exec exec = Exec::par);

// pi rotation about x on `spin`, identity elsewhere; duration split into
// 40 us slices.
std::pair<ControlPulse, GrapeReport> selective_pi_pulse(const SpinSystem& s, int spin,
                                                        double duration_s, double goal = 0.999,
                                                        int max_iter = 5000,
                                                        const GrapeOptions& opt = {},
                                                        Exec exec = Exec::par);

}  // namespace spinqec
