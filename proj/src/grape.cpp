#include "spinqec/grape.hpp"

#include <cmath>
#include <deque>
#include <random>
#include <stdexcept>

namespace spinqec {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using std::complex;

struct SliceDecomp {
  VectorXd eigvals;
  Operator eigvecs;
  Operator u;
};

struct Workspace {
  Operator h;
  std::vector<Operator> cops;
  Operator target;
  double dim = 0;
};

Workspace make_workspace(const ControlPulse& p, const SpinSystem& s, const Operator& target) {
  Workspace w;
  w.h = build_hamiltonian(s);
  if (w.h.rows() != target.rows() || target.rows() != target.cols())
    throw std::invalid_argument("grape: target dimension does not match the spin system");
  const int nq = s.n;
  for (const auto& ch : p.channels) {
    if (ch.spin < 1 || ch.spin > nq)
      throw std::invalid_argument("grape: control channel spin out of range");
    w.cops.push_back(channel_operator(ch, nq));
  }
  w.target = target;
  w.dim = static_cast<double>(w.h.rows());
  return w;
}

void decompose_slices(const MatrixXd& amps, double dt, const Workspace& w,
                      std::vector<SliceDecomp>& out, Exec exec) {
  const auto n = amps.rows();
  out.resize(static_cast<size_t>(n));
  parallel_for(n, exec, [&](std::int64_t j) {
    Operator a = w.h;
    for (size_t c = 0; c < w.cops.size(); ++c)
      a += amps(j, static_cast<Eigen::Index>(c)) * w.cops[c];
    Eigen::SelfAdjointEigenSolver<Operator> es(a);
    SliceDecomp& d = out[static_cast<size_t>(j)];
    d.eigvals = es.eigenvalues();
    d.eigvecs = es.eigenvectors();
    Eigen::VectorXcd ph(d.eigvals.size());
    for (Eigen::Index k = 0; k < d.eigvals.size(); ++k)
      ph(k) = std::exp(complex<double>(0, -d.eigvals(k) * dt));
    d.u = d.eigvecs * ph.asDiagonal() * d.eigvecs.adjoint();
  });
}

// Divided difference of exp(-i*lambda*dt), the exact directional derivative
// kernel for a slice exponential.
Operator loewner_matrix(const VectorXd& w, double dt) {
  const Eigen::Index d = w.size();
  Operator g(d, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    const complex<double> ek = std::exp(complex<double>(0, -w(k) * dt));
    for (Eigen::Index l = 0; l < d; ++l) {
      const double dl = w(k) - w(l);
      if (std::abs(dl * dt) < 1e-7) {
        const double mid = 0.5 * (w(k) + w(l));
        g(k, l) = complex<double>(0, -dt) * std::exp(complex<double>(0, -mid * dt));
      } else {
        const complex<double> el = std::exp(complex<double>(0, -w(l) * dt));
        g(k, l) = (ek - el) / dl;
      }
    }
  }
  return g;
}

struct EvalResult {
  double phi = 0;
  complex<double> overlap;  // Tr(target^dag U)/dim
  MatrixXd grad;            // empty unless requested
};

EvalResult evaluate(const MatrixXd& amps, double dt, const Workspace& w, bool want_grad,
                    Exec exec) {
  const Eigen::Index n = amps.rows();
  std::vector<SliceDecomp> dec;
  decompose_slices(amps, dt, w, dec, exec);

  // forward partial products F[j] = U_j ... U_1, F[0] = I
  std::vector<Operator> fwd(static_cast<size_t>(n) + 1);
  fwd[0] = Operator::Identity(w.h.rows(), w.h.cols());
  for (Eigen::Index j = 0; j < n; ++j)
    fwd[static_cast<size_t>(j) + 1] = dec[static_cast<size_t>(j)].u * fwd[static_cast<size_t>(j)];

  EvalResult r;
  r.overlap = (w.target.adjoint() * fwd.back()).trace() / w.dim;
  r.phi = std::abs(r.overlap);
  if (!want_grad) return r;

  // backward partial products B[j] = U_N ... U_{j+1}, B[n] = I
  std::vector<Operator> bwd(static_cast<size_t>(n) + 1);
  bwd[static_cast<size_t>(n)] = Operator::Identity(w.h.rows(), w.h.cols());
  for (Eigen::Index j = n - 1; j >= 0; --j)
    bwd[static_cast<size_t>(j)] = bwd[static_cast<size_t>(j) + 1] * dec[static_cast<size_t>(j)].u;

  const complex<double> pref =
      std::conj(r.overlap) / std::max(r.phi, 1e-300);  // d|G| = Re[conj(G)/|G| dG]
  r.grad.resize(n, static_cast<Eigen::Index>(w.cops.size()));
  parallel_for(n, exec, [&](std::int64_t j) {
    const SliceDecomp& d = dec[static_cast<size_t>(j)];
    const Operator p =
        fwd[static_cast<size_t>(j)] * w.target.adjoint() * bwd[static_cast<size_t>(j) + 1];
    const Operator pt = d.eigvecs.adjoint() * p * d.eigvecs;
    const Operator gamma = loewner_matrix(d.eigvals, dt);
    const Operator kernel = pt.transpose().cwiseProduct(gamma);
    for (size_t c = 0; c < w.cops.size(); ++c) {
      const Operator ct = d.eigvecs.adjoint() * w.cops[c] * d.eigvecs;
      const complex<double> tr = kernel.cwiseProduct(ct).sum();
      r.grad(j, static_cast<Eigen::Index>(c)) = (pref * tr).real() / w.dim;
    }
  });
  return r;
}

}  // namespace

const char* grape_exit_name(GrapeExit e) {
  switch (e) {
    case GrapeExit::converged: return "converged";
    case GrapeExit::max_iter: return "max_iter";
    case GrapeExit::stalled: return "stalled";
  }
  return "?";
}

ControlPulse make_initial_pulse(const SpinSystem& s, int n_slices, double dt_s,
                                std::uint64_t seed, double init_amp) {
  ControlPulse p;
  p.n_slices = n_slices;
  p.dt_s = dt_s;
  p.channels = per_spin_xy_channels(s.n);
  p.amps.resize(n_slices, static_cast<Eigen::Index>(p.channels.size()));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int j = 0; j < n_slices; ++j)
    for (Eigen::Index c = 0; c < p.amps.cols(); ++c) p.amps(j, c) = init_amp * uni(rng);
  validate(p);
  return p;
}

double grape_fidelity(const ControlPulse& p, const SpinSystem& s, const Operator& target) {
  validate(p);
  const Workspace w = make_workspace(p, s, target);
  return evaluate(p.amps, p.dt_s, w, false, Exec::seq).phi;
}

MatrixXd grape_gradient(const ControlPulse& p, const SpinSystem& s, const Operator& target,
                        Exec exec) {
  validate(p);
  const Workspace w = make_workspace(p, s, target);
  return evaluate(p.amps, p.dt_s, w, true, exec).grad;
}

std::pair<ControlPulse, GrapeReport> grape_optimize(const ControlPulse& init,
                                                    const SpinSystem& s, const Operator& target,
                                                    double goal, int max_iter,
                                                    const GrapeOptions& opt, Exec exec) {
  validate(init);
  if (!(goal > 0) || !(goal < 1))
    throw std::invalid_argument("grape_optimize: goal must be in (0,1)");
  const Workspace w = make_workspace(init, s, target);
  const Eigen::Index nvar = init.amps.size();

  MatrixXd amps = init.amps.cwiseMax(-opt.amp_cap).cwiseMin(opt.amp_cap);
  EvalResult cur = evaluate(amps, init.dt_s, w, true, exec);

  GrapeReport rep;
  rep.fidelity_trace.push_back(cur.phi);

  // L-BFGS memory on the flattened amplitude vector
  std::deque<VectorXd> s_hist, y_hist;
  auto flat = [](const MatrixXd& m) { return VectorXd(Eigen::Map<const VectorXd>(m.data(), m.size())); };

  auto direction = [&](const VectorXd& g) {
    if (s_hist.empty()) {
      // bare gradient scaled so the largest amplitude change is ~init_step rad/s
      const double gmax = g.cwiseAbs().maxCoeff();
      return VectorXd(gmax > 0 ? (opt.init_step / gmax) * g : g);
    }
    VectorXd d = g;
    std::vector<double> alpha(s_hist.size());
    for (int k = static_cast<int>(s_hist.size()) - 1; k >= 0; --k) {
      const double rho = 1.0 / y_hist[k].dot(s_hist[k]);
      alpha[k] = rho * s_hist[k].dot(d);
      d -= alpha[k] * y_hist[k];
    }
    d *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
    for (size_t k = 0; k < s_hist.size(); ++k) {
      const double rho = 1.0 / y_hist[k].dot(s_hist[k]);
      d += (alpha[k] - rho * y_hist[k].dot(d)) * s_hist[k];
    }
    return d;
  };

  double best_phi = cur.phi;
  MatrixXd best_amps = amps;
  int stall = 0;

  while (cur.phi < goal && rep.iterations < max_iter) {
    VectorXd g = flat(cur.grad);
    VectorXd d = direction(g);
    if (d.dot(g) <= 0) {  // not an ascent direction; drop the memory
      s_hist.clear();
      y_hist.clear();
      d = direction(g);
    }

    // backtracking line search from the natural quasi-Newton step
    MatrixXd cand;
    EvalResult next;
    bool accepted = false;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      double step = 1.0;
      for (int half = 0; half < 50; ++half) {
        cand = amps + step * Eigen::Map<const MatrixXd>(d.data(), amps.rows(), amps.cols());
        cand = cand.cwiseMax(-opt.amp_cap).cwiseMin(opt.amp_cap);
        next = evaluate(cand, init.dt_s, w, false, exec);
        if (next.phi > cur.phi) {
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted && !s_hist.empty()) {  // retry once along the bare gradient
        s_hist.clear();
        y_hist.clear();
        d = direction(g);
      } else {
        break;
      }
    }
    if (!accepted) {
      rep.exit_reason = GrapeExit::stalled;
      break;
    }

    EvalResult nxt = evaluate(cand, init.dt_s, w, true, exec);
    VectorXd sk = flat(cand) - flat(amps);
    VectorXd yk = flat(cur.grad) - flat(nxt.grad);  // ascent convention
    if (sk.dot(yk) > 1e-14 * sk.norm() * yk.norm()) {
      s_hist.push_back(sk);
      y_hist.push_back(yk);
      if (static_cast<int>(s_hist.size()) > opt.lbfgs_history) {
        s_hist.pop_front();
        y_hist.pop_front();
      }
    }

    const double prev_phi = cur.phi;
    amps = cand;
    cur = nxt;
    ++rep.iterations;
    rep.fidelity_trace.push_back(cur.phi);
    if (cur.phi > best_phi) {
      best_phi = cur.phi;
      best_amps = amps;
    }

    stall = (cur.phi - prev_phi < opt.stall_rel * std::max(prev_phi, 1e-300)) ? stall + 1 : 0;
    if (stall >= opt.stall_window) {
      rep.exit_reason = GrapeExit::stalled;
      break;
    }
    (void)nvar;
  }

  if (best_phi >= goal)
    rep.exit_reason = GrapeExit::converged;
  else if (rep.iterations >= max_iter && rep.exit_reason != GrapeExit::stalled)
    rep.exit_reason = GrapeExit::max_iter;

  ControlPulse out = init;
  out.amps = best_amps;
  out.fidelity = best_phi;
  rep.final_fidelity = best_phi;
  rep.gradient_norm = flat(cur.grad).norm();
  return {out, rep};
}

std::pair<ControlPulse, GrapeReport> grape_optimize_multistart(
    const SpinSystem& s, const Operator& target, const std::string& name, int n_slices,
    double dt_s, double goal, int max_iter, const GrapeOptions& opt, int restarts, Exec exec) {
  std::pair<ControlPulse, GrapeReport> best;
  for (int k = 0; k <= restarts; ++k) {
    GrapeOptions o = opt;
    o.seed = opt.seed + static_cast<std::uint64_t>(k);
    ControlPulse init = make_initial_pulse(s, n_slices, dt_s, o.seed, o.init_amp);
    init.target_name = name;
    auto res = grape_optimize(init, s, target, goal, max_iter, o, exec);
    res.first.target_name = name;
    if (k == 0 || res.second.final_fidelity > best.second.final_fidelity) best = std::move(res);
    if (best.second.final_fidelity >= goal) break;
  }
  return best;
}

std::pair<ControlPulse, GrapeReport> selective_pi_pulse(const SpinSystem& s, int spin,
                                                        double duration_s, double goal,
                                                        int max_iter, const GrapeOptions& opt,
                                                        Exec exec) {
  if (spin < 1 || spin > s.n)
    throw std::invalid_argument("selective_pi_pulse: spin index out of range");
  if (!(duration_s > 0))
    throw std::invalid_argument("selective_pi_pulse: duration must be > 0");
  const double dt = 40e-6;
  const int n_slices = std::max(1, static_cast<int>(std::lround(duration_s / dt)));
  return grape_optimize_multistart(s, rotation(s.n, spin, M_PI, 0.0),
                                   "pi_x_spin" + std::to_string(spin), n_slices,
                                   duration_s / n_slices, goal, max_iter, opt, 5, exec);
}

}  // namespace spinqec
