// Acceptance suite: end-to-end checks of the simulation, synthesis, and
// analysis stack at pinned tolerances. Prints one line per criterion and
// exits with the number of failures.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "spinqec/fitting.hpp"
#include "spinqec/grape.hpp"
#include "spinqec/qec.hpp"
#include "spinqec/refocus.hpp"

namespace fs = std::filesystem;
using namespace spinqec;
using clock_type = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int n, const std::string& name, bool ok, const std::string& detail) {
  std::printf("[%s] criterion %d: %s (%s)\n", ok ? "PASS" : "FAIL", n, name.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

double elapsed_s(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

std::vector<double> grid_21() {
  std::vector<double> t(21);
  for (int i = 0; i < 21; ++i) t[static_cast<size_t>(i)] = 0.2 * i / 20.0;
  return t;
}

std::vector<std::pair<double, double>> averaged_points(const ExperimentResult& r) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& row : r.rows) pts.emplace_back(row.t_s, row.f);
  return pts;
}

Operator random_hermitian(int dim, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Operator m(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) m(r, c) = std::complex<double>(uni(rng), uni(rng));
  return 0.5 * (m + Operator(m.adjoint()));
}

std::string fnum(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// ---- criteria -------------------------------------------------------------

void criterion_1_and_2(const SpinSystem& s) {
  const auto t0 = clock_type::now();
  const auto times = grid_21();
  const ExperimentResult ec =
      run_experiment(ExperimentMode::ec, s, times, PipelinePulses::ideal, nullptr, {});
  const ExperimentResult de =
      run_experiment(ExperimentMode::de, s, times, PipelinePulses::ideal, nullptr, {});
  const FitResult fec = fit_cubic(averaged_points(ec));
  const FitResult fde = fit_cubic(averaged_points(de));
  const double dt = elapsed_s(t0);

  const double a1_ec = fec.coeffs(1);
  const double a1_de = fde.coeffs(1);
  const double de_ref = -1.0 / (2.0 * s.t2_s[1]);
  const bool ok1 = std::abs(a1_ec) <= 1e-3 &&
                   std::abs(a1_de - de_ref) / std::abs(de_ref) <= 0.02 && dt < 5.0;
  report(1, "first-order suppression",
         ok1,
         "EC |a1| = " + fnum(std::abs(a1_ec)) + " /s (bound 1e-3), DE a1 = " + fnum(a1_de) +
             " vs " + fnum(de_ref) + ", runtime " + fnum(dt) + " s");

  const double a2_ref = -(1.0 / (s.t2_s[0] * s.t2_s[1]) + 1.0 / (s.t2_s[0] * s.t2_s[2]) +
                          1.0 / (s.t2_s[1] * s.t2_s[2])) /
                        4.0;
  const double a2_dev = std::abs(fec.coeffs(2) - a2_ref) / std::abs(a2_ref);
  report(2, "EC curvature", a2_dev <= 0.05,
         "a2 = " + fnum(fec.coeffs(2)) + " vs analytic " + fnum(a2_ref) + ", deviation " +
             fnum(100 * a2_dev) + "%");
}

void criterion_3(const SpinSystem& s) {
  const auto times = grid_21();
  const ExperimentResult de =
      run_experiment(ExperimentMode::de, s, times, PipelinePulses::ideal, nullptr, {});
  const ExperimentResult fed =
      run_experiment(ExperimentMode::fed, s, times, PipelinePulses::ideal, nullptr, {});
  double max_diff = 0;
  for (size_t i = 0; i < de.rows.size(); ++i)
    max_diff = std::max(max_diff, std::abs(de.rows[i].f - fed.rows[i].f));
  report(3, "DE == FED in the ideal model", max_diff <= 1e-10,
         "max |f_DE - f_FED| = " + fnum(max_diff));
}

void criterion_4() {
  const auto t0 = clock_type::now();
  double worst = 0;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j)
      for (int k = 0; k < 10; ++k) {
        const std::array<double, 3> p{0.5 * i / 9.0, 0.5 * j / 9.0, 0.5 * k / 9.0};
        worst = std::max(worst,
                         std::abs(pipeline_fidelity(ExperimentMode::ec, p) - f_ec_exact(p)));
        worst = std::max(worst,
                         std::abs(pipeline_fidelity(ExperimentMode::de, p) - f_de_exact(p)));
      }
  const double dt = elapsed_s(t0);
  report(4, "channel-simulation vs closed-form oracle on the 10^3 grid",
         worst <= 1e-10 && dt < 30.0,
         "max deviation " + fnum(worst) + ", runtime " + fnum(dt) + " s");
}

void criterion_5(const SpinSystem& s) {
  const auto t0 = clock_type::now();
  GrapeOptions opt;  // fixed default seed
  std::string detail;
  bool ok = true;

  const struct {
    const char* name;
    double duration;
    Operator target;
  } targets[] = {
      {"encode", 8e-3, encode_unitary()},
      {"decode", 8e-3, decode_unitary()},
      {"decode+correct", 13.6e-3, Operator(toffoli_correct() * decode_unitary())},
  };
  for (const auto& tgt : targets) {
    const int n = static_cast<int>(std::lround(tgt.duration / 40e-6));
    const auto [pulse, rep] = grape_optimize_multistart(s, tgt.target, tgt.name, n,
                                                        tgt.duration / n, 0.999, 20000, opt, 3,
                                                        Exec::par);
    detail += std::string(tgt.name) + " " + fnum(rep.final_fidelity) + ", ";
    ok = ok && rep.final_fidelity >= 0.999;
  }

  // gradient vs central finite differences on 5 random instances
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> uni(-2 * M_PI * 50, 2 * M_PI * 50);
  double worst_rel = 0;
  for (int inst = 0; inst < 5; ++inst) {
    ControlPulse p;
    p.n_slices = 6;
    p.dt_s = 1e-3;
    p.channels = per_spin_xy_channels(3);
    p.amps.resize(6, 6);
    for (int j = 0; j < 6; ++j)
      for (int c = 0; c < 6; ++c) p.amps(j, c) = uni(rng);
    const Operator target = expm_hermitian(random_hermitian(8, rng), 1e-3);
    const Eigen::MatrixXd g = grape_gradient(p, s, target);
    const double eps = 1e-6;
    double max_err = 0, max_fd = 0;
    for (int j = 0; j < 6; ++j)
      for (int c = 0; c < 6; ++c) {
        ControlPulse hi = p, lo = p;
        hi.amps(j, c) += eps;
        lo.amps(j, c) -= eps;
        const double fd =
            (grape_fidelity(hi, s, target) - grape_fidelity(lo, s, target)) / (2 * eps);
        max_err = std::max(max_err, std::abs(fd - g(j, c)));
        max_fd = std::max(max_fd, std::abs(fd));
      }
    worst_rel = std::max(worst_rel, max_err / max_fd);
  }
  ok = ok && worst_rel <= 1e-6;
  const double dt = elapsed_s(t0);
  ok = ok && dt < 600.0;
  report(5, "GRAPE synthesis and gradient",
         ok, detail + "FD max rel err " + fnum(worst_rel) + ", runtime " + fnum(dt) + " s");
}

void criterion_6(const SpinSystem& s) {
  const auto t0 = clock_type::now();
  const PhaseSearchResult r = phase_search(s, 0.2, Exec::par);
  const double dt = elapsed_s(t0);
  report(6, "refocusing phase search at 0.2 s", r.fidelity >= 0.9996,
         "fidelity " + fnum(r.fidelity) + " (selective pulses " +
             fnum(r.selective_fidelity_c1) + ", " + fnum(r.selective_fidelity_c2) +
             "), runtime " + fnum(dt) + " s");
}

void criterion_7() {
  const auto t0 = clock_type::now();
  auto sample = [](const Eigen::Vector4d& c) {
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i < 21; ++i) {
      const double t = 0.2 * i / 20.0;
      pts.emplace_back(t, eval_cubic(c, t));
    }
    return pts;
  };
  const FitResult ec = fit_cubic(sample({0.9828, -0.0166, -0.5380, 0.0014}));
  const FitResult de = fit_cubic(sample({0.9982, -0.4361, 0.1679, 0.2152}));
  const FitResult fed = fit_cubic(sample({1.0056, -0.4164, 0.3363, -0.2123}));
  const FitResult ec98 = fit_cubic(sample({0.7895, -0.0957, -0.0828, 0.0370}));
  const FitResult de98 = fit_cubic(sample({0.8539, -1.1021, 0.8696, 0.0378}));

  const RatioResult r1 = first_order_ratio(de, ec);
  const RatioResult r2 = first_order_ratio(fed, ec);
  const RatioResult r3 = first_order_ratio(de98, ec98);
  const bool ratios_ok = r1.defined && std::abs(r1.value - 26.2) <= 0.3 && r2.defined &&
                         std::abs(r2.value - 25.0) <= 0.3 && r3.defined &&
                         std::abs(r3.value - 11.5) <= 0.2;

  const double tx = crossover_time(ec, fed, 0.01, 0.15);
  const bool cross_ok = std::abs(tx - 0.0672) <= 0.0005;
  const double dt = elapsed_s(t0);
  report(7, "analysis reproduction from the printed fits",
         ratios_ok && cross_ok && dt < 1.0,
         "ratios " + fnum(r1.value) + "/" + fnum(r2.value) + "/" + fnum(r3.value) +
             ", crossover " + fnum(tx) + " s vs 0.0672 +- 0.0005, runtime " + fnum(dt) + " s");
}

void criterion_8(const SpinSystem& s) {
  std::mt19937_64 rng(88);
  double worst_complete = 0, worst_semi = 0, worst_agree = 0;
  for (double t : {0.02, 0.1, 0.31}) {
    const DephasingChannel ch = make_channel(t, s);
    Operator sum = Operator::Zero(8, 8);
    for (const auto& k : ch.kraus) sum += k.adjoint() * k;
    worst_complete = std::max(
        worst_complete, (sum - Operator::Identity(8, 8)).cwiseAbs().maxCoeff());
  }
  for (int rep = 0; rep < 100; ++rep) {
    const Operator rho = random_hermitian(8, rng);
    const double t1 = 0.001 + 0.002 * rep, t2 = 0.15 - 0.001 * rep;
    const Operator two =
        apply_channel(make_channel(t1, s), apply_channel(make_channel(t2, s), rho));
    const Operator one = apply_channel(make_channel(t1 + t2, s), rho);
    worst_semi = std::max(worst_semi, (two - one).cwiseAbs().maxCoeff());
    const DephasingChannel ch = make_channel(t2, s);
    worst_agree = std::max(
        worst_agree,
        (apply_channel(ch, rho) - apply_channel_pauli(ch, rho)).cwiseAbs().maxCoeff());
  }
  report(8, "channel properties",
         worst_complete <= 1e-12 && worst_semi <= 1e-10 && worst_agree <= 1e-12,
         "completeness " + fnum(worst_complete) + ", semigroup " + fnum(worst_semi) +
             ", route agreement " + fnum(worst_agree));
}

void criterion_9() {
  const fs::path base = fs::temp_directory_path() / "spinqec_acceptance_all";
  fs::remove_all(base);
  fs::create_directories(base);
  bool ok = true;
  std::string detail;
  for (const char* run : {"r1", "r2"}) {
    const std::string cmd = std::string(SPINQEC_CLI_PATH) + " all --config " +
                            SPINQEC_CONFIG_PATH + " --seed 20110901 --out " +
                            (base / run).string() + " >/dev/null 2>&1";
    if (WEXITSTATUS(std::system(cmd.c_str())) != 0) {
      ok = false;
      detail = "CLI `all` failed";
    }
  }
  int compared = 0;
  if (ok) {
    for (const char* sub : {"pulses", "data", "reports"}) {
      std::vector<fs::path> rel;
      for (const auto& e : fs::recursive_directory_iterator(base / "r1" / sub))
        if (e.is_regular_file()) rel.push_back(fs::relative(e.path(), base / "r1"));
      std::sort(rel.begin(), rel.end());
      for (const auto& r : rel) {
        std::ifstream a(base / "r1" / r, std::ios::binary);
        std::ifstream b(base / "r2" / r, std::ios::binary);
        std::ostringstream sa, sb;
        sa << a.rdbuf();
        sb << b.rdbuf();
        if (!b || sa.str() != sb.str()) {
          ok = false;
          detail = "mismatch in " + r.string();
          break;
        }
        ++compared;
      }
    }
    if (ok) detail = std::to_string(compared) + " files byte-identical";
  }
  report(9, "determinism of `all`", ok, detail);
  fs::remove_all(base);
}

}  // namespace

int main() {
  const SpinSystem s = load_spin_system(SPINQEC_CONFIG_PATH);

  criterion_1_and_2(s);
  criterion_3(s);
  criterion_4();
  criterion_5(s);
  criterion_6(s);
  criterion_7();
  criterion_8(s);
  criterion_9();

  std::printf("%d criterion(s) failed\n", g_failures);
  return g_failures;
}
