// Command-line front end: GRAPE pulse synthesis, EC/DE/FED experiment sweeps,
// refocusing phase search, and decay-curve analysis, wired into reproducible
// one-command runs. Subcommand outputs land in <out>/pulses, <out>/data,
// <out>/reports (and <out>/sequences for refocus).

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <CLI11.hpp>

#include "spinqec/fitting.hpp"
#include "spinqec/grape.hpp"
#include "spinqec/qec.hpp"
#include "spinqec/refocus.hpp"
#include "spinqec/textio.hpp"

namespace fs = std::filesystem;
using namespace spinqec;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitGoalMiss = 3;
constexpr int kExitMissingPulse = 4;
constexpr int kExitBadCsv = 5;

struct RunConfig {
  std::string config_path = "configs/tce.json";
  std::string out_dir = "out";
  double t_start = 0.0;
  double t_stop = 0.2;
  int t_count = 21;
  std::vector<std::string> modes{"ec", "de", "fed"};
  std::string pulse_model = "ideal";
  std::uint64_t seed = 20110901;
  int repeats = 1;
  double noise_sigma = 0.0;
  double goal = 0.999;
  double grape_dt = 40e-6;
  double amp_cap = 2 * M_PI * 1e4;
  int max_iter = 20000;
  int restarts = 3;
  double total_delay = 0.2;
  double bracket_lo = 0.01;
  double bracket_hi = 0.15;
};

std::vector<double> time_grid(const RunConfig& c) {
  if (c.t_count < 1) throw std::invalid_argument("t-count must be >= 1");
  std::vector<double> t(static_cast<size_t>(c.t_count));
  for (int i = 0; i < c.t_count; ++i)
    t[static_cast<size_t>(i)] =
        c.t_count == 1 ? c.t_start
                       : c.t_start + (c.t_stop - c.t_start) * i / (c.t_count - 1);
  return t;
}

void apply_env_seed(RunConfig& c) {
  if (const char* env = std::getenv("SPINQEC_SEED")) c.seed = std::stoull(env);
}

void validate_config(const RunConfig& c) {
  if (!(c.goal > 0.0) || !(c.goal < 1.0))
    throw std::invalid_argument("goal must lie in (0,1)");
  if (c.repeats < 1) throw std::invalid_argument("repeats must be >= 1");
  if (c.noise_sigma < 0) throw std::invalid_argument("noise-sigma must be >= 0");
  if (!(c.grape_dt > 0)) throw std::invalid_argument("grape-dt must be > 0");
}

struct PulseTarget {
  std::string name;
  double duration_s;
  Operator target;
};

int cmd_grape(const RunConfig& c) {
  validate_config(c);
  const SpinSystem s = load_spin_system(c.config_path);
  fs::create_directories(fs::path(c.out_dir) / "pulses");
  fs::create_directories(fs::path(c.out_dir) / "reports");

  const std::vector<PulseTarget> targets{
      {"encode", 8e-3, encode_unitary()},
      {"decode", 8e-3, decode_unitary()},
      {"decode_correct", 13.6e-3, Operator(toffoli_correct() * decode_unitary())},
  };

  GrapeOptions opt;
  opt.seed = c.seed;
  opt.amp_cap = c.amp_cap;

  std::ostringstream report;
  report << "GRAPE synthesis report\n";
  report << "config " << c.config_path << "\n";
  report << "seed " << c.seed << "\n\n";

  bool missed = false;
  for (const auto& tgt : targets) {
    const int n_slices = std::max(1, static_cast<int>(std::lround(tgt.duration_s / c.grape_dt)));
    auto [pulse, rep] = grape_optimize_multistart(s, tgt.target, tgt.name, n_slices,
                                                  tgt.duration_s / n_slices, c.goal, c.max_iter,
                                                  opt, c.restarts, Exec::par);
    const std::string file = (fs::path(c.out_dir) / "pulses" / (tgt.name + ".pulse")).string();
    save_pulse(file, pulse);
    report << tgt.name << ": duration_s " << fmt_g(tgt.duration_s, 12) << " n_slices "
           << n_slices << " iterations " << rep.iterations << " exit "
           << grape_exit_name(rep.exit_reason) << " fidelity "
           << fmt_g(rep.final_fidelity, 12) << "\n";
    std::cout << tgt.name << ": fidelity " << fmt_g(rep.final_fidelity, 12) << " ("
              << rep.iterations << " iterations, " << grape_exit_name(rep.exit_reason) << ")\n";
    if (rep.final_fidelity < c.goal) missed = true;
  }
  std::ofstream out(fs::path(c.out_dir) / "reports" / "grape_report.txt");
  out << report.str();
  if (missed) {
    std::cerr << "error: at least one pulse missed the fidelity goal " << c.goal << "\n";
    return kExitGoalMiss;
  }
  return 0;
}

GatePulseSet load_pulse_set(const RunConfig& c) {
  const fs::path dir = fs::path(c.out_dir) / "pulses";
  GatePulseSet set;
  const std::pair<const char*, ControlPulse*> entries[] = {
      {"encode", &set.encode}, {"decode", &set.decode},
      {"decode_correct", &set.decode_correct}};
  for (const auto& [name, dst] : entries) {
    const fs::path file = dir / (std::string(name) + ".pulse");
    if (!fs::exists(file))
      throw std::system_error(std::make_error_code(std::errc::no_such_file_or_directory),
                              "pulse file missing: " + file.string() + " (run `spinqec grape`)");
    *dst = load_pulse(file.string());
  }
  return set;
}

int cmd_simulate(const RunConfig& c) {
  validate_config(c);
  const SpinSystem s = load_spin_system(c.config_path);
  const PipelinePulses model = parse_pulse_model(c.pulse_model);
  fs::create_directories(fs::path(c.out_dir) / "data");

  std::optional<GatePulseSet> pulses;
  if (model == PipelinePulses::grape) pulses.emplace(load_pulse_set(c));

  const std::vector<double> times = time_grid(c);
  ExperimentOptions opt;
  opt.repeats = c.repeats;
  opt.noise_sigma = c.noise_sigma;
  opt.seed = c.seed;

  for (const std::string& mode_str : c.modes) {
    const ExperimentMode mode = parse_mode(mode_str);
    const ExperimentResult res =
        run_experiment(mode, s, times, model, pulses ? &*pulses : nullptr, opt);
    const std::string file =
        (fs::path(c.out_dir) / "data" /
         (std::string(mode_name(mode)) + "_" + pulse_model_name(model) + ".csv"))
            .string();
    write_experiment_csv(file, res);

    std::cout << "mode " << mode_name(mode) << " (" << pulse_model_name(model) << ")\n";
    std::cout << "  t_s        f_x           f_y           f_z           f\n";
    for (size_t i = 0; i < res.rows.size(); i += static_cast<size_t>(c.repeats)) {
      // repeats averaged per delay for the printed table
      double fx = 0, fy = 0, fz = 0, f = 0;
      for (int r = 0; r < c.repeats; ++r) {
        const auto& row = res.rows[i + static_cast<size_t>(r)];
        fx += row.f_x;
        fy += row.f_y;
        fz += row.f_z;
        f += row.f;
      }
      const double inv = 1.0 / c.repeats;
      std::cout << "  " << fmt_g(res.rows[i].t_s, 6) << "  " << fmt_g(fx * inv, 10) << "  "
                << fmt_g(fy * inv, 10) << "  " << fmt_g(fz * inv, 10) << "  "
                << fmt_g(f * inv, 10) << "\n";
    }
  }
  return 0;
}

struct LabeledFit {
  ExperimentMode mode = ExperimentMode::ec;
  PipelinePulses model = PipelinePulses::ideal;
  FitResult fit;
  std::vector<std::pair<double, double>> averaged;  // (t, f) after repeat averaging
};

std::vector<std::pair<double, double>> average_repeats(const ExperimentResult& r) {
  std::map<double, std::pair<double, int>> acc;
  for (const auto& row : r.rows) {
    auto& [sum, cnt] = acc[row.t_s];
    sum += row.f;
    cnt += 1;
  }
  std::vector<std::pair<double, double>> out;
  for (const auto& [t, sc] : acc) out.emplace_back(t, sc.first / sc.second);
  return out;
}

void write_fit_report(const fs::path& dir, const LabeledFit& lf) {
  const std::string stem =
      std::string("fit_") + mode_name(lf.mode) + "_" + pulse_model_name(lf.model);
  {
    std::ofstream csv(dir / (stem + ".csv"));
    csv << "a0,a1,a2,a3,rel_err\n";
    for (int k = 0; k < 4; ++k) csv << fmt_g(lf.fit.coeffs(k), 12) << ",";
    csv << fmt_g(lf.fit.relative_fit_error, 12) << "\n";
  }
  std::ofstream txt(dir / (stem + ".txt"));
  txt << "cubic fit, mode " << mode_name(lf.mode) << ", pulse model "
      << pulse_model_name(lf.model) << "\n";
  txt << "n_points " << lf.fit.n_points << "\n";
  for (int k = 0; k < 4; ++k)
    txt << "a" << k << " " << fmt_g(lf.fit.coeffs(k), 12) << " +- "
        << fmt_g(std::sqrt(std::max(0.0, lf.fit.covariance(k, k))), 12) << "\n";
  txt << "relative_fit_error " << fmt_g(lf.fit.relative_fit_error, 12) << "\n";
}

int cmd_analyze(const RunConfig& c, const std::vector<std::string>& csvs,
                const std::vector<std::string>& ideal_csvs) {
  const fs::path rdir = fs::path(c.out_dir) / "reports";
  fs::create_directories(rdir);

  std::vector<LabeledFit> fits;
  for (const std::string& path : csvs) {
    const ExperimentResult r = read_experiment_csv(path);
    LabeledFit lf;
    lf.mode = r.mode;
    lf.model = r.pulse_model;
    lf.averaged = average_repeats(r);
    lf.fit = fit_cubic(lf.averaged);
    write_fit_report(rdir, lf);
    fits.push_back(std::move(lf));
  }

  std::ostringstream rep;
  rep << "analysis report\n\n";
  for (const auto& lf : fits) {
    rep << "fit " << mode_name(lf.mode) << "/" << pulse_model_name(lf.model) << ": a0..a3";
    for (int k = 0; k < 4; ++k) rep << " " << fmt_g(lf.fit.coeffs(k), 12);
    rep << " rel_err " << fmt_g(lf.fit.relative_fit_error, 12) << "\n";
  }

  auto find_fit = [&](ExperimentMode m, PipelinePulses pm) -> const LabeledFit* {
    for (const auto& lf : fits)
      if (lf.mode == m && lf.model == pm) return &lf;
    return nullptr;
  };

  for (PipelinePulses pm : {PipelinePulses::ideal, PipelinePulses::grape}) {
    const LabeledFit* ec = find_fit(ExperimentMode::ec, pm);
    const LabeledFit* de = find_fit(ExperimentMode::de, pm);
    const LabeledFit* fed = find_fit(ExperimentMode::fed, pm);
    if (!ec) continue;
    rep << "\ngroup " << pulse_model_name(pm) << ":\n";
    const std::pair<const char*, const LabeledFit*> ratios[] = {{"de/ec", de},
                                                                {"fed/ec", fed}};
    for (const auto& [label, other] : ratios) {
      if (!other) continue;
      const RatioResult r = first_order_ratio(other->fit, ec->fit);
      if (r.defined)
        rep << "first_order_ratio " << label << " " << fmt_g(r.value, 12) << " +- "
            << fmt_g(r.sigma, 12) << "\n";
      else
        rep << "first_order_ratio " << label
            << " undefined: denominator consistent with 0\n";
    }
    if (fed) {
      try {
        const double tx = crossover_time(ec->fit, fed->fit, c.bracket_lo, c.bracket_hi);
        rep << "crossover_ec_fed_s " << fmt_g(tx, 12) << "\n";
      } catch (const std::exception& e) {
        rep << "crossover_ec_fed_s undefined: " << e.what() << "\n";
      }
    }
  }

  for (const std::string& path : ideal_csvs) {
    const ExperimentResult ideal = read_experiment_csv(path);
    const auto ideal_avg = average_repeats(ideal);
    for (const auto& lf : fits) {
      if (lf.mode != ideal.mode || lf.model == ideal.pulse_model) continue;
      const auto [a, sa] = scale_fit(lf.averaged, ideal_avg);
      rep << "scale_factor_A " << mode_name(lf.mode) << " " << fmt_g(a, 12) << " +- "
          << fmt_g(sa, 12) << "\n";
    }
  }

  std::ofstream out(rdir / "analysis.txt");
  out << rep.str();
  std::cout << rep.str();
  return 0;
}

int cmd_refocus(const RunConfig& c) {
  validate_config(c);
  const SpinSystem s = load_spin_system(c.config_path);
  fs::create_directories(fs::path(c.out_dir) / "reports");
  fs::create_directories(fs::path(c.out_dir) / "sequences");

  GrapeOptions opt;
  opt.seed = c.seed;
  opt.amp_cap = c.amp_cap;
  const SelectivePulses sel = synthesize_selective_pulses(s, opt);
  const PhaseSearchResult r = phase_search(s, c.total_delay, sel, Exec::par);

  const PulseSequence seq = make_refocusing_sequence(s, c.total_delay, r.phases, sel);
  save_sequence((fs::path(c.out_dir) / "sequences" / "refocus.seq").string(), seq);

  std::ostringstream rep;
  rep << "refocusing phase search\n";
  rep << "total_delay_s " << fmt_g(c.total_delay, 12) << "\n";
  rep << "selective_pulse_fidelity_c1 " << fmt_g(r.selective_fidelity_c1, 12) << "\n";
  rep << "selective_pulse_fidelity_c2 " << fmt_g(r.selective_fidelity_c2, 12) << "\n";
  rep << "phases_rad";
  for (double p : r.phases) rep << " " << fmt_g(p, 12);
  rep << "\nfidelity " << fmt_g(r.fidelity, 12) << "\n";
  std::ofstream out(fs::path(c.out_dir) / "reports" / "refocus_report.txt");
  out << rep.str();
  std::cout << rep.str();
  return 0;
}

int cmd_all(const RunConfig& c) {
  if (const int rc = cmd_grape(c)) return rc;
  RunConfig ci = c;
  ci.pulse_model = "ideal";
  if (const int rc = cmd_simulate(ci)) return rc;
  RunConfig cg = c;
  cg.pulse_model = "grape";
  if (const int rc = cmd_simulate(cg)) return rc;

  std::vector<std::string> csvs, ideal_csvs;
  for (const char* m : {"ec", "de", "fed"}) {
    csvs.push_back((fs::path(c.out_dir) / "data" / (std::string(m) + "_grape.csv")).string());
    csvs.push_back((fs::path(c.out_dir) / "data" / (std::string(m) + "_ideal.csv")).string());
    ideal_csvs.push_back(
        (fs::path(c.out_dir) / "data" / (std::string(m) + "_ideal.csv")).string());
  }
  return cmd_analyze(c, csvs, ideal_csvs);
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig c;
  std::vector<std::string> analyze_csvs, analyze_ideal;

  CLI::App app{"three-qubit phase-error QEC simulation toolkit"};
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", c.config_path, "spin-system config file");
    cmd->add_option("--out", c.out_dir, "output directory");
    cmd->add_option("--seed", c.seed, "random seed (SPINQEC_SEED overrides)");
  };

  CLI::App* g = app.add_subcommand("grape", "synthesize encode/decode(+correct) pulses");
  add_common(g);
  g->add_option("--goal", c.goal, "target fidelity in (0,1)");
  g->add_option("--grape-dt", c.grape_dt, "slice duration, s");
  g->add_option("--amp-cap", c.amp_cap, "amplitude cap, rad/s");
  g->add_option("--max-iter", c.max_iter, "iteration cap per start");
  g->add_option("--restarts", c.restarts, "extra random starts on a miss");

  CLI::App* sim = app.add_subcommand("simulate", "run experiment sweeps, write CSVs");
  add_common(sim);
  sim->add_option("--mode", c.modes, "modes to run (ec, de, fed)")->delimiter(',');
  sim->add_option("--pulse-model", c.pulse_model, "ideal | grape");
  sim->add_option("--t-start", c.t_start, "first delay, s");
  sim->add_option("--t-stop", c.t_stop, "last delay, s");
  sim->add_option("--t-count", c.t_count, "number of delays");
  sim->add_option("--repeats", c.repeats, "rows per delay");
  sim->add_option("--noise-sigma", c.noise_sigma, "readout noise std (repeats > 1)");

  CLI::App* an = app.add_subcommand("analyze", "fit CSVs, ratios, crossover, scale factors");
  add_common(an);
  an->add_option("csv", analyze_csvs, "experiment CSV files")->required();
  an->add_option("--ideal", analyze_ideal, "ideal-model CSVs for scale factors");
  an->add_option("--bracket-lo", c.bracket_lo, "crossover bracket start, s");
  an->add_option("--bracket-hi", c.bracket_hi, "crossover bracket end, s");

  CLI::App* rf = app.add_subcommand("refocus", "refocusing phase search at one delay");
  add_common(rf);
  rf->add_option("--total-delay", c.total_delay, "wall time of the refocused delay, s");

  CLI::App* allc = app.add_subcommand("all", "grape + simulate (ideal, grape) + analyze");
  add_common(allc);
  allc->add_option("--goal", c.goal, "target fidelity in (0,1)");
  allc->add_option("--t-start", c.t_start, "first delay, s");
  allc->add_option("--t-stop", c.t_stop, "last delay, s");
  allc->add_option("--t-count", c.t_count, "number of delays");
  allc->add_option("--repeats", c.repeats, "rows per delay");
  allc->add_option("--noise-sigma", c.noise_sigma, "readout noise std (repeats > 1)");

  CLI11_PARSE(app, argc, argv);

  try {
    apply_env_seed(c);
    if (g->parsed()) return cmd_grape(c);
    if (sim->parsed()) return cmd_simulate(c);
    if (an->parsed()) return cmd_analyze(c, analyze_csvs, analyze_ideal);
    if (rf->parsed()) return cmd_refocus(c);
    if (allc->parsed()) return cmd_all(c);
  } catch (const CsvParseError& e) {
    std::cerr << "error (line " << e.line << "): " << e.what() << "\n";
    return kExitBadCsv;
  } catch (const std::system_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitMissingPulse;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return 0;
}
