#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "spinqec/control_pulse.hpp"
#include "spinqec/dephasing.hpp"
#include "spinqec/operator.hpp"
#include "spinqec/parallel.hpp"
#include "spinqec/spin_system.hpp"

namespace spinqec {

// ec: encode / noise / decode + Toffoli correction
// de: encode / noise / decode only
// fed: bare input under the (refocused) noisy delay
enum class ExperimentMode { ec, de, fed };

enum class PipelinePulses { ideal, grape };

const char* mode_name(ExperimentMode m);
const char* pulse_model_name(PipelinePulses p);
ExperimentMode parse_mode(const std::string& name);
PipelinePulses parse_pulse_model(const std::string& name);

// Circuit blocks of the 3-qubit phase code; data on qubit 2, ancillas 1 and 3.
Operator encode_unitary();   // CNOT(2->1), CNOT(2->3), then H on all three
Operator decode_unitary();   // exact inverse of encode_unitary
Operator toffoli_correct();  // controls 1 and 3, target 2

// Closed-form entanglement fidelities of the ideal pipelines under the
// uncorrelated phase-flip channel.
double f_ec_exact(const std::array<double, 3>& p);
double f_de_exact(const std::array<double, 3>& p);

// Full density-matrix simulation route (ideal gates, explicit Kraus channel);
// returns {f_x, f_y, f_z}.
std::array<double, 3> pipeline_polarizations(ExperimentMode mode, const std::array<double, 3>& p);
double pipeline_fidelity(ExperimentMode mode, const std::array<double, 3>& p);

struct GatePulseSet {
  ControlPulse encode;
  ControlPulse decode;
  ControlPulse decode_correct;
};

struct ExperimentRow {
  double t_s = 0;
  int repeat = 1;
  double f_x = 0, f_y = 0, f_z = 0, f = 0;
};

struct ExperimentResult {
  ExperimentMode mode = ExperimentMode::ec;
  PipelinePulses pulse_model = PipelinePulses::ideal;
  int repeats = 1;
  double noise_sigma = 0;
  std::vector<ExperimentRow> rows;  // t-major, then repeat
};

struct ExperimentOptions {
  int repeats = 1;
  double noise_sigma = 0;       // readout-noise std added per f_a when repeats > 1
  std::uint64_t seed = 1998;
  bool noise_during_pulses = false;  // smear dephasing across the gate windows (grape model)
  Exec exec = Exec::par;
};

// Runs the Fig.-2a pipeline for rho_in in {X2, Y2, Z2} over the delay grid.
// `pulses` is required for the grape model (except FED, which applies no
// gates). The refocused delay enters as pure dephasing.
ExperimentResult run_experiment(ExperimentMode mode, const SpinSystem& s,
                                const std::vector<double>& times_s, PipelinePulses model,
                                const GatePulseSet* pulses, const ExperimentOptions& opt = {});

// CSV schema: mode,pulse_model,t_s,repeat,f_x,f_y,f_z,f (12 significant digits).
void write_experiment_csv(std::ostream& out, const ExperimentResult& r);
void write_experiment_csv(const std::string& path, const ExperimentResult& r);

struct CsvParseError : std::runtime_error {
  int line;
  CsvParseError(const std::string& what, int line_no)
      : std::runtime_error(what), line(line_no) {}
};

ExperimentResult read_experiment_csv(const std::string& path);

}  // namespace spinqec
