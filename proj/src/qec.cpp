#include "spinqec/qec.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "spinqec/textio.hpp"

namespace spinqec {

namespace {

Operator proj(int value) {
  Operator p = Operator::Zero(2, 2);
  p(value, value) = 1.0;
  return p;
}

Operator cnot(int ctl, int tgt) {
  Operator one = Operator::Identity(1, 1);
  Operator zero = Operator::Identity(1, 1);
  for (int k = 1; k <= 3; ++k) {
    one = kron(one, k == ctl ? proj(1) : pauli_matrix(Pauli::I));
    zero = kron(zero, k == ctl ? proj(0) : pauli_matrix(Pauli::I));
  }
  return zero + one * pauli_embed(3, tgt, Pauli::X);
}

const std::array<Pauli, 3> kInputAxes{Pauli::X, Pauli::Y, Pauli::Z};

Operator input_state(Pauli a) {
  return kron(kron(proj(0), pauli_matrix(a)), proj(0));
}

void check_p(const std::array<double, 3>& p, const char* who) {
  for (double v : p)
    if (!(v >= 0.0) || v > 0.5)
      throw std::invalid_argument(std::string(who) + ": p components must lie in [0, 1/2]");
}

}  // namespace

const char* mode_name(ExperimentMode m) {
  switch (m) {
    case ExperimentMode::ec: return "ec";
    case ExperimentMode::de: return "de";
    case ExperimentMode::fed: return "fed";
  }
  return "?";
}

const char* pulse_model_name(PipelinePulses p) {
  return p == PipelinePulses::ideal ? "ideal" : "grape";
}

ExperimentMode parse_mode(const std::string& name) {
  if (name == "ec") return ExperimentMode::ec;
  if (name == "de") return ExperimentMode::de;
  if (name == "fed") return ExperimentMode::fed;
  throw std::invalid_argument("unknown experiment mode: " + name);
}

PipelinePulses parse_pulse_model(const std::string& name) {
  if (name == "ideal") return PipelinePulses::ideal;
  if (name == "grape") return PipelinePulses::grape;
  throw std::invalid_argument("unknown pulse model: " + name);
}

Operator encode_unitary() {
  const Operator h2 = (pauli_matrix(Pauli::X) + pauli_matrix(Pauli::Z)) / std::sqrt(2.0);
  const Operator had3 = kron(kron(h2, h2), h2);
  return had3 * cnot(2, 3) * cnot(2, 1);
}

Operator decode_unitary() { return encode_unitary().adjoint(); }

Operator toffoli_correct() {
  Operator both = Operator::Identity(1, 1);
  for (int k = 1; k <= 3; ++k) both = kron(both, k == 2 ? pauli_matrix(Pauli::I) : proj(1));
  return Operator::Identity(8, 8) - both + both * pauli_embed(3, 2, Pauli::X);
}

double f_ec_exact(const std::array<double, 3>& p) {
  check_p(p, "f_ec_exact");
  return 1.0 - (p[0] * p[1] + p[0] * p[2] + p[1] * p[2]) + 2.0 * p[0] * p[1] * p[2];
}

double f_de_exact(const std::array<double, 3>& p) {
  check_p(p, "f_de_exact");
  return 1.0 - p[1];
}

std::array<double, 3> pipeline_polarizations(ExperimentMode mode,
                                             const std::array<double, 3>& p) {
  check_p(p, "pipeline_polarizations");
  const DephasingChannel chan = make_channel_from_p(p);
  const Operator enc = encode_unitary();
  const Operator dec = decode_unitary();
  const Operator cor = toffoli_correct();

  std::array<double, 3> f{};
  for (int a = 0; a < 3; ++a) {
    const Operator rho0 = input_state(kInputAxes[static_cast<size_t>(a)]);
    const Operator meas = pauli_embed(3, 2, kInputAxes[static_cast<size_t>(a)]);
    const double ref = expect(meas, rho0);
    Operator rho = rho0;
    if (mode != ExperimentMode::fed) rho = enc * rho * enc.adjoint();
    rho = apply_channel(chan, rho);
    if (mode == ExperimentMode::ec) {
      rho = dec * rho * dec.adjoint();
      rho = cor * rho * cor.adjoint();
    } else if (mode == ExperimentMode::de) {
      rho = dec * rho * dec.adjoint();
    }
    f[static_cast<size_t>(a)] = expect(meas, rho) / ref;
  }
  return f;
}

double pipeline_fidelity(ExperimentMode mode, const std::array<double, 3>& p) {
  const auto f = pipeline_polarizations(mode, p);
  return (1.0 + f[0] + f[1] + f[2]) / 4.0;
}

ExperimentResult run_experiment(ExperimentMode mode, const SpinSystem& s,
                                const std::vector<double>& times_s, PipelinePulses model,
                                const GatePulseSet* pulses, const ExperimentOptions& opt) {
  for (double t : times_s)
    if (t < 0) throw std::invalid_argument("run_experiment: negative delay time");
  if (opt.repeats < 1) throw std::invalid_argument("run_experiment: repeats must be >= 1");
  const bool needs_gates = mode != ExperimentMode::fed;
  if (model == PipelinePulses::grape && needs_gates && pulses == nullptr)
    throw std::invalid_argument("run_experiment: grape pulse set missing");

  Operator enc, dec;
  double enc_dur = 0, dec_dur = 0;
  if (needs_gates) {
    if (model == PipelinePulses::ideal) {
      enc = encode_unitary();
      dec = mode == ExperimentMode::ec ? Operator(toffoli_correct() * decode_unitary())
                                       : decode_unitary();
    } else {
      const Operator h = build_hamiltonian(s);
      const ControlPulse& dpulse =
          mode == ExperimentMode::ec ? pulses->decode_correct : pulses->decode;
      enc = pulse_propagator(pulses->encode, h);
      dec = pulse_propagator(dpulse, h);
      enc_dur = pulses->encode.duration_s();
      dec_dur = dpulse.duration_s();
    }
  }
  const bool smear = opt.noise_during_pulses && model == PipelinePulses::grape && needs_gates;

  // pre-draw readout noise serially so parallel row evaluation stays
  // deterministic; order is t-major, repeat, then axis
  const int nt = static_cast<int>(times_s.size());
  std::vector<double> noise;
  if (opt.repeats > 1 && opt.noise_sigma > 0) {
    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> gauss(0.0, opt.noise_sigma);
    noise.resize(static_cast<size_t>(nt) * opt.repeats * 3);
    for (double& v : noise) v = gauss(rng);
  }

  ExperimentResult res;
  res.mode = mode;
  res.pulse_model = model;
  res.repeats = opt.repeats;
  res.noise_sigma = opt.noise_sigma;
  res.rows.resize(static_cast<size_t>(nt) * opt.repeats);

  parallel_for(nt, opt.exec, [&](std::int64_t ti) {
    const double t = times_s[static_cast<size_t>(ti)];
    const DephasingChannel chan = make_channel(t, s);
    std::array<double, 3> base{};
    for (int a = 0; a < 3; ++a) {
      const Operator rho0 = input_state(kInputAxes[static_cast<size_t>(a)]);
      const Operator meas = pauli_embed(3, 2, kInputAxes[static_cast<size_t>(a)]);
      const double ref = expect(meas, rho0);
      Operator rho = rho0;
      if (needs_gates) {
        if (smear) rho = apply_channel(make_channel(enc_dur / 2, s), rho);
        rho = enc * rho * enc.adjoint();
        if (smear) rho = apply_channel(make_channel(enc_dur / 2, s), rho);
      }
      rho = apply_channel(chan, rho);
      if (needs_gates) {
        if (smear) rho = apply_channel(make_channel(dec_dur / 2, s), rho);
        rho = dec * rho * dec.adjoint();
        if (smear) rho = apply_channel(make_channel(dec_dur / 2, s), rho);
      }
      base[static_cast<size_t>(a)] = expect(meas, rho) / ref;
    }
    for (int r = 0; r < opt.repeats; ++r) {
      ExperimentRow row;
      row.t_s = t;
      row.repeat = r + 1;
      const size_t noff = (static_cast<size_t>(ti) * opt.repeats + r) * 3;
      row.f_x = base[0] + (noise.empty() ? 0.0 : noise[noff + 0]);
      row.f_y = base[1] + (noise.empty() ? 0.0 : noise[noff + 1]);
      row.f_z = base[2] + (noise.empty() ? 0.0 : noise[noff + 2]);
      row.f = (1.0 + row.f_x + row.f_y + row.f_z) / 4.0;
      res.rows[static_cast<size_t>(ti) * opt.repeats + r] = row;
    }
  });
  return res;
}

void write_experiment_csv(std::ostream& out, const ExperimentResult& r) {
  out << "mode,pulse_model,t_s,repeat,f_x,f_y,f_z,f\n";
  for (const auto& row : r.rows) {
    out << mode_name(r.mode) << ',' << pulse_model_name(r.pulse_model) << ','
        << fmt_g(row.t_s, 12) << ',' << row.repeat << ',' << fmt_g(row.f_x, 12) << ','
        << fmt_g(row.f_y, 12) << ',' << fmt_g(row.f_z, 12) << ',' << fmt_g(row.f, 12) << '\n';
  }
}

void write_experiment_csv(const std::string& path, const ExperimentResult& r) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write csv: " + path);
  write_experiment_csv(out, r);
  if (!out) throw std::runtime_error("write failed: " + path);
}

ExperimentResult read_experiment_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CsvParseError("cannot open csv: " + path, 0);
  std::string line;
  int lineno = 0;
  if (!std::getline(in, line)) throw CsvParseError(path + ": empty file", 0);
  ++lineno;
  if (line != "mode,pulse_model,t_s,repeat,f_x,f_y,f_z,f")
    throw CsvParseError(path + ": bad header", lineno);
  ExperimentResult res;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != 8)
      throw CsvParseError(path + ": expected 8 columns, got " + std::to_string(cells.size()),
                          lineno);
    try {
      ExperimentRow row;
      const ExperimentMode m = parse_mode(cells[0]);
      const PipelinePulses pm = parse_pulse_model(cells[1]);
      row.t_s = parse_double(cells[2], path);
      row.repeat = std::stoi(cells[3]);
      row.f_x = parse_double(cells[4], path);
      row.f_y = parse_double(cells[5], path);
      row.f_z = parse_double(cells[6], path);
      row.f = parse_double(cells[7], path);
      if (first) {
        res.mode = m;
        res.pulse_model = pm;
        first = false;
      } else if (m != res.mode || pm != res.pulse_model) {
        throw std::invalid_argument("mixed mode/pulse_model rows");
      }
      res.repeats = std::max(res.repeats, row.repeat);
      res.rows.push_back(row);
    } catch (const CsvParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw CsvParseError(path + ": " + e.what(), lineno);
    }
  }
  if (res.rows.empty()) throw CsvParseError(path + ": no data rows", lineno);
  return res;
}

}  // namespace spinqec
