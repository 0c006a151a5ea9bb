#include "spinqec/control_pulse.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "spinqec/textio.hpp"

namespace spinqec {

void validate(const ControlPulse& p) {
  if (p.n_slices < 1) throw std::invalid_argument("control pulse: n_slices must be >= 1");
  if (!(p.dt_s > 0)) throw std::invalid_argument("control pulse: dt_s must be > 0");
  if (p.amps.rows() != p.n_slices ||
      p.amps.cols() != static_cast<Eigen::Index>(p.channels.size()))
    throw std::invalid_argument("control pulse: amps shape must be n_slices x n_channels");
}

std::vector<ControlChannel> per_spin_xy_channels(int n_spins) {
  std::vector<ControlChannel> chs;
  for (int s = 1; s <= n_spins; ++s) {
    chs.push_back({s, Axis::x});
    chs.push_back({s, Axis::y});
  }
  return chs;
}

Operator channel_operator(const ControlChannel& ch, int n_qubits) {
  return 0.5 * pauli_embed(n_qubits, ch.spin, ch.axis == Axis::x ? Pauli::X : Pauli::Y);
}

Operator pulse_propagator(const ControlPulse& p, const Operator& h) {
  validate(p);
  const int nq = static_cast<int>(std::lround(std::log2(static_cast<double>(h.rows()))));
  std::vector<Operator> cops;
  cops.reserve(p.channels.size());
  for (const auto& ch : p.channels) cops.push_back(channel_operator(ch, nq));

  Operator u = Operator::Identity(h.rows(), h.cols());
  for (int j = 0; j < p.n_slices; ++j) {
    Operator a = h;
    for (size_t c = 0; c < cops.size(); ++c) a += p.amps(j, static_cast<Eigen::Index>(c)) * cops[c];
    u = expm_hermitian(a, p.dt_s) * u;
  }
  return u;
}

ControlPulse rotate_pulse_phase(const ControlPulse& p, const std::vector<int>& spins,
                                double phase) {
  ControlPulse out = p;
  const double c = std::cos(phase), s = std::sin(phase);
  for (int spin : spins) {
    Eigen::Index ix = -1, iy = -1;
    for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(p.channels.size()); ++k) {
      if (p.channels[k].spin != spin) continue;
      (p.channels[k].axis == Axis::x ? ix : iy) = k;
    }
    if (ix < 0 || iy < 0)
      throw std::invalid_argument("rotate_pulse_phase: pulse lacks x/y channel pair for spin " +
                                  std::to_string(spin));
    for (int j = 0; j < p.n_slices; ++j) {
      const double ax = p.amps(j, ix), ay = p.amps(j, iy);
      out.amps(j, ix) = c * ax - s * ay;
      out.amps(j, iy) = s * ax + c * ay;
    }
  }
  return out;
}

unsigned spin_mask(const ControlPulse& p) {
  unsigned mask = 0;
  for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(p.channels.size()); ++c)
    if (p.amps.col(c).cwiseAbs().maxCoeff() > 0)
      mask |= 1u << (p.channels[c].spin - 1);
  return mask;
}

namespace {

std::string channel_token(const ControlChannel& ch) {
  return (ch.axis == Axis::x ? "x" : "y") + std::to_string(ch.spin);
}

ControlChannel parse_channel_token(const std::string& tok, const std::string& path) {
  if (tok.size() < 2 || (tok[0] != 'x' && tok[0] != 'y'))
    throw std::runtime_error(path + ": bad channel token '" + tok + "'");
  ControlChannel ch;
  ch.axis = tok[0] == 'x' ? Axis::x : Axis::y;
  ch.spin = std::stoi(tok.substr(1));
  return ch;
}

}  // namespace

void save_pulse(const std::string& path, const ControlPulse& p) {
  validate(p);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write pulse file: " + path);
  out << "# spinqec control pulse\n";
  out << "target " << (p.target_name.empty() ? "-" : p.target_name) << "\n";
  out << "fidelity " << fmt_g(p.fidelity, 17) << "\n";
  out << "n_slices " << p.n_slices << "\n";
  out << "dt_s " << fmt_g(p.dt_s, 17) << "\n";
  out << "channels";
  for (const auto& ch : p.channels) out << " " << channel_token(ch);
  out << "\n";
  for (int j = 0; j < p.n_slices; ++j) {
    for (Eigen::Index c = 0; c < p.amps.cols(); ++c)
      out << (c ? " " : "") << fmt_g(p.amps(j, c), 17);
    out << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

ControlPulse load_pulse(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open pulse file: " + path);
  ControlPulse p;
  std::string line;
  int header_seen = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "target") {
      ls >> p.target_name;
      if (p.target_name == "-") p.target_name.clear();
    } else if (key == "fidelity") {
      std::string v;
      ls >> v;
      p.fidelity = parse_double(v, path);
    } else if (key == "n_slices") {
      ls >> p.n_slices;
    } else if (key == "dt_s") {
      std::string v;
      ls >> v;
      p.dt_s = parse_double(v, path);
    } else if (key == "channels") {
      std::string tok;
      while (ls >> tok) p.channels.push_back(parse_channel_token(tok, path));
      header_seen = 1;
      break;
    } else {
      throw std::runtime_error(path + ": unexpected header key '" + key + "'");
    }
  }
  if (!header_seen || p.n_slices < 1 || p.channels.empty())
    throw std::runtime_error(path + ": incomplete pulse header");
  p.amps.resize(p.n_slices, static_cast<Eigen::Index>(p.channels.size()));
  for (int j = 0; j < p.n_slices; ++j) {
    if (!std::getline(in, line)) throw std::runtime_error(path + ": truncated amplitude table");
    std::istringstream ls(line);
    std::string v;
    for (Eigen::Index c = 0; c < p.amps.cols(); ++c) {
      if (!(ls >> v)) throw std::runtime_error(path + ": short amplitude row");
      p.amps(j, c) = parse_double(v, path);
    }
  }
  validate(p);
  return p;
}

}  // namespace spinqec
