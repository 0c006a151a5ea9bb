#include "spinqec/sequence.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "spinqec/textio.hpp"

namespace spinqec {

namespace fs = std::filesystem;

Segment Segment::delay(double t_s) {
  if (t_s < 0) throw std::invalid_argument("segment: delay duration must be >= 0");
  Segment s;
  s.kind = Kind::delay;
  s.duration_s = t_s;
  return s;
}

Segment Segment::hard(int spin, double angle_rad, double phase_rad, double duration_s) {
  if (duration_s < 0) throw std::invalid_argument("segment: pulse duration must be >= 0");
  if (!(angle_rad > 0) || angle_rad > 2 * M_PI + 1e-15)
    throw std::invalid_argument("segment: hard pulse angle must be in (0, 2*pi]");
  Segment s;
  s.kind = Kind::hard_pulse;
  s.spin = spin;
  s.angle_rad = angle_rad;
  s.phase_rad = phase_rad;
  s.duration_s = duration_s;
  return s;
}

Segment Segment::shaped(std::shared_ptr<const ControlPulse> p, std::string file) {
  Segment s;
  s.kind = Kind::shaped_pulse;
  s.pulse = std::move(p);
  s.pulse_file = std::move(file);
  if (s.pulse) s.duration_s = s.pulse->duration_s();
  return s;
}

double PulseSequence::total_duration_s() const {
  double t = 0;
  for (const auto& seg : segments) t += seg.duration_s;
  return t;
}

Operator segment_propagator(const Segment& seg, const Operator& h, PulseModel model) {
  const int nq = static_cast<int>(std::lround(std::log2(static_cast<double>(h.rows()))));
  switch (seg.kind) {
    case Segment::Kind::delay:
      return expm_hermitian(h, seg.duration_s);
    case Segment::Kind::hard_pulse: {
      if (model == PulseModel::ideal || seg.duration_s == 0)
        return rotation(nq, seg.spin, seg.angle_rad, seg.phase_rad);
      // nutation amp = angle/duration; rf term enters as (amp/2)(cos X + sin Y)
      const double amp = seg.angle_rad / seg.duration_s;
      const Operator rf =
          0.5 * amp *
          (std::cos(seg.phase_rad) * pauli_embed(nq, seg.spin, Pauli::X) +
           std::sin(seg.phase_rad) * pauli_embed(nq, seg.spin, Pauli::Y));
      return expm_hermitian(h + rf, seg.duration_s);
    }
    case Segment::Kind::shaped_pulse:
      if (!seg.pulse)
        throw std::runtime_error("segment: unresolved shaped pulse reference" +
                                 (seg.pulse_file.empty() ? "" : " (" + seg.pulse_file + ")"));
      return pulse_propagator(*seg.pulse, h);
  }
  throw std::logic_error("segment: unknown kind");
}

Operator segment_propagator(const Segment& seg, const SpinSystem& s, PulseModel model) {
  return segment_propagator(seg, build_hamiltonian(s), model);
}

Operator sequence_propagator(const PulseSequence& seq, const SpinSystem& s, PulseModel model) {
  const Operator h = build_hamiltonian(s);
  Operator u = Operator::Identity(h.rows(), h.cols());
  for (const auto& seg : seq.segments) u = segment_propagator(seg, h, model) * u;
  return u;
}

void save_sequence(const std::string& path, const PulseSequence& seq) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write sequence file: " + path);
  const fs::path dir = fs::path(path).parent_path();
  int unnamed = 0;
  for (const auto& seg : seq.segments) {
    switch (seg.kind) {
      case Segment::Kind::delay:
        out << "DELAY " << fmt_g(seg.duration_s, 17) << "\n";
        break;
      case Segment::Kind::hard_pulse:
        out << "HARD " << seg.spin << " " << fmt_g(seg.angle_rad, 17) << " "
            << fmt_g(seg.phase_rad, 17) << " " << fmt_g(seg.duration_s, 17) << "\n";
        break;
      case Segment::Kind::shaped_pulse: {
        if (!seg.pulse) throw std::runtime_error("save_sequence: unresolved shaped pulse");
        std::string file = seg.pulse_file;
        if (file.empty())
          file = (seq.name.empty() ? std::string("pulse") : seq.name) + "_s" +
                 std::to_string(unnamed++) + ".pulse";
        save_pulse((dir / file).string(), *seg.pulse);
        out << "SHAPED " << file << " " << spin_mask(*seg.pulse) << "\n";
        break;
      }
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

PulseSequence load_sequence(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open sequence file: " + path);
  const fs::path dir = fs::path(path).parent_path();
  PulseSequence seq;
  seq.name = fs::path(path).stem().string();
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string kind;
    ls >> kind;
    if (kind == "DELAY") {
      std::string t;
      ls >> t;
      seq.segments.push_back(Segment::delay(parse_double(t, path)));
    } else if (kind == "HARD") {
      int spin;
      std::string a, p, d;
      ls >> spin >> a >> p >> d;
      seq.segments.push_back(Segment::hard(spin, parse_double(a, path), parse_double(p, path),
                                           parse_double(d, path)));
    } else if (kind == "SHAPED") {
      std::string file;
      unsigned mask;
      ls >> file >> mask;
      auto pulse = std::make_shared<ControlPulse>(load_pulse((dir / file).string()));
      seq.segments.push_back(Segment::shaped(std::move(pulse), file));
    } else {
      throw std::runtime_error(path + ": unknown segment kind '" + kind + "'");
    }
  }
  return seq;
}

}  // namespace spinqec
