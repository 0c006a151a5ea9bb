#include "spinqec/spin_system.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace spinqec {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& origin, const std::string& what) {
  throw std::invalid_argument(origin + ": " + what);
}

double number_at(const json& j, const std::string& key, const std::string& where,
                 const std::string& origin) {
  if (!j.contains(key)) fail(origin, where + "." + key + ": missing");
  if (!j.at(key).is_number()) fail(origin, where + "." + key + ": not a number");
  return j.at(key).get<double>();
}

}  // namespace

void validate(const SpinSystem& s) {
  if (s.n < 1) throw std::invalid_argument("spin system: n must be >= 1");
  if (static_cast<int>(s.labels.size()) != s.n ||
      static_cast<int>(s.nu_hz.size()) != s.n ||
      static_cast<int>(s.t2_s.size()) != s.n)
    throw std::invalid_argument("spin system: per-spin array length != n");
  if (!s.t1_s.empty() && static_cast<int>(s.t1_s.size()) != s.n)
    throw std::invalid_argument("spin system: t1_s length != n");
  if (s.j_hz.rows() != s.n || s.j_hz.cols() != s.n)
    throw std::invalid_argument("spin system: j_hz must be n x n");
  if (static_cast<int>(s.regime.size()) != s.n * s.n)
    throw std::invalid_argument("spin system: regime must be n x n");
  for (int i = 0; i < s.n; ++i) {
    if (!(s.t2_s[i] > 0))
      throw std::invalid_argument("spin system: t2_s[" + std::to_string(i + 1) + "] must be > 0");
    if (!s.t1_s.empty() && s.t1_s[i] < s.t2_s[i] / 2)
      throw std::invalid_argument("spin system: t1_s[" + std::to_string(i + 1) +
                                  "] below t2_s/2");
    if (s.j_hz(i, i) != 0.0)
      throw std::invalid_argument("spin system: j_hz diagonal must be zero");
    for (int j = 0; j < s.n; ++j) {
      if (s.j_hz(i, j) != s.j_hz(j, i))
        throw std::invalid_argument("spin system: j_hz[" + std::to_string(i + 1) + "][" +
                                    std::to_string(j + 1) + "] not symmetric");
      if (s.regime[i * s.n + j] != s.regime[j * s.n + i])
        throw std::invalid_argument("spin system: regime[" + std::to_string(i + 1) + "][" +
                                    std::to_string(j + 1) + "] not symmetric");
    }
  }
}

Operator build_hamiltonian(const SpinSystem& s) {
  validate(s);
  const Eigen::Index dim = Eigen::Index(1) << s.n;
  Operator h = Operator::Zero(dim, dim);
  for (int i = 1; i <= s.n; ++i)
    h -= M_PI * s.nu_hz[i - 1] * pauli_embed(s.n, i, Pauli::Z);
  for (int i = 1; i <= s.n; ++i) {
    for (int j = i + 1; j <= s.n; ++j) {
      const double jij = s.j_hz(i - 1, j - 1);
      if (jij == 0.0) continue;
      Operator c = pauli_embed(s.n, i, Pauli::Z) * pauli_embed(s.n, j, Pauli::Z);
      if (s.regime_at(i, j) == CouplingRegime::strong) {
        c += pauli_embed(s.n, i, Pauli::X) * pauli_embed(s.n, j, Pauli::X) +
             pauli_embed(s.n, i, Pauli::Y) * pauli_embed(s.n, j, Pauli::Y);
      }
      h += (M_PI / 2) * jij * c;
    }
  }
  return h;
}

SpinSystem parse_spin_system(const std::string& json_text, const std::string& origin) {
  json root;
  try {
    root = json::parse(json_text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    fail(origin, std::string("invalid JSON: ") + e.what());
  }

  if (!root.contains("spins") || !root.at("spins").is_array())
    fail(origin, "spins: missing or not an array");
  const json& spins = root.at("spins");
  const int n = static_cast<int>(spins.size());
  if (n < 1) fail(origin, "spins: empty");

  SpinSystem s;
  s.n = n;
  s.j_hz = Eigen::MatrixXd::Zero(n, n);
  s.regime.assign(static_cast<size_t>(n) * n, CouplingRegime::weak);

  bool any_t1 = false;
  for (int i = 0; i < n; ++i) {
    const json& sp = spins.at(i);
    const std::string where = "spins[" + std::to_string(i + 1) + "]";
    if (!sp.contains("label") || !sp.at("label").is_string())
      fail(origin, where + ".label: missing or not a string");
    s.labels.push_back(sp.at("label").get<std::string>());
    s.nu_hz.push_back(number_at(sp, "nu_hz", where, origin));
    s.t2_s.push_back(number_at(sp, "t2_s", where, origin));
    if (sp.contains("t1_s")) any_t1 = true;
  }
  if (any_t1) {
    for (int i = 0; i < n; ++i) {
      const std::string where = "spins[" + std::to_string(i + 1) + "]";
      s.t1_s.push_back(number_at(spins.at(i), "t1_s", where, origin));
    }
  }

  if (!root.contains("couplings") || !root.at("couplings").is_array())
    fail(origin, "couplings: missing or not an array");
  const json& cpl = root.at("couplings");
  if (static_cast<int>(cpl.size()) != n) fail(origin, "couplings: must have one row per spin");
  for (int i = 0; i < n; ++i) {
    const json& row = cpl.at(i);
    if (!row.is_array() || static_cast<int>(row.size()) != n)
      fail(origin, "couplings[" + std::to_string(i + 1) + "]: must be an array of length n");
    for (int j = 0; j < n; ++j) {
      const json& cell = row.at(j);
      if (cell.is_null()) continue;
      const std::string where =
          "couplings[" + std::to_string(i + 1) + "][" + std::to_string(j + 1) + "]";
      if (i == j) fail(origin, where + ": diagonal entry must be null");
      s.j_hz(i, j) = number_at(cell, "j_hz", where, origin);
      if (!cell.contains("regime") || !cell.at("regime").is_string())
        fail(origin, where + ".regime: missing or not a string");
      const std::string r = cell.at("regime").get<std::string>();
      if (r == "weak")
        s.regime[i * n + j] = CouplingRegime::weak;
      else if (r == "strong")
        s.regime[i * n + j] = CouplingRegime::strong;
      else
        fail(origin, where + ".regime: expected \"weak\" or \"strong\", got \"" + r + "\"");
    }
  }

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (s.j_hz(i, j) != s.j_hz(j, i))
        fail(origin, "couplings[" + std::to_string(i + 1) + "][" + std::to_string(j + 1) +
                         "].j_hz: not symmetric");
      if (s.regime[i * n + j] != s.regime[j * n + i])
        fail(origin, "couplings[" + std::to_string(i + 1) + "][" + std::to_string(j + 1) +
                         "].regime: not symmetric");
    }

  validate(s);
  return s;
}

SpinSystem load_spin_system(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open spin-system config: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_spin_system(buf.str(), path);
}

}  // namespace spinqec
