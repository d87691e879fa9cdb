#include "gmae/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gmae {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad number for '" + key + "': " + v);
  }
}

int to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const int x = std::stoi(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad integer for '" + key + "': " + v);
  }
}

}  // namespace

void RunConfig::validate() const {
  if (mode != "auto" && mode != "generic" && mode != "nongeneric") {
    throw std::invalid_argument("config: mode must be auto|generic|nongeneric");
  }
  if (!(t_max > t_min) || !(s_max > s_min)) {
    throw std::invalid_argument("config: empty parameter range");
  }
  if (n_s < 2 || n_t < 2) {
    throw std::invalid_argument("config: grid counts must be >= 2");
  }
  if (!(step > 0.0)) throw std::invalid_argument("config: step must be > 0");
  if (!(tol.eps_zero > 0) || !(tol.newton_tol > 0) || !(tol.locate_tol > 0) ||
      !(tol.deriv_eps > 0)) {
    throw std::invalid_argument("config: tolerances must be > 0");
  }
  if (!(box_hi > box_lo)) {
    throw std::invalid_argument("config: empty probe box");
  }
  if (samples < 1) throw std::invalid_argument("config: samples must be >= 1");
}

RunConfig parse_run_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));

    if (key == "alpha") cfg.alpha = val;
    else if (key == "A") cfg.gmas_a = val;
    else if (key == "B") cfg.gmas_b = val;
    else if (key == "C") cfg.gmas_c = val;
    else if (key == "D") cfg.gmas_d = val;
    else if (key == "mode") cfg.mode = val;
    else if (key == "xi") cfg.xi = val;
    else if (key == "t0") cfg.t0 = to_double(key, val);
    else if (key == "mu0") cfg.mu0 = to_double(key, val);
    else if (key == "t_min") cfg.t_min = to_double(key, val);
    else if (key == "t_max") cfg.t_max = to_double(key, val);
    else if (key == "s_min") cfg.s_min = to_double(key, val);
    else if (key == "s_max") cfg.s_max = to_double(key, val);
    else if (key == "n_s") cfg.n_s = to_int(key, val);
    else if (key == "n_t") cfg.n_t = to_int(key, val);
    else if (key == "step") cfg.step = to_double(key, val);
    else if (key == "eps_zero") cfg.tol.eps_zero = to_double(key, val);
    else if (key == "newton_tol") cfg.tol.newton_tol = to_double(key, val);
    else if (key == "locate_tol") cfg.tol.locate_tol = to_double(key, val);
    else if (key == "deriv_eps") cfg.tol.deriv_eps = to_double(key, val);
    else if (key == "x0_ref") cfg.x0_ref = to_double(key, val);
    // TODO: expose per-variable probe intervals; only the uniform
    // box_lo/box_hi cube is wired through the config for now.
    else if (key == "box_lo") cfg.box_lo = to_double(key, val);
    else if (key == "box_hi") cfg.box_hi = to_double(key, val);
    else if (key == "samples") cfg.samples = to_int(key, val);
    else if (key == "contact_gate") cfg.contact_gate = to_double(key, val);
    else if (key == "rng_seed") cfg.rng_seed = std::stoull(val);
    else if (key == "out_csv") cfg.out_csv = val;
    else if (key == "out_obj") cfg.out_obj = val;
    else if (key == "out_report") cfg.out_report = val;
    else if (key == "out_singular") cfg.out_singular = val;
    else {
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str());
}

void apply_tolerance_override(RunConfig& cfg, const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos) {
    throw std::invalid_argument("tolerance override must be key=value");
  }
  const std::string key = trim(spec.substr(0, eq));
  const double val = to_double(key, trim(spec.substr(eq + 1)));
  if (key == "eps_zero") cfg.tol.eps_zero = val;
  else if (key == "newton_tol") cfg.tol.newton_tol = val;
  else if (key == "locate_tol") cfg.tol.locate_tol = val;
  else if (key == "deriv_eps") cfg.tol.deriv_eps = val;
  else throw std::invalid_argument("unknown tolerance '" + key + "'");
}

}  // namespace gmae
