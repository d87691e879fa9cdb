#ifndef GMAE_CONFIG_HPP
#define GMAE_CONFIG_HPP

#include <cstdint>
#include <string>

namespace gmae {

struct Tolerances {
  double eps_zero = 1e-9;     // classification zero tests
  double newton_tol = 1e-13;  // chart inversion residual
  double locate_tol = 1e-10;  // singular-point refinement
  double deriv_eps = 1e-6;    // singularity derivative thresholds
};

/// Flat key=value run configuration ('#' starts a comment, blank lines
/// ignored, unknown keys rejected).
struct RunConfig {
  std::string alpha;                      // coefficient expression
  std::string gmas_a, gmas_b, gmas_c, gmas_d;  // optional general system
  std::string mode = "auto";              // auto | generic | nongeneric
  std::string xi;                         // seed curve, expression in t
  double t0 = 0.0, mu0 = 0.0;
  double t_min = -0.5, t_max = 0.5;
  double s_min = -0.5, s_max = 0.5;
  int n_s = 101, n_t = 101;
  double step = 1e-3;
  Tolerances tol;
  double x0_ref = 1.0;
  double box_lo = 1.0, box_hi = 2.0;      // classification probe cube
  int samples = 200;
  double contact_gate = 1e-6;             // verify pass/fail threshold
  std::uint64_t rng_seed = 0x5eed0fda7aULL;

  std::string out_csv = "surface.csv";
  std::string out_obj = "surface.obj";
  std::string out_report = "report.txt";
  std::string out_singular = "singular.csv";

  void validate() const;  // throws std::invalid_argument
};

RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::string& path);

/// Applies one "key=value" tolerance override (eps_zero, newton_tol,
/// locate_tol, deriv_eps). Throws std::invalid_argument on unknown keys.
void apply_tolerance_override(RunConfig& cfg, const std::string& spec);

}  // namespace gmae

#endif
