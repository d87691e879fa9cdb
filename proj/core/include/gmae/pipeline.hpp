#ifndef GMAE_PIPELINE_HPP
#define GMAE_PIPELINE_HPP

#include <optional>
#include <string>

#include "gmae/classify.hpp"
#include "gmae/config.hpp"
#include "gmae/singularity.hpp"
#include "gmae/verify.hpp"

namespace gmae {

/// Pipeline-level refusal: classification gates failed (not involutive,
/// mixed genericity under mode=auto, forced mode contradicting the
/// probe-box verdict, residual gate exceeded).
class GateError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ClassifyOutcome {
  std::optional<ClassificationReport> alpha_report;
  std::string report_text;
};

/// Classification report for the configured system. With `alpha` set it
/// runs the involutive / genericity / derived-type pipeline plus the
/// case-A characteristic-dimension probes; with A,B,C,D set it prints
/// the four-case characteristic-dimension table at five probe points.
ClassifyOutcome run_classify(const RunConfig& cfg);

struct SolveArtifacts {
  Mode mode = Mode::Generic;
  AlphaSystem sys;
  SeedCurve seed;
  MuSolution mu;
  NewtonOptions newton;
  SingularityOptions sing_opts;
  IntegralSurface surface;
  SingularityReport singular;
  ResidualSummary residuals;
  std::string report_text;

  SurfaceChart chart() const {
    return SurfaceChart(sys, mode, seed, mu, newton);
  }
};

/// Full construction pipeline: gate on classification, integrate the
/// characteristic ODE, lift the surface, scan and classify singular
/// points, attach residuals. Does not write any files.
SolveArtifacts run_solve(const RunConfig& cfg);

/// run_solve plus the CSV / OBJ / report / singular-marker outputs named
/// in the configuration.
SolveArtifacts run_solve_and_write(const RunConfig& cfg);

struct VerifyOutcome {
  ResidualSummary summary;
  bool pass = false;
  std::string report_text;
};

/// Residual gates on a surface: from `surface_csv` when given, otherwise
/// on a freshly constructed surface. `pass` reflects the contact-residual
/// gate.
VerifyOutcome run_verify(const RunConfig& cfg,
                         const std::optional<std::string>& surface_csv = {});

// deterministic writers (17 significant digits, fixed iteration order)
void write_surface_csv(const std::string& path, const SolveArtifacts& art);
void write_surface_obj(const std::string& path, const IntegralSurface& surf);
void write_singular_csv(const std::string& path,
                        const SingularityReport& report);
void write_text(const std::string& path, const std::string& text);

/// Reads a surface CSV back into grid form (tangent caches left empty).
IntegralSurface load_surface_csv(const std::string& path);

}  // namespace gmae

#endif
