#include "gmae/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

namespace gmae {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

ClassifyOptions classify_options(const RunConfig& cfg) {
  ClassifyOptions opt;
  opt.samples = cfg.samples;
  opt.eps_zero = cfg.tol.eps_zero;
  opt.seed = cfg.rng_seed;
  return opt;
}

NewtonOptions newton_options(const RunConfig& cfg) {
  NewtonOptions opt;
  opt.tol = cfg.tol.newton_tol;
  return opt;
}

SingularityOptions singularity_options(const RunConfig& cfg) {
  SingularityOptions opt;
  opt.locate_tol = cfg.tol.locate_tol;
  opt.eps_deriv = cfg.tol.deriv_eps;
  return opt;
}

std::vector<JetPoint> probe_points(const RunConfig& cfg) {
  std::mt19937_64 rng(cfg.rng_seed ^ 0x9137);
  std::uniform_real_distribution<double> unit(cfg.box_lo, cfg.box_hi);
  std::vector<JetPoint> pts;
  for (int i = 0; i < 5; ++i) {
    pts.push_back(JetPoint{unit(rng), unit(rng), unit(rng), unit(rng),
                           unit(rng)});
  }
  return pts;
}

std::string describe_point(const JetPoint& pt) {
  return "(" + fmt9(pt.x) + ", " + fmt9(pt.y) + ", " + fmt9(pt.z) + ", " +
         fmt9(pt.p) + ", " + fmt9(pt.q) + ")";
}

double node_lambda(const SolveArtifacts& art, const JetPoint& pt, double t) {
  const double xi2 = art.seed.derivative(2, t);
  const EvalPoint at = pt.eval_point();
  return art.mode == Mode::Generic
             ? xi2 + eval(art.sys.lambda_drift_generic(), at)
             : eval(art.sys.lambda_drift_nongeneric(), at) - xi2;
}

}  // namespace

ClassifyOutcome run_classify(const RunConfig& cfg) {
  ClassifyOutcome out;
  std::ostringstream rep;
  const Box box = Box::cube(cfg.box_lo, cfg.box_hi);
  const ClassifyOptions copts = classify_options(cfg);

  if (!cfg.alpha.empty()) {
    const AlphaSystem sys(parse(cfg.alpha));
    const ClassificationReport r = classify_alpha(sys, box, {}, copts);
    out.alpha_report = r;
    rep << "alpha: " << cfg.alpha << "\n";
    rep << "probe box: [" << fmt9(cfg.box_lo) << ", " << fmt9(cfg.box_hi)
        << "]^5, samples: " << cfg.samples << "\n";
    rep << "involutive: " << to_string(r.involutive)
        << " (max defect " << fmt9(r.max_involutivity_defect) << ")\n";
    rep << "genericity: " << to_string(r.genericity.verdict)
        << " (min |factor| " << fmt9(r.genericity.min_abs) << ")\n";
    if (r.genericity.verdict == Genericity::Mixed) {
      if (r.genericity.zero_witness) {
        rep << "  factor vanishes near "
            << describe_point(*r.genericity.zero_witness) << "\n";
      }
      if (r.genericity.nonzero_witness) {
        rep << "  factor nonzero near "
            << describe_point(*r.genericity.nonzero_witness) << "\n";
      }
    }
    rep << "derived type: " << to_string(r.derived.type);
    if (r.derived.type == DerivedType::Undetermined) {
      rep << " (requires involutive = yes and unmixed genericity)";
    }
    rep << "\n";
    if (r.involutive == TriState::Yes) {
      if (r.genericity.verdict == Genericity::Generic) {
        rep << "  max |discriminant 1|: " << fmt9(r.derived.max_d1) << "\n";
        rep << "  max |discriminant 2|: " << fmt9(r.derived.max_d2) << "\n";
      } else if (r.genericity.verdict == Genericity::NonGeneric) {
        rep << "  max |alpha_p + x alpha_z|: "
            << fmt9(r.derived.max_nongeneric) << "\n";
      }
    }
    rep << "characteristic dimension at probes (case A):\n";
    for (const auto& [pt, dim] : r.cauchy_dim_at) {
      rep << "  " << describe_point(pt) << " -> " << dim << "\n";
    }
  } else if (!cfg.gmas_a.empty() || !cfg.gmas_b.empty() ||
             !cfg.gmas_c.empty() || !cfg.gmas_d.empty()) {
    auto parse_or_zero = [](const std::string& text) {
      return text.empty() ? Expr::constant(0.0) : parse(text);
    };
    const GeneralGmas g{parse_or_zero(cfg.gmas_a), parse_or_zero(cfg.gmas_b),
                        parse_or_zero(cfg.gmas_c), parse_or_zero(cfg.gmas_d)};
    {
      const Box box = Box::cube(cfg.box_lo, cfg.box_hi);
      bool all_zero = true;
      for (const Expr* c : {&g.a, &g.b, &g.c, &g.d}) {
        all_zero = all_zero && is_identically_zero(*c, box);
      }
      if (all_zero) {
        throw std::invalid_argument(
            "all four coefficients vanish; the system is degenerate");
      }
    }
    rep << "system: A = " << (cfg.gmas_a.empty() ? "0" : cfg.gmas_a)
        << ", B = " << (cfg.gmas_b.empty() ? "0" : cfg.gmas_b)
        << ", C = " << (cfg.gmas_c.empty() ? "0" : cfg.gmas_c)
        << ", D = " << (cfg.gmas_d.empty() ? "0" : cfg.gmas_d) << "\n";
    rep << "characteristic dimension table (- where the case coefficient "
           "vanishes):\n";
    rep << "  point  A  B  C  D\n";
    for (const auto& pt : probe_points(cfg)) {
      rep << "  " << describe_point(pt);
      for (CoeffCase kase : {CoeffCase::A, CoeffCase::B, CoeffCase::C,
                             CoeffCase::D}) {
        try {
          rep << "  " << cauchy_dim_general(g, kase, pt, cfg.tol.eps_zero);
        } catch (const NumericError&) {
          rep << "  -";
        }
      }
      rep << "\n";
    }
  } else {
    throw std::invalid_argument("config needs alpha or A/B/C/D");
  }
  out.report_text = rep.str();
  return out;
}

namespace {

Mode resolve_mode(const RunConfig& cfg, const AlphaSystem& sys, const Box& box,
                  const ClassifyOptions& copts, GenericityResult& gen_out) {
  gen_out = genericity_test(sys, box, copts);
  if (cfg.mode == "auto") {
    switch (gen_out.verdict) {
      case Genericity::Generic: return Mode::Generic;
      case Genericity::NonGeneric: return Mode::NonGeneric;
      case Genericity::Mixed:
        throw GateError(
            "genericity is mixed on the probe box; pass mode=generic or "
            "mode=nongeneric with a suitable box");
    }
  }
  const Mode forced = cfg.mode == "generic" ? Mode::Generic : Mode::NonGeneric;
  if ((forced == Mode::Generic && gen_out.verdict == Genericity::NonGeneric) ||
      (forced == Mode::NonGeneric && gen_out.verdict == Genericity::Generic)) {
    throw GateError("requested mode contradicts the genericity test");
  }
  return forced;
}

// bar-coefficient of the reduced generators must not depend on the
// fiber coordinate along the constructed data
void check_fiber_independence(const RunConfig& cfg, const AlphaSystem& sys,
                              Mode mode, const SeedCurve& seed,
                              const MuSolution& mu,
                              const NewtonOptions& newton) {
  const Expr& f = mode == Mode::Generic ? sys.alpha() : sys.base_shift();
  std::mt19937_64 rng(cfg.rng_seed ^ 0x5a5a);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double h = 1e-5;
  double worst = 0.0;
  for (int k = 0; k < 12; ++k) {
    const double t =
        cfg.t_min + (cfg.t_max - cfg.t_min) * unit(rng);
    ReducedPoint target = surface_target(mode, seed, mu, cfg.x0_ref, t);
    ReducedPoint lo = target, hi = target;
    *lo.x0 -= h;
    *hi.x0 += h;
    try {
      const double d =
          (bar_eval(sys, mode, f, hi, std::nullopt, newton) -
           bar_eval(sys, mode, f, lo, std::nullopt, newton)) /
          (2.0 * h);
      worst = std::max(worst, std::abs(d));
    } catch (const NumericError&) {
      // outside the chart at this t, skip
    }
  }
  if (worst > 1e-5) {
    throw GateError(
        "reduced-generator coefficient varies along the fiber (" +
        fmt9(worst) + "); chart assumptions do not hold here");
  }
}

std::optional<std::pair<double, double>> try_pde_patch(
    const SurfaceChart& chart, const IntegralSurface& surf) {
  const int ns = surf.ns(), nt = surf.nt();
  if (ns < 9 || nt < 9) return std::nullopt;
  PdeOptions opt;
  opt.nx = 21;
  opt.ny = 21;
  const int si[3] = {0, ns / 2, 0};
  const int sj[3] = {0, 0, nt / 2};
  for (int k = 0; k < 4; ++k) {
    PdePatch patch;
    if (k < 3) {
      patch = PdePatch{si[k], si[k] + ns / 2, sj[k], sj[k] + nt / 2};
    } else {
      patch = PdePatch{ns / 2, ns - 1, nt / 2, nt - 1};
    }
    patch.i1 = std::min(patch.i1, ns - 1);
    patch.j1 = std::min(patch.j1, nt - 1);
    try {
      return pde_residual_on_graph(chart, surf, patch, opt);
    } catch (const NumericError&) {
      continue;
    } catch (const EvalError&) {
      continue;
    }
  }
  return std::nullopt;
}

}  // namespace

SolveArtifacts run_solve(const RunConfig& cfg) {
  if (cfg.alpha.empty()) throw std::invalid_argument("solve needs alpha");
  if (cfg.xi.empty()) throw std::invalid_argument("solve needs a seed xi");
  if (cfg.t0 < cfg.t_min || cfg.t0 > cfg.t_max) {
    throw std::invalid_argument("t0 must lie inside [t_min, t_max]");
  }

  AlphaSystem sys(parse(cfg.alpha));
  const Box box = Box::cube(cfg.box_lo, cfg.box_hi);
  const ClassifyOptions copts = classify_options(cfg);

  if (involutive_test(sys, box, {}, copts) != TriState::Yes) {
    throw GateError("system is not involutive on the probe box");
  }
  GenericityResult gen;
  const Mode mode = resolve_mode(cfg, sys, box, copts, gen);
  if (mode == Mode::NonGeneric && std::abs(cfg.x0_ref) < 1e-6) {
    throw std::invalid_argument("x0_ref must be nonzero in non-generic mode");
  }

  // seed and ODE ranges padded so derivative stencils near the grid
  // boundary stay inside the integrated window
  const double span = cfg.t_max - cfg.t_min;
  const double pad = 0.15 * span + 0.05;
  SeedCurve seed(parse(cfg.xi), cfg.t_min - pad, cfg.t_max + pad);

  IntegrateOptions iopt;
  iopt.step = cfg.step;
  iopt.x0_ref = cfg.x0_ref;
  iopt.newton = newton_options(cfg);
  MuSolution mu = integrate_mu(sys, mode, seed, cfg.t0, cfg.mu0, iopt);

  check_fiber_independence(cfg, sys, mode, seed, mu, iopt.newton);

  SolveArtifacts art{mode,
                     std::move(sys),
                     std::move(seed),
                     std::move(mu),
                     iopt.newton,
                     singularity_options(cfg),
                     {},
                     {},
                     {},
                     {}};

  const auto s_grid = linspace(cfg.s_min, cfg.s_max, cfg.n_s);
  const auto t_grid = linspace(cfg.t_min, cfg.t_max, cfg.n_t);
  {
    const SurfaceChart chart = art.chart();
    art.surface = build_surface(chart, s_grid, t_grid);
    art.singular = singularity_scan(chart, s_grid, t_grid, art.sing_opts);
    art.residuals = pullback_residuals(art.sys, art.surface);
    art.residuals.pde_residuals = try_pde_patch(chart, art.surface);
    const Box fd_box = Box::cube(cfg.box_lo, cfg.box_hi);
    art.residuals.max_fd_mismatch =
        fd_crosscheck_suite(art.sys, fd_box, &art.seed);
  }

  std::ostringstream rep;
  rep << "alpha: " << cfg.alpha << "\n";
  rep << "mode: " << to_string(art.mode) << "\n";
  rep << "genericity: " << to_string(gen.verdict) << "\n";
  rep << "seed: xi = " << cfg.xi << ", t0 = " << fmt9(cfg.t0)
      << ", mu0 = " << fmt9(cfg.mu0) << ", step = " << fmt9(cfg.step) << "\n";
  rep << "grid: " << cfg.n_s << " x " << cfg.n_t << " over s in ["
      << fmt9(cfg.s_min) << ", " << fmt9(cfg.s_max) << "], t in ["
      << fmt9(cfg.t_min) << ", " << fmt9(cfg.t_max) << "]\n";
  rep << "holes: " << art.surface.holes << "\n";
  rep << "contact residual: " << fmt9(art.residuals.max_contact_residual)
      << "\n";
  rep << "psi residual: " << fmt9(art.residuals.max_psi_residual) << "\n";
  rep << "fd mismatch: " << fmt9(art.residuals.max_fd_mismatch) << "\n";
  if (art.residuals.pde_residuals) {
    rep << "pde residuals: " << fmt9(art.residuals.pde_residuals->first)
        << ", " << fmt9(art.residuals.pde_residuals->second) << "\n";
  } else {
    rep << "pde residuals: no injective patch found\n";
  }
  if (art.singular.points.empty()) {
    rep << "no singular points\n";
  } else {
    rep << "singular points: " << art.singular.points.size() << "\n";
    int idx = 0;
    for (const auto& p : art.singular.points) {
      rep << "  " << ++idx << ". (s, t) = (" << fmt9(p.s) << ", " << fmt9(p.t)
          << ")  class = " << to_string(p.cls)
          << "  lambda = " << fmt9(p.lambda) << "  grad = (" << fmt9(p.lambda_s)
          << ", " << fmt9(p.lambda_t) << ")  lambda_tt = " << fmt9(p.lambda_tt)
          << "  lambda_ttt = " << fmt9(p.lambda_ttt);
      if (p.degenerate) {
        rep << "  det_hessian = " << fmt9(p.det_hessian) << "  [degenerate]";
      }
      if (!p.note.empty()) rep << "  note: " << p.note;
      rep << "\n";
    }
  }
  art.report_text = rep.str();
  return art;
}

SolveArtifacts run_solve_and_write(const RunConfig& cfg) {
  SolveArtifacts art = run_solve(cfg);
  write_surface_csv(cfg.out_csv, art);
  write_surface_obj(cfg.out_obj, art.surface);
  write_singular_csv(cfg.out_singular, art.singular);
  write_text(cfg.out_report, art.report_text);
  return art;
}

void write_surface_csv(const std::string& path, const SolveArtifacts& art) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write " + path);
  out << "s,t,X,Y,Z,p,q,lambda_hat,is_singular,class\n";
  const IntegralSurface& surf = art.surface;
  const double ds =
      surf.ns() > 1 ? surf.s[1] - surf.s[0] : 1.0;
  const double dt =
      surf.nt() > 1 ? surf.t[1] - surf.t[0] : 1.0;
  auto class_at = [&](double s, double t) -> std::string {
    for (const auto& p : art.singular.points) {
      if (std::abs(p.s - s) <= 0.5 * ds && std::abs(p.t - t) <= 0.5 * dt) {
        return to_string(p.cls);
      }
    }
    return "none";
  };
  for (int i = 0; i < surf.ns(); ++i) {
    for (int j = 0; j < surf.nt(); ++j) {
      const double s = surf.s[static_cast<std::size_t>(i)];
      const double t = surf.t[static_cast<std::size_t>(j)];
      out << fmt17(s) << ',' << fmt17(t) << ',';
      if (!surf.ok(i, j)) {
        out << "nan,nan,nan,nan,nan,nan,0,hole\n";
        continue;
      }
      const JetPoint& pt = surf.at(i, j);
      const double lambda = node_lambda(art, pt, t);
      const bool singular = std::abs(lambda) <= art.sing_opts.locate_tol;
      out << fmt17(pt.x) << ',' << fmt17(pt.y) << ',' << fmt17(pt.z) << ','
          << fmt17(pt.p) << ',' << fmt17(pt.q) << ',' << fmt17(lambda) << ','
          << (singular ? 1 : 0) << ',' << class_at(s, t) << "\n";
    }
  }
}

void write_surface_obj(const std::string& path, const IntegralSurface& surf) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write " + path);
  out << "# surface mesh, vertices in grid-major order\n";
  std::vector<long> index(surf.jets.size(), -1);
  long next = 1;  // OBJ indices are 1-based
  for (int i = 0; i < surf.ns(); ++i) {
    for (int j = 0; j < surf.nt(); ++j) {
      if (!surf.ok(i, j)) continue;
      const auto f = surf.front(i, j);
      index[surf.idx(i, j)] = next++;
      out << "v " << fmt17(f[0]) << ' ' << fmt17(f[1]) << ' ' << fmt17(f[2])
          << "\n";
    }
  }
  for (int i = 0; i + 1 < surf.ns(); ++i) {
    for (int j = 0; j + 1 < surf.nt(); ++j) {
      const long a = index[surf.idx(i, j)];
      const long b = index[surf.idx(i + 1, j)];
      const long c = index[surf.idx(i + 1, j + 1)];
      const long d = index[surf.idx(i, j + 1)];
      if (a < 0 || b < 0 || c < 0 || d < 0) continue;
      out << "f " << a << ' ' << b << ' ' << c << "\n";
      out << "f " << a << ' ' << c << ' ' << d << "\n";
    }
  }
}

void write_singular_csv(const std::string& path,
                        const SingularityReport& report) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write " + path);
  out << "s,t,class,lambda,lambda_s,lambda_t,lambda_tt,lambda_ttt,"
         "det_hessian,degenerate\n";
  for (const auto& p : report.points) {
    out << fmt17(p.s) << ',' << fmt17(p.t) << ',' << to_string(p.cls) << ','
        << fmt17(p.lambda) << ',' << fmt17(p.lambda_s) << ','
        << fmt17(p.lambda_t) << ',' << fmt17(p.lambda_tt) << ','
        << fmt17(p.lambda_ttt) << ',' << fmt17(p.det_hessian) << ','
        << (p.degenerate ? 1 : 0) << "\n";
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write " + path);
  out << text;
}

IntegralSurface load_surface_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open surface CSV: " + path);
  std::string line;
  if (!std::getline(in, line)) {
    throw std::invalid_argument("empty surface CSV");
  }
  std::vector<std::array<double, 7>> rows;  // s,t,X,Y,Z,p,q
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::array<double, 7> row{};
    std::size_t pos = 0;
    for (int k = 0; k < 7; ++k) {
      const auto comma = line.find(',', pos);
      const std::string field = line.substr(
          pos, comma == std::string::npos ? std::string::npos : comma - pos);
      row[static_cast<std::size_t>(k)] =
          field == "nan" ? std::numeric_limits<double>::quiet_NaN()
                         : std::strtod(field.c_str(), nullptr);
      if (comma == std::string::npos && k < 6) {
        throw std::invalid_argument("surface CSV row too short");
      }
      pos = comma + 1;
    }
    rows.push_back(row);
  }
  if (rows.empty()) throw std::invalid_argument("surface CSV has no rows");

  // s-major layout: the first block shares s[0]
  std::size_t nt = 1;
  while (nt < rows.size() && rows[nt][0] == rows[0][0]) ++nt;
  if (rows.size() % nt != 0) {
    throw std::invalid_argument("surface CSV is not a full grid");
  }
  const std::size_t ns = rows.size() / nt;

  IntegralSurface surf;
  surf.s.resize(ns);
  surf.t.resize(nt);
  for (std::size_t i = 0; i < ns; ++i) surf.s[i] = rows[i * nt][0];
  for (std::size_t j = 0; j < nt; ++j) surf.t[j] = rows[j][1];
  surf.jets.resize(rows.size());
  surf.valid.assign(rows.size(), 0);
  surf.tangent_s.resize(rows.size());
  surf.tangent_t.resize(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& r = rows[k];
    surf.jets[k] = JetPoint{r[2], r[3], r[4], r[5], r[6]};
    bool finite = true;
    for (int c = 2; c < 7; ++c) finite = finite && std::isfinite(r[c]);
    surf.valid[k] = finite ? 1 : 0;
    if (!finite) ++surf.holes;
  }
  return surf;
}

VerifyOutcome run_verify(const RunConfig& cfg,
                         const std::optional<std::string>& surface_csv) {
  if (cfg.alpha.empty()) throw std::invalid_argument("verify needs alpha");
  VerifyOutcome out;
  std::ostringstream rep;

  if (surface_csv) {
    const AlphaSystem sys(parse(cfg.alpha));
    const IntegralSurface surf = load_surface_csv(*surface_csv);
    out.summary = pullback_residuals(sys, surf);
    if (!cfg.xi.empty()) {
      // rebuild the chart from the configuration for the soft check
      const Box box = Box::cube(cfg.box_lo, cfg.box_hi);
      const ClassifyOptions copts = classify_options(cfg);
      GenericityResult gen;
      const Mode mode = resolve_mode(cfg, sys, box, copts, gen);
      const double span = cfg.t_max - cfg.t_min;
      const double pad = 0.15 * span + 0.05;
      SeedCurve seed(parse(cfg.xi), cfg.t_min - pad, cfg.t_max + pad);
      IntegrateOptions iopt;
      iopt.step = cfg.step;
      iopt.x0_ref = cfg.x0_ref;
      iopt.newton = newton_options(cfg);
      MuSolution mu = integrate_mu(sys, mode, seed, cfg.t0, cfg.mu0, iopt);
      const SurfaceChart chart(sys, mode, seed, mu, iopt.newton);
      out.summary.max_fd_mismatch =
          fd_crosscheck_suite(sys, Box::cube(cfg.box_lo, cfg.box_hi), &seed);
      out.summary.pde_residuals = try_pde_patch(chart, surf);
    } else {
      out.summary.max_fd_mismatch =
          fd_crosscheck_suite(sys, Box::cube(cfg.box_lo, cfg.box_hi));
    }
    rep << "surface: " << *surface_csv << "\n";
  } else {
    const SolveArtifacts art = run_solve(cfg);
    out.summary = art.residuals;
    rep << "surface: constructed in-memory\n";
  }

  out.pass = out.summary.max_contact_residual <= cfg.contact_gate;
  rep << "contact residual: " << fmt9(out.summary.max_contact_residual)
      << " (gate " << fmt9(cfg.contact_gate) << ") -> "
      << (out.pass ? "pass" : "FAIL") << "\n";
  rep << "psi residual: " << fmt9(out.summary.max_psi_residual) << "\n";
  rep << "fd mismatch: " << fmt9(out.summary.max_fd_mismatch) << "\n";
  if (out.summary.pde_residuals) {
    rep << "pde residuals: " << fmt9(out.summary.pde_residuals->first) << ", "
        << fmt9(out.summary.pde_residuals->second) << "\n";
  } else {
    rep << "pde residuals: not computed\n";
  }
  out.report_text = rep.str();
  return out;
}

}  // namespace gmae
