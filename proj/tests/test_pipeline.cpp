#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gmae/pipeline.hpp"

using namespace gmae;
namespace fs = std::filesystem;

namespace {

fs::path test_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("gmae_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool contains(const std::string& text, const std::string& needle) {
  return text.find(needle) != std::string::npos;
}

RunConfig swallowtail_config(const fs::path& dir, int grid = 41) {
  RunConfig cfg;
  cfg.alpha = "q";
  cfg.xi = "t^4";
  cfg.t0 = 0.0;
  cfg.mu0 = 0.0;
  cfg.t_min = cfg.s_min = -0.5;
  cfg.t_max = cfg.s_max = 0.5;
  cfg.n_s = cfg.n_t = grid;
  cfg.out_csv = (dir / "surface.csv").string();
  cfg.out_obj = (dir / "surface.obj").string();
  cfg.out_report = (dir / "report.txt").string();
  cfg.out_singular = (dir / "singular.csv").string();
  return cfg;
}

}  // namespace

TEST_CASE("config parsing, comments and overrides") {
  const std::string text =
      "# comment line\n"
      "alpha = q\n"
      "xi = t^4   # trailing comment\n"
      "n_s = 11\n"
      "n_t = 21\n"
      "step = 2e-3\n"
      "eps_zero = 1e-8\n";
  RunConfig cfg = parse_run_config(text);
  CHECK(cfg.alpha == "q");
  CHECK(cfg.xi == "t^4");
  CHECK(cfg.n_s == 11);
  CHECK(cfg.n_t == 21);
  CHECK(cfg.step == doctest::Approx(2e-3));
  CHECK(cfg.tol.eps_zero == doctest::Approx(1e-8));

  apply_tolerance_override(cfg, "locate_tol=1e-8");
  CHECK(cfg.tol.locate_tol == doctest::Approx(1e-8));
  CHECK_THROWS_AS(apply_tolerance_override(cfg, "bogus=1"),
                  std::invalid_argument);

  CHECK_THROWS_AS(parse_run_config("alpha = q\nunknown_key = 1\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_run_config("alpha = q\nn_s = 1\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_run_config("alpha = q\nmode = sideways\n"),
                  std::invalid_argument);
}

TEST_CASE("classification reports for the worked coefficients") {
  RunConfig cfg;
  cfg.alpha = "p + q^2";
  const ClassifyOutcome a = run_classify(cfg);
  CHECK(contains(a.report_text, "involutive: yes"));
  CHECK(contains(a.report_text, "genericity: generic"));
  CHECK(contains(a.report_text, "derived type: (2,3)"));

  cfg.alpha = "(q - y)/x";
  const ClassifyOutcome b = run_classify(cfg);
  CHECK(contains(b.report_text, "genericity: non-generic"));
  CHECK(contains(b.report_text, "derived type: (2,3)"));

  cfg.alpha = "x";
  const ClassifyOutcome c = run_classify(cfg);
  CHECK(contains(c.report_text, "involutive: no"));
  CHECK(contains(c.report_text, "derived type: undetermined"));
}

TEST_CASE("four-case table for a general system") {
  RunConfig cfg;
  cfg.gmas_a = "1";
  cfg.gmas_b = "-q";
  const ClassifyOutcome out = run_classify(cfg);
  CHECK(contains(out.report_text, "characteristic dimension table"));
  // involutive coefficient: every resolvable case reports dimension one
  CHECK(!contains(out.report_text, "  0"));
}

TEST_CASE("solve pipeline finds the swallowtail and writes artifacts") {
  const fs::path dir = test_dir("solve_st");
  const RunConfig cfg = swallowtail_config(dir);
  const SolveArtifacts art = run_solve_and_write(cfg);

  CHECK(art.mode == Mode::Generic);
  CHECK(art.surface.holes == 0);
  CHECK(art.residuals.max_contact_residual < 1e-6);

  bool found = false;
  for (const auto& p : art.singular.points) {
    if (std::abs(p.s) <= 1e-8 && std::abs(p.t) <= 1e-8) {
      found = true;
      CHECK(p.cls == SingClass::Swallowtail);
    }
  }
  CHECK(found);
  CHECK(contains(art.report_text, "Swallowtail"));

  CHECK(fs::exists(cfg.out_csv));
  CHECK(fs::exists(cfg.out_obj));
  CHECK(fs::exists(cfg.out_report));
  CHECK(fs::exists(cfg.out_singular));

  const std::string csv = slurp(cfg.out_csv);
  CHECK(contains(csv, "s,t,X,Y,Z,p,q,lambda_hat,is_singular,class"));
  CHECK(contains(csv, "Swallowtail"));

  // grid quads split into triangles over all valid nodes
  const std::string obj = slurp(cfg.out_obj);
  std::size_t v_count = 0, f_count = 0;
  std::istringstream lines(obj);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.rfind("v ", 0) == 0) ++v_count;
    if (line.rfind("f ", 0) == 0) ++f_count;
  }
  CHECK(v_count == 41u * 41u);
  CHECK(f_count == 2u * 40u * 40u);
}

TEST_CASE("solve refuses bad gates") {
  const fs::path dir = test_dir("solve_gates");
  RunConfig cfg = swallowtail_config(dir);
  cfg.alpha = "x";
  CHECK_THROWS_AS(run_solve(cfg), GateError);

  cfg = swallowtail_config(dir);
  cfg.mode = "nongeneric";
  CHECK_THROWS_AS(run_solve(cfg), GateError);

  cfg = swallowtail_config(dir);
  cfg.xi.clear();
  CHECK_THROWS_AS(run_solve(cfg), std::invalid_argument);
}

TEST_CASE("empty singular set still produces outputs") {
  const fs::path dir = test_dir("solve_empty");
  RunConfig cfg = swallowtail_config(dir, 21);
  cfg.xi = "t^3";
  cfg.s_min = 1.0;
  cfg.s_max = 2.0;
  cfg.t_min = 0.5;
  cfg.t_max = 1.0;
  cfg.t0 = 0.75;
  const SolveArtifacts art = run_solve_and_write(cfg);
  CHECK(art.singular.points.empty());
  CHECK(contains(art.report_text, "no singular points"));
  CHECK(fs::exists(cfg.out_csv));
  CHECK(fs::exists(cfg.out_obj));
}

TEST_CASE("identical configurations give byte-identical outputs") {
  const fs::path dir1 = test_dir("det_a");
  const fs::path dir2 = test_dir("det_b");
  run_solve_and_write(swallowtail_config(dir1, 31));
  run_solve_and_write(swallowtail_config(dir2, 31));
  CHECK(slurp(dir1 / "surface.csv") == slurp(dir2 / "surface.csv"));
  CHECK(slurp(dir1 / "surface.obj") == slurp(dir2 / "surface.obj"));
  CHECK(slurp(dir1 / "singular.csv") == slurp(dir2 / "singular.csv"));
}

TEST_CASE("surface CSV round-trips exactly") {
  const fs::path dir = test_dir("roundtrip");
  const RunConfig cfg = swallowtail_config(dir, 31);
  const SolveArtifacts art = run_solve_and_write(cfg);

  const IntegralSurface loaded = load_surface_csv(cfg.out_csv);
  REQUIRE(loaded.ns() == art.surface.ns());
  REQUIRE(loaded.nt() == art.surface.nt());
  for (int i = 0; i < loaded.ns(); ++i) {
    for (int j = 0; j < loaded.nt(); ++j) {
      CHECK(loaded.at(i, j).x == art.surface.at(i, j).x);
      CHECK(loaded.at(i, j).y == art.surface.at(i, j).y);
      CHECK(loaded.at(i, j).z == art.surface.at(i, j).z);
      CHECK(loaded.at(i, j).p == art.surface.at(i, j).p);
      CHECK(loaded.at(i, j).q == art.surface.at(i, j).q);
    }
  }

  const ResidualSummary direct = pullback_residuals(art.sys, art.surface);
  const ResidualSummary reloaded = pullback_residuals(art.sys, loaded);
  CHECK(std::abs(direct.max_contact_residual -
                 reloaded.max_contact_residual) < 1e-12);
  CHECK(std::abs(direct.max_psi_residual - reloaded.max_psi_residual) < 1e-12);
}

TEST_CASE("verify gates pass on a clean surface and fail on corruption") {
  const fs::path dir = test_dir("verify");
  const RunConfig cfg = swallowtail_config(dir, 31);
  run_solve_and_write(cfg);

  const VerifyOutcome ok = run_verify(cfg, cfg.out_csv);
  CHECK(ok.pass);
  CHECK(ok.summary.max_contact_residual < 1e-6);

  // corrupt one z field and expect the gate to trip
  std::string csv = slurp(cfg.out_csv);
  const auto pos = csv.find('\n', csv.find('\n', csv.size() / 2) + 1) + 1;
  std::istringstream row(csv.substr(pos, csv.find('\n', pos) - pos));
  std::string fields[10];
  for (auto& f : fields) std::getline(row, f, ',');
  const std::string original = fields[4];
  const double corrupted = std::strtod(original.c_str(), nullptr) + 1e-3;
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", corrupted);
  const std::string needle = fields[0] + "," + fields[1] + "," + fields[2] +
                             "," + fields[3] + "," + original;
  const std::string replacement = fields[0] + "," + fields[1] + "," +
                                  fields[2] + "," + fields[3] + "," + buf;
  const auto at = csv.find(needle);
  REQUIRE(at != std::string::npos);
  csv.replace(at, needle.size(), replacement);
  const fs::path bad = dir / "corrupted.csv";
  std::ofstream(bad) << csv;

  const VerifyOutcome broken = run_verify(cfg, bad.string());
  CHECK_FALSE(broken.pass);
}

TEST_CASE("chart holes are masked and reported, not fatal") {
  const fs::path dir = test_dir("holes");
  RunConfig cfg = swallowtail_config(dir, 31);
  cfg.alpha = "(q - y)/x";
  cfg.xi = "t^2 + t^3";
  // the s grid crosses x = 0 where the chart is undefined
  cfg.s_min = -0.5;
  cfg.s_max = 1.0;
  const SolveArtifacts art = run_solve_and_write(cfg);
  CHECK(art.mode == Mode::NonGeneric);
  CHECK(art.surface.holes == art.surface.nt());
  CHECK(contains(art.report_text, "holes: 31"));
  CHECK(contains(slurp(cfg.out_csv), "hole"));
}

TEST_CASE("non-generic runs need a usable reference fiber") {
  const fs::path dir = test_dir("x0ref");
  RunConfig cfg = swallowtail_config(dir);
  cfg.alpha = "(q - y)/x";
  cfg.xi = "t^2 + t^3";
  cfg.s_min = 0.3;
  cfg.s_max = 0.8;
  cfg.x0_ref = 0.0;
  CHECK_THROWS_AS(run_solve(cfg), std::invalid_argument);
}

TEST_CASE("degenerate general systems are rejected") {
  RunConfig cfg;
  cfg.gmas_a = "0";
  cfg.gmas_b = "x - x";
  CHECK_THROWS_AS(run_classify(cfg), std::invalid_argument);
}

TEST_CASE("the flat system passes the verify gates") {
  const fs::path dir = test_dir("flat");
  RunConfig cfg = swallowtail_config(dir, 31);
  cfg.alpha = "0";
  cfg.xi = "-t^2/2";
  cfg.mu0 = 1.0;
  cfg.s_min = 0.2;
  cfg.s_max = 1.0;
  const VerifyOutcome out = run_verify(cfg);
  CHECK(out.pass);
  CHECK(out.summary.max_contact_residual < 1e-10);
}

TEST_CASE("command-line interface exit codes") {
  const fs::path dir = test_dir("cli");
  std::ofstream(dir / "solve.cfg")
      << "alpha = q\nxi = t^4\nt0 = 0\nmu0 = 0\n"
      << "t_min = -0.5\nt_max = 0.5\ns_min = -0.5\ns_max = 0.5\n"
      << "n_s = 31\nn_t = 31\n"
      << "out_csv = " << (dir / "surface.csv").string() << "\n"
      << "out_obj = " << (dir / "surface.obj").string() << "\n"
      << "out_report = " << (dir / "report.txt").string() << "\n"
      << "out_singular = " << (dir / "singular.csv").string() << "\n";
  std::ofstream(dir / "bad.cfg") << "alpha = q\nwhat_is_this = 7\n";
  std::ofstream(dir / "gate.cfg")
      << "alpha = x\nxi = t^4\nout_report = " << (dir / "gate.txt").string()
      << "\n";

  auto run = [&](const std::string& args) {
    const std::string cmd =
        std::string(GMAE_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
  };

  CHECK(run("classify --config " + (dir / "solve.cfg").string()) == 0);
  CHECK(run("solve --config " + (dir / "solve.cfg").string()) == 0);
  CHECK(fs::exists(dir / "surface.csv"));
  CHECK(run("verify --config " + (dir / "solve.cfg").string() +
            " --surface " + (dir / "surface.csv").string()) == 0);

  CHECK(run("classify --config " + (dir / "missing.cfg").string()) == 1);
  CHECK(run("classify --config " + (dir / "bad.cfg").string()) == 1);
  CHECK(run("solve --config " + (dir / "gate.cfg").string()) == 2);
  CHECK(run("solve --config " + (dir / "solve.cfg").string() +
            " --tolerance-override bogus=1") == 1);
}
