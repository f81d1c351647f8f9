#include "cli.hpp"

#include "sdcc/io.hpp"
#include "sdcc/selftest.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>

namespace sdcc::cli {

namespace {

constexpr std::uint64_t kDefaultSeed = 0x5DCC;

std::uint64_t env_seed() {
  if (const char* s = std::getenv("SDCC_SEED")) return std::strtoull(s, nullptr, 0);
  return kDefaultSeed;
}

struct Common {
  std::string format = "json";
  std::string output;
  double tol = 1e-8;
  std::uint64_t seed = env_seed();
  int jobs = 1;

  void attach(CLI::App* app, bool with_tol = true) {
    app->add_option("--format", format, "report format")->check(CLI::IsMember({"json", "text"}));
    app->add_option("--output", output, "output path (default stdout)");
    if (with_tol) app->add_option("--tol", tol, "membership tolerance");
    app->add_option("--seed", seed, "random seed (env SDCC_SEED overrides the default)");
    app->add_option("--jobs", jobs, "worker threads for sampling loops");
  }

  Json config_json(const std::string& command) const {
    return Json{{"command", command}, {"format", format}, {"tol", tol},
                {"seed", seed},       {"jobs", jobs}};
  }

  void emit(const Json& report, std::ostream& out) const {
    std::ofstream file;
    std::ostream* os = &out;
    if (!output.empty()) {
      file.open(output);
      if (!file) throw std::invalid_argument("cannot open " + output + " for writing");
      os = &file;
    }
    if (format == "json") {
      *os << dump_deterministic(report);
    } else {
      emit_text(report, *os, 0);
    }
  }

  static void emit_text(const Json& j, std::ostream& os, int indent) {
    const std::string pad(2 * indent, ' ');
    if (j.is_object()) {
      for (const auto& [k, v] : j.items()) {
        if (v.is_object() || v.is_array()) {
          os << pad << k << ":\n";
          emit_text(v, os, indent + 1);
        } else {
          os << pad << k << ": " << v.dump() << "\n";
        }
      }
    } else if (j.is_array()) {
      for (const auto& v : j) {
        if (v.is_object() || v.is_array()) {
          os << pad << "-\n";
          emit_text(v, os, indent + 1);
        } else {
          os << pad << "- " << v.dump() << "\n";
        }
      }
    } else {
      os << pad << j.dump() << "\n";
    }
  }
};

int verdict_code(const MembershipReport& r) { return r.accepted() ? 0 : 1; }

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"second-order analysis of the semidefinite complementarity set"};
  app.require_subcommand(1);

  // project / dderiv / dderiv2
  std::string in_path, dir_path, dir2_path;
  bool nsd = false;
  Common c_project, c_dderiv, c_dderiv2;
  auto* project = app.add_subcommand("project", "projection onto the psd (or nsd) cone");
  project->add_option("--input", in_path, "matrix json")->required();
  project->add_flag("--nsd", nsd, "project onto the nsd cone instead");
  c_project.attach(project, false);

  auto* dderiv = app.add_subcommand("dderiv", "first directional derivative of the projection");
  dderiv->add_option("--input", in_path, "matrix json (base point)")->required();
  dderiv->add_option("--dir", dir_path, "matrix json (direction)")->required();
  c_dderiv.attach(dderiv, false);

  auto* dderiv2 = app.add_subcommand("dderiv2", "second directional derivative of the projection");
  dderiv2->add_option("--input", in_path, "matrix json (base point)")->required();
  dderiv2->add_option("--dir", dir_path, "matrix json (first-order direction)")->required();
  dderiv2->add_option("--dir2", dir2_path, "matrix json (second-order direction)")->required();
  c_dderiv2.attach(dderiv2, false);

  // tangent tests
  std::string x_path, y_path, f_path, g_path, s_path, t_path;
  Common c_tan, c_tan2;
  auto* tan = app.add_subcommand("tangent-test", "tangent-cone membership at a point of the set");
  tan->add_option("--x", x_path)->required();
  tan->add_option("--y", y_path)->required();
  tan->add_option("--f", f_path)->required();
  tan->add_option("--g", g_path)->required();
  c_tan.attach(tan);

  auto* tan2 = app.add_subcommand("tangent2-test", "second-order tangent-set membership");
  tan2->add_option("--x", x_path)->required();
  tan2->add_option("--y", y_path)->required();
  tan2->add_option("--f", f_path)->required();
  tan2->add_option("--g", g_path)->required();
  tan2->add_option("--s", s_path)->required();
  tan2->add_option("--t", t_path)->required();
  c_tan2.attach(tan2);

  // optimality checks
  std::string prob_path, point_path, mult_path, flavor = "c", variant = "tight";
  int samples = 64;
  Common c_stat, c_sonc, c_sosc;
  auto* stat = app.add_subcommand("check-stationarity", "multiplier residuals at a point");
  stat->add_option("--problem", prob_path)->required();
  stat->add_option("--point", point_path)->required();
  stat->add_option("--multipliers", mult_path)->required();
  stat->add_option("--flavor", flavor)->check(CLI::IsMember({"c", "limiting", "regular"}));
  c_stat.attach(stat);

  auto* sonc = app.add_subcommand("check-sonc", "sampled second-order necessary condition");
  sonc->add_option("--problem", prob_path)->required();
  sonc->add_option("--point", point_path)->required();
  sonc->add_option("--multipliers", mult_path)->required();
  sonc->add_option("--samples", samples);
  c_sonc.attach(sonc);

  auto* sosc = app.add_subcommand("check-sosc", "sampled second-order sufficient condition");
  sosc->add_option("--problem", prob_path)->required();
  sosc->add_option("--point", point_path)->required();
  sosc->add_option("--multipliers", mult_path)->required();
  sosc->add_option("--samples", samples);
  sosc->add_option("--variant", variant)->check(CLI::IsMember({"tight", "relaxed"}));
  c_sosc.attach(sosc);

  // rank application
  std::string rank_in;
  double rank_tol = -1.0;
  Common c_rank, c_ex, c_self;
  auto* rank = app.add_subcommand("rank-lift", "lift a psd matrix to the complementarity program point");
  rank->add_option("--input", rank_in)->required();
  rank->add_option("--tol,--rank-tol", rank_tol, "numerical rank tolerance");
  c_rank.attach(rank, false);

  auto* ex = app.add_subcommand("example1", "reproduce the built-in worked example");
  c_ex.attach(ex, false);

  bool quick = false;
  auto* self = app.add_subcommand("selftest", "run the oracle suites as an install check");
  self->add_flag("--quick", quick, "reduced sample counts");
  c_self.attach(self, false);

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return 2;
  }

  try {
    if (*project) {
      const Mat a = load_matrix(in_path);
      const Mat p = nsd ? proj_nsd(a) : proj_psd(a);
      c_project.emit(matrix_to_json(p), out);
      return 0;
    }
    if (*dderiv) {
      const Mat z = load_matrix(in_path), h = load_matrix(dir_path);
      c_dderiv.emit(matrix_to_json(proj_dir1(z, h)), out);
      return 0;
    }
    if (*dderiv2) {
      const Mat z = load_matrix(in_path), h = load_matrix(dir_path), w = load_matrix(dir2_path);
      c_dderiv2.emit(matrix_to_json(proj_dir2(z, h, w)), out);
      return 0;
    }
    if (*tan) {
      const CCPair base = make_ccpair(load_matrix(x_path), load_matrix(y_path), c_tan.tol);
      const MembershipReport r =
          tangent_test(base, load_matrix(f_path), load_matrix(g_path), c_tan.tol);
      Json j = report_to_json(r);
      j["config"] = c_tan.config_json("tangent-test");
      c_tan.emit(j, out);
      return verdict_code(r);
    }
    if (*tan2) {
      const CCPair base = make_ccpair(load_matrix(x_path), load_matrix(y_path), c_tan2.tol);
      const Mat f = load_matrix(f_path), g = load_matrix(g_path);
      const Mat sm = load_matrix(s_path), tm = load_matrix(t_path);
      MembershipReport r = tangent2_test(base, f, g, sm, tm, c_tan2.tol);
      // name the violated blocks through the structural classification
      if (tangent_test(base, f, g, c_tan2.tol).accepted()) {
        const MembershipReport structural =
            tangent2_structural(base, f, g, c_tan2.tol).residual(sm, tm);
        for (const auto& v : structural.violations)
          if (v.magnitude > c_tan2.tol)
            r.violations.push_back({"block " + v.block, v.constraint, v.magnitude});
      }
      Json j = report_to_json(r);
      j["config"] = c_tan2.config_json("tangent2-test");
      c_tan2.emit(j, out);
      return verdict_code(r);
    }
    if (*stat) {
      const ProblemSpec spec = load_problem(prob_path);
      const Vec x = point_from_json(load_json(point_path));
      const MultiplierPair mult = multipliers_from_json(load_json(mult_path), spec);
      const StationarityReport r =
          stationarity_residual(spec, x, mult, flavor_from_string(flavor), c_stat.tol);
      Json j = stationarity_to_json(r);
      j["config"] = c_stat.config_json("check-stationarity");
      c_stat.emit(j, out);
      return r.residual <= c_stat.tol ? 0 : 1;
    }
    if (*sonc) {
      const ProblemSpec spec = load_problem(prob_path);
      const Vec x = point_from_json(load_json(point_path));
      const MultiplierPair mult = multipliers_from_json(load_json(mult_path), spec);
      SamplerConfig cfg{samples, c_sonc.seed, c_sonc.tol, c_sonc.jobs};
      const SoncAggregate agg = sonc_check(spec, x, mult, cfg);
      Json j = sonc_to_json(agg);
      j["config"] = c_sonc.config_json("check-sonc");
      j["config"]["samples"] = samples;
      c_sonc.emit(j, out);
      return agg.violated ? 1 : 0;
    }
    if (*sosc) {
      const ProblemSpec spec = load_problem(prob_path);
      const Vec x = point_from_json(load_json(point_path));
      const Json mj = load_json(mult_path);
      std::vector<MultiplierPair> mults;
      if (mj.is_array())
        for (const auto& e : mj) mults.push_back(multipliers_from_json(e, spec));
      else
        mults.push_back(multipliers_from_json(mj, spec));
      SamplerConfig cfg{samples, c_sosc.seed, c_sosc.tol, c_sosc.jobs};
      const SoscAggregate agg = sosc_check(
          spec, x, mults, cfg,
          variant == "tight" ? SoscVariant::Tight : SoscVariant::Relaxed);
      Json j = sosc_to_json(agg);
      j["config"] = c_sosc.config_json("check-sosc");
      j["config"]["samples"] = samples;
      j["config"]["variant"] = variant;
      c_sosc.emit(j, out);
      return agg.positive ? 0 : 1;
    }
    if (*rank) {
      const LiftedPoint lp = lift_point(load_matrix(rank_in), rank_tol);
      Json j{{"X", matrix_to_json(lp.X)},
             {"W", matrix_to_json(lp.W)},
             {"rank", lp.rank},
             {"warnings", lp.warnings}};
      j["config"] = c_rank.config_json("rank-lift");
      c_rank.emit(j, out);
      return 0;
    }
    if (*ex) {
      const ExampleReport r = example1();
      Json j = example_to_json(r);
      j["config"] = c_ex.config_json("example1");
      c_ex.emit(j, out);
      return r.pass ? 0 : 1;
    }
    if (*self) {
      SelftestConfig cfg;
      cfg.seed = c_self.seed;
      cfg.quick = quick;
      cfg.jobs = c_self.jobs;
      const SelftestReport r = run_selftest(cfg);
      Json suites = Json::array();
      for (const auto& s : r.suites)
        suites.push_back({{"name", s.name},
                          {"pass", s.pass},
                          {"count", s.count},
                          {"worst", s.worst},
                          {"details", s.details}});
      // no wall-clock fields: selftest reports are byte-identical per seed
      Json j{{"suites", std::move(suites)}, {"pass", r.pass}};
      j["config"] = c_self.config_json("selftest");
      j["config"]["quick"] = quick;
      c_self.emit(j, out);
      return r.pass ? 0 : 1;
    }
  } catch (const Json::exception& e) {
    err << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  err << "no subcommand\n";
  return 2;
}

}  // namespace sdcc::cli
