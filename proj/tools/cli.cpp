#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "affine/acceptance.hpp"
#include "affine/algebra.hpp"
#include "affine/chain.hpp"
#include "affine/characters.hpp"
#include "affine/diffusion.hpp"
#include "affine/error.hpp"
#include "affine/harness.hpp"
#include "affine/highest_weight.hpp"
#include "affine/rng.hpp"
#include "affine/weyl.hpp"

namespace affine {

namespace {

using nlohmann::json;

// "1,0" or "1/2,3/2": coroot pairings lambda(alpha_i^vee), i = 0..l
Weight parse_pairings(const AffineAlgebra& alg, const std::string& text) {
  RationalVector pr;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) pr.push_back(parse_rational(item));
  if (pr.size() != alg.rank() + 1)
    throw DomainError("expected " + std::to_string(alg.rank() + 1) + " comma-separated coroot pairings, got '" + text +
                      "'");
  return alg.from_pairings(pr, 0);
}

std::string pairings_string(const AffineAlgebra& alg, const Weight& w) {
  std::string s;
  for (const auto& p : alg.pairings(w)) s += (s.empty() ? "" : ",") + to_string(p);
  return s;
}

AlgebraPtr load_algebra(const std::string& name, const std::string& cartan_file) {
  if (cartan_file.empty()) return make_algebra(name);
  std::ifstream in(cartan_file);
  if (!in) throw DomainError("cannot open " + cartan_file);
  std::stringstream ss;
  ss << in.rdbuf();
  return std::make_shared<const AffineAlgebra>(cartan_from_json(ss.str()), cartan_file);
}

json algebra_json(const AffineAlgebra& alg) {
  json cart = json::array();
  for (const auto& row : alg.cartan().entries) cart.push_back(row);
  json roots = json::array();
  for (const auto& r : alg.positive_finite_roots()) roots.push_back(r);
  return {{"name", alg.name()},
          {"rank", alg.rank()},
          {"cartan", cart},
          {"marks", alg.marks()},
          {"comarks", alg.comarks()},
          {"coxeter", alg.coxeter()},
          {"dual_coxeter", alg.dual_coxeter()},
          {"untwisted", alg.untwisted()},
          {"rho", alg.rho().to_string()},
          {"finite_weyl_order", alg.untwisted() ? alg.weyl().order() : 0},
          {"positive_finite_roots", roots}};
}

struct Common {
  std::string algebra = "A1~";
  std::string cartan;
};

void add_algebra(CLI::App* sub, Common& c) {
  sub->add_option("--algebra", c.algebra, "Algebra name (A1~, A2~, ...)")->capture_default_str();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"affinelab: affine Lie algebra characters, conditioned walks and space-time diffusions"};
  app.require_subcommand(1);
  Common common;

  // algebra
  CLI::App* a_alg = app.add_subcommand("algebra", "Cartan data, marks, rho and roots as JSON");
  add_algebra(a_alg, common);
  a_alg->add_option("--cartan", common.cartan, "JSON file {\"rank\": l, \"matrix\": [[...]]}")->check(CLI::ExistingFile);

  // mult
  std::string highest;
  long depth = 10;
  std::string method = "freudenthal";
  CLI::App* a_mult = app.add_subcommand("mult", "Weight multiplicities of V(lambda) as CSV");
  add_algebra(a_mult, common);
  a_mult->add_option("--highest", highest, "Highest weight as coroot pairings, e.g. 1,0")->required();
  a_mult->add_option("--depth", depth, "delta-depth")->capture_default_str()->check(CLI::NonNegativeNumber);
  a_mult->add_option("--method", method, "freudenthal or series")->check(CLI::IsMember({"freudenthal", "series"}));

  // tensor
  std::string lambda_s, omega_s, beta_s;
  long power = 1;
  CLI::App* a_tensor = app.add_subcommand("tensor", "Decomposition of V(lambda) x V(omega)^n up to a depth");
  add_algebra(a_tensor, common);
  a_tensor->add_option("--lambda", lambda_s, "Coroot pairings of lambda")->required();
  a_tensor->add_option("--omega", omega_s, "Coroot pairings of omega")->required();
  a_tensor->add_option("--n", power, "Tensor power")->capture_default_str()->check(CLI::NonNegativeNumber);
  a_tensor->add_option("--depth", depth, "delta-depth")->capture_default_str();
  a_tensor->add_option("--beta", beta_s, "Only the multiplicity of V(beta), by the alternating sum");
  long beta_depth = 0;
  a_tensor->add_option("--beta-depth", beta_depth, "delta-coefficient of beta is minus this value")->capture_default_str();

  // characters
  long spec_n = 1;
  double eps = 1e-12;
  CLI::App* a_char = app.add_subcommand("characters", "ch_lambda at rho/n by series and closed form");
  add_algebra(a_char, common);
  a_char->add_option("--highest", highest, "Coroot pairings of lambda")->required();
  a_char->add_option("--spec-n", spec_n, "Specialization rho/n")->capture_default_str()->check(CLI::PositiveNumber);
  a_char->add_option("--eps", eps, "Relative tail tolerance of the series")->capture_default_str();

  // chain
  std::string start_s;
  long steps = 10;
  std::uint64_t seed = 0;
  CLI::App* a_chain = app.add_subcommand("chain", "Barred chain trajectory as CSV");
  add_algebra(a_chain, common);
  a_chain->add_option("--spec-n", spec_n, "Specialization rho/n")->capture_default_str()->check(CLI::PositiveNumber);
  a_chain->add_option("--start", start_s, "Dominant start as coroot pairings")->required();
  a_chain->add_option("--omega", omega_s, "Coroot pairings of omega (default h^vee Lambda0)");
  a_chain->add_option("--steps", steps, "Number of steps")->capture_default_str()->check(CLI::NonNegativeNumber);
  a_chain->add_option("--seed", seed, "RNG seed")->required();

  // diffusion
  double t_max = 1, dt = 1e-3;
  long paths = 1;
  bool conditioned = false, exit_mode = false;
  CLI::App* a_diff = app.add_subcommand("diffusion", "Space-time Brownian paths, or the exit probability");
  add_algebra(a_diff, common);
  a_diff->add_option("--start", start_s, "Start as coroot pairings (rationals allowed)")->required();
  a_diff->add_option("--t-max", t_max, "Horizon")->capture_default_str();
  a_diff->add_option("--dt", dt, "Euler step")->capture_default_str();
  a_diff->add_option("--paths", paths, "Number of paths")->capture_default_str()->check(CLI::PositiveNumber);
  a_diff->add_option("--seed", seed, "RNG seed")->required();
  a_diff->add_flag("--conditioned", conditioned, "Doob h-transform (conditioned to stay in the chamber)");
  a_diff->add_flag("--exit", exit_mode, "Estimate the exit probability before t-max instead of printing paths");

  // experiment
  std::string config_path, out_json, out_csv;
  CLI::App* a_exp = app.add_subcommand("experiment", "Run a scaling experiment from a JSON config");
  a_exp->add_option("--config", config_path, "ExperimentConfig JSON")->required()->check(CLI::ExistingFile);
  a_exp->add_option("--seed", seed, "RNG seed (overrides the config)")->required();
  a_exp->add_option("--out-json", out_json, "Report JSON path");
  a_exp->add_option("--out-csv", out_csv, "Report CSV path");

  // verify-all
  bool fast = false;
  std::vector<int> only;
  std::uint64_t verify_seed = AcceptanceOptions{}.seed;
  CLI::App* a_ver = app.add_subcommand("verify-all", "Run the acceptance suite; nonzero exit on any failure");
  add_algebra(a_ver, common);
  a_ver->add_flag("--fast", fast, "Smaller Monte Carlo runs");
  a_ver->add_option("--only", only, "Criterion ids")->delimiter(',');
  a_ver->add_option("--seed", verify_seed, "Base seed of the suite")->capture_default_str();

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (a_alg->parsed()) {
      AlgebraPtr alg = load_algebra(common.algebra, common.cartan);
      out << algebra_json(*alg).dump(2) << '\n';
      return 0;
    }
    if (a_mult->parsed()) {
      AlgebraPtr alg = make_algebra(common.algebra);
      Weight lam = parse_pairings(*alg, highest);
      MultiplicityTable t =
          method == "series" ? character_series_oracle(*alg, lam, depth) : freudenthal_table(*alg, lam, depth);
      out << t.to_csv();
      return 0;
    }
    if (a_tensor->parsed()) {
      AlgebraPtr alg = make_algebra(common.algebra);
      Weight lam = parse_pairings(*alg, lambda_s), om = parse_pairings(*alg, omega_s);
      if (!beta_s.empty()) {
        Weight beta = parse_pairings(*alg, beta_s);
        beta.b = -beta_depth;
        long need = branching_required_depth(*alg, lam, om, power, beta);
        out << branching_mult(*alg, lam, om, power, beta, need).get_str() << '\n';
        return 0;
      }
      out << "highest,depth,multiplicity\n";
      for (const auto& t : branching_by_division(*alg, lam, om, power, depth))
        out << '"' << pairings_string(*alg, t.highest) << "\"," << t.depth << ',' << t.mult.get_str() << '\n';
      return 0;
    }
    if (a_char->parsed()) {
      AlgebraPtr alg = make_algebra(common.algebra);
      Weight lam = parse_pairings(*alg, highest);
      Specialization s = rho_specialization(*alg, spec_n);
      EvalResult closed = eval_character_closed(*alg, lam, s);
      json j = {{"highest", lam.to_string()}, {"spec_n", spec_n}, {"closed_log", closed.log_value}};
      try {
        EvalResult series = eval_character(*alg, lam, s, eps);
        j["series_log"] = series.log_value;
        j["series_depth"] = series.truncation_depth;
        j["series_tail"] = series.tail_bound;
      } catch (const TruncationError& e) {
        j["series_error"] = e.what();
      }
      out << std::setprecision(17) << j.dump(2) << '\n';
      return 0;
    }
    if (a_chain->parsed()) {
      AlgebraPtr alg = make_algebra(common.algebra);
      Weight start = parse_pairings(*alg, start_s);
      Weight om = omega_s.empty() ? Rational(alg->dual_coxeter()) * alg->lambda0() : parse_pairings(*alg, omega_s);
      std::vector<Weight> traj = simulate_chain(*alg, start, om, rho_specialization(*alg, spec_n), steps, seed);
      out << "step,level";
      for (std::size_t i = 1; i <= alg->rank(); ++i) out << ",z" << i;
      out << ",pairings\n";
      for (std::size_t k = 0; k < traj.size(); ++k) {
        out << k << ',' << to_string(traj[k].k);
        for (const auto& z : traj[k].z) out << ',' << to_string(z);
        out << ",\"" << pairings_string(*alg, traj[k]) << "\"\n";
      }
      return 0;
    }
    if (a_diff->parsed()) {
      AlgebraPtr alg = make_algebra(common.algebra);
      SpaceTime st(*alg);
      SpaceTimePoint x0 = st.from_weight(parse_pairings(*alg, start_s));
      if (exit_mode) {
        ExitEstimate e = exit_probability(st, x0, t_max, dt, paths, seed);
        json j = {{"t_max", t_max},          {"dt", dt},
                  {"paths", paths},          {"p_fine", e.p_fine},
                  {"p_coarse", e.p_coarse},  {"p_extrapolated", e.p_extrapolated},
                  {"se", e.se_extrapolated}, {"one_minus_quadrature", 1 - survival_quadrature(st, x0, t_max)}};
        out << j.dump(2) << '\n';
        return 0;
      }
      SampleOptions opt;
      opt.t_max = t_max;
      opt.dt = dt;
      opt.n_paths = paths;
      opt.seed = seed;
      opt.conditioned = conditioned;
      opt.keep_points = false;
      opt.record_steps = {std::lround(t_max / dt)};
      SampleSummary s = sample_paths(st, x0, opt);
      out << "path,s";
      for (std::size_t i = 1; i <= alg->rank(); ++i) out << ",y" << i;
      out << ",exited_at,aborted\n" << std::setprecision(12);
      for (std::size_t p = 0; p < s.paths.size(); ++p) {
        const auto& path = s.paths[p];
        out << p;
        if (path.points.empty()) {
          out << ',';
          for (std::size_t i = 0; i < alg->rank(); ++i) out << ',';
        } else {
          out << ',' << path.points.back().s;
          for (double y : path.points.back().z) out << ',' << y;
        }
        out << ',';
        if (path.exited_at) out << *path.exited_at;
        out << ',' << (path.aborted ? 1 : 0) << '\n';
      }
      return 0;
    }
    if (a_exp->parsed()) {
      ExperimentConfig cfg = load_config(config_path);
      cfg.seed = seed;
      if (!out_json.empty()) cfg.output_json = out_json;
      if (!out_csv.empty()) cfg.output_csv = out_csv;
      ComparisonReport r = cfg.experiment == "walk" ? scaling_walk_experiment(cfg) : scaling_chain_experiment(cfg);
      write_outputs(cfg, r);
      if (cfg.output_json.empty()) out << report_to_json(r);
      return r.pass ? 0 : 1;
    }
    if (a_ver->parsed()) {
      AcceptanceOptions opt;
      opt.algebra = common.algebra;
      opt.fast = fast;
      opt.only = only;
      opt.seed = verify_seed;
      for (int id : only)
        if (id < 1 || id > 11) {
          err << "error: unknown criterion " << id << '\n';
          return 2;
        }
      bool all = true;
      run_acceptance(opt, [&](const CriterionResult& r) {
        out << format_result(r) << std::endl;
        all = all && r.pass;
      });
      out << (all ? "all criteria passed" : "some criteria FAILED") << '\n';
      return all ? 0 : 1;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace affine
