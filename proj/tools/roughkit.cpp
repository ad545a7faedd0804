#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rough/error_metrics.hpp"
#include "rough/fbm.hpp"
#include "rough/kernel.hpp"
#include "rough/parallel.hpp"
#include "rough/rbergomi.hpp"
#include "rough/rheston.hpp"
#include "rough/smile.hpp"

namespace fs = std::filesystem;

namespace {

constexpr const char* kOutDirEnv = "ROUGHKIT_OUT_DIR";

struct RuleOptions {
  double hurst = 0.1;
  double horizon = 1.0;
  std::string rule = "learned";
  std::string w0 = "optimal";
  bool corollary = false;
  unsigned threads = rough::default_threads();
};

rough::ExpKernelApprox build_rule(const RuleOptions& o, int nodes) {
  const rough::W0Rule w0 = o.w0 == "riemann" ? rough::W0Rule::riemann : rough::W0Rule::optimal;
  switch (rough::parse_rule_kind(o.rule)) {
    case rough::RuleKind::thm31:
      return rough::thm31_rule(o.hurst, nodes, w0);
    case rough::RuleKind::thm33: {
      rough::Thm33Options opt;
      opt.corollary_digits = o.corollary;
      opt.enforce_min_nodes = !o.corollary;
      opt.w0 = w0;
      return rough::thm33_rule(o.hurst, nodes, o.horizon, opt);
    }
    case rough::RuleKind::learned:
      return rough::learned_rule(o.hurst, nodes, o.horizon, w0);
    case rough::RuleKind::optimized: {
      rough::OptimizeOptions opt;
      opt.threads = o.threads;
      return rough::optimized_rule(o.hurst, o.horizon,
                                   rough::optimize_full(o.hurst, o.horizon, nodes, 10, opt));
    }
    default:
      throw std::invalid_argument("unsupported rule " + o.rule);
  }
}

// Relative paths land under $ROUGHKIT_OUT_DIR when it is set.
fs::path resolve(const std::string& path) {
  fs::path p(path);
  const char* dir = std::getenv(kOutDirEnv);
  if (p.is_relative() && dir != nullptr && *dir != '\0') {
    p = fs::path(dir) / p;
  }
  return p;
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  return out;
}

// Writes to --out when given, stdout otherwise.
template <typename F>
void emit(const std::string& out_path, F&& write) {
  if (out_path.empty()) {
    write(std::cout);
    return;
  }
  auto out = open_output(resolve(out_path));
  write(out);
}

void add_rule_flags(CLI::App* cmd, RuleOptions& o) {
  cmd->add_option("--H", o.hurst, "Hurst parameter")->check(CLI::Range(0.01, 0.49));
  cmd->add_option("--T", o.horizon, "horizon")->check(CLI::PositiveNumber);
  cmd->add_option("--w0", o.w0, "weight at the zero node")
      ->check(CLI::IsMember({"riemann", "optimal"}));
  cmd->add_flag("--corollary", o.corollary,
                "thm33: evaluate the expansions in N with 4-decimal coefficients");
  cmd->add_option("--threads", o.threads, "worker cap")->check(CLI::PositiveNumber);
}

const auto kRuleNames = CLI::IsMember({"thm31", "thm33", "learned", "optimized"});

struct Preset {
  int paths;
  int steps;
};

Preset bergomi_preset(const std::string& name) {
  return name == "paper" ? Preset{1000000, 2000} : Preset{100000, 500};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Markovian approximations of rough volatility models"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML file mirroring the flags, one [section] per subcommand");

  RuleOptions rule_opts;
  int nodes = 16;
  std::vector<int> node_list;
  std::vector<std::string> rule_list;
  std::string out_path;

  auto* nodes_cmd = app.add_subcommand("nodes", "node CSV (i,x,w) for one rule");
  add_rule_flags(nodes_cmd, rule_opts);
  nodes_cmd->add_option("--N", nodes, "number of nonzero nodes")->check(CLI::PositiveNumber);
  nodes_cmd->add_option("--rule", rule_opts.rule)->check(kRuleNames);
  nodes_cmd->add_option("--out", out_path, "CSV file (default stdout)");

  auto* table_cmd = app.add_subcommand("error-table", "L2 errors per (N, rule)");
  add_rule_flags(table_cmd, rule_opts);
  table_cmd->add_option("--N", node_list, "node counts")->required()->delimiter(',')
      ->check(CLI::PositiveNumber);
  table_cmd->add_option("--rule", rule_list, "rules")->delimiter(',')->check(kRuleNames);
  table_cmd->add_option("--out", out_path, "CSV file (default stdout)");

  std::vector<double> fit_h{0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45};
  std::vector<int> fit_n{1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024};
  auto* fit_cmd = app.add_subcommand("fit", "refit the learned constants");
  fit_cmd->add_option("--H", fit_h, "Hurst grid")->delimiter(',')->check(CLI::Range(0.01, 0.49));
  fit_cmd->add_option("--N", fit_n, "node grid")->delimiter(',')->check(CLI::PositiveNumber);
  fit_cmd->add_option("--T", rule_opts.horizon)->check(CLI::PositiveNumber);
  fit_cmd->add_option("--threads", rule_opts.threads)->check(CLI::PositiveNumber);
  fit_cmd->add_option("--out", out_path, "per-point CSV (default stdout)");

  int steps = 64;
  int paths = 10;
  std::uint64_t seed = 1;
  auto* fbm_cmd = app.add_subcommand("fbm", "Markovian fBm paths");
  add_rule_flags(fbm_cmd, rule_opts);
  fbm_cmd->add_option("--N", nodes)->check(CLI::PositiveNumber);
  fbm_cmd->add_option("--rule", rule_opts.rule)->check(kRuleNames);
  fbm_cmd->add_option("--steps", steps)->check(CLI::PositiveNumber);
  fbm_cmd->add_option("--paths", paths)->check(CLI::PositiveNumber);
  fbm_cmd->add_option("--seed", seed);
  fbm_cmd->add_option("--out", out_path, "CSV file (default stdout)");

  std::string model = "bergomi";
  std::string preset = "desk";
  std::optional<int> smile_paths;
  std::optional<int> smile_steps;
  std::optional<int> strikes;
  std::optional<double> kmin;
  std::optional<double> kmax;
  std::optional<double> hurst;
  std::optional<double> maturity;
  std::optional<double> rho;
  std::optional<double> v0;
  double spot = 1.0;
  double eta = 1.9;
  double lambda = 0.3;
  double nu = 0.3;
  double theta = 0.02;
  bool lambda_scaled = false;
  bool dump_phi = false;
  std::string out_dir;
  auto* smile_cmd = app.add_subcommand("smile", "implied-vol smiles per N plus reference");
  smile_cmd->add_option("--model", model)->check(CLI::IsMember({"bergomi", "heston"}));
  smile_cmd->add_option("--preset", preset)->check(CLI::IsMember({"desk", "paper"}));
  smile_cmd->add_option("--N", node_list, "node counts")->delimiter(',')
      ->check(CLI::PositiveNumber);
  smile_cmd->add_option("--rule", rule_opts.rule)->check(kRuleNames);
  smile_cmd->add_option("--w0", rule_opts.w0)->check(CLI::IsMember({"riemann", "optimal"}));
  smile_cmd->add_option("--H", hurst)->check(CLI::Range(0.01, 0.49));
  smile_cmd->add_option("--T", maturity)->check(CLI::PositiveNumber);
  smile_cmd->add_option("--paths", smile_paths)->check(CLI::PositiveNumber);
  smile_cmd->add_option("--steps", smile_steps, "time steps (Riccati steps for heston)")
      ->check(CLI::PositiveNumber);
  smile_cmd->add_option("--seed", seed);
  smile_cmd->add_option("--strikes", strikes, "points in the log-moneyness grid")
      ->check(CLI::Range(2, 100000));
  smile_cmd->add_option("--kmin", kmin);
  smile_cmd->add_option("--kmax", kmax);
  smile_cmd->add_option("--spot", spot)->check(CLI::PositiveNumber);
  smile_cmd->add_option("--v0", v0)->check(CLI::PositiveNumber);
  smile_cmd->add_option("--rho", rho)->check(CLI::Range(-1.0, 1.0));
  smile_cmd->add_option("--eta", eta, "bergomi vol of vol")->check(CLI::NonNegativeNumber);
  smile_cmd->add_option("--lambda", lambda, "heston mean reversion")
      ->check(CLI::NonNegativeNumber);
  smile_cmd->add_option("--nu", nu, "heston vol of vol")->check(CLI::PositiveNumber);
  smile_cmd->add_option("--theta", theta, "heston mean level")->check(CLI::NonNegativeNumber);
  smile_cmd->add_flag("--lambda-scaled", lambda_scaled, "heston: Riccati form with λ in the kernel");
  smile_cmd->add_flag("--dump-phi", dump_phi, "heston: also write the u,re,im grids");
  smile_cmd->add_option("--threads", rule_opts.threads)->check(CLI::PositiveNumber);
  smile_cmd->add_option("--out", out_dir, "output directory")->envname(kOutDirEnv);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*nodes_cmd) {
      const auto approx = build_rule(rule_opts, nodes);
      const double err = rough::l2_error_exact(approx, rule_opts.horizon).l2_error;
      emit(out_path, [&](std::ostream& os) { rough::write_nodes_csv(os, approx); });
      std::FILE* summary = out_path.empty() ? stderr : stdout;
      std::fprintf(summary, "rule=%s H=%g N=%d m=%d n=%d xi0=%.6g xin=%.6g l2_error=%.6g\n",
                   rule_opts.rule.c_str(), rule_opts.hurst, nodes, approx.m, approx.n,
                   std::exp(approx.log_xi0), std::exp(approx.log_xin), err);
    } else if (*table_cmd) {
      if (node_list.empty()) {
        throw CLI::ValidationError("--N", "empty node list");
      }
      if (rule_list.empty()) {
        rule_list = {"thm33", "optimized"};
      }
      std::vector<rough::ErrorTableRow> rows;
      for (int n : node_list) {
        for (const auto& r : rule_list) {
          RuleOptions o = rule_opts;
          o.rule = r;
          rows.push_back(rough::make_error_row(build_rule(o, n), o.horizon));
        }
      }
      emit(out_path, [&](std::ostream& os) { rough::write_error_table_csv(os, rows); });
    } else if (*fit_cmd) {
      rough::OptimizeOptions opt;
      opt.threads = rule_opts.threads;
      const auto report = rough::fit_learned_constants(fit_h, fit_n, rule_opts.horizon, opt);
      emit(out_path, [&](std::ostream& os) { rough::write_fit_csv(os, report); });
      std::FILE* summary = out_path.empty() ? stderr : stdout;
      std::fprintf(summary,
                   "alpha_hat=%.4f beta_hat=%.4f alpha_xi0=%.4f alpha_xin=%.4f alpha_error=%.4f\n",
                   report.alpha_hat, report.beta_hat, report.alpha_from_xi0,
                   report.alpha_from_xin, report.alpha_from_error);
    } else if (*fbm_cmd) {
      const auto approx = build_rule(rule_opts, nodes);
      const auto sample = rough::simulate_fbm_paths(approx, rule_opts.horizon, steps, paths, seed,
                                                    rule_opts.threads);
      emit(out_path, [&](std::ostream& os) { rough::write_paths_csv(os, sample); });
    } else if (*smile_cmd) {
      const fs::path dir = out_dir.empty() ? fs::path(".") : fs::path(out_dir);
      fs::create_directories(dir);
      const unsigned threads = rule_opts.threads;
      auto write_to = [&](const std::string& name, auto&& write) {
        auto os = open_output(dir / name);
        write(os);
        std::printf("%s\n", (dir / name).string().c_str());
      };

      if (model == "bergomi") {
        rough::RBergomiParams p;
        p.spot = spot;
        p.eta = eta;
        p.hurst = hurst.value_or(p.hurst);
        p.maturity = maturity.value_or(p.maturity);
        p.rho = rho.value_or(p.rho);
        p.v0 = v0.value_or(p.v0);
        p.validate();
        const Preset pr = bergomi_preset(preset);
        const int n_paths = smile_paths.value_or(pr.paths);
        const int n_steps = smile_steps.value_or(pr.steps);
        const auto grid = rough::log_moneyness_grid(kmin.value_or(-0.4), kmax.value_or(0.2),
                                                    strikes.value_or(41));
        if (node_list.empty()) {
          node_list = {1, 4, 16};
        }
        if (n_steps <= 1024) {
          const auto ref = rough::reference_smile(p, n_steps, n_paths, grid, seed, threads);
          write_to("bergomi_ref.csv", [&](std::ostream& os) { rough::write_mc_smile_csv(os, ref); });
        } else {
          std::fprintf(stderr, "roughkit: reference skipped above 1024 steps\n");
        }
        RuleOptions o = rule_opts;
        o.hurst = p.hurst;
        o.horizon = p.maturity;
        for (int n : node_list) {
          const auto smile = rough::simulate_smile(p, build_rule(o, n), n_steps, n_paths, grid,
                                                   seed, threads);
          write_to("bergomi_N" + std::to_string(n) + ".csv",
                   [&](std::ostream& os) { rough::write_mc_smile_csv(os, smile); });
        }
      } else {
        rough::RHestonParams p;
        p.spot = spot;
        p.lambda = lambda;
        p.nu = nu;
        p.theta = theta;
        p.hurst = hurst.value_or(p.hurst);
        p.maturity = maturity.value_or(p.maturity);
        p.rho = rho.value_or(p.rho);
        p.v0 = v0.value_or(p.v0);
        p.form = lambda_scaled ? rough::RiccatiForm::lambda_scaled : rough::RiccatiForm::standard;
        p.validate();
        auto fo = preset == "paper" ? rough::FourierOptions::paper() : rough::FourierOptions::desk();
        fo.riccati_steps = smile_steps.value_or(fo.riccati_steps);
        fo.threads = threads;
        const auto grid = rough::log_moneyness_grid(kmin.value_or(-0.5), kmax.value_or(0.3),
                                                    strikes.value_or(81));
        if (node_list.empty()) {
          node_list = {1, 2, 4, 8, 16};
        }
        const auto ref_phi =
            rough::phi_grid(p, rough::RiccatiSolver::fractional_adams, nullptr, fo);
        auto ref = rough::heston_smile(ref_phi, p, grid);
        ref.steps = fo.riccati_steps;
        write_to("heston_ref.csv", [&](std::ostream& os) { rough::write_smile_csv(os, ref); });
        if (dump_phi) {
          write_to("heston_phi_ref.csv", [&](std::ostream& os) { rough::write_phi_csv(os, ref_phi); });
        }
        RuleOptions o = rule_opts;
        o.hurst = p.hurst;
        o.horizon = p.maturity;
        std::ostringstream errs;
        errs << "N,err\n";
        for (int n : node_list) {
          const auto approx = build_rule(o, n);
          const auto phi = rough::phi_grid(p, rough::RiccatiSolver::markovian_exp_pc, &approx, fo);
          const auto smile = rough::heston_smile(phi, p, grid);
          const std::string tag = "N" + std::to_string(n);
          write_to("heston_" + tag + ".csv",
                   [&](std::ostream& os) { rough::write_smile_csv(os, smile); });
          if (dump_phi) {
            write_to("heston_phi_" + tag + ".csv",
                     [&](std::ostream& os) { rough::write_phi_csv(os, phi); });
          }
          char line[64];
          std::snprintf(line, sizeof line, "%d,%.17g\n", n,
                        rough::smile_err(grid, ref.iv, smile.iv));
          errs << line;
        }
        write_to("heston_err.csv", [&](std::ostream& os) { os << errs.str(); });
      }
    }
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "roughkit: %s\n", e.what());
    return 1;
  }
  return 0;
}
