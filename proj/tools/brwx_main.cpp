// brwx: config-driven experiment runner for branching random walks on
// infinite-mean Galton-Watson trees.
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 inconclusive
// (cap-dominated), 64 usage error.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "brwx/experiment.hpp"
#include "brwx/version.hpp"

namespace {

constexpr int kUsageExit = 64;

std::string default_displacement(brwx::experiment::Kind kind) {
  using brwx::experiment::Kind;
  switch (kind) {
    case Kind::light_tail_ratio:
    case Kind::cloud_speed_light:
      return "gaussian";
    case Kind::lemma_order_stats:
      return "exponential";
    default:
      return "pareto";
  }
}

}  // namespace

int main(int argc, char** argv) {
  using brwx::experiment::Config;
  using brwx::experiment::Kind;

  CLI::App app{"Branching random walk experiments on infinite-mean Galton-Watson trees"};
  app.set_version_flag("--version", std::string(brwx::kVersion));
  app.require_subcommand(1);

  Config cfg;
  std::string config_file;
  std::string thresholds_csv;
  bool beta_given = false, r_given = false, disp_given = false;

  std::vector<std::pair<CLI::App*, Kind>> subs;
  for (Kind kind : brwx::experiment::all_kinds()) {
    CLI::App* sub = app.add_subcommand(brwx::experiment::kind_name(kind), "");
    sub->add_option("--config", config_file, "flat key=value config file (flags override)");
    sub->add_option("--alpha", cfg.alpha, "progeny moment index in (0,1)");
    auto* ob = sub->add_option("--beta", cfg.beta_or_r, "pareto tail index (heavy runs)");
    auto* orr = sub->add_option("--r", cfg.beta_or_r, "hazard regular-variation index");
    ob->excludes(orr);
    sub->add_option("--displacement", cfg.displacement,
                    "pareto|gaussian|exponential|weibull");
    sub->add_option("--disp-scale", cfg.disp_scale, "weibull c / exponential rate");
    sub->add_option("--n", cfg.n, "generations (or log2 sample size / sum length)");
    sub->add_option("--k", cfg.k, "retained order statistics");
    sub->add_option("--replicates", cfg.replicates, "independent replicates");
    sub->add_option("--cap", cfg.cap, "per-generation particle cap");
    sub->add_option("--seed", cfg.master_seed, "master seed");
    sub->add_option("--out", cfg.output, "output path prefix (.json/.csv)");
    sub->add_option("--threads", cfg.threads, "worker threads (0 = all cores)");
    sub->add_option("--surrogate-switch", cfg.surrogate_switch,
                    "log population size where the stable surrogate takes over");
    sub->add_option("--thresholds", thresholds_csv, "comma-separated exceedance grid");
    sub->add_option("--s", cfg.s, "mass-concentration moment exponent");
    sub->add_option("--delta", cfg.delta, "order-statistic depth exponent in (0,1]");
    sub->add_option("--h-kind", cfg.h_kind, "regvar sum test function: power|corrected");
    sub->callback([&, kind, sub] {
      cfg.experiment = kind;
      beta_given = sub->count("--beta") > 0;
      r_given = sub->count("--r") > 0;
      disp_given = sub->count("--displacement") > 0;
    });
    subs.emplace_back(sub, kind);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForVersion") {
      return app.exit(e);
    }
    std::cerr << e.what() << "\n";
    return kUsageExit;
  }

  try {
    // Layering: config file first, then flags on top.
    if (!config_file.empty()) {
      std::ifstream in(config_file);
      if (!in) {
        std::cerr << "config: cannot open '" << config_file << "'\n";
        return kUsageExit;
      }
      std::stringstream buf;
      buf << in.rdbuf();
      Config from_file = Config::from_kv(buf.str());
      const Kind cli_kind = cfg.experiment;
      // Re-parse flags over the file values by swapping defaults.
      Config merged = from_file;
      merged.experiment = cli_kind;
      Config flag_defaults;
      auto pick = [](auto flag_value, auto default_value, auto file_value) {
        return (flag_value != default_value) ? flag_value : file_value;
      };
      merged.alpha = pick(cfg.alpha, flag_defaults.alpha, from_file.alpha);
      merged.beta_or_r = pick(cfg.beta_or_r, flag_defaults.beta_or_r, from_file.beta_or_r);
      merged.displacement =
          pick(cfg.displacement, flag_defaults.displacement, from_file.displacement);
      merged.disp_scale = pick(cfg.disp_scale, flag_defaults.disp_scale, from_file.disp_scale);
      merged.n = pick(cfg.n, flag_defaults.n, from_file.n);
      merged.k = pick(cfg.k, flag_defaults.k, from_file.k);
      merged.replicates = pick(cfg.replicates, flag_defaults.replicates, from_file.replicates);
      merged.cap = pick(cfg.cap, flag_defaults.cap, from_file.cap);
      merged.master_seed = pick(cfg.master_seed, flag_defaults.master_seed, from_file.master_seed);
      merged.surrogate_switch =
          pick(cfg.surrogate_switch, flag_defaults.surrogate_switch, from_file.surrogate_switch);
      merged.s = pick(cfg.s, flag_defaults.s, from_file.s);
      merged.delta = pick(cfg.delta, flag_defaults.delta, from_file.delta);
      merged.h_kind = pick(cfg.h_kind, flag_defaults.h_kind, from_file.h_kind);
      merged.threads = cfg.threads;
      merged.output = cfg.output;
      cfg = merged;
    }

    if (!thresholds_csv.empty()) {
      cfg.thresholds.clear();
      std::stringstream ts(thresholds_csv);
      std::string tok;
      while (std::getline(ts, tok, ',')) {
        if (!tok.empty()) cfg.thresholds.push_back(std::stod(tok));
      }
    }
    if (!disp_given && config_file.empty()) {
      cfg.displacement = default_displacement(cfg.experiment);
    }
    (void)beta_given;
    (void)r_given;

    if (cfg.output.empty()) {
      const char* dir = std::getenv("BRWX_OUT_DIR");
      if (dir && *dir) {
        cfg.output =
            (std::filesystem::path(dir) / brwx::experiment::kind_name(cfg.experiment)).string();
      }
    }

    const auto report = brwx::experiment::run(cfg);
    std::cout << "experiment: " << brwx::experiment::kind_name(cfg.experiment) << "\n"
              << "status: " << brwx::experiment::status_name(report.status) << "\n"
              << "config_hash: " << report.config_hash << "\n"
              << "truncated: " << report.truncation_count << "/" << cfg.replicates << "\n";
    for (const auto& a : report.aggregates) {
      std::cout << (a.checked ? (a.pass ? "  [pass] " : "  [FAIL] ") : "  [info] ") << a.name
                << " = " << a.value;
      if (!std::isnan(a.target)) std::cout << " (target " << a.target << ")";
      std::cout << "\n";
    }
    if (!cfg.output.empty()) {
      std::cout << "report: " << cfg.output << ".json, " << cfg.output << ".csv\n";
    }
    return brwx::experiment::exit_code(report.status);
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsageExit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
