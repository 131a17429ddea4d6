#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "brwx/stats.hpp"

namespace brwx::experiment {

enum class Kind {
  gw_convergence,
  mass_concentration,
  heavy_point_process,
  frechet_max,
  cloud_speed_heavy,
  light_tail_ratio,
  cloud_speed_light,
  lemma_order_stats,
  lemma_heavy_sums,
  lemma_regvar_sum,
  constants_table,
};

const char* kind_name(Kind k);
std::optional<Kind> kind_from_name(std::string_view name);
std::vector<Kind> all_kinds();

struct Config {
  Kind experiment = Kind::constants_table;
  double alpha = 0.5;
  double beta_or_r = 1.0;               // pareto beta / weibull hazard index / regvar rho
  std::string displacement = "pareto";  // pareto | gaussian | exponential | weibull
  double disp_scale = 1.0;              // weibull c or exponential rate
  int n = 4;
  int k = 2;
  int replicates = 200;
  std::uint64_t cap = 10000000;
  std::vector<double> thresholds;  // empty -> geometric default 0.25 * 2^j, 12 points
  std::uint64_t master_seed = 1;
  double surrogate_switch = 13.815510557964274;  // log(1e6)
  double s = 1.0;                  // mass-concentration moment exponent
  double delta = 0.5;              // order-statistic depth exponent
  std::string h_kind = "power";    // lemma_regvar_sum: power | corrected
  int threads = 0;                 // 0 = all available cores
  std::string output;              // path prefix for <out>.json / <out>.csv

  // Flat "key = value" round trip.
  std::string to_kv() const;
  static Config from_kv(const std::string& text);
  // FNV-1a over the canonical serialization.
  std::string hash_hex() const;
  // Throws std::invalid_argument naming the offending field.
  void validate() const;

  std::vector<double> effective_thresholds() const;
};

enum class Status { pass, fail, inconclusive };

const char* status_name(Status s);
int exit_code(Status s);  // 0 pass, 1 fail, 2 inconclusive

struct AggregateRow {
  std::string name;
  double value = 0.0;
  double target = 0.0;
  double tolerance = 0.0;  // |value - target| <= tolerance * |target| (when checked)
  bool pass = true;
  bool checked = true;     // false: reported only, does not gate the status
  std::string provenance;  // which limit law this verifies
  std::string notes;
};

struct ReplicateRow {
  int replicate = 0;
  double z_n_log = 0.0;
  double w_hat = 0.0;
  double m_n = 0.0;
  double ratio = 0.0;
  bool truncated = false;
  int achieved_n = 0;
  std::vector<std::int64_t> counts;            // per-threshold exceedances
  std::vector<std::int64_t> last_edge_counts;  // diagnostic counterpart
};

struct Report {
  Config config;
  std::string config_hash;
  Status status = Status::pass;
  int truncation_count = 0;
  int degenerate_count = 0;  // z_n < 2: scaling undefined, excluded from stats
  double wall_time_seconds = 0.0;
  std::vector<AggregateRow> aggregates;
  std::vector<stats::GofReport> gof;
  std::vector<ReplicateRow> rows;

  std::string to_json(bool include_wall_time = true) const;
  std::string to_csv() const;
};

// Runs the configured experiment on replicate streams derived from
// (master_seed, replicate index); writes <output>.json and <output>.csv when
// config.output is set. Thread count never changes the results.
Report run(const Config& config);

}  // namespace brwx::experiment
