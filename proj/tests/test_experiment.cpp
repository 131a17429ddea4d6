#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <cstdio>

#include "brwx/experiment.hpp"
#include "brwx/theory.hpp"

using namespace brwx::experiment;

namespace {

const AggregateRow* find_row(const Report& rep, const std::string& name) {
  for (const auto& a : rep.aggregates) {
    if (a.name == name) return &a;
  }
  return nullptr;
}

}  // namespace

TEST_CASE("config round-trips through the flat key-value format") {
  Config cfg;
  cfg.experiment = Kind::heavy_point_process;
  cfg.alpha = 0.8;
  cfg.beta_or_r = 1.0;
  cfg.displacement = "pareto";
  cfg.n = 4;
  cfg.k = 3;
  cfg.replicates = 123;
  cfg.cap = 999983;
  cfg.thresholds = {1.0, 2.0, 4.0};
  cfg.master_seed = 0xDEADBEEFull;
  cfg.s = 1.5;
  cfg.delta = 0.25;
  const Config back = Config::from_kv(cfg.to_kv());
  CHECK(back.to_kv() == cfg.to_kv());
  CHECK(back.hash_hex() == cfg.hash_hex());
  CHECK(back.experiment == Kind::heavy_point_process);
  CHECK(back.thresholds == cfg.thresholds);
  CHECK(back.master_seed == cfg.master_seed);
}

TEST_CASE("config validation raises usage errors naming the field") {
  Config cfg;
  cfg.experiment = Kind::gw_convergence;
  cfg.alpha = 1.5;
  CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("alpha"), std::invalid_argument);
  cfg.alpha = 0.5;
  cfg.thresholds = {2.0, 1.0};
  CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("thresholds"), std::invalid_argument);
  cfg.thresholds.clear();
  cfg.experiment = Kind::light_tail_ratio;
  cfg.displacement = "pareto";
  CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("displacement"), std::invalid_argument);
  cfg.displacement = "gaussian";
  cfg.n = 0;
  CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("n:"), std::invalid_argument);
}

TEST_CASE("constants_table reports the limit constants and equivalences") {
  Config cfg;
  cfg.experiment = Kind::constants_table;
  cfg.alpha = 0.5;
  cfg.beta_or_r = 2.0;
  cfg.k = 10;
  const Report rep = run(cfg);
  CHECK(rep.status == Status::pass);
  const auto* lc = find_row(rep, "light_constant");
  REQUIRE(lc != nullptr);
  CHECK(lc->value == doctest::Approx(1.414214).epsilon(1e-6));
  REQUIRE(rep.rows.size() == 11);
  for (int k = 0; k <= 10; ++k) {
    CHECK(rep.rows[k].ratio ==
          doctest::Approx(brwx::theory::f_closed(0.5, 2.0, k)).epsilon(1e-12));
  }
  CHECK(exit_code(rep.status) == 0);
}

TEST_CASE("regvar sum experiment hits the geometric limit") {
  Config cfg;
  cfg.experiment = Kind::lemma_regvar_sum;
  cfg.alpha = 0.5;  // the ratio a
  cfg.beta_or_r = 1.0;
  cfg.n = 200;
  cfg.h_kind = "power";
  const Report rep = run(cfg);
  CHECK(rep.status == Status::pass);
  const auto* row = find_row(rep, "partial_sum_ratio");
  REQUIRE(row != nullptr);
  CHECK(std::fabs(row->value - 2.0) < 1e-6);
}

TEST_CASE("reports are byte-identical for a fixed seed across thread counts") {
  Config cfg;
  cfg.experiment = Kind::gw_convergence;
  cfg.alpha = 0.5;
  cfg.n = 12;
  cfg.replicates = 60;
  cfg.master_seed = 20240810;
  cfg.threads = 1;
  const Report r1 = run(cfg);
  cfg.threads = 4;
  const Report r2 = run(cfg);
  CHECK(r1.to_json(false) == r2.to_json(false));
  CHECK(r1.to_csv() == r2.to_csv());
  CHECK(r1.config_hash == r2.config_hash);
}

TEST_CASE("same config and seed reproduce the same report object") {
  Config cfg;
  cfg.experiment = Kind::lemma_heavy_sums;
  cfg.alpha = 0.5;
  cfg.n = 20000;
  cfg.replicates = 40;
  cfg.master_seed = 7;
  const Report a = run(cfg);
  const Report b = run(cfg);
  CHECK(a.to_json(false) == b.to_json(false));
  CHECK(a.to_csv() == b.to_csv());
}

TEST_CASE("csv rows follow the fixed schema") {
  Config cfg;
  cfg.experiment = Kind::gw_convergence;
  cfg.alpha = 0.5;
  cfg.n = 10;
  cfg.replicates = 5;
  const Report rep = run(cfg);
  const std::string csv = rep.to_csv();
  CHECK(csv.rfind("replicate,z_n_log,w_hat,m_n,ratio,truncated\n", 0) == 0);
  int lines = 0;
  for (char c : csv) lines += (c == '\n');
  CHECK(lines == 6);  // header + 5 rows
}

TEST_CASE("order statistics at delta = 1 select the maximum") {
  Config cfg;
  cfg.experiment = Kind::lemma_order_stats;
  cfg.displacement = "exponential";
  cfg.n = 24;
  cfg.delta = 1.0;  // rank floor(a_n^0) = 1
  cfg.replicates = 20;
  cfg.master_seed = 2121;
  const Report rep = run(cfg);
  const auto* row = find_row(rep, "median_order_stat_ratio");
  REQUIRE(row != nullptr);
  // maximum of a_n exponentials sits at log(a_n) + Gumbel noise
  CHECK(row->value >= 0.9);
  CHECK(row->value <= 1.1);
}

TEST_CASE("status exit codes") {
  CHECK(exit_code(Status::pass) == 0);
  CHECK(exit_code(Status::fail) == 1);
  CHECK(exit_code(Status::inconclusive) == 2);
}

TEST_CASE("light tail ratio experiment on a tiny budget produces sane rows") {
  Config cfg;
  cfg.experiment = Kind::light_tail_ratio;
  cfg.displacement = "gaussian";
  cfg.alpha = 0.5;
  cfg.beta_or_r = 2.0;
  cfg.n = 4;
  cfg.cap = 20000;
  cfg.replicates = 50;
  const Report rep = run(cfg);
  REQUIRE(rep.rows.size() == 50);
  for (const auto& row : rep.rows) {
    CHECK(row.achieved_n >= 0);
    CHECK(row.achieved_n <= 4);
  }
  const auto* med = find_row(rep, "median_ratio_over_finite_target");
  REQUIRE(med != nullptr);
  CHECK(med->value > 0.0);
}
