#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <vector>

#include "brwx/brw.hpp"
#include "brwx/stats.hpp"
#include "brwx/theory.hpp"
#include "reference_brw.hpp"
#include "test_util.hpp"

using namespace brwx;
using namespace brwx::brw;
using brwx::testutil::ConstantDisp;
using brwx::testutil::ConstantProgeny;

TEST_CASE("deterministic chains: unit steps accumulate") {
  ConstantProgeny one{1.0, 0.5};
  ConstantDisp unit{1.0};
  Frontier f;
  RngStream rng(1, 0);
  for (int g = 1; g <= 5; ++g) {
    auto step = step_frontier(f, one, unit, 100, rng);
    REQUIRE_FALSE(step.cap_exceeded);
    f = std::move(step.frontier);
  }
  REQUIRE(f.positions.size() == 1);
  CHECK(f.generation == 5);
  CHECK(f.positions[0] == doctest::Approx(5.0).epsilon(1e-15));
}

TEST_CASE("deterministic doubling: 2^n particles at zero") {
  ConstantProgeny two{2.0, 0.5};
  ConstantDisp zero{0.0};
  Frontier f;
  RngStream rng(1, 0);
  for (int g = 1; g <= 6; ++g) {
    auto step = step_frontier(f, two, zero, 1000, rng);
    REQUIRE_FALSE(step.cap_exceeded);
    f = std::move(step.frontier);
  }
  REQUIRE(f.positions.size() == 64);
  for (double p : f.positions) CHECK(p == 0.0);
  CHECK(std::exp(f.log_size()) == doctest::Approx(64.0).epsilon(1e-12));
}

TEST_CASE("cap overflow is a flagged partial outcome, not an exception") {
  ConstantProgeny four{4.0, 0.5};
  ConstantDisp zero{0.0};
  Frontier f;
  RngStream rng(1, 0);
  auto s1 = step_frontier(f, four, zero, 64, rng);
  REQUIRE_FALSE(s1.cap_exceeded);
  auto s2 = step_frontier(s1.frontier, four, zero, 64, rng);
  REQUIRE_FALSE(s2.cap_exceeded);  // 16 children
  auto s3 = step_frontier(s2.frontier, four, zero, 50, rng);
  CHECK(s3.cap_exceeded);  // 64 would exceed 50
  CHECK(s3.frontier.positions.size() <= 50);
  CHECK(s3.frontier.positions.size() >= 48);  // 12 complete parents
}

TEST_CASE("per-edge displacement tail matches within a binomial interval") {
  ConstantProgeny one{1.0, 0.5};
  auto disp = DisplacementLaw::pareto(1.0);
  RngStream rng(777, 0);
  const int n = 200000;
  const double x = 7.0;
  int hits = 0;
  Frontier f;
  for (int i = 0; i < n; ++i) {
    auto step = step_frontier(f, one, disp, 10, rng);
    hits += (step.frontier.positions[0] > x);
  }
  const double p = disp.tail(x);
  CHECK(std::fabs(static_cast<double>(hits) / n - p) < 3.0 * std::sqrt(p * (1 - p) / n));
}

TEST_CASE("run_brw: closed-form law of the first-generation maximum") {
  ConstantProgeny three{3.0, 0.5};
  auto disp = DisplacementLaw::pareto(1.0);
  const int reps = 10000;
  std::vector<double> maxima(reps);
  testutil::parallel_for(reps, [&](int i) {
    RngStream rng(424200, static_cast<std::uint64_t>(i));
    auto res = run_brw(three, disp, 1, 1, {}, 100, rng);
    maxima[i] = res.record.top_k[0];
  });
  std::sort(maxima.begin(), maxima.end());
  auto cdf = [](double x) {
    if (x <= 1.0) return 0.0;
    const double c = 1.0 - 1.0 / x;
    return c * c * c;
  };
  CHECK(stats::ks_statistic(maxima, cdf) < 0.02);
}

TEST_CASE("records: ordering, counts and recount invariants") {
  ProgenyLaw law(0.6);
  auto disp = DisplacementLaw::pareto(1.0);
  std::vector<double> thresholds{0.25, 0.5, 1.0, 2.0, 4.0};
  for (int rep = 0; rep < 50; ++rep) {
    RngStream rng(31000 + rep, 0);
    auto res = run_brw(law, disp, 3, 8, thresholds, 2000, rng);
    for (std::size_t i = 1; i < res.record.top_k.size(); ++i) {
      CHECK(res.record.top_k[i - 1] >= res.record.top_k[i]);
    }
    if (res.record.z_n < 2 || res.truncated) continue;
    for (std::size_t j = 1; j < res.points.counts.size(); ++j) {
      CHECK(res.points.counts[j] <= res.points.counts[j - 1]);
      CHECK(res.points.counts[j] <= static_cast<std::int64_t>(res.record.z_n));
    }
    // counts <= k can be recounted from the retained order statistics
    for (std::size_t j = 0; j < thresholds.size(); ++j) {
      const auto c = res.points.counts[j];
      if (c <= static_cast<std::int64_t>(res.record.top_k.size())) {
        std::int64_t recount = 0;
        const double cut = thresholds[j] * res.record.c_n;
        for (double v : res.record.top_k) recount += (v > cut) ? 1 : 0;
        CHECK(recount == c);
      }
    }
  }
}

TEST_CASE("scaling: exact pareto algebra and monotonicity") {
  ExtremeRecord rec;
  rec.generation = 4;
  rec.top_k = {2e6, 1e6};
  rec.z_n = 1000000;
  auto b1 = DisplacementLaw::pareto(1.0);
  auto b2 = DisplacementLaw::pareto(2.0);
  const auto s1 = scale_positions(rec, b1);
  CHECK(s1[0] == doctest::Approx(2.0).epsilon(1e-12));
  const auto s2 = scale_positions(rec, b2);
  CHECK(s2[0] == doctest::Approx(2e3).epsilon(1e-12));

  double prev = 0.0;
  for (std::uint64_t z = 2; z < 1u << 20; z *= 2) {
    const double c = b1.quantile_from_tail(1.0 / static_cast<double>(z));
    CHECK(c > prev);
    prev = c;
  }

  ExtremeRecord tiny = rec;
  tiny.z_n = 1;
  CHECK_THROWS_AS(scale_positions(tiny, b1), std::domain_error);
  CHECK_THROWS_AS(scaled_max_ratio(tiny, b1), std::domain_error);
}

TEST_CASE("scaled max ratio against hazard inversion") {
  auto w = DisplacementLaw::weibull(2.0, 0.5);  // L(u) = sqrt(2u)
  ExtremeRecord rec;
  rec.generation = 5;
  rec.z_n = static_cast<std::uint64_t>(std::exp(50.0));
  rec.top_k = {w.inverse_hazard(std::log(static_cast<double>(rec.z_n)))};
  CHECK(scaled_max_ratio(rec, w) == doctest::Approx(1.0).epsilon(1e-12));

  auto g = DisplacementLaw::gaussian();
  ExtremeRecord grec;
  grec.generation = 5;
  grec.z_n = rec.z_n;  // log z ~ 50
  grec.top_k = {10.0};
  const double ratio = scaled_max_ratio(grec, g);
  CHECK(ratio >= 1.0);
  CHECK(ratio <= 1.12);
}

TEST_CASE("cloud speed statistic conventions") {
  ExtremeRecord rec;
  rec.generation = 7;
  rec.top_k = {0.8};
  CHECK(cloud_speed_stat(rec, TailRegime::heavy) == 0.0);
  CHECK(cloud_speed_stat(rec, TailRegime::light) == 0.0);
  const double c = 0.31;
  rec.top_k = {std::exp(std::exp(c * rec.generation))};
  CHECK(cloud_speed_stat(rec, TailRegime::heavy) == doctest::Approx(c).epsilon(1e-12));
  rec.top_k = {std::exp(2.0 * rec.generation)};
  CHECK(cloud_speed_stat(rec, TailRegime::light) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("streaming run matches the tree-materializing oracle exactly") {
  RngStream meta(987654, 0);
  std::vector<double> thresholds{0.5, 1.0, 2.0};
  for (int cfg = 0; cfg < 30; ++cfg) {
    const double alpha = 0.3 + 0.6 * meta.uniform();
    const int n = 1 + static_cast<int>(meta.uniform() * 3);
    const bool heavy = meta.uniform() < 0.5;
    const auto disp =
        heavy ? DisplacementLaw::pareto(0.5 + meta.uniform()) : DisplacementLaw::gaussian();
    ProgenyLaw law(alpha);
    const std::uint64_t seed = meta.next_u64();

    RngStream r1(seed, 1), r2(seed, 1);
    const auto stream = run_brw(law, disp, n, 4, thresholds, 1000, r1, true);
    const auto ref = testref::run_reference(law, disp, n, 4, thresholds, 1000, r2, true);

    CHECK(stream.truncated == ref.truncated);
    CHECK(stream.path.log_sizes == ref.path.log_sizes);
    CHECK(stream.record.generation == ref.record.generation);
    CHECK(stream.record.z_n == ref.record.z_n);
    CHECK(stream.record.top_k == ref.record.top_k);
    CHECK(stream.points.counts == ref.points.counts);
    CHECK(stream.last_edge_counts == ref.last_edge_counts);
    if (stream.record.z_n >= 2) {
      CHECK(stream.record.c_n == ref.record.c_n);
      CHECK(stream.record.l_log_zn == ref.record.l_log_zn);
    }
  }
}

TEST_CASE("one large jump dominates heavy-tailed path sums") {
  ProgenyLaw law(0.6);
  auto disp = DisplacementLaw::pareto(1.0);
  int dominated = 0, total = 0;
  for (int rep = 0; rep < 600; ++rep) {
    RngStream rng(51500 + rep, 0);
    auto tree = testref::build_tree(law, disp, 3, 20000, rng);
    if (tree.truncated || tree.generations.back().empty()) continue;
    const auto summands = testref::max_vertex_summands(tree);
    double sum = 0.0, biggest = 0.0;
    for (double s : summands) {
      sum += s;
      biggest = std::max(biggest, s);
    }
    ++total;
    dominated += (biggest > 0.5 * sum);
  }
  REQUIRE(total >= 400);
  CHECK(static_cast<double>(dominated) / total >= 0.8);
}

TEST_CASE("identical seeds give bitwise-identical records") {
  ProgenyLaw law(0.7);
  auto disp = DisplacementLaw::pareto(1.0);
  RngStream r1(31415, 9), r2(31415, 9);
  const auto a = run_brw(law, disp, 3, 5, {}, 100000, r1);
  const auto b = run_brw(law, disp, 3, 5, {}, 100000, r2);
  CHECK(a.record.top_k == b.record.top_k);
  CHECK(a.record.z_n == b.record.z_n);
  CHECK(a.record.c_n == b.record.c_n);
  CHECK(a.path.log_sizes == b.path.log_sizes);
}
