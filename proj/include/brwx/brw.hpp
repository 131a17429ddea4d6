#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "brwx/distributions.hpp"
#include "brwx/population.hpp"
#include "brwx/rng.hpp"

namespace brwx::brw {

// Current-generation particle positions; generation 0 is one particle at 0.
struct Frontier {
  int generation = 0;
  std::vector<double> positions{0.0};

  double log_size() const { return std::log(static_cast<double>(positions.size())); }
};

struct StepResult {
  Frontier frontier;
  bool cap_exceeded = false;  // child count would pass the cap; frontier is partial
};

// One branching step: every parent at position s draws a progeny count m and
// spawns m children at s + X. Stops (flagged, partial children retained) as
// soon as the generation would exceed cap. Parents are released by the
// caller discarding the old frontier.
//
// RNG order: per parent, one progeny uniform, then one uniform per child
// displacement. The tree-materializing test oracle replays this exactly.
template <class Progeny, class Disp>
StepResult step_frontier(const Frontier& f, const Progeny& progeny, const Disp& disp,
                         std::uint64_t cap, RngStream& rng,
                         std::vector<double>* last_displacements = nullptr) {
  if (f.positions.empty()) throw std::domain_error("step_frontier: empty frontier");
  if (cap < 1) throw std::domain_error("step_frontier: cap must be >= 1");
  StepResult out;
  out.frontier.generation = f.generation + 1;
  auto& children = out.frontier.positions;
  children.clear();
  for (const double s : f.positions) {
    const double md = progeny.sample(rng);
    if (md > static_cast<double>(cap) - static_cast<double>(children.size())) {
      out.cap_exceeded = true;
      return out;
    }
    const auto m = static_cast<std::uint64_t>(md);
    for (std::uint64_t j = 0; j < m; ++j) {
      const double x = disp.sample(rng);
      children.push_back(s + x);
      if (last_displacements) last_displacements->push_back(x);
    }
  }
  return out;
}

// Top-k order statistics of a generation together with its scalings.
struct ExtremeRecord {
  int generation = 0;
  std::vector<double> top_k;  // sorted nonincreasing
  std::uint64_t z_n = 0;
  double c_n = 0.0;       // quantile(1 - 1/z_n); heavy-tail scaling
  double l_log_zn = 0.0;  // inverse_hazard(log z_n); light-tail scaling
  bool truncated = false;
};

// Exceedance counts N_n((x_j, inf]) of positions/c_n over a threshold grid.
struct PointSample {
  std::vector<double> thresholds;      // x_1 < ... < x_m
  std::vector<std::int64_t> counts;    // nonincreasing, each <= z_n
};

struct RunResult {
  ExtremeRecord record;
  PointSample points;
  population::PopulationPath path;
  bool truncated = false;
  // Diagnostic: same exceedance counts for the final generation's own
  // displacements (the i.i.d. comparison process).
  std::vector<std::int64_t> last_edge_counts;
};

// Builds the record (top-k, scalings) for a frontier.
template <class Disp>
ExtremeRecord make_record(std::vector<double>& positions, int generation, int k,
                          const Disp& disp) {
  ExtremeRecord rec;
  rec.generation = generation;
  rec.z_n = positions.size();
  const std::size_t kk = std::min<std::size_t>(k, positions.size());
  std::nth_element(positions.begin(), positions.begin() + (kk - 1), positions.end(),
                   std::greater<>());
  rec.top_k.assign(positions.begin(), positions.begin() + kk);
  std::sort(rec.top_k.begin(), rec.top_k.end(), std::greater<>());
  if (rec.z_n >= 2) {
    const double z = static_cast<double>(rec.z_n);
    rec.c_n = disp.quantile_from_tail(1.0 / z);
    rec.l_log_zn = disp.inverse_hazard(std::log(z));
  }
  return rec;
}

// Streams generations 0..n keeping only the current frontier; returns top-k
// positions, exceedance counts of positions/C_n over the grid, and the size
// path. A cap overflow before generation n yields a flagged partial result
// recorded at the last completed generation.
template <class Progeny>
RunResult run_brw(const Progeny& progeny, const DisplacementLaw& disp, int n, int k,
                  std::span<const double> thresholds, std::uint64_t cap, RngStream& rng,
                  bool track_last_edge = false) {
  if (n < 1) throw std::domain_error("run_brw: n must be >= 1");
  if (k < 1) throw std::domain_error("run_brw: k must be >= 1");
  RunResult out;
  out.path.mode = population::PathMode::exact;
  out.path.alpha = progeny.alpha();

  Frontier cur;
  std::vector<double> last_disp;
  for (int g = 1; g <= n; ++g) {
    std::vector<double>* track = nullptr;
    if (track_last_edge && g == n) {
      last_disp.clear();
      track = &last_disp;
    }
    StepResult step = step_frontier(cur, progeny, disp, cap, rng, track);
    if (step.cap_exceeded) {
      out.truncated = true;
      out.path.truncated = true;
      break;
    }
    cur = std::move(step.frontier);
    out.path.log_sizes.push_back(cur.log_size());
  }

  const int reached = cur.generation;
  out.record = make_record(cur.positions, reached, k, disp);
  out.record.truncated = out.truncated;

  out.points.thresholds.assign(thresholds.begin(), thresholds.end());
  out.points.counts.assign(thresholds.size(), 0);
  if (out.record.z_n >= 2 && !thresholds.empty()) {
    for (std::size_t j = 0; j < thresholds.size(); ++j) {
      const double cut = thresholds[j] * out.record.c_n;
      std::int64_t c = 0;
      for (const double s : cur.positions) c += (s > cut) ? 1 : 0;
      out.points.counts[j] = c;
    }
    if (track_last_edge && !out.truncated) {
      out.last_edge_counts.assign(thresholds.size(), 0);
      for (std::size_t j = 0; j < thresholds.size(); ++j) {
        const double cut = thresholds[j] * out.record.c_n;
        std::int64_t c = 0;
        for (const double x : last_disp) c += (x > cut) ? 1 : 0;
        out.last_edge_counts[j] = c;
      }
    }
  }
  return out;
}

// Scaled top-k: each M_n^{(j)} / c_n. Requires z_n >= 2.
std::vector<double> scale_positions(const ExtremeRecord& rec, const DisplacementLaw& disp);

// M_n^{(1)} / L(log Z_n) for light-tailed displacement laws.
double scaled_max_ratio(const ExtremeRecord& rec, const DisplacementLaw& disp);

enum class TailRegime { heavy, light };

// (1/n) log+ log+ M_n (heavy) or (1/n) log+ M_n (light), with
// log+ x = max(log x, 0).
double cloud_speed_stat(const ExtremeRecord& rec, TailRegime regime);

}  // namespace brwx::brw
