#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "brwx/brw.hpp"
#include "brwx/distributions.hpp"
#include "brwx/experiment.hpp"
#include "brwx/population.hpp"
#include "brwx/rng.hpp"
#include "brwx/stats.hpp"
#include "brwx/theory.hpp"
#include "brwx/version.hpp"

namespace py = pybind11;
using namespace brwx;

PYBIND11_MODULE(_brwx, m) {
  m.doc() = "Branching random walks on infinite-mean Galton-Watson trees";
  m.attr("__version__") = kVersion;

  py::class_<RngStream>(m, "RngStream")
      .def(py::init<std::uint64_t, std::uint64_t>(), py::arg("master_seed"),
           py::arg("stream_index") = 0)
      .def("next_u64", &RngStream::next_u64)
      .def("uniform", &RngStream::uniform);

  py::class_<ProgenyLaw>(m, "ProgenyLaw")
      .def(py::init<double>(), py::arg("alpha"))
      .def_property_readonly("alpha", &ProgenyLaw::alpha)
      .def("sample", py::overload_cast<double>(&ProgenyLaw::sample, py::const_), py::arg("u"))
      .def("sample_stream", py::overload_cast<RngStream&>(&ProgenyLaw::sample, py::const_))
      .def("tail", &ProgenyLaw::tail, py::arg("k"))
      .def("envelope_ok", [](const ProgenyLaw& law, double c, const std::vector<double>& grid) {
        return law.envelope_ok(c, grid);
      });

  py::class_<DisplacementLaw>(m, "DisplacementLaw")
      .def_static("pareto", &DisplacementLaw::pareto, py::arg("beta"))
      .def_static("weibull", &DisplacementLaw::weibull, py::arg("r"), py::arg("c"))
      .def_static("gaussian", &DisplacementLaw::gaussian)
      .def_static("exponential", &DisplacementLaw::exponential, py::arg("rate"))
      .def_property_readonly("heavy_tailed", &DisplacementLaw::heavy_tailed)
      .def_property_readonly("rv_index", &DisplacementLaw::rv_index)
      .def("cdf", &DisplacementLaw::cdf)
      .def("tail", &DisplacementLaw::tail)
      .def("quantile", &DisplacementLaw::quantile)
      .def("quantile_from_tail", &DisplacementLaw::quantile_from_tail)
      .def("hazard", &DisplacementLaw::hazard)
      .def("inverse_hazard", &DisplacementLaw::inverse_hazard)
      .def("sample", py::overload_cast<double>(&DisplacementLaw::sample, py::const_),
           py::arg("u"));

  m.def("sample_positive_stable",
        py::overload_cast<double, double, double>(&sample_positive_stable), py::arg("alpha"),
        py::arg("u1"), py::arg("u2"));

  // population
  py::enum_<population::PathMode>(m, "PathMode")
      .value("exact", population::PathMode::exact)
      .value("surrogate", population::PathMode::surrogate)
      .value("hybrid", population::PathMode::hybrid);

  py::class_<population::PopulationPath>(m, "PopulationPath")
      .def_readonly("log_sizes", &population::PopulationPath::log_sizes)
      .def_readonly("mode", &population::PopulationPath::mode)
      .def_readonly("alpha", &population::PopulationPath::alpha)
      .def_readonly("truncated", &population::PopulationPath::truncated)
      .def_readonly("switch_generation", &population::PopulationPath::switch_generation);

  py::class_<population::WEstimate>(m, "WEstimate")
      .def_readonly("value", &population::WEstimate::value)
      .def_readonly("generation", &population::WEstimate::generation)
      .def_readonly("increments", &population::WEstimate::increments);

  m.def("simulate_exact_sizes",
        [](const ProgenyLaw& law, int n_max, double cap, RngStream& rng) {
          return population::simulate_exact_sizes(law, n_max, cap, rng);
        },
        py::arg("law"), py::arg("n_max"), py::arg("cap"), py::arg("rng"));
  m.def("simulate_surrogate_sizes",
        [](const ProgenyLaw& law, int n_max, double switch_log_size, RngStream& rng,
           double calibration) {
          return population::simulate_surrogate_sizes(law, n_max, switch_log_size, rng,
                                                      calibration);
        },
        py::arg("law"), py::arg("n_max"), py::arg("switch_log_size"), py::arg("rng"),
        py::arg("calibration") = 1.0);
  m.def("fit_stable_calibration",
        [](const ProgenyLaw& law, RngStream& rng, int n_sums, std::uint64_t sum_size) {
          return population::fit_stable_calibration(law, rng, n_sums, sum_size);
        },
        py::arg("law"), py::arg("rng"), py::arg("n_sums") = 400, py::arg("sum_size") = 20000);
  m.def("estimate_w", &population::estimate_w);
  m.def("mass_concentration_stat", &population::mass_concentration_stat, py::arg("path"),
        py::arg("s"));
  m.def("heavy_sum_log_ratio",
        [](const ProgenyLaw& law, std::uint64_t n, RngStream& rng) {
          return population::heavy_sum_log_ratio(law, n, rng);
        },
        py::arg("law"), py::arg("n"), py::arg("rng"));

  // brw
  py::class_<brw::ExtremeRecord>(m, "ExtremeRecord")
      .def_readonly("generation", &brw::ExtremeRecord::generation)
      .def_readonly("top_k", &brw::ExtremeRecord::top_k)
      .def_readonly("z_n", &brw::ExtremeRecord::z_n)
      .def_readonly("c_n", &brw::ExtremeRecord::c_n)
      .def_readonly("l_log_zn", &brw::ExtremeRecord::l_log_zn)
      .def_readonly("truncated", &brw::ExtremeRecord::truncated);

  py::class_<brw::PointSample>(m, "PointSample")
      .def_readonly("thresholds", &brw::PointSample::thresholds)
      .def_readonly("counts", &brw::PointSample::counts);

  py::class_<brw::RunResult>(m, "RunResult")
      .def_readonly("record", &brw::RunResult::record)
      .def_readonly("points", &brw::RunResult::points)
      .def_readonly("path", &brw::RunResult::path)
      .def_readonly("truncated", &brw::RunResult::truncated)
      .def_readonly("last_edge_counts", &brw::RunResult::last_edge_counts);

  m.def("run_brw",
        [](const ProgenyLaw& progeny, const DisplacementLaw& disp, int n, int k,
           const std::vector<double>& thresholds, std::uint64_t cap, RngStream& rng,
           bool track_last_edge) {
          return brw::run_brw(progeny, disp, n, k, thresholds, cap, rng, track_last_edge);
        },
        py::arg("progeny"), py::arg("disp"), py::arg("n"), py::arg("k"),
        py::arg("thresholds") = std::vector<double>{}, py::arg("cap") = 10000000,
        py::arg("rng"), py::arg("track_last_edge") = false);
  m.def("scale_positions", &brw::scale_positions);
  m.def("scaled_max_ratio", &brw::scaled_max_ratio);

  py::enum_<brw::TailRegime>(m, "TailRegime")
      .value("heavy", brw::TailRegime::heavy)
      .value("light", brw::TailRegime::light);
  m.def("cloud_speed_stat", &brw::cloud_speed_stat);

  // theory
  auto th = m.def_submodule("theory");
  th.def("light_tail_constant", &theory::light_tail_constant);
  th.def("f_closed", &theory::f_closed);
  th.def("f_recursive", &theory::f_recursive);
  th.def("f_bruteforce_oracle", &theory::f_bruteforce_oracle, py::arg("alpha"), py::arg("r"),
         py::arg("k"), py::arg("grid_step") = 1e-3);
  th.def("alpha_k_closed", &theory::alpha_k_closed);
  th.def("alpha_k_recursive", &theory::alpha_k_recursive);
  th.def("deterministic_limit_factor", &theory::deterministic_limit_factor);
  th.def("frechet_kth_cdf", &theory::frechet_kth_cdf);
  th.def("cloud_speed_heavy", &theory::cloud_speed_heavy);
  th.def("cloud_speed_light", &theory::cloud_speed_light);
  th.def("regvar_geometric_sum", &theory::regvar_geometric_sum);

  // stats
  auto st = m.def_submodule("stats");
  py::class_<stats::GofReport>(st, "GofReport")
      .def_property_readonly("test",
                             [](const stats::GofReport& g) { return stats::gof_test_name(g.test); })
      .def_readonly("statistic", &stats::GofReport::statistic)
      .def_readonly("n_samples", &stats::GofReport::n_samples)
      .def_readonly("pass_", &stats::GofReport::pass)
      .def_readonly("threshold", &stats::GofReport::threshold)
      .def_readonly("notes", &stats::GofReport::notes);
  py::class_<stats::PoissonGof>(st, "PoissonGof")
      .def_readonly("chisq", &stats::PoissonGof::chisq)
      .def_readonly("mean", &stats::PoissonGof::mean)
      .def("pass_", &stats::PoissonGof::pass);
  py::class_<stats::Interval>(st, "Interval")
      .def_readonly("lo", &stats::Interval::lo)
      .def_readonly("hi", &stats::Interval::hi)
      .def("contains", &stats::Interval::contains);
  st.def("ks_statistic", [](std::vector<double> samples, const std::function<double(double)>& cdf) {
    return stats::ks_statistic(samples, cdf);
  });
  st.def("poisson_gof",
         [](const std::vector<std::int64_t>& counts, double mean, double level) {
           return stats::poisson_gof(counts, mean, level);
         },
         py::arg("counts"), py::arg("mean"), py::arg("level") = 0.01);
  st.def("median_ci", [](const std::vector<double>& samples, double level) {
    return stats::median_ci(samples, level);
  });

  // experiments
  auto exm = m.def_submodule("experiment");
  exm.def("run_kv", [](const std::string& kv) {
    auto cfg = experiment::Config::from_kv(kv);
    const auto rep = experiment::run(cfg);
    return py::make_tuple(experiment::status_name(rep.status), rep.to_json());
  });
  exm.def("experiments", [] {
    std::vector<std::string> names;
    for (auto k : experiment::all_kinds()) names.emplace_back(experiment::kind_name(k));
    return names;
  });
}
