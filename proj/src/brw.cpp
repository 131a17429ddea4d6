#include "brwx/brw.hpp"

namespace brwx::brw {

std::vector<double> scale_positions(const ExtremeRecord& rec, const DisplacementLaw& disp) {
  if (rec.z_n < 2) throw std::domain_error("scale_positions: scaling undefined for z_n < 2");
  const double z = static_cast<double>(rec.z_n);
  const double c = disp.quantile_from_tail(1.0 / z);
  std::vector<double> scaled(rec.top_k.size());
  for (std::size_t i = 0; i < scaled.size(); ++i) scaled[i] = rec.top_k[i] / c;
  return scaled;
}

double scaled_max_ratio(const ExtremeRecord& rec, const DisplacementLaw& disp) {
  if (rec.z_n < 2) throw std::domain_error("scaled_max_ratio: undefined for z_n < 2");
  if (rec.top_k.empty()) throw std::domain_error("scaled_max_ratio: empty record");
  return rec.top_k.front() / disp.inverse_hazard(std::log(static_cast<double>(rec.z_n)));
}

double cloud_speed_stat(const ExtremeRecord& rec, TailRegime regime) {
  if (rec.top_k.empty()) throw std::domain_error("cloud_speed_stat: empty record");
  if (rec.generation < 1) throw std::domain_error("cloud_speed_stat: generation must be >= 1");
  const double m = rec.top_k.front();
  auto log_plus = [](double x) { return x > 1.0 ? std::log(x) : 0.0; };
  const double v = (regime == TailRegime::heavy) ? log_plus(log_plus(m)) : log_plus(m);
  return v / rec.generation;
}

}  // namespace brwx::brw
