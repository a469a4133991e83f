#include "slicesim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace slicesim {

EmpiricalDistribution::EmpiricalDistribution(std::vector<double> samples)
    : samples_(std::move(samples)) {
  if (samples_.empty())
    throw std::invalid_argument("empirical distribution needs >= 1 sample");
  std::sort(samples_.begin(), samples_.end());
}

double EmpiricalDistribution::cdf(double q) const {
  const auto it = std::upper_bound(samples_.begin(), samples_.end(), q);
  return static_cast<double>(it - samples_.begin()) /
         static_cast<double>(samples_.size());
}

double EmpiricalDistribution::quantile(double p) const {
  if (p <= 0) return samples_.front();
  if (p >= 1) return samples_.back();
  const size_t idx = static_cast<size_t>(
      std::ceil(p * static_cast<double>(samples_.size())) - 1);
  return samples_[std::min(idx, samples_.size() - 1)];
}

QualityHistogram quality_distribution(
    const std::vector<std::vector<int>>& levels_per_vehicle, int num_levels) {
  QualityHistogram h;
  h.level_fraction.assign(static_cast<size_t>(num_levels), 0.0);
  long total = 0, idle = 0;
  std::vector<long> counts(static_cast<size_t>(num_levels), 0);
  for (const auto& history : levels_per_vehicle) {
    for (int lvl : history) {
      ++total;
      if (lvl < 0)
        ++idle;
      else
        ++counts[static_cast<size_t>(lvl)];
    }
  }
  if (total == 0) {
    h.idle_fraction = 1.0;
    return h;
  }
  for (int j = 0; j < num_levels; ++j)
    h.level_fraction[static_cast<size_t>(j)] =
        static_cast<double>(counts[static_cast<size_t>(j)]) / total;
  h.idle_fraction = static_cast<double>(idle) / total;
  return h;
}

Interval bootstrap_median_ci(const std::vector<std::vector<double>>& by_replication,
                             int resamples, Rng& rng) {
  const int reps = static_cast<int>(by_replication.size());
  if (reps == 0) throw std::invalid_argument("bootstrap: no replications");

  std::vector<double> medians;
  medians.reserve(static_cast<size_t>(resamples));
  std::vector<double> pooled;
  for (int r = 0; r < resamples; ++r) {
    pooled.clear();
    for (int i = 0; i < reps; ++i) {
      const auto& rep = by_replication[static_cast<size_t>(rng.uniform_int(reps))];
      pooled.insert(pooled.end(), rep.begin(), rep.end());
    }
    if (pooled.empty()) continue;
    std::nth_element(pooled.begin(), pooled.begin() + pooled.size() / 2,
                     pooled.end());
    medians.push_back(pooled[pooled.size() / 2]);
  }
  if (medians.empty()) throw std::invalid_argument("bootstrap: empty samples");
  std::sort(medians.begin(), medians.end());
  const auto at = [&](double p) {
    const size_t idx = static_cast<size_t>(p * (medians.size() - 1));
    return medians[idx];
  };
  return {at(0.025), at(0.975)};
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

namespace {

void write_curve(const std::string& path, const EmpiricalDistribution& dist,
                 int points, bool complementary) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "value," << (complementary ? "ccdf" : "cdf") << "\n";
  for (int i = 0; i < points; ++i) {
    const double p = static_cast<double>(i) / (points - 1);
    const double v = dist.quantile(p);
    const double c = complementary ? dist.ccdf(v) : dist.cdf(v);
    out << format_double(v) << "," << format_double(c) << "\n";
  }
}

}  // namespace

void write_cdf_csv(const std::string& path, const EmpiricalDistribution& dist,
                   int points) {
  write_curve(path, dist, points, false);
}

void write_ccdf_csv(const std::string& path, const EmpiricalDistribution& dist,
                    int points) {
  write_curve(path, dist, points, true);
}

}  // namespace slicesim
