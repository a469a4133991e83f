#pragma once

#include <string>
#include <vector>

#include "slicesim/model.hpp"
#include "slicesim/rng.hpp"

namespace slicesim {

// Empirical distribution over a sample set; step-interpolated evaluation.
class EmpiricalDistribution {
 public:
  explicit EmpiricalDistribution(std::vector<double> samples);

  double cdf(double q) const;   // P[X <= q]
  double ccdf(double q) const { return 1.0 - cdf(q); }
  double quantile(double p) const;  // inverse CDF, p in [0, 1]
  size_t size() const { return samples_.size(); }
  const std::vector<double>& sorted_samples() const { return samples_; }

 private:
  std::vector<double> samples_;  // ascending
};

struct QualityHistogram {
  std::vector<double> level_fraction;  // per level
  double idle_fraction = 0;            // chunks with nothing fetched
};

// Fractions over (vehicle, chunk) samples; levels of -1 land in the idle
// bucket; fractions sum to 1.
QualityHistogram quality_distribution(
    const std::vector<std::vector<int>>& levels_per_vehicle, int num_levels);

// Percentile bootstrap over replications: resamples whole replications,
// pools them and takes the median; returns the [2.5%, 97.5%] interval.
struct Interval {
  double lo = 0, hi = 0;
  bool overlaps(const Interval& o) const { return lo <= o.hi && o.lo <= hi; }
};
Interval bootstrap_median_ci(const std::vector<std::vector<double>>& by_replication,
                             int resamples, Rng& rng);

// Figure-analogue files: an evaluated distribution curve on an even
// quantile grid (value, cdf) / (value, ccdf).
void write_cdf_csv(const std::string& path, const EmpiricalDistribution& dist,
                   int points = 1001);
void write_ccdf_csv(const std::string& path, const EmpiricalDistribution& dist,
                    int points = 1001);

// Shared CSV formatting: doubles round-trip exactly through %.17g.
std::string format_double(double x);

}  // namespace slicesim
