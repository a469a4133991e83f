#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "slicesim/metrics.hpp"

using namespace slicesim;

TEST_CASE("empirical cdf: step evaluation") {
  EmpiricalDistribution d({1.0, 2.0, 3.0});
  CHECK(d.cdf(2.0) == doctest::Approx(2.0 / 3.0));
  CHECK(d.cdf(0.5) == doctest::Approx(0.0));
  CHECK(d.cdf(3.0) == doctest::Approx(1.0));
  CHECK(d.cdf(99.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(EmpiricalDistribution({}), std::invalid_argument);
}

TEST_CASE("cdf and ccdf are complementary at every query point") {
  Rng rng(5, 6);
  std::vector<double> samples;
  for (int i = 0; i < 500; ++i) samples.push_back(rng.uniform(-3, 7));
  EmpiricalDistribution d(samples);
  for (int i = 0; i < 100; ++i) {
    const double q = rng.uniform(-5, 9);
    CHECK(d.cdf(q) + d.ccdf(q) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("ccdf at the median of uniform samples is about one half") {
  Rng rng(17, 6);
  std::vector<double> samples;
  for (int i = 0; i < 1000; ++i) samples.push_back(rng.uniform01());
  EmpiricalDistribution d(samples);
  CHECK(d.ccdf(d.quantile(0.5)) == doctest::Approx(0.5).epsilon(0.1));
  CHECK(d.quantile(0.5) == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("quantiles hit order statistics") {
  EmpiricalDistribution d({10, 20, 30, 40});
  CHECK(d.quantile(0.0) == 10);
  CHECK(d.quantile(0.25) == 10);
  CHECK(d.quantile(0.5) == 20);
  CHECK(d.quantile(1.0) == 40);
}

TEST_CASE("quality histogram conserves mass") {
  const QualityHistogram h =
      quality_distribution({{0, 1, 2, -1}, {2, 2, -1, -1}}, 3);
  double total = h.idle_fraction;
  for (double f : h.level_fraction) total += f;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(h.level_fraction[2] == doctest::Approx(3.0 / 8.0));
  CHECK(h.idle_fraction == doctest::Approx(3.0 / 8.0));
}

TEST_CASE("an idle vehicle lands fully in the idle bucket") {
  const QualityHistogram h = quality_distribution({{-1, -1, -1}}, 3);
  CHECK(h.idle_fraction == doctest::Approx(1.0));
  for (double f : h.level_fraction) CHECK(f == doctest::Approx(0.0));
}

TEST_CASE("bootstrap interval brackets the median of well-behaved data") {
  Rng rng(9, 6);
  std::vector<std::vector<double>> reps;
  for (int r = 0; r < 5; ++r) {
    std::vector<double> rep;
    for (int i = 0; i < 400; ++i) rep.push_back(5.0 + rng.uniform(-1, 1));
    reps.push_back(std::move(rep));
  }
  const Interval ci = bootstrap_median_ci(reps, 1000, rng);
  CHECK(ci.lo <= 5.0);
  CHECK(ci.hi >= 5.0);
  CHECK(ci.hi - ci.lo < 0.5);

  const Interval far{10, 11};
  CHECK(!ci.overlaps(far));
  CHECK(ci.overlaps({4.9, 5.1}));
}

TEST_CASE("curve files round-trip the distribution through %.17g") {
  Rng rng(3, 6);
  std::vector<double> samples;
  for (int i = 0; i < 257; ++i) samples.push_back(rng.uniform(-2, 2));
  EmpiricalDistribution d(samples);

  const std::string path = "metrics_cdf_roundtrip.csv";
  write_cdf_csv(path, d, 101);

  std::ifstream in(path);
  REQUIRE(in.good());
  std::string header;
  std::getline(in, header);
  CHECK(header == "value,cdf");
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    const size_t comma = line.find(',');
    REQUIRE(comma != std::string::npos);
    const double value = std::strtod(line.substr(0, comma).c_str(), nullptr);
    const double prob = std::strtod(line.substr(comma + 1).c_str(), nullptr);
    CHECK(prob == d.cdf(value));  // bit-exact after the round-trip
    ++rows;
  }
  CHECK(rows == 101);
  std::remove(path.c_str());
}

TEST_CASE("format_double round-trips doubles exactly") {
  Rng rng(11, 6);
  for (int i = 0; i < 1000; ++i) {
    const double x = rng.uniform(-1e9, 1e9) * std::pow(10, rng.uniform_int(18) - 9);
    const double back = std::strtod(format_double(x).c_str(), nullptr);
    CHECK(back == x);
  }
}
