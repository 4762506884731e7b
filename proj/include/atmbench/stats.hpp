// Sample statistics and normal-quantile confidence intervals for latency runs.
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "atmbench/ticks.hpp"

namespace atmbench {

// Quantile of the unit normal distribution, p in (0,1).
double inverse_normal_cdf(double p);

// A lost frame has unbounded latency, so one lost frame in the window makes
// the whole window's mean unbounded; the numeric fields are then +inf.
struct LatencyStats {
  std::int64_t p = 0;  // sample count, lost frames included
  bool unbounded = false;
  double mean = 0;
  double stddev = 0;
  double std_error = 0;  // stddev / sqrt(p)
  double ci_low = 0;
  double ci_high = 0;
  std::int64_t lost_in_window = 0;
  double alpha = 0;
  double z = 0;  // (1 - alpha/2) unit-normal quantile
};

// latencies holds p consecutive foreground frame latencies in ticks; nullopt
// marks a lost frame. Sample standard deviation divides by p-1.
LatencyStats latency_stats(const std::vector<std::optional<Tick>>& latencies, double alpha);

}  // namespace atmbench
