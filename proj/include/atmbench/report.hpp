// Report rows, aggregates, and the three serializations (human, csv, records).
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "atmbench/testspec.hpp"

namespace atmbench {

// One measured run. Every aggregate in a report can be recomputed from these
// rows alone, which is what the derive subcommand does.
struct RunRow {
  std::int64_t run_id = 0;
  std::string metric;      // throughput latency mfbs call_setup goodput
  std::string phase;       // ladder bisect confirm sweep refine full_load rung mfbs_probe setup connect
  std::string config;      // configuration name, or a descriptor like k_to_1/k=4
  std::int64_t frame_size = 0;
  std::int64_t repetition = 0;
  double load_fraction = 0;      // offered fraction of full load (or of peak for mfbs)
  double offered_bps = 0;        // aggregate effective offered rate
  double delivered_bps = 0;      // aggregate effective delivered rate in the window
  std::int64_t frames_in = 0;    // frames offered in the window
  std::int64_t frames_out = 0;   // frames delivered intact from the window
  double flr = 0;                // per-run frame loss ratio
  double fairness = 0;           // throughput fairness index (NaN when n/a)
  std::int64_t burst_frames = 0; // mfbs probes: burst length under test
  std::int64_t lat_p = 0;        // latency sample count
  std::int64_t lat_lost = 0;     // lost frames inside the latency window
  bool lat_unbounded = false;
  double lat_mean_ns = 0;
  double lat_stddev_ns = 0;
  double lat_stderr_ns = 0;
  double lat_ci_low_ns = 0;
  double lat_ci_high_ns = 0;
  double lat_z = 0;
  double value = 0;  // metric-specific scalar (mimo ns, goodput ratio, ...)
};

// One derived aggregate. load_fraction 0 means not applicable.
struct AggRow {
  std::string metric;
  std::string config;
  std::int64_t frame_size = 0;  // 0 when not applicable
  double load_fraction = 0;
  std::string key;
  double value = 0;
};

struct MetricReport {
  TestSpec spec;
  std::vector<RunRow> runs;
  std::vector<AggRow> aggregates;
};

// Machine formats print doubles with %.17g so parsing back is exact.
std::string format_g17(double v);

std::string emit_human(const MetricReport& report);
std::string emit_csv(const MetricReport& report);
std::string emit_records(const MetricReport& report);

// Inverse of emit_records, including the embedded spec echo.
MetricReport parse_records(const std::string& text);

}  // namespace atmbench
