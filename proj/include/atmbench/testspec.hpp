// Test specification file: what to measure, on which system, how hard.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "atmbench/model.hpp"
#include "atmbench/topology.hpp"

namespace atmbench {

// System under test as declared in the spec file's system block.
struct SystemSpec {
  int ports = 8;
  std::vector<std::int64_t> rate_bps{155'520'000};  // one entry: uniform rate
  std::vector<int> modules;                         // empty: all ports in module 0
  std::vector<int> fabrics;                         // per module; empty: all fabric 0
  std::int64_t cell_latency_ns = 10;
  std::int64_t buffer_cells = 128;
  std::int64_t monitor_overhead_ns = 0;
  std::int64_t monitor_propagation_ns = 0;
};

// Bound on an aggregate value; violations set exit code 3.
struct ExpectRule {
  std::string key;
  bool is_min = true;
  double value = 0;
};

struct TestSpec {
  SystemSpec system;
  std::vector<std::string> metrics;          // throughput fairness flr latency mfbs call_setup goodput
  std::vector<ConfigKind> configs{ConfigKind::Straight};
  int config_m = 2;
  int config_k = 2;
  int config_out_port = 0;
  bool use_loopback = false;  // emulate the cross VCs with one chained stream

  std::vector<std::int64_t> frame_sizes{64, 1518, 9188, 65536};
  std::vector<double> load_ladder{0.25, 0.5, 0.75, 1.0};
  std::int64_t repetitions = 1;
  std::int64_t p = 1000;  // latency sample count per rung
  double alpha = 0.1;
  std::uint64_t seed = 0;
  double warmup_fraction = 0.1;
  std::int64_t duration_ns = 1'000'000;  // throughput measurement window
  bool stagger = true;                   // deterministic per-VC phase offsets from the seed

  double epsilon = 0.001;  // lossless bisection resolution, fraction of full load
  int sweep_points = 21;
  int refine_iters = 12;

  double latency_ladder_start = 0.015625;  // 1/64 of full foreground load
  double ladder_factor = 2.0;
  std::string background_kind = "straight";  // or none
  double background_fraction = 0.5;          // of the maximum lossless background rate
  std::string background_service = "cbr";    // cbr | ubr

  std::int64_t mfbs_ceiling = 4096;  // frames
  double mfbs_background_fraction = 0.5;
  double mfbs_peak_fraction = 1.0;

  int call_switches = 1;
  std::int64_t signaling_payload_octets = 480;
  std::int64_t signaling_gap_cells = 0;
  std::int64_t destination_hold_ns = 0;
  int pnni_hierarchies = 1;  // report annotation only

  std::vector<double> goodput_fps;  // optional frames/sec ladder for goodput

  std::string output_basename = "report";
  bool emit_trace = false;
  std::vector<ExpectRule> expects;

  // Canonical serialization: every field, defaults resolved, fixed order.
  // Reports embed this echo so results are self-describing.
  std::string to_text() const;
};

// Parse errors carry the line number and offending field.
struct SpecError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

TestSpec parse_spec(const std::string& text);
TestSpec load_spec_file(const std::string& path);

// One-switch network realizing the system block.
NetworkModel make_network(const SystemSpec& sys);

}  // namespace atmbench
