// Connection configurations, loopback chaining, background placement and
// max-min fair allocations.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "atmbench/rational.hpp"

namespace atmbench {

enum class ConfigKind { Straight, FullCross, PartialCross, KTo1, Multicast };

const char* to_string(ConfigKind k);
ConfigKind config_kind_from_string(const std::string& s);

enum class VcRole { Foreground, Background };

// A virtual connection through one switch traversal: one input port, one or
// more output ports (more than one only for multicast).
struct VC {
  int vc_id = 0;
  int input_port = 0;
  std::vector<int> output_ports;
  VcRole role = VcRole::Foreground;
  bool switched = false;      // SVC when true, PVC otherwise
  bool virtual_path = false;  // VPC when true, VCC otherwise
};

struct ConnectionConfig {
  ConfigKind kind = ConfigKind::Straight;
  int n_ports = 0;
  int m = 0;  // partial-cross fan-out
  int k = 0;  // k-to-1 fan-in
  std::vector<VC> vcs;

  // Loopback emulation: ordered VC chain a frame traverses before returning
  // to the monitor, plus the ports wired back on themselves.
  std::vector<std::vector<int>> chains;
  std::vector<int> loopback_ports;
  int monitor_port = -1;
};

// Deterministic pairings: straight routes i -> (i+1) mod n; partial cross
// routes i -> (i+1 .. i+m) mod n.
ConnectionConfig build_straight(int n);
ConnectionConfig build_full_cross(int n);
ConnectionConfig build_partial_cross(int n, int m);
ConnectionConfig build_k_to_1(int k, int out_port, int n);
ConnectionConfig build_multicast(int n);

// Single generator/analyzer throughput configuration: every port except the
// monitor's is looped back on itself, and one frame stream walks an n*m-hop
// VC chain that visits every emulated partial-cross VC once. module_of maps
// each port to its network module; the chain prefers hops that cross
// modules.
ConnectionConfig build_loopback_throughput(int n_ports, int m, const std::vector<int>& module_of,
                                           int monitor_port = 0);

// Per-link budget for latency runs. Rates are raw line rates; convert to
// effective rates per frame size with link_payload_capacity_bps.
struct LoadBudget {
  double ffl_bps = 0;  // min(foreground input, foreground output) line rate
  double mbl_bps = 0;  // sum of all line rates except the foreground input
};

struct LatencySetup {
  VC foreground;
  ConnectionConfig background;
  LoadBudget budget;
  // Physical ports backing each logical background port (input side may use
  // the foreground output port and vice versa).
  std::vector<int> logical_in_port;
  std::vector<int> logical_out_port;
};

// Two generator/analyzer pairs on a w-port switch: one foreground VC plus a
// background configuration over n = w-1 logical ports. Background VCs never
// use the foreground input link or output link in the same direction.
LatencySetup build_latency_background(const std::vector<std::int64_t>& link_rate_bps,
                                      ConfigKind kind, int m = 0);

// Highest aggregate background input rate that stays lossless: the full MBL
// when all link rates are identical, (n-1) * lowest rate otherwise.
double max_background_lossless_rate(const std::vector<std::int64_t>& link_rate_bps, int n);

// Max-min fair shares under equal weights: progressive filling, shares
// capped at demands, computed exactly.
// vc_links[i] lists the links VC i crosses (indices into capacities).
std::vector<Rational> max_min_allocation(const std::vector<Rational>& demands,
                                         const std::vector<Rational>& capacities,
                                         const std::vector<std::vector<int>>& vc_links);

std::vector<double> max_min_allocation(const std::vector<double>& demands,
                                       const std::vector<double>& capacities,
                                       const std::vector<std::vector<int>>& vc_links);

}  // namespace atmbench
