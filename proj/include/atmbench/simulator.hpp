// Deterministic discrete-event simulation of store-and-forward cell switches
// with finite output buffers and strict class priority.
#pragma once

#include <cstdint>
#include <vector>

#include "atmbench/model.hpp"
#include "atmbench/topology.hpp"
#include "atmbench/trace.hpp"

namespace atmbench {

// One switch traversal: the cell enters in_port, crosses the fabric after
// cell_latency, queues at out_port. Consecutive hops must be joined by a
// loopback port (same switch) or an inter-switch link.
struct Hop {
  int sw = 0;
  int in_port = 0;
  int out_port = 0;
};

// A unicast path for one flow. vc_id names the entry VC (the chain head for
// loopback chains); branch distinguishes multicast leaves of one VC.
struct Route {
  int vc_id = 0;
  int branch = 0;
  std::vector<Hop> hops;
};

struct SimOptions {
  Tick horizon = 0;  // generation stops at this tick; in-flight cells drain fully
};

// Expands a connection configuration on switch 0 into flow routes: one per
// VC branch, one per loopback chain (covering every chained VC in order).
std::vector<Route> resolve_routes(const NetworkModel& network, const ConnectionConfig& config);

// Core engine over explicit routes.
Trace simulate_routes(const NetworkModel& network, const std::vector<Route>& routes,
                      const std::vector<TrafficSpec>& traffic, const SimOptions& options);

// Convenience wrapper: resolve_routes then simulate_routes.
Trace simulate(const NetworkModel& network, const ConnectionConfig& config,
               const std::vector<TrafficSpec>& traffic, const SimOptions& options);

struct SignalingResult {
  Trace setup;
  Trace connect;
  Tick setup_delivered_at = 0;  // last bit of the setup frame at the destination
  int switches_traversed = 0;
};

// Sends the setup frame along forward_path, waits destination_hold at the
// destination, then sends the connect frame back along the reversed path.
// The two messages run in isolation, so the hold shifts the connect trace's
// absolute times only; per-frame latency is unaffected.
SignalingResult run_signaling_exchange(const NetworkModel& network,
                                       const std::vector<Hop>& forward_path,
                                       const TrafficSpec& setup_spec,
                                       const TrafficSpec& connect_spec, Tick destination_hold);

// Closed loop on the monitor: the measured transfer delay of one cell sent
// out and back through the monitor's own ports.
Tick closed_loop_measured_ctd(const MonitorModel& monitor, const LinkRate& rate);

// Measured closed-loop delay minus the theoretical transmit plus propagation
// time. Recovers monitor.overhead exactly; the link rate cancels.
Tick calibrate_monitor_overhead(const MonitorModel& monitor);

}  // namespace atmbench
