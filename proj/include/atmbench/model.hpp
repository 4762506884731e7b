// System-under-test and traffic descriptions consumed by the simulator.
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "atmbench/aal.hpp"
#include "atmbench/ticks.hpp"

namespace atmbench {

// One switch. Ports are numbered 0..n_ports-1; module_of assigns each port to
// a switching module sharing one fabric (single-module switches use all zeros).
struct SwitchModel {
  int n_ports = 0;
  std::vector<LinkRate> port_rate;     // per-port line rate, one entry per port
  std::vector<int> module_of;          // per-port module id
  std::vector<int> fabric_of_module;   // per-module fabric id; report annotation
  Tick cell_latency = 0;               // fabric transit per cell, last bit in to eligible
  std::int64_t buffer_cells = 0;       // output buffer capacity per port, in cells
  std::vector<bool> loopback;          // per-port: cells leaving re-enter the same port

  void validate() const;
};

// External measurement device on one port pair of a switch.
struct MonitorModel {
  Tick overhead = 0;     // fixed per-cell instrumentation delay added on each pass
  Tick propagation = 0;  // one-way cable delay between monitor and switch
};

// Directed cable between two switch ports in a multi-switch network.
struct InterSwitchLink {
  int from_switch = 0;
  int from_port = 0;
  int to_switch = 0;
  int to_port = 0;
  Tick propagation = 0;
};

struct NetworkModel {
  std::vector<SwitchModel> switches;
  std::vector<InterSwitchLink> links;
  MonitorModel monitor;

  void validate() const;
};

// One unidirectional cell stream offered to a VC.
struct TrafficSpec {
  int vc_id = 0;
  ServiceClass service = ServiceClass::Ubr;
  std::int64_t payload_octets = 0;  // frame payload handed to the adaptation layer
  double effective_bps = 0;         // offered payload rate; spacing derives from it
  Tick start_tick = 0;
  std::int64_t frame_count = 0;     // 0: run until duration expires
  Tick duration = 0;                // 0: run until frame_count reached
  std::int64_t intercell_gap_cells = 0;  // extra idle cell slots between a frame's cells
  std::int64_t burst_frames = 0;    // >0: emit this many frames back to back at the
                                    // peak cell rate for effective_bps, then stop
};

}  // namespace atmbench
