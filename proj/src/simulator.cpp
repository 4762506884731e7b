#include "atmbench/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>

#include "atmbench/aal.hpp"

namespace atmbench {

namespace {

bool port_is_loopback(const SwitchModel& sw, int port) {
  return !sw.loopback.empty() && sw.loopback[static_cast<std::size_t>(port)];
}

// One cell on the entry wire, before fan-out to multicast branches.
struct PhysCell {
  int traffic_idx = 0;
  int vc_id = 0;
  std::int64_t frame_id = 0;
  std::int64_t seq = 0;
  bool is_first = false;
  bool is_last = false;
  std::int64_t frame_payload = 0;
  Tick nominal_first = 0;
  Tick entry_first = 0;  // after input-wire serialization
  ServiceClass svc = ServiceClass::Ubr;
};

struct Flight {
  int route = 0;
  int hop = 0;
  ServiceClass svc = ServiceClass::Ubr;
};

// Queue key: TxDone events carry vc=-1 so at equal time on one port the
// transmitter frees its slot before any arriving cell is considered.
struct Event {
  Tick time = 0;
  int sw = 0;
  int port = 0;
  int vc = -1;
  std::int64_t frame = -1;
  std::int64_t seq = -1;
  int flight = -1;  // -1: TxDone
};

struct EventAfter {
  bool operator()(const Event& a, const Event& b) const {
    return std::tie(a.time, a.sw, a.port, a.vc, a.frame, a.seq) >
           std::tie(b.time, b.sw, b.port, b.vc, b.frame, b.seq);
  }
};

struct PortState {
  bool busy = false;
  int tx_flight = -1;
  std::deque<int> q_cbr;
  std::deque<int> q_other;
};

Tick round_stride(long double picos) {
  const long long v = llroundl(picos);
  if (v <= 0) throw std::invalid_argument("traffic: rate too high for the tick resolution");
  return static_cast<Tick>(v);
}

std::vector<PhysCell> generate_cells(const TrafficSpec& t, int traffic_idx, Tick horizon,
                                     const LinkRate& in_rate) {
  std::vector<PhysCell> out;
  if (t.start_tick < 0) throw std::invalid_argument("traffic: start_tick must be non-negative");
  if (t.frame_count < 0 || t.duration < 0 || t.intercell_gap_cells < 0 || t.burst_frames < 0)
    throw std::invalid_argument("traffic: negative bound");

  if (t.service == ServiceClass::Cbr) {
    // Contiguous cell stream, no frame boundaries; frame_count caps cells.
    if (t.effective_bps <= 0) throw std::invalid_argument("traffic: CBR needs a positive rate");
    const Tick stride =
        round_stride(static_cast<long double>(kCellPayloadOctets * 8) * 1.0e12L /
                     static_cast<long double>(t.effective_bps));
    Tick end = horizon;
    if (t.duration > 0) end = std::min(end, t.start_tick + t.duration);
    for (std::int64_t k = 0;; ++k) {
      if (t.frame_count > 0 && k >= t.frame_count) break;
      const Tick first = t.start_tick + k * stride;
      if (first >= end) break;
      PhysCell c;
      c.traffic_idx = traffic_idx;
      c.vc_id = t.vc_id;
      c.frame_id = -1;
      c.seq = k;
      c.nominal_first = first;
      c.svc = ServiceClass::Cbr;
      out.push_back(c);
    }
    return out;
  }

  if (t.payload_octets <= 0) throw std::invalid_argument("traffic: frame payload must be positive");
  const std::int64_t cpf = cells_per_frame(t.payload_octets);
  const long double payload_bits = static_cast<long double>(t.payload_octets) * 8.0L;

  Tick cell_stride = 0;
  Tick frame_stride = 0;
  std::int64_t frame_cap = t.frame_count;
  if (t.burst_frames > 0) {
    // The whole burst is cells evenly spaced at the cell rate matching
    // effective_bps; frames are contiguous.
    if (t.effective_bps <= 0) throw std::invalid_argument("traffic: burst needs a positive rate");
    cell_stride = round_stride(payload_bits * 1.0e12L /
                               (static_cast<long double>(t.effective_bps) *
                                static_cast<long double>(cpf)));
    frame_stride = cell_stride * cpf;
    frame_cap = frame_cap > 0 ? std::min(frame_cap, t.burst_frames) : t.burst_frames;
  } else {
    // Frames equally spaced at the effective rate; within a frame, cells go
    // at line rate with optional idle slots between them.
    cell_stride = in_rate.cell_time * (1 + t.intercell_gap_cells);
    const bool multi = frame_cap != 1;
    if (multi || t.effective_bps > 0) {
      if (t.effective_bps <= 0)
        throw std::invalid_argument("traffic: frame stream needs a positive rate");
      frame_stride =
          round_stride(payload_bits * 1.0e12L / static_cast<long double>(t.effective_bps));
    }
  }

  for (std::int64_t k = 0;; ++k) {
    if (frame_cap > 0 && k >= frame_cap) break;
    const Tick fstart = t.start_tick + k * frame_stride;
    if (t.duration > 0 && fstart >= t.start_tick + t.duration) break;
    if (fstart >= horizon) break;
    for (std::int64_t c = 0; c < cpf; ++c) {
      PhysCell pc;
      pc.traffic_idx = traffic_idx;
      pc.vc_id = t.vc_id;
      pc.frame_id = k;
      pc.seq = c;
      pc.is_first = c == 0;
      pc.is_last = c == cpf - 1;
      pc.frame_payload = c == cpf - 1 ? t.payload_octets : 0;
      pc.nominal_first = fstart + c * cell_stride;
      pc.svc = t.service;
      out.push_back(pc);
    }
  }
  return out;
}

// Line bits per second a spec occupies on its entry link.
double line_demand_bps(const TrafficSpec& t) {
  if (t.service == ServiceClass::Cbr)
    return t.effective_bps * static_cast<double>(kCellBits) /
           static_cast<double>(kCellPayloadOctets * 8);
  const std::int64_t cpf = cells_per_frame(t.payload_octets);
  return t.effective_bps * static_cast<double>(kCellBits * cpf) /
         static_cast<double>(t.payload_octets * 8);
}

}  // namespace

std::vector<Route> resolve_routes(const NetworkModel& network, const ConnectionConfig& config) {
  network.validate();
  if (network.switches.empty()) throw std::invalid_argument("routes: no switch");
  const SwitchModel& sw = network.switches.front();
  if (config.n_ports > sw.n_ports)
    throw std::invalid_argument("routes: configuration needs more ports than the switch has");

  auto check_port = [&](int p) {
    if (p < 0 || p >= sw.n_ports) throw std::invalid_argument("routes: port out of range");
  };

  std::map<int, const VC*> by_id;
  for (const VC& vc : config.vcs) {
    check_port(vc.input_port);
    if (vc.output_ports.empty()) throw std::invalid_argument("routes: VC with no output port");
    for (int p : vc.output_ports) {
      check_port(p);
      if (p == vc.input_port)
        throw std::invalid_argument("routes: VC output port equals its input port");
    }
    if (!by_id.emplace(vc.vc_id, &vc).second)
      throw std::invalid_argument("routes: duplicate vc_id");
  }

  std::vector<Route> routes;
  std::set<int> chained;
  for (const std::vector<int>& chain : config.chains) {
    if (chain.empty()) throw std::invalid_argument("routes: empty chain");
    Route r;
    r.vc_id = chain.front();
    for (std::size_t i = 0; i < chain.size(); ++i) {
      auto it = by_id.find(chain[i]);
      if (it == by_id.end()) throw std::invalid_argument("routes: chain references unknown VC");
      const VC& vc = *it->second;
      if (vc.output_ports.size() != 1)
        throw std::invalid_argument("routes: chained VC must be unicast");
      if (!chained.insert(vc.vc_id).second)
        throw std::invalid_argument("routes: VC appears in two chains");
      if (i > 0) {
        const Hop& prev = r.hops.back();
        if (prev.out_port != vc.input_port)
          throw std::invalid_argument("routes: chain not continuous at VC " +
                                      std::to_string(vc.vc_id));
        if (!port_is_loopback(sw, prev.out_port))
          throw std::invalid_argument("routes: chain crosses a non-loopback port");
      }
      r.hops.push_back({0, vc.input_port, vc.output_ports[0]});
    }
    routes.push_back(std::move(r));
  }
  for (const VC& vc : config.vcs) {
    if (chained.count(vc.vc_id)) continue;
    for (std::size_t b = 0; b < vc.output_ports.size(); ++b) {
      Route r;
      r.vc_id = vc.vc_id;
      r.branch = static_cast<int>(b);
      r.hops.push_back({0, vc.input_port, vc.output_ports[b]});
      routes.push_back(std::move(r));
    }
  }
  return routes;
}

Trace simulate_routes(const NetworkModel& network, const std::vector<Route>& routes,
                      const std::vector<TrafficSpec>& traffic, const SimOptions& options) {
  network.validate();
  if (options.horizon <= 0) throw std::invalid_argument("simulate: horizon must be positive");
  if (routes.empty()) throw std::invalid_argument("simulate: no routes");

  // Outgoing inter-switch link per (switch, port); at most one for determinism.
  std::map<std::pair<int, int>, const InterSwitchLink*> link_out;
  for (const InterSwitchLink& l : network.links) {
    if (!link_out.emplace(std::make_pair(l.from_switch, l.from_port), &l).second)
      throw std::invalid_argument("simulate: two links leave one port");
  }

  std::set<std::pair<int, int>> flow_ids;
  for (const Route& r : routes) {
    if (r.hops.empty()) throw std::invalid_argument("simulate: route with no hops");
    if (!flow_ids.emplace(r.vc_id, r.branch).second)
      throw std::invalid_argument("simulate: duplicate (vc, branch) route");
    for (const Hop& h : r.hops) {
      if (h.sw < 0 || h.sw >= static_cast<int>(network.switches.size()))
        throw std::invalid_argument("simulate: route references unknown switch");
      const SwitchModel& sw = network.switches[h.sw];
      if (h.in_port < 0 || h.in_port >= sw.n_ports || h.out_port < 0 || h.out_port >= sw.n_ports)
        throw std::invalid_argument("simulate: route references unknown port");
    }
    for (std::size_t i = 0; i + 1 < r.hops.size(); ++i) {
      const Hop& a = r.hops[i];
      const Hop& b = r.hops[i + 1];
      if (a.sw == b.sw) {
        if (a.out_port != b.in_port || !port_is_loopback(network.switches[a.sw], a.out_port))
          throw std::invalid_argument("simulate: consecutive hops need a loopback port");
      } else {
        auto it = link_out.find({a.sw, a.out_port});
        if (it == link_out.end() || it->second->to_switch != b.sw ||
            it->second->to_port != b.in_port)
          throw std::invalid_argument("simulate: consecutive hops need an inter-switch link");
      }
    }
  }

  // Routes per vc, plus each vc's single entry point.
  std::map<int, std::vector<int>> routes_of_vc;
  for (std::size_t i = 0; i < routes.size(); ++i) {
    const Route& r = routes[i];
    routes_of_vc[r.vc_id].push_back(static_cast<int>(i));
    const Hop& h0 = routes[routes_of_vc[r.vc_id].front()].hops.front();
    if (r.hops.front().sw != h0.sw || r.hops.front().in_port != h0.in_port)
      throw std::invalid_argument("simulate: branches of one VC must share the entry port");
  }

  std::set<int> traffic_vcs;
  for (const TrafficSpec& t : traffic) {
    if (!routes_of_vc.count(t.vc_id))
      throw std::invalid_argument("simulate: traffic for unknown VC " + std::to_string(t.vc_id));
    if (!traffic_vcs.insert(t.vc_id).second)
      throw std::invalid_argument("simulate: two traffic specs for VC " + std::to_string(t.vc_id));
  }

  // Offered line rate may not exceed any entry link's capacity.
  std::map<std::pair<int, int>, double> entry_demand;
  for (const TrafficSpec& t : traffic) {
    const Hop& h0 = routes[routes_of_vc[t.vc_id].front()].hops.front();
    entry_demand[{h0.sw, h0.in_port}] += line_demand_bps(t);
  }
  for (const auto& [port, demand] : entry_demand) {
    const double cap = static_cast<double>(network.switches[port.first].port_rate[port.second].bits_per_second);
    if (demand > cap * (1.0 + 1e-9))
      throw std::invalid_argument("simulate: offered rate exceeds the input link on switch " +
                                  std::to_string(port.first) + " port " +
                                  std::to_string(port.second));
  }

  // Source cells, then input-wire serialization per entry port.
  std::vector<PhysCell> cells;
  std::map<std::pair<int, int>, std::vector<std::size_t>> cells_by_port;
  for (std::size_t ti = 0; ti < traffic.size(); ++ti) {
    const TrafficSpec& t = traffic[ti];
    const Hop& h0 = routes[routes_of_vc[t.vc_id].front()].hops.front();
    const LinkRate& in_rate = network.switches[h0.sw].port_rate[h0.in_port];
    std::vector<PhysCell> part = generate_cells(t, static_cast<int>(ti), options.horizon, in_rate);
    for (PhysCell& c : part) {
      cells_by_port[{h0.sw, h0.in_port}].push_back(cells.size());
      cells.push_back(c);
    }
  }
  for (auto& [port, idxs] : cells_by_port) {
    std::sort(idxs.begin(), idxs.end(), [&](std::size_t a, std::size_t b) {
      const PhysCell& ca = cells[a];
      const PhysCell& cb = cells[b];
      return std::tie(ca.nominal_first, ca.vc_id, ca.frame_id, ca.seq) <
             std::tie(cb.nominal_first, cb.vc_id, cb.frame_id, cb.seq);
    });
    const Tick ct = network.switches[port.first].port_rate[port.second].cell_time;
    Tick wire_free = std::numeric_limits<Tick>::min();
    for (std::size_t i : idxs) {
      cells[i].entry_first = std::max(cells[i].nominal_first, wire_free);
      wire_free = cells[i].entry_first + ct;
    }
  }

  // Fan out to one flight (and one record) per route branch.
  Trace trace;
  trace.horizon = options.horizon;
  std::vector<Flight> flights;
  std::priority_queue<Event, std::vector<Event>, EventAfter> pq;
  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    const PhysCell& c = cells[ci];
    for (int ri : routes_of_vc[c.vc_id]) {
      const Route& r = routes[ri];
      const Hop& h0 = r.hops.front();
      const SwitchModel& sw = network.switches[h0.sw];
      const Tick entry_last = c.entry_first + sw.port_rate[h0.in_port].cell_time;

      CellRecord rec;
      rec.vc_id = c.vc_id;
      rec.frame_id = c.frame_id;
      rec.seq_in_frame = c.seq;
      rec.is_first = c.is_first;
      rec.is_last = c.is_last;
      rec.entry_first_bit = c.entry_first;
      rec.entry_last_bit = entry_last;
      rec.in_port = h0.in_port;
      rec.out_port = r.hops.back().out_port;
      rec.branch = r.branch;
      rec.frame_payload_octets = c.frame_payload;

      const int fl = static_cast<int>(flights.size());
      flights.push_back({ri, 0, c.svc});
      trace.cells.push_back(rec);
      pq.push({entry_last + sw.cell_latency, h0.sw, h0.out_port, c.vc_id, c.frame_id, c.seq, fl});
    }
  }
  trace.injected_cells = static_cast<std::int64_t>(flights.size());

  std::vector<std::vector<PortState>> ports(network.switches.size());
  for (std::size_t s = 0; s < network.switches.size(); ++s)
    ports[s].resize(static_cast<std::size_t>(network.switches[s].n_ports));

  auto start_tx = [&](int sw_id, int port, int flight, Tick now) {
    PortState& ps = ports[sw_id][port];
    ps.busy = true;
    ps.tx_flight = flight;
    const Tick done = now + network.switches[sw_id].port_rate[port].cell_time;
    pq.push({done, sw_id, port, -1, -1, -1, -1});
  };

  while (!pq.empty()) {
    const Event ev = pq.top();
    pq.pop();
    PortState& ps = ports[ev.sw][ev.port];

    if (ev.flight >= 0) {
      // Cell becomes eligible at this output port.
      if (!ps.busy) {
        start_tx(ev.sw, ev.port, ev.flight, ev.time);
      } else if (static_cast<std::int64_t>(ps.q_cbr.size() + ps.q_other.size()) <
                 network.switches[ev.sw].buffer_cells) {
        (flights[ev.flight].svc == ServiceClass::Cbr ? ps.q_cbr : ps.q_other)
            .push_back(ev.flight);
      } else {
        trace.dropped_cells += 1;  // record keeps no exit time
      }
      continue;
    }

    // Transmission complete: route the finished cell onward, then refill.
    const int done_fl = ps.tx_flight;
    ps.busy = false;
    ps.tx_flight = -1;

    Flight& fl = flights[done_fl];
    const Route& route = routes[fl.route];
    if (fl.hop + 1 == static_cast<int>(route.hops.size())) {
      trace.cells[done_fl].exit_last_bit = ev.time;
      trace.delivered_cells += 1;
    } else {
      const Hop& cur = route.hops[fl.hop];
      const Hop& nxt = route.hops[fl.hop + 1];
      fl.hop += 1;
      Tick entry_last = ev.time;
      if (cur.sw != nxt.sw) entry_last += link_out.at({cur.sw, cur.out_port})->propagation;
      const CellRecord& rec = trace.cells[done_fl];
      pq.push({entry_last + network.switches[nxt.sw].cell_latency, nxt.sw, nxt.out_port,
               rec.vc_id, rec.frame_id, rec.seq_in_frame, done_fl});
    }

    if (!ps.q_cbr.empty()) {
      const int next = ps.q_cbr.front();
      ps.q_cbr.pop_front();
      start_tx(ev.sw, ev.port, next, ev.time);
    } else if (!ps.q_other.empty()) {
      const int next = ps.q_other.front();
      ps.q_other.pop_front();
      start_tx(ev.sw, ev.port, next, ev.time);
    }
  }

  std::sort(trace.cells.begin(), trace.cells.end(), [](const CellRecord& a, const CellRecord& b) {
    return std::tie(a.vc_id, a.branch, a.frame_id, a.seq_in_frame) <
           std::tie(b.vc_id, b.branch, b.frame_id, b.seq_in_frame);
  });
  return trace;
}

Trace simulate(const NetworkModel& network, const ConnectionConfig& config,
               const std::vector<TrafficSpec>& traffic, const SimOptions& options) {
  return simulate_routes(network, resolve_routes(network, config), traffic, options);
}

SignalingResult run_signaling_exchange(const NetworkModel& network,
                                       const std::vector<Hop>& forward_path,
                                       const TrafficSpec& setup_spec,
                                       const TrafficSpec& connect_spec, Tick destination_hold) {
  if (forward_path.empty()) throw std::invalid_argument("signaling: empty path");
  if (setup_spec.service != ServiceClass::Signaling ||
      connect_spec.service != ServiceClass::Signaling)
    throw std::invalid_argument("signaling: both messages must use the signaling class");
  if (destination_hold < 0) throw std::invalid_argument("signaling: negative hold");

  TrafficSpec setup = setup_spec;
  setup.frame_count = 1;
  Route fwd{setup.vc_id, 0, forward_path};

  SignalingResult result;
  result.switches_traversed = static_cast<int>(forward_path.size());

  SimOptions opt;
  opt.horizon = setup.start_tick + 1;
  result.setup = simulate_routes(network, {fwd}, {setup}, opt);

  Tick delivered_at = setup.start_tick;
  for (const CellRecord& rec : result.setup.cells)
    if (rec.exit_last_bit) delivered_at = std::max(delivered_at, *rec.exit_last_bit);
  result.setup_delivered_at = delivered_at;

  std::vector<Hop> back;
  for (auto it = forward_path.rbegin(); it != forward_path.rend(); ++it)
    back.push_back({it->sw, it->out_port, it->in_port});
  TrafficSpec connect = connect_spec;
  connect.frame_count = 1;
  connect.start_tick = delivered_at + destination_hold;
  Route rev{connect.vc_id, 0, back};

  SimOptions opt2;
  opt2.horizon = connect.start_tick + 1;
  result.connect = simulate_routes(network, {rev}, {connect}, opt2);
  return result;
}

Tick closed_loop_measured_ctd(const MonitorModel& monitor, const LinkRate& rate) {
  return rate.cell_time + monitor.propagation + monitor.overhead;
}

Tick calibrate_monitor_overhead(const MonitorModel& monitor) {
  const LinkRate reference(155'520'000);
  const Tick measured = closed_loop_measured_ctd(monitor, reference);
  return measured - (reference.cell_time + monitor.propagation);
}

}  // namespace atmbench
