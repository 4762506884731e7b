#include "atmbench/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

#include "atmbench/aal.hpp"
#include "atmbench/metrics.hpp"
#include "atmbench/simulator.hpp"

namespace atmbench {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4568bULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic flow phase in [0, interval): repetitions sample different
// cell alignments while everything stays a pure function of the seed.
Tick flow_phase(const TestSpec& spec, std::int64_t rep, int vc_id, Tick interval) {
  if (!spec.stagger || interval <= 1) return 0;
  std::uint64_t h = splitmix64(spec.seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(rep));
  h = splitmix64(h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(vc_id)));
  return static_cast<Tick>(h % static_cast<std::uint64_t>(interval));
}

bool has_metric(const TestSpec& spec, const char* name) {
  return std::find(spec.metrics.begin(), spec.metrics.end(), name) != spec.metrics.end();
}

LinkRate port_rate(const SystemSpec& sys, int p) {
  return LinkRate(sys.rate_bps.size() == 1 ? sys.rate_bps[0]
                                           : sys.rate_bps[static_cast<std::size_t>(p)]);
}

std::string config_label(const TestSpec& spec, ConfigKind kind) {
  std::string s = to_string(kind);
  if (kind == ConfigKind::PartialCross) s += "_m" + std::to_string(spec.config_m);
  if (kind == ConfigKind::KTo1) s += "_k" + std::to_string(spec.config_k);
  if (spec.use_loopback && (kind == ConfigKind::FullCross || kind == ConfigKind::PartialCross))
    s += "_loopback";
  return s;
}

std::vector<int> port_modules(const SystemSpec& sys) {
  if (!sys.modules.empty()) return sys.modules;
  return std::vector<int>(static_cast<std::size_t>(sys.ports), 0);
}

ConnectionConfig build_config(const TestSpec& spec, ConfigKind kind) {
  const int n = spec.system.ports;
  switch (kind) {
    case ConfigKind::Straight:
      return build_straight(n);
    case ConfigKind::FullCross:
      if (spec.use_loopback) return build_loopback_throughput(n, n - 1, port_modules(spec.system));
      return build_full_cross(n);
    case ConfigKind::PartialCross:
      if (spec.use_loopback)
        return build_loopback_throughput(n, spec.config_m, port_modules(spec.system));
      return build_partial_cross(n, spec.config_m);
    case ConfigKind::KTo1:
      return build_k_to_1(spec.config_k, spec.config_out_port, n);
    case ConfigKind::Multicast:
      return build_multicast(n);
  }
  throw std::logic_error("build_config: unhandled configuration kind");
}

NetworkModel config_network(const TestSpec& spec, const ConnectionConfig& config) {
  NetworkModel net = make_network(spec.system);
  if (!config.loopback_ports.empty()) {
    net.switches[0].loopback.assign(static_cast<std::size_t>(spec.system.ports), false);
    for (int p : config.loopback_ports)
      net.switches[0].loopback[static_cast<std::size_t>(p)] = true;
  }
  return net;
}

// One delivered stream of a throughput run: a VC branch, or the single
// chained stream when the configuration is loopback-emulated.
struct FlowPlan {
  int vc_id = 0;
  int branch = 0;
  int in_port = 0;
  int out_port = 0;
  double full_effective_bps = 0;  // offered rate at load fraction 1
};

struct ThroughputPlan {
  ConnectionConfig config;
  std::vector<FlowPlan> flows;
  std::vector<TrafficSpec> sources;  // one per VC (chains: the head VC only)
  bool unicast_only = true;          // fairness is defined on unicast flow sets
};

ThroughputPlan plan_throughput(const TestSpec& spec, ConfigKind kind, std::int64_t size) {
  ThroughputPlan plan;
  plan.config = build_config(spec, kind);

  if (!plan.config.chains.empty()) {
    // Single chained stream; each port output carries it m times, so full
    // load for the stream is a 1/m share of the monitor link.
    const int mon = plan.config.monitor_port;
    const double full =
        link_payload_capacity_bps(port_rate(spec.system, mon), size) / plan.config.m;
    const int head = plan.config.chains[0].front();
    plan.flows.push_back({head, 0, mon, mon, full});
    TrafficSpec t;
    t.vc_id = head;
    t.payload_octets = size;
    plan.sources.push_back(t);
    plan.unicast_only = false;
    return plan;
  }

  std::map<int, int> share;
  for (const VC& vc : plan.config.vcs) share[vc.input_port] += 1;
  for (const VC& vc : plan.config.vcs) {
    const double full =
        link_payload_capacity_bps(port_rate(spec.system, vc.input_port), size) /
        share[vc.input_port];
    if (vc.output_ports.size() > 1) plan.unicast_only = false;
    for (std::size_t b = 0; b < vc.output_ports.size(); ++b)
      plan.flows.push_back({vc.vc_id, static_cast<int>(b), vc.input_port, vc.output_ports[b],
                            full});
    TrafficSpec t;
    t.vc_id = vc.vc_id;
    t.payload_octets = size;
    plan.sources.push_back(t);
  }
  return plan;
}

struct RunOutcome {
  LoadProbe probe;
  double fairness = kNaN;
  Trace trace;
};

RunOutcome run_throughput_once(const TestSpec& spec, const ThroughputPlan& plan,
                               std::int64_t size, double fraction, std::int64_t rep) {
  NetworkModel net = config_network(spec, plan.config);
  const Tick duration = ns_to_ticks(spec.duration_ns);
  const Tick w_start =
      static_cast<Tick>(std::llround(spec.warmup_fraction * static_cast<double>(duration)));
  const Tick w_end = duration;

  std::map<int, double> source_full;
  for (const FlowPlan& f : plan.flows) source_full.emplace(f.vc_id, f.full_effective_bps);

  std::vector<TrafficSpec> traffic = plan.sources;
  for (TrafficSpec& t : traffic) {
    t.effective_bps = fraction * source_full.at(t.vc_id);
    const double interval =
        static_cast<double>(t.payload_octets) * 8.0e12 / t.effective_bps;
    t.start_tick = flow_phase(spec, rep, t.vc_id, static_cast<Tick>(interval));
  }

  SimOptions opt;
  opt.horizon = w_end;
  RunOutcome out;
  out.trace = simulate(net, plan.config, traffic, opt);
  const std::vector<FrameOutcome> frames = collect_frames(out.trace, net.monitor);
  const std::vector<VcWindowStats> ws = window_stats(frames, w_start, w_end);

  for (const FlowPlan& f : plan.flows) out.probe.offered_bps += fraction * f.full_effective_bps;
  std::map<std::pair<int, int>, const VcWindowStats*> by_flow;
  for (const VcWindowStats& s : ws) {
    by_flow[{s.vc_id, s.branch}] = &s;
    out.probe.frames_in += s.frames_in;
    out.probe.frames_out += s.frames_out;
    out.probe.delivered_bps += s.delivered_effective_bps;
  }

  if (plan.flows.size() >= 2 && plan.unicast_only) {
    const int n = spec.system.ports;
    std::vector<double> caps(static_cast<std::size_t>(2 * n));
    for (int p = 0; p < n; ++p) {
      caps[static_cast<std::size_t>(p)] =
          link_payload_capacity_bps(port_rate(spec.system, p), size);
      caps[static_cast<std::size_t>(n + p)] = caps[static_cast<std::size_t>(p)];
    }
    std::vector<double> demands, measured;
    std::vector<std::vector<int>> links;
    for (const FlowPlan& f : plan.flows) {
      demands.push_back(fraction * f.full_effective_bps);
      links.push_back({f.in_port, n + f.out_port});
      const auto it = by_flow.find({f.vc_id, f.branch});
      measured.push_back(it == by_flow.end() ? 0.0 : it->second->delivered_effective_bps);
    }
    out.fairness = fairness_index(measured, max_min_allocation(demands, caps, links));
  }
  return out;
}

RunRow blank_row(const char* metric, std::string config, std::int64_t size, std::string phase,
                 double fraction, std::int64_t rep) {
  RunRow r;
  r.metric = metric;
  r.phase = std::move(phase);
  r.config = std::move(config);
  r.frame_size = size;
  r.repetition = rep;
  r.load_fraction = fraction;
  r.flr = kNaN;
  r.fairness = kNaN;
  r.value = kNaN;
  r.lat_mean_ns = r.lat_stddev_ns = r.lat_stderr_ns = kNaN;
  r.lat_ci_low_ns = r.lat_ci_high_ns = r.lat_z = kNaN;
  return r;
}

void fill_probe(RunRow& r, const LoadProbe& p) {
  r.offered_bps = p.offered_bps;
  r.delivered_bps = p.delivered_bps;
  r.frames_in = p.frames_in;
  r.frames_out = p.frames_out;
  r.flr = p.frames_in > 0 ? frame_loss_ratio(static_cast<double>(p.frames_in),
                                             static_cast<double>(p.frames_out))
                          : kNaN;
  r.value = p.delivered_bps;
}

std::vector<double> make_sweep_grid(int points) {
  if (points == 21) return default_sweep_grid();
  std::vector<double> g;
  for (int i = 0; i < points; ++i)
    g.push_back(0.05 + static_cast<double>(i) * (0.95 / static_cast<double>(points - 1)));
  g.back() = 1.0;
  return g;
}

double capacity_share_bps(double line_bps, std::int64_t payload_octets) {
  return line_bps * (static_cast<double>(payload_octets) * 8.0) /
         (static_cast<double>(kCellBits) * static_cast<double>(cells_per_frame(payload_octets)));
}

// Latency environment: one foreground VC and, unless disabled, a background
// configuration on the remaining ports driven at a lossless aggregate rate.
struct LatencyPlan {
  std::vector<Route> routes;
  std::vector<TrafficSpec> background;  // rates resolved, phases not yet
  LinkRate in_rate;
  LinkRate out_rate;
  double ffl_eff_bps = 0;  // foreground full load at this frame size
  std::string label;
};

LatencyPlan plan_latency(const TestSpec& spec, std::int64_t size) {
  const SystemSpec& sys = spec.system;
  const int w = sys.ports;
  std::vector<std::int64_t> rates;
  for (int p = 0; p < w; ++p) rates.push_back(port_rate(sys, p).bits_per_second);

  LatencyPlan plan;
  plan.in_rate = port_rate(sys, 0);
  plan.out_rate = port_rate(sys, w - 1);
  plan.ffl_eff_bps = capacity_share_bps(
      static_cast<double>(std::min(rates.front(), rates.back())), size);
  plan.routes.push_back({0, 0, {{0, 0, w - 1}}});

  const bool want_bg =
      spec.background_kind != "none" && spec.background_fraction > 0.0 && w >= 3;
  if (!want_bg) {
    plan.label = "isolated";
    return plan;
  }
  plan.label = "bg_" + spec.background_kind;

  const ConfigKind kind = config_kind_from_string(spec.background_kind);
  const LatencySetup setup = build_latency_background(rates, kind, spec.config_m);

  double aggregate_line = 0;
  if (kind == ConfigKind::Multicast) {
    // One stream copied to every leaf: bounded by its input link and the
    // slowest output link, not by the background-link sum.
    const VC& vc = setup.background.vcs.front();
    std::int64_t lim = rates[static_cast<std::size_t>(vc.input_port)];
    for (int o : vc.output_ports) lim = std::min(lim, rates[static_cast<std::size_t>(o)]);
    aggregate_line = spec.background_fraction * static_cast<double>(lim);
  } else {
    std::vector<std::int64_t> bg_rates;
    for (int p : setup.logical_in_port) bg_rates.push_back(rates[static_cast<std::size_t>(p)]);
    aggregate_line =
        spec.background_fraction * max_background_lossless_rate(bg_rates, w - 1);
  }
  const double per_vc_line = aggregate_line / static_cast<double>(setup.background.vcs.size());

  for (const VC& vc : setup.background.vcs) {
    for (std::size_t b = 0; b < vc.output_ports.size(); ++b)
      plan.routes.push_back({vc.vc_id, static_cast<int>(b), {{0, vc.input_port,
                                                              vc.output_ports[b]}}});
    TrafficSpec t;
    t.vc_id = vc.vc_id;
    if (spec.background_service == "cbr") {
      t.service = ServiceClass::Cbr;
      t.payload_octets = kCellPayloadOctets;
      t.effective_bps = per_vc_line * (static_cast<double>(kCellPayloadOctets) * 8.0) /
                        static_cast<double>(kCellBits);
    } else {
      t.service = ServiceClass::Ubr;
      t.payload_octets = size;
      t.effective_bps = capacity_share_bps(per_vc_line, size);
    }
    plan.background.push_back(t);
  }
  return plan;
}

struct LatencyOutcome {
  LatencyStats stats;
  double offered_bps = 0;
  Trace trace;
};

LatencyOutcome run_latency_once(const TestSpec& spec, const LatencyPlan& plan, std::int64_t size,
                                double fraction, std::int64_t rep) {
  NetworkModel net = make_network(spec.system);

  const double eff = fraction * plan.ffl_eff_bps;
  const Tick interval =
      static_cast<Tick>(std::llround(static_cast<double>(size) * 8.0e12 / eff));
  const std::int64_t skip =
      static_cast<std::int64_t>(std::ceil(spec.warmup_fraction * static_cast<double>(spec.p)));
  const std::int64_t total = skip + spec.p;

  TrafficSpec fg;
  fg.vc_id = 0;
  fg.payload_octets = size;
  fg.effective_bps = eff;
  fg.frame_count = total;
  fg.start_tick =
      static_cast<Tick>(std::llround(spec.warmup_fraction * static_cast<double>(spec.p) *
                                     static_cast<double>(interval))) +
      flow_phase(spec, rep, 0, interval);

  std::vector<TrafficSpec> traffic{fg};
  for (TrafficSpec t : plan.background) {
    const double unit_bits = t.service == ServiceClass::Cbr
                                 ? static_cast<double>(kCellPayloadOctets) * 8.0
                                 : static_cast<double>(t.payload_octets) * 8.0;
    const Tick cadence =
        static_cast<Tick>(std::llround(unit_bits * 1.0e12 / t.effective_bps));
    t.start_tick = flow_phase(spec, rep, t.vc_id, cadence);
    traffic.push_back(t);
  }

  SimOptions opt;
  opt.horizon = fg.start_tick + interval * (total + 1) + 1;
  LatencyOutcome out;
  out.offered_bps = eff;
  out.trace = simulate_routes(net, plan.routes, traffic, opt);

  const std::vector<FrameOutcome> frames = collect_frames(out.trace, net.monitor);
  std::vector<std::optional<Tick>> lats;
  std::int64_t index = 0;
  for (const FrameOutcome& f : frames) {
    if (f.vc_id != 0 || f.branch != 0) continue;
    if (index >= skip && index < total)
      lats.push_back(mimo_from_events(frame_events(f, plan.in_rate, plan.out_rate)));
    ++index;
  }
  if (static_cast<std::int64_t>(lats.size()) != spec.p)
    throw std::logic_error("latency run lost foreground frames before the switch");
  out.stats = latency_stats(lats, spec.alpha);
  return out;
}

void fill_latency(RunRow& r, const LatencyStats& s) {
  r.lat_p = s.p;
  r.lat_lost = s.lost_in_window;
  r.lat_unbounded = s.unbounded;
  const double per_ns = static_cast<double>(kTicksPerNs);
  r.lat_mean_ns = s.mean / per_ns;
  r.lat_stddev_ns = s.stddev / per_ns;
  r.lat_stderr_ns = s.std_error / per_ns;
  r.lat_ci_low_ns = s.ci_low / per_ns;
  r.lat_ci_high_ns = s.ci_high / per_ns;
  r.lat_z = s.z;
  r.frames_in = s.p;
  r.frames_out = s.p - s.lost_in_window;
  r.flr = s.p > 0 ? static_cast<double>(s.lost_in_window) / static_cast<double>(s.p) : kNaN;
  r.value = r.lat_mean_ns;
}

// Single signaling frame's MIMO latency out of an isolated exchange trace.
std::optional<Tick> single_frame_mimo(const Trace& trace, const MonitorModel& monitor,
                                      const LinkRate& in_rate, const LinkRate& out_rate) {
  const std::vector<FrameOutcome> frames = collect_frames(trace, monitor);
  if (frames.size() != 1)
    throw std::logic_error("signaling trace must hold exactly one frame");
  return mimo_from_events(frame_events(frames.front(), in_rate, out_rate));
}

}  // namespace

MetricReport run_suite(const TestSpec& spec, const TraceSink& trace_sink) {
  MetricReport report;
  report.spec = spec;
  std::int64_t next_id = 0;
  const auto add = [&](RunRow r, const Trace* trace) {
    r.run_id = next_id++;
    if (trace_sink && trace && spec.emit_trace) trace_sink(r.run_id, *trace);
    report.runs.push_back(std::move(r));
  };

  const bool matrix =
      has_metric(spec, "throughput") || has_metric(spec, "fairness") || has_metric(spec, "flr");
  if (matrix) {
    for (std::int64_t size : spec.frame_sizes) {
      for (ConfigKind kind : spec.configs) {
        const std::string label = config_label(spec, kind);
        const ThroughputPlan plan = plan_throughput(spec, kind, size);

        for (double f : spec.load_ladder) {
          for (std::int64_t rep = 0; rep < spec.repetitions; ++rep) {
            RunOutcome o = run_throughput_once(spec, plan, size, f, rep);
            RunRow r = blank_row("throughput", label, size, "ladder", f, rep);
            fill_probe(r, o.probe);
            r.fairness = o.fairness;
            add(std::move(r), &o.trace);
          }
        }

        if (has_metric(spec, "throughput")) {
          const LoadRunner runner = [&](double frac) {
            return run_throughput_once(spec, plan, size, frac, 0).probe;
          };
          const auto add_log = [&](const std::vector<ProbeLogEntry>& log) {
            for (const ProbeLogEntry& e : log) {
              RunRow r = blank_row("throughput", label, size, e.phase, e.load_fraction, 0);
              fill_probe(r, e.probe);
              add(std::move(r), nullptr);
            }
          };
          add_log(lossless_throughput(runner, spec.epsilon).log);
          add_log(
              peak_throughput(runner, make_sweep_grid(spec.sweep_points), spec.refine_iters).log);
          RunOutcome o = run_throughput_once(spec, plan, size, 1.0, 0);
          RunRow r = blank_row("throughput", label, size, "full_load", 1.0, 0);
          fill_probe(r, o.probe);
          r.fairness = o.fairness;
          add(std::move(r), &o.trace);
        }
      }
    }
  }

  if (has_metric(spec, "goodput")) {
    for (std::int64_t size : spec.frame_sizes) {
      for (ConfigKind kind : spec.configs) {
        const std::string label = config_label(spec, kind);
        const ThroughputPlan plan = plan_throughput(spec, kind, size);
        std::vector<double> fractions;
        if (spec.goodput_fps.empty()) {
          fractions = spec.load_ladder;
        } else {
          for (double fps : spec.goodput_fps)
            fractions.push_back(std::min(
                1.0, fps * static_cast<double>(size) * 8.0 / plan.flows[0].full_effective_bps));
        }
        for (double f : fractions) {
          for (std::int64_t rep = 0; rep < spec.repetitions; ++rep) {
            RunOutcome o = run_throughput_once(spec, plan, size, f, rep);
            RunRow r = blank_row("goodput", label, size, "ladder", f, rep);
            fill_probe(r, o.probe);
            r.fairness = o.fairness;
            r.value = o.probe.frames_in > 0
                          ? application_goodput(o.probe.frames_out, o.probe.frames_in)
                          : kNaN;
            add(std::move(r), &o.trace);
          }
        }
      }
    }
  }

  if (has_metric(spec, "latency")) {
    std::vector<double> rungs;
    for (double f = spec.latency_ladder_start; f < 1.0; f *= spec.ladder_factor)
      rungs.push_back(f);
    rungs.push_back(1.0);
    for (std::int64_t size : spec.frame_sizes) {
      const LatencyPlan plan = plan_latency(spec, size);
      for (std::int64_t rep = 0; rep < spec.repetitions; ++rep) {
        for (double f : rungs) {
          LatencyOutcome o = run_latency_once(spec, plan, size, f, rep);
          RunRow r = blank_row("latency", plan.label, size, "rung", f, rep);
          r.offered_bps = o.offered_bps;
          fill_latency(r, o.stats);
          const bool stop = o.stats.unbounded;
          add(std::move(r), &o.trace);
          if (stop) break;  // higher rungs of a lossy ladder add nothing
        }
      }
    }
  }

  if (has_metric(spec, "mfbs")) {
    const std::string label = "burst_2_to_1";
    const ConnectionConfig config = build_k_to_1(2, spec.config_out_port, spec.system.ports);
    const VC& burst_vc = config.vcs[0];
    const VC& bg_vc = config.vcs[1];
    const LinkRate out_rate = port_rate(spec.system, spec.config_out_port);

    for (std::int64_t size : spec.frame_sizes) {
      const double burst_eff = spec.mfbs_peak_fraction *
                               link_payload_capacity_bps(port_rate(spec.system,
                                                                   burst_vc.input_port),
                                                         size);
      const double bg_line =
          std::min(spec.mfbs_background_fraction *
                       static_cast<double>(out_rate.bits_per_second),
                   static_cast<double>(port_rate(spec.system, bg_vc.input_port).bits_per_second));
      const std::int64_t cpf = cells_per_frame(size);
      const Tick cell_stride = static_cast<Tick>(
          std::llround(static_cast<double>(size) * 8.0e12 /
                       (burst_eff * static_cast<double>(cpf))));

      const BurstRunner runner = [&](std::int64_t burst) {
        NetworkModel net = make_network(spec.system);
        std::vector<TrafficSpec> traffic;
        TrafficSpec b;
        b.vc_id = burst_vc.vc_id;
        b.payload_octets = size;
        b.effective_bps = burst_eff;
        b.burst_frames = burst;
        traffic.push_back(b);
        if (bg_line > 0) {
          TrafficSpec c;
          c.vc_id = bg_vc.vc_id;
          c.service = ServiceClass::Cbr;
          c.payload_octets = kCellPayloadOctets;
          c.effective_bps = bg_line * (static_cast<double>(kCellPayloadOctets) * 8.0) /
                            static_cast<double>(kCellBits);
          traffic.push_back(c);
        }
        SimOptions opt;
        opt.horizon = (burst + 1) * cpf * cell_stride + ns_to_ticks(1000);
        Trace trace = simulate(net, config, traffic, opt);
        const bool loss_free = trace.dropped_cells == 0;

        std::int64_t delivered = 0;
        for (const FrameOutcome& f : collect_frames(trace, net.monitor))
          if (f.vc_id == burst_vc.vc_id && f.delivered) ++delivered;

        RunRow r = blank_row("mfbs", label, size, "mfbs_probe", spec.mfbs_peak_fraction, 0);
        r.offered_bps = burst_eff;
        r.burst_frames = burst;
        r.frames_in = burst;
        r.frames_out = delivered;
        r.flr = frame_loss_ratio(static_cast<double>(burst), static_cast<double>(delivered));
        r.value = loss_free ? 1.0 : 0.0;
        add(std::move(r), &trace);
        return loss_free;
      };
      mfbs_search(runner, size, spec.mfbs_ceiling);
    }
  }

  if (has_metric(spec, "call_setup")) {
    NetworkModel net = make_network(spec.system);
    const SwitchModel base = net.switches[0];
    for (int i = 1; i < spec.call_switches; ++i) net.switches.push_back(base);
    for (int i = 0; i + 1 < spec.call_switches; ++i) {
      net.links.push_back({i, 1, i + 1, 0, 0});
      net.links.push_back({i + 1, 0, i, 1, 0});
    }
    net.validate();
    std::vector<Hop> forward;
    for (int i = 0; i < spec.call_switches; ++i) forward.push_back({i, 0, 1});

    TrafficSpec sig;
    sig.vc_id = 0;
    sig.service = ServiceClass::Signaling;
    sig.payload_octets = spec.signaling_payload_octets;
    sig.intercell_gap_cells = spec.signaling_gap_cells;
    sig.frame_count = 1;

    const SignalingResult res =
        run_signaling_exchange(net, forward, sig, sig, ns_to_ticks(spec.destination_hold_ns));
    const LinkRate fwd_in = base.port_rate[0];
    const LinkRate fwd_out = base.port_rate[1];
    const std::string label = "chain_s" + std::to_string(spec.call_switches);

    const auto mimo_row = [&](const char* phase, const Trace& trace, const LinkRate& in,
                              const LinkRate& out) {
      const std::optional<Tick> mimo = single_frame_mimo(trace, net.monitor, in, out);
      RunRow r = blank_row("call_setup", label, spec.signaling_payload_octets, phase, 1.0, 0);
      r.lat_p = 1;
      r.frames_in = 1;
      if (mimo) {
        r.frames_out = 1;
        r.flr = 0;
        r.lat_mean_ns = static_cast<double>(*mimo) / static_cast<double>(kTicksPerNs);
        r.value = r.lat_mean_ns;
      } else {
        r.lat_lost = 1;
        r.lat_unbounded = true;
        r.flr = 1;
        r.lat_mean_ns = std::numeric_limits<double>::infinity();
        r.value = r.lat_mean_ns;
      }
      add(std::move(r), &trace);
    };
    mimo_row("setup", res.setup, fwd_in, fwd_out);
    mimo_row("connect", res.connect, fwd_out, fwd_in);
  }

  report.aggregates = recompute_aggregates(spec, report.runs);
  return report;
}

std::vector<AggRow> recompute_aggregates(const TestSpec& spec, const std::vector<RunRow>& rows) {
  std::vector<AggRow> out;
  const auto push = [&](const std::string& metric, const std::string& config, std::int64_t size,
                        double fraction, const std::string& key, double value) {
    out.push_back({metric, config, size, fraction, key, value});
  };

  std::vector<std::string> labels;
  for (ConfigKind kind : spec.configs) labels.push_back(config_label(spec, kind));

  for (const std::string& metric : spec.metrics) {
    if (metric == "throughput") {
      for (const std::string& label : labels) {
        for (std::int64_t size : spec.frame_sizes) {
          const RunRow* best_lossless = nullptr;
          const RunRow* best_any = nullptr;
          const RunRow* full_load = nullptr;
          bool have_rows = false;
          for (const RunRow& r : rows) {
            if (r.metric != "throughput" || r.config != label || r.frame_size != size) continue;
            have_rows = true;
            if (r.frames_in > 0 && r.frames_in == r.frames_out &&
                (!best_lossless || r.delivered_bps > best_lossless->delivered_bps))
              best_lossless = &r;
            if (!best_any || r.delivered_bps > best_any->delivered_bps) best_any = &r;
            if (r.phase == "full_load") full_load = &r;
          }
          if (!have_rows) continue;
          if (best_lossless) {
            push(metric, label, size, 0, "lossless_bps", best_lossless->delivered_bps);
            push(metric, label, size, 0, "lossless_load_fraction",
                 best_lossless->load_fraction);
          } else {
            push(metric, label, size, 0, "lossless_below_floor", 1);
          }
          if (best_any) {
            push(metric, label, size, 0, "peak_bps", best_any->delivered_bps);
            push(metric, label, size, 0, "peak_offered_bps", best_any->offered_bps);
            push(metric, label, size, 0, "peak_load_fraction", best_any->load_fraction);
          }
          if (full_load) push(metric, label, size, 0, "full_load_bps", full_load->delivered_bps);
        }
      }
    } else if (metric == "fairness") {
      for (const std::string& label : labels) {
        for (std::int64_t size : spec.frame_sizes) {
          for (double f : spec.load_ladder) {
            std::vector<double> indices;
            for (const RunRow& r : rows)
              if (r.metric == "throughput" && r.phase == "ladder" && r.config == label &&
                  r.frame_size == size && r.load_fraction == f && !std::isnan(r.fairness))
                indices.push_back(r.fairness);
            if (!indices.empty())
              push(metric, label, size, f, "mean_fairness", mean_fairness(indices));
          }
        }
      }
    } else if (metric == "flr") {
      for (const std::string& label : labels) {
        for (std::int64_t size : spec.frame_sizes) {
          for (double f : spec.load_ladder) {
            std::vector<std::pair<double, double>> in_out;
            for (const RunRow& r : rows)
              if (r.metric == "throughput" && r.phase == "ladder" && r.config == label &&
                  r.frame_size == size && r.load_fraction == f && r.frames_in > 0)
                in_out.emplace_back(static_cast<double>(r.frames_in),
                                    static_cast<double>(r.frames_out));
            if (!in_out.empty()) push(metric, label, size, f, "flr", average_flr(in_out));
          }
        }
      }
    } else if (metric == "goodput") {
      for (const std::string& label : labels) {
        for (std::int64_t size : spec.frame_sizes) {
          std::vector<double> fractions;
          for (const RunRow& r : rows)
            if (r.metric == "goodput" && r.config == label && r.frame_size == size &&
                std::find(fractions.begin(), fractions.end(), r.load_fraction) ==
                    fractions.end())
              fractions.push_back(r.load_fraction);
          for (double f : fractions) {
            double in = 0, delivered = 0;
            for (const RunRow& r : rows)
              if (r.metric == "goodput" && r.config == label && r.frame_size == size &&
                  r.load_fraction == f) {
                in += static_cast<double>(r.frames_in);
                delivered += static_cast<double>(r.frames_out);
              }
            if (in > 0) push(metric, label, size, f, "goodput", delivered / in);
          }
        }
      }
    } else if (metric == "latency") {
      for (std::int64_t size : spec.frame_sizes) {
        std::string label;
        double best_fraction = -1;
        for (const RunRow& r : rows) {
          if (r.metric != "latency" || r.frame_size != size) continue;
          label = r.config;
          if (!r.lat_unbounded && r.load_fraction > best_fraction)
            best_fraction = r.load_fraction;
        }
        if (label.empty()) continue;
        if (best_fraction < 0) {
          push(metric, label, size, 0, "latency_unbounded", 1);
          continue;
        }
        std::vector<double> means;
        for (const RunRow& r : rows)
          if (r.metric == "latency" && r.frame_size == size && !r.lat_unbounded &&
              r.load_fraction == best_fraction)
            means.push_back(r.lat_mean_ns);
        push(metric, label, size, best_fraction, "latency_mean_ns", mean_fairness(means));
        push(metric, label, size, best_fraction, "latency_load_fraction", best_fraction);
      }
    } else if (metric == "mfbs") {
      for (std::int64_t size : spec.frame_sizes) {
        std::string label;
        std::int64_t best = 0;
        bool any = false;
        for (const RunRow& r : rows) {
          if (r.metric != "mfbs" || r.frame_size != size) continue;
          label = r.config;
          any = true;
          if (r.value == 1.0 && r.burst_frames > best) best = r.burst_frames;
        }
        if (!any) continue;
        push(metric, label, size, 0, "mfbs_frames", static_cast<double>(best));
        push(metric, label, size, 0, "mfbs_octets", static_cast<double>(best * size));
        push(metric, label, size, 0, "mfbs_unbounded", best >= spec.mfbs_ceiling ? 1 : 0);
      }
    } else if (metric == "call_setup") {
      double total = 0;
      std::string label;
      bool any = false;
      for (const RunRow& r : rows)
        if (r.metric == "call_setup") {
          total += r.value;
          label = r.config;
          any = true;
        }
      if (any) {
        push(metric, label, spec.signaling_payload_octets, 0, "call_setup_latency_ns", total);
        push(metric, label, spec.signaling_payload_octets, 0, "call_switches",
             spec.call_switches);
        push(metric, label, spec.signaling_payload_octets, 0, "pnni_hierarchies",
             spec.pnni_hierarchies);
      }
    }
  }
  return out;
}

std::vector<std::string> check_expectations(const MetricReport& report) {
  std::vector<std::string> violations;
  for (const ExpectRule& rule : report.spec.expects) {
    bool found = false;
    for (const AggRow& a : report.aggregates) {
      if (a.key != rule.key) continue;
      found = true;
      const bool ok = rule.is_min ? a.value >= rule.value : a.value <= rule.value;
      if (!ok) {
        std::string where = a.metric + "/" + a.config;
        if (a.frame_size > 0) where += "/size" + std::to_string(a.frame_size);
        violations.push_back("expect " + rule.key + (rule.is_min ? " >= " : " <= ") +
                             format_g17(rule.value) + " violated at " + where + ": " +
                             format_g17(a.value));
      }
    }
    if (!found)
      violations.push_back("expect " + rule.key + ": the report has no such aggregate");
  }
  return violations;
}

}  // namespace atmbench
