#include "atmbench/topology.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace atmbench {

const char* to_string(ConfigKind k) {
  switch (k) {
    case ConfigKind::Straight: return "straight";
    case ConfigKind::FullCross: return "full_cross";
    case ConfigKind::PartialCross: return "partial_cross";
    case ConfigKind::KTo1: return "k_to_1";
    case ConfigKind::Multicast: return "multicast";
  }
  return "?";
}

ConfigKind config_kind_from_string(const std::string& s) {
  if (s == "straight") return ConfigKind::Straight;
  if (s == "full_cross") return ConfigKind::FullCross;
  if (s == "partial_cross") return ConfigKind::PartialCross;
  if (s == "k_to_1") return ConfigKind::KTo1;
  if (s == "multicast") return ConfigKind::Multicast;
  throw std::invalid_argument("unknown connection configuration: " + s);
}

ConnectionConfig build_straight(int n) {
  if (n < 2) throw std::invalid_argument("build_straight: need at least 2 ports");
  ConnectionConfig cfg;
  cfg.kind = ConfigKind::Straight;
  cfg.n_ports = n;
  for (int i = 0; i < n; ++i) {
    VC vc;
    vc.vc_id = i;
    vc.input_port = i;
    vc.output_ports = {(i + 1) % n};
    cfg.vcs.push_back(std::move(vc));
  }
  return cfg;
}

ConnectionConfig build_partial_cross(int n, int m) {
  if (n < 2) throw std::invalid_argument("build_partial_cross: need at least 2 ports");
  if (m < 1 || m > n - 1)
    throw std::invalid_argument("build_partial_cross: m must be in [1, n-1]");
  ConnectionConfig cfg;
  cfg.kind = ConfigKind::PartialCross;
  cfg.n_ports = n;
  cfg.m = m;
  int id = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 1; j <= m; ++j) {
      VC vc;
      vc.vc_id = id++;
      vc.input_port = i;
      vc.output_ports = {(i + j) % n};
      cfg.vcs.push_back(std::move(vc));
    }
  }
  return cfg;
}

ConnectionConfig build_full_cross(int n) {
  ConnectionConfig cfg = build_partial_cross(n, n - 1);
  cfg.kind = ConfigKind::FullCross;
  cfg.m = 0;
  return cfg;
}

ConnectionConfig build_k_to_1(int k, int out_port, int n) {
  if (n < 3) throw std::invalid_argument("build_k_to_1: need at least 3 ports");
  if (out_port < 0 || out_port >= n) throw std::invalid_argument("build_k_to_1: out_port out of range");
  if (k < 2 || k > n - 1)
    throw std::invalid_argument("build_k_to_1: k must be in [2, n-1] so no input shares the output port");
  ConnectionConfig cfg;
  cfg.kind = ConfigKind::KTo1;
  cfg.n_ports = n;
  cfg.k = k;
  int id = 0;
  for (int p = 0; p < n && id < k; ++p) {
    if (p == out_port) continue;
    VC vc;
    vc.vc_id = id++;
    vc.input_port = p;
    vc.output_ports = {out_port};
    cfg.vcs.push_back(std::move(vc));
  }
  return cfg;
}

ConnectionConfig build_multicast(int n) {
  if (n < 2) throw std::invalid_argument("build_multicast: need at least 2 ports");
  ConnectionConfig cfg;
  cfg.kind = ConfigKind::Multicast;
  cfg.n_ports = n;
  VC vc;
  vc.vc_id = 0;
  vc.input_port = 0;
  for (int p = 1; p < n; ++p) vc.output_ports.push_back(p);
  cfg.vcs.push_back(std::move(vc));
  return cfg;
}

ConnectionConfig build_loopback_throughput(int n_ports, int m, const std::vector<int>& module_of,
                                           int monitor_port) {
  if (n_ports < 2) throw std::invalid_argument("build_loopback_throughput: need at least 2 ports");
  if (m < 1 || m > n_ports - 1)
    throw std::invalid_argument("build_loopback_throughput: m must be in [1, n-1]");
  if (static_cast<int>(module_of.size()) != n_ports)
    throw std::invalid_argument("build_loopback_throughput: module map inconsistent with port count");
  if (monitor_port < 0 || monitor_port >= n_ports)
    throw std::invalid_argument("build_loopback_throughput: monitor port out of range");

  // The emulated VC set is the n-to-m partial cross. Every port has equal
  // in- and out-degree m and the offset-1 edges connect all ports, so an
  // Eulerian circuit through the monitor port exists; one frame stream can
  // traverse every emulated VC exactly once. At each step prefer a hop into
  // the other network module, then the lowest port.
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n_ports));
  for (int v = 0; v < n_ports; ++v) {
    for (int j = 1; j <= m; ++j) adj[v].push_back((v + j) % n_ports);
    std::sort(adj[v].begin(), adj[v].end(), [&](int a, int b) {
      const bool cross_a = module_of[a] != module_of[v];
      const bool cross_b = module_of[b] != module_of[v];
      if (cross_a != cross_b) return cross_a;
      return a < b;
    });
  }

  std::vector<std::size_t> next(static_cast<std::size_t>(n_ports), 0);
  std::vector<int> circuit;
  std::vector<int> walk{monitor_port};
  while (!walk.empty()) {
    const int v = walk.back();
    if (next[v] < adj[v].size()) {
      walk.push_back(adj[v][next[v]++]);
    } else {
      circuit.push_back(v);
      walk.pop_back();
    }
  }
  std::reverse(circuit.begin(), circuit.end());

  ConnectionConfig cfg;
  cfg.kind = ConfigKind::PartialCross;
  cfg.n_ports = n_ports;
  cfg.m = m;
  cfg.monitor_port = monitor_port;
  std::vector<int> chain;
  for (std::size_t e = 0; e + 1 < circuit.size(); ++e) {
    VC vc;
    vc.vc_id = static_cast<int>(e);
    vc.input_port = circuit[e];
    vc.output_ports = {circuit[e + 1]};
    chain.push_back(vc.vc_id);
    cfg.vcs.push_back(std::move(vc));
  }
  cfg.chains.push_back(std::move(chain));
  for (int p = 0; p < n_ports; ++p)
    if (p != monitor_port) cfg.loopback_ports.push_back(p);
  return cfg;
}

LatencySetup build_latency_background(const std::vector<std::int64_t>& link_rate_bps,
                                      ConfigKind kind, int m) {
  const int w = static_cast<int>(link_rate_bps.size());
  if (w < 3) throw std::invalid_argument("build_latency_background: need at least 3 ports");
  for (std::int64_t r : link_rate_bps)
    if (r <= 0) throw std::invalid_argument("build_latency_background: link rates must be positive");

  const int fg_in = 0;
  const int fg_out = w - 1;
  const int n = w - 1;

  // Logical background ports: the w-2 ports untouched by the foreground VC
  // keep their own input and output; the last logical port inputs on the
  // foreground output link and outputs on the foreground input link, the
  // two directions the foreground traffic does not use.
  std::vector<int> log_in, log_out;
  for (int p = 0; p < w; ++p) {
    if (p == fg_in || p == fg_out) continue;
    log_in.push_back(p);
    log_out.push_back(p);
  }
  log_in.push_back(fg_out);
  log_out.push_back(fg_in);

  ConnectionConfig logical;
  switch (kind) {
    case ConfigKind::Straight: logical = build_straight(n); break;
    case ConfigKind::FullCross: logical = build_full_cross(n); break;
    case ConfigKind::PartialCross: logical = build_partial_cross(n, m); break;
    case ConfigKind::Multicast: logical = build_multicast(n); break;
    case ConfigKind::KTo1:
      throw std::invalid_argument("build_latency_background: k-to-1 background is not defined");
  }

  LatencySetup setup;
  setup.foreground.vc_id = 0;
  setup.foreground.input_port = fg_in;
  setup.foreground.output_ports = {fg_out};
  setup.foreground.role = VcRole::Foreground;

  setup.background = logical;
  setup.background.n_ports = w;
  int id = 1;
  for (VC& vc : setup.background.vcs) {
    vc.vc_id = id++;
    vc.role = VcRole::Background;
    vc.input_port = log_in[vc.input_port];
    for (int& out : vc.output_ports) out = log_out[out];
  }

  setup.budget.ffl_bps = static_cast<double>(std::min(link_rate_bps[fg_in], link_rate_bps[fg_out]));
  double mbl = 0;
  for (int p = 0; p < w; ++p)
    if (p != fg_in) mbl += static_cast<double>(link_rate_bps[p]);
  setup.budget.mbl_bps = mbl;
  setup.logical_in_port = std::move(log_in);
  setup.logical_out_port = std::move(log_out);
  return setup;
}

double max_background_lossless_rate(const std::vector<std::int64_t>& link_rate_bps, int n) {
  if (n < 2 || static_cast<int>(link_rate_bps.size()) != n)
    throw std::invalid_argument("max_background_lossless_rate: need the n background link rates");
  const std::int64_t lowest = *std::min_element(link_rate_bps.begin(), link_rate_bps.end());
  const bool identical =
      std::all_of(link_rate_bps.begin(), link_rate_bps.end(), [&](std::int64_t r) { return r == lowest; });
  if (identical) {
    double sum = 0;
    for (std::int64_t r : link_rate_bps) sum += static_cast<double>(r);
    return sum;  // MBL is reachable only with identical rates
  }
  return static_cast<double>(n - 1) * static_cast<double>(lowest);
}

namespace {

template <class Num>
std::vector<Num> max_min_impl(const std::vector<Num>& demands, const std::vector<Num>& capacities,
                              const std::vector<std::vector<int>>& vc_links) {
  const std::size_t nv = demands.size();
  const std::size_t nl = capacities.size();
  if (vc_links.size() != nv)
    throw std::invalid_argument("max_min_allocation: one route per demand required");
  for (const auto& cap : capacities)
    if (!(cap > Num(0))) throw std::invalid_argument("max_min_allocation: capacities must be positive");
  for (const auto& links : vc_links) {
    if (links.empty()) throw std::invalid_argument("max_min_allocation: VC routed over zero links");
    for (int l : links)
      if (l < 0 || static_cast<std::size_t>(l) >= nl)
        throw std::invalid_argument("max_min_allocation: link index out of range");
  }
  for (const auto& d : demands)
    if (d < Num(0)) throw std::invalid_argument("max_min_allocation: negative demand");

  std::vector<char> frozen(nv, 0);
  std::vector<Num> share(nv, Num(0));
  std::size_t remaining = nv;

  while (remaining > 0) {
    // All unfrozen VCs sit at a common fill level. Link l caps that level at
    // (capacity - frozen usage) / unfrozen count; a demand caps its own VC.
    std::vector<Num> frozen_usage(nl, Num(0));
    std::vector<int> unfrozen_count(nl, 0);
    for (std::size_t i = 0; i < nv; ++i) {
      for (int l : vc_links[i]) {
        if (frozen[i])
          frozen_usage[l] = frozen_usage[l] + share[i];
        else
          unfrozen_count[l] += 1;
      }
    }

    std::vector<Num> link_level(nl, Num(0));
    bool have = false;
    Num level = Num(0);
    for (std::size_t l = 0; l < nl; ++l) {
      if (unfrozen_count[l] == 0) continue;
      link_level[l] = (capacities[l] - frozen_usage[l]) / Num(unfrozen_count[l]);
      if (!have || link_level[l] < level) { level = link_level[l]; have = true; }
    }
    for (std::size_t i = 0; i < nv; ++i) {
      if (frozen[i]) continue;
      if (!have || demands[i] < level) { level = demands[i]; have = true; }
    }

    std::size_t newly_frozen = 0;
    for (std::size_t i = 0; i < nv; ++i) {
      if (frozen[i]) continue;
      bool freeze = demands[i] <= level;
      if (!freeze) {
        for (int l : vc_links[i]) {
          if (unfrozen_count[l] > 0 && link_level[l] == level) { freeze = true; break; }
        }
      }
      if (freeze) {
        share[i] = demands[i] < level ? demands[i] : level;
        frozen[i] = 1;
        ++newly_frozen;
      }
    }
    if (newly_frozen == 0)
      throw std::logic_error("max_min_allocation: filling failed to progress");
    remaining -= newly_frozen;
  }
  return share;
}

}  // namespace

std::vector<Rational> max_min_allocation(const std::vector<Rational>& demands,
                                         const std::vector<Rational>& capacities,
                                         const std::vector<std::vector<int>>& vc_links) {
  return max_min_impl(demands, capacities, vc_links);
}

std::vector<double> max_min_allocation(const std::vector<double>& demands,
                                       const std::vector<double>& capacities,
                                       const std::vector<std::vector<int>>& vc_links) {
  return max_min_impl(demands, capacities, vc_links);
}

}  // namespace atmbench
