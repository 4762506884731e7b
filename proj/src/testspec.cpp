#include "atmbench/testspec.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace atmbench {

namespace {

const std::set<std::string> kMetricNames = {"throughput", "fairness", "flr",      "latency",
                                            "mfbs",       "goodput",  "call_setup"};

std::vector<std::string> tokenize(const std::string& line) {
  std::istringstream is(line.substr(0, line.find('#')));
  std::vector<std::string> toks;
  std::string t;
  while (is >> t) toks.push_back(t);
  return toks;
}

[[noreturn]] void fail(int line_no, const std::string& msg) {
  throw SpecError("spec line " + std::to_string(line_no) + ": " + msg);
}

std::int64_t parse_int(const std::string& tok, int line_no, const std::string& field) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    fail(line_no, field + ": not an integer: " + tok);
  }
}

std::uint64_t parse_u64(const std::string& tok, int line_no, const std::string& field) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(tok, &pos);
    if (pos != tok.size() || tok.front() == '-') throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    fail(line_no, field + ": not an unsigned integer: " + tok);
  }
}

double parse_double(const std::string& tok, int line_no, const std::string& field) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    fail(line_no, field + ": not a number: " + tok);
  }
}

bool parse_flag(const std::string& tok, int line_no, const std::string& field) {
  if (tok == "on" || tok == "true" || tok == "1") return true;
  if (tok == "off" || tok == "false" || tok == "0") return false;
  fail(line_no, field + ": expected on or off, got " + tok);
}

void need_args(const std::vector<std::string>& toks, std::size_t n, int line_no) {
  if (toks.size() != n + 1)
    fail(line_no, toks[0] + ": expected " + std::to_string(n) + " value(s)");
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  // Trim to the shortest representation that parses back identically.
  for (int prec = 1; prec < 17; ++prec) {
    char probe[64];
    std::snprintf(probe, sizeof probe, "%.*g", prec, v);
    if (std::stod(probe) == v) return probe;
  }
  return buf;
}

}  // namespace

TestSpec parse_spec(const std::string& text) {
  TestSpec spec;
  bool seed_seen = false;
  bool configs_set = false;
  bool frame_sizes_set = false;
  bool ladder_set = false;
  bool in_system = false;

  std::istringstream is(text);
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    std::vector<std::string> toks = tokenize(line);
    if (toks.empty()) continue;
    const std::string& key = toks[0];

    if (in_system) {
      if (key == "}") {
        need_args(toks, 0, line_no);
        in_system = false;
      } else if (key == "ports") {
        need_args(toks, 1, line_no);
        spec.system.ports = static_cast<int>(parse_int(toks[1], line_no, key));
      } else if (key == "rate_bps") {
        if (toks.size() < 2) fail(line_no, "rate_bps: expected at least one rate");
        spec.system.rate_bps.clear();
        for (std::size_t i = 1; i < toks.size(); ++i)
          spec.system.rate_bps.push_back(parse_int(toks[i], line_no, key));
      } else if (key == "modules") {
        spec.system.modules.clear();
        for (std::size_t i = 1; i < toks.size(); ++i)
          spec.system.modules.push_back(static_cast<int>(parse_int(toks[i], line_no, key)));
      } else if (key == "fabrics") {
        spec.system.fabrics.clear();
        for (std::size_t i = 1; i < toks.size(); ++i)
          spec.system.fabrics.push_back(static_cast<int>(parse_int(toks[i], line_no, key)));
      } else if (key == "cell_latency_ns") {
        need_args(toks, 1, line_no);
        spec.system.cell_latency_ns = parse_int(toks[1], line_no, key);
      } else if (key == "buffer_cells") {
        need_args(toks, 1, line_no);
        spec.system.buffer_cells = parse_int(toks[1], line_no, key);
      } else if (key == "monitor_overhead_ns") {
        need_args(toks, 1, line_no);
        spec.system.monitor_overhead_ns = parse_int(toks[1], line_no, key);
      } else if (key == "monitor_propagation_ns") {
        need_args(toks, 1, line_no);
        spec.system.monitor_propagation_ns = parse_int(toks[1], line_no, key);
      } else {
        fail(line_no, "unknown system key: " + key);
      }
      continue;
    }

    if (key == "system") {
      if (toks.size() != 2 || toks[1] != "{") fail(line_no, "expected: system {");
      in_system = true;
    } else if (key == "metric") {
      need_args(toks, 1, line_no);
      if (!kMetricNames.count(toks[1])) fail(line_no, "unknown metric: " + toks[1]);
      if (std::find(spec.metrics.begin(), spec.metrics.end(), toks[1]) == spec.metrics.end())
        spec.metrics.push_back(toks[1]);
    } else if (key == "config") {
      need_args(toks, 1, line_no);
      if (!configs_set) {
        spec.configs.clear();
        configs_set = true;
      }
      try {
        spec.configs.push_back(config_kind_from_string(toks[1]));
      } catch (const std::exception& e) {
        fail(line_no, e.what());
      }
    } else if (key == "config_m") {
      need_args(toks, 1, line_no);
      spec.config_m = static_cast<int>(parse_int(toks[1], line_no, key));
    } else if (key == "config_k") {
      need_args(toks, 1, line_no);
      spec.config_k = static_cast<int>(parse_int(toks[1], line_no, key));
    } else if (key == "config_out_port") {
      need_args(toks, 1, line_no);
      spec.config_out_port = static_cast<int>(parse_int(toks[1], line_no, key));
    } else if (key == "loopback") {
      need_args(toks, 1, line_no);
      spec.use_loopback = parse_flag(toks[1], line_no, key);
    } else if (key == "frame_sizes") {
      if (toks.size() < 2) fail(line_no, "frame_sizes: expected at least one size");
      if (!frame_sizes_set) {
        spec.frame_sizes.clear();
        frame_sizes_set = true;
      }
      for (std::size_t i = 1; i < toks.size(); ++i)
        spec.frame_sizes.push_back(parse_int(toks[i], line_no, key));
    } else if (key == "load_ladder") {
      if (toks.size() < 2) fail(line_no, "load_ladder: expected at least one fraction");
      if (!ladder_set) {
        spec.load_ladder.clear();
        ladder_set = true;
      }
      for (std::size_t i = 1; i < toks.size(); ++i)
        spec.load_ladder.push_back(parse_double(toks[i], line_no, key));
    } else if (key == "repetitions") {
      need_args(toks, 1, line_no);
      spec.repetitions = parse_int(toks[1], line_no, key);
    } else if (key == "p") {
      need_args(toks, 1, line_no);
      spec.p = parse_int(toks[1], line_no, key);
    } else if (key == "alpha") {
      need_args(toks, 1, line_no);
      spec.alpha = parse_double(toks[1], line_no, key);
    } else if (key == "seed") {
      need_args(toks, 1, line_no);
      spec.seed = parse_u64(toks[1], line_no, key);
      seed_seen = true;
    } else if (key == "warmup_fraction") {
      need_args(toks, 1, line_no);
      spec.warmup_fraction = parse_double(toks[1], line_no, key);
    } else if (key == "duration_ns") {
      need_args(toks, 1, line_no);
      spec.duration_ns = parse_int(toks[1], line_no, key);
    } else if (key == "stagger") {
      need_args(toks, 1, line_no);
      spec.stagger = parse_flag(toks[1], line_no, key);
    } else if (key == "epsilon") {
      need_args(toks, 1, line_no);
      spec.epsilon = parse_double(toks[1], line_no, key);
    } else if (key == "sweep_points") {
      need_args(toks, 1, line_no);
      spec.sweep_points = static_cast<int>(parse_int(toks[1], line_no, key));
    } else if (key == "refine_iters") {
      need_args(toks, 1, line_no);
      spec.refine_iters = static_cast<int>(parse_int(toks[1], line_no, key));
    } else if (key == "latency_ladder_start") {
      need_args(toks, 1, line_no);
      spec.latency_ladder_start = parse_double(toks[1], line_no, key);
    } else if (key == "ladder_factor") {
      need_args(toks, 1, line_no);
      spec.ladder_factor = parse_double(toks[1], line_no, key);
    } else if (key == "background_kind") {
      need_args(toks, 1, line_no);
      spec.background_kind = toks[1];
    } else if (key == "background_fraction") {
      need_args(toks, 1, line_no);
      spec.background_fraction = parse_double(toks[1], line_no, key);
    } else if (key == "background_service") {
      need_args(toks, 1, line_no);
      spec.background_service = toks[1];
    } else if (key == "mfbs_ceiling") {
      need_args(toks, 1, line_no);
      spec.mfbs_ceiling = parse_int(toks[1], line_no, key);
    } else if (key == "mfbs_background_fraction") {
      need_args(toks, 1, line_no);
      spec.mfbs_background_fraction = parse_double(toks[1], line_no, key);
    } else if (key == "mfbs_peak_fraction") {
      need_args(toks, 1, line_no);
      spec.mfbs_peak_fraction = parse_double(toks[1], line_no, key);
    } else if (key == "call_switches") {
      need_args(toks, 1, line_no);
      spec.call_switches = static_cast<int>(parse_int(toks[1], line_no, key));
    } else if (key == "signaling_payload_octets") {
      need_args(toks, 1, line_no);
      spec.signaling_payload_octets = parse_int(toks[1], line_no, key);
    } else if (key == "signaling_gap_cells") {
      need_args(toks, 1, line_no);
      spec.signaling_gap_cells = parse_int(toks[1], line_no, key);
    } else if (key == "destination_hold_ns") {
      need_args(toks, 1, line_no);
      spec.destination_hold_ns = parse_int(toks[1], line_no, key);
    } else if (key == "pnni_hierarchies") {
      need_args(toks, 1, line_no);
      spec.pnni_hierarchies = static_cast<int>(parse_int(toks[1], line_no, key));
    } else if (key == "goodput_fps") {
      for (std::size_t i = 1; i < toks.size(); ++i)
        spec.goodput_fps.push_back(parse_double(toks[i], line_no, key));
    } else if (key == "output_basename") {
      need_args(toks, 1, line_no);
      spec.output_basename = toks[1];
    } else if (key == "emit_trace") {
      need_args(toks, 1, line_no);
      spec.emit_trace = parse_flag(toks[1], line_no, key);
    } else if (key == "expect") {
      need_args(toks, 3, line_no);
      ExpectRule rule;
      rule.key = toks[1];
      if (toks[2] == "min")
        rule.is_min = true;
      else if (toks[2] == "max")
        rule.is_min = false;
      else
        fail(line_no, "expect: bound must be min or max");
      rule.value = parse_double(toks[3], line_no, key);
      spec.expects.push_back(rule);
    } else {
      fail(line_no, "unknown key: " + key);
    }
  }
  if (in_system) throw SpecError("spec: unterminated system block");
  if (!seed_seen) throw SpecError("spec: seed is required for reproducibility");

  // Whole-spec validation.
  const SystemSpec& sys = spec.system;
  if (sys.ports < 2) throw SpecError("spec: system needs at least 2 ports");
  if (sys.rate_bps.empty() ||
      (sys.rate_bps.size() != 1 && static_cast<int>(sys.rate_bps.size()) != sys.ports))
    throw SpecError("spec: rate_bps needs one rate or one per port");
  for (std::int64_t r : sys.rate_bps)
    if (r <= 0) throw SpecError("spec: line rates must be positive");
  if (!sys.modules.empty() && static_cast<int>(sys.modules.size()) != sys.ports)
    throw SpecError("spec: modules must cover every port");
  for (int m : sys.modules) {
    if (m < 0) throw SpecError("spec: module ids must be non-negative");
    if (!sys.fabrics.empty() && m >= static_cast<int>(sys.fabrics.size()))
      throw SpecError("spec: module id outside fabric map");
  }
  if (sys.cell_latency_ns < 0) throw SpecError("spec: cell_latency_ns must be non-negative");
  if (sys.buffer_cells < 1) throw SpecError("spec: buffer_cells must be at least 1");
  if (sys.monitor_overhead_ns < 0 || sys.monitor_propagation_ns < 0)
    throw SpecError("spec: monitor delays must be non-negative");

  for (const std::string& m : spec.metrics)
    if (m == "mfbs" && sys.ports < 3)
      throw SpecError("spec: mfbs needs at least 3 ports (two inputs feeding one output)");

  if (spec.frame_sizes.empty()) throw SpecError("spec: frame_sizes must not be empty");
  for (std::int64_t f : spec.frame_sizes)
    if (f < 1) throw SpecError("spec: frame sizes must be positive");
  if (spec.load_ladder.empty()) throw SpecError("spec: load_ladder must not be empty");
  for (double f : spec.load_ladder)
    if (!(f > 0.0) || f > 1.0) throw SpecError("spec: ladder fractions must lie in (0,1]");
  if (spec.repetitions < 1) throw SpecError("spec: repetitions must be at least 1");
  if (spec.p < 2) throw SpecError("spec: p must be at least 2");
  if (!(spec.alpha > 0.0 && spec.alpha < 1.0)) throw SpecError("spec: alpha must lie in (0,1)");
  if (!(spec.warmup_fraction >= 0.0 && spec.warmup_fraction <= 0.5))
    throw SpecError("spec: warmup_fraction must lie in [0,0.5]");
  if (spec.duration_ns < 1) throw SpecError("spec: duration_ns must be positive");
  if (!(spec.epsilon > 0.0 && spec.epsilon < 1.0))
    throw SpecError("spec: epsilon must be a load fraction in (0,1)");
  if (spec.sweep_points < 2) throw SpecError("spec: sweep_points must be at least 2");
  if (spec.refine_iters < 0) throw SpecError("spec: refine_iters must be non-negative");
  if (!(spec.latency_ladder_start > 0.0 && spec.latency_ladder_start <= 1.0))
    throw SpecError("spec: latency_ladder_start must lie in (0,1]");
  if (!(spec.ladder_factor > 1.0)) throw SpecError("spec: ladder_factor must exceed 1");
  if (spec.background_kind != "none") {
    try {
      const ConfigKind kind = config_kind_from_string(spec.background_kind);
      if (kind == ConfigKind::KTo1) throw SpecError("spec: k_to_1 background is not defined");
    } catch (const SpecError&) {
      throw;
    } catch (const std::exception& e) {
      throw SpecError(std::string("spec: ") + e.what());
    }
  }
  if (!(spec.background_fraction >= 0.0 && spec.background_fraction <= 1.0))
    throw SpecError("spec: background_fraction must lie in [0,1]");
  if (spec.background_service != "cbr" && spec.background_service != "ubr")
    throw SpecError("spec: background_service must be cbr or ubr");
  if (spec.mfbs_ceiling < 1) throw SpecError("spec: mfbs_ceiling must be positive");
  if (!(spec.mfbs_background_fraction >= 0.0 && spec.mfbs_background_fraction < 1.0))
    throw SpecError("spec: mfbs_background_fraction must lie in [0,1)");
  if (!(spec.mfbs_peak_fraction > 0.0 && spec.mfbs_peak_fraction <= 1.0))
    throw SpecError("spec: mfbs_peak_fraction must lie in (0,1]");
  if (spec.call_switches < 1) throw SpecError("spec: call_switches must be at least 1");
  if (spec.signaling_payload_octets < 1)
    throw SpecError("spec: signaling_payload_octets must be positive");
  if (spec.signaling_gap_cells < 0 || spec.destination_hold_ns < 0)
    throw SpecError("spec: signaling delays must be non-negative");
  if (spec.pnni_hierarchies < 1) throw SpecError("spec: pnni_hierarchies must be at least 1");
  for (double fps : spec.goodput_fps)
    if (!(fps > 0.0)) throw SpecError("spec: goodput_fps entries must be positive");
  if (spec.output_basename.empty()) throw SpecError("spec: output_basename must not be empty");

  for (ConfigKind kind : spec.configs) {
    switch (kind) {
      case ConfigKind::PartialCross:
        if (spec.config_m < 1 || spec.config_m > sys.ports - 1)
          throw SpecError("spec: config_m must lie in [1, ports-1]");
        break;
      case ConfigKind::KTo1:
        if (spec.config_k < 2 || spec.config_k > sys.ports - 1)
          throw SpecError("spec: config_k must lie in [2, ports-1]");
        if (spec.config_out_port < 0 || spec.config_out_port >= sys.ports)
          throw SpecError("spec: config_out_port references a port the system lacks");
        break;
      default:
        break;
    }
    if (spec.use_loopback && kind != ConfigKind::FullCross && kind != ConfigKind::PartialCross)
      throw SpecError("spec: loopback emulation needs a cross configuration");
  }
  return spec;
}

TestSpec load_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("spec: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_spec(ss.str());
}

std::string TestSpec::to_text() const {
  std::ostringstream os;
  os << "seed " << seed << '\n';
  for (const std::string& m : metrics) os << "metric " << m << '\n';
  for (ConfigKind k : configs) os << "config " << to_string(k) << '\n';
  os << "config_m " << config_m << '\n';
  os << "config_k " << config_k << '\n';
  os << "config_out_port " << config_out_port << '\n';
  os << "loopback " << (use_loopback ? "on" : "off") << '\n';
  os << "frame_sizes";
  for (std::int64_t f : frame_sizes) os << ' ' << f;
  os << '\n';
  os << "load_ladder";
  for (double f : load_ladder) os << ' ' << format_double(f);
  os << '\n';
  os << "repetitions " << repetitions << '\n';
  os << "p " << p << '\n';
  os << "alpha " << format_double(alpha) << '\n';
  os << "warmup_fraction " << format_double(warmup_fraction) << '\n';
  os << "duration_ns " << duration_ns << '\n';
  os << "stagger " << (stagger ? "on" : "off") << '\n';
  os << "epsilon " << format_double(epsilon) << '\n';
  os << "sweep_points " << sweep_points << '\n';
  os << "refine_iters " << refine_iters << '\n';
  os << "latency_ladder_start " << format_double(latency_ladder_start) << '\n';
  os << "ladder_factor " << format_double(ladder_factor) << '\n';
  os << "background_kind " << background_kind << '\n';
  os << "background_fraction " << format_double(background_fraction) << '\n';
  os << "background_service " << background_service << '\n';
  os << "mfbs_ceiling " << mfbs_ceiling << '\n';
  os << "mfbs_background_fraction " << format_double(mfbs_background_fraction) << '\n';
  os << "mfbs_peak_fraction " << format_double(mfbs_peak_fraction) << '\n';
  os << "call_switches " << call_switches << '\n';
  os << "signaling_payload_octets " << signaling_payload_octets << '\n';
  os << "signaling_gap_cells " << signaling_gap_cells << '\n';
  os << "destination_hold_ns " << destination_hold_ns << '\n';
  os << "pnni_hierarchies " << pnni_hierarchies << '\n';
  if (!goodput_fps.empty()) {
    os << "goodput_fps";
    for (double f : goodput_fps) os << ' ' << format_double(f);
    os << '\n';
  }
  os << "output_basename " << output_basename << '\n';
  os << "emit_trace " << (emit_trace ? "on" : "off") << '\n';
  for (const ExpectRule& e : expects)
    os << "expect " << e.key << ' ' << (e.is_min ? "min" : "max") << ' ' << format_double(e.value)
       << '\n';
  os << "system {\n";
  os << "  ports " << system.ports << '\n';
  os << "  rate_bps";
  for (std::int64_t r : system.rate_bps) os << ' ' << r;
  os << '\n';
  if (!system.modules.empty()) {
    os << "  modules";
    for (int m : system.modules) os << ' ' << m;
    os << '\n';
  }
  if (!system.fabrics.empty()) {
    os << "  fabrics";
    for (int f : system.fabrics) os << ' ' << f;
    os << '\n';
  }
  os << "  cell_latency_ns " << system.cell_latency_ns << '\n';
  os << "  buffer_cells " << system.buffer_cells << '\n';
  os << "  monitor_overhead_ns " << system.monitor_overhead_ns << '\n';
  os << "  monitor_propagation_ns " << system.monitor_propagation_ns << '\n';
  os << "}\n";
  return os.str();
}

NetworkModel make_network(const SystemSpec& sys) {
  SwitchModel sw;
  sw.n_ports = sys.ports;
  for (int p = 0; p < sys.ports; ++p) {
    const std::int64_t bps =
        sys.rate_bps.size() == 1 ? sys.rate_bps[0] : sys.rate_bps[static_cast<std::size_t>(p)];
    sw.port_rate.emplace_back(bps);
  }
  sw.module_of = sys.modules;
  sw.fabric_of_module = sys.fabrics;
  sw.cell_latency = ns_to_ticks(sys.cell_latency_ns);
  sw.buffer_cells = sys.buffer_cells;

  NetworkModel net;
  net.switches.push_back(std::move(sw));
  net.monitor.overhead = ns_to_ticks(sys.monitor_overhead_ns);
  net.monitor.propagation = ns_to_ticks(sys.monitor_propagation_ns);
  net.validate();
  return net;
}

}  // namespace atmbench
