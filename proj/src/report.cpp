#include "atmbench/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace atmbench {

namespace {

constexpr const char* kMagic = "atmbench-report 1";

double parse_back(const char* s) {
  try {
    return std::stod(s);
  } catch (const std::exception&) {
    return std::nan("");
  }
}

std::string human_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  // Prefer the shortest spelling that parses back to the same bits.
  for (int prec = 1; prec < 17; ++prec) {
    char probe[64];
    std::snprintf(probe, sizeof probe, "%.*g", prec, v);
    if (parse_back(probe) == v) return probe;
  }
  return buf;
}

namespace {

void emit_run_fields(std::ostringstream& os, const RunRow& r) {
  os << "run_id=" << r.run_id << " metric=" << r.metric << " phase=" << r.phase
     << " config=" << r.config << " frame_size=" << r.frame_size
     << " repetition=" << r.repetition << " load_fraction=" << format_g17(r.load_fraction)
     << " offered_bps=" << format_g17(r.offered_bps)
     << " delivered_bps=" << format_g17(r.delivered_bps) << " frames_in=" << r.frames_in
     << " frames_out=" << r.frames_out << " flr=" << format_g17(r.flr)
     << " fairness=" << format_g17(r.fairness) << " burst_frames=" << r.burst_frames
     << " lat_p=" << r.lat_p << " lat_lost=" << r.lat_lost
     << " lat_unbounded=" << (r.lat_unbounded ? 1 : 0)
     << " lat_mean_ns=" << format_g17(r.lat_mean_ns)
     << " lat_stddev_ns=" << format_g17(r.lat_stddev_ns)
     << " lat_stderr_ns=" << format_g17(r.lat_stderr_ns)
     << " lat_ci_low_ns=" << format_g17(r.lat_ci_low_ns)
     << " lat_ci_high_ns=" << format_g17(r.lat_ci_high_ns) << " lat_z=" << format_g17(r.lat_z)
     << " value=" << format_g17(r.value);
}

}  // namespace

std::string emit_records(const MetricReport& report) {
  std::ostringstream os;
  os << kMagic << '\n';
  {
    std::istringstream spec(report.spec.to_text());
    std::string line;
    while (std::getline(spec, line)) os << "spec " << line << '\n';
  }
  for (const RunRow& r : report.runs) {
    os << "run ";
    emit_run_fields(os, r);
    os << '\n';
  }
  for (const AggRow& a : report.aggregates) {
    os << "aggregate metric=" << a.metric << " config=" << a.config
       << " frame_size=" << a.frame_size << " load_fraction=" << format_g17(a.load_fraction)
       << " key=" << a.key << " value=" << format_g17(a.value) << '\n';
  }
  os << "end runs=" << report.runs.size() << " aggregates=" << report.aggregates.size() << '\n';
  return os.str();
}

std::string emit_csv(const MetricReport& report) {
  std::ostringstream os;
  {
    std::istringstream spec(report.spec.to_text());
    std::string line;
    while (std::getline(spec, line)) os << "# " << line << '\n';
  }
  os << "row,run_id,metric,phase,config,frame_size,repetition,load_fraction,offered_bps,"
        "delivered_bps,frames_in,frames_out,flr,fairness,burst_frames,lat_p,lat_lost,"
        "lat_unbounded,lat_mean_ns,lat_stddev_ns,lat_stderr_ns,lat_ci_low_ns,lat_ci_high_ns,"
        "lat_z,value,agg_key,agg_value\n";
  for (const RunRow& r : report.runs) {
    os << "run," << r.run_id << ',' << r.metric << ',' << r.phase << ',' << r.config << ','
       << r.frame_size << ',' << r.repetition << ',' << format_g17(r.load_fraction) << ','
       << format_g17(r.offered_bps) << ',' << format_g17(r.delivered_bps) << ',' << r.frames_in
       << ',' << r.frames_out << ',' << format_g17(r.flr) << ',' << format_g17(r.fairness) << ','
       << r.burst_frames << ',' << r.lat_p << ',' << r.lat_lost << ','
       << (r.lat_unbounded ? 1 : 0) << ',' << format_g17(r.lat_mean_ns) << ','
       << format_g17(r.lat_stddev_ns) << ',' << format_g17(r.lat_stderr_ns) << ','
       << format_g17(r.lat_ci_low_ns) << ',' << format_g17(r.lat_ci_high_ns) << ','
       << format_g17(r.lat_z) << ',' << format_g17(r.value) << ",,\n";
  }
  for (const AggRow& a : report.aggregates) {
    os << "aggregate,," << a.metric << ",," << a.config << ',' << a.frame_size << ",,"
       << format_g17(a.load_fraction) << ",,,,,,,,,,,,,,,,," << a.key << ','
       << format_g17(a.value) << '\n';
  }
  return os.str();
}

std::string emit_human(const MetricReport& report) {
  std::ostringstream os;
  os << "atmbench report (seed " << report.spec.seed << ")\n\n";
  os << "spec\n----\n" << report.spec.to_text() << '\n';

  os << "runs (" << report.runs.size() << ")\n----\n";
  std::string group;
  for (const RunRow& r : report.runs) {
    if (r.metric != group) {
      group = r.metric;
      os << "[" << group << "]\n";
    }
    char buf[256];
    std::snprintf(buf, sizeof buf, "  #%-4lld %-10s %-18s size=%-7lld rep=%lld load=%-10s",
                  static_cast<long long>(r.run_id), r.phase.c_str(), r.config.c_str(),
                  static_cast<long long>(r.frame_size), static_cast<long long>(r.repetition),
                  human_double(r.load_fraction).c_str());
    os << buf;
    if (r.metric == "latency" || r.metric == "call_setup") {
      if (r.lat_unbounded) {
        os << " p=" << r.lat_p << " lost=" << r.lat_lost << " latency=unbounded";
      } else {
        os << " p=" << r.lat_p << " mean=" << human_double(r.lat_mean_ns)
           << "ns sd=" << human_double(r.lat_stddev_ns)
           << "ns ci=[" << human_double(r.lat_ci_low_ns) << ',' << human_double(r.lat_ci_high_ns)
           << "]ns";
      }
      if (r.metric == "call_setup") os << " mimo=" << human_double(r.value) << "ns";
    } else if (r.metric == "mfbs") {
      os << " burst=" << r.burst_frames << " in=" << r.frames_in << " out=" << r.frames_out
         << (r.frames_out == r.frames_in ? " intact" : " lossy");
    } else {
      os << " offered=" << human_double(r.offered_bps)
         << "bps delivered=" << human_double(r.delivered_bps) << "bps in=" << r.frames_in
         << " out=" << r.frames_out << " flr=" << human_double(r.flr);
      if (!std::isnan(r.fairness)) os << " fairness=" << human_double(r.fairness);
      if (r.metric == "goodput") os << " goodput=" << human_double(r.value);
    }
    os << '\n';
  }

  os << "\naggregates (" << report.aggregates.size() << ")\n----------\n";
  for (const AggRow& a : report.aggregates) {
    os << "  " << a.metric << ' ' << a.config;
    if (a.frame_size > 0) os << " size=" << a.frame_size;
    if (a.load_fraction > 0) os << " load=" << human_double(a.load_fraction);
    os << ' ' << a.key << " = " << human_double(a.value) << '\n';
  }
  return os.str();
}

namespace {

std::int64_t to_i64(const std::string& v, const std::string& key) {
  try {
    std::size_t pos = 0;
    const long long out = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return out;
  } catch (const std::exception&) {
    throw std::invalid_argument("report: bad integer for " + key + ": " + v);
  }
}

double to_f64(const std::string& v, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double out = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return out;
  } catch (const std::exception&) {
    throw std::invalid_argument("report: bad number for " + key + ": " + v);
  }
}

// Splits "k=v" tokens; values are space-free by construction.
std::vector<std::pair<std::string, std::string>> parse_kv(const std::string& rest) {
  std::vector<std::pair<std::string, std::string>> out;
  std::istringstream is(rest);
  std::string tok;
  while (is >> tok) {
    const std::size_t eq = tok.find('=');
    if (eq == std::string::npos || eq == 0)
      throw std::invalid_argument("report: malformed field: " + tok);
    out.emplace_back(tok.substr(0, eq), tok.substr(eq + 1));
  }
  return out;
}

}  // namespace

MetricReport parse_records(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line != kMagic)
    throw std::invalid_argument("report: missing atmbench-report header");

  MetricReport report;
  std::string spec_text;
  bool saw_end = false;
  std::int64_t end_runs = 0, end_aggs = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (saw_end) throw std::invalid_argument("report: content after end line");
    const std::size_t sp = line.find(' ');
    const std::string head = line.substr(0, sp);
    const std::string rest = sp == std::string::npos ? "" : line.substr(sp + 1);
    if (head == "spec") {
      spec_text += rest;
      spec_text += '\n';
    } else if (head == "run") {
      RunRow r;
      for (const auto& [k, v] : parse_kv(rest)) {
        if (k == "run_id") r.run_id = to_i64(v, k);
        else if (k == "metric") r.metric = v;
        else if (k == "phase") r.phase = v;
        else if (k == "config") r.config = v;
        else if (k == "frame_size") r.frame_size = to_i64(v, k);
        else if (k == "repetition") r.repetition = to_i64(v, k);
        else if (k == "load_fraction") r.load_fraction = to_f64(v, k);
        else if (k == "offered_bps") r.offered_bps = to_f64(v, k);
        else if (k == "delivered_bps") r.delivered_bps = to_f64(v, k);
        else if (k == "frames_in") r.frames_in = to_i64(v, k);
        else if (k == "frames_out") r.frames_out = to_i64(v, k);
        else if (k == "flr") r.flr = to_f64(v, k);
        else if (k == "fairness") r.fairness = to_f64(v, k);
        else if (k == "burst_frames") r.burst_frames = to_i64(v, k);
        else if (k == "lat_p") r.lat_p = to_i64(v, k);
        else if (k == "lat_lost") r.lat_lost = to_i64(v, k);
        else if (k == "lat_unbounded") r.lat_unbounded = to_i64(v, k) != 0;
        else if (k == "lat_mean_ns") r.lat_mean_ns = to_f64(v, k);
        else if (k == "lat_stddev_ns") r.lat_stddev_ns = to_f64(v, k);
        else if (k == "lat_stderr_ns") r.lat_stderr_ns = to_f64(v, k);
        else if (k == "lat_ci_low_ns") r.lat_ci_low_ns = to_f64(v, k);
        else if (k == "lat_ci_high_ns") r.lat_ci_high_ns = to_f64(v, k);
        else if (k == "lat_z") r.lat_z = to_f64(v, k);
        else if (k == "value") r.value = to_f64(v, k);
        else throw std::invalid_argument("report: unknown run field: " + k);
      }
      report.runs.push_back(std::move(r));
    } else if (head == "aggregate") {
      AggRow a;
      for (const auto& [k, v] : parse_kv(rest)) {
        if (k == "metric") a.metric = v;
        else if (k == "config") a.config = v;
        else if (k == "frame_size") a.frame_size = to_i64(v, k);
        else if (k == "load_fraction") a.load_fraction = to_f64(v, k);
        else if (k == "key") a.key = v;
        else if (k == "value") a.value = to_f64(v, k);
        else throw std::invalid_argument("report: unknown aggregate field: " + k);
      }
      report.aggregates.push_back(std::move(a));
    } else if (head == "end") {
      for (const auto& [k, v] : parse_kv(rest)) {
        if (k == "runs") end_runs = to_i64(v, k);
        else if (k == "aggregates") end_aggs = to_i64(v, k);
        else throw std::invalid_argument("report: unknown end field: " + k);
      }
      saw_end = true;
    } else {
      throw std::invalid_argument("report: unknown record: " + head);
    }
  }
  if (!saw_end) throw std::invalid_argument("report: missing end line");
  if (end_runs != static_cast<std::int64_t>(report.runs.size()) ||
      end_aggs != static_cast<std::int64_t>(report.aggregates.size()))
    throw std::invalid_argument("report: end counts disagree with content");
  report.spec = parse_spec(spec_text);
  return report;
}

}  // namespace atmbench
