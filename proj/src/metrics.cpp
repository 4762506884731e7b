#include "atmbench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <tuple>
#include <variant>

#include "atmbench/aal.hpp"

namespace atmbench {

Tick nfot(Tick fit, const LinkRate& input_rate, const LinkRate& output_rate) {
  if (fit < 0) throw std::invalid_argument("nfot: negative frame input time");
  return div_round_half_up(static_cast<__int128>(fit) * input_rate.bits_per_second,
                           output_rate.bits_per_second);
}

std::optional<Tick> mimo_from_events(const FrameEvents& e) {
  if (e.t2 < e.t1) throw std::invalid_argument("mimo_from_events: last bit precedes first bit");
  if (!e.t3) return std::nullopt;
  const Tick lilo = *e.t3 - e.t2;
  const Tick filo = *e.t3 - e.t1;
  const Tick fit = e.t2 - e.t1;
  return std::min(lilo, filo - nfot(fit, e.input_rate, e.output_rate));
}

Tick mimo_from_cells_slow_input(Tick last_ctd, const LinkRate& input_rate,
                                const MonitorModel& monitor) {
  const Tick r = last_ctd - (input_rate.cell_time + monitor.overhead);
  if (r < 0)
    throw std::runtime_error("mimo_from_cells_slow_input: negative latency, overhead miscalibrated");
  return r;
}

Tick mimo_from_cells_fast_input(Tick first_ctd, Tick first_last_interarrival,
                                const LinkRate& input_rate, const LinkRate& output_rate, Tick fit,
                                const MonitorModel& monitor) {
  const Tick fifo = first_ctd - (output_rate.cell_time + monitor.overhead);
  const Tick folo = first_last_interarrival + output_rate.cell_time;
  const Tick r = fifo + folo - nfot(fit, input_rate, output_rate);
  if (r < 0)
    throw std::runtime_error("mimo_from_cells_fast_input: negative latency, overhead miscalibrated");
  return r;
}

std::vector<FrameOutcome> collect_frames(const Trace& trace, const MonitorModel& monitor) {
  std::vector<const CellRecord*> recs;
  recs.reserve(trace.cells.size());
  for (const CellRecord& r : trace.cells)
    if (r.frame_id >= 0) recs.push_back(&r);
  std::sort(recs.begin(), recs.end(), [](const CellRecord* a, const CellRecord* b) {
    return std::tie(a->vc_id, a->branch, a->frame_id, a->seq_in_frame) <
           std::tie(b->vc_id, b->branch, b->frame_id, b->seq_in_frame);
  });

  std::vector<FrameOutcome> out;
  std::size_t i = 0;
  while (i < recs.size()) {
    std::size_t j = i;
    while (j < recs.size() && recs[j]->vc_id == recs[i]->vc_id &&
           recs[j]->branch == recs[i]->branch && recs[j]->frame_id == recs[i]->frame_id)
      ++j;

    FrameOutcome f;
    f.vc_id = recs[i]->vc_id;
    f.branch = recs[i]->branch;
    f.frame_id = recs[i]->frame_id;
    f.t1 = recs[i]->entry_first_bit;
    f.t2 = recs[j - 1]->entry_last_bit;
    for (std::size_t k = i; k < j; ++k)
      if (recs[k]->is_last) f.payload_octets = recs[k]->frame_payload_octets;

    std::vector<Cell> delivered;
    for (std::size_t k = i; k < j; ++k) {
      if (!recs[k]->delivered()) continue;
      Cell c;
      c.vc_id = recs[k]->vc_id;
      c.frame_id = recs[k]->frame_id;
      c.seq_in_frame = static_cast<int>(recs[k]->seq_in_frame);
      c.is_first = recs[k]->is_first;
      c.is_last = recs[k]->is_last;
      c.frame_payload_octets = recs[k]->frame_payload_octets;
      delivered.push_back(c);
    }
    if (!delivered.empty() && std::holds_alternative<Frame>(reassemble(delivered))) {
      f.delivered = true;
      const CellRecord& first = *recs[i];
      const CellRecord& last = *recs[j - 1];
      f.t3 = *last.exit_last_bit;
      f.first_ctd_measured = (*first.exit_last_bit - first.entry_first_bit) + monitor.overhead;
      f.last_ctd_measured = (*last.exit_last_bit - last.entry_first_bit) + monitor.overhead;
      f.first_last_interarrival = *last.exit_last_bit - *first.exit_last_bit;
    }
    out.push_back(std::move(f));
    i = j;
  }
  return out;
}

FrameEvents frame_events(const FrameOutcome& f, const LinkRate& input_rate,
                         const LinkRate& output_rate) {
  FrameEvents e;
  e.t1 = f.t1;
  e.t2 = f.t2;
  e.t3 = f.t3;
  e.input_rate = input_rate;
  e.output_rate = output_rate;
  return e;
}

std::optional<Tick> mimo_cell_level(const FrameOutcome& f, const LinkRate& input_rate,
                                    const LinkRate& output_rate, const MonitorModel& monitor) {
  if (!f.delivered) return std::nullopt;
  if (input_rate.bits_per_second <= output_rate.bits_per_second)
    return mimo_from_cells_slow_input(f.last_ctd_measured, input_rate, monitor);
  return mimo_from_cells_fast_input(f.first_ctd_measured, f.first_last_interarrival, input_rate,
                                    output_rate, f.t2 - f.t1, monitor);
}

std::vector<std::optional<Tick>> mimo_series(const std::vector<FrameOutcome>& frames, int vc_id,
                                             int branch, const LinkRate& input_rate,
                                             const LinkRate& output_rate, Tick w_start, Tick w_end,
                                             std::int64_t max_frames) {
  std::vector<const FrameOutcome*> sel;
  for (const FrameOutcome& f : frames)
    if (f.vc_id == vc_id && f.branch == branch && f.t1 >= w_start && f.t1 < w_end)
      sel.push_back(&f);
  std::sort(sel.begin(), sel.end(),
            [](const FrameOutcome* a, const FrameOutcome* b) { return a->frame_id < b->frame_id; });
  if (max_frames > 0 && static_cast<std::int64_t>(sel.size()) > max_frames)
    sel.resize(static_cast<std::size_t>(max_frames));
  std::vector<std::optional<Tick>> out;
  out.reserve(sel.size());
  for (const FrameOutcome* f : sel)
    out.push_back(mimo_from_events(frame_events(*f, input_rate, output_rate)));
  return out;
}

std::vector<VcWindowStats> window_stats(const std::vector<FrameOutcome>& frames, Tick w_start,
                                        Tick w_end) {
  if (w_end <= w_start) throw std::invalid_argument("window_stats: empty window");
  std::map<std::pair<int, int>, VcWindowStats> acc;
  for (const FrameOutcome& f : frames) {
    if (f.t1 < w_start || f.t1 >= w_end) continue;
    VcWindowStats& s = acc[{f.vc_id, f.branch}];
    s.vc_id = f.vc_id;
    s.branch = f.branch;
    s.frames_in += 1;
    if (f.delivered) {
      s.frames_out += 1;
      s.payload_octets_out += f.payload_octets;
    }
  }
  const double window_seconds =
      static_cast<double>(w_end - w_start) / static_cast<double>(kPicosPerSecond);
  std::vector<VcWindowStats> out;
  out.reserve(acc.size());
  for (auto& [key, s] : acc) {
    s.delivered_effective_bps = static_cast<double>(s.payload_octets_out) * 8.0 / window_seconds;
    out.push_back(s);
  }
  return out;
}

namespace {

bool loss_free(const LoadProbe& p) { return p.frames_out == p.frames_in; }

const LoadProbe& log_probe(std::vector<ProbeLogEntry>& log, const LoadRunner& run,
                           const char* phase, double fraction) {
  log.push_back({phase, fraction, run(fraction)});
  return log.back().probe;
}

}  // namespace

LosslessResult lossless_throughput(const LoadRunner& run, double epsilon_fraction) {
  if (!(epsilon_fraction > 0.0) || epsilon_fraction >= 1.0)
    throw std::invalid_argument("lossless_throughput: epsilon must be a load fraction in (0,1)");

  LosslessResult r;
  const LoadProbe& full = log_probe(r.log, run, "probe", 1.0);
  double lo;
  if (loss_free(full)) {
    lo = 1.0;
  } else {
    const LoadProbe& base = log_probe(r.log, run, "probe", epsilon_fraction);
    if (!loss_free(base)) {
      r.found = false;  // below measurement floor
      r.load_fraction = epsilon_fraction;
      r.offered_bps = base.offered_bps;
      r.delivered_bps = base.delivered_bps;
      return r;
    }
    lo = epsilon_fraction;
    double hi = 1.0;
    while (hi - lo > epsilon_fraction) {
      const double mid = 0.5 * (lo + hi);
      if (loss_free(log_probe(r.log, run, "bisect", mid)))
        lo = mid;
      else
        hi = mid;
    }
  }

  // Confirmation run at the returned rate; on a non-monotone edge, step
  // down by epsilon until loss-free again.
  const LoadProbe* confirm = &log_probe(r.log, run, "confirm", lo);
  while (!loss_free(*confirm) && lo - epsilon_fraction > epsilon_fraction / 2) {
    lo -= epsilon_fraction;
    confirm = &log_probe(r.log, run, "confirm", lo);
  }
  r.found = loss_free(*confirm);
  r.load_fraction = lo;
  r.offered_bps = confirm->offered_bps;
  r.delivered_bps = confirm->delivered_bps;
  return r;
}

std::vector<double> default_sweep_grid() {
  std::vector<double> g;
  for (int i = 0; i < 21; ++i) g.push_back(0.05 + static_cast<double>(i) * (0.95 / 20.0));
  g.back() = 1.0;
  return g;
}

PeakResult peak_throughput(const LoadRunner& run, const std::vector<double>& sweep_grid,
                           int refine_iters) {
  if (sweep_grid.empty()) throw std::invalid_argument("peak_throughput: empty sweep grid");
  for (std::size_t i = 0; i < sweep_grid.size(); ++i) {
    if (!(sweep_grid[i] > 0.0) || sweep_grid[i] > 1.0)
      throw std::invalid_argument("peak_throughput: grid points must lie in (0,1]");
    if (i > 0 && sweep_grid[i] <= sweep_grid[i - 1])
      throw std::invalid_argument("peak_throughput: grid must increase");
  }

  PeakResult r;
  auto consider = [&](double fraction, const LoadProbe& p) {
    if (p.delivered_bps > r.delivered_bps) {
      r.delivered_bps = p.delivered_bps;
      r.offered_bps = p.offered_bps;
      r.load_fraction = fraction;
    }
  };

  std::size_t best = 0;
  double best_delivered = -1.0;
  for (std::size_t i = 0; i < sweep_grid.size(); ++i) {
    const LoadProbe& p = log_probe(r.log, run, "sweep", sweep_grid[i]);
    consider(sweep_grid[i], p);
    if (p.delivered_bps > best_delivered) {
      best_delivered = p.delivered_bps;
      best = i;
    }
  }

  if (refine_iters > 0 && sweep_grid.size() > 1) {
    double a = sweep_grid[best > 0 ? best - 1 : 0];
    double b = sweep_grid[std::min(best + 1, sweep_grid.size() - 1)];
    const double invphi = 0.6180339887498949;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    LoadProbe f1 = log_probe(r.log, run, "refine", x1);
    consider(x1, f1);
    LoadProbe f2 = log_probe(r.log, run, "refine", x2);
    consider(x2, f2);
    for (int it = 2; it < refine_iters; ++it) {
      if (f1.delivered_bps < f2.delivered_bps) {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + invphi * (b - a);
        f2 = log_probe(r.log, run, "refine", x2);
        consider(x2, f2);
      } else {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - invphi * (b - a);
        f1 = log_probe(r.log, run, "refine", x1);
        consider(x1, f1);
      }
    }
  }
  return r;
}

LoadProbe full_load_throughput(const LoadRunner& run) { return run(1.0); }

double fairness_index(const std::vector<double>& measured, const std::vector<double>& ideal) {
  if (measured.empty() || measured.size() != ideal.size())
    throw std::invalid_argument("fairness_index: need matching non-empty allocations");
  double sum = 0, sumsq = 0;
  for (std::size_t i = 0; i < measured.size(); ++i) {
    if (!(ideal[i] > 0)) throw std::invalid_argument("fairness_index: ideal allocation must be positive");
    const double x = measured[i] / ideal[i];
    sum += x;
    sumsq += x * x;
  }
  if (sumsq == 0) return 0;  // nobody got anything: k/n with k = 0
  return sum * sum / (static_cast<double>(measured.size()) * sumsq);
}

Rational fairness_index_exact(const std::vector<Rational>& measured,
                              const std::vector<Rational>& ideal) {
  if (measured.empty() || measured.size() != ideal.size())
    throw std::invalid_argument("fairness_index: need matching non-empty allocations");
  Rational sum(0), sumsq(0);
  for (std::size_t i = 0; i < measured.size(); ++i) {
    if (!(ideal[i] > Rational(0)))
      throw std::invalid_argument("fairness_index: ideal allocation must be positive");
    const Rational x = measured[i] / ideal[i];
    sum = sum + x;
    sumsq = sumsq + x * x;
  }
  if (sumsq == Rational(0)) return Rational(0);
  return (sum * sum) / (Rational(static_cast<std::int64_t>(measured.size())) * sumsq);
}

double mean_fairness(const std::vector<double>& per_run_indices) {
  if (per_run_indices.empty()) throw std::invalid_argument("mean_fairness: no runs");
  double sum = 0;
  for (double f : per_run_indices) sum += f;
  return sum / static_cast<double>(per_run_indices.size());
}

double frame_loss_ratio(double frames_in, double frames_out) {
  if (!(frames_in > 0)) throw std::invalid_argument("frame_loss_ratio: zero input");
  if (frames_out > frames_in || frames_out < 0)
    throw std::invalid_argument("frame_loss_ratio: output count out of range");
  return (frames_in - frames_out) / frames_in;
}

double average_flr(const std::vector<std::pair<double, double>>& in_out_per_run) {
  if (in_out_per_run.empty()) throw std::invalid_argument("average_flr: no runs");
  double in_sum = 0, out_sum = 0;
  for (const auto& [in, out] : in_out_per_run) {
    if (in < 0 || out < 0 || out > in) throw std::invalid_argument("average_flr: bad run counts");
    in_sum += in;
    out_sum += out;
  }
  if (!(in_sum > 0)) throw std::invalid_argument("average_flr: zero input");
  return (in_sum - out_sum) / in_sum;
}

MfbsResult mfbs_search(const BurstRunner& run, std::int64_t payload_octets,
                       std::int64_t probe_ceiling) {
  if (payload_octets < 1) throw std::invalid_argument("mfbs_search: payload must be positive");
  if (probe_ceiling < 1) throw std::invalid_argument("mfbs_search: ceiling must be positive");

  MfbsResult r;
  r.probe_ceiling = probe_ceiling;
  auto probe = [&](std::int64_t b) {
    const bool ok = run(b);
    r.log.push_back({b, ok});
    return ok;
  };

  std::int64_t lo = 0;   // loss-free (empty burst trivially is)
  std::int64_t hi = -1;  // lossy
  if (!probe(1)) {
    hi = 1;
  } else {
    lo = 1;
    for (std::int64_t b = 2; b <= probe_ceiling; b *= 2) {
      if (probe(b))
        lo = b;
      else {
        hi = b;
        break;
      }
      if (b > probe_ceiling / 2) break;
    }
    if (hi < 0 && lo < probe_ceiling) {
      if (probe(probe_ceiling))
        lo = probe_ceiling;
      else
        hi = probe_ceiling;
    }
  }
  if (hi < 0) {
    r.unbounded = true;
    r.frames = lo;
    r.octets = lo * payload_octets;
    return r;
  }
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (probe(mid))
      lo = mid;
    else
      hi = mid;
  }
  r.frames = lo;
  r.octets = lo * payload_octets;
  return r;
}

double mfbs_cells_prediction(std::int64_t buffer_cells, double r_i_cells_per_s,
                             double r_o_cells_per_s) {
  if (buffer_cells < 1) throw std::invalid_argument("mfbs_cells_prediction: empty buffer");
  if (!(r_i_cells_per_s > r_o_cells_per_s))
    throw std::invalid_argument("mfbs_cells_prediction: input must exceed drain rate");
  return static_cast<double>(buffer_cells) * r_i_cells_per_s / (r_i_cells_per_s - r_o_cells_per_s);
}

namespace {

std::optional<Tick> single_frame_mimo(const Trace& trace, const LinkRate& in, const LinkRate& out,
                                      const char* what) {
  const std::vector<FrameOutcome> frames = collect_frames(trace, MonitorModel{});
  if (frames.size() != 1)
    throw std::invalid_argument(std::string("call_establishment_latency: ") + what +
                                " trace must hold exactly one frame");
  return mimo_from_events(frame_events(frames.front(), in, out));
}

}  // namespace

std::optional<Tick> call_establishment_latency(const Trace& setup_trace, const LinkRate& setup_in,
                                               const LinkRate& setup_out,
                                               const Trace& connect_trace,
                                               const LinkRate& connect_in,
                                               const LinkRate& connect_out) {
  const auto setup = single_frame_mimo(setup_trace, setup_in, setup_out, "setup");
  const auto connect = single_frame_mimo(connect_trace, connect_in, connect_out, "connect");
  if (!setup || !connect) return std::nullopt;
  return *setup + *connect;
}

double application_goodput(std::int64_t received_frames, std::int64_t transmitted_frames) {
  if (transmitted_frames <= 0) throw std::invalid_argument("application_goodput: zero transmitted");
  if (received_frames < 0 || received_frames > transmitted_frames)
    throw std::invalid_argument("application_goodput: received count out of range");
  return static_cast<double>(received_frames) / static_cast<double>(transmitted_frames);
}

}  // namespace atmbench
