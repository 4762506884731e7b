// Frame-level metrics computed from cell traces: MIMO latency (event-level
// and cell-level paths), throughput levels, fairness, loss ratios, burst
// size, call establishment latency and goodput.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "atmbench/model.hpp"
#include "atmbench/rational.hpp"
#include "atmbench/stats.hpp"
#include "atmbench/ticks.hpp"
#include "atmbench/trace.hpp"

namespace atmbench {

// The three frame events: first bit in, last bit in, last bit out.
struct FrameEvents {
  Tick t1 = 0;
  Tick t2 = 0;
  std::optional<Tick> t3;  // nullopt: frame lost, latency unbounded
  LinkRate input_rate;
  LinkRate output_rate;
};

// Nominal frame output time: FIT scaled by input rate over output rate.
Tick nfot(Tick fit, const LinkRate& input_rate, const LinkRate& output_rate);

// min{LILO, FILO - NFOT}; nullopt when the frame was lost.
std::optional<Tick> mimo_from_events(const FrameEvents& e);

// Cell-level reconstruction for input rate <= output rate. last_ctd is the
// monitor-measured transfer delay of the frame's last cell (first bit in to
// last bit out, plus monitor overhead).
Tick mimo_from_cells_slow_input(Tick last_ctd, const LinkRate& input_rate,
                                const MonitorModel& monitor);

// Cell-level reconstruction for input rate >= output rate. first_ctd is the
// measured transfer delay of the first cell; first_last_interarrival the
// output-side spacing between first and last cell last bits; fit = t2 - t1.
Tick mimo_from_cells_fast_input(Tick first_ctd, Tick first_last_interarrival,
                                const LinkRate& input_rate, const LinkRate& output_rate, Tick fit,
                                const MonitorModel& monitor);

// One frame's fate on one flow (VC branch), assembled from the trace.
// Measured cell quantities carry the monitor's overhead bias, exactly what
// a real monitor would report; the mimo_from_cells_* paths subtract it.
struct FrameOutcome {
  int vc_id = 0;
  int branch = 0;
  std::int64_t frame_id = 0;
  bool delivered = false;
  std::int64_t payload_octets = 0;  // 0 when the trailer cell was lost
  Tick t1 = 0;
  Tick t2 = 0;
  std::optional<Tick> t3;
  Tick first_ctd_measured = 0;         // valid when delivered
  Tick last_ctd_measured = 0;          // valid when delivered
  Tick first_last_interarrival = 0;    // valid when delivered
};

// Groups trace records into frames per (vc, branch) and reassembles each.
// CBR records (frame_id < 0) are skipped. Throws TraceCorruption on cell
// sets the network cannot produce.
std::vector<FrameOutcome> collect_frames(const Trace& trace, const MonitorModel& monitor);

FrameEvents frame_events(const FrameOutcome& f, const LinkRate& input_rate,
                         const LinkRate& output_rate);

// Applies the slow- or fast-input cell-level path by rate comparison; both
// agree at rate equality. nullopt when the frame was lost.
std::optional<Tick> mimo_cell_level(const FrameOutcome& f, const LinkRate& input_rate,
                                    const LinkRate& output_rate, const MonitorModel& monitor);

// MIMO latencies of one flow's frames with t1 in [w_start, w_end), ordered
// by frame id; max_frames > 0 truncates to the first p frames.
std::vector<std::optional<Tick>> mimo_series(const std::vector<FrameOutcome>& frames, int vc_id,
                                             int branch, const LinkRate& input_rate,
                                             const LinkRate& output_rate, Tick w_start, Tick w_end,
                                             std::int64_t max_frames = 0);

// Per-flow frame counts and delivered payload over a window; frames belong
// to the window when their first bit enters inside it.
struct VcWindowStats {
  int vc_id = 0;
  int branch = 0;
  std::int64_t frames_in = 0;
  std::int64_t frames_out = 0;
  std::int64_t payload_octets_out = 0;
  double delivered_effective_bps = 0;
};

std::vector<VcWindowStats> window_stats(const std::vector<FrameOutcome>& frames, Tick w_start,
                                        Tick w_end);

// --- Throughput levels ---

// One experiment at a fractional load of the full (100%) rate.
struct LoadProbe {
  double offered_bps = 0;  // aggregate effective offered rate
  std::int64_t frames_in = 0;
  std::int64_t frames_out = 0;
  double delivered_bps = 0;  // aggregate delivered effective rate
};

// The harness binds system + traffic template into one of these.
using LoadRunner = std::function<LoadProbe(double load_fraction)>;

struct ProbeLogEntry {
  std::string phase;  // ladder | bisect | refine | confirm | full_load
  double load_fraction = 0;
  LoadProbe probe;
};

struct LosslessResult {
  bool found = false;  // false: loss even at the minimum probe rate
  double load_fraction = 0;
  double offered_bps = 0;
  double delivered_bps = 0;
  std::vector<ProbeLogEntry> log;
};

// Bisection over load with the zero-loss predicate; epsilon_fraction is the
// resolution as a fraction of full load. Ends with a confirmation run.
LosslessResult lossless_throughput(const LoadRunner& run, double epsilon_fraction);

struct PeakResult {
  double load_fraction = 0;
  double offered_bps = 0;
  double delivered_bps = 0;
  std::vector<ProbeLogEntry> log;
};

// Sweep the grid, then golden-section refinement around the best point.
PeakResult peak_throughput(const LoadRunner& run, const std::vector<double>& sweep_grid,
                           int refine_iters);

LoadProbe full_load_throughput(const LoadRunner& run);

std::vector<double> default_sweep_grid();  // 21 points, 5% to 100%

// --- Fairness ---

// Jain index over relative allocations x_i = measured_i / ideal_i.
double fairness_index(const std::vector<double>& measured, const std::vector<double>& ideal);
Rational fairness_index_exact(const std::vector<Rational>& measured,
                              const std::vector<Rational>& ideal);

double mean_fairness(const std::vector<double>& per_run_indices);

// --- Frame loss ratio ---

double frame_loss_ratio(double frames_in, double frames_out);

// Aggregate FLR over runs as a ratio of sums, never a mean of per-run
// ratios: {(100,90),(300,240)} averages to 0.175, not 0.15.
double average_flr(const std::vector<std::pair<double, double>>& in_out_per_run);

// --- Maximum frame burst size ---

// true: the burst crossed without loss.
using BurstRunner = std::function<bool(std::int64_t burst_frames)>;

struct MfbsResult {
  bool unbounded = false;       // no loss up to the probe ceiling
  std::int64_t frames = 0;      // largest loss-free burst
  std::int64_t octets = 0;      // the same burst in AAL payload octets
  std::int64_t probe_ceiling = 0;
  std::vector<std::pair<std::int64_t, bool>> log;  // (burst, loss-free)
};

// Exponential growth until first loss, then bisection to the exact
// boundary: result is loss-free, result + 1 frame is lossy.
MfbsResult mfbs_search(const BurstRunner& run, std::int64_t payload_octets,
                       std::int64_t probe_ceiling);

// Occupancy model: a buffer of B cells filled at r_i and drained at r_o
// overflows after about B * r_i / (r_i - r_o) cells arrive.
double mfbs_cells_prediction(std::int64_t buffer_cells, double r_i_cells_per_s,
                             double r_o_cells_per_s);

// --- Signaling ---

// MIMO(setup) + MIMO(connect); nullopt when either frame was lost. Each
// trace must contain exactly one signaling frame.
std::optional<Tick> call_establishment_latency(const Trace& setup_trace,
                                               const LinkRate& setup_in, const LinkRate& setup_out,
                                               const Trace& connect_trace,
                                               const LinkRate& connect_in,
                                               const LinkRate& connect_out);

// --- Application goodput ---

double application_goodput(std::int64_t received_frames, std::int64_t transmitted_frames);

}  // namespace atmbench
