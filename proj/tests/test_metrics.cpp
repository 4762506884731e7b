#include <cmath>
#include <optional>
#include <vector>

#include "atmbench/metrics.hpp"
#include "atmbench/simulator.hpp"
#include "atmbench/topology.hpp"
#include "doctest.h"

using namespace atmbench;

namespace {

CellRecord rec(int vc, std::int64_t frame, std::int64_t seq, bool first, bool last, Tick ef,
               Tick el, std::optional<Tick> xl, std::int64_t payload = 0) {
  CellRecord r;
  r.vc_id = vc;
  r.frame_id = frame;
  r.seq_in_frame = seq;
  r.is_first = first;
  r.is_last = last;
  r.entry_first_bit = ef;
  r.entry_last_bit = el;
  r.exit_last_bit = xl;
  r.frame_payload_octets = payload;
  return r;
}

NetworkModel two_port(std::int64_t in_bps, std::int64_t out_bps, Tick cell_latency,
                      std::int64_t buffer_cells, Tick overhead) {
  NetworkModel net;
  SwitchModel sw;
  sw.n_ports = 2;
  sw.port_rate = {LinkRate(in_bps), LinkRate(out_bps)};
  sw.cell_latency = cell_latency;
  sw.buffer_cells = buffer_cells;
  net.switches.push_back(std::move(sw));
  net.monitor.overhead = overhead;
  return net;
}

}  // namespace

TEST_CASE("tick arithmetic anchors") {
  CHECK(LinkRate(155'520'000).cell_time == 2'726'337);  // 424e12 / 155.52e6, half-up
  CHECK(LinkRate(424'000'000).cell_time == 1'000'000);
  CHECK(ns_to_ticks(10) == 10'000);
  CHECK(div_round_half_up(15, 2) == 8);
  CHECK(div_round_half_up(13, 2) == 7);
  CHECK_THROWS_AS(div_round_half_up(-1, 2), std::invalid_argument);
  CHECK_THROWS_AS(div_round_half_up(1, 0), std::invalid_argument);
}

TEST_CASE("nominal frame output time scales by the rate ratio") {
  const LinkRate r1(100'000'000), r2(200'000'000);
  CHECK(nfot(4, r2, r1) == 8);
  CHECK(nfot(8, r1, r2) == 4);
  CHECK(nfot(100, r1, r1) == 100);
  CHECK(nfot(0, r1, r2) == 0);
  // Half-up rounding: 5 * 1/2 = 2.5 rounds to 3.
  CHECK(nfot(5, r1, r2) == 3);
  CHECK_THROWS_AS(nfot(-1, r1, r2), std::invalid_argument);
}

TEST_CASE("event-level latency takes the smaller of the two definitions") {
  const LinkRate r(100'000'000);
  // Equal rates: NFOT equals FIT, the two alternatives coincide.
  FrameEvents e{0, 10, 15, r, r};
  CHECK(mimo_from_events(e) == 5);

  // Input twice as fast: FILO - NFOT undercuts LILO.
  const LinkRate fast(200'000'000);
  FrameEvents f{0, 4, 12, fast, r};
  // LILO = 8, FILO - NFOT = 12 - 8 = 4.
  CHECK(mimo_from_events(f) == 4);

  FrameEvents lost{0, 4, std::nullopt, fast, r};
  CHECK_FALSE(mimo_from_events(lost).has_value());

  FrameEvents bad{10, 4, 20, r, r};
  CHECK_THROWS_AS(mimo_from_events(bad), std::invalid_argument);
}

TEST_CASE("slow-input reconstruction strips one input cell time and the overhead") {
  LinkRate in(424'000'000);  // cell time 1e6 ticks
  in.cell_time = 400;        // hand value keeps the arithmetic readable
  MonitorModel mon;
  CHECK(mimo_from_cells_slow_input(1000, in, mon) == 600);
  mon.overhead = 100;
  CHECK(mimo_from_cells_slow_input(1000, in, mon) == 500);
  CHECK_THROWS_AS(mimo_from_cells_slow_input(300, in, mon), std::runtime_error);
}

TEST_CASE("fast-input reconstruction composes FIFO and FOLO") {
  const LinkRate in(848'000'000'000);   // cell time 500
  const LinkRate out(424'000'000'000);  // cell time 1000
  MonitorModel mon;
  // FIFO = 3000 - 1000 = 2000, FOLO = 1500 + 1000 = 2500, NFOT(2000) = 4000.
  CHECK(mimo_from_cells_fast_input(3000, 1500, in, out, 2000, mon) == 500);
  mon.overhead = 250;
  CHECK(mimo_from_cells_fast_input(3250, 1500, in, out, 2000, mon) == 500);
  CHECK_THROWS_AS(mimo_from_cells_fast_input(500, 1500, in, out, 2000, mon), std::runtime_error);
}

TEST_CASE("collect_frames assembles outcomes from a hand-built trace") {
  Trace tr;
  // Frame 0 on vc 0: two cells, both delivered.
  tr.cells.push_back(rec(0, 0, 0, true, false, 0, 100, 500));
  tr.cells.push_back(rec(0, 0, 1, false, true, 100, 200, 600, 64));
  // Frame 1 on vc 0: second cell lost.
  tr.cells.push_back(rec(0, 1, 0, true, false, 1000, 1100, 1500));
  tr.cells.push_back(rec(0, 1, 1, false, true, 1100, 1200, std::nullopt, 64));
  // CBR filler must be ignored.
  tr.cells.push_back(rec(7, -1, 0, false, false, 0, 100, 400));

  MonitorModel mon;
  mon.overhead = 7;
  const auto frames = collect_frames(tr, mon);
  REQUIRE(frames.size() == 2);

  const FrameOutcome& ok = frames[0];
  CHECK(ok.frame_id == 0);
  CHECK(ok.delivered);
  CHECK(ok.payload_octets == 64);
  CHECK(ok.t1 == 0);
  CHECK(ok.t2 == 200);
  REQUIRE(ok.t3.has_value());
  CHECK(*ok.t3 == 600);
  CHECK(ok.first_ctd_measured == 507);        // 500 - 0, plus overhead
  CHECK(ok.last_ctd_measured == 507);         // 600 - 100, plus overhead
  CHECK(ok.first_last_interarrival == 100);

  const FrameOutcome& lost = frames[1];
  CHECK(lost.frame_id == 1);
  CHECK_FALSE(lost.delivered);
  CHECK_FALSE(lost.t3.has_value());
}

TEST_CASE("cell-level and event-level latency agree on simulated traffic") {
  // Slow, equal, and fast input/output rate pairs; the calibrated monitor
  // overhead must cancel out of the cell-level reconstruction.
  struct RatePair {
    std::int64_t in, out;
  };
  for (const RatePair rp : {RatePair{100'000'000, 155'520'000},
                            RatePair{155'520'000, 155'520'000},
                            RatePair{155'520'000, 100'000'000}}) {
    const NetworkModel net = two_port(rp.in, rp.out, ns_to_ticks(10), 4096, ns_to_ticks(3));
    const auto cfg = build_straight(2);
    TrafficSpec t;
    t.vc_id = 0;
    t.payload_octets = 1518;
    t.effective_bps = 0.5 * link_payload_capacity_bps(LinkRate(100'000'000), 1518);
    t.frame_count = 25;
    const Trace trace = simulate(net, cfg, {t}, {ns_to_ticks(1'000'000'000)});

    const LinkRate in(rp.in), out(rp.out);
    const auto frames = collect_frames(trace, net.monitor);
    REQUIRE(frames.size() == 25);
    for (const FrameOutcome& f : frames) {
      REQUIRE(f.delivered);
      const auto ev = mimo_from_events(frame_events(f, in, out));
      const auto cl = mimo_cell_level(f, in, out, net.monitor);
      REQUIRE(ev.has_value());
      REQUIRE(cl.has_value());
      CHECK(*ev == *cl);
    }
  }
}

TEST_CASE("monitor overhead cancels out of the cell-level path") {
  const NetworkModel net = two_port(155'520'000, 155'520'000, ns_to_ticks(10), 64, 0);
  const auto cfg = build_straight(2);
  TrafficSpec t;
  t.vc_id = 0;
  t.payload_octets = 9188;
  t.effective_bps = 0.4 * link_payload_capacity_bps(LinkRate(155'520'000), 9188);
  t.frame_count = 5;
  const Trace trace = simulate(net, cfg, {t}, {ns_to_ticks(1'000'000'000)});

  const LinkRate r(155'520'000);
  MonitorModel a, b;
  a.overhead = 0;
  b.overhead = ns_to_ticks(25);
  const auto fa = collect_frames(trace, a);
  const auto fb = collect_frames(trace, b);
  REQUIRE(fa.size() == fb.size());
  for (std::size_t i = 0; i < fa.size(); ++i) {
    const auto la = mimo_cell_level(fa[i], r, r, a);
    const auto lb = mimo_cell_level(fb[i], r, r, b);
    REQUIRE(la.has_value());
    REQUIRE(lb.has_value());
    CHECK(*la == *lb);
  }
}

TEST_CASE("an unloaded frame's latency is the fabric latency plus one cell time") {
  const Tick lat = ns_to_ticks(10);
  const LinkRate r(155'520'000);
  const NetworkModel net = two_port(155'520'000, 155'520'000, lat, 64, 0);
  const auto cfg = build_straight(2);
  for (std::int64_t payload : {40, 88, 1518, 9188}) {
    TrafficSpec t;
    t.vc_id = 0;
    t.payload_octets = payload;
    t.effective_bps = 0.3 * link_payload_capacity_bps(r, payload);
    t.frame_count = 3;
    const Trace trace = simulate(net, cfg, {t}, {ns_to_ticks(4'000'000'000)});
    const auto frames = collect_frames(trace, net.monitor);
    REQUIRE(frames.size() == 3);
    for (const FrameOutcome& f : frames) {
      const auto m = mimo_from_events(frame_events(f, r, r));
      REQUIRE(m.has_value());
      CHECK(*m == lat + r.cell_time);
    }
  }
}

TEST_CASE("mimo_series filters by flow and window and truncates to p") {
  const LinkRate r(155'520'000);
  std::vector<FrameOutcome> frames;
  for (std::int64_t id = 0; id < 4; ++id) {
    FrameOutcome f;
    f.vc_id = 0;
    f.frame_id = id;
    f.t1 = id * 1000;
    f.t2 = id * 1000 + 100;
    f.delivered = id != 2;
    if (f.delivered) f.t3 = id * 1000 + 400;
    frames.push_back(f);
  }
  FrameOutcome other;
  other.vc_id = 1;
  other.t1 = 0;
  other.t2 = 1;
  other.delivered = true;
  other.t3 = 10;
  frames.push_back(other);

  const auto all = mimo_series(frames, 0, 0, r, r, 0, 4000);
  REQUIRE(all.size() == 4);
  CHECK(all[0] == 300);
  CHECK(all[1] == 300);
  CHECK_FALSE(all[2].has_value());
  CHECK(all[3] == 300);

  CHECK(mimo_series(frames, 0, 0, r, r, 1000, 3000).size() == 2);
  CHECK(mimo_series(frames, 0, 0, r, r, 0, 4000, 2).size() == 2);
  CHECK(mimo_series(frames, 9, 0, r, r, 0, 4000).empty());
}

TEST_CASE("window stats bucket frames by their first entry bit") {
  std::vector<FrameOutcome> frames;
  for (std::int64_t id = 0; id < 3; ++id) {
    FrameOutcome f;
    f.vc_id = 0;
    f.frame_id = id;
    f.t1 = id * 100;
    f.t2 = f.t1 + 10;
    f.delivered = true;
    f.t3 = f.t1 + 50;
    f.payload_octets = 1000;
    frames.push_back(f);
  }
  frames[2].delivered = false;
  frames[2].t3.reset();
  frames[2].payload_octets = 0;

  // Window [100, 300) over one second of ticks catches frames 1 and 2.
  const auto stats = window_stats(frames, 100, 100 + kPicosPerSecond);
  REQUIRE(stats.size() == 1);
  CHECK(stats[0].frames_in == 2);
  CHECK(stats[0].frames_out == 1);
  CHECK(stats[0].payload_octets_out == 1000);
  CHECK(stats[0].delivered_effective_bps == doctest::Approx(8000.0).epsilon(1e-12));

  // Half-open edges: a frame exactly at w_end is out.
  CHECK(window_stats(frames, 0, 200).size() == 1);
  CHECK(window_stats(frames, 0, 200)[0].frames_in == 2);
  CHECK_THROWS_AS(window_stats(frames, 10, 10), std::invalid_argument);
}

namespace {

// Loss-free up to the knee fraction, delivery caps there too.
LoadRunner step_runner(double knee) {
  return [knee](double fraction) {
    LoadProbe p;
    p.offered_bps = fraction * 1e6;
    p.frames_in = 1000;
    p.frames_out = fraction <= knee ? 1000 : 900;
    p.delivered_bps = std::min(fraction, knee) * 1e6;
    return p;
  };
}

}  // namespace

TEST_CASE("lossless search brackets the knee to within epsilon") {
  const auto result = lossless_throughput(step_runner(0.6), 0.001);
  CHECK(result.found);
  CHECK(result.load_fraction <= 0.6);
  CHECK(result.load_fraction > 0.6 - 0.001);
  CHECK(result.offered_bps == doctest::Approx(result.load_fraction * 1e6));
  // The log records every probe, bisection included, confirm last.
  CHECK(result.log.size() >= 3);
  CHECK(result.log.back().phase == "confirm");
}

TEST_CASE("a loss-free system is lossless at full load") {
  const auto result = lossless_throughput(step_runner(1.0), 0.01);
  CHECK(result.found);
  CHECK(result.load_fraction == 1.0);
}

TEST_CASE("loss at the measurement floor reports not found") {
  LoadRunner always_lossy = [](double fraction) {
    LoadProbe p;
    p.offered_bps = fraction * 1e6;
    p.frames_in = 1000;
    p.frames_out = 999;
    p.delivered_bps = fraction * 0.999e6;
    return p;
  };
  const auto result = lossless_throughput(always_lossy, 0.01);
  CHECK_FALSE(result.found);
  CHECK(result.load_fraction == 0.01);
  CHECK_THROWS_AS(lossless_throughput(step_runner(0.5), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(lossless_throughput(step_runner(0.5), 1.0), std::invalid_argument);
}

TEST_CASE("peak search finds a unimodal maximum") {
  LoadRunner hump = [](double fraction) {
    LoadProbe p;
    p.offered_bps = fraction * 1e6;
    p.frames_in = 1000;
    p.frames_out = 1000;
    const double d = fraction - 0.7;
    p.delivered_bps = 1e6 * (1.0 - d * d);
    return p;
  };
  const auto result = peak_throughput(hump, default_sweep_grid(), 16);
  CHECK(std::fabs(result.load_fraction - 0.7) < 0.02);
  CHECK(result.delivered_bps == doctest::Approx(1e6).epsilon(1e-3));
  bool has_sweep = false, has_refine = false;
  for (const auto& e : result.log) {
    if (e.phase == "sweep") has_sweep = true;
    if (e.phase == "refine") has_refine = true;
  }
  CHECK(has_sweep);
  CHECK(has_refine);
}

TEST_CASE("peak search on a saturating system reports the plateau rate") {
  const auto result = peak_throughput(step_runner(0.6), default_sweep_grid(), 12);
  CHECK(result.delivered_bps == doctest::Approx(0.6e6).epsilon(1e-9));
  CHECK(result.offered_bps >= result.delivered_bps);
}

TEST_CASE("peak search validates the grid") {
  CHECK_THROWS_AS(peak_throughput(step_runner(0.5), {}, 4), std::invalid_argument);
  CHECK_THROWS_AS(peak_throughput(step_runner(0.5), {0.5, 0.5}, 4), std::invalid_argument);
  CHECK_THROWS_AS(peak_throughput(step_runner(0.5), {0.0, 0.5}, 4), std::invalid_argument);
  CHECK_THROWS_AS(peak_throughput(step_runner(0.5), {0.5, 1.5}, 4), std::invalid_argument);
}

TEST_CASE("full load throughput is one probe at fraction one") {
  const LoadProbe p = full_load_throughput(step_runner(0.6));
  CHECK(p.offered_bps == doctest::Approx(1e6));
  CHECK(p.delivered_bps == doctest::Approx(0.6e6));
}

TEST_CASE("default sweep grid spans five percent to full load") {
  const auto g = default_sweep_grid();
  REQUIRE(g.size() == 21);
  CHECK(g.front() == doctest::Approx(0.05));
  CHECK(g.back() == 1.0);
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
}

TEST_CASE("fairness index on relative allocations") {
  CHECK(fairness_index({5, 5, 5}, {5, 5, 5}) == doctest::Approx(1.0).epsilon(1e-15));
  // Equal relative shares are perfectly fair whatever the ideals are.
  CHECK(fairness_index({1, 2, 3}, {2, 4, 6}) == doctest::Approx(1.0).epsilon(1e-15));
  // k of n users served: index k/n.
  CHECK(fairness_index({1, 1, 0, 0}, {1, 1, 1, 1}) == doctest::Approx(0.5).epsilon(1e-15));
  // x = (0.5, 1, 1.5): J = 9 / (3 * 3.5) = 6/7.
  CHECK(fairness_index({1, 2, 3}, {2, 2, 2}) == doctest::Approx(6.0 / 7.0).epsilon(1e-15));
  // Jain's index is scale invariant in the relative shares.
  CHECK(fairness_index({10, 20, 30}, {2, 2, 2}) == doctest::Approx(6.0 / 7.0).epsilon(1e-15));
  CHECK(fairness_index({0, 0}, {1, 1}) == 0.0);
}

TEST_CASE("exact fairness index matches the double path") {
  const Rational six_sevenths =
      fairness_index_exact({Rational(1), Rational(2), Rational(3)},
                           {Rational(2), Rational(2), Rational(2)});
  CHECK(six_sevenths == Rational(6, 7));
  CHECK(fairness_index({1, 2, 3}, {2, 2, 2}) ==
        doctest::Approx(six_sevenths.to_double()).epsilon(1e-15));
  CHECK(fairness_index_exact({Rational(3), Rational(3)}, {Rational(3), Rational(3)}) ==
        Rational(1));
}

TEST_CASE("fairness argument validation") {
  CHECK_THROWS_AS(fairness_index({}, {}), std::invalid_argument);
  CHECK_THROWS_AS(fairness_index({1}, {1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(fairness_index({1, 1}, {1, 0}), std::invalid_argument);
  CHECK_THROWS_AS(mean_fairness({}), std::invalid_argument);
  CHECK(mean_fairness({1.0, 0.5}) == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("frame loss ratio and its aggregate") {
  CHECK(frame_loss_ratio(100, 90) == 0.1);
  CHECK(frame_loss_ratio(400, 400) == 0.0);
  CHECK_THROWS_AS(frame_loss_ratio(0, 0), std::invalid_argument);
  CHECK_THROWS_AS(frame_loss_ratio(10, 11), std::invalid_argument);
  CHECK_THROWS_AS(frame_loss_ratio(10, -1), std::invalid_argument);

  // Ratio of sums, not mean of ratios: 70 lost of 400 offered.
  const double agg = average_flr({{100.0, 90.0}, {300.0, 240.0}});
  CHECK(agg == 0.175);
  CHECK(agg != doctest::Approx(0.15).epsilon(1e-6));
  CHECK_THROWS_AS(average_flr({}), std::invalid_argument);
  CHECK_THROWS_AS(average_flr({{0.0, 0.0}}), std::invalid_argument);
  CHECK_THROWS_AS(average_flr({{10.0, 20.0}}), std::invalid_argument);
}

TEST_CASE("application goodput is the delivered fraction") {
  CHECK(application_goodput(3, 4) == 0.75);
  CHECK(application_goodput(0, 8) == 0.0);
  CHECK(application_goodput(8, 8) == 1.0);
  CHECK_THROWS_AS(application_goodput(1, 0), std::invalid_argument);
  CHECK_THROWS_AS(application_goodput(5, 4), std::invalid_argument);
  CHECK_THROWS_AS(application_goodput(-1, 4), std::invalid_argument);
  // Complement of the loss ratio on dyadic counts.
  CHECK(application_goodput(768, 1024) == 1.0 - frame_loss_ratio(1024, 768));
}

TEST_CASE("burst search pins the loss boundary exactly") {
  auto ok_up_to = [](std::int64_t limit) {
    return [limit](std::int64_t burst) { return burst <= limit; };
  };
  const MfbsResult r = mfbs_search(ok_up_to(100), 40, 4096);
  CHECK_FALSE(r.unbounded);
  CHECK(r.frames == 100);
  CHECK(r.octets == 4000);
  CHECK(r.probe_ceiling == 4096);
  bool saw_pass = false, saw_fail = false;
  for (const auto& [burst, loss_free] : r.log) {
    if (burst == 100) {
      CHECK(loss_free);
      saw_pass = true;
    }
    if (burst == 101) {
      CHECK_FALSE(loss_free);
      saw_fail = true;
    }
  }
  CHECK(saw_pass);
  CHECK(saw_fail);

  const MfbsResult tiny = mfbs_search(ok_up_to(5), 64, 64);
  CHECK(tiny.frames == 5);

  const MfbsResult none = mfbs_search(ok_up_to(0), 64, 64);
  CHECK(none.frames == 0);
  CHECK_FALSE(none.unbounded);

  const MfbsResult open = mfbs_search(ok_up_to(1'000'000), 64, 4096);
  CHECK(open.unbounded);
  CHECK(open.frames == 4096);

  CHECK_THROWS_AS(mfbs_search(ok_up_to(5), 0, 64), std::invalid_argument);
  CHECK_THROWS_AS(mfbs_search(ok_up_to(5), 64, 0), std::invalid_argument);
}

TEST_CASE("burst overflow prediction") {
  CHECK(mfbs_cells_prediction(64, 2.0, 1.0) == 128.0);
  CHECK(mfbs_cells_prediction(100, 5.0, 4.0) == 500.0);
  CHECK_THROWS_AS(mfbs_cells_prediction(0, 2.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(mfbs_cells_prediction(64, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(mfbs_cells_prediction(64, 1.0, 2.0), std::invalid_argument);
}

TEST_CASE("call establishment latency sums the two message latencies") {
  const LinkRate r(100'000'000);
  Trace setup;
  setup.cells.push_back(rec(0, 0, 0, true, true, 0, 100, 300, 40));
  Trace connect;
  connect.cells.push_back(rec(0, 0, 0, true, true, 1000, 1100, 1500, 40));

  const auto lat = call_establishment_latency(setup, r, r, connect, r, r);
  REQUIRE(lat.has_value());
  // 200 for the setup message, 400 for the connect message.
  CHECK(*lat == 600);

  Trace lost_setup;
  lost_setup.cells.push_back(rec(0, 0, 0, true, true, 0, 100, std::nullopt, 40));
  CHECK_FALSE(call_establishment_latency(lost_setup, r, r, connect, r, r).has_value());

  Trace two_frames = setup;
  two_frames.cells.push_back(rec(0, 1, 0, true, true, 5000, 5100, 5300, 40));
  CHECK_THROWS_AS(call_establishment_latency(two_frames, r, r, connect, r, r),
                  std::invalid_argument);
}
