#include <string>

#include "atmbench/testspec.hpp"
#include "doctest.h"

using namespace atmbench;

TEST_CASE("a minimal spec needs only a seed") {
  const TestSpec spec = parse_spec("seed 42\n");
  CHECK(spec.seed == 42);
  CHECK(spec.metrics.empty());
  CHECK(spec.system.ports == 8);
  CHECK(spec.system.rate_bps == std::vector<std::int64_t>{155'520'000});
  CHECK(spec.frame_sizes == std::vector<std::int64_t>({64, 1518, 9188, 65536}));
  CHECK(spec.configs == std::vector<ConfigKind>{ConfigKind::Straight});
  CHECK(spec.output_basename == "report");
}

TEST_CASE("a spec without a seed is rejected") {
  CHECK_THROWS_AS(parse_spec("metric throughput\n"), SpecError);
}

TEST_CASE("comments, blank lines and repeated keys") {
  const TestSpec spec = parse_spec(
      "# benchmark plan\n"
      "seed 7\n"
      "\n"
      "metric throughput   # with trailing comment\n"
      "metric flr\n"
      "metric throughput\n"  // duplicate is dropped
      "frame_sizes 64 1518\n"
      "config straight\n"
      "config k_to_1\n"
      "config_k 3\n");
  CHECK(spec.metrics == std::vector<std::string>({"throughput", "flr"}));
  CHECK(spec.frame_sizes == std::vector<std::int64_t>({64, 1518}));
  REQUIRE(spec.configs.size() == 2);
  CHECK(spec.configs[0] == ConfigKind::Straight);
  CHECK(spec.configs[1] == ConfigKind::KTo1);
  CHECK(spec.config_k == 3);
}

TEST_CASE("the first config line replaces the default") {
  const TestSpec spec = parse_spec("seed 1\nconfig full_cross\n");
  CHECK(spec.configs == std::vector<ConfigKind>{ConfigKind::FullCross});
}

TEST_CASE("system block overrides the defaults") {
  const TestSpec spec = parse_spec(
      "seed 3\n"
      "system {\n"
      "  ports 4\n"
      "  rate_bps 100000000 100000000 155520000 155520000\n"
      "  modules 0 0 1 1\n"
      "  fabrics 0 0\n"
      "  cell_latency_ns 25\n"
      "  buffer_cells 256\n"
      "  monitor_overhead_ns 5\n"
      "  monitor_propagation_ns 2\n"
      "}\n");
  CHECK(spec.system.ports == 4);
  CHECK(spec.system.rate_bps ==
        std::vector<std::int64_t>({100'000'000, 100'000'000, 155'520'000, 155'520'000}));
  CHECK(spec.system.modules == std::vector<int>({0, 0, 1, 1}));
  CHECK(spec.system.fabrics == std::vector<int>({0, 0}));
  CHECK(spec.system.cell_latency_ns == 25);
  CHECK(spec.system.buffer_cells == 256);
  CHECK(spec.system.monitor_overhead_ns == 5);
  CHECK(spec.system.monitor_propagation_ns == 2);
}

TEST_CASE("parse errors carry the line number") {
  try {
    parse_spec("seed 1\nbogus_key 5\n");
    FAIL("expected SpecError");
  } catch (const SpecError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("malformed specs are rejected") {
  CHECK_THROWS_AS(parse_spec("seed 1\nmetric warp_speed\n"), SpecError);
  CHECK_THROWS_AS(parse_spec("seed 1\nframe_sizes 0\n"), SpecError);
  CHECK_THROWS_AS(parse_spec("seed 1\nframe_sizes\n"), SpecError);
  CHECK_THROWS_AS(parse_spec("seed 1\nload_ladder 0.5 1.5\n"), SpecError);
  CHECK_THROWS_AS(parse_spec("seed 1\nalpha 1.0\n"), SpecError);
  CHECK_THROWS_AS(parse_spec("seed 1\nwarmup_fraction 0.6\n"), SpecError);
  CHECK_THROWS_AS(parse_spec("seed 1\np 1\n"), SpecError);
  CHECK_THROWS_AS(parse_spec("seed 1\nrepetitions 0\n"), SpecError);
  CHECK_THROWS_AS(parse_spec("seed 1\nseed -4\n"), SpecError);
  CHECK_THROWS_AS(parse_spec("seed 1\nstagger maybe\n"), SpecError);
  CHECK_THROWS_AS(parse_spec("seed 1\nsystem {\nports 4\n"), SpecError);   // unterminated
  CHECK_THROWS_AS(parse_spec("seed 1\nsystem {\nports one\n}\n"), SpecError);
  CHECK_THROWS_AS(parse_spec("seed 1\nsystem {\nports 1\n}\n"), SpecError);
  CHECK_THROWS_AS(parse_spec("seed 1\nexpect lossless_bps sideways 5\n"), SpecError);
}

TEST_CASE("config parameters are range-checked at parse time") {
  CHECK_THROWS_AS(parse_spec("seed 1\nconfig partial_cross\nconfig_m 9\n"), SpecError);
  CHECK_THROWS_AS(parse_spec("seed 1\nconfig partial_cross\nconfig_m 0\n"), SpecError);
  CHECK_THROWS_AS(parse_spec("seed 1\nconfig k_to_1\nconfig_k 1\n"), SpecError);
  CHECK_THROWS_AS(parse_spec("seed 1\nconfig k_to_1\nconfig_out_port 8\n"), SpecError);
  // Loopback emulation only makes sense for the cross configurations.
  CHECK_THROWS_AS(parse_spec("seed 1\nconfig straight\nloopback on\n"), SpecError);
  const TestSpec ok = parse_spec("seed 1\nconfig partial_cross\nconfig_m 3\nloopback on\n");
  CHECK(ok.use_loopback);
  // The 2-to-1 burst needs two inputs and an output.
  CHECK_THROWS_AS(parse_spec("seed 1\nmetric mfbs\nsystem {\nports 2\n}\n"), SpecError);
}

TEST_CASE("serialization round-trips to a fixed point") {
  const TestSpec spec = parse_spec(
      "seed 99\n"
      "metric throughput\n"
      "metric latency\n"
      "config partial_cross\n"
      "config_m 3\n"
      "frame_sizes 64 1518\n"
      "load_ladder 0.5 1\n"
      "repetitions 2\n"
      "p 50\n"
      "alpha 0.05\n"
      "duration_ns 500000\n"
      "stagger off\n"
      "background_kind full_cross\n"
      "background_fraction 0.25\n"
      "expect lossless_bps min 1000000\n"
      "expect flr max 0.25\n"
      "system {\n"
      "  ports 6\n"
      "  rate_bps 100000000\n"
      "}\n");
  const std::string text = spec.to_text();
  const TestSpec back = parse_spec(text);
  CHECK(back.to_text() == text);
  CHECK(back.seed == 99);
  CHECK(back.metrics == spec.metrics);
  CHECK(back.config_m == 3);
  CHECK(back.system.ports == 6);
  CHECK_FALSE(back.stagger);
  REQUIRE(back.expects.size() == 2);
  CHECK(back.expects[0].key == "lossless_bps");
  CHECK(back.expects[0].is_min);
  CHECK(back.expects[0].value == 1'000'000.0);
  CHECK(back.expects[1].key == "flr");
  CHECK_FALSE(back.expects[1].is_min);
}

TEST_CASE("the default spec serializes and parses back identically") {
  const TestSpec spec = parse_spec("seed 5\nmetric throughput\n");
  const std::string text = spec.to_text();
  const TestSpec back = parse_spec(text);
  CHECK(back.to_text() == text);
}

TEST_CASE("make_network realizes the system block") {
  TestSpec spec = parse_spec(
      "seed 1\n"
      "system {\n"
      "  ports 4\n"
      "  rate_bps 100000000\n"
      "  cell_latency_ns 10\n"
      "  buffer_cells 32\n"
      "  monitor_overhead_ns 3\n"
      "}\n");
  const NetworkModel net = make_network(spec.system);
  REQUIRE(net.switches.size() == 1);
  const SwitchModel& sw = net.switches[0];
  CHECK(sw.n_ports == 4);
  REQUIRE(sw.port_rate.size() == 4);
  // One rate entry broadcasts to every port.
  for (const LinkRate& r : sw.port_rate) CHECK(r.bits_per_second == 100'000'000);
  CHECK(sw.cell_latency == 10'000);  // ns become ticks
  CHECK(sw.buffer_cells == 32);
  CHECK(net.monitor.overhead == 3'000);
}

TEST_CASE("per-port rates must match the port count") {
  CHECK_THROWS_AS(parse_spec("seed 1\nsystem {\nports 4\nrate_bps 100 200\n}\n"), SpecError);
  const TestSpec ok = parse_spec("seed 1\nsystem {\nports 2\nrate_bps 100000000 155520000\n}\n");
  const NetworkModel net = make_network(ok.system);
  CHECK(net.switches[0].port_rate[0].bits_per_second == 100'000'000);
  CHECK(net.switches[0].port_rate[1].bits_per_second == 155'520'000);
}
