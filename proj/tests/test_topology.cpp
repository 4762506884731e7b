#include <algorithm>
#include <set>
#include <vector>

#include "atmbench/topology.hpp"
#include "doctest.h"

using namespace atmbench;

TEST_CASE("straight configuration pairs each input with the next port") {
  const auto cfg = build_straight(8);
  CHECK(cfg.kind == ConfigKind::Straight);
  REQUIRE(cfg.vcs.size() == 8);
  for (int i = 0; i < 8; ++i) {
    CHECK(cfg.vcs[i].input_port == i);
    REQUIRE(cfg.vcs[i].output_ports.size() == 1);
    CHECK(cfg.vcs[i].output_ports[0] == (i + 1) % 8);
  }
}

TEST_CASE("connection configuration VC counts") {
  for (int n : {2, 3, 8, 16}) {
    CHECK(build_straight(n).vcs.size() == static_cast<std::size_t>(n));
    CHECK(build_full_cross(n).vcs.size() == static_cast<std::size_t>(n) * (n - 1));
    for (int m = 1; m <= n - 1; ++m)
      CHECK(build_partial_cross(n, m).vcs.size() == static_cast<std::size_t>(n) * m);
  }
  for (int n : {3, 8, 16})
    for (int k = 2; k <= n - 1; ++k)
      CHECK(build_k_to_1(k, 0, n).vcs.size() == static_cast<std::size_t>(k));
  const auto mc = build_multicast(8);
  REQUIRE(mc.vcs.size() == 1);
  CHECK(mc.vcs[0].output_ports.size() == 7);
}

TEST_CASE("full cross covers every ordered port pair once") {
  const auto cfg = build_full_cross(5);
  std::set<std::pair<int, int>> pairs;
  for (const VC& vc : cfg.vcs) {
    REQUIRE(vc.output_ports.size() == 1);
    CHECK(vc.input_port != vc.output_ports[0]);
    pairs.insert({vc.input_port, vc.output_ports[0]});
  }
  CHECK(pairs.size() == 20);
}

TEST_CASE("k-to-1 inputs skip the shared output port") {
  const auto cfg = build_k_to_1(3, 1, 8);
  REQUIRE(cfg.vcs.size() == 3);
  std::vector<int> inputs;
  for (const VC& vc : cfg.vcs) {
    CHECK(vc.output_ports == std::vector<int>{1});
    CHECK(vc.input_port != 1);
    inputs.push_back(vc.input_port);
  }
  CHECK(inputs == std::vector<int>{0, 2, 3});
}

TEST_CASE("builder argument validation") {
  CHECK_THROWS_AS(build_straight(1), std::invalid_argument);
  CHECK_THROWS_AS(build_partial_cross(4, 0), std::invalid_argument);
  CHECK_THROWS_AS(build_partial_cross(4, 4), std::invalid_argument);
  CHECK_THROWS_AS(build_k_to_1(1, 0, 4), std::invalid_argument);
  CHECK_THROWS_AS(build_k_to_1(4, 0, 4), std::invalid_argument);
  CHECK_THROWS_AS(build_k_to_1(2, 7, 4), std::invalid_argument);
  CHECK_THROWS_AS(build_k_to_1(2, 0, 2), std::invalid_argument);
  CHECK_THROWS_AS(build_multicast(1), std::invalid_argument);
}

TEST_CASE("config kind names round-trip") {
  for (ConfigKind k : {ConfigKind::Straight, ConfigKind::FullCross, ConfigKind::PartialCross,
                       ConfigKind::KTo1, ConfigKind::Multicast})
    CHECK(config_kind_from_string(to_string(k)) == k);
  CHECK_THROWS_AS(config_kind_from_string("diagonal"), std::invalid_argument);
}

TEST_CASE("loopback chain walks every emulated VC exactly once") {
  const std::vector<int> modules(8, 0);
  const auto cfg = build_loopback_throughput(8, 2, modules, 0);
  CHECK(cfg.n_ports == 8);
  CHECK(cfg.m == 2);
  CHECK(cfg.monitor_port == 0);
  // The 8-port 2-out partial cross has 16 VCs, all on one chain.
  REQUIRE(cfg.vcs.size() == 16);
  REQUIRE(cfg.chains.size() == 1);
  REQUIRE(cfg.chains[0].size() == 16);

  // Chain continuity: each hop starts where the previous one ended, and the
  // circuit closes back at the monitor port.
  for (std::size_t i = 0; i + 1 < cfg.chains[0].size(); ++i) {
    const VC& a = cfg.vcs[static_cast<std::size_t>(cfg.chains[0][i])];
    const VC& b = cfg.vcs[static_cast<std::size_t>(cfg.chains[0][i + 1])];
    CHECK(a.output_ports[0] == b.input_port);
  }
  CHECK(cfg.vcs[static_cast<std::size_t>(cfg.chains[0].front())].input_port == 0);
  CHECK(cfg.vcs[static_cast<std::size_t>(cfg.chains[0].back())].output_ports[0] == 0);

  // Emulated VC set is exactly the offset-1..m partial cross.
  std::set<std::pair<int, int>> hops;
  for (const VC& vc : cfg.vcs) hops.insert({vc.input_port, vc.output_ports[0]});
  REQUIRE(hops.size() == 16);
  for (int p = 0; p < 8; ++p)
    for (int j = 1; j <= 2; ++j) CHECK(hops.count({p, (p + j) % 8}) == 1);

  // Every port except the monitor's is looped back.
  CHECK(cfg.loopback_ports == std::vector<int>({1, 2, 3, 4, 5, 6, 7}));
}

TEST_CASE("loopback chain prefers module-crossing hops when it can") {
  const std::vector<int> modules = {0, 0, 0, 0, 1, 1, 1, 1};
  const auto cfg = build_loopback_throughput(8, 2, modules, 0);
  REQUIRE(cfg.vcs.size() == 16);
  REQUIRE(cfg.chains.size() == 1);
  REQUIRE(cfg.chains[0].size() == 16);
  for (std::size_t i = 0; i + 1 < cfg.chains[0].size(); ++i) {
    const VC& a = cfg.vcs[static_cast<std::size_t>(cfg.chains[0][i])];
    const VC& b = cfg.vcs[static_cast<std::size_t>(cfg.chains[0][i + 1])];
    CHECK(a.output_ports[0] == b.input_port);
  }
  // Module map must not change which VCs exist, only their chain order.
  std::set<std::pair<int, int>> hops;
  for (const VC& vc : cfg.vcs) hops.insert({vc.input_port, vc.output_ports[0]});
  CHECK(hops.size() == 16);
}

TEST_CASE("loopback builder argument validation") {
  const std::vector<int> mods4(4, 0);
  CHECK_THROWS_AS(build_loopback_throughput(4, 0, mods4, 0), std::invalid_argument);
  CHECK_THROWS_AS(build_loopback_throughput(4, 4, mods4, 0), std::invalid_argument);
  CHECK_THROWS_AS(build_loopback_throughput(4, 2, {0, 0}, 0), std::invalid_argument);
  CHECK_THROWS_AS(build_loopback_throughput(4, 2, mods4, 4), std::invalid_argument);
}

TEST_CASE("latency background keeps the foreground links one-directional") {
  const std::vector<std::int64_t> rates(8, 155'520'000);
  for (ConfigKind kind : {ConfigKind::Straight, ConfigKind::FullCross, ConfigKind::Multicast}) {
    const auto setup = build_latency_background(rates, kind);
    CHECK(setup.foreground.input_port == 0);
    CHECK(setup.foreground.output_ports == std::vector<int>{7});
    for (const VC& vc : setup.background.vcs) {
      CHECK(vc.role == VcRole::Background);
      // Never inject on the foreground input link, never exit on the
      // foreground output link.
      CHECK(vc.input_port != 0);
      for (int out : vc.output_ports) CHECK(out != 7);
    }
  }
}

TEST_CASE("latency background VC counts over seven logical ports") {
  const std::vector<std::int64_t> rates(8, 155'520'000);
  CHECK(build_latency_background(rates, ConfigKind::Straight).background.vcs.size() == 7);
  CHECK(build_latency_background(rates, ConfigKind::FullCross).background.vcs.size() == 42);
  CHECK(build_latency_background(rates, ConfigKind::PartialCross, 2).background.vcs.size() == 14);
  CHECK(build_latency_background(rates, ConfigKind::Multicast).background.vcs.size() == 1);
  CHECK_THROWS_AS(build_latency_background(rates, ConfigKind::KTo1), std::invalid_argument);
}

TEST_CASE("latency budget splits foreground and background load") {
  const std::vector<std::int64_t> rates = {100, 200, 300, 400};
  const auto setup = build_latency_background(rates, ConfigKind::Straight);
  CHECK(setup.budget.ffl_bps == 100.0);
  CHECK(setup.budget.mbl_bps == 900.0);
  // vc ids are disjoint from the foreground's.
  for (const VC& vc : setup.background.vcs) CHECK(vc.vc_id != setup.foreground.vc_id);
}

TEST_CASE("background lossless rate depends on rate homogeneity") {
  CHECK(max_background_lossless_rate({100, 100, 100}, 3) == 300.0);
  CHECK(max_background_lossless_rate({100, 200, 300}, 3) == 200.0);
  CHECK_THROWS_AS(max_background_lossless_rate({100}, 1), std::invalid_argument);
  CHECK_THROWS_AS(max_background_lossless_rate({100, 200}, 3), std::invalid_argument);
}
