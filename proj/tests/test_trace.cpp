#include <sstream>

#include "atmbench/trace.hpp"
#include "doctest.h"

using namespace atmbench;

namespace {

CellRecord sample_record() {
  CellRecord r;
  r.vc_id = 3;
  r.frame_id = 17;
  r.seq_in_frame = 4;
  r.is_first = false;
  r.is_last = true;
  r.entry_first_bit = 1'000'000;
  r.entry_last_bit = 1'002'726;
  r.exit_last_bit = 2'345'678;
  r.in_port = 1;
  r.out_port = 6;
  r.branch = 2;
  r.frame_payload_octets = 1518;
  return r;
}

}  // namespace

TEST_CASE("cell record formatting round-trips") {
  const CellRecord r = sample_record();
  const CellRecord back = parse_cell_record(format_cell_record(r));
  CHECK(back.vc_id == r.vc_id);
  CHECK(back.frame_id == r.frame_id);
  CHECK(back.seq_in_frame == r.seq_in_frame);
  CHECK(back.is_first == r.is_first);
  CHECK(back.is_last == r.is_last);
  CHECK(back.entry_first_bit == r.entry_first_bit);
  CHECK(back.entry_last_bit == r.entry_last_bit);
  REQUIRE(back.exit_last_bit.has_value());
  CHECK(*back.exit_last_bit == *r.exit_last_bit);
  CHECK(back.in_port == r.in_port);
  CHECK(back.out_port == r.out_port);
  CHECK(back.branch == r.branch);
  CHECK(back.frame_payload_octets == r.frame_payload_octets);
}

TEST_CASE("a lost cell round-trips through the LOST marker") {
  CellRecord r = sample_record();
  r.exit_last_bit.reset();
  const std::string line = format_cell_record(r);
  CHECK(line.find("LOST") != std::string::npos);
  const CellRecord back = parse_cell_record(line);
  CHECK_FALSE(back.delivered());
}

TEST_CASE("malformed record lines are rejected") {
  CHECK_THROWS_AS(parse_cell_record("1 2 3"), std::runtime_error);
  CHECK_THROWS_AS(parse_cell_record("a b c d e f g h i j k l"), std::runtime_error);
  // Trailing junk glued to the exit time.
  CHECK_THROWS_AS(parse_cell_record("3 17 4 0 1 10 20 30xyz 1 6 2 1518"), std::runtime_error);
}

TEST_CASE("trace stream round-trips with counters") {
  Trace t;
  t.horizon = 5'000'000;
  t.injected_cells = 3;
  t.delivered_cells = 2;
  t.dropped_cells = 1;
  t.cells.push_back(sample_record());
  CellRecord lost = sample_record();
  lost.seq_in_frame = 5;
  lost.exit_last_bit.reset();
  t.cells.push_back(lost);

  std::stringstream ss;
  write_trace(ss, t);
  const Trace back = read_trace(ss);

  CHECK(back.horizon == t.horizon);
  CHECK(back.injected_cells == 3);
  CHECK(back.delivered_cells == 2);
  CHECK(back.dropped_cells == 1);
  REQUIRE(back.cells.size() == 2);
  CHECK(back.cells[0].delivered());
  CHECK_FALSE(back.cells[1].delivered());
  CHECK(back.cells[1].seq_in_frame == 5);
}

TEST_CASE("a trace without a header line is rejected") {
  std::stringstream ss;
  ss << format_cell_record(sample_record()) << '\n';
  CHECK_THROWS_AS(read_trace(ss), std::runtime_error);
}
