// Cell-level trace: what a measurement monitor sees, one record per cell copy.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "atmbench/ticks.hpp"

namespace atmbench {

// One 53-octet cell's journey through the system under test. Times are ticks
// at the measurement points: entry is the system input port, exit the final
// output port. A dropped cell has no exit time. Multicast copies carry the
// leaf index in branch so each replica is a distinct record.
struct CellRecord {
  int vc_id = 0;
  std::int64_t frame_id = 0;
  std::int64_t seq_in_frame = 0;
  bool is_first = false;
  bool is_last = false;
  Tick entry_first_bit = 0;
  Tick entry_last_bit = 0;
  std::optional<Tick> exit_last_bit;       // nullopt: cell lost in transit
  int in_port = 0;
  int out_port = -1;                       // final output port of this copy
  int branch = 0;                          // multicast leaf index, 0 otherwise
  std::int64_t frame_payload_octets = 0;   // carried on last cells, else 0

  bool delivered() const { return exit_last_bit.has_value(); }
  Tick transfer_delay() const { return *exit_last_bit - entry_last_bit; }
};

struct Trace {
  std::vector<CellRecord> cells;
  Tick horizon = 0;
  std::int64_t injected_cells = 0;
  std::int64_t delivered_cells = 0;
  std::int64_t dropped_cells = 0;
};

// One line per record: vc frame seq first last entry_first entry_last
// exit_last|LOST in_port out_port branch payload. Field order is fixed.
std::string format_cell_record(const CellRecord& rec);
CellRecord parse_cell_record(const std::string& line);

void write_trace(std::ostream& os, const Trace& trace);
Trace read_trace(std::istream& is);

}  // namespace atmbench
