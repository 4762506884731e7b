#include "atmbench/trace.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace atmbench {

std::string format_cell_record(const CellRecord& rec) {
  std::ostringstream os;
  os << rec.vc_id << ' ' << rec.frame_id << ' ' << rec.seq_in_frame << ' ' << (rec.is_first ? 1 : 0)
     << ' ' << (rec.is_last ? 1 : 0) << ' ' << rec.entry_first_bit << ' ' << rec.entry_last_bit
     << ' ';
  if (rec.exit_last_bit)
    os << *rec.exit_last_bit;
  else
    os << "LOST";
  os << ' ' << rec.in_port << ' ' << rec.out_port << ' ' << rec.branch << ' '
     << rec.frame_payload_octets;
  return os.str();
}

CellRecord parse_cell_record(const std::string& line) {
  std::istringstream is(line);
  CellRecord rec;
  int first = 0, last = 0;
  std::string exit_field;
  if (!(is >> rec.vc_id >> rec.frame_id >> rec.seq_in_frame >> first >> last >> rec.entry_first_bit >>
        rec.entry_last_bit >> exit_field >> rec.in_port >> rec.out_port >> rec.branch >>
        rec.frame_payload_octets))
    throw std::runtime_error("malformed cell record: " + line);
  rec.is_first = first != 0;
  rec.is_last = last != 0;
  if (exit_field == "LOST") {
    rec.exit_last_bit.reset();
  } else {
    std::size_t pos = 0;
    rec.exit_last_bit = std::stoll(exit_field, &pos);
    if (pos != exit_field.size()) throw std::runtime_error("malformed exit time: " + exit_field);
  }
  return rec;
}

void write_trace(std::ostream& os, const Trace& trace) {
  os << "# horizon " << trace.horizon << " injected " << trace.injected_cells << " delivered "
     << trace.delivered_cells << " dropped " << trace.dropped_cells << '\n';
  for (const CellRecord& rec : trace.cells) os << format_cell_record(rec) << '\n';
}

Trace read_trace(std::istream& is) {
  Trace trace;
  std::string line;
  bool header_seen = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream hs(line);
      std::string hash, key;
      hs >> hash;
      while (hs >> key) {
        std::int64_t value = 0;
        if (!(hs >> value)) throw std::runtime_error("malformed trace header: " + line);
        if (key == "horizon")
          trace.horizon = value;
        else if (key == "injected")
          trace.injected_cells = value;
        else if (key == "delivered")
          trace.delivered_cells = value;
        else if (key == "dropped")
          trace.dropped_cells = value;
        else
          throw std::runtime_error("unknown trace header key: " + key);
      }
      header_seen = true;
      continue;
    }
    trace.cells.push_back(parse_cell_record(line));
  }
  if (!header_seen) throw std::runtime_error("trace missing header line");
  return trace;
}

}  // namespace atmbench
