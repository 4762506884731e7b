#include "atmbench/aal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace atmbench {

const char* to_string(ServiceClass c) {
  switch (c) {
    case ServiceClass::Ubr: return "ubr";
    case ServiceClass::Cbr: return "cbr";
    case ServiceClass::Signaling: return "signaling";
  }
  return "?";
}

std::int64_t cells_per_frame(std::int64_t payload_octets) {
  if (payload_octets < 1) throw std::invalid_argument("cells_per_frame: payload_octets must be >= 1");
  return (payload_octets + kAalTrailerOctets + kCellPayloadOctets - 1) / kCellPayloadOctets;
}

std::vector<Cell> segment_frame(std::int64_t payload_octets, int vc_id, std::int64_t frame_id) {
  const std::int64_t n = cells_per_frame(payload_octets);
  std::vector<Cell> cells;
  cells.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    Cell c;
    c.vc_id = vc_id;
    c.frame_id = frame_id;
    c.seq_in_frame = static_cast<int>(i);
    c.is_first = (i == 0);
    c.is_last = (i == n - 1);
    c.frame_payload_octets = c.is_last ? payload_octets : 0;
    cells.push_back(c);
  }
  return cells;
}

std::variant<Frame, LossIndication> reassemble(const std::vector<Cell>& cells) {
  if (cells.empty()) throw std::invalid_argument("reassemble: empty cell list");

  const int vc = cells.front().vc_id;
  const std::int64_t fid = cells.front().frame_id;
  for (const Cell& c : cells) {
    if (c.vc_id != vc || c.frame_id != fid)
      throw std::invalid_argument("reassemble: cells from different frames");
  }

  std::int64_t max_seq = -1;
  for (const Cell& c : cells) max_seq = std::max<std::int64_t>(max_seq, c.seq_in_frame);

  std::vector<int> count(static_cast<std::size_t>(max_seq) + 1, 0);
  for (const Cell& c : cells) {
    if (c.seq_in_frame < 0) throw TraceCorruption("reassemble: negative sequence number");
    if (++count[static_cast<std::size_t>(c.seq_in_frame)] > 1)
      throw TraceCorruption("reassemble: duplicate sequence number");
  }

  const Cell* last = nullptr;
  for (const Cell& c : cells) {
    if (c.is_last) {
      if (last) throw TraceCorruption("reassemble: multiple last-cell flags");
      last = &c;
    }
    if (c.is_first != (c.seq_in_frame == 0))
      throw TraceCorruption("reassemble: first-cell flag inconsistent with sequence");
  }

  if (!last) {
    // Trailer never arrived: expected length unknown, frame is lost.
    return LossIndication{fid, static_cast<std::int64_t>(cells.size()), 0};
  }
  if (last->seq_in_frame != max_seq)
    throw TraceCorruption("reassemble: cells after the last-cell flag");

  const std::int64_t expected = cells_per_frame(last->frame_payload_octets);
  if (expected != max_seq + 1 || static_cast<std::int64_t>(cells.size()) != expected)
    return LossIndication{fid, static_cast<std::int64_t>(cells.size()), expected};

  Frame f;
  f.frame_id = fid;
  f.vc_id = vc;
  f.payload_octets = last->frame_payload_octets;
  return f;
}

double effective_rate_to_cell_rate(double effective_bps, std::int64_t payload_octets) {
  if (!(effective_bps > 0)) throw std::invalid_argument("effective_rate_to_cell_rate: rate must be positive");
  const double frames_per_second = effective_bps / (8.0 * static_cast<double>(payload_octets));
  return frames_per_second * static_cast<double>(cells_per_frame(payload_octets));
}

double cell_rate_to_effective_rate(double cells_per_second, std::int64_t payload_octets) {
  if (!(cells_per_second > 0)) throw std::invalid_argument("cell_rate_to_effective_rate: rate must be positive");
  const double frames_per_second =
      cells_per_second / static_cast<double>(cells_per_frame(payload_octets));
  return frames_per_second * 8.0 * static_cast<double>(payload_octets);
}

double link_payload_capacity_bps(const LinkRate& rate, std::int64_t payload_octets) {
  const double payload_bits = 8.0 * static_cast<double>(payload_octets);
  const double wire_bits = static_cast<double>(kCellBits) *
                           static_cast<double>(cells_per_frame(payload_octets));
  return static_cast<double>(rate.bits_per_second) * payload_bits / wire_bits;
}

bool rate_exceeds_link_capacity(double effective_bps, const LinkRate& rate,
                                std::int64_t payload_octets) {
  // effective_bps > line_bps * payload_bits / (424 * cells_per_frame),
  // compared without forming the quotient.
  const double lhs = effective_bps * static_cast<double>(kCellBits) *
                     static_cast<double>(cells_per_frame(payload_octets));
  const double rhs = static_cast<double>(rate.bits_per_second) * 8.0 *
                     static_cast<double>(payload_octets);
  return lhs > rhs * (1.0 + 1e-12);
}

}  // namespace atmbench
