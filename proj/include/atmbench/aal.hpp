// Frames, cells, AAL5 segmentation/reassembly and effective-rate arithmetic.
#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "atmbench/ticks.hpp"

namespace atmbench {

inline constexpr int kCellPayloadOctets = 48;
inline constexpr int kAalTrailerOctets = 8;

enum class ServiceClass { Ubr, Cbr, Signaling };

const char* to_string(ServiceClass c);

// An AAL (or higher layer) protocol data unit: the user-visible unit of
// loss, latency and throughput. Payload content is not modeled; only the
// octet count matters.
struct Frame {
  std::int64_t frame_id = 0;
  int vc_id = 0;
  std::int64_t payload_octets = 0;
  ServiceClass service = ServiceClass::Ubr;
};

// One 53-octet cell of a segmented frame. The frame's payload length rides
// in the last cell, standing in for the AAL5 trailer's length field, so a
// receiver can recover the frame size from a complete cell set.
struct Cell {
  int vc_id = 0;
  std::int64_t frame_id = 0;
  int seq_in_frame = 0;
  bool is_first = false;
  bool is_last = false;
  std::int64_t frame_payload_octets = 0;  // set on the last cell only
};

struct LossIndication {
  std::int64_t frame_id = 0;
  std::int64_t cells_present = 0;
  std::int64_t cells_expected = 0;  // 0 when the trailer cell never arrived
};

// Raised when a cell set is inconsistent in a way the network cannot
// produce (duplicate sequence numbers, conflicting flags): a simulator or
// trace bug, not a measurable loss event.
struct TraceCorruption : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// AAL5 framing: payload + 8-octet trailer, padded to a whole number of
// 48-octet cell payloads.
std::int64_t cells_per_frame(std::int64_t payload_octets);

std::vector<Cell> segment_frame(std::int64_t payload_octets, int vc_id, std::int64_t frame_id);

// Frame when every cell 0..n-1 is present exactly once; LossIndication
// otherwise (a partially delivered frame counts as lost).
std::variant<Frame, LossIndication> reassemble(const std::vector<Cell>& cells);

// Effective rate counts AAL payload bits only. These convert between the
// user-facing effective bits/sec and the cell stream that carries it.
double effective_rate_to_cell_rate(double effective_bps, std::int64_t payload_octets);
double cell_rate_to_effective_rate(double cells_per_second, std::int64_t payload_octets);

// Highest effective rate a link can carry for a given frame size:
// line rate scaled by payload bits per on-the-wire cell bits.
double link_payload_capacity_bps(const LinkRate& rate, std::int64_t payload_octets);

// Exact oversubscription test (no floating point): does an effective rate
// exceed what the link can physically carry at this frame size?
bool rate_exceeds_link_capacity(double effective_bps, const LinkRate& rate,
                                std::int64_t payload_octets);

}  // namespace atmbench
