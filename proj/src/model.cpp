#include "atmbench/model.hpp"

#include <stdexcept>

namespace atmbench {

void SwitchModel::validate() const {
  if (n_ports < 1) throw std::invalid_argument("switch: need at least one port");
  if (static_cast<int>(port_rate.size()) != n_ports)
    throw std::invalid_argument("switch: one line rate per port required");
  for (const LinkRate& r : port_rate)
    if (r.bits_per_second <= 0) throw std::invalid_argument("switch: line rates must be positive");
  if (!module_of.empty() && static_cast<int>(module_of.size()) != n_ports)
    throw std::invalid_argument("switch: module map must cover every port");
  for (int m : module_of) {
    if (m < 0) throw std::invalid_argument("switch: module id must be non-negative");
    if (!fabric_of_module.empty() && m >= static_cast<int>(fabric_of_module.size()))
      throw std::invalid_argument("switch: module id outside fabric map");
  }
  if (!loopback.empty() && static_cast<int>(loopback.size()) != n_ports)
    throw std::invalid_argument("switch: loopback set must cover every port");
  if (buffer_cells < 1) throw std::invalid_argument("switch: buffer_cells must be at least 1");
  if (cell_latency < 0) throw std::invalid_argument("switch: cell_latency must be non-negative");
}

void NetworkModel::validate() const {
  if (switches.empty()) throw std::invalid_argument("network: need at least one switch");
  for (const SwitchModel& sw : switches) sw.validate();
  const int nsw = static_cast<int>(switches.size());
  for (const InterSwitchLink& l : links) {
    if (l.from_switch < 0 || l.from_switch >= nsw || l.to_switch < 0 || l.to_switch >= nsw)
      throw std::invalid_argument("network: link references unknown switch");
    if (l.from_port < 0 || l.from_port >= switches[l.from_switch].n_ports || l.to_port < 0 ||
        l.to_port >= switches[l.to_switch].n_ports)
      throw std::invalid_argument("network: link references unknown port");
    if (l.propagation < 0) throw std::invalid_argument("network: propagation must be non-negative");
  }
  if (monitor.overhead < 0 || monitor.propagation < 0)
    throw std::invalid_argument("network: monitor delays must be non-negative");
}

}  // namespace atmbench
