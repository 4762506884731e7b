// Suite runner: builds networks and traffic from a test spec, drives the
// simulator, fills the report rows and derives the aggregates.
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "atmbench/report.hpp"
#include "atmbench/trace.hpp"

namespace atmbench {

// Receives the cell trace of measured runs when the spec enables traces.
// Search probes are not traced; their rows alone feed the aggregates.
using TraceSink = std::function<void(std::int64_t run_id, const Trace& trace)>;

MetricReport run_suite(const TestSpec& spec, const TraceSink& trace_sink = nullptr);

// Every aggregate comes from the rows alone. run_suite ends with this, and
// the derive subcommand re-runs it on a parsed report to cross-check.
std::vector<AggRow> recompute_aggregates(const TestSpec& spec, const std::vector<RunRow>& rows);

// Expect-rule violations, one message per failed bound; empty: all hold.
std::vector<std::string> check_expectations(const MetricReport& report);

}  // namespace atmbench
