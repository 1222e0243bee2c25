#pragma once

#include <vector>

#include "botscope/types.hpp"

namespace botscope {

constexpr double kDefaultIdleTimeout = 300.0;  // seconds

// Groups packets into bidirectional flows; a gap > idle_timeout within a key
// starts a new flow. Output ordered by start_ts with ids dense from 0.
std::vector<FlowSummary> assemble_flows(const Trace& trace, double idle_timeout = kDefaultIdleTimeout);

// Keeps TCP flows only, order preserved.
std::vector<FlowSummary> quick_data_reduction(const std::vector<FlowSummary>& flows);

// Drops zero-payload SYN_RST and SYN_ONLY flows (scans that never conversed).
std::vector<FlowSummary> incomplete_comm_filter(const std::vector<FlowSummary>& flows);

}  // namespace botscope
