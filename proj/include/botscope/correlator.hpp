#pragma once

#include <vector>

#include "botscope/types.hpp"

namespace botscope {

struct CorrelationConfig {
    double bin_width = 1.0;  // seconds
    double weight_temporal = 0.5;
    double weight_size = 0.5;
    size_t min_overlap_bins = 5;
    std::vector<double> size_edges = {0, 100, 200, 400, 800, 1600};
    size_t max_flows = 5000;
};

struct CorrelationRecord {
    uint64_t flow_i = 0;  // flow_i < flow_j
    uint64_t flow_j = 0;
    double temporal_score = 0.0;  // [-1, 1]
    double size_similarity = 0.0; // [0, 1]
    double combined = 0.0;        // w_t * max(temporal, 0) + w_s * size_similarity

    bool operator==(const CorrelationRecord&) const = default;
};

// Packet counts per bin over [t0, t1); length = ceil((t1 - t0) / bin_width).
std::vector<uint64_t> activity_series(const FlowSummary& flow, double bin_width, double t0,
                                      double t1);

// Pearson coefficient; 0 when either side has zero variance. Throws LengthMismatch.
double pearson(const std::vector<double>& x, const std::vector<double>& y);

// Bucketed packet-size distribution, normalized by pkt_count; last bucket
// catches overflow.
std::vector<double> size_histogram(const FlowSummary& flow, const std::vector<double>& edges);

CorrelationRecord correlate_pair(const FlowSummary& f1, const FlowSummary& f2,
                                 const CorrelationConfig& cfg);

// One record per unordered pair, sorted by (flow_i, flow_j). Throws TooManyFlows.
std::vector<CorrelationRecord> correlate_all(const std::vector<FlowSummary>& flows,
                                             const CorrelationConfig& cfg);

}  // namespace botscope
