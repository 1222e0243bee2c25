#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "botscope/classifier.hpp"
#include "botscope/clustering.hpp"
#include "botscope/scanner.hpp"
#include "botscope/types.hpp"

namespace botscope {

constexpr size_t kDefaultMinFanout = 3;

struct CommGraph {
    std::vector<uint32_t> nodes;  // sorted ips
    std::map<std::pair<uint32_t, uint32_t>, uint64_t> edges;  // (initiator, responder) -> flow count
};

struct ControllerVerdict {
    uint32_t ip = 0;
    size_t fan_out = 0;  // distinct peers
    uint64_t cluster_id = 0;
    std::string bot_name;
    std::vector<uint64_t> evidence_flow_ids;
};

struct StageCounts {
    uint64_t packets_ingested = 0;
    uint64_t flows_assembled = 0;
    uint64_t flows_after_tcp_filter = 0;
    uint64_t flows_after_incomplete_filter = 0;
    uint64_t chat_like_flows = 0;
    uint64_t pairs_scored = 0;
    uint64_t clusters = 0;
};

struct DetectionReport {
    std::vector<ControllerVerdict> controllers;  // fan_out desc, then ip
    std::vector<uint32_t> suspicious_ips;
    StageCounts counts;
    std::string config_echo;  // JSON text of the effective configuration
    uint64_t seed = 0;
};

// Throws UnknownFlowId when a member id is not in the index.
CommGraph build_comm_graph(const Cluster& cluster,
                           const std::map<uint64_t, const FlowSummary*>& flows);

// Winner by distinct-peer degree (in plus out edges); none below min_fanout.
// Ties go to the numerically smaller ip.
std::optional<std::pair<uint32_t, size_t>> identify_controller(const CommGraph& graph,
                                                               size_t min_fanout);

// Dominant signature name across the evidence flows; "unknown" with no hits.
std::string assign_bot_name(const std::vector<FlowClass>& evidence_flows);

DetectionReport build_report(std::vector<ControllerVerdict> verdicts, const ScanLog& scanlog,
                             const StageCounts& counts, const std::string& config_echo,
                             uint64_t seed);

std::string report_to_json(const DetectionReport& report);
std::string report_to_text(const DetectionReport& report);

}  // namespace botscope
