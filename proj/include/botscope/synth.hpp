#pragma once

#include <optional>
#include <set>
#include <string>

#include "botscope/types.hpp"

namespace botscope {

struct ScenarioConfig {
    size_t n_bots = 8;
    size_t n_background_hosts = 50;
    double duration_s = 900.0;
    double c2_msg_period_s = 10.0;  // controller command cadence
    double c2_jitter_s = 0.3;
    size_t background_flows_per_host = 3;
    uint64_t seed = 1;
};

struct GroundTruth {
    std::optional<uint32_t> controller_ip;
    std::set<uint32_t> bot_ips;
    std::set<FlowKey> c2_flow_keys;
};

// Seeded botnet (one controller, IRC-style chatter on 6667) mixed with short
// HTTP background flows, DNS lookups, and failed scans. Fully determined by cfg.
// Throws InvalidConfig.
std::pair<Trace, GroundTruth> generate_scenario(const ScenarioConfig& cfg);

// Classic PCAP with synthetic Ethernet/IPv4 framing; read_pcap round-trips
// every record exactly. Throws Unwritable.
void write_pcap(const Trace& trace, const std::string& path);

// JSONL in the ingest schema. Throws Unwritable.
void write_jsonl(const Trace& trace, const std::string& path);

std::string ground_truth_to_json(const GroundTruth& gt);

}  // namespace botscope
