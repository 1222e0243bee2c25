#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "botscope/classifier.hpp"
#include "botscope/types.hpp"

namespace botscope {

struct HostActivity {
    uint32_t ip = 0;
    uint64_t packets_sent = 0;
    uint64_t packets_received = 0;
    uint64_t bytes_sent = 0;
    uint64_t bytes_received = 0;
    double first_seen = 0.0;
    double last_seen = 0.0;

    bool operator==(const HostActivity&) const = default;
};

struct Marking {
    size_t packet_index = 0;  // position in the scanned trace
    uint32_t ip = 0;          // offending source
    std::string signature_name;
    std::vector<uint8_t> matched_pattern;

    bool operator==(const Marking&) const = default;
};

struct DnsQuery {
    double ts = 0.0;
    uint32_t client_ip = 0;
    std::string name;

    bool operator==(const DnsQuery&) const = default;
};

struct ScanLog {
    std::map<uint32_t, HostActivity> hosts;
    std::vector<DnsQuery> dns_queries;
    std::vector<Marking> markings;
    std::vector<uint32_t> suspicious_ips;  // insertion order, no duplicates

    bool operator==(const ScanLog&) const = default;
};

ScanLog scan(const Trace& trace, const std::vector<Signature>& signatures);

// First question's QNAME of a standard query; none for responses,
// short payloads, or compressed names.
std::optional<std::string> parse_dns_query(const std::vector<uint8_t>& payload);

void write_log(const ScanLog& log, const std::string& path);
ScanLog read_log(const std::string& path);

}  // namespace botscope
