#include "botscope/topology.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include <json.hpp>

#include "botscope/errors.hpp"

namespace botscope {

CommGraph build_comm_graph(const Cluster& cluster,
                           const std::map<uint64_t, const FlowSummary*>& flows) {
    CommGraph graph;
    std::set<uint32_t> nodes;
    for (uint64_t id : cluster.members) {
        auto it = flows.find(id);
        if (it == flows.end()) throw UnknownFlowId("flow id " + std::to_string(id));
        const FlowSummary& flow = *it->second;
        uint32_t from = flow.initiator.ip;
        uint32_t to = flow.responder().ip;
        nodes.insert(from);
        nodes.insert(to);
        ++graph.edges[{from, to}];
    }
    graph.nodes.assign(nodes.begin(), nodes.end());
    return graph;
}

std::optional<std::pair<uint32_t, size_t>> identify_controller(const CommGraph& graph,
                                                               size_t min_fanout) {
    std::map<uint32_t, std::set<uint32_t>> peers;
    for (const auto& [edge, mult] : graph.edges) {
        peers[edge.first].insert(edge.second);
        peers[edge.second].insert(edge.first);
    }
    std::optional<std::pair<uint32_t, size_t>> best;
    for (const auto& [ip, ps] : peers) {  // ascending ip, so ties keep the smaller ip
        if (!best || ps.size() > best->second) best = {ip, ps.size()};
    }
    if (best && best->second >= min_fanout) return best;
    return std::nullopt;
}

std::string assign_bot_name(const std::vector<FlowClass>& evidence_flows) {
    std::map<std::string, uint64_t> counts;
    for (const auto& fc : evidence_flows) {
        for (const auto& hit : fc.signature_hits) ++counts[hit.signature_name];
    }
    std::string best = "unknown";
    uint64_t best_count = 0;
    for (const auto& [name, count] : counts) {  // ascending name, so ties go lexicographic
        if (count > best_count) {
            best = name;
            best_count = count;
        }
    }
    return best;
}

DetectionReport build_report(std::vector<ControllerVerdict> verdicts, const ScanLog& scanlog,
                             const StageCounts& counts, const std::string& config_echo,
                             uint64_t seed) {
    std::stable_sort(verdicts.begin(), verdicts.end(),
                     [](const ControllerVerdict& x, const ControllerVerdict& y) {
                         if (x.fan_out != y.fan_out) return x.fan_out > y.fan_out;
                         return x.ip < y.ip;
                     });
    DetectionReport report;
    report.controllers = std::move(verdicts);
    report.suspicious_ips = scanlog.suspicious_ips;
    report.counts = counts;
    report.config_echo = config_echo;
    report.seed = seed;
    return report;
}

std::string report_to_json(const DetectionReport& report) {
    nlohmann::ordered_json j;
    auto controllers = nlohmann::ordered_json::array();
    for (const auto& v : report.controllers) {
        controllers.push_back({{"ip", format_ip(v.ip)},
                               {"fan_out", v.fan_out},
                               {"cluster_id", v.cluster_id},
                               {"bot_name", v.bot_name},
                               {"evidence_flow_ids", v.evidence_flow_ids}});
    }
    j["controllers"] = std::move(controllers);
    auto suspicious = nlohmann::ordered_json::array();
    for (uint32_t ip : report.suspicious_ips) suspicious.push_back(format_ip(ip));
    j["suspicious_ips"] = std::move(suspicious);
    j["counts"] = {{"packets_ingested", report.counts.packets_ingested},
                   {"flows_assembled", report.counts.flows_assembled},
                   {"flows_after_tcp_filter", report.counts.flows_after_tcp_filter},
                   {"flows_after_incomplete_filter", report.counts.flows_after_incomplete_filter},
                   {"chat_like_flows", report.counts.chat_like_flows},
                   {"pairs_scored", report.counts.pairs_scored},
                   {"clusters", report.counts.clusters}};
    j["config"] = nlohmann::ordered_json::parse(report.config_echo);
    j["seed"] = report.seed;
    return j.dump(2) + "\n";
}

std::string report_to_text(const DetectionReport& report) {
    std::ostringstream out;
    out << "Botnet detection report\n";
    out << "=======================\n";
    if (report.controllers.empty()) {
        out << "No controller identified.\n";
    } else {
        for (const auto& v : report.controllers) {
            out << "Controller " << format_ip(v.ip) << "  bot=" << v.bot_name
                << "  fan_out=" << v.fan_out << "  cluster=" << v.cluster_id
                << "  evidence_flows=" << v.evidence_flow_ids.size() << "\n";
        }
    }
    out << "\nSuspicious IPs (" << report.suspicious_ips.size() << "):\n";
    for (uint32_t ip : report.suspicious_ips) out << "  " << format_ip(ip) << "\n";
    const StageCounts& c = report.counts;
    out << "\nPipeline counts:\n";
    out << "  packets ingested:        " << c.packets_ingested << "\n";
    out << "  flows assembled:         " << c.flows_assembled << "\n";
    out << "  after TCP filter:        " << c.flows_after_tcp_filter << "\n";
    out << "  after incomplete filter: " << c.flows_after_incomplete_filter << "\n";
    out << "  chat-like flows:         " << c.chat_like_flows << "\n";
    out << "  pairs scored:            " << c.pairs_scored << "\n";
    out << "  clusters:                " << c.clusters << "\n";
    out << "\nSeed: " << report.seed << "\n";
    return out.str();
}

}  // namespace botscope
