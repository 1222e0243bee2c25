#include "botscope/filter.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace botscope {

namespace {

struct FlowAccumulator {
    FlowKey key;
    Endpoint initiator;
    bool bidirectional = false;
    uint64_t byte_count = 0;
    uint64_t payload_bytes = 0;
    std::vector<uint8_t> payload_sample;
    std::vector<double> times;
    std::vector<uint32_t> sizes;

    // Handshake tracking; SYN_RST and ESTABLISHED are terminal.
    bool syn_seen = false;
    Endpoint syn_sender;
    bool synack_seen = false;
    HandshakeState settled = HandshakeState::NONE;

    void add(const PacketRecord& pkt) {
        if (times.empty()) initiator = pkt.src;
        if (pkt.src != initiator) bidirectional = true;
        times.push_back(pkt.ts);
        sizes.push_back(pkt.wire_len);
        byte_count += pkt.wire_len;
        payload_bytes += pkt.payload.size();
        if (payload_sample.size() < kPayloadSampleCap) {
            size_t room = kPayloadSampleCap - payload_sample.size();
            size_t take = std::min(room, pkt.payload.size());
            payload_sample.insert(payload_sample.end(), pkt.payload.begin(),
                                  pkt.payload.begin() + take);
        }
        update_handshake(pkt);
    }

    void update_handshake(const PacketRecord& pkt) {
        if (pkt.transport != Transport::TCP || settled != HandshakeState::NONE) return;
        bool syn = pkt.tcp_flags & FLAG_SYN;
        bool ack = pkt.tcp_flags & FLAG_ACK;
        bool rst = pkt.tcp_flags & FLAG_RST;
        if (!syn_seen) {
            if (syn && !ack) {
                syn_seen = true;
                syn_sender = pkt.src;
            }
            return;
        }
        if (rst) {
            settled = HandshakeState::SYN_RST;
        } else if (!synack_seen) {
            if (syn && ack && pkt.src != syn_sender) synack_seen = true;
        } else if (ack && !syn && pkt.src == syn_sender) {
            settled = HandshakeState::ESTABLISHED;
        }
    }

    HandshakeState handshake() const {
        if (settled != HandshakeState::NONE) return settled;
        return syn_seen ? HandshakeState::SYN_ONLY : HandshakeState::NONE;
    }

    FlowSummary finish() const {
        FlowSummary flow;
        flow.key = key;
        flow.initiator = initiator;
        flow.start_ts = times.front();
        flow.end_ts = times.back();
        flow.duration = flow.end_ts - flow.start_ts;
        flow.pkt_count = times.size();
        flow.byte_count = byte_count;
        flow.payload_bytes = payload_bytes;
        flow.payload_sample = payload_sample;
        flow.packet_times = times;
        flow.packet_sizes = sizes;
        flow.bidirectional = bidirectional;
        flow.handshake = handshake();

        double n = static_cast<double>(sizes.size());
        double mean = 0.0;
        for (uint32_t s : sizes) mean += s;
        mean /= n;
        double var = 0.0;
        for (uint32_t s : sizes) var += (s - mean) * (s - mean);
        flow.mean_pkt_size = mean;
        flow.std_pkt_size = std::sqrt(var / n);

        if (times.size() >= 2) {
            double m = static_cast<double>(times.size() - 1);
            double mean_iat = 0.0;
            for (size_t i = 1; i < times.size(); ++i) mean_iat += times[i] - times[i - 1];
            mean_iat /= m;
            double var_iat = 0.0;
            for (size_t i = 1; i < times.size(); ++i) {
                double gap = times[i] - times[i - 1];
                var_iat += (gap - mean_iat) * (gap - mean_iat);
            }
            flow.mean_iat = mean_iat;
            flow.std_iat = std::sqrt(var_iat / m);
        }
        flow.bandwidth = static_cast<double>(byte_count) / std::max(flow.duration, 1e-6);
        return flow;
    }
};

}  // namespace

std::vector<FlowSummary> assemble_flows(const Trace& trace, double idle_timeout) {
    std::map<FlowKey, FlowAccumulator> open;
    std::vector<FlowSummary> flows;

    for (const PacketRecord& pkt : trace.packets) {
        FlowKey key(pkt.src, pkt.dst, pkt.transport);
        auto it = open.find(key);
        if (it != open.end() && pkt.ts - it->second.times.back() > idle_timeout) {
            flows.push_back(it->second.finish());
            open.erase(it);
            it = open.end();
        }
        if (it == open.end()) {
            it = open.emplace(key, FlowAccumulator{}).first;
            it->second.key = key;
        }
        it->second.add(pkt);
    }
    for (const auto& [key, acc] : open) flows.push_back(acc.finish());

    std::stable_sort(flows.begin(), flows.end(), [](const FlowSummary& x, const FlowSummary& y) {
        return x.start_ts < y.start_ts;
    });
    for (size_t i = 0; i < flows.size(); ++i) flows[i].id = i;
    return flows;
}

std::vector<FlowSummary> quick_data_reduction(const std::vector<FlowSummary>& flows) {
    std::vector<FlowSummary> out;
    for (const auto& flow : flows) {
        if (flow.key.transport == Transport::TCP) out.push_back(flow);
    }
    return out;
}

std::vector<FlowSummary> incomplete_comm_filter(const std::vector<FlowSummary>& flows) {
    std::vector<FlowSummary> out;
    for (const auto& flow : flows) {
        bool failed_handshake = flow.handshake == HandshakeState::SYN_RST ||
                                flow.handshake == HandshakeState::SYN_ONLY;
        if (failed_handshake && flow.payload_bytes == 0) continue;
        out.push_back(flow);
    }
    return out;
}

}  // namespace botscope
