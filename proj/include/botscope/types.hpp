#pragma once

#include <cstdint>
#include <string>
#include <tuple>
#include <vector>

namespace botscope {

enum class Transport : uint8_t { TCP, UDP, OTHER };

// TCP flag bits, same layout as the low byte of the TCP flags field.
enum TcpFlag : uint8_t {
    FLAG_FIN = 0x01,
    FLAG_SYN = 0x02,
    FLAG_RST = 0x04,
    FLAG_PSH = 0x08,
    FLAG_ACK = 0x10,
    FLAG_URG = 0x20,
};

struct Endpoint {
    uint32_t ip = 0;  // host byte order
    uint16_t port = 0;

    auto operator<=>(const Endpoint&) const = default;
};

std::string format_ip(uint32_t ip);
std::string format_endpoint(const Endpoint& ep);
// Parses "a.b.c.d" / "a.b.c.d:port". Throws std::invalid_argument on bad input.
uint32_t parse_ip(const std::string& text);
Endpoint parse_endpoint(const std::string& text);

struct PacketRecord {
    double ts = 0.0;  // seconds since epoch, microsecond resolution
    Endpoint src;
    Endpoint dst;
    Transport transport = Transport::OTHER;
    uint8_t tcp_flags = 0;  // empty unless TCP
    std::vector<uint8_t> payload;
    uint32_t wire_len = 0;  // bytes on wire, >= payload size

    bool operator==(const PacketRecord&) const = default;
};

enum class SourceKind : uint8_t {
    NetworkTrafficInformation,
    SystemProcessInformation,
    FileSystemInformation,
};

struct Trace {
    std::vector<PacketRecord> packets;  // non-decreasing ts
    SourceKind source_kind = SourceKind::NetworkTrafficInformation;
};

// Bidirectional flow identity: endpoints stored in canonical (ip, port) order.
struct FlowKey {
    Endpoint a;
    Endpoint b;
    Transport transport = Transport::OTHER;

    FlowKey() = default;
    FlowKey(Endpoint x, Endpoint y, Transport t);

    auto operator<=>(const FlowKey&) const = default;
};

enum class HandshakeState : uint8_t { NONE, SYN_ONLY, SYN_RST, ESTABLISHED };

constexpr size_t kPayloadSampleCap = 2048;

struct FlowSummary {
    uint64_t id = 0;
    FlowKey key;
    Endpoint initiator;  // sender of the first packet
    double start_ts = 0.0;
    double end_ts = 0.0;
    double duration = 0.0;
    uint64_t pkt_count = 0;
    uint64_t byte_count = 0;
    uint64_t payload_bytes = 0;
    double mean_pkt_size = 0.0;
    double std_pkt_size = 0.0;  // population std over wire_len
    double mean_iat = 0.0;      // over pkt_count-1 gaps, 0 when pkt_count < 2
    double std_iat = 0.0;
    double bandwidth = 0.0;  // byte_count / max(duration, 1e-6)
    HandshakeState handshake = HandshakeState::NONE;
    bool bidirectional = false;
    std::vector<uint8_t> payload_sample;  // first 2048 payload bytes in arrival order
    std::vector<double> packet_times;
    std::vector<uint32_t> packet_sizes;

    Endpoint responder() const { return initiator == key.a ? key.b : key.a; }
};

struct FeatureVector {
    double duration_s = 0.0;
    double bandwidth_bps = 0.0;
    double mean_pkt_size = 0.0;
    double std_pkt_size = 0.0;
    double mean_iat = 0.0;
    double std_iat = 0.0;
    double payload_ratio = 0.0;  // payload_bytes / max(byte_count, 1)
    double pkt_count = 0.0;

    static constexpr size_t kDims = 8;
    static const std::vector<std::string>& feature_names();

    double operator[](size_t i) const;
    std::vector<double> as_vector() const;

    bool operator==(const FeatureVector&) const = default;
};

FeatureVector compute_features(const FlowSummary& flow);

}  // namespace botscope
