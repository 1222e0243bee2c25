#include "botscope/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <optional>

#include <json.hpp>

#include "botscope/errors.hpp"

namespace botscope {

namespace {

constexpr uint32_t kMagicUsec = 0xA1B2C3D4;
constexpr uint32_t kMagicUsecSwapped = 0xD4C3B2A1;

uint16_t load16(const uint8_t* p, bool swap) {
    uint16_t v;
    std::memcpy(&v, p, 2);
    if (swap) v = static_cast<uint16_t>((v >> 8) | (v << 8));
    return v;
}

uint32_t load32(const uint8_t* p, bool swap) {
    uint32_t v;
    std::memcpy(&v, p, 4);
    if (swap) v = __builtin_bswap32(v);
    return v;
}

uint16_t be16(const uint8_t* p) { return static_cast<uint16_t>((p[0] << 8) | p[1]); }
uint32_t be32(const uint8_t* p) {
    return (uint32_t(p[0]) << 24) | (uint32_t(p[1]) << 16) | (uint32_t(p[2]) << 8) | p[3];
}

enum class FrameResult { Emitted, Malformed, Unsupported };

// Parses one captured Ethernet frame into a PacketRecord.
FrameResult parse_frame(const uint8_t* data, size_t len, PacketRecord& out) {
    if (len < 14) return FrameResult::Malformed;
    uint16_t ethertype = be16(data + 12);
    if (ethertype != 0x0800) return FrameResult::Unsupported;  // VLAN, ARP, IPv6, ...

    const uint8_t* ip = data + 14;
    size_t ip_len = len - 14;
    if (ip_len < 20) return FrameResult::Malformed;
    if ((ip[0] >> 4) != 4) return FrameResult::Unsupported;
    size_t ihl = (ip[0] & 0x0f) * 4u;
    if (ihl < 20 || ip_len < ihl) return FrameResult::Malformed;
    uint16_t frag = be16(ip + 6);
    if ((frag & 0x1fff) != 0) return FrameResult::Unsupported;  // later fragment
    uint16_t total_len = be16(ip + 2);
    if (total_len < ihl) return FrameResult::Malformed;
    // Snap-length safe: never look past the captured bytes.
    size_t ip_payload_len = std::min<size_t>(total_len, ip_len) - ihl;
    const uint8_t* l4 = ip + ihl;

    out.src.ip = be32(ip + 12);
    out.dst.ip = be32(ip + 16);
    out.tcp_flags = 0;
    out.src.port = 0;
    out.dst.port = 0;

    uint8_t proto = ip[9];
    if (proto == 6) {
        if (ip_payload_len < 20) return FrameResult::Malformed;
        out.transport = Transport::TCP;
        out.src.port = be16(l4);
        out.dst.port = be16(l4 + 2);
        size_t doff = (l4[12] >> 4) * 4u;
        if (doff < 20 || ip_payload_len < doff) return FrameResult::Malformed;
        out.tcp_flags = l4[13] & 0x3f;
        out.payload.assign(l4 + doff, l4 + ip_payload_len);
    } else if (proto == 17) {
        if (ip_payload_len < 8) return FrameResult::Malformed;
        out.transport = Transport::UDP;
        out.src.port = be16(l4);
        out.dst.port = be16(l4 + 2);
        out.payload.assign(l4 + 8, l4 + ip_payload_len);
    } else {
        out.transport = Transport::OTHER;
        out.payload.assign(l4, l4 + ip_payload_len);
    }
    return FrameResult::Emitted;
}

uint8_t parse_flag_name(const std::string& name) {
    if (name == "SYN") return FLAG_SYN;
    if (name == "ACK") return FLAG_ACK;
    if (name == "RST") return FLAG_RST;
    if (name == "FIN") return FLAG_FIN;
    if (name == "PSH") return FLAG_PSH;
    if (name == "URG") return FLAG_URG;
    throw std::invalid_argument("unknown TCP flag: " + name);
}

std::vector<uint8_t> parse_hex(const std::string& hex) {
    if (hex.size() % 2 != 0) throw std::invalid_argument("odd hex length");
    std::vector<uint8_t> out(hex.size() / 2);
    for (size_t i = 0; i < out.size(); ++i) {
        auto nibble = [&](char c) -> int {
            if (c >= '0' && c <= '9') return c - '0';
            if (c >= 'a' && c <= 'f') return c - 'a' + 10;
            if (c >= 'A' && c <= 'F') return c - 'A' + 10;
            throw std::invalid_argument("bad hex digit");
        };
        out[i] = static_cast<uint8_t>((nibble(hex[2 * i]) << 4) | nibble(hex[2 * i + 1]));
    }
    return out;
}

std::optional<PacketRecord> parse_jsonl_record(const std::string& line) {
    try {
        auto j = nlohmann::json::parse(line);
        PacketRecord rec;
        rec.ts = j.at("ts").get<double>();
        if (rec.ts < 0) return std::nullopt;
        rec.src = parse_endpoint(j.at("src").get<std::string>());
        rec.dst = parse_endpoint(j.at("dst").get<std::string>());
        std::string transport = j.at("transport").get<std::string>();
        if (transport == "TCP") {
            rec.transport = Transport::TCP;
        } else if (transport == "UDP") {
            rec.transport = Transport::UDP;
        } else if (transport == "OTHER") {
            rec.transport = Transport::OTHER;
        } else {
            return std::nullopt;
        }
        if (j.contains("flags")) {
            for (const auto& f : j.at("flags")) rec.tcp_flags |= parse_flag_name(f.get<std::string>());
        }
        if (rec.transport != Transport::TCP && rec.tcp_flags != 0) return std::nullopt;
        rec.payload = parse_hex(j.at("payload").get<std::string>());
        rec.wire_len = j.at("wire_len").get<uint32_t>();
        if (rec.wire_len < rec.payload.size()) return std::nullopt;
        return rec;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

}  // namespace

double quantize_ts(double ts) {
    double sec = std::floor(ts);
    auto usec = std::llround((ts - sec) * 1e6);
    if (usec >= 1000000) {
        sec += 1.0;
        usec = 0;
    }
    return sec + static_cast<double>(usec) * 1e-6;
}

std::pair<Trace, IngestStats> read_pcap(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Unreadable("cannot open " + path);
    std::vector<uint8_t> file((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    if (file.size() < 4) throw BadMagic(path + ": too short for a PCAP magic");
    uint32_t magic = load32(file.data(), false);
    bool swap;
    if (magic == kMagicUsec) {
        swap = false;
    } else if (magic == kMagicUsecSwapped) {
        swap = true;
    } else {
        throw BadMagic(path + ": unrecognized PCAP magic");
    }
    if (file.size() < 24) throw TruncatedCapture(path + ": truncated global header");
    uint32_t linktype = load32(file.data() + 20, swap);

    IngestStats stats;
    std::vector<PacketRecord> packets;
    size_t off = 24;
    while (off < file.size()) {
        if (file.size() - off < 16) throw TruncatedCapture(path + ": truncated record header");
        double ts = static_cast<double>(load32(file.data() + off, swap)) +
                    static_cast<double>(load32(file.data() + off + 4, swap)) * 1e-6;
        uint32_t incl_len = load32(file.data() + off + 8, swap);
        uint32_t orig_len = load32(file.data() + off + 12, swap);
        off += 16;
        if (file.size() - off < incl_len) throw TruncatedCapture(path + ": truncated record body");

        ++stats.packets_read;
        if (linktype != 1) {
            ++stats.packets_dropped_unsupported;
        } else {
            PacketRecord rec;
            rec.ts = ts;
            rec.wire_len = orig_len;
            switch (parse_frame(file.data() + off, incl_len, rec)) {
                case FrameResult::Emitted:
                    if (rec.wire_len < rec.payload.size()) {
                        ++stats.packets_dropped_malformed;
                    } else {
                        packets.push_back(std::move(rec));
                    }
                    break;
                case FrameResult::Malformed: ++stats.packets_dropped_malformed; break;
                case FrameResult::Unsupported: ++stats.packets_dropped_unsupported; break;
            }
        }
        off += incl_len;
    }
    return {normalize_trace(std::move(packets)), stats};
}

std::pair<Trace, IngestStats> read_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Unreadable("cannot open " + path);

    IngestStats stats;
    std::vector<PacketRecord> packets;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ++stats.packets_read;
        if (auto rec = parse_jsonl_record(line)) {
            packets.push_back(std::move(*rec));
        } else {
            ++stats.packets_dropped_malformed;
        }
    }
    if (in.bad()) throw Unreadable("I/O error reading " + path);
    return {normalize_trace(std::move(packets)), stats};
}

Trace normalize_trace(std::vector<PacketRecord> packets) {
    std::stable_sort(packets.begin(), packets.end(),
                     [](const PacketRecord& x, const PacketRecord& y) { return x.ts < y.ts; });
    Trace trace;
    trace.packets = std::move(packets);
    trace.source_kind = SourceKind::NetworkTrafficInformation;
    return trace;
}

}  // namespace botscope
