#include "botscope/scanner.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "botscope/errors.hpp"

namespace botscope {

namespace {

std::string to_hex(const std::vector<uint8_t>& bytes) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (uint8_t b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0x0f]);
    }
    return out;
}

std::vector<uint8_t> from_hex(const std::string& hex) {
    std::vector<uint8_t> out(hex.size() / 2);
    for (size_t i = 0; i < out.size(); ++i) {
        auto nibble = [](char c) -> uint8_t {
            if (c >= '0' && c <= '9') return static_cast<uint8_t>(c - '0');
            if (c >= 'a' && c <= 'f') return static_cast<uint8_t>(c - 'a' + 10);
            throw std::invalid_argument("bad hex digit");
        };
        out[i] = static_cast<uint8_t>((nibble(hex[2 * i]) << 4) | nibble(hex[2 * i + 1]));
    }
    return out;
}

void touch_host(std::map<uint32_t, HostActivity>& hosts, uint32_t ip, double ts, bool sender,
                uint32_t wire_len) {
    auto [it, inserted] = hosts.try_emplace(ip);
    HostActivity& host = it->second;
    if (inserted) {
        host.ip = ip;
        host.first_seen = ts;
        host.last_seen = ts;
    } else {
        host.first_seen = std::min(host.first_seen, ts);
        host.last_seen = std::max(host.last_seen, ts);
    }
    if (sender) {
        ++host.packets_sent;
        host.bytes_sent += wire_len;
    } else {
        ++host.packets_received;
        host.bytes_received += wire_len;
    }
}

}  // namespace

ScanLog scan(const Trace& trace, const std::vector<Signature>& signatures) {
    ScanLog log;
    for (size_t i = 0; i < trace.packets.size(); ++i) {
        const PacketRecord& pkt = trace.packets[i];
        touch_host(log.hosts, pkt.src.ip, pkt.ts, true, pkt.wire_len);
        touch_host(log.hosts, pkt.dst.ip, pkt.ts, false, pkt.wire_len);

        for (const auto& sig : signatures) {
            for (const auto& pattern : sig.patterns) {
                if (contains_pattern(pkt.payload, pattern, sig.case_insensitive)) {
                    log.markings.push_back(
                        {i, pkt.src.ip, sig.name, std::vector<uint8_t>(pattern.begin(), pattern.end())});
                    if (std::find(log.suspicious_ips.begin(), log.suspicious_ips.end(), pkt.src.ip) ==
                        log.suspicious_ips.end()) {
                        log.suspicious_ips.push_back(pkt.src.ip);
                    }
                    break;  // first matching pattern per signature
                }
            }
        }

        if (pkt.transport == Transport::UDP && pkt.dst.port == 53) {
            if (auto name = parse_dns_query(pkt.payload)) {
                log.dns_queries.push_back({pkt.ts, pkt.src.ip, *name});
            }
        }
    }
    return log;
}

std::optional<std::string> parse_dns_query(const std::vector<uint8_t>& payload) {
    if (payload.size() < 12) return std::nullopt;
    uint8_t flags_hi = payload[2];
    if ((flags_hi & 0x80) != 0) return std::nullopt;        // response
    if (((flags_hi >> 3) & 0x0f) != 0) return std::nullopt; // not a standard query
    uint16_t qdcount = static_cast<uint16_t>((payload[4] << 8) | payload[5]);
    if (qdcount < 1) return std::nullopt;

    std::string name;
    size_t pos = 12;
    size_t labels = 0;
    while (true) {
        if (pos >= payload.size()) return std::nullopt;
        uint8_t len = payload[pos++];
        if (len == 0) break;
        if ((len & 0xc0) != 0) return std::nullopt;  // compression pointer
        if (pos + len > payload.size()) return std::nullopt;
        if (labels > 0) name.push_back('.');
        name.append(payload.begin() + pos, payload.begin() + pos + len);
        pos += len;
        ++labels;
    }
    if (labels == 0) return std::nullopt;
    return name;
}

void write_log(const ScanLog& log, const std::string& path) {
    nlohmann::ordered_json j;
    auto hosts = nlohmann::ordered_json::array();
    for (const auto& [ip, host] : log.hosts) {  // map iteration is already ip-sorted
        hosts.push_back({{"ip", format_ip(ip)},
                         {"packets_sent", host.packets_sent},
                         {"packets_received", host.packets_received},
                         {"bytes_sent", host.bytes_sent},
                         {"bytes_received", host.bytes_received},
                         {"first_seen", host.first_seen},
                         {"last_seen", host.last_seen}});
    }
    j["hosts"] = std::move(hosts);
    auto queries = nlohmann::ordered_json::array();
    for (const auto& q : log.dns_queries) {
        queries.push_back({{"ts", q.ts}, {"client", format_ip(q.client_ip)}, {"name", q.name}});
    }
    j["dns_queries"] = std::move(queries);
    auto markings = nlohmann::ordered_json::array();
    for (const auto& m : log.markings) {
        markings.push_back({{"packet_index", m.packet_index},
                            {"ip", format_ip(m.ip)},
                            {"signature", m.signature_name},
                            {"matched_pattern", to_hex(m.matched_pattern)}});
    }
    j["markings"] = std::move(markings);
    auto suspicious = nlohmann::ordered_json::array();
    for (uint32_t ip : log.suspicious_ips) suspicious.push_back(format_ip(ip));
    j["suspicious_ips"] = std::move(suspicious);

    std::ofstream out(path);
    if (!out) throw Unwritable("cannot open " + path);
    out << j.dump(2) << "\n";
    if (!out) throw Unwritable("write failed: " + path);
}

ScanLog read_log(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Unreadable("cannot open " + path);
    nlohmann::json j = nlohmann::json::parse(in);

    ScanLog log;
    for (const auto& item : j.at("hosts")) {
        HostActivity host;
        host.ip = parse_ip(item.at("ip").get<std::string>());
        host.packets_sent = item.at("packets_sent").get<uint64_t>();
        host.packets_received = item.at("packets_received").get<uint64_t>();
        host.bytes_sent = item.at("bytes_sent").get<uint64_t>();
        host.bytes_received = item.at("bytes_received").get<uint64_t>();
        host.first_seen = item.at("first_seen").get<double>();
        host.last_seen = item.at("last_seen").get<double>();
        log.hosts[host.ip] = host;
    }
    for (const auto& item : j.at("dns_queries")) {
        log.dns_queries.push_back({item.at("ts").get<double>(),
                                   parse_ip(item.at("client").get<std::string>()),
                                   item.at("name").get<std::string>()});
    }
    for (const auto& item : j.at("markings")) {
        log.markings.push_back({item.at("packet_index").get<size_t>(),
                                parse_ip(item.at("ip").get<std::string>()),
                                item.at("signature").get<std::string>(),
                                from_hex(item.at("matched_pattern").get<std::string>())});
    }
    for (const auto& item : j.at("suspicious_ips")) {
        log.suspicious_ips.push_back(parse_ip(item.get<std::string>()));
    }
    return log;
}

}  // namespace botscope
