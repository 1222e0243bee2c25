#include "botscope/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>

#include <json.hpp>

#include "botscope/errors.hpp"
#include "botscope/ingest.hpp"

namespace botscope {

namespace {

constexpr double kBaseTs = 1700000000.0;

// Thin wrapper so generated byte streams do not depend on the standard
// library's distribution implementations.
struct Rng {
    std::mt19937_64 engine;

    explicit Rng(uint64_t seed) : engine(seed) {}

    double uniform(double lo, double hi) {
        auto mantissa = engine() >> 11;  // 53 random bits
        return lo + (hi - lo) * (static_cast<double>(mantissa) * 0x1.0p-53);
    }

    uint64_t below(uint64_t n) { return engine() % n; }
};

struct Builder {
    std::vector<PacketRecord> packets;

    void add(double ts, Endpoint src, Endpoint dst, Transport transport, uint8_t flags,
             std::vector<uint8_t> payload) {
        PacketRecord rec;
        rec.ts = quantize_ts(ts);
        rec.src = src;
        rec.dst = dst;
        rec.transport = transport;
        rec.tcp_flags = transport == Transport::TCP ? flags : uint8_t{0};
        size_t header = 14 + 20 + (transport == Transport::TCP ? 20 : transport == Transport::UDP ? 8 : 0);
        rec.wire_len = static_cast<uint32_t>(header + payload.size());
        rec.payload = std::move(payload);
        packets.push_back(std::move(rec));
    }
};

std::vector<uint8_t> text_payload(const std::string& prefix, size_t total, Rng& rng) {
    std::string s = prefix;
    static const char* filler = "abcdefghijklmnopqrstuvwxyz0123456789";
    while (s.size() + 2 < total) s.push_back(filler[rng.below(36)]);
    s += "\r\n";
    return {s.begin(), s.end()};
}

std::vector<uint8_t> dns_query_payload(const std::string& name, uint16_t txid) {
    std::vector<uint8_t> p = {static_cast<uint8_t>(txid >> 8), static_cast<uint8_t>(txid & 0xff),
                              0x01, 0x00,  // RD, standard query
                              0x00, 0x01, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00};
    size_t start = 0;
    while (start <= name.size()) {
        size_t dot = name.find('.', start);
        if (dot == std::string::npos) dot = name.size();
        p.push_back(static_cast<uint8_t>(dot - start));
        p.insert(p.end(), name.begin() + start, name.begin() + dot);
        start = dot + 1;
    }
    p.push_back(0);
    p.push_back(0x00); p.push_back(0x01);  // QTYPE A
    p.push_back(0x00); p.push_back(0x01);  // QCLASS IN
    return p;
}

void put32(std::vector<uint8_t>& out, uint32_t v) {
    out.push_back(v & 0xff);
    out.push_back((v >> 8) & 0xff);
    out.push_back((v >> 16) & 0xff);
    out.push_back((v >> 24) & 0xff);
}

void put16be(std::vector<uint8_t>& out, uint16_t v) {
    out.push_back(v >> 8);
    out.push_back(v & 0xff);
}

void put32be(std::vector<uint8_t>& out, uint32_t v) {
    out.push_back(v >> 24);
    out.push_back((v >> 16) & 0xff);
    out.push_back((v >> 8) & 0xff);
    out.push_back(v & 0xff);
}

}  // namespace

std::pair<Trace, GroundTruth> generate_scenario(const ScenarioConfig& cfg) {
    if (cfg.duration_s <= 0 || cfg.c2_msg_period_s <= 0 || cfg.c2_jitter_s < 0) {
        throw InvalidConfig("generate_scenario: non-positive duration/period or negative jitter");
    }

    Rng rng(cfg.seed);
    Builder b;
    GroundTruth gt;

    const Endpoint controller{parse_ip("10.0.0.1"), 6667};
    if (cfg.n_bots >= 1) gt.controller_ip = controller.ip;

    // C&C conversations: one long-lived flow per bot, commands synchronized
    // across bots at a shared cadence.
    std::vector<Endpoint> bots;
    for (size_t i = 0; i < cfg.n_bots; ++i) {
        Endpoint bot{parse_ip("10.0.1." + std::to_string(1 + i % 250)),
                     static_cast<uint16_t>(40000 + i)};
        bots.push_back(bot);
        gt.bot_ips.insert(bot.ip);
        gt.c2_flow_keys.insert(FlowKey(bot, controller, Transport::TCP));

        double t = 0.5 + 0.02 * static_cast<double>(i);
        b.add(t, bot, controller, Transport::TCP, FLAG_SYN, {});
        b.add(t + 0.01, controller, bot, Transport::TCP, FLAG_SYN | FLAG_ACK, {});
        b.add(t + 0.02, bot, controller, Transport::TCP, FLAG_ACK, {});
        std::string nick = "NICK bot" + std::to_string(i) + "\r\nJOIN #c2\r\n";
        b.add(t + 0.05 + rng.uniform(0.0, 0.1), bot, controller, Transport::TCP,
              FLAG_PSH | FLAG_ACK, std::vector<uint8_t>(nick.begin(), nick.end()));
    }

    std::vector<double> command_times;
    for (double t = 5.0; t < cfg.duration_s - 2.0; t += cfg.c2_msg_period_s) {
        command_times.push_back(t + rng.uniform(-cfg.c2_jitter_s, cfg.c2_jitter_s));
    }
    for (double cmd_ts : command_times) {
        for (const Endpoint& bot : bots) {
            auto cmd_len = static_cast<size_t>(40 + rng.below(121));
            b.add(cmd_ts + rng.uniform(0.0, 0.05), controller, bot, Transport::TCP,
                  FLAG_PSH | FLAG_ACK, text_payload("PRIVMSG #c2 :.sysinfo ", cmd_len, rng));
            auto reply_len = static_cast<size_t>(40 + rng.below(121));
            b.add(cmd_ts + rng.uniform(0.1, 0.9), bot, controller, Transport::TCP,
                  FLAG_PSH | FLAG_ACK, text_payload("PRIVMSG #c2 :reply ", reply_len, rng));
        }
    }

    // Background: short HTTP fetches with a DNS lookup, plus occasional
    // failed SYN-RST scans. Nothing here is long-lived and low-rate.
    uint16_t next_client_port = 50000;
    for (size_t h = 0; h < cfg.n_background_hosts; ++h) {
        Endpoint client{parse_ip("10.0.2." + std::to_string(1 + h % 250)), 0};
        for (size_t f = 0; f < cfg.background_flows_per_host; ++f) {
            client.port = next_client_port++;
            size_t server_idx = rng.below(16);
            Endpoint server{parse_ip("93.184.216." + std::to_string(1 + server_idx)), 80};
            double t = rng.uniform(1.0, std::max(cfg.duration_s - 30.0, 2.0));

            std::string qname = "server" + std::to_string(server_idx) + ".example";
            b.add(t, {client.ip, static_cast<uint16_t>(33000 + rng.below(2000))},
                  {parse_ip("10.0.0.53"), 53}, Transport::UDP, 0,
                  dns_query_payload(qname, static_cast<uint16_t>(rng.below(65536))));

            double c = t + rng.uniform(0.01, 0.05);
            b.add(c, client, server, Transport::TCP, FLAG_SYN, {});
            b.add(c + 0.01, server, client, Transport::TCP, FLAG_SYN | FLAG_ACK, {});
            b.add(c + 0.02, client, server, Transport::TCP, FLAG_ACK, {});
            std::string req = "GET /item" + std::to_string(rng.below(1000)) +
                              " HTTP/1.1\r\nHost: " + qname + "\r\n\r\n";
            b.add(c + 0.03, client, server, Transport::TCP, FLAG_PSH | FLAG_ACK,
                  std::vector<uint8_t>(req.begin(), req.end()));
            double r = c + 0.05;
            size_t response_pkts = 3 + rng.below(8);
            for (size_t p = 0; p < response_pkts; ++p) {
                auto size = static_cast<size_t>(400 + rng.below(1101));
                std::string body = p == 0 ? "HTTP/1.1 200 OK\r\nContent-Type: text/html\r\n\r\n" : "x";
                b.add(r, server, client, Transport::TCP, FLAG_ACK, text_payload(body, size, rng));
                r += rng.uniform(0.05, 0.3);
            }
            b.add(r, client, server, Transport::TCP, FLAG_FIN | FLAG_ACK, {});
            b.add(r + 0.01, server, client, Transport::TCP, FLAG_FIN | FLAG_ACK, {});
        }

        if (rng.below(5) == 0) {  // failed scan
            client.port = next_client_port++;
            Endpoint target{parse_ip("93.184.216." + std::to_string(1 + rng.below(16))),
                            static_cast<uint16_t>(rng.below(2) == 0 ? 6667 : 445)};
            double t = rng.uniform(1.0, cfg.duration_s - 1.0);
            b.add(t, client, target, Transport::TCP, FLAG_SYN, {});
            b.add(t + 0.01, target, client, Transport::TCP, FLAG_RST | FLAG_ACK, {});
        }
    }

    for (PacketRecord& pkt : b.packets) pkt.ts = quantize_ts(pkt.ts + kBaseTs);
    return {normalize_trace(std::move(b.packets)), std::move(gt)};
}

void write_pcap(const Trace& trace, const std::string& path) {
    std::vector<uint8_t> out;
    put32(out, 0xA1B2C3D4);  // microsecond magic, little-endian on disk
    out.push_back(2); out.push_back(0);  // version 2.4
    out.push_back(4); out.push_back(0);
    put32(out, 0);       // thiszone
    put32(out, 0);       // sigfigs
    put32(out, 65535);   // snaplen
    put32(out, 1);       // linktype: Ethernet

    for (const PacketRecord& pkt : trace.packets) {
        std::vector<uint8_t> frame;
        // Ethernet: fixed synthetic MACs.
        static const uint8_t macs[12] = {2, 0, 0, 0, 0, 2, 2, 0, 0, 0, 0, 1};
        frame.insert(frame.end(), macs, macs + 12);
        put16be(frame, 0x0800);

        uint8_t proto = pkt.transport == Transport::TCP ? 6
                        : pkt.transport == Transport::UDP ? 17 : 253;
        size_t l4_len = pkt.transport == Transport::TCP ? 20
                        : pkt.transport == Transport::UDP ? 8 : 0;
        auto total_len = static_cast<uint16_t>(20 + l4_len + pkt.payload.size());
        frame.push_back(0x45);  // version 4, IHL 5
        frame.push_back(0);
        put16be(frame, total_len);
        put16be(frame, 0);  // id
        put16be(frame, 0);  // flags/frag
        frame.push_back(64);  // ttl
        frame.push_back(proto);
        put16be(frame, 0);  // checksum (not validated by the reader)
        put32be(frame, pkt.src.ip);
        put32be(frame, pkt.dst.ip);

        if (pkt.transport == Transport::TCP) {
            put16be(frame, pkt.src.port);
            put16be(frame, pkt.dst.port);
            put32be(frame, 0);  // seq
            put32be(frame, 0);  // ack
            frame.push_back(5 << 4);  // data offset 5
            frame.push_back(pkt.tcp_flags);
            put16be(frame, 65535);  // window
            put16be(frame, 0);      // checksum
            put16be(frame, 0);      // urgent
        } else if (pkt.transport == Transport::UDP) {
            put16be(frame, pkt.src.port);
            put16be(frame, pkt.dst.port);
            put16be(frame, static_cast<uint16_t>(8 + pkt.payload.size()));
            put16be(frame, 0);  // checksum
        }
        frame.insert(frame.end(), pkt.payload.begin(), pkt.payload.end());

        double sec = std::floor(pkt.ts);
        auto usec = std::llround((pkt.ts - sec) * 1e6);
        if (usec >= 1000000) {
            sec += 1.0;
            usec = 0;
        }
        put32(out, static_cast<uint32_t>(sec));
        put32(out, static_cast<uint32_t>(usec));
        put32(out, static_cast<uint32_t>(frame.size()));  // incl_len
        put32(out, pkt.wire_len);                         // orig_len
        out.insert(out.end(), frame.begin(), frame.end());
    }

    std::ofstream file(path, std::ios::binary);
    if (!file) throw Unwritable("cannot open " + path);
    file.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
    if (!file) throw Unwritable("write failed: " + path);
}

void write_jsonl(const Trace& trace, const std::string& path) {
    std::ofstream file(path);
    if (!file) throw Unwritable("cannot open " + path);
    static const char* hex_digits = "0123456789abcdef";
    for (const PacketRecord& pkt : trace.packets) {
        nlohmann::ordered_json j;
        j["ts"] = pkt.ts;
        j["src"] = format_endpoint(pkt.src);
        j["dst"] = format_endpoint(pkt.dst);
        j["transport"] = pkt.transport == Transport::TCP ? "TCP"
                         : pkt.transport == Transport::UDP ? "UDP" : "OTHER";
        auto flags = nlohmann::ordered_json::array();
        if (pkt.tcp_flags & FLAG_SYN) flags.push_back("SYN");
        if (pkt.tcp_flags & FLAG_ACK) flags.push_back("ACK");
        if (pkt.tcp_flags & FLAG_RST) flags.push_back("RST");
        if (pkt.tcp_flags & FLAG_FIN) flags.push_back("FIN");
        if (pkt.tcp_flags & FLAG_PSH) flags.push_back("PSH");
        if (pkt.tcp_flags & FLAG_URG) flags.push_back("URG");
        j["flags"] = std::move(flags);
        std::string hex;
        hex.reserve(pkt.payload.size() * 2);
        for (uint8_t byte : pkt.payload) {
            hex.push_back(hex_digits[byte >> 4]);
            hex.push_back(hex_digits[byte & 0x0f]);
        }
        j["payload"] = std::move(hex);
        j["wire_len"] = pkt.wire_len;
        file << j.dump() << "\n";
    }
    if (!file) throw Unwritable("write failed: " + path);
}

std::string ground_truth_to_json(const GroundTruth& gt) {
    nlohmann::ordered_json j;
    if (gt.controller_ip) {
        j["controller_ip"] = format_ip(*gt.controller_ip);
    } else {
        j["controller_ip"] = nullptr;
    }
    auto bots = nlohmann::ordered_json::array();
    for (uint32_t ip : gt.bot_ips) bots.push_back(format_ip(ip));
    j["bot_ips"] = std::move(bots);
    auto keys = nlohmann::ordered_json::array();
    for (const FlowKey& key : gt.c2_flow_keys) {
        keys.push_back({{"a", format_endpoint(key.a)},
                        {"b", format_endpoint(key.b)},
                        {"transport", key.transport == Transport::TCP ? "TCP" : "UDP"}});
    }
    j["c2_flow_keys"] = std::move(keys);
    return j.dump(2) + "\n";
}

}  // namespace botscope
