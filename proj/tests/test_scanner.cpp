#include <doctest.h>

#include <map>
#include <random>

#include "botscope/errors.hpp"
#include "botscope/ingest.hpp"
#include "botscope/scanner.hpp"
#include "botscope/synth.hpp"
#include "helpers.hpp"

using namespace botscope;

namespace {

PacketRecord packet(double ts, const std::string& src, const std::string& dst,
                    const std::string& payload, Transport transport = Transport::TCP) {
    PacketRecord p;
    p.ts = ts;
    p.src = parse_endpoint(src);
    p.dst = parse_endpoint(dst);
    p.transport = transport;
    p.payload.assign(payload.begin(), payload.end());
    p.wire_len = static_cast<uint32_t>(54 + payload.size());
    return p;
}

}  // namespace

TEST_CASE("scan: empty trace yields an empty log") {
    ScanLog log = scan(Trace{}, default_signatures());
    CHECK(log.hosts.empty());
    CHECK(log.markings.empty());
    CHECK(log.suspicious_ips.empty());
    CHECK(log.dns_queries.empty());
}

TEST_CASE("scan: PRIVMSG payload produces a marking and a suspicious ip") {
    Trace trace = normalize_trace({packet(1.0, "10.0.1.5:4000", "10.0.0.1:6667", "PRIVMSG #c :hi")});
    ScanLog log = scan(trace, default_signatures());
    REQUIRE(log.markings.size() == 1);
    CHECK(log.markings[0].signature_name == "irc");
    CHECK(log.markings[0].ip == parse_ip("10.0.1.5"));
    std::string matched(log.markings[0].matched_pattern.begin(), log.markings[0].matched_pattern.end());
    CHECK(matched == "PRIVMSG");
    CHECK(log.suspicious_ips == std::vector<uint32_t>{parse_ip("10.0.1.5")});
}

TEST_CASE("scan: per-host counts match a brute-force tally on a random trace") {
    std::mt19937_64 rng(11);
    std::vector<PacketRecord> packets;
    for (int i = 0; i < 500; ++i) {
        auto src = "10.0.3." + std::to_string(1 + rng() % 10) + ":" + std::to_string(1024 + rng() % 100);
        auto dst = "10.0.4." + std::to_string(1 + rng() % 10) + ":80";
        packets.push_back(packet(static_cast<double>(i), src, dst, "x"));
    }
    Trace trace = normalize_trace(packets);
    ScanLog log = scan(trace, default_signatures());

    std::map<uint32_t, uint64_t> sent, received;
    for (const auto& p : trace.packets) {
        sent[p.src.ip]++;
        received[p.dst.ip]++;
    }
    uint64_t total_sent = 0;
    for (const auto& [ip, host] : log.hosts) {
        CHECK(host.packets_sent == sent[ip]);
        CHECK(host.packets_received == received[ip]);
        CHECK(host.first_seen <= host.last_seen);
        total_sent += host.packets_sent;
    }
    CHECK(total_sent == trace.packets.size());
}

TEST_CASE("scan: suspicious_ips is deduplicated in first-marking order") {
    Trace trace = normalize_trace({
        packet(1.0, "10.0.1.9:4000", "10.0.0.1:6667", "PRIVMSG JOIN"),
        packet(2.0, "10.0.1.2:4001", "10.0.0.1:6667", ".advscan 445"),
        packet(3.0, "10.0.1.9:4000", "10.0.0.1:6667", "NICK again"),
    });
    ScanLog log = scan(trace, default_signatures());
    CHECK(log.suspicious_ips ==
          std::vector<uint32_t>{parse_ip("10.0.1.9"), parse_ip("10.0.1.2")});
    for (const auto& m : log.markings) {
        CHECK(std::find(log.suspicious_ips.begin(), log.suspicious_ips.end(), m.ip) !=
              log.suspicious_ips.end());
    }
    // Determinism.
    CHECK(scan(trace, default_signatures()) == log);
}

TEST_CASE("parse_dns_query on a hand-encoded query") {
    // Header: id 0x1234, flags 0x0100 (RD), QDCOUNT 1; then "evil.example", A, IN.
    std::vector<uint8_t> payload = {0x12, 0x34, 0x01, 0x00, 0x00, 0x01, 0x00, 0x00,
                                    0x00, 0x00, 0x00, 0x00,
                                    4,    'e',  'v',  'i',  'l',
                                    7,    'e',  'x',  'a',  'm',  'p', 'l', 'e',
                                    0,    0x00, 0x01, 0x00, 0x01};
    auto name = parse_dns_query(payload);
    REQUIRE(name.has_value());
    CHECK(*name == "evil.example");

    CHECK_FALSE(parse_dns_query({1, 2, 3, 4}).has_value());

    auto response = payload;
    response[2] = 0x81;  // QR bit set
    CHECK_FALSE(parse_dns_query(response).has_value());

    auto compressed = payload;
    compressed[12] = 0xc0;  // compression pointer in QNAME
    CHECK_FALSE(parse_dns_query(compressed).has_value());
}

TEST_CASE("scan picks up DNS queries from generated background traffic") {
    ScenarioConfig cfg;
    cfg.n_bots = 0;
    cfg.n_background_hosts = 6;
    cfg.duration_s = 60;
    cfg.seed = 5;
    auto [trace, gt] = generate_scenario(cfg);
    ScanLog log = scan(trace, default_signatures());
    CHECK(log.dns_queries.size() == 6 * 3);
    for (const auto& q : log.dns_queries) CHECK(q.name.ends_with(".example"));
}

TEST_CASE("write_log/read_log round-trip") {
    auto empty_path = testing::temp_path("empty_log.json");
    write_log(ScanLog{}, empty_path);
    CHECK(read_log(empty_path) == ScanLog{});

    Trace trace = normalize_trace({
        packet(1.5, "10.0.1.9:4000", "10.0.0.1:6667", "PRIVMSG #c :x"),
        packet(2.5, "10.0.2.1:5000", "10.0.0.53:53", "", Transport::UDP),
    });
    ScanLog log = scan(trace, default_signatures());
    REQUIRE(log.markings.size() == 1);
    auto path = testing::temp_path("scanlog.json");
    write_log(log, path);
    CHECK(read_log(path) == log);
}

TEST_CASE("write_log: unwritable path") {
    CHECK_THROWS_AS(write_log(ScanLog{}, "/nonexistent_dir_zzz/log.json"), Unwritable);
}
