#include <doctest.h>

#include <fstream>

#include "botscope/classifier.hpp"
#include "botscope/errors.hpp"
#include "botscope/filter.hpp"
#include "botscope/ingest.hpp"
#include "botscope/synth.hpp"
#include "helpers.hpp"

using namespace botscope;

TEST_CASE("generate_scenario: determinism") {
    ScenarioConfig cfg;
    cfg.n_bots = 4;
    cfg.n_background_hosts = 6;
    cfg.duration_s = 120;
    auto [t1, gt1] = generate_scenario(cfg);
    auto [t2, gt2] = generate_scenario(cfg);
    REQUIRE(t1.packets.size() == t2.packets.size());
    for (size_t i = 0; i < t1.packets.size(); ++i) {
        CHECK(t1.packets[i].ts == t2.packets[i].ts);
        CHECK(t1.packets[i].src == t2.packets[i].src);
        CHECK(t1.packets[i].dst == t2.packets[i].dst);
        CHECK(t1.packets[i].payload == t2.packets[i].payload);
    }
    CHECK(ground_truth_to_json(gt1) == ground_truth_to_json(gt2));

    cfg.seed = 2;
    auto [t3, gt3] = generate_scenario(cfg);
    bool differs = t3.packets.size() != t1.packets.size();
    for (size_t i = 0; !differs && i < t1.packets.size(); ++i) {
        differs = t1.packets[i].ts != t3.packets[i].ts || t1.packets[i].payload != t3.packets[i].payload;
    }
    CHECK(differs);
}

TEST_CASE("generate_scenario: ground truth matches the emitted traffic") {
    ScenarioConfig cfg;
    cfg.n_bots = 5;
    cfg.n_background_hosts = 8;
    cfg.duration_s = 300;
    auto [trace, gt] = generate_scenario(cfg);

    REQUIRE(gt.controller_ip.has_value());
    CHECK(format_ip(*gt.controller_ip) == "10.0.0.1");
    CHECK(gt.bot_ips.size() == 5);
    CHECK(gt.c2_flow_keys.size() == 5);

    // Timestamps are sorted, quantized, and within [base, base + duration + slack).
    const double base = 1700000000.0;
    for (size_t i = 0; i < trace.packets.size(); ++i) {
        const auto& p = trace.packets[i];
        if (i) CHECK(trace.packets[i - 1].ts <= p.ts);
        CHECK(p.ts >= base);
        CHECK(p.ts <= base + cfg.duration_s + 5.0);
        CHECK(quantize_ts(p.ts) == p.ts);
        CHECK(p.wire_len >= p.payload.size());
    }

    // Every c2 key appears as an assembled flow, from a bot to the controller
    // on port 6667, and each such flow is chat-like.
    auto flows = assemble_flows(trace);
    size_t c2_found = 0;
    ChatThresholds chat;
    for (const auto& f : flows) {
        if (gt.c2_flow_keys.count(f.key)) {
            ++c2_found;
            CHECK(f.key.transport == Transport::TCP);
            bool touches_controller = f.key.a.ip == *gt.controller_ip || f.key.b.ip == *gt.controller_ip;
            CHECK(touches_controller);
            CHECK(gt.bot_ips.count(f.initiator.ip) == 1);
            CHECK(f.handshake == HandshakeState::ESTABLISHED);
            CHECK(is_chat_like(compute_features(f), chat));
        }
    }
    CHECK(c2_found == gt.c2_flow_keys.size());
}

TEST_CASE("generate_scenario: background-only traffic has no chat-like TCP flows") {
    ScenarioConfig cfg;
    cfg.n_bots = 0;
    cfg.n_background_hosts = 12;
    cfg.duration_s = 600;
    auto [trace, gt] = generate_scenario(cfg);
    CHECK_FALSE(gt.controller_ip.has_value());
    CHECK(gt.bot_ips.empty());
    CHECK(gt.c2_flow_keys.empty());
    CHECK(!trace.packets.empty());

    ChatThresholds chat;
    for (const auto& f : assemble_flows(trace)) {
        if (f.key.transport == Transport::TCP) {
            CHECK_FALSE(is_chat_like(compute_features(f), chat));
        }
    }
}

TEST_CASE("generate_scenario: invalid configs") {
    ScenarioConfig bad;
    bad.duration_s = 0;
    CHECK_THROWS_AS(generate_scenario(bad), InvalidConfig);

    ScenarioConfig neg_jitter;
    neg_jitter.c2_jitter_s = -1;
    CHECK_THROWS_AS(generate_scenario(neg_jitter), InvalidConfig);

    ScenarioConfig bad_period;
    bad_period.c2_msg_period_s = 0;
    CHECK_THROWS_AS(generate_scenario(bad_period), InvalidConfig);
}

TEST_CASE("write_pcap / write_jsonl: empty trace and unwritable path") {
    Trace empty;
    auto pcap_path = testing::temp_path("empty.pcap");
    write_pcap(empty, pcap_path);
    auto [ptrace, pstats] = read_pcap(pcap_path);
    CHECK(ptrace.packets.empty());
    CHECK(pstats.packets_read == 0);

    auto jsonl_path = testing::temp_path("empty.jsonl");
    write_jsonl(empty, jsonl_path);
    CHECK(read_jsonl(jsonl_path).first.packets.empty());

    CHECK_THROWS_AS(write_pcap(empty, "/nonexistent-dir/x.pcap"), Unwritable);
    CHECK_THROWS_AS(write_jsonl(empty, "/nonexistent-dir/x.jsonl"), Unwritable);
}

TEST_CASE("ground_truth_to_json: stable shape") {
    GroundTruth gt;
    gt.controller_ip = parse_ip("10.0.0.1");
    gt.bot_ips = {parse_ip("10.0.1.2"), parse_ip("10.0.1.1")};
    auto text = ground_truth_to_json(gt);
    CHECK(text.find("\"10.0.0.1\"") != std::string::npos);
    // Set ordering makes bot listing ascend numerically.
    CHECK(text.find("10.0.1.1") < text.find("10.0.1.2"));

    GroundTruth none;
    CHECK(ground_truth_to_json(none).find("null") != std::string::npos);
}
