#include <doctest.h>

#include <map>
#include <random>
#include <set>

#include "botscope/errors.hpp"
#include "botscope/topology.hpp"
#include "helpers.hpp"

using namespace botscope;

namespace {

FlowSummary directed_flow(uint64_t id, const std::string& from, const std::string& to) {
    FlowSummary flow = testing::make_flow(id, {0.0, 1.0}, {60, 60});
    Endpoint a = parse_endpoint(from);
    Endpoint b = parse_endpoint(to);
    flow.key = FlowKey(a, b, Transport::TCP);
    flow.initiator = a;
    return flow;
}

struct FlowSet {
    std::vector<FlowSummary> storage;
    std::map<uint64_t, const FlowSummary*> index;

    void add(FlowSummary flow) { storage.push_back(std::move(flow)); }
    const std::map<uint64_t, const FlowSummary*>& build() {
        index.clear();
        for (const auto& f : storage) index[f.id] = &f;
        return index;
    }
};

Cluster cluster_of(std::vector<uint64_t> members) {
    Cluster c;
    c.id = 0;
    c.members = std::move(members);
    return c;
}

}  // namespace

TEST_CASE("build_comm_graph: single flow") {
    FlowSet fs;
    fs.add(directed_flow(0, "10.0.1.1:4000", "10.0.0.1:6667"));
    auto graph = build_comm_graph(cluster_of({0}), fs.build());
    CHECK(graph.nodes.size() == 2);
    REQUIRE(graph.edges.size() == 1);
    auto [key, mult] = *graph.edges.begin();
    CHECK(key.first == parse_ip("10.0.1.1"));
    CHECK(key.second == parse_ip("10.0.0.1"));
    CHECK(mult == 1);
}

TEST_CASE("build_comm_graph: star construction and unknown ids") {
    FlowSet fs;
    for (uint64_t i = 0; i < 5; ++i) {
        fs.add(directed_flow(i, "10.0.0.1:6667", "10.0.1." + std::to_string(i + 1) + ":4000"));
    }
    auto graph = build_comm_graph(cluster_of({0, 1, 2, 3, 4}), fs.build());
    CHECK(graph.nodes.size() == 6);
    CHECK(graph.edges.size() == 5);
    for (const auto& [key, mult] : graph.edges) CHECK(key.first == parse_ip("10.0.0.1"));

    CHECK_THROWS_AS(build_comm_graph(cluster_of({99}), fs.build()), UnknownFlowId);
}

TEST_CASE("build_comm_graph: edge multiset equals a brute-force tally") {
    std::mt19937_64 rng(83);
    FlowSet fs;
    std::map<std::pair<uint32_t, uint32_t>, uint64_t> expect;
    std::vector<uint64_t> ids;
    for (uint64_t i = 0; i < 60; ++i) {
        auto from = "10.0.1." + std::to_string(1 + rng() % 6) + ":" + std::to_string(4000 + i);
        auto to = "10.0.2." + std::to_string(1 + rng() % 6) + ":80";
        fs.add(directed_flow(i, from, to));
        expect[{parse_endpoint(from).ip, parse_endpoint(to).ip}]++;
        ids.push_back(i);
    }
    auto graph = build_comm_graph(cluster_of(ids), fs.build());
    CHECK(graph.edges == expect);
}

TEST_CASE("identify_controller: star, path, and tie rule") {
    FlowSet star;
    for (uint64_t i = 0; i < 5; ++i) {
        star.add(directed_flow(i, "10.0.1." + std::to_string(i + 1) + ":4000", "10.0.0.1:6667"));
    }
    auto graph = build_comm_graph(cluster_of({0, 1, 2, 3, 4}), star.build());
    auto winner = identify_controller(graph, 3);
    REQUIRE(winner.has_value());
    CHECK(winner->first == parse_ip("10.0.0.1"));
    CHECK(winner->second == 5);

    FlowSet path;
    path.add(directed_flow(0, "10.0.0.1:1000", "10.0.0.2:1000"));
    path.add(directed_flow(1, "10.0.0.2:2000", "10.0.0.3:1000"));
    auto path_graph = build_comm_graph(cluster_of({0, 1}), path.build());
    CHECK_FALSE(identify_controller(path_graph, 3).has_value());

    // Two hubs tied at fan-out 4: numerically smaller ip wins.
    FlowSet tied;
    uint64_t id = 0;
    for (int i = 0; i < 4; ++i) {
        tied.add(directed_flow(id++, "10.0.0.1:6667", "10.1.0." + std::to_string(i + 1) + ":4000"));
        tied.add(directed_flow(id++, "10.0.0.2:6667", "10.2.0." + std::to_string(i + 1) + ":4000"));
    }
    std::vector<uint64_t> ids(id);
    for (uint64_t i = 0; i < id; ++i) ids[i] = i;
    auto tied_graph = build_comm_graph(cluster_of(ids), tied.build());
    auto tied_winner = identify_controller(tied_graph, 3);
    REQUIRE(tied_winner.has_value());
    CHECK(tied_winner->first == parse_ip("10.0.0.1"));
    CHECK(tied_winner->second == 4);
}

TEST_CASE("assign_bot_name: majority, empty, and counting oracle") {
    auto with_hits = [](std::vector<std::string> names) {
        FlowClass fc;
        for (const auto& n : names) fc.signature_hits.push_back({n, n, 1});
        return fc;
    };
    CHECK(assign_bot_name({with_hits({"irc", "irc"}), with_hits({"irc", "irc", "botcmd"})}) == "irc");
    CHECK(assign_bot_name({with_hits({})}) == "unknown");
    CHECK(assign_bot_name({}) == "unknown");
    CHECK(assign_bot_name({with_hits({"b", "a"})}) == "a");  // tie -> lexicographic

    std::mt19937_64 rng(89);
    const std::vector<std::string> pool = {"irc", "http", "botcmd", "zeta"};
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<FlowClass> evidence;
        std::map<std::string, uint64_t> counts;
        size_t nflows = rng() % 6;
        for (size_t f = 0; f < nflows; ++f) {
            std::vector<std::string> names;
            size_t nhits = rng() % 4;
            for (size_t h = 0; h < nhits; ++h) {
                names.push_back(pool[rng() % pool.size()]);
                counts[names.back()]++;
            }
            evidence.push_back(with_hits(names));
        }
        std::string expect = "unknown";
        uint64_t best = 0;
        for (const auto& [name, count] : counts) {
            if (count > best) {
                expect = name;
                best = count;
            }
        }
        CHECK(assign_bot_name(evidence) == expect);
    }
}

TEST_CASE("build_report: sorting and determinism") {
    StageCounts counts;
    counts.packets_ingested = 100;
    counts.flows_assembled = 10;
    counts.flows_after_tcp_filter = 8;
    counts.flows_after_incomplete_filter = 7;
    counts.chat_like_flows = 4;
    counts.pairs_scored = 6;
    counts.clusters = 1;

    ControllerVerdict v1{parse_ip("10.0.0.2"), 4, 0, "irc", {1, 2}};
    ControllerVerdict v2{parse_ip("10.0.0.1"), 4, 1, "irc", {3}};
    ControllerVerdict v3{parse_ip("10.0.0.9"), 7, 2, "botcmd", {4}};
    ScanLog log;
    log.suspicious_ips = {parse_ip("10.0.1.1")};

    auto report = build_report({v1, v2, v3}, log, counts, "{}", 42);
    REQUIRE(report.controllers.size() == 3);
    CHECK(report.controllers[0].ip == parse_ip("10.0.0.9"));  // highest fan-out first
    CHECK(report.controllers[1].ip == parse_ip("10.0.0.1"));  // tie broken by ip
    CHECK(report.controllers[2].ip == parse_ip("10.0.0.2"));

    auto empty = build_report({}, log, counts, "{}", 42);
    CHECK(empty.controllers.empty());
    CHECK(empty.counts.packets_ingested == 100);

    CHECK(report_to_json(report) == report_to_json(build_report({v1, v2, v3}, log, counts, "{}", 42)));
    CHECK(report_to_text(report).find("10.0.0.9") != std::string::npos);
}
