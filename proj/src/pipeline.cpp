#include "botscope/pipeline.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include <json.hpp>

#include "botscope/errors.hpp"

namespace botscope {

namespace {

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Unwritable("cannot open " + path);
    out << content;
    if (!out) throw Unwritable("write failed: " + path);
}

std::pair<Trace, IngestStats> ingest_input(const RunConfig& cfg) {
    return cfg.format == InputFormat::PCAP ? read_pcap(cfg.input) : read_jsonl(cfg.input);
}

std::vector<Signature> load_signatures(const RunConfig& cfg) {
    return cfg.signature_file.empty() ? default_signatures() : read_signatures(cfg.signature_file);
}

}  // namespace

void RunConfig::validate() const {
    if (idle_timeout <= 0) throw InvalidConfig("idle_timeout must be > 0");
    if (chat.max_chat_pkt_size < 0 || chat.min_chat_duration < 0 || chat.max_chat_bandwidth < 0) {
        throw InvalidConfig("chat thresholds must be non-negative");
    }
    if (correlation.bin_width <= 0) throw InvalidConfig("bin_width must be > 0");
    if (correlation.weight_temporal < 0 || correlation.weight_size < 0 ||
        std::abs(correlation.weight_temporal + correlation.weight_size - 1.0) > 1e-9) {
        throw InvalidConfig("correlation weights must be non-negative and sum to 1");
    }
    if (correlation.size_edges.size() < 2 ||
        !std::is_sorted(correlation.size_edges.begin(), correlation.size_edges.end())) {
        throw InvalidConfig("size_edges must be ascending with at least 2 entries");
    }
    if (correlation.max_flows < 1) throw InvalidConfig("max_flows must be >= 1");
    if (cluster_threshold < 0 || cluster_threshold > 1) {
        throw InvalidConfig("cluster_threshold must be in [0, 1]");
    }
    if (min_cluster_size < 1) throw InvalidConfig("min_cluster_size must be >= 1");
    if (kmeans_k < 1) throw InvalidConfig("kmeans_k must be >= 1");
    if (min_fanout < 1) throw InvalidConfig("min_fanout must be >= 1");
}

std::string RunConfig::echo_json() const {
    nlohmann::ordered_json j;
    j["input"] = input;
    j["format"] = format == InputFormat::PCAP ? "pcap" : "jsonl";
    j["signatures"] = signature_file;
    j["tree_model"] = tree_model_file;
    j["idle_timeout"] = idle_timeout;
    j["max_chat_pkt_size"] = chat.max_chat_pkt_size;
    j["min_chat_duration"] = chat.min_chat_duration;
    j["max_chat_bandwidth"] = chat.max_chat_bandwidth;
    j["bin_width"] = correlation.bin_width;
    j["weight_temporal"] = correlation.weight_temporal;
    j["weight_size"] = correlation.weight_size;
    j["min_overlap_bins"] = correlation.min_overlap_bins;
    j["size_edges"] = correlation.size_edges;
    j["max_flows"] = correlation.max_flows;
    j["cluster_threshold"] = cluster_threshold;
    j["min_cluster_size"] = min_cluster_size;
    j["cluster_method"] = cluster_method == ClusterMethod::GRAPH ? "graph" : "kmeans";
    j["kmeans_k"] = kmeans_k;
    j["min_fanout"] = min_fanout;
    j["seed"] = seed;
    return j.dump();
}

PipelineResult run_pipeline(const Trace& trace, const IngestStats& ingest, const RunConfig& cfg) {
    cfg.validate();
    PipelineResult r;
    r.ingest = ingest;

    std::vector<Signature> signatures = load_signatures(cfg);
    std::optional<TreeModel> model;
    if (!cfg.tree_model_file.empty()) model = read_tree_model(cfg.tree_model_file);

    r.scanlog = scan(trace, signatures);

    std::vector<FlowSummary> assembled = assemble_flows(trace, cfg.idle_timeout);
    std::vector<FlowSummary> tcp_only = quick_data_reduction(assembled);
    r.flows = incomplete_comm_filter(tcp_only);

    StageCounts counts;
    counts.packets_ingested = trace.packets.size();
    counts.flows_assembled = assembled.size();
    counts.flows_after_tcp_filter = tcp_only.size();
    counts.flows_after_incomplete_filter = r.flows.size();

    for (const FlowSummary& flow : r.flows) {
        r.classes.push_back(
            classify_flow(flow, signatures, model ? &*model : nullptr, cfg.chat));
        if (r.classes.back().chat_like) r.chat_flows.push_back(flow);
    }
    counts.chat_like_flows = r.chat_flows.size();

    r.correlations = correlate_all(r.chat_flows, cfg.correlation);
    counts.pairs_scored = r.correlations.size();

    if (cfg.cluster_method == ClusterMethod::GRAPH) {
        std::vector<uint64_t> ids;
        for (const FlowSummary& flow : r.chat_flows) ids.push_back(flow.id);
        r.clusters = graph_clusters(ids, r.correlations, cfg.cluster_threshold, cfg.min_cluster_size);
    } else if (r.chat_flows.size() >= cfg.kmeans_k) {
        std::vector<FeatureVector> features;
        for (const FlowSummary& flow : r.chat_flows) features.push_back(compute_features(flow));
        std::vector<Cluster> raw = kmeans(standardize(features), cfg.kmeans_k, cfg.seed);
        for (Cluster& cluster : raw) {
            Cluster mapped;
            mapped.id = cluster.id;
            mapped.method = ClusterMethod::KMEANS;
            for (uint64_t idx : cluster.members) mapped.members.push_back(r.chat_flows[idx].id);
            std::sort(mapped.members.begin(), mapped.members.end());
            if (mapped.members.size() >= cfg.min_cluster_size) r.clusters.push_back(std::move(mapped));
        }
    }
    counts.clusters = r.clusters.size();

    std::map<uint64_t, const FlowSummary*> flow_index;
    for (const FlowSummary& flow : r.flows) flow_index[flow.id] = &flow;
    std::map<uint64_t, const FlowClass*> class_index;
    for (const FlowClass& fc : r.classes) class_index[fc.flow_id] = &fc;

    std::vector<ControllerVerdict> verdicts;
    for (const Cluster& cluster : r.clusters) {
        CommGraph graph = build_comm_graph(cluster, flow_index);
        auto winner = identify_controller(graph, cfg.min_fanout);
        if (!winner) continue;
        ControllerVerdict verdict;
        verdict.ip = winner->first;
        verdict.fan_out = winner->second;
        verdict.cluster_id = cluster.id;
        verdict.evidence_flow_ids = cluster.members;
        std::vector<FlowClass> evidence;
        for (uint64_t id : cluster.members) evidence.push_back(*class_index.at(id));
        verdict.bot_name = assign_bot_name(evidence);
        verdicts.push_back(std::move(verdict));
    }

    r.report = build_report(std::move(verdicts), r.scanlog, counts, cfg.echo_json(), cfg.seed);
    return r;
}

std::string clusters_to_json(const std::vector<Cluster>& clusters) {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const Cluster& cluster : clusters) {
        j.push_back({{"id", cluster.id},
                     {"method", cluster.method == ClusterMethod::GRAPH ? "graph" : "kmeans"},
                     {"members", cluster.members}});
    }
    return j.dump(2) + "\n";
}

int cmd_detect(const RunConfig& cfg) {
    try {
        cfg.validate();
    } catch (const std::exception& e) {
        std::cerr << "config: " << e.what() << "\n";
        return 2;
    }
    std::string stage = "ingest";
    try {
        auto [trace, stats] = ingest_input(cfg);
        stage = "pipeline";
        PipelineResult result = run_pipeline(trace, stats, cfg);
        stage = "output";
        std::filesystem::create_directories(cfg.out_dir);
        write_log(result.scanlog, cfg.out_dir + "/scanlog.json");
        write_text_file(cfg.out_dir + "/clusters.json", clusters_to_json(result.clusters));
        write_text_file(cfg.out_dir + "/report.json", report_to_json(result.report));
        write_text_file(cfg.out_dir + "/report.txt", report_to_text(result.report));
        return result.report.controllers.empty() ? 1 : 0;
    } catch (const std::exception& e) {
        std::cerr << stage << ": " << e.what() << "\n";
        return 2;
    }
}

int cmd_scan(const RunConfig& cfg) {
    try {
        cfg.validate();
        auto [trace, stats] = ingest_input(cfg);
        ScanLog log = scan(trace, load_signatures(cfg));
        std::filesystem::create_directories(cfg.out_dir);
        write_log(log, cfg.out_dir + "/scanlog.json");
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "scan: " << e.what() << "\n";
        return 2;
    }
}

int cmd_synth(const ScenarioConfig& scenario, const std::string& out_dir, InputFormat format) {
    try {
        auto [trace, gt] = generate_scenario(scenario);
        std::filesystem::create_directories(out_dir);
        if (format == InputFormat::PCAP) {
            write_pcap(trace, out_dir + "/trace.pcap");
        } else {
            write_jsonl(trace, out_dir + "/trace.jsonl");
        }
        write_text_file(out_dir + "/ground_truth.json", ground_truth_to_json(gt));
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "synth: " << e.what() << "\n";
        return 2;
    }
}

int cmd_train_tree(const std::string& dataset_path, const TreeParams& params,
                   const std::string& model_path) {
    try {
        std::vector<LabeledSample> dataset = read_labeled_dataset(dataset_path);
        TreeModel model = train_tree(dataset, params);
        size_t correct = 0;
        for (const LabeledSample& sample : dataset) {
            if (predict(model, sample.features) == sample.label) ++correct;
        }
        write_tree_model(model, model_path);
        std::cout << "training accuracy: "
                  << static_cast<double>(correct) / static_cast<double>(dataset.size()) << " ("
                  << correct << "/" << dataset.size() << ")\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "train-tree: " << e.what() << "\n";
        return 2;
    }
}

std::vector<LabeledSample> labeled_dataset_from_scenario(const ScenarioConfig& cfg,
                                                         double idle_timeout) {
    auto [trace, gt] = generate_scenario(cfg);
    std::vector<LabeledSample> dataset;
    for (const FlowSummary& flow : assemble_flows(trace, idle_timeout)) {
        if (flow.key.transport != Transport::TCP) continue;
        Label label = gt.c2_flow_keys.contains(flow.key) ? Label::BOT : Label::NORMAL;
        dataset.push_back({compute_features(flow), label});
    }
    return dataset;
}

std::vector<LabeledSample> read_labeled_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Unreadable("cannot open " + path);
    std::vector<LabeledSample> dataset;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const std::exception&) {
            throw Unreadable(path + ":" + std::to_string(lineno) + ": bad JSON");
        }
        auto values = j.at("features").get<std::vector<double>>();
        if (values.size() != FeatureVector::kDims) {
            throw Unreadable(path + ":" + std::to_string(lineno) + ": expected " +
                             std::to_string(FeatureVector::kDims) + " features");
        }
        LabeledSample sample;
        sample.features.duration_s = values[0];
        sample.features.bandwidth_bps = values[1];
        sample.features.mean_pkt_size = values[2];
        sample.features.std_pkt_size = values[3];
        sample.features.mean_iat = values[4];
        sample.features.std_iat = values[5];
        sample.features.payload_ratio = values[6];
        sample.features.pkt_count = values[7];
        std::string label = j.at("label").get<std::string>();
        if (label == "BOT") {
            sample.label = Label::BOT;
        } else if (label == "NORMAL") {
            sample.label = Label::NORMAL;
        } else {
            throw Unreadable(path + ":" + std::to_string(lineno) + ": bad label " + label);
        }
        dataset.push_back(sample);
    }
    if (dataset.empty()) throw EmptyDataset("no samples in " + path);
    return dataset;
}

void write_labeled_dataset(const std::vector<LabeledSample>& dataset, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Unwritable("cannot open " + path);
    for (const LabeledSample& sample : dataset) {
        nlohmann::ordered_json j;
        j["features"] = sample.features.as_vector();
        j["label"] = to_string(sample.label);
        out << j.dump() << "\n";
    }
    if (!out) throw Unwritable("write failed: " + path);
}

}  // namespace botscope
