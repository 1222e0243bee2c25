#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "botscope/pipeline.hpp"

namespace {

using botscope::InputFormat;
using botscope::RunConfig;
using botscope::ScenarioConfig;

InputFormat parse_format(const std::string& s) {
    if (s == "pcap") return InputFormat::PCAP;
    if (s == "jsonl") return InputFormat::JSONL;
    throw CLI::ValidationError("--format", "must be pcap or jsonl");
}

// Config-file values override defaults; flags given on the command line
// override both.
void apply_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    nlohmann::json j = nlohmann::json::parse(in);
    if (j.contains("input")) cfg.input = j["input"].get<std::string>();
    if (j.contains("format")) cfg.format = parse_format(j["format"].get<std::string>());
    if (j.contains("signatures")) cfg.signature_file = j["signatures"].get<std::string>();
    if (j.contains("tree_model")) cfg.tree_model_file = j["tree_model"].get<std::string>();
    if (j.contains("idle_timeout")) cfg.idle_timeout = j["idle_timeout"].get<double>();
    if (j.contains("max_chat_pkt_size")) cfg.chat.max_chat_pkt_size = j["max_chat_pkt_size"].get<double>();
    if (j.contains("min_chat_duration")) cfg.chat.min_chat_duration = j["min_chat_duration"].get<double>();
    if (j.contains("max_chat_bandwidth")) cfg.chat.max_chat_bandwidth = j["max_chat_bandwidth"].get<double>();
    if (j.contains("bin_width")) cfg.correlation.bin_width = j["bin_width"].get<double>();
    if (j.contains("weight_temporal")) cfg.correlation.weight_temporal = j["weight_temporal"].get<double>();
    if (j.contains("weight_size")) cfg.correlation.weight_size = j["weight_size"].get<double>();
    if (j.contains("min_overlap_bins")) cfg.correlation.min_overlap_bins = j["min_overlap_bins"].get<size_t>();
    if (j.contains("size_edges")) cfg.correlation.size_edges = j["size_edges"].get<std::vector<double>>();
    if (j.contains("max_flows")) cfg.correlation.max_flows = j["max_flows"].get<size_t>();
    if (j.contains("cluster_threshold")) cfg.cluster_threshold = j["cluster_threshold"].get<double>();
    if (j.contains("min_cluster_size")) cfg.min_cluster_size = j["min_cluster_size"].get<size_t>();
    if (j.contains("cluster_method")) {
        std::string m = j["cluster_method"].get<std::string>();
        if (m == "graph") {
            cfg.cluster_method = botscope::ClusterMethod::GRAPH;
        } else if (m == "kmeans") {
            cfg.cluster_method = botscope::ClusterMethod::KMEANS;
        } else {
            throw std::runtime_error("cluster_method must be graph or kmeans");
        }
    }
    if (j.contains("kmeans_k")) cfg.kmeans_k = j["kmeans_k"].get<size_t>();
    if (j.contains("min_fanout")) cfg.min_fanout = j["min_fanout"].get<size_t>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<uint64_t>();
    if (j.contains("out")) cfg.out_dir = j["out"].get<std::string>();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"botscope: offline botnet C&C detection over packet traces"};
    app.require_subcommand(1);

    // Shared option storage; each subcommand registers the flags it uses.
    RunConfig cfg;
    std::string format_str = "pcap";
    std::string config_file;

    ScenarioConfig scenario;
    std::string synth_out = ".";
    std::string synth_format = "pcap";

    std::string dataset_path;
    std::string model_path = "tree_model.json";
    botscope::TreeParams tree_params;

    auto add_common = [&](CLI::App* sub, bool needs_input) {
        if (needs_input) {
            sub->add_option("--input", cfg.input, "input trace file")->required();
            sub->add_option("--format", format_str, "pcap or jsonl")
                ->check(CLI::IsMember({"pcap", "jsonl"}));
            sub->add_option("--signatures", cfg.signature_file, "signature file (JSON)");
        }
        sub->add_option("--config", config_file, "JSON config file");
        sub->add_option("--out", cfg.out_dir, "output directory");
        sub->add_option("--seed", cfg.seed, "run seed");
    };

    CLI::App* detect = app.add_subcommand("detect", "run the full detection pipeline");
    add_common(detect, true);
    detect->add_option("--tree-model", cfg.tree_model_file, "decision-tree model file");
    detect->add_option("--idle-timeout", cfg.idle_timeout, "flow idle timeout (s)");
    detect->add_option("--cluster-threshold", cfg.cluster_threshold, "correlation edge threshold");
    detect->add_option("--min-fanout", cfg.min_fanout, "minimum controller fan-out");
    std::string method_str = "graph";
    detect->add_option("--cluster-method", method_str, "graph or kmeans")
        ->check(CLI::IsMember({"graph", "kmeans"}));
    detect->add_option("--kmeans-k", cfg.kmeans_k, "k for kmeans clustering");

    CLI::App* scan_cmd = app.add_subcommand("scan", "scan a trace and write scanlog.json");
    add_common(scan_cmd, true);

    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic scenario");
    synth->add_option("--bots", scenario.n_bots, "number of bots");
    synth->add_option("--background-hosts", scenario.n_background_hosts, "background hosts");
    synth->add_option("--duration", scenario.duration_s, "scenario duration (s)");
    synth->add_option("--period", scenario.c2_msg_period_s, "C&C command period (s)");
    synth->add_option("--jitter", scenario.c2_jitter_s, "C&C command jitter (s)");
    synth->add_option("--flows-per-host", scenario.background_flows_per_host,
                      "background flows per host");
    synth->add_option("--seed", scenario.seed, "generator seed");
    synth->add_option("--out", synth_out, "output directory");
    synth->add_option("--format", synth_format, "pcap or jsonl")
        ->check(CLI::IsMember({"pcap", "jsonl"}));

    CLI::App* train = app.add_subcommand("train-tree", "train the decision-tree classifier");
    train->add_option("--dataset", dataset_path, "labeled dataset (JSONL)")->required();
    train->add_option("--model-out", model_path, "model output path");
    train->add_option("--max-depth", tree_params.max_depth, "maximum tree depth");
    train->add_option("--min-leaf", tree_params.min_leaf, "minimum samples per leaf");

    CLI11_PARSE(app, argc, argv);

    try {
        if (detect->parsed() || scan_cmd->parsed()) {
            CLI::App* sub = detect->parsed() ? detect : scan_cmd;
            if (!config_file.empty()) {
                // Re-assert command-line values on top of the config file.
                RunConfig from_file;
                apply_config_file(from_file, config_file);
                auto keep = [&](const std::string& flag) { return sub->count(flag) > 0; };
                if (!keep("--input")) cfg.input = from_file.input.empty() ? cfg.input : from_file.input;
                if (!keep("--format")) cfg.format = from_file.format;
                if (!keep("--signatures")) cfg.signature_file = from_file.signature_file;
                if (!keep("--out")) cfg.out_dir = from_file.out_dir;
                if (!keep("--seed")) cfg.seed = from_file.seed;
                if (detect->parsed()) {
                    if (!keep("--tree-model")) cfg.tree_model_file = from_file.tree_model_file;
                    if (!keep("--idle-timeout")) cfg.idle_timeout = from_file.idle_timeout;
                    if (!keep("--cluster-threshold")) cfg.cluster_threshold = from_file.cluster_threshold;
                    if (!keep("--min-fanout")) cfg.min_fanout = from_file.min_fanout;
                    if (!keep("--cluster-method")) cfg.cluster_method = from_file.cluster_method;
                    if (!keep("--kmeans-k")) cfg.kmeans_k = from_file.kmeans_k;
                }
                cfg.chat = from_file.chat;
                cfg.correlation = from_file.correlation;
                cfg.min_cluster_size = from_file.min_cluster_size;
            }
            if (sub->count("--format") > 0 || config_file.empty()) cfg.format = parse_format(format_str);
            if (detect->parsed() && (detect->count("--cluster-method") > 0 || config_file.empty())) {
                cfg.cluster_method = method_str == "kmeans" ? botscope::ClusterMethod::KMEANS
                                                            : botscope::ClusterMethod::GRAPH;
            }
            return detect->parsed() ? botscope::cmd_detect(cfg) : botscope::cmd_scan(cfg);
        }
        if (synth->parsed()) {
            return botscope::cmd_synth(scenario, synth_out, parse_format(synth_format));
        }
        if (train->parsed()) {
            return botscope::cmd_train_tree(dataset_path, tree_params, model_path);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
