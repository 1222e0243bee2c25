#pragma once

#include <optional>
#include <string>
#include <vector>

#include "botscope/classifier.hpp"
#include "botscope/clustering.hpp"
#include "botscope/correlator.hpp"
#include "botscope/filter.hpp"
#include "botscope/ingest.hpp"
#include "botscope/scanner.hpp"
#include "botscope/synth.hpp"
#include "botscope/topology.hpp"
#include "botscope/types.hpp"

namespace botscope {

enum class InputFormat : uint8_t { PCAP, JSONL };

struct RunConfig {
    std::string input;
    InputFormat format = InputFormat::PCAP;
    std::string signature_file;  // empty -> built-in defaults
    std::string tree_model_file; // empty -> no tree stage
    double idle_timeout = kDefaultIdleTimeout;
    ChatThresholds chat;
    CorrelationConfig correlation;
    double cluster_threshold = kDefaultClusterThreshold;
    size_t min_cluster_size = kDefaultMinClusterSize;
    ClusterMethod cluster_method = ClusterMethod::GRAPH;
    size_t kmeans_k = 2;
    size_t min_fanout = kDefaultMinFanout;
    uint64_t seed = 1;
    std::string out_dir = ".";

    // Throws InvalidConfig when a parameter is out of its declared range.
    void validate() const;
    std::string echo_json() const;
};

struct PipelineResult {
    IngestStats ingest;
    ScanLog scanlog;
    std::vector<FlowSummary> flows;          // after both filters
    std::vector<FlowClass> classes;          // one per surviving flow
    std::vector<FlowSummary> chat_flows;
    std::vector<CorrelationRecord> correlations;
    std::vector<Cluster> clusters;
    DetectionReport report;
};

// The detect chain on an in-memory trace: scan, assemble, filter, classify,
// correlate, cluster, analyze, report.
PipelineResult run_pipeline(const Trace& trace, const IngestStats& ingest, const RunConfig& cfg);

std::string clusters_to_json(const std::vector<Cluster>& clusters);

// Subcommand bodies; each returns the process exit status
// (0 found / 1 none / 2 error for detect, 0 / 2 elsewhere).
int cmd_detect(const RunConfig& cfg);
int cmd_scan(const RunConfig& cfg);
int cmd_synth(const ScenarioConfig& scenario, const std::string& out_dir, InputFormat format);
int cmd_train_tree(const std::string& dataset_path, const TreeParams& params,
                   const std::string& model_path);

// Labels assembled flows against scenario ground truth; the training-data
// source for the tree classifier.
std::vector<LabeledSample> labeled_dataset_from_scenario(const ScenarioConfig& cfg,
                                                         double idle_timeout = kDefaultIdleTimeout);

std::vector<LabeledSample> read_labeled_dataset(const std::string& path);
void write_labeled_dataset(const std::vector<LabeledSample>& dataset, const std::string& path);

}  // namespace botscope
