#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "botscope/errors.hpp"
#include "botscope/pipeline.hpp"

namespace py = pybind11;
using namespace botscope;

PYBIND11_MODULE(_botscope, m) {
    m.doc() = "Offline botnet C&C detection over packet traces";

    py::register_exception<BadMagic>(m, "BadMagic");
    py::register_exception<TruncatedCapture>(m, "TruncatedCapture");
    py::register_exception<Unreadable>(m, "Unreadable");
    py::register_exception<Unwritable>(m, "Unwritable");
    py::register_exception<LengthMismatch>(m, "LengthMismatch");
    py::register_exception<TooManyFlows>(m, "TooManyFlows");
    py::register_exception<EmptyDataset>(m, "EmptyDataset");
    py::register_exception<KTooLarge>(m, "KTooLarge");
    py::register_exception<UnknownFlowId>(m, "UnknownFlowId");
    py::register_exception<InvalidConfig>(m, "InvalidConfig");

    py::enum_<Transport>(m, "Transport")
        .value("TCP", Transport::TCP)
        .value("UDP", Transport::UDP)
        .value("OTHER", Transport::OTHER);

    py::enum_<HandshakeState>(m, "HandshakeState")
        .value("NONE", HandshakeState::NONE)
        .value("SYN_ONLY", HandshakeState::SYN_ONLY)
        .value("SYN_RST", HandshakeState::SYN_RST)
        .value("ESTABLISHED", HandshakeState::ESTABLISHED);

    py::enum_<Protocol>(m, "Protocol")
        .value("IRC", Protocol::IRC)
        .value("HTTP", Protocol::HTTP)
        .value("OTHER", Protocol::OTHER);

    py::enum_<Label>(m, "Label").value("BOT", Label::BOT).value("NORMAL", Label::NORMAL);

    py::enum_<ClusterMethod>(m, "ClusterMethod")
        .value("GRAPH", ClusterMethod::GRAPH)
        .value("KMEANS", ClusterMethod::KMEANS);

    py::enum_<InputFormat>(m, "InputFormat")
        .value("PCAP", InputFormat::PCAP)
        .value("JSONL", InputFormat::JSONL);

    py::class_<Endpoint>(m, "Endpoint")
        .def(py::init<>())
        .def(py::init([](const std::string& text) { return parse_endpoint(text); }))
        .def_readwrite("ip", &Endpoint::ip)
        .def_readwrite("port", &Endpoint::port)
        .def("__repr__", [](const Endpoint& e) { return format_endpoint(e); })
        .def(py::self == py::self);

    py::class_<PacketRecord>(m, "PacketRecord")
        .def(py::init<>())
        .def_readwrite("ts", &PacketRecord::ts)
        .def_readwrite("src", &PacketRecord::src)
        .def_readwrite("dst", &PacketRecord::dst)
        .def_readwrite("transport", &PacketRecord::transport)
        .def_readwrite("tcp_flags", &PacketRecord::tcp_flags)
        .def_property(
            "payload",
            [](const PacketRecord& p) {
                return py::bytes(reinterpret_cast<const char*>(p.payload.data()), p.payload.size());
            },
            [](PacketRecord& p, const py::bytes& b) {
                std::string s = b;
                p.payload.assign(s.begin(), s.end());
            })
        .def_readwrite("wire_len", &PacketRecord::wire_len)
        .def(py::self == py::self);

    py::class_<Trace>(m, "Trace")
        .def(py::init<>())
        .def_readwrite("packets", &Trace::packets)
        .def("__len__", [](const Trace& t) { return t.packets.size(); });

    py::class_<IngestStats>(m, "IngestStats")
        .def(py::init<>())
        .def_readwrite("packets_read", &IngestStats::packets_read)
        .def_readwrite("packets_dropped_malformed", &IngestStats::packets_dropped_malformed)
        .def_readwrite("packets_dropped_unsupported", &IngestStats::packets_dropped_unsupported)
        .def("emitted", &IngestStats::emitted);

    py::class_<FlowKey>(m, "FlowKey")
        .def(py::init<>())
        .def(py::init<Endpoint, Endpoint, Transport>())
        .def_readonly("a", &FlowKey::a)
        .def_readonly("b", &FlowKey::b)
        .def_readonly("transport", &FlowKey::transport)
        .def(py::self == py::self);

    py::class_<FlowSummary>(m, "FlowSummary")
        .def(py::init<>())
        .def_readonly("id", &FlowSummary::id)
        .def_readonly("key", &FlowSummary::key)
        .def_readonly("initiator", &FlowSummary::initiator)
        .def_readonly("start_ts", &FlowSummary::start_ts)
        .def_readonly("end_ts", &FlowSummary::end_ts)
        .def_readonly("duration", &FlowSummary::duration)
        .def_readonly("pkt_count", &FlowSummary::pkt_count)
        .def_readonly("byte_count", &FlowSummary::byte_count)
        .def_readonly("payload_bytes", &FlowSummary::payload_bytes)
        .def_readonly("mean_pkt_size", &FlowSummary::mean_pkt_size)
        .def_readonly("std_pkt_size", &FlowSummary::std_pkt_size)
        .def_readonly("mean_iat", &FlowSummary::mean_iat)
        .def_readonly("std_iat", &FlowSummary::std_iat)
        .def_readonly("bandwidth", &FlowSummary::bandwidth)
        .def_readonly("handshake", &FlowSummary::handshake)
        .def_readonly("bidirectional", &FlowSummary::bidirectional)
        .def("responder", &FlowSummary::responder);

    py::class_<FeatureVector>(m, "FeatureVector")
        .def(py::init<>())
        .def_readwrite("duration_s", &FeatureVector::duration_s)
        .def_readwrite("bandwidth_bps", &FeatureVector::bandwidth_bps)
        .def_readwrite("mean_pkt_size", &FeatureVector::mean_pkt_size)
        .def_readwrite("std_pkt_size", &FeatureVector::std_pkt_size)
        .def_readwrite("mean_iat", &FeatureVector::mean_iat)
        .def_readwrite("std_iat", &FeatureVector::std_iat)
        .def_readwrite("payload_ratio", &FeatureVector::payload_ratio)
        .def_readwrite("pkt_count", &FeatureVector::pkt_count)
        .def("as_vector", &FeatureVector::as_vector)
        .def_static("feature_names", &FeatureVector::feature_names)
        .def("__getitem__", [](const FeatureVector& fv, size_t i) {
            if (i >= FeatureVector::kDims) throw py::index_error();
            return fv[i];
        });

    py::class_<CorrelationConfig>(m, "CorrelationConfig")
        .def(py::init<>())
        .def_readwrite("bin_width", &CorrelationConfig::bin_width)
        .def_readwrite("weight_temporal", &CorrelationConfig::weight_temporal)
        .def_readwrite("weight_size", &CorrelationConfig::weight_size)
        .def_readwrite("min_overlap_bins", &CorrelationConfig::min_overlap_bins)
        .def_readwrite("size_edges", &CorrelationConfig::size_edges)
        .def_readwrite("max_flows", &CorrelationConfig::max_flows);

    py::class_<CorrelationRecord>(m, "CorrelationRecord")
        .def_readonly("flow_i", &CorrelationRecord::flow_i)
        .def_readonly("flow_j", &CorrelationRecord::flow_j)
        .def_readonly("temporal_score", &CorrelationRecord::temporal_score)
        .def_readonly("size_similarity", &CorrelationRecord::size_similarity)
        .def_readonly("combined", &CorrelationRecord::combined);

    py::class_<Cluster>(m, "Cluster")
        .def_readonly("id", &Cluster::id)
        .def_readonly("members", &Cluster::members)
        .def_readonly("method", &Cluster::method);

    py::class_<ScenarioConfig>(m, "ScenarioConfig")
        .def(py::init<>())
        .def_readwrite("n_bots", &ScenarioConfig::n_bots)
        .def_readwrite("n_background_hosts", &ScenarioConfig::n_background_hosts)
        .def_readwrite("duration_s", &ScenarioConfig::duration_s)
        .def_readwrite("c2_msg_period_s", &ScenarioConfig::c2_msg_period_s)
        .def_readwrite("c2_jitter_s", &ScenarioConfig::c2_jitter_s)
        .def_readwrite("background_flows_per_host", &ScenarioConfig::background_flows_per_host)
        .def_readwrite("seed", &ScenarioConfig::seed);

    py::class_<GroundTruth>(m, "GroundTruth")
        .def_readonly("controller_ip", &GroundTruth::controller_ip)
        .def_readonly("bot_ips", &GroundTruth::bot_ips)
        .def_readonly("c2_flow_keys", &GroundTruth::c2_flow_keys);

    py::class_<ChatThresholds>(m, "ChatThresholds")
        .def(py::init<>())
        .def_readwrite("max_chat_pkt_size", &ChatThresholds::max_chat_pkt_size)
        .def_readwrite("min_chat_duration", &ChatThresholds::min_chat_duration)
        .def_readwrite("max_chat_bandwidth", &ChatThresholds::max_chat_bandwidth);

    py::class_<RunConfig>(m, "RunConfig")
        .def(py::init<>())
        .def_readwrite("input", &RunConfig::input)
        .def_readwrite("format", &RunConfig::format)
        .def_readwrite("signature_file", &RunConfig::signature_file)
        .def_readwrite("tree_model_file", &RunConfig::tree_model_file)
        .def_readwrite("idle_timeout", &RunConfig::idle_timeout)
        .def_readwrite("chat", &RunConfig::chat)
        .def_readwrite("correlation", &RunConfig::correlation)
        .def_readwrite("cluster_threshold", &RunConfig::cluster_threshold)
        .def_readwrite("min_cluster_size", &RunConfig::min_cluster_size)
        .def_readwrite("cluster_method", &RunConfig::cluster_method)
        .def_readwrite("kmeans_k", &RunConfig::kmeans_k)
        .def_readwrite("min_fanout", &RunConfig::min_fanout)
        .def_readwrite("seed", &RunConfig::seed)
        .def_readwrite("out_dir", &RunConfig::out_dir)
        .def("validate", &RunConfig::validate)
        .def("echo_json", &RunConfig::echo_json);

    py::class_<ControllerVerdict>(m, "ControllerVerdict")
        .def_readonly("ip", &ControllerVerdict::ip)
        .def_readonly("fan_out", &ControllerVerdict::fan_out)
        .def_readonly("cluster_id", &ControllerVerdict::cluster_id)
        .def_readonly("bot_name", &ControllerVerdict::bot_name)
        .def_readonly("evidence_flow_ids", &ControllerVerdict::evidence_flow_ids);

    py::class_<StageCounts>(m, "StageCounts")
        .def_readonly("packets_ingested", &StageCounts::packets_ingested)
        .def_readonly("flows_assembled", &StageCounts::flows_assembled)
        .def_readonly("flows_after_tcp_filter", &StageCounts::flows_after_tcp_filter)
        .def_readonly("flows_after_incomplete_filter", &StageCounts::flows_after_incomplete_filter)
        .def_readonly("chat_like_flows", &StageCounts::chat_like_flows)
        .def_readonly("pairs_scored", &StageCounts::pairs_scored)
        .def_readonly("clusters", &StageCounts::clusters);

    py::class_<DetectionReport>(m, "DetectionReport")
        .def_readonly("controllers", &DetectionReport::controllers)
        .def_readonly("suspicious_ips", &DetectionReport::suspicious_ips)
        .def_readonly("counts", &DetectionReport::counts)
        .def_readonly("seed", &DetectionReport::seed);

    py::class_<PipelineResult>(m, "PipelineResult")
        .def_readonly("scanlog", &PipelineResult::scanlog)
        .def_readonly("flows", &PipelineResult::flows)
        .def_readonly("chat_flows", &PipelineResult::chat_flows)
        .def_readonly("correlations", &PipelineResult::correlations)
        .def_readonly("clusters", &PipelineResult::clusters)
        .def_readonly("report", &PipelineResult::report);

    py::class_<ScanLog>(m, "ScanLog")
        .def_readonly("suspicious_ips", &ScanLog::suspicious_ips)
        .def_readonly("dns_queries", &ScanLog::dns_queries);

    py::class_<DnsQuery>(m, "DnsQuery")
        .def_readonly("ts", &DnsQuery::ts)
        .def_readonly("client_ip", &DnsQuery::client_ip)
        .def_readonly("name", &DnsQuery::name);

    py::class_<TreeParams>(m, "TreeParams")
        .def(py::init<>())
        .def_readwrite("max_depth", &TreeParams::max_depth)
        .def_readwrite("min_leaf", &TreeParams::min_leaf);

    py::class_<TreeModel>(m, "TreeModel").def(py::init<>());

    py::class_<LabeledSample>(m, "LabeledSample")
        .def(py::init<>())
        .def_readwrite("features", &LabeledSample::features)
        .def_readwrite("label", &LabeledSample::label);

    // Free functions: the main operations.
    m.def("format_ip", &format_ip);
    m.def("parse_ip", &parse_ip);
    m.def("quantize_ts", &quantize_ts);
    m.def("read_pcap", &read_pcap, py::arg("path"));
    m.def("read_jsonl", &read_jsonl, py::arg("path"));
    m.def("normalize_trace", &normalize_trace, py::arg("packets"));
    m.def("compute_features", &compute_features, py::arg("flow"));
    m.def("assemble_flows", &assemble_flows, py::arg("trace"),
          py::arg("idle_timeout") = kDefaultIdleTimeout);
    m.def("quick_data_reduction", &quick_data_reduction, py::arg("flows"));
    m.def("incomplete_comm_filter", &incomplete_comm_filter, py::arg("flows"));
    m.def("pearson", &pearson, py::arg("x"), py::arg("y"));
    m.def("activity_series", &activity_series, py::arg("flow"), py::arg("bin_width"), py::arg("t0"),
          py::arg("t1"));
    m.def("size_histogram", &size_histogram, py::arg("flow"), py::arg("edges"));
    m.def("correlate_pair", &correlate_pair, py::arg("f1"), py::arg("f2"), py::arg("cfg"));
    m.def("correlate_all", &correlate_all, py::arg("flows"), py::arg("cfg"));
    m.def("graph_clusters", &graph_clusters, py::arg("flow_ids"), py::arg("correlations"),
          py::arg("threshold"), py::arg("min_cluster_size") = kDefaultMinClusterSize);
    m.def("standardize", &standardize, py::arg("features"));
    m.def("kmeans", &kmeans, py::arg("features"), py::arg("k"), py::arg("seed"),
          py::arg("max_iters") = 100);
    m.def("is_chat_like", &is_chat_like, py::arg("features"), py::arg("thresholds"));
    m.def("train_tree", &train_tree, py::arg("dataset"), py::arg("params") = TreeParams{});
    m.def("predict", &predict, py::arg("model"), py::arg("features"));
    m.def("read_tree_model", &read_tree_model, py::arg("path"));
    m.def("write_tree_model", &write_tree_model, py::arg("model"), py::arg("path"));
    m.def("generate_scenario", &generate_scenario, py::arg("config"));
    m.def("write_pcap", &write_pcap, py::arg("trace"), py::arg("path"));
    m.def("write_jsonl", &write_jsonl, py::arg("trace"), py::arg("path"));
    m.def("run_pipeline", &run_pipeline, py::arg("trace"), py::arg("ingest"), py::arg("config"));
    m.def("detect", &cmd_detect, py::arg("config"));
    m.def("scan_trace", [](const Trace& t) { return scan(t, default_signatures()); },
          py::arg("trace"));
    m.def("labeled_dataset_from_scenario", &labeled_dataset_from_scenario, py::arg("config"),
          py::arg("idle_timeout") = kDefaultIdleTimeout);
    m.def("report_to_json", &report_to_json, py::arg("report"));
    m.def("report_to_text", &report_to_text, py::arg("report"));
}
