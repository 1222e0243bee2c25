"""Smoke tests for the python bindings: generate, ingest, and detect."""

import math

import pytest

import botscope as bs


@pytest.fixture(scope="module")
def scenario():
    cfg = bs.ScenarioConfig()
    cfg.n_bots = 4
    cfg.n_background_hosts = 8
    cfg.duration_s = 300
    cfg.seed = 3
    return bs.generate_scenario(cfg)


def test_scenario_shape(scenario):
    trace, truth = scenario
    assert len(trace) > 0
    assert bs.format_ip(truth.controller_ip) == "10.0.0.1"
    assert len(truth.bot_ips) == 4


def test_pcap_roundtrip(tmp_path, scenario):
    trace, _ = scenario
    path = str(tmp_path / "trace.pcap")
    bs.write_pcap(trace, path)
    reread, stats = bs.read_pcap(path)
    assert stats.packets_read == len(trace)
    assert stats.emitted() == len(trace)
    assert [p.ts for p in reread.packets] == [p.ts for p in trace.packets]


def test_flow_assembly_and_features(scenario):
    trace, truth = scenario
    flows = bs.assemble_flows(trace)
    assert flows
    tcp = bs.quick_data_reduction(flows)
    assert all(f.key.transport == bs.Transport.TCP for f in tcp)
    fv = bs.compute_features(tcp[0])
    assert fv.pkt_count == tcp[0].pkt_count
    assert len(fv.as_vector()) == 8


def test_pearson_matches_math():
    x = [1.0, 2.0, 3.0, 4.0]
    y = [2.0, 4.0, 6.0, 8.0]
    assert math.isclose(bs.pearson(x, y), 1.0)
    with pytest.raises(bs.LengthMismatch):
        bs.pearson([1.0], [1.0, 2.0])


def test_full_pipeline_finds_controller(scenario):
    trace, truth = scenario
    stats = bs.IngestStats()
    stats.packets_read = len(trace)
    result = bs.run_pipeline(trace, stats, bs.RunConfig())
    assert result.report.controllers
    assert result.report.controllers[0].ip == truth.controller_ip
    assert result.report.controllers[0].bot_name == "irc"
    assert "10.0.0.1" in bs.report_to_json(result.report)


def test_detect_writes_files(tmp_path, scenario):
    trace, _ = scenario
    trace_path = str(tmp_path / "trace.jsonl")
    bs.write_jsonl(trace, trace_path)
    cfg = bs.RunConfig()
    cfg.input = trace_path
    cfg.format = bs.InputFormat.JSONL
    cfg.out_dir = str(tmp_path / "out")
    assert bs.detect(cfg) == 0
    for name in ("scanlog.json", "clusters.json", "report.json", "report.txt"):
        assert (tmp_path / "out" / name).exists()


def test_tree_training_and_model_io(tmp_path):
    cfg = bs.ScenarioConfig()
    cfg.n_bots = 4
    cfg.n_background_hosts = 8
    cfg.duration_s = 300
    cfg.seed = 5
    dataset = bs.labeled_dataset_from_scenario(cfg)
    assert sum(1 for s in dataset if s.label == bs.Label.BOT) == 4
    model = bs.train_tree(dataset)
    correct = sum(1 for s in dataset if bs.predict(model, s.features) == s.label)
    assert correct / len(dataset) >= 0.95
    path = str(tmp_path / "model.json")
    bs.write_tree_model(model, path)
    reread = bs.read_tree_model(path)
    assert all(bs.predict(reread, s.features) == bs.predict(model, s.features) for s in dataset)


def test_invalid_config_raises():
    cfg = bs.RunConfig()
    cfg.cluster_threshold = 2.0
    with pytest.raises(bs.InvalidConfig):
        cfg.validate()
