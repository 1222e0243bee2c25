#include "botscope/classifier.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "botscope/errors.hpp"

namespace botscope {

namespace {

uint8_t lower(uint8_t c) { return static_cast<uint8_t>(std::tolower(c)); }

bool hints_match(const Signature& sig, const FlowSummary& flow) {
    if (sig.transport_hint && *sig.transport_hint != flow.key.transport) return false;
    if (sig.port_hint && flow.key.a.port != *sig.port_hint && flow.key.b.port != *sig.port_hint) {
        return false;
    }
    return true;
}

bool port_is(const FlowSummary& flow, std::initializer_list<uint16_t> ports) {
    for (uint16_t p : ports) {
        if (flow.key.a.port == p || flow.key.b.port == p) return true;
    }
    return false;
}

double gini(uint64_t bot, uint64_t normal) {
    uint64_t n = bot + normal;
    if (n == 0) return 0.0;
    double pb = static_cast<double>(bot) / static_cast<double>(n);
    double pn = static_cast<double>(normal) / static_cast<double>(n);
    return 1.0 - pb * pb - pn * pn;
}

struct SplitChoice {
    size_t feature = 0;
    double threshold = 0.0;
    double impurity = std::numeric_limits<double>::infinity();
    bool found = false;
};

SplitChoice best_split(const std::vector<LabeledSample>& dataset,
                       const std::vector<size_t>& indices, size_t min_leaf) {
    SplitChoice best;
    for (size_t f = 0; f < FeatureVector::kDims; ++f) {
        std::vector<std::pair<double, Label>> column;
        column.reserve(indices.size());
        for (size_t i : indices) column.emplace_back(dataset[i].features[f], dataset[i].label);
        std::sort(column.begin(), column.end(),
                  [](const auto& x, const auto& y) { return x.first < y.first; });

        uint64_t left_bot = 0, left_normal = 0;
        uint64_t total_bot = 0, total_normal = 0;
        for (const auto& [v, l] : column) (l == Label::BOT ? total_bot : total_normal)++;

        for (size_t i = 0; i + 1 < column.size(); ++i) {
            (column[i].second == Label::BOT ? left_bot : left_normal)++;
            if (column[i].first == column[i + 1].first) continue;
            size_t left_n = i + 1;
            size_t right_n = column.size() - left_n;
            if (left_n < min_leaf || right_n < min_leaf) continue;
            double threshold = column[i].first + (column[i + 1].first - column[i].first) / 2.0;
            double impurity =
                (static_cast<double>(left_n) * gini(left_bot, left_normal) +
                 static_cast<double>(right_n) * gini(total_bot - left_bot, total_normal - left_normal)) /
                static_cast<double>(column.size());
            // Ties resolved by lowest feature index, then lowest threshold;
            // iteration order already visits candidates in that order.
            if (impurity < best.impurity) {
                best = {f, threshold, impurity, true};
            }
        }
    }
    return best;
}

int32_t grow(const std::vector<LabeledSample>& dataset, std::vector<size_t> indices, size_t depth,
             const TreeParams& params, std::vector<TreeNode>& nodes) {
    uint64_t bot = 0, normal = 0;
    for (size_t i : indices) (dataset[i].label == Label::BOT ? bot : normal)++;

    auto make_leaf = [&]() {
        TreeNode leaf;
        leaf.is_leaf = true;
        leaf.count_bot = bot;
        leaf.count_normal = normal;
        leaf.label = bot > normal ? Label::BOT : Label::NORMAL;  // tie -> NORMAL
        nodes.push_back(leaf);
        return static_cast<int32_t>(nodes.size() - 1);
    };

    bool pure = bot == 0 || normal == 0;
    if (pure || depth >= params.max_depth || indices.size() < 2 * params.min_leaf) {
        return make_leaf();
    }
    SplitChoice split = best_split(dataset, indices, params.min_leaf);
    if (!split.found) return make_leaf();

    std::vector<size_t> left_idx, right_idx;
    for (size_t i : indices) {
        (dataset[i].features[split.feature] <= split.threshold ? left_idx : right_idx).push_back(i);
    }

    TreeNode node;
    node.feature = split.feature;
    node.threshold = split.threshold;
    nodes.push_back(node);
    auto self = static_cast<int32_t>(nodes.size() - 1);
    nodes[self].left = grow(dataset, std::move(left_idx), depth + 1, params, nodes);
    nodes[self].right = grow(dataset, std::move(right_idx), depth + 1, params, nodes);
    return self;
}

Transport transport_from_string(const std::string& s) {
    if (s == "TCP") return Transport::TCP;
    if (s == "UDP") return Transport::UDP;
    if (s == "OTHER") return Transport::OTHER;
    throw std::invalid_argument("unknown transport: " + s);
}

std::string transport_to_string(Transport t) {
    switch (t) {
        case Transport::TCP: return "TCP";
        case Transport::UDP: return "UDP";
        default: return "OTHER";
    }
}

Label label_from_string(const std::string& s) {
    if (s == "BOT") return Label::BOT;
    if (s == "NORMAL") return Label::NORMAL;
    throw std::invalid_argument("unknown label: " + s);
}

}  // namespace

std::string to_string(Protocol p) {
    switch (p) {
        case Protocol::IRC: return "IRC";
        case Protocol::HTTP: return "HTTP";
        default: return "OTHER";
    }
}

std::string to_string(Label l) { return l == Label::BOT ? "BOT" : "NORMAL"; }

std::vector<Signature> default_signatures() {
    return {
        {"irc", "irc", std::nullopt, std::nullopt, {"NICK", "JOIN", "PRIVMSG", "PING"}, 2, true},
        {"http", "http", std::nullopt, std::nullopt, {"GET ", "POST ", "Host:"}, 1, true},
        {"botcmd", "botcmd", std::nullopt, std::nullopt, {".advscan", "!ddos", ".update"}, 1, true},
    };
}

bool contains_pattern(const std::vector<uint8_t>& haystack, const std::string& pattern,
                      bool case_insensitive) {
    if (pattern.empty() || pattern.size() > haystack.size()) return false;
    for (size_t i = 0; i + pattern.size() <= haystack.size(); ++i) {
        bool match = true;
        for (size_t j = 0; j < pattern.size(); ++j) {
            uint8_t h = haystack[i + j];
            auto p = static_cast<uint8_t>(pattern[j]);
            if (case_insensitive ? lower(h) != lower(p) : h != p) {
                match = false;
                break;
            }
        }
        if (match) return true;
    }
    return false;
}

std::vector<SignatureHit> match_signatures(const FlowSummary& flow,
                                           const std::vector<Signature>& signatures) {
    std::vector<SignatureHit> hits;
    for (const auto& sig : signatures) {
        if (!hints_match(sig, flow)) continue;
        size_t count = 0;
        for (const auto& pattern : sig.patterns) {
            if (contains_pattern(flow.payload_sample, pattern, sig.case_insensitive)) ++count;
        }
        if (count >= sig.min_matches) hits.push_back({sig.name, sig.family, count});
    }
    std::sort(hits.begin(), hits.end(), [](const SignatureHit& x, const SignatureHit& y) {
        return x.signature_name < y.signature_name;
    });
    return hits;
}

Protocol classify_protocol(const FlowSummary& flow, const std::vector<SignatureHit>& hits) {
    // Payload evidence outranks port convention; family priority irc > http.
    bool irc_hit = false, http_hit = false;
    for (const auto& hit : hits) {
        if (hit.family == "irc") irc_hit = true;
        if (hit.family == "http") http_hit = true;
    }
    if (irc_hit) return Protocol::IRC;
    if (http_hit) return Protocol::HTTP;
    if (port_is(flow, {6667, 6668, 6669, 7000})) return Protocol::IRC;
    if (port_is(flow, {80, 8080})) return Protocol::HTTP;
    return Protocol::OTHER;
}

bool is_chat_like(const FeatureVector& fv, const ChatThresholds& thresholds) {
    return fv.mean_pkt_size <= thresholds.max_chat_pkt_size &&
           fv.duration_s >= thresholds.min_chat_duration &&
           fv.bandwidth_bps <= thresholds.max_chat_bandwidth;
}

TreeModel train_tree(const std::vector<LabeledSample>& dataset, const TreeParams& params) {
    if (dataset.empty()) throw EmptyDataset("train_tree: empty dataset");
    std::vector<size_t> indices(dataset.size());
    for (size_t i = 0; i < indices.size(); ++i) indices[i] = i;

    TreeModel model;
    model.max_depth = params.max_depth;
    model.feature_names = FeatureVector::feature_names();
    grow(dataset, std::move(indices), 0, params, model.nodes);
    // grow() appends parents before children, so the root lands at index 0.
    return model;
}

Label predict(const TreeModel& model, const FeatureVector& fv) {
    const TreeNode* node = &model.nodes.at(0);
    while (!node->is_leaf) {
        node = fv[node->feature] <= node->threshold ? &model.nodes.at(node->left)
                                                    : &model.nodes.at(node->right);
    }
    return node->label;
}

std::vector<Signature> read_signatures(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Unreadable("cannot open " + path);
    nlohmann::json j = nlohmann::json::parse(in);
    std::vector<Signature> signatures;
    for (const auto& item : j) {
        Signature sig;
        sig.name = item.at("name").get<std::string>();
        sig.family = item.value("family", sig.name);
        if (item.contains("transport_hint") && !item["transport_hint"].is_null()) {
            sig.transport_hint = transport_from_string(item["transport_hint"].get<std::string>());
        }
        if (item.contains("port_hint") && !item["port_hint"].is_null()) {
            sig.port_hint = item["port_hint"].get<uint16_t>();
        }
        sig.patterns = item.at("patterns").get<std::vector<std::string>>();
        sig.min_matches = item.value("min_matches", size_t{1});
        sig.case_insensitive = item.value("case_insensitive", true);
        if (sig.patterns.empty() || sig.min_matches > sig.patterns.size()) {
            throw InvalidConfig("signature " + sig.name + ": min_matches exceeds pattern count");
        }
        signatures.push_back(std::move(sig));
    }
    return signatures;
}

void write_signatures(const std::vector<Signature>& signatures, const std::string& path) {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& sig : signatures) {
        nlohmann::ordered_json item;
        item["name"] = sig.name;
        item["family"] = sig.family;
        if (sig.transport_hint) item["transport_hint"] = transport_to_string(*sig.transport_hint);
        if (sig.port_hint) item["port_hint"] = *sig.port_hint;
        item["patterns"] = sig.patterns;
        item["min_matches"] = sig.min_matches;
        item["case_insensitive"] = sig.case_insensitive;
        j.push_back(std::move(item));
    }
    std::ofstream out(path);
    if (!out) throw Unwritable("cannot open " + path);
    out << j.dump(2) << "\n";
    if (!out) throw Unwritable("write failed: " + path);
}

TreeModel read_tree_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Unreadable("cannot open " + path);
    nlohmann::json j = nlohmann::json::parse(in);
    TreeModel model;
    model.max_depth = j.at("max_depth").get<size_t>();
    model.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    for (const auto& item : j.at("nodes")) {
        TreeNode node;
        if (item.at("type") == "leaf") {
            node.is_leaf = true;
            node.label = label_from_string(item.at("label").get<std::string>());
            node.count_bot = item.at("count_bot").get<uint64_t>();
            node.count_normal = item.at("count_normal").get<uint64_t>();
        } else {
            node.feature = item.at("feature").get<size_t>();
            node.threshold = item.at("threshold").get<double>();
            node.left = item.at("left").get<int32_t>();
            node.right = item.at("right").get<int32_t>();
        }
        model.nodes.push_back(node);
    }
    return model;
}

void write_tree_model(const TreeModel& model, const std::string& path) {
    nlohmann::ordered_json j;
    j["feature_names"] = model.feature_names;
    j["max_depth"] = model.max_depth;
    auto nodes = nlohmann::ordered_json::array();
    for (const auto& node : model.nodes) {
        nlohmann::ordered_json item;
        if (node.is_leaf) {
            item["type"] = "leaf";
            item["label"] = to_string(node.label);
            item["count_bot"] = node.count_bot;
            item["count_normal"] = node.count_normal;
        } else {
            item["type"] = "split";
            item["feature"] = node.feature;
            item["threshold"] = node.threshold;
            item["left"] = node.left;
            item["right"] = node.right;
        }
        nodes.push_back(std::move(item));
    }
    j["nodes"] = std::move(nodes);
    std::ofstream out(path);
    if (!out) throw Unwritable("cannot open " + path);
    out << j.dump(2) << "\n";
    if (!out) throw Unwritable("write failed: " + path);
}

FlowClass classify_flow(const FlowSummary& flow, const std::vector<Signature>& signatures,
                        const TreeModel* model, const ChatThresholds& thresholds) {
    FlowClass fc;
    fc.flow_id = flow.id;
    fc.signature_hits = match_signatures(flow, signatures);
    fc.protocol = classify_protocol(flow, fc.signature_hits);
    FeatureVector fv = compute_features(flow);
    fc.chat_like = is_chat_like(fv, thresholds);
    if (model != nullptr) fc.tree_label = predict(*model, fv);
    return fc;
}

}  // namespace botscope
