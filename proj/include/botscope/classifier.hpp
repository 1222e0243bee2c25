#pragma once

#include <optional>
#include <string>
#include <vector>

#include "botscope/types.hpp"

namespace botscope {

struct Signature {
    std::string name;
    std::string family;  // "irc", "http", ... ; drives protocol separation
    std::optional<Transport> transport_hint;
    std::optional<uint16_t> port_hint;
    std::vector<std::string> patterns;  // matched as bytes against the payload
    size_t min_matches = 1;
    bool case_insensitive = true;
};

// Shipped defaults: irc / http / botcmd. Replaceable via a signature file.
std::vector<Signature> default_signatures();

std::vector<Signature> read_signatures(const std::string& path);
void write_signatures(const std::vector<Signature>& signatures, const std::string& path);

// Case-insensitive byte substring scan; the one matcher shared by the
// scanner and the classifier.
bool contains_pattern(const std::vector<uint8_t>& haystack, const std::string& pattern,
                      bool case_insensitive);

enum class Protocol : uint8_t { IRC, HTTP, OTHER };
enum class Label : uint8_t { BOT, NORMAL };

std::string to_string(Protocol p);
std::string to_string(Label l);

struct SignatureHit {
    std::string signature_name;
    std::string family;
    size_t pattern_count = 0;  // distinct patterns found, >= the signature's min_matches

    bool operator==(const SignatureHit&) const = default;
};

struct ChatThresholds {
    double max_chat_pkt_size = 300.0;   // bytes
    double min_chat_duration = 60.0;    // seconds
    double max_chat_bandwidth = 1000.0; // bytes/second
};

struct FlowClass {
    uint64_t flow_id = 0;
    Protocol protocol = Protocol::OTHER;
    bool chat_like = false;
    std::vector<SignatureHit> signature_hits;
    std::optional<Label> tree_label;
};

std::vector<SignatureHit> match_signatures(const FlowSummary& flow,
                                           const std::vector<Signature>& signatures);

Protocol classify_protocol(const FlowSummary& flow, const std::vector<SignatureHit>& hits);

bool is_chat_like(const FeatureVector& fv, const ChatThresholds& thresholds);

// CART decision tree over FeatureVector dimensions.
struct TreeNode {
    bool is_leaf = false;
    // split
    size_t feature = 0;
    double threshold = 0.0;
    int32_t left = -1;
    int32_t right = -1;
    // leaf
    Label label = Label::NORMAL;
    uint64_t count_bot = 0;
    uint64_t count_normal = 0;

    bool operator==(const TreeNode&) const = default;
};

struct TreeModel {
    std::vector<TreeNode> nodes;  // node 0 is the root
    size_t max_depth = 0;
    std::vector<std::string> feature_names;

    bool operator==(const TreeModel&) const = default;
};

struct TreeParams {
    size_t max_depth = 6;
    size_t min_leaf = 1;
};

struct LabeledSample {
    FeatureVector features;
    Label label = Label::NORMAL;
};

TreeModel train_tree(const std::vector<LabeledSample>& dataset, const TreeParams& params);
Label predict(const TreeModel& model, const FeatureVector& fv);

TreeModel read_tree_model(const std::string& path);
void write_tree_model(const TreeModel& model, const std::string& path);

FlowClass classify_flow(const FlowSummary& flow, const std::vector<Signature>& signatures,
                        const TreeModel* model, const ChatThresholds& thresholds);

}  // namespace botscope
