#pragma once

#include <vector>

#include "botscope/correlator.hpp"
#include "botscope/types.hpp"

namespace botscope {

enum class ClusterMethod : uint8_t { GRAPH, KMEANS };

struct Cluster {
    uint64_t id = 0;
    std::vector<uint64_t> members;  // sorted flow ids, never empty
    ClusterMethod method = ClusterMethod::GRAPH;

    bool operator==(const Cluster&) const = default;
};

constexpr size_t kDefaultMinClusterSize = 2;
constexpr double kDefaultClusterThreshold = 0.6;

// Connected components of the correlation graph with combined >= threshold.
// Components below min_cluster_size (singletons by default) are discarded.
std::vector<Cluster> graph_clusters(const std::vector<uint64_t>& flow_ids,
                                    const std::vector<CorrelationRecord>& correlations,
                                    double threshold,
                                    size_t min_cluster_size = kDefaultMinClusterSize);

// Per-dimension z-scores; zero-variance dimensions map to 0.
std::vector<std::vector<double>> standardize(const std::vector<FeatureVector>& features);

// Lloyd's algorithm with seeded init; deterministic per (input order, k, seed).
// Throws KTooLarge. Returned clusters index into the features list.
std::vector<Cluster> kmeans(const std::vector<std::vector<double>>& features, size_t k,
                            uint64_t seed, size_t max_iters = 100);

}  // namespace botscope
