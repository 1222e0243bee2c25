#include "botscope/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "botscope/errors.hpp"

namespace botscope {

std::vector<Cluster> graph_clusters(const std::vector<uint64_t>& flow_ids,
                                    const std::vector<CorrelationRecord>& correlations,
                                    double threshold, size_t min_cluster_size) {
    // Union-find over flow ids.
    std::map<uint64_t, uint64_t> parent;
    for (uint64_t id : flow_ids) parent[id] = id;
    auto find = [&](uint64_t id) {
        while (parent[id] != id) {
            parent[id] = parent[parent[id]];
            id = parent[id];
        }
        return id;
    };
    for (const auto& rec : correlations) {
        if (rec.combined < threshold) continue;
        uint64_t ri = find(rec.flow_i);
        uint64_t rj = find(rec.flow_j);
        if (ri != rj) parent[std::max(ri, rj)] = std::min(ri, rj);
    }

    std::map<uint64_t, std::vector<uint64_t>> components;  // keyed by smallest member
    for (uint64_t id : flow_ids) components[find(id)].push_back(id);

    std::vector<Cluster> clusters;
    for (auto& [root, members] : components) {
        if (members.size() < min_cluster_size) continue;
        std::sort(members.begin(), members.end());
        clusters.push_back({clusters.size(), std::move(members), ClusterMethod::GRAPH});
    }
    return clusters;
}

std::vector<std::vector<double>> standardize(const std::vector<FeatureVector>& features) {
    size_t n = features.size();
    size_t dims = FeatureVector::kDims;
    std::vector<double> mean(dims, 0.0), stddev(dims, 0.0);
    for (const auto& fv : features) {
        for (size_t d = 0; d < dims; ++d) mean[d] += fv[d];
    }
    for (size_t d = 0; d < dims; ++d) mean[d] /= static_cast<double>(n);
    for (const auto& fv : features) {
        for (size_t d = 0; d < dims; ++d) stddev[d] += (fv[d] - mean[d]) * (fv[d] - mean[d]);
    }
    for (size_t d = 0; d < dims; ++d) stddev[d] = std::sqrt(stddev[d] / static_cast<double>(n));

    std::vector<std::vector<double>> out(n, std::vector<double>(dims, 0.0));
    for (size_t i = 0; i < n; ++i) {
        for (size_t d = 0; d < dims; ++d) {
            if (stddev[d] > 0.0) out[i][d] = (features[i][d] - mean[d]) / stddev[d];
        }
    }
    return out;
}

namespace {

double sq_dist(const std::vector<double>& x, const std::vector<double>& y) {
    double d = 0.0;
    for (size_t i = 0; i < x.size(); ++i) d += (x[i] - y[i]) * (x[i] - y[i]);
    return d;
}

}  // namespace

std::vector<Cluster> kmeans(const std::vector<std::vector<double>>& features, size_t k,
                            uint64_t seed, size_t max_iters) {
    if (k < 1 || features.size() < k) {
        throw KTooLarge("kmeans: k=" + std::to_string(k) + " with " +
                        std::to_string(features.size()) + " points");
    }
    size_t n = features.size();

    // Seeded sampling without replacement via partial Fisher-Yates.
    std::mt19937_64 rng(seed);
    std::vector<size_t> pool(n);
    for (size_t i = 0; i < n; ++i) pool[i] = i;
    std::vector<std::vector<double>> centroids;
    for (size_t c = 0; c < k; ++c) {
        size_t pick = c + static_cast<size_t>(rng() % (n - c));
        std::swap(pool[c], pool[pick]);
        centroids.push_back(features[pool[c]]);
    }

    std::vector<size_t> assign(n, 0);
    for (size_t iter = 0; iter < max_iters; ++iter) {
        std::vector<size_t> next(n);
        for (size_t i = 0; i < n; ++i) {
            size_t best = 0;
            double best_d = sq_dist(features[i], centroids[0]);
            for (size_t c = 1; c < k; ++c) {
                double d = sq_dist(features[i], centroids[c]);
                if (d < best_d) {  // ties keep the lower index
                    best_d = d;
                    best = c;
                }
            }
            next[i] = best;
        }
        if (iter > 0 && next == assign) break;
        assign = std::move(next);

        std::vector<size_t> counts(k, 0);
        std::vector<std::vector<double>> sums(k, std::vector<double>(features[0].size(), 0.0));
        for (size_t i = 0; i < n; ++i) {
            ++counts[assign[i]];
            for (size_t d = 0; d < features[i].size(); ++d) sums[assign[i]][d] += features[i][d];
        }
        for (size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) {
                // Reseed with the point farthest from its assigned centroid.
                size_t far = 0;
                double far_d = -1.0;
                for (size_t i = 0; i < n; ++i) {
                    double d = sq_dist(features[i], centroids[assign[i]]);
                    if (d > far_d) {
                        far_d = d;
                        far = i;
                    }
                }
                centroids[c] = features[far];
                assign[far] = c;
            } else {
                for (size_t d = 0; d < sums[c].size(); ++d) {
                    centroids[c][d] = sums[c][d] / static_cast<double>(counts[c]);
                }
            }
        }
    }

    std::vector<Cluster> clusters;
    for (size_t c = 0; c < k; ++c) {
        Cluster cluster;
        cluster.method = ClusterMethod::KMEANS;
        for (size_t i = 0; i < n; ++i) {
            if (assign[i] == c) cluster.members.push_back(i);
        }
        if (cluster.members.empty()) continue;
        cluster.id = clusters.size();
        clusters.push_back(std::move(cluster));
    }
    return clusters;
}

}  // namespace botscope
