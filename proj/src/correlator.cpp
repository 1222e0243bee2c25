#include "botscope/correlator.hpp"

#include <algorithm>
#include <cmath>

#include "botscope/errors.hpp"

namespace botscope {

std::vector<uint64_t> activity_series(const FlowSummary& flow, double bin_width, double t0,
                                      double t1) {
    auto bins = static_cast<size_t>(std::ceil((t1 - t0) / bin_width));
    std::vector<uint64_t> series(bins, 0);
    for (double ts : flow.packet_times) {
        if (ts < t0 || ts >= t1) continue;
        auto k = static_cast<size_t>((ts - t0) / bin_width);
        if (k < bins) ++series[k];
    }
    return series;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw LengthMismatch("pearson: vector lengths differ");
    if (x.empty()) throw LengthMismatch("pearson: empty vectors");
    double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

std::vector<double> size_histogram(const FlowSummary& flow, const std::vector<double>& edges) {
    size_t buckets = edges.size() - 1;
    std::vector<double> hist(buckets, 0.0);
    for (uint32_t size : flow.packet_sizes) {
        size_t bucket = buckets - 1;  // overflow bucket
        for (size_t b = 0; b < buckets; ++b) {
            if (size >= edges[b] && size < edges[b + 1]) {
                bucket = b;
                break;
            }
        }
        hist[bucket] += 1.0;
    }
    for (double& h : hist) h /= static_cast<double>(flow.pkt_count);
    return hist;
}

namespace {

double cosine_similarity(const std::vector<double>& x, const std::vector<double>& y) {
    double dot = 0.0, nx = 0.0, ny = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        dot += x[i] * y[i];
        nx += x[i] * x[i];
        ny += y[i] * y[i];
    }
    if (nx == 0.0 || ny == 0.0) return 0.0;
    return dot / (std::sqrt(nx) * std::sqrt(ny));
}

std::vector<double> to_double(const std::vector<uint64_t>& v) {
    return {v.begin(), v.end()};
}

}  // namespace

CorrelationRecord correlate_pair(const FlowSummary& f1, const FlowSummary& f2,
                                 const CorrelationConfig& cfg) {
    const FlowSummary& lo = f1.id < f2.id ? f1 : f2;
    const FlowSummary& hi = f1.id < f2.id ? f2 : f1;

    CorrelationRecord rec;
    rec.flow_i = lo.id;
    rec.flow_j = hi.id;

    double t0 = std::max(lo.start_ts, hi.start_ts);
    double t1 = std::min(lo.end_ts, hi.end_ts);
    if (t1 > t0) {
        auto bins = static_cast<size_t>(std::ceil((t1 - t0) / cfg.bin_width));
        if (bins >= cfg.min_overlap_bins) {
            rec.temporal_score = pearson(to_double(activity_series(lo, cfg.bin_width, t0, t1)),
                                         to_double(activity_series(hi, cfg.bin_width, t0, t1)));
        }
    }
    rec.size_similarity =
        cosine_similarity(size_histogram(lo, cfg.size_edges), size_histogram(hi, cfg.size_edges));
    rec.combined = cfg.weight_temporal * std::max(rec.temporal_score, 0.0) +
                   cfg.weight_size * rec.size_similarity;
    return rec;
}

std::vector<CorrelationRecord> correlate_all(const std::vector<FlowSummary>& flows,
                                             const CorrelationConfig& cfg) {
    if (flows.size() > cfg.max_flows) {
        throw TooManyFlows("correlate_all: " + std::to_string(flows.size()) + " flows exceeds cap " +
                           std::to_string(cfg.max_flows));
    }
    std::vector<const FlowSummary*> ordered;
    ordered.reserve(flows.size());
    for (const auto& flow : flows) ordered.push_back(&flow);
    std::sort(ordered.begin(), ordered.end(),
              [](const FlowSummary* x, const FlowSummary* y) { return x->id < y->id; });

    std::vector<CorrelationRecord> records;
    records.reserve(ordered.size() * (ordered.size() - 1) / 2);
    for (size_t i = 0; i < ordered.size(); ++i) {
        for (size_t j = i + 1; j < ordered.size(); ++j) {
            records.push_back(correlate_pair(*ordered[i], *ordered[j], cfg));
        }
    }
    return records;
}

}  // namespace botscope
