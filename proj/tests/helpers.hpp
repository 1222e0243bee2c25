#pragma once

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>

#include "botscope/types.hpp"

namespace botscope::testing {

// Per-process scratch directory under the system temp dir.
inline std::string temp_dir() {
    static const std::filesystem::path dir = [] {
        auto p = std::filesystem::temp_directory_path() /
                 ("botscope_tests_" + std::to_string(::getpid()));
        std::filesystem::create_directories(p);
        return p;
    }();
    return dir.string();
}

inline std::string temp_path(const std::string& name) { return temp_dir() + "/" + name; }

inline FlowSummary make_flow(uint64_t id, std::vector<double> times, std::vector<uint32_t> sizes,
                             Transport transport = Transport::TCP) {
    FlowSummary flow;
    flow.id = id;
    flow.key = FlowKey({0x0a000001, 1000}, {0x0a000002, static_cast<uint16_t>(2000 + id)}, transport);
    flow.initiator = flow.key.a;
    flow.start_ts = times.front();
    flow.end_ts = times.back();
    flow.duration = flow.end_ts - flow.start_ts;
    flow.pkt_count = times.size();
    for (uint32_t s : sizes) flow.byte_count += s;
    flow.packet_times = std::move(times);
    flow.packet_sizes = std::move(sizes);
    double n = static_cast<double>(flow.pkt_count);
    double mean = 0;
    for (uint32_t s : flow.packet_sizes) mean += s;
    mean /= n;
    flow.mean_pkt_size = mean;
    double var = 0;
    for (uint32_t s : flow.packet_sizes) var += (s - mean) * (s - mean);
    flow.std_pkt_size = std::sqrt(var / n);
    if (flow.pkt_count >= 2) {
        double m = static_cast<double>(flow.pkt_count - 1);
        for (size_t i = 1; i < flow.packet_times.size(); ++i) {
            flow.mean_iat += flow.packet_times[i] - flow.packet_times[i - 1];
        }
        flow.mean_iat /= m;
        double var_iat = 0;
        for (size_t i = 1; i < flow.packet_times.size(); ++i) {
            double gap = flow.packet_times[i] - flow.packet_times[i - 1];
            var_iat += (gap - flow.mean_iat) * (gap - flow.mean_iat);
        }
        flow.std_iat = std::sqrt(var_iat / m);
    }
    flow.bandwidth = static_cast<double>(flow.byte_count) / std::max(flow.duration, 1e-6);
    return flow;
}

}  // namespace botscope::testing
