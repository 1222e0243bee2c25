#include "botscope/types.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace botscope {

std::string format_ip(uint32_t ip) {
    return std::to_string((ip >> 24) & 0xff) + "." + std::to_string((ip >> 16) & 0xff) + "." +
           std::to_string((ip >> 8) & 0xff) + "." + std::to_string(ip & 0xff);
}

std::string format_endpoint(const Endpoint& ep) {
    return format_ip(ep.ip) + ":" + std::to_string(ep.port);
}

uint32_t parse_ip(const std::string& text) {
    uint32_t ip = 0;
    const char* p = text.data();
    const char* end = text.data() + text.size();
    for (int octet = 0; octet < 4; ++octet) {
        unsigned value = 0;
        auto [next, ec] = std::from_chars(p, end, value);
        if (ec != std::errc{} || value > 255 || next == p) {
            throw std::invalid_argument("bad IPv4 address: " + text);
        }
        ip = (ip << 8) | value;
        p = next;
        if (octet < 3) {
            if (p == end || *p != '.') throw std::invalid_argument("bad IPv4 address: " + text);
            ++p;
        }
    }
    if (p != end) throw std::invalid_argument("bad IPv4 address: " + text);
    return ip;
}

Endpoint parse_endpoint(const std::string& text) {
    auto colon = text.rfind(':');
    if (colon == std::string::npos) throw std::invalid_argument("missing port: " + text);
    Endpoint ep;
    ep.ip = parse_ip(text.substr(0, colon));
    unsigned port = 0;
    const char* p = text.data() + colon + 1;
    const char* end = text.data() + text.size();
    auto [next, ec] = std::from_chars(p, end, port);
    if (ec != std::errc{} || next != end || port > 65535) {
        throw std::invalid_argument("bad port: " + text);
    }
    ep.port = static_cast<uint16_t>(port);
    return ep;
}

FlowKey::FlowKey(Endpoint x, Endpoint y, Transport t) : transport(t) {
    if (std::tie(x.ip, x.port) <= std::tie(y.ip, y.port)) {
        a = x;
        b = y;
    } else {
        a = y;
        b = x;
    }
}

const std::vector<std::string>& FeatureVector::feature_names() {
    static const std::vector<std::string> names = {
        "duration_s", "bandwidth_bps", "mean_pkt_size", "std_pkt_size",
        "mean_iat",   "std_iat",       "payload_ratio", "pkt_count",
    };
    return names;
}

double FeatureVector::operator[](size_t i) const {
    switch (i) {
        case 0: return duration_s;
        case 1: return bandwidth_bps;
        case 2: return mean_pkt_size;
        case 3: return std_pkt_size;
        case 4: return mean_iat;
        case 5: return std_iat;
        case 6: return payload_ratio;
        case 7: return pkt_count;
        default: throw std::out_of_range("feature index " + std::to_string(i));
    }
}

std::vector<double> FeatureVector::as_vector() const {
    std::vector<double> v(kDims);
    for (size_t i = 0; i < kDims; ++i) v[i] = (*this)[i];
    return v;
}

FeatureVector compute_features(const FlowSummary& flow) {
    FeatureVector fv;
    fv.duration_s = flow.duration;
    fv.bandwidth_bps = flow.bandwidth;
    fv.mean_pkt_size = flow.mean_pkt_size;
    fv.std_pkt_size = flow.std_pkt_size;
    fv.mean_iat = flow.mean_iat;
    fv.std_iat = flow.std_iat;
    fv.payload_ratio = static_cast<double>(flow.payload_bytes) /
                       static_cast<double>(std::max<uint64_t>(flow.byte_count, 1));
    fv.pkt_count = static_cast<double>(flow.pkt_count);
    return fv;
}

}  // namespace botscope
