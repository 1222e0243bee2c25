#pragma once

#include <string>
#include <utility>

#include "botscope/types.hpp"

namespace botscope {

struct IngestStats {
    uint64_t packets_read = 0;
    uint64_t packets_dropped_malformed = 0;
    uint64_t packets_dropped_unsupported = 0;  // non-Ethernet link, non-IPv4, later fragments

    uint64_t emitted() const {
        return packets_read - packets_dropped_malformed - packets_dropped_unsupported;
    }
};

// Rounds a timestamp to whole microseconds the same way the PCAP reader
// reconstructs it, so quantized timestamps survive a write/read cycle bit-exactly.
double quantize_ts(double ts);

// Classic PCAP, microsecond magic 0xA1B2C3D4 in either byte order, linktype 1.
// Throws BadMagic / TruncatedCapture.
std::pair<Trace, IngestStats> read_pcap(const std::string& path);

// One JSON object per line; invalid lines counted as malformed. Throws Unreadable.
std::pair<Trace, IngestStats> read_jsonl(const std::string& path);

// Stable sort by ts; tags the trace as network-traffic sourced.
Trace normalize_trace(std::vector<PacketRecord> packets);

}  // namespace botscope
