#pragma once

#include <map>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include "orel/common.hpp"

namespace orel {

/// Interns phase labels: one canonical string per distinct path, plus a
/// 16-bit wire tag (hash; used only as a framing sanity check).
class PhaseRegistry {
  public:
    static const std::string* intern(const std::string& label);
    static u16 wire_tag(const std::string& label);
};

struct TranscriptEntry {
    const std::string* phase;  // interned; pointer equality == label equality
    u8 sender;
    u8 receiver;
    u64 payload_bits;
    u64 round;

    bool operator==(const TranscriptEntry&) const = default;
};

/// Ordered per-party log of protocol payloads; the measurement surface for
/// obliviousness and communication-cost checks. Counts payload only, no framing.
struct Transcript {
    std::vector<TranscriptEntry> entries;

    void record(const std::string* phase, int sender, int receiver, u64 payload_bits, u64 round) {
        entries.push_back({phase, static_cast<u8>(sender), static_cast<u8>(receiver), payload_bits, round});
    }

    u64 total_sent_bits(int me) const {
        u64 t = 0;
        for (const auto& e : entries)
            if (e.sender == me) t += e.payload_bits;
        return t;
    }

    u64 total_received_bits(int me) const {
        u64 t = 0;
        for (const auto& e : entries)
            if (e.receiver == me) t += e.payload_bits;
        return t;
    }
};

/// Value-erased (phase, sender, receiver, size) sequence.
struct TraceShape {
    std::vector<std::tuple<const std::string*, u8, u8, u64>> seq;
    bool operator==(const TraceShape&) const = default;
};

inline TraceShape trace_shape(const Transcript& t) {
    TraceShape s;
    s.seq.reserve(t.entries.size());
    for (const auto& e : t.entries) s.seq.emplace_back(e.phase, e.sender, e.receiver, e.payload_bits);
    return s;
}

struct PhaseStats {
    u64 bits = 0;
    u64 messages = 0;
    u64 rounds = 0;
};

/// Aggregates a party's send entries by outermost phase label.
std::map<std::string, PhaseStats> phase_report(const Transcript& t, int me);

}  // namespace orel
