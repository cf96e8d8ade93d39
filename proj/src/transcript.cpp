#include "orel/transcript.hpp"

#include <mutex>
#include <set>

namespace orel {

namespace {

struct Registry {
    std::mutex m;
    std::set<std::string> labels;  // node stability keeps interned pointers valid
};

Registry& registry() {
    static Registry r;
    return r;
}

}  // namespace

const std::string* PhaseRegistry::intern(const std::string& label) {
    auto& r = registry();
    std::lock_guard<std::mutex> lk(r.m);
    return &*r.labels.insert(label).first;
}

u16 PhaseRegistry::wire_tag(const std::string& label) {
    u32 h = 2166136261u;
    for (unsigned char c : label) {
        h ^= c;
        h *= 16777619u;
    }
    return static_cast<u16>(h ^ (h >> 16));
}

std::map<std::string, PhaseStats> phase_report(const Transcript& t, int me) {
    std::map<std::string, PhaseStats> out;
    std::map<std::string, u64> last_round;
    for (const auto& e : t.entries) {
        const std::string& path = *e.phase;
        std::string top = path.substr(0, path.find('/'));
        auto& st = out[top];
        if (e.sender == me) {
            st.bits += e.payload_bits;
            st.messages += 1;
        }
        // rounds count every communication round the party took part in
        auto it = last_round.find(top);
        if (it == last_round.end() || it->second != e.round) {
            st.rounds += 1;
            last_round[top] = e.round;
        }
    }
    return out;
}

}  // namespace orel
