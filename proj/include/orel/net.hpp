#pragma once

#include <array>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "orel/common.hpp"
#include "orel/prg.hpp"
#include "orel/transcript.hpp"

namespace orel {

struct Message {
    u16 phase = 0;
    std::vector<u8> bytes;
};

/// Ordered reliable FIFO channels between every party pair.
class Fabric {
  public:
    virtual ~Fabric() = default;
    virtual void send(int from, int to, Message msg) = 0;
    // Blocks until the next in-order message from `from` arrives; checks the phase tag.
    virtual Message recv(int to, int from, const std::string& expected_phase) = 0;
};

/// In-process fabric: one queue per directed party pair.
class LocalFabric : public Fabric {
  public:
    explicit LocalFabric(std::chrono::milliseconds timeout = std::chrono::seconds(60)) : timeout_(timeout) {}

    void send(int from, int to, Message msg) override;
    Message recv(int to, int from, const std::string& expected_phase) override;

  private:
    struct Queue {
        std::mutex m;
        std::condition_variable cv;
        std::deque<Message> q;
    };
    Queue queues_[kParties][kParties];  // [from][to]
    std::chrono::milliseconds timeout_;
};

/// One party's endpoint of a TCP mesh. Wire format per frame:
/// 4-byte little-endian payload length, 2-byte phase tag, raw share bytes.
class TcpFabric : public Fabric {
  public:
    // peers[i] = "host:port" for party i; binds own port, connects to higher-indexed peers.
    TcpFabric(int me, const std::array<std::string, 3>& peers, std::chrono::milliseconds timeout = std::chrono::seconds(60));
    ~TcpFabric() override;

    void send(int from, int to, Message msg) override;
    Message recv(int to, int from, const std::string& expected_phase) override;

  private:
    int me_;
    int fds_[3] = {-1, -1, -1};
    std::chrono::milliseconds timeout_;
};

/**
 * One party's runtime view: identity, seed material, channels, transcript,
 * phase stack and round counter. All protocol code is written SPMD: every
 * party runs the same function over this context.
 */
class PartyContext {
  public:
    PartyContext(int me, Fabric& fabric, const SeedFabric& seeds);

    int me() const { return me_; }

    // --- communication -----------------------------------------------------
    void send_vec(int to, std::span<const u128> values, unsigned width);
    std::vector<u128> recv_vec(int from, std::size_t n, unsigned width);
    void next_round() { round_++; }
    u64 round_counter() const { return round_; }

    // --- phases -------------------------------------------------------------
    class PhaseGuard {
      public:
        PhaseGuard(PartyContext& ctx, const std::string& label);
        ~PhaseGuard();
        PhaseGuard(const PhaseGuard&) = delete;

      private:
        PartyContext& ctx_;
    };
    PhaseGuard phase(const std::string& label) { return PhaseGuard(*this, label); }
    const std::string& phase_path() const { return phase_path_; }

    // --- randomness ---------------------------------------------------------
    // Rolling stream shared with the pair that owns pair_seed[j]; both members
    // must draw at the same points (SPMD control flow guarantees this).
    u128 pair_draw(int pair_idx, unsigned width);
    Prg& personal() { return personal_; }
    u64 fresh_perm_nonce() { return perm_nonce_++; }
    const SeedFabric& seeds() const { return seeds_; }

    Transcript transcript;

  private:
    friend class PhaseGuard;
    int me_;
    Fabric& fabric_;
    SeedFabric seeds_;
    Prg pair_stream_[3];
    Prg personal_;
    u64 perm_nonce_ = 0;
    u64 round_ = 0;
    std::vector<std::string> phase_stack_;
    std::string phase_path_;
    const std::string* phase_ptr_;
    u16 wire_tag_;
    void rebuild_phase_path();
};

struct PartyRun {
    Transcript transcript;
};

/**
 * Executes one protocol with all three parties as threads of this process.
 * Deterministic given (inputs captured by fn, seeds). Throws the first party
 * exception after joining; deadlocks surface as channel timeouts.
 */
std::array<Transcript, 3> run_parties(const SeedFabric& seeds, const std::function<void(PartyContext&)>& fn,
                                      std::chrono::milliseconds timeout = std::chrono::seconds(60));

}  // namespace orel
