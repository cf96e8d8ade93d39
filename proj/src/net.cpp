#include "orel/net.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstring>
#include <thread>

namespace orel {

// ---------------------------------------------------------------------------
// LocalFabric

void LocalFabric::send(int from, int to, Message msg) {
    auto& q = queues_[from][to];
    {
        std::lock_guard<std::mutex> lk(q.m);
        q.q.push_back(std::move(msg));
    }
    q.cv.notify_one();
}

Message LocalFabric::recv(int to, int from, const std::string& expected_phase) {
    auto& q = queues_[from][to];
    std::unique_lock<std::mutex> lk(q.m);
    if (!q.cv.wait_for(lk, timeout_, [&] { return !q.q.empty(); }))
        throw ProtocolError("recv timeout in phase '" + expected_phase + "' (party " + std::to_string(to) +
                            " waiting on " + std::to_string(from) + ")");
    Message msg = std::move(q.q.front());
    q.q.pop_front();
    if (msg.phase != PhaseRegistry::wire_tag(expected_phase))
        throw ProtocolError("phase mismatch: expected '" + expected_phase + "'");
    return msg;
}

// ---------------------------------------------------------------------------
// TcpFabric

namespace {

void split_hostport(const std::string& hp, std::string& host, int& port) {
    auto pos = hp.rfind(':');
    if (pos == std::string::npos) throw ProtocolError("peer address must be host:port, got '" + hp + "'");
    host = hp.substr(0, pos);
    port = std::stoi(hp.substr(pos + 1));
}

void write_all(int fd, const void* buf, std::size_t len) {
    const char* p = static_cast<const char*>(buf);
    while (len > 0) {
        ssize_t w = ::write(fd, p, len);
        if (w <= 0) throw ProtocolError("peer disconnect during send");
        p += w;
        len -= static_cast<std::size_t>(w);
    }
}

void read_all(int fd, void* buf, std::size_t len) {
    char* p = static_cast<char*>(buf);
    while (len > 0) {
        ssize_t r = ::read(fd, p, len);
        if (r <= 0) throw ProtocolError("peer disconnect during recv");
        p += r;
        len -= static_cast<std::size_t>(r);
    }
}

}  // namespace

TcpFabric::TcpFabric(int me, const std::array<std::string, 3>& peers, std::chrono::milliseconds timeout)
    : me_(me), timeout_(timeout) {
    std::string host;
    int port;
    split_hostport(peers[me], host, port);

    int listener = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listener < 0) throw ProtocolError("socket() failed");
    int one = 1;
    ::setsockopt(listener, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_ANY);
    addr.sin_port = htons(static_cast<u16>(port));
    if (::bind(listener, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0)
        throw ProtocolError("bind failed on port " + std::to_string(port));
    if (::listen(listener, 2) != 0) throw ProtocolError("listen failed");

    // lower-indexed parties accept from higher-indexed ones; the first byte
    // of each connection identifies the connecting party
    for (int j = 0; j < me_; j++) {
        std::string h;
        int p;
        split_hostport(peers[j], h, p);
        int fd = -1;
        for (int attempt = 0; attempt < 200; attempt++) {
            fd = ::socket(AF_INET, SOCK_STREAM, 0);
            sockaddr_in peer{};
            peer.sin_family = AF_INET;
            peer.sin_port = htons(static_cast<u16>(p));
            hostent* he = ::gethostbyname(h.c_str());
            if (!he) throw ProtocolError("cannot resolve host '" + h + "'");
            std::memcpy(&peer.sin_addr, he->h_addr, sizeof(peer.sin_addr));
            if (::connect(fd, reinterpret_cast<sockaddr*>(&peer), sizeof(peer)) == 0) break;
            ::close(fd);
            fd = -1;
            std::this_thread::sleep_for(std::chrono::milliseconds(50));
        }
        if (fd < 0) throw ProtocolError("cannot connect to party " + std::to_string(j));
        u8 tag = static_cast<u8>(me_);
        write_all(fd, &tag, 1);
        fds_[j] = fd;
    }
    for (int j = me_ + 1; j < kParties; j++) {
        int fd = ::accept(listener, nullptr, nullptr);
        if (fd < 0) throw ProtocolError("accept failed");
        u8 tag;
        read_all(fd, &tag, 1);
        fds_[tag] = fd;
    }
    ::close(listener);

    for (int j = 0; j < kParties; j++) {
        if (fds_[j] < 0) continue;
        int nd = 1;
        ::setsockopt(fds_[j], IPPROTO_TCP, TCP_NODELAY, &nd, sizeof(nd));
        timeval tv{};
        tv.tv_sec = static_cast<long>(timeout_.count() / 1000);
        tv.tv_usec = static_cast<long>((timeout_.count() % 1000) * 1000);
        ::setsockopt(fds_[j], SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv));
    }
}

TcpFabric::~TcpFabric() {
    for (int fd : fds_)
        if (fd >= 0) ::close(fd);
}

void TcpFabric::send(int from, int to, Message msg) {
    if (from != me_) throw ProtocolError("tcp fabric can only send as its own party");
    u8 header[6];
    u32 len = static_cast<u32>(msg.bytes.size());
    header[0] = static_cast<u8>(len);
    header[1] = static_cast<u8>(len >> 8);
    header[2] = static_cast<u8>(len >> 16);
    header[3] = static_cast<u8>(len >> 24);
    header[4] = static_cast<u8>(msg.phase);
    header[5] = static_cast<u8>(msg.phase >> 8);
    write_all(fds_[to], header, sizeof(header));
    if (len > 0) write_all(fds_[to], msg.bytes.data(), len);
}

Message TcpFabric::recv(int to, int from, const std::string& expected_phase) {
    if (to != me_) throw ProtocolError("tcp fabric can only receive as its own party");
    u8 header[6];
    try {
        read_all(fds_[from], header, sizeof(header));
    } catch (const ProtocolError&) {
        throw ProtocolError("peer " + std::to_string(from) + " unavailable in phase '" + expected_phase + "'");
    }
    u32 len = static_cast<u32>(header[0]) | (static_cast<u32>(header[1]) << 8) | (static_cast<u32>(header[2]) << 16) |
              (static_cast<u32>(header[3]) << 24);
    Message msg;
    msg.phase = static_cast<u16>(header[4]) | (static_cast<u16>(header[5]) << 8);
    msg.bytes.resize(len);
    if (len > 0) read_all(fds_[from], msg.bytes.data(), len);
    if (msg.phase != PhaseRegistry::wire_tag(expected_phase))
        throw ProtocolError("phase mismatch: expected '" + expected_phase + "'");
    return msg;
}

// ---------------------------------------------------------------------------
// PartyContext

PartyContext::PartyContext(int me, Fabric& fabric, const SeedFabric& seeds)
    : me_(me), fabric_(fabric), seeds_(seeds), personal_(seeds.personal[me], 0x5e1f) {
    for (int j = 0; j < 3; j++)
        if (SeedFabric::pair_member(j, me)) pair_stream_[j] = Prg(seeds.pair_seed[j], 0x9a17);
    phase_ptr_ = PhaseRegistry::intern("");
    wire_tag_ = PhaseRegistry::wire_tag("");
}

void PartyContext::rebuild_phase_path() {
    phase_path_.clear();
    for (std::size_t i = 0; i < phase_stack_.size(); i++) {
        if (i) phase_path_ += '/';
        phase_path_ += phase_stack_[i];
    }
    phase_ptr_ = PhaseRegistry::intern(phase_path_);
    wire_tag_ = PhaseRegistry::wire_tag(phase_path_);
}

PartyContext::PhaseGuard::PhaseGuard(PartyContext& ctx, const std::string& label) : ctx_(ctx) {
    ctx_.phase_stack_.push_back(label);
    ctx_.rebuild_phase_path();
}

PartyContext::PhaseGuard::~PhaseGuard() {
    ctx_.phase_stack_.pop_back();
    ctx_.rebuild_phase_path();
}

u128 PartyContext::pair_draw(int pair_idx, unsigned width) {
    if (!SeedFabric::pair_member(pair_idx, me_))
        throw ProtocolError("party " + std::to_string(me_) + " does not hold pair seed " + std::to_string(pair_idx));
    return pair_stream_[pair_idx].next_bits(width);
}

namespace {

std::size_t bytes_per_elem(unsigned width) { return (width + 7) / 8; }

}  // namespace

void PartyContext::send_vec(int to, std::span<const u128> values, unsigned width) {
    Message msg;
    msg.phase = wire_tag_;
    std::size_t bpe = bytes_per_elem(width);
    msg.bytes.resize(values.size() * bpe);
    for (std::size_t i = 0; i < values.size(); i++) {
        u128 v = values[i];
        for (std::size_t b = 0; b < bpe; b++) msg.bytes[i * bpe + b] = static_cast<u8>(v >> (8 * b));
    }
    transcript.record(phase_ptr_, me_, to, static_cast<u64>(values.size()) * width, round_);
    fabric_.send(me_, to, std::move(msg));
}

std::vector<u128> PartyContext::recv_vec(int from, std::size_t n, unsigned width) {
    Message msg = fabric_.recv(me_, from, phase_path_);
    std::size_t bpe = bytes_per_elem(width);
    if (msg.bytes.size() != n * bpe)
        throw ProtocolError("payload size mismatch in phase '" + phase_path_ + "': expected " +
                            std::to_string(n * bpe) + " bytes, got " + std::to_string(msg.bytes.size()));
    std::vector<u128> out(n);
    u128 mask = width_mask(width);
    for (std::size_t i = 0; i < n; i++) {
        u128 v = 0;
        for (std::size_t b = 0; b < bpe; b++) v |= static_cast<u128>(msg.bytes[i * bpe + b]) << (8 * b);
        out[i] = v & mask;
    }
    transcript.record(phase_ptr_, from, me_, static_cast<u64>(n) * width, round_);
    return out;
}

// ---------------------------------------------------------------------------
// Harness

std::array<Transcript, 3> run_parties(const SeedFabric& seeds, const std::function<void(PartyContext&)>& fn,
                                      std::chrono::milliseconds timeout) {
    LocalFabric fabric(timeout);
    std::array<Transcript, 3> transcripts;
    std::array<std::exception_ptr, 3> errors{};
    std::vector<std::thread> threads;
    threads.reserve(kParties);
    for (int p = 0; p < kParties; p++) {
        threads.emplace_back([&, p] {
            PartyContext ctx(p, fabric, seeds);
            try {
                fn(ctx);
            } catch (...) {
                errors[p] = std::current_exception();
            }
            transcripts[p] = std::move(ctx.transcript);
        });
    }
    for (auto& t : threads) t.join();
    for (int p = 0; p < kParties; p++)
        if (errors[p]) std::rethrow_exception(errors[p]);
    return transcripts;
}

}  // namespace orel
