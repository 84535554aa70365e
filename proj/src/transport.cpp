#include "voxcast/transport.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <span>
#include <stdexcept>

namespace voxcast {

namespace {

constexpr std::array<std::uint8_t, 4> kMagic = {'V', 'X', 'C', '1'};

void put_u16(std::vector<std::uint8_t>& v, std::uint16_t x) {
    v.push_back(static_cast<std::uint8_t>(x >> 8));
    v.push_back(static_cast<std::uint8_t>(x));
}

void put_u32(std::vector<std::uint8_t>& v, std::uint32_t x) {
    v.push_back(static_cast<std::uint8_t>(x >> 24));
    v.push_back(static_cast<std::uint8_t>(x >> 16));
    v.push_back(static_cast<std::uint8_t>(x >> 8));
    v.push_back(static_cast<std::uint8_t>(x));
}

std::uint16_t get_u16(const std::uint8_t* p) {
    return static_cast<std::uint16_t>((p[0] << 8) | p[1]);
}

std::uint32_t get_u32(const std::uint8_t* p) {
    return (static_cast<std::uint32_t>(p[0]) << 24) | (static_cast<std::uint32_t>(p[1]) << 16) |
           (static_cast<std::uint32_t>(p[2]) << 8) | static_cast<std::uint32_t>(p[3]);
}

std::string mcast_interface(const GroupConfig& config) {
    if (const char* env = std::getenv("VOXCAST_MCAST_IF"); env && *env) return env;
    return config.interface_address;
}

[[noreturn]] void throw_errno(const std::string& what) {
    throw std::runtime_error(what + ": " + std::strerror(errno));
}

}  // namespace

bool is_multicast_address(const std::string& addr) {
    in_addr a{};
    if (inet_pton(AF_INET, addr.c_str(), &a) != 1) return false;
    const std::uint32_t host = ntohl(a.s_addr);
    return host >= 0xE0000000u && host <= 0xEFFFFFFFu;  // 224.0.0.0 - 239.255.255.255
}

std::vector<std::vector<std::uint8_t>> packet_to_datagrams(const FramePacket& packet) {
    if (packet.payload.empty()) throw std::invalid_argument("empty payload");
    if (packet.payload.size() > 0xFFFF) throw std::invalid_argument("payload too large");

    const std::size_t chunks = (packet.payload.size() + kChunkBytes - 1) / kChunkBytes;
    if (chunks > 255) throw std::invalid_argument("too many chunks");

    std::vector<std::vector<std::uint8_t>> out;
    out.reserve(chunks);
    for (std::size_t c = 0; c < chunks; ++c) {
        const std::size_t off = c * kChunkBytes;
        const std::size_t len = std::min(kChunkBytes, packet.payload.size() - off);
        std::vector<std::uint8_t> d;
        d.reserve(kChunkHeaderBytes + len);
        d.insert(d.end(), kMagic.begin(), kMagic.end());
        put_u32(d, packet.seq);
        d.push_back(packet.rounds);
        d.push_back(static_cast<std::uint8_t>(c));
        d.push_back(static_cast<std::uint8_t>(chunks));
        put_u16(d, static_cast<std::uint16_t>(packet.payload.size()));
        put_u16(d, static_cast<std::uint16_t>(len));
        d.insert(d.end(), packet.payload.begin() + static_cast<std::ptrdiff_t>(off),
                 packet.payload.begin() + static_cast<std::ptrdiff_t>(off + len));
        out.push_back(std::move(d));
    }
    return out;
}

void FrameReassembler::abandon() {
    if (assembling_) ++discarded_;
    assembling_ = false;
    buf_.clear();
}

std::optional<FramePacket> FrameReassembler::feed(std::span<const std::uint8_t> d) {
    if (d.size() < kChunkHeaderBytes ||
        !std::equal(kMagic.begin(), kMagic.end(), d.begin())) {
        ++malformed_;
        return std::nullopt;
    }
    const std::uint32_t seq = get_u32(d.data() + 4);
    const std::uint8_t rounds = d[8];
    const std::uint8_t chunk_index = d[9];
    const std::uint8_t chunk_count = d[10];
    const std::uint16_t frame_len = get_u16(d.data() + 11);
    const std::uint16_t chunk_len = get_u16(d.data() + 13);
    if (chunk_count == 0 || chunk_index >= chunk_count ||
        d.size() != kChunkHeaderBytes + chunk_len) {
        ++malformed_;
        return std::nullopt;
    }

    if (chunk_index == 0) {
        abandon();
        assembling_ = true;
        seq_ = seq;
        rounds_ = rounds;
        next_chunk_ = 0;
        chunk_count_ = chunk_count;
        frame_len_ = frame_len;
        buf_.clear();
    } else if (!assembling_ || seq != seq_ || chunk_index != next_chunk_ ||
               chunk_count != chunk_count_) {
        abandon();  // gap or out-of-order chunk: whole frame is lost
        return std::nullopt;
    }

    buf_.insert(buf_.end(), d.begin() + kChunkHeaderBytes, d.end());
    ++next_chunk_;

    if (next_chunk_ == chunk_count_) {
        assembling_ = false;
        if (buf_.size() != frame_len_) {
            ++discarded_;
            buf_.clear();
            return std::nullopt;
        }
        FramePacket p;
        p.seq = seq_;
        p.rounds = rounds_;
        p.payload = std::move(buf_);
        buf_.clear();
        return p;
    }
    return std::nullopt;
}

MulticastSender::MulticastSender(const GroupConfig& config) : config_(config) {
    if (!is_multicast_address(config.group_address))
        throw std::invalid_argument(config.group_address + " is not a class-D multicast address");

    fd_ = socket(AF_INET, SOCK_DGRAM, 0);
    if (fd_ < 0) throw_errno("socket");

    in_addr ifaddr{};
    if (inet_pton(AF_INET, mcast_interface(config).c_str(), &ifaddr) != 1) {
        close(fd_);
        throw std::invalid_argument("bad interface address");
    }
    const std::uint8_t ttl = static_cast<std::uint8_t>(config.ttl);
    const std::uint8_t loop = 1;
    if (setsockopt(fd_, IPPROTO_IP, IP_MULTICAST_IF, &ifaddr, sizeof ifaddr) < 0 ||
        setsockopt(fd_, IPPROTO_IP, IP_MULTICAST_TTL, &ttl, sizeof ttl) < 0 ||
        setsockopt(fd_, IPPROTO_IP, IP_MULTICAST_LOOP, &loop, sizeof loop) < 0) {
        close(fd_);
        throw_errno("setsockopt");
    }
}

MulticastSender::~MulticastSender() {
    if (fd_ >= 0) close(fd_);
}

void MulticastSender::send_frame(const FramePacket& packet) {
    sockaddr_in dst{};
    dst.sin_family = AF_INET;
    dst.sin_port = htons(config_.port);
    if (inet_pton(AF_INET, config_.group_address.c_str(), &dst.sin_addr) != 1)
        throw std::invalid_argument("bad group address");

    for (const auto& d : packet_to_datagrams(packet)) {
        const ssize_t n = sendto(fd_, d.data(), d.size(), 0,
                                 reinterpret_cast<const sockaddr*>(&dst), sizeof dst);
        if (n != static_cast<ssize_t>(d.size())) throw_errno("sendto");
    }
}

MulticastReceiver::MulticastReceiver(const GroupConfig& config) {
    if (!is_multicast_address(config.group_address))
        throw std::invalid_argument(config.group_address + " is not a class-D multicast address");

    fd_ = socket(AF_INET, SOCK_DGRAM, 0);
    if (fd_ < 0) throw_errno("socket");

    const int one = 1;
    setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
#ifdef SO_REUSEPORT
    setsockopt(fd_, SOL_SOCKET, SO_REUSEPORT, &one, sizeof one);
#endif

    // bind to the group address itself so traffic for other groups sharing
    // the port is filtered out by the kernel
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(config.port);
    if (inet_pton(AF_INET, config.group_address.c_str(), &addr.sin_addr) != 1) {
        close(fd_);
        throw std::invalid_argument("bad group address");
    }
    if (bind(fd_, reinterpret_cast<const sockaddr*>(&addr), sizeof addr) < 0) {
        close(fd_);
        throw_errno("bind");
    }

    ip_mreq mreq{};
    if (inet_pton(AF_INET, config.group_address.c_str(), &mreq.imr_multiaddr) != 1 ||
        inet_pton(AF_INET, mcast_interface(config).c_str(), &mreq.imr_interface) != 1) {
        close(fd_);
        throw std::invalid_argument("bad group or interface address");
    }
    if (setsockopt(fd_, IPPROTO_IP, IP_ADD_MEMBERSHIP, &mreq, sizeof mreq) < 0) {
        close(fd_);
        throw_errno("IP_ADD_MEMBERSHIP");
    }
}

MulticastReceiver::~MulticastReceiver() {
    if (fd_ >= 0) close(fd_);
}

std::optional<FramePacket> MulticastReceiver::recv_frame(std::chrono::milliseconds timeout) {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    std::array<std::uint8_t, 2048> buf;
    for (;;) {
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
            deadline - std::chrono::steady_clock::now());
        if (left.count() <= 0) return std::nullopt;

        pollfd pfd{};
        pfd.fd = fd_;
        pfd.events = POLLIN;
        const int pr = poll(&pfd, 1, static_cast<int>(left.count()));
        if (pr < 0) {
            if (errno == EINTR) continue;
            throw_errno("poll");
        }
        if (pr == 0) return std::nullopt;

        const ssize_t n = recvfrom(fd_, buf.data(), buf.size(), 0, nullptr, nullptr);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw_errno("recvfrom");
        }
        if (auto frame = reassembler_.feed({buf.data(), static_cast<std::size_t>(n)}))
            return frame;
    }
}

std::uint64_t MulticastReceiver::malformed() const { return reassembler_.malformed(); }
std::uint64_t MulticastReceiver::discarded_frames() const { return reassembler_.discarded_frames(); }

SimulatedChannel::SimulatedChannel(double loss_rate, std::size_t reorder_window,
                                   std::uint64_t seed, std::size_t receiver_count)
    : loss_rate_(loss_rate), reorder_window_(reorder_window), order_rng_(seed ^ 0x9E3779B97F4A7C15ull),
      queues_(receiver_count) {
    if (loss_rate < 0.0 || loss_rate > 1.0)
        throw std::invalid_argument("loss rate must be in [0,1]");
    for (std::size_t r = 0; r < receiver_count; ++r) rngs_.emplace_back(seed + r);
}

void SimulatedChannel::deliver(const FramePacket& packet) {
    for (std::size_t r = 0; r < queues_.size(); ++r) {
        if (loss_rate_ > 0.0) {
            std::bernoulli_distribution drop(loss_rate_);
            if (drop(rngs_[r])) continue;
        }
        queues_[r].push_back(packet);
    }
}

void SimulatedChannel::send(const FramePacket& packet) {
    if (packet.payload.empty()) throw std::invalid_argument("empty payload");
    if (reorder_window_ <= 1) {
        deliver(packet);
        return;
    }
    pending_.push_back(packet);
    if (pending_.size() >= reorder_window_) flush();
}

void SimulatedChannel::flush() {
    std::shuffle(pending_.begin(), pending_.end(), order_rng_);
    for (const auto& p : pending_) deliver(p);
    pending_.clear();
}

std::optional<FramePacket> SimulatedChannel::recv(std::size_t receiver) {
    auto& q = queues_.at(receiver);
    if (q.empty()) return std::nullopt;
    FramePacket p = std::move(q.front());
    q.pop_front();
    return p;
}

}  // namespace voxcast
