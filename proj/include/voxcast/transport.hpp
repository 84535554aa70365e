#ifndef VOXCAST_TRANSPORT_HPP
#define VOXCAST_TRANSPORT_HPP

// One-sender many-receiver frame delivery over UDP multicast, plus an
// in-process simulated channel for deterministic tests.
//
// Wire format (all header fields big-endian): a frame is chunked into
// datagrams of at most 1400 bytes, each carrying
//
//   magic "VXC1" | seq u32 | rounds u8 | chunk_index u8 | chunk_count u8 |
//   frame_len u16 | chunk_len u16 | chunk bytes
//
// Chunks of one frame must arrive in order; any gap or reordering discards
// the partial frame (no retransmission, matching the one-way multicast
// model -- loss shows up as a skipped frame).

#include <chrono>
#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace voxcast {

struct FramePacket {
    std::uint32_t seq = 0;
    std::uint8_t rounds = 0;
    std::vector<std::uint8_t> payload;

    bool operator==(const FramePacket&) const = default;
};

struct GroupConfig {
    std::string group_address = "224.0.1.0";
    std::uint16_t port = 35711;
    int ttl = 1;
    // Interface for the membership/egress; overridable with VOXCAST_MCAST_IF.
    std::string interface_address = "127.0.0.1";
};

inline constexpr std::size_t kChunkBytes = 1024;
inline constexpr std::size_t kChunkHeaderBytes = 15;

// Serialization used by both the socket path and the simulated channel.
std::vector<std::vector<std::uint8_t>> packet_to_datagrams(const FramePacket& packet);

// Reassembles in-order chunk streams into frames; tracks drop reasons.
class FrameReassembler {
public:
    // Feed one datagram; returns a frame when it completes one.
    std::optional<FramePacket> feed(std::span<const std::uint8_t> datagram);

    std::uint64_t malformed() const { return malformed_; }
    std::uint64_t discarded_frames() const { return discarded_; }

private:
    void abandon();

    bool assembling_ = false;
    std::uint32_t seq_ = 0;
    std::uint8_t rounds_ = 0;
    std::uint8_t next_chunk_ = 0;
    std::uint8_t chunk_count_ = 0;
    std::size_t frame_len_ = 0;
    std::vector<std::uint8_t> buf_;
    std::uint64_t malformed_ = 0;
    std::uint64_t discarded_ = 0;
};

class MulticastSender {
public:
    explicit MulticastSender(const GroupConfig& config);
    ~MulticastSender();
    MulticastSender(const MulticastSender&) = delete;
    MulticastSender& operator=(const MulticastSender&) = delete;

    void send_frame(const FramePacket& packet);

private:
    int fd_ = -1;
    GroupConfig config_;
};

// join_group: membership is registered in the constructor (the OS emits the
// IGMP report); throws on a non-class-D address or socket failure.
class MulticastReceiver {
public:
    explicit MulticastReceiver(const GroupConfig& config);
    ~MulticastReceiver();
    MulticastReceiver(const MulticastReceiver&) = delete;
    MulticastReceiver& operator=(const MulticastReceiver&) = delete;

    // Blocks up to `timeout` for a complete frame; nullopt on timeout.
    std::optional<FramePacket> recv_frame(std::chrono::milliseconds timeout);

    std::uint64_t malformed() const;
    std::uint64_t discarded_frames() const;

private:
    int fd_ = -1;
    FrameReassembler reassembler_;
};

bool is_multicast_address(const std::string& addr);

// Deterministic in-process fan-out channel.  Frames are dropped per receiver
// with probability loss_rate and reordered within windows of
// reorder_window frames; both draws come from the given seed.
class SimulatedChannel {
public:
    SimulatedChannel(double loss_rate, std::size_t reorder_window,
                     std::uint64_t seed, std::size_t receiver_count);

    void send(const FramePacket& packet);
    // Delivers buffered frames held back by the reorder window.
    void flush();

    std::optional<FramePacket> recv(std::size_t receiver);
    std::size_t receiver_count() const { return queues_.size(); }

private:
    void deliver(const FramePacket& packet);

    double loss_rate_;
    std::size_t reorder_window_;
    std::vector<std::mt19937_64> rngs_;
    std::mt19937_64 order_rng_;
    std::vector<FramePacket> pending_;
    std::vector<std::deque<FramePacket>> queues_;
};

}  // namespace voxcast

#endif
