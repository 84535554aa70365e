#include "voxcast/permute.hpp"

#include <stdexcept>

namespace voxcast {

namespace {

void check_group(std::span<const std::uint8_t> in, std::span<std::uint8_t> out,
                 const PermutationTable& table) {
    if (in.size() != kGroupBytes || out.size() != kGroupBytes)
        throw std::invalid_argument("bit scrambling expects 512-byte groups");
    if (table.size() != kGroupBits)
        throw std::invalid_argument("bit table must have 4096 entries");
}

void check_frame(std::span<const std::uint8_t> frame, const PermutationTable& table) {
    if (frame.size() != kFrameBytes)
        throw std::invalid_argument("frame must be 16384 bytes");
    if (table.size() != kFrameBytes)
        throw std::invalid_argument("byte table must have 16384 entries");
}

}  // namespace

void scramble_bits(std::span<const std::uint8_t> in, std::span<std::uint8_t> out,
                   const PermutationTable& table) {
    check_group(in, out, table);
    for (std::size_t i = 0; i < kGroupBytes; ++i) {
        const std::uint8_t b = in[i];
        for (std::size_t j = 0; j < 8; ++j) {
            const std::uint16_t e = table[i * 8 + j];
            out[e >> 3] |= static_cast<std::uint8_t>(((b >> j) & 1u) << (e & 7u));
        }
    }
}

void unscramble_bits(std::span<const std::uint8_t> in, std::span<std::uint8_t> out,
                     const PermutationTable& table) {
    check_group(in, out, table);
    for (std::size_t i = 0; i < kGroupBytes; ++i) {
        std::uint8_t b = 0;
        for (std::size_t j = 0; j < 8; ++j) {
            const std::uint16_t e = table[i * 8 + j];
            b |= static_cast<std::uint8_t>(((in[e >> 3] >> (e & 7u)) & 1u) << j);
        }
        out[i] = b;
    }
}

std::vector<std::uint8_t> scramble_bits(std::span<const std::uint8_t> group,
                                        const PermutationTable& table) {
    std::vector<std::uint8_t> out(kGroupBytes, 0);
    scramble_bits(group, out, table);
    return out;
}

std::vector<std::uint8_t> unscramble_bits(std::span<const std::uint8_t> group,
                                          const PermutationTable& table) {
    std::vector<std::uint8_t> out(kGroupBytes, 0);
    unscramble_bits(group, out, table);
    return out;
}

std::vector<std::uint8_t> scramble_bytes(std::span<const std::uint8_t> frame,
                                         const PermutationTable& table) {
    check_frame(frame, table);
    std::vector<std::uint8_t> out(kFrameBytes);
    for (std::size_t s = 0; s < kFrameBytes; ++s) out[table[s]] = frame[s];
    return out;
}

std::vector<std::uint8_t> unscramble_bytes(std::span<const std::uint8_t> frame,
                                           const PermutationTable& table) {
    check_frame(frame, table);
    std::vector<std::uint8_t> out(kFrameBytes);
    for (std::size_t s = 0; s < kFrameBytes; ++s) out[s] = frame[table[s]];
    return out;
}

std::vector<std::uint8_t> permute_frame(std::span<const std::uint8_t> frame,
                                        const PermutationTable& bit_table,
                                        const PermutationTable& byte_table) {
    check_frame(frame, byte_table);
    std::vector<std::uint8_t> scrambled(kFrameBytes, 0);
    for (std::size_t g = 0; g < kGroupCount; ++g)
        scramble_bits(frame.subspan(g * kGroupBytes, kGroupBytes),
                      std::span<std::uint8_t>(scrambled).subspan(g * kGroupBytes, kGroupBytes),
                      bit_table);
    return scramble_bytes(scrambled, byte_table);
}

std::vector<std::uint8_t> unpermute_frame(std::span<const std::uint8_t> frame,
                                          const PermutationTable& bit_table,
                                          const PermutationTable& byte_table) {
    std::vector<std::uint8_t> unscrambled = unscramble_bytes(frame, byte_table);
    std::vector<std::uint8_t> out(kFrameBytes, 0);
    for (std::size_t g = 0; g < kGroupCount; ++g)
        unscramble_bits(std::span<const std::uint8_t>(unscrambled).subspan(g * kGroupBytes, kGroupBytes),
                        std::span<std::uint8_t>(out).subspan(g * kGroupBytes, kGroupBytes),
                        bit_table);
    return out;
}

}  // namespace voxcast
