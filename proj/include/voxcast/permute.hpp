#ifndef VOXCAST_PERMUTE_HPP
#define VOXCAST_PERMUTE_HPP

// First two encryption levels: bit-position scrambling inside 512-byte
// groups (4096 bit slots, n=6 table) and byte-position scrambling across
// the 16384-byte frame (n=7 table).

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "voxcast/chaos_map.hpp"

namespace voxcast {

inline constexpr std::size_t kFrameBytes = 16384;
inline constexpr std::size_t kGroupBytes = 512;
inline constexpr std::size_t kGroupCount = kFrameBytes / kGroupBytes;
inline constexpr std::size_t kGroupBits = kGroupBytes * 8;

// Bit (i,j) of the input, j counted from the LSB, moves to slot
// table[8*i+j] = 8*x+y of the output.
void scramble_bits(std::span<const std::uint8_t> in, std::span<std::uint8_t> out,
                   const PermutationTable& table);
void unscramble_bits(std::span<const std::uint8_t> in, std::span<std::uint8_t> out,
                     const PermutationTable& table);

std::vector<std::uint8_t> scramble_bits(std::span<const std::uint8_t> group,
                                        const PermutationTable& table);
std::vector<std::uint8_t> unscramble_bits(std::span<const std::uint8_t> group,
                                          const PermutationTable& table);

// out[table[s]] = in[s]
std::vector<std::uint8_t> scramble_bytes(std::span<const std::uint8_t> frame,
                                         const PermutationTable& table);
std::vector<std::uint8_t> unscramble_bytes(std::span<const std::uint8_t> frame,
                                           const PermutationTable& table);

// Bit scrambling on each of the 32 groups, then byte scrambling across the
// whole frame; unpermute_frame is the exact inverse composition.
std::vector<std::uint8_t> permute_frame(std::span<const std::uint8_t> frame,
                                        const PermutationTable& bit_table,
                                        const PermutationTable& byte_table);
std::vector<std::uint8_t> unpermute_frame(std::span<const std::uint8_t> frame,
                                          const PermutationTable& bit_table,
                                          const PermutationTable& byte_table);

}  // namespace voxcast

#endif
