#ifndef VOXCAST_ADPCM_HPP
#define VOXCAST_ADPCM_HPP

// IMA-ADPCM: 16-bit PCM <-> 4-bit codes, 4:1.  One block of 32768 samples
// compresses to one 16384-byte frame; nibble 2k sits in the low 4 bits of
// byte k, nibble 2k+1 in the high 4 bits.  Codec state resets per block so
// frames decode independently.

#include <cstdint>
#include <span>
#include <vector>

namespace voxcast {

inline constexpr std::size_t kBlockSamples = 32768;

struct CodecState {
    std::int16_t predictor = 0;
    std::int32_t step_index = 0;  // clamped to [0, 88]

    bool operator==(const CodecState&) const = default;
};

std::uint8_t encode_sample(std::int16_t sample, CodecState& state);
std::int16_t decode_sample(std::uint8_t code, CodecState& state);

// samples.size() must be kBlockSamples; returns 16384 packed bytes.
std::vector<std::uint8_t> compress_block(std::span<const std::int16_t> samples,
                                         CodecState& state);

// frame.size() must be 16384; returns 32768 samples.
std::vector<std::int16_t> decompress_frame(std::span<const std::uint8_t> frame,
                                           CodecState& state);

}  // namespace voxcast

#endif
