#include "voxcast/adpcm.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

namespace voxcast {

namespace {

constexpr std::array<std::int32_t, 89> kStepTable = {
    7,     8,     9,     10,    11,    12,    13,    14,    16,    17,
    19,    21,    23,    25,    28,    31,    34,    37,    41,    45,
    50,    55,    60,    66,    73,    80,    88,    97,    107,   118,
    130,   143,   157,   173,   190,   209,   230,   253,   279,   307,
    337,   371,   408,   449,   494,   544,   598,   658,   724,   796,
    876,   963,   1060,  1166,  1282,  1411,  1552,  1707,  1878,  2066,
    2272,  2499,  2749,  3024,  3327,  3660,  4026,  4428,  4871,  5358,
    5894,  6484,  7132,  7845,  8630,  9493,  10442, 11487, 12635, 13899,
    15289, 16818, 18500, 20350, 22385, 24623, 27086, 29794, 32767};

constexpr std::array<std::int32_t, 8> kIndexTable = {-1, -1, -1, -1, 2, 4, 6, 8};

std::int32_t clamp16(std::int32_t v) {
    return std::clamp(v, -32768, 32767);
}

}  // namespace

std::uint8_t encode_sample(std::int16_t sample, CodecState& state) {
    const std::int32_t step = kStepTable[static_cast<std::size_t>(state.step_index)];
    std::int32_t delta = sample - state.predictor;

    std::uint8_t code = 0;
    if (delta < 0) {
        code = 8;
        delta = -delta;
    }
    std::int32_t diff = step >> 3;
    if (delta >= step) {
        code |= 4;
        delta -= step;
        diff += step;
    }
    if (delta >= (step >> 1)) {
        code |= 2;
        delta -= step >> 1;
        diff += step >> 1;
    }
    if (delta >= (step >> 2)) {
        code |= 1;
        diff += step >> 2;
    }

    state.predictor = static_cast<std::int16_t>(
        clamp16(state.predictor + ((code & 8) ? -diff : diff)));
    state.step_index = std::clamp(state.step_index + kIndexTable[code & 7], 0, 88);
    return code;
}

std::int16_t decode_sample(std::uint8_t code, CodecState& state) {
    const std::int32_t step = kStepTable[static_cast<std::size_t>(state.step_index)];
    std::int32_t diff = step >> 3;
    if (code & 4) diff += step;
    if (code & 2) diff += step >> 1;
    if (code & 1) diff += step >> 2;

    state.predictor = static_cast<std::int16_t>(
        clamp16(state.predictor + ((code & 8) ? -diff : diff)));
    state.step_index = std::clamp(state.step_index + kIndexTable[code & 7], 0, 88);
    return state.predictor;
}

std::vector<std::uint8_t> compress_block(std::span<const std::int16_t> samples,
                                         CodecState& state) {
    if (samples.size() != kBlockSamples)
        throw std::invalid_argument("block must hold 32768 samples");
    std::vector<std::uint8_t> out(kBlockSamples / 2);
    for (std::size_t k = 0; k < out.size(); ++k) {
        const std::uint8_t lo = encode_sample(samples[2 * k], state);
        const std::uint8_t hi = encode_sample(samples[2 * k + 1], state);
        out[k] = static_cast<std::uint8_t>(lo | (hi << 4));
    }
    return out;
}

std::vector<std::int16_t> decompress_frame(std::span<const std::uint8_t> frame,
                                           CodecState& state) {
    if (frame.size() != kBlockSamples / 2)
        throw std::invalid_argument("frame must be 16384 bytes");
    std::vector<std::int16_t> out(kBlockSamples);
    for (std::size_t k = 0; k < frame.size(); ++k) {
        out[2 * k] = decode_sample(frame[k] & 0x0F, state);
        out[2 * k + 1] = decode_sample(frame[k] >> 4, state);
    }
    return out;
}

}  // namespace voxcast
