#ifndef VOXCAST_WAV_HPP
#define VOXCAST_WAV_HPP

// Minimal RIFF/WAVE reader and writer for 16-bit PCM mono.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace voxcast {

struct WavData {
    std::uint32_t sample_rate = 8000;
    std::vector<std::int16_t> samples;
};

// Throws std::runtime_error on malformed files or unsupported formats
// (anything other than uncompressed 16-bit mono PCM).
WavData read_wav(const std::string& path);

void write_wav(const std::string& path, std::span<const std::int16_t> samples,
               std::uint32_t sample_rate);

// Headerless s16le, for raw capture dumps and test vectors.
std::vector<std::int16_t> read_pcm_s16le(const std::string& path);
void write_pcm_s16le(const std::string& path, std::span<const std::int16_t> samples);

}  // namespace voxcast

#endif
