#ifndef VOXCAST_PIPELINE_HPP
#define VOXCAST_PIPELINE_HPP

// Full chain: IMA-ADPCM compression, the two permutation levels, and the
// multi-round stream cipher.  One Encryptor/Decryptor per stream direction.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "voxcast/adpcm.hpp"
#include "voxcast/chaos_map.hpp"
#include "voxcast/keys.hpp"
#include "voxcast/permute.hpp"

namespace voxcast {

class Encryptor {
public:
    explicit Encryptor(const KeyBundle& key);

    // 32768 samples -> 16384 cipher bytes (codec state is block-independent).
    std::vector<std::uint8_t> encrypt_block(std::span<const std::int16_t> samples) const;

    // compress only (the codec half, for A/B comparisons)
    std::vector<std::uint8_t> compress_block_bytes(std::span<const std::int16_t> samples) const;

private:
    KeyBundle key_;
    PermutationTable bit_table_;
    PermutationTable byte_table_;
};

class Decryptor {
public:
    explicit Decryptor(const KeyBundle& key);

    std::vector<std::int16_t> decrypt_block(std::span<const std::uint8_t> cipher) const;
    // stop before the codec (compressed-byte level)
    std::vector<std::uint8_t> decrypt_block_bytes(std::span<const std::uint8_t> cipher) const;

private:
    KeyBundle key_;
    PermutationTable bit_table_inv_;
    PermutationTable byte_table_inv_;
};

// Pads the tail block with zeros; returns one 16384-byte cipher frame per
// 32768-sample block.
std::vector<std::vector<std::uint8_t>> encrypt_pcm(std::span<const std::int16_t> samples,
                                                   const KeyBundle& key);

// Encrypted-stream container: "VXCS" | version u8 | rounds u8 |
// frame_count u32 | sample_count u64 | sample_rate u32 | frames...
// (integers big-endian).
void write_cipher_file(const std::string& path,
                       const std::vector<std::vector<std::uint8_t>>& frames,
                       std::uint64_t sample_count, std::uint32_t sample_rate,
                       std::uint8_t rounds);

struct CipherFile {
    std::uint8_t rounds = 0;
    std::uint64_t sample_count = 0;
    std::uint32_t sample_rate = 8000;
    std::vector<std::vector<std::uint8_t>> frames;
};

CipherFile read_cipher_file(const std::string& path);

// WAV -> compress/permute/encrypt -> container file.
void encrypt_file(const std::string& wav_in, const KeyBundle& key, const std::string& out);
// Container file -> decrypt/unpermute/decompress -> WAV.
void decrypt_file(const std::string& in, const KeyBundle& key, const std::string& wav_out);

}  // namespace voxcast

#endif
