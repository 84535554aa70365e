#include "voxcast/pipeline.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

#include "voxcast/stream_cipher.hpp"
#include "voxcast/wav.hpp"

namespace voxcast {

Encryptor::Encryptor(const KeyBundle& key)
    : key_(key),
      bit_table_(key.bit_scrambler.make_table()),
      byte_table_(key.byte_scrambler.make_table()) {
    validate_key(key);
}

std::vector<std::uint8_t> Encryptor::compress_block_bytes(
    std::span<const std::int16_t> samples) const {
    CodecState codec;  // block-independent coding
    return compress_block(samples, codec);
}

std::vector<std::uint8_t> Encryptor::encrypt_block(std::span<const std::int16_t> samples) const {
    const std::vector<std::uint8_t> compressed = compress_block_bytes(samples);
    const std::vector<std::uint8_t> permuted = permute_frame(compressed, bit_table_, byte_table_);
    return encrypt_frame(permuted, key_.stream);
}

Decryptor::Decryptor(const KeyBundle& key)
    : key_(key),
      bit_table_inv_(key.bit_scrambler.make_table()),
      byte_table_inv_(key.byte_scrambler.make_table()) {
    validate_key(key);
}

std::vector<std::uint8_t> Decryptor::decrypt_block_bytes(
    std::span<const std::uint8_t> cipher) const {
    const std::vector<std::uint8_t> permuted = decrypt_frame(cipher, key_.stream);
    return unpermute_frame(permuted, bit_table_inv_, byte_table_inv_);
}

std::vector<std::int16_t> Decryptor::decrypt_block(std::span<const std::uint8_t> cipher) const {
    const std::vector<std::uint8_t> compressed = decrypt_block_bytes(cipher);
    CodecState codec;
    return decompress_frame(compressed, codec);
}

std::vector<std::vector<std::uint8_t>> encrypt_pcm(std::span<const std::int16_t> samples,
                                                   const KeyBundle& key) {
    Encryptor enc(key);
    std::vector<std::vector<std::uint8_t>> frames;
    std::vector<std::int16_t> block(kBlockSamples);
    for (std::size_t off = 0; off < samples.size(); off += kBlockSamples) {
        const std::size_t n = std::min(kBlockSamples, samples.size() - off);
        std::copy_n(samples.begin() + static_cast<std::ptrdiff_t>(off), n, block.begin());
        std::fill(block.begin() + static_cast<std::ptrdiff_t>(n), block.end(), std::int16_t{0});
        frames.push_back(enc.encrypt_block(block));
    }
    return frames;
}

namespace {

constexpr std::array<std::uint8_t, 4> kFileMagic = {'V', 'X', 'C', 'S'};

void put_u32(std::ostream& os, std::uint32_t x) {
    const std::uint8_t b[4] = {static_cast<std::uint8_t>(x >> 24), static_cast<std::uint8_t>(x >> 16),
                               static_cast<std::uint8_t>(x >> 8), static_cast<std::uint8_t>(x)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& os, std::uint64_t x) {
    put_u32(os, static_cast<std::uint32_t>(x >> 32));
    put_u32(os, static_cast<std::uint32_t>(x));
}

std::uint32_t take_u32(std::istream& is) {
    std::uint8_t b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    return (static_cast<std::uint32_t>(b[0]) << 24) | (static_cast<std::uint32_t>(b[1]) << 16) |
           (static_cast<std::uint32_t>(b[2]) << 8) | static_cast<std::uint32_t>(b[3]);
}

std::uint64_t take_u64(std::istream& is) {
    const std::uint64_t hi = take_u32(is);
    return (hi << 32) | take_u32(is);
}

}  // namespace

void write_cipher_file(const std::string& path,
                       const std::vector<std::vector<std::uint8_t>>& frames,
                       std::uint64_t sample_count, std::uint32_t sample_rate,
                       std::uint8_t rounds) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + path);
    f.write(reinterpret_cast<const char*>(kFileMagic.data()), 4);
    f.put(1);  // version
    f.put(static_cast<char>(rounds));
    put_u32(f, static_cast<std::uint32_t>(frames.size()));
    put_u64(f, sample_count);
    put_u32(f, sample_rate);
    for (const auto& frame : frames) {
        if (frame.size() != kFrameBytes)
            throw std::invalid_argument("frames must be 16384 bytes");
        f.write(reinterpret_cast<const char*>(frame.data()),
                static_cast<std::streamsize>(frame.size()));
    }
    if (!f) throw std::runtime_error("write failed: " + path);
}

CipherFile read_cipher_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::array<std::uint8_t, 4> magic{};
    f.read(reinterpret_cast<char*>(magic.data()), 4);
    if (!f || magic != kFileMagic) throw std::runtime_error(path + ": not a cipher stream file");
    const int version = f.get();
    if (version != 1) throw std::runtime_error(path + ": unsupported version");
    CipherFile cf;
    cf.rounds = static_cast<std::uint8_t>(f.get());
    const std::uint32_t count = take_u32(f);
    cf.sample_count = take_u64(f);
    cf.sample_rate = take_u32(f);
    cf.frames.resize(count);
    for (auto& frame : cf.frames) {
        frame.resize(kFrameBytes);
        f.read(reinterpret_cast<char*>(frame.data()), static_cast<std::streamsize>(kFrameBytes));
    }
    if (!f) throw std::runtime_error(path + ": truncated");
    return cf;
}

void encrypt_file(const std::string& wav_in, const KeyBundle& key, const std::string& out) {
    const WavData wav = read_wav(wav_in);
    const auto frames = encrypt_pcm(wav.samples, key);
    write_cipher_file(out, frames, wav.samples.size(), wav.sample_rate,
                      static_cast<std::uint8_t>(key.stream.rounds));
}

void decrypt_file(const std::string& in, const KeyBundle& key, const std::string& wav_out) {
    const CipherFile cf = read_cipher_file(in);
    Decryptor dec(key);
    std::vector<std::int16_t> samples;
    samples.reserve(cf.frames.size() * kBlockSamples);
    for (const auto& frame : cf.frames) {
        const std::vector<std::int16_t> block = dec.decrypt_block(frame);
        samples.insert(samples.end(), block.begin(), block.end());
    }
    if (cf.sample_count < samples.size())
        samples.resize(cf.sample_count);  // drop the block padding
    write_wav(wav_out, samples, cf.sample_rate);
}

}  // namespace voxcast
