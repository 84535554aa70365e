#include "voxcast/wav.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace voxcast {

namespace {

std::uint32_t rd_u32(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t rd_u16(const std::uint8_t* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void wr_u32(std::vector<std::uint8_t>& v, std::uint32_t x) {
    v.push_back(static_cast<std::uint8_t>(x));
    v.push_back(static_cast<std::uint8_t>(x >> 8));
    v.push_back(static_cast<std::uint8_t>(x >> 16));
    v.push_back(static_cast<std::uint8_t>(x >> 24));
}

void wr_u16(std::vector<std::uint8_t>& v, std::uint16_t x) {
    v.push_back(static_cast<std::uint8_t>(x));
    v.push_back(static_cast<std::uint8_t>(x >> 8));
}

}  // namespace

WavData read_wav(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::vector<std::uint8_t> raw((std::istreambuf_iterator<char>(f)),
                                  std::istreambuf_iterator<char>());
    if (raw.size() < 44 || std::memcmp(raw.data(), "RIFF", 4) != 0 ||
        std::memcmp(raw.data() + 8, "WAVE", 4) != 0)
        throw std::runtime_error(path + ": not a RIFF/WAVE file");

    WavData wav;
    bool have_fmt = false;
    std::size_t pos = 12;
    while (pos + 8 <= raw.size()) {
        const std::uint32_t chunk_size = rd_u32(raw.data() + pos + 4);
        const std::size_t body = pos + 8;
        if (body + chunk_size > raw.size())
            throw std::runtime_error(path + ": truncated chunk");

        if (std::memcmp(raw.data() + pos, "fmt ", 4) == 0) {
            if (chunk_size < 16) throw std::runtime_error(path + ": short fmt chunk");
            const std::uint16_t format = rd_u16(raw.data() + body);
            const std::uint16_t channels = rd_u16(raw.data() + body + 2);
            const std::uint16_t bits = rd_u16(raw.data() + body + 14);
            if (format != 1 || bits != 16)
                throw std::runtime_error(path + ": only 16-bit PCM is supported");
            if (channels != 1)
                throw std::runtime_error(path + ": only mono is supported");
            wav.sample_rate = rd_u32(raw.data() + body + 4);
            have_fmt = true;
        } else if (std::memcmp(raw.data() + pos, "data", 4) == 0) {
            if (!have_fmt) throw std::runtime_error(path + ": data chunk before fmt");
            wav.samples.resize(chunk_size / 2);
            for (std::size_t i = 0; i < wav.samples.size(); ++i)
                wav.samples[i] = static_cast<std::int16_t>(rd_u16(raw.data() + body + 2 * i));
            return wav;
        }
        pos = body + chunk_size + (chunk_size & 1);  // chunks are word-aligned
    }
    throw std::runtime_error(path + ": no data chunk");
}

void write_wav(const std::string& path, std::span<const std::int16_t> samples,
               std::uint32_t sample_rate) {
    const std::uint32_t data_bytes = static_cast<std::uint32_t>(samples.size() * 2);
    std::vector<std::uint8_t> out;
    out.reserve(44 + data_bytes);
    out.insert(out.end(), {'R', 'I', 'F', 'F'});
    wr_u32(out, 36 + data_bytes);
    out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
    wr_u32(out, 16);
    wr_u16(out, 1);   // PCM
    wr_u16(out, 1);   // mono
    wr_u32(out, sample_rate);
    wr_u32(out, sample_rate * 2);  // byte rate
    wr_u16(out, 2);   // block align
    wr_u16(out, 16);  // bits per sample
    out.insert(out.end(), {'d', 'a', 't', 'a'});
    wr_u32(out, data_bytes);
    for (std::int16_t s : samples) wr_u16(out, static_cast<std::uint16_t>(s));

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + path);
    f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
    if (!f) throw std::runtime_error("write failed: " + path);
}

std::vector<std::int16_t> read_pcm_s16le(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::vector<std::uint8_t> raw((std::istreambuf_iterator<char>(f)),
                                  std::istreambuf_iterator<char>());
    std::vector<std::int16_t> samples(raw.size() / 2);
    for (std::size_t i = 0; i < samples.size(); ++i)
        samples[i] = static_cast<std::int16_t>(rd_u16(raw.data() + 2 * i));
    return samples;
}

void write_pcm_s16le(const std::string& path, std::span<const std::int16_t> samples) {
    std::vector<std::uint8_t> out;
    out.reserve(samples.size() * 2);
    for (std::int16_t s : samples) wr_u16(out, static_cast<std::uint16_t>(s));
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + path);
    f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
    if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace voxcast
