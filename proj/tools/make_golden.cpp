// Regenerates the golden files under tests/data/:
//   golden_keystream.bin   512 keystream bytes of the reference key
//   permute_in.bin         one random frame
//   permute_out.bin        its permuted image under the reference tables
// Run only when the cipher or permutation definition changes on purpose.

#include <cstdio>
#include <fstream>
#include <random>
#include <string>

#include "voxcast/keys.hpp"
#include "voxcast/permute.hpp"
#include "voxcast/stream_cipher.hpp"

namespace {

void dump(const std::string& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!f) {
        std::fprintf(stderr, "write failed: %s\n", path.c_str());
        std::exit(1);
    }
    std::fprintf(stderr, "wrote %zu bytes to %s\n", bytes.size(), path.c_str());
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::fprintf(stderr, "usage: make_golden <tests/data directory>\n");
        return 2;
    }
    const std::string dir = argv[1];

    voxcast::CipherSession session(voxcast::reference_system());
    voxcast::CipherState st{0.1, 0.1, 0.1};
    dump(dir + "/golden_keystream.bin", session.keystream(512, st));

    std::mt19937_64 rng(20240615);
    std::uniform_int_distribution<int> d(0, 255);
    std::vector<std::uint8_t> frame(voxcast::kFrameBytes);
    for (auto& b : frame) b = static_cast<std::uint8_t>(d(rng));
    const voxcast::KeyBundle key = voxcast::KeyBundle::reference();
    const auto out = voxcast::permute_frame(frame, key.bit_scrambler.make_table(),
                                            key.byte_scrambler.make_table());
    dump(dir + "/permute_in.bin", frame);
    dump(dir + "/permute_out.bin", out);
    return 0;
}
