#ifndef VOXCAST_KEYS_HPP
#define VOXCAST_KEYS_HPP

// The three stage keys of the cascade and their JSON (de)serialization.
// Doubles are stored with full round-trip precision.

#include <cstdint>
#include <optional>
#include <string>

#include "voxcast/chaos_map.hpp"
#include "voxcast/stream_cipher.hpp"

namespace voxcast {

struct ScramblerKey {
    FactorOrder order;
    PriorityPermutation alpha;

    PermutationTable make_table() const;
};

struct KeyBundle {
    ScramblerKey bit_scrambler;   // n=6, 4096-entry table
    ScramblerKey byte_scrambler;  // n=7, 16384-entry table
    StreamCipherKey stream;

    // Canonical factor orders, identity alpha, the reference system,
    // eps=3e8, sigma=2e5, M=5, x0=(0.1, 0.1, 0.1).
    static KeyBundle reference();
};

// Random key: shuffled factor orders, random alpha, random x0 in [0,1)^3.
// The coefficient matrix stays the validated reference one unless the caller
// replaces it (see validate_key).  Deterministic for a given seed.
KeyBundle keygen(std::optional<std::uint64_t> seed);

// Throws std::invalid_argument on structural problems or a coefficient
// matrix with spectral radius >= 1.
void validate_key(const KeyBundle& key);

std::string key_to_json(const KeyBundle& key);
KeyBundle key_from_json(const std::string& text);

void save_key(const std::string& path, const KeyBundle& key);
KeyBundle load_key(const std::string& path);

}  // namespace voxcast

#endif
