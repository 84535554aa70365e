#ifndef VOXCAST_STREAM_CIPHER_HPP
#define VOXCAST_STREAM_CIPHER_HPP

// Third encryption level: a 3-D linear system chaotified by a bounded sine
// controller, driving a self-synchronizing byte stream cipher.
//
// Each step emits p(k) = mod(floor(x1), 256) XOR s(k) and feeds p(k) back
// into the second and third state equations (and the controller), so the
// receiver, driven by the received p(k), resynchronizes on its own.  A frame
// is encrypted in M rounds; the state carries across the rounds of a frame
// and resets to the keyed x0 at every frame boundary, which keeps frames
// independently decryptable after packet loss.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace voxcast {

struct ChaoticSystem {
    std::array<std::array<double, 3>, 3> a{};  // coefficient matrix
    double epsilon = 0.0;                      // controller gain
    double sigma = 0.0;                        // controller frequency

    // spectral radius of a (must be < 1 for a usable cipher system)
    double spectral_radius() const;
    // spectral radius of the lower-right 2x2 block; < 1 is the
    // self-synchronization condition and bounds the resync transient
    double sync_block_radius() const;
};

// The reference coefficient set (matches the default key bundle).
ChaoticSystem reference_system();

struct CipherState {
    double x1 = 0.0, x2 = 0.0, x3 = 0.0;

    bool finite() const;
    bool operator==(const CipherState&) const = default;
};

struct StreamCipherKey {
    ChaoticSystem system;
    int rounds = 5;             // M, capped at kMaxRounds
    CipherState x0{0.1, 0.1, 0.1};
};

// Every backward pass of multi-round decryption costs one resync transient
// (a few hundred bytes at the reference contraction rate), so the transients
// of all rounds must fit well inside one frame.
inline constexpr int kMaxRounds = 16;
inline constexpr std::size_t kMinMultiRoundBytes = 16384;

// mod(floor(x1), 256), Euclidean (always in [0,256)).  Throws on non-finite
// or |x1| >= 2^63.
std::uint8_t keystream_byte(const CipherState& state);

// One cipher stream direction.  Owns no data beyond the system constants and
// the precomputed controller values eps*sin(sigma*p) for the 256 byte drives.
class CipherSession {
public:
    explicit CipherSession(const ChaoticSystem& sys);

    CipherState step(const CipherState& s, std::uint8_t p) const;

    // One encryption round: out[k] = keystream XOR in[k], state driven by out.
    std::vector<std::uint8_t> encrypt_round(std::span<const std::uint8_t> plain,
                                            CipherState& state) const;
    // One decryption round: out[k] = keystream XOR in[k], state driven by in.
    std::vector<std::uint8_t> decrypt_round(std::span<const std::uint8_t> cipher,
                                            CipherState& state) const;

    // Advance the state through a drive sequence without producing output.
    CipherState advance(CipherState state, std::span<const std::uint8_t> drive) const;

    // Raw keystream with zero plaintext (p(k) == keystream byte), continuous state.
    std::vector<std::uint8_t> keystream(std::size_t nbytes, CipherState& state) const;

private:
    ChaoticSystem sys_;
    std::array<double, 256> ctrl_;  // eps*sin(sigma*p)
};

// M rounds over one frame, state carried across rounds, reset to key.x0 at
// the frame boundary.
std::vector<std::uint8_t> encrypt_frame(std::span<const std::uint8_t> frame,
                                        const StreamCipherKey& key);

// Exact inverse of encrypt_frame.  For M >= 2 the sender's round-start
// states are not known up front; a first backward sweep from x0 recovers
// each round output up to a short self-synchronization prefix, the state
// chain is then rebuilt forward (contraction makes the round-end states
// exact), and a second sweep decrypts every byte exactly.
std::vector<std::uint8_t> decrypt_frame(std::span<const std::uint8_t> cipher,
                                        const StreamCipherKey& key);

// Steady-state error coefficients (dx1, dx2, dx3) per unit drive for a
// parameter mismatch in row `row` (0-based) of the coefficient matrix.
// Throws std::runtime_error if the steady-state system is singular.
std::array<double, 3> error_dynamics_steady_state(
    const std::array<std::array<double, 3>, 3>& a, int row, double drive = 1.0);

}  // namespace voxcast

#endif
