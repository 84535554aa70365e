#ifndef VOXCAST_ANALYSIS_HPP
#define VOXCAST_ANALYSIS_HPP

// Security measurements: Lyapunov spectra, an SP 800-22 subset, byte
// histograms, NPCR/UACI differentials, parameter-sensitivity thresholds,
// and key-space arithmetic.

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "voxcast/stream_cipher.hpp"

namespace voxcast {

// --- special functions -----------------------------------------------------

// Regularized upper incomplete gamma Q(a, x) (series + continued fraction).
double igamc(double a, double x);
// Standard normal CDF.
double normal_cdf(double x);

// --- Lyapunov spectrum ------------------------------------------------------

struct LyapunovResult {
    std::array<double, 3> exponents{};  // descending, nats per iteration
    double h_ks = 0.0;                  // sum of positive exponents
};

// QR-reorthonormalized tangent-space average over the free-running system
// x(k+1) = A x(k) + (0, 0, eps*sin(sigma*x1)); the Jacobian adds
// eps*sigma*cos(sigma*x1) at entry (3,1).
LyapunovResult lyapunov_spectrum(const ChaoticSystem& sys, int iterations,
                                 int discard = 1000,
                                 CipherState x0 = {0.1, 0.1, 0.1});

// --- SP 800-22 subset -------------------------------------------------------

using BitSeq = std::vector<std::uint8_t>;  // one bit per element

BitSeq unpack_bits(std::span<const std::uint8_t> bytes);  // MSB first

double frequency_test(const BitSeq& bits);
double block_frequency_test(const BitSeq& bits, std::size_t block_len);
double runs_test(const BitSeq& bits);
double cumulative_sums_test(const BitSeq& bits, bool forward);
double longest_run_test(const BitSeq& bits);  // needs >= 128 bits

struct StatTestReport {
    struct Entry {
        std::string name;
        double p_value;
        bool pass;  // P >= 0.0001
    };
    std::vector<Entry> tests;
    bool all_pass = false;
};

// Runs the five implemented tests (cumulative sums forward and backward
// both reported) on one sequence.
StatTestReport stat_tests(const BitSeq& bits);

// --- differential metrics ---------------------------------------------------

struct DiffReport {
    double npcr = 0.0;  // percent
    double uaci = 0.0;  // percent
    std::size_t count = 0;
};

DiffReport npcr_uaci(std::span<const std::uint8_t> c, std::span<const std::uint8_t> c2);

// Average single-byte-perturbation NPCR/UACI over `positions` evenly spaced
// plaintext positions (the perturbation XORs the byte with 0x01).
DiffReport average_npcr_uaci(const StreamCipherKey& key,
                             std::span<const std::uint8_t> frame,
                             std::size_t positions);

// --- parameter sensitivity ---------------------------------------------------

struct SensitivityResult {
    std::array<std::array<double, 3>, 3> threshold{};  // smallest failing |da|
    std::array<std::array<int, 3>, 3> decade{};        // log10 of the above
};

// For every a_ij, the smallest decade 10^d (d in [decade_min, decade_max])
// at which decryption with the perturbed receiver matrix garbles more than
// fail_fraction of the frame.  Entries that never fail report decade_max+1.
SensitivityResult sensitivity_scan(const StreamCipherKey& key,
                                   std::span<const std::uint8_t> frame,
                                   int decade_min = -14, int decade_max = 2,
                                   double fail_fraction = 0.5);

// --- key space ----------------------------------------------------------------

struct KeySpace {
    double scrambler_bits = 0.0;   // ((n_bit choose 2))! * n_bit!
    double scrambler_bytes = 0.0;  // ((n_byte choose 2))! * n_byte!
    double stream = 0.0;           // prod |a_ij| / |da_ij|
    double total = 0.0;
};

KeySpace key_space(int n_bit, int n_byte,
                   const std::array<std::array<double, 3>, 3>& sensitivity,
                   const std::array<std::array<double, 3>, 3>& a);

// --- histogram -----------------------------------------------------------------

struct Histogram {
    std::array<std::uint64_t, 256> counts{};
    double chi_square = 0.0;  // against uniform
    double p_value = 0.0;     // igamc(255/2, chi2/2)
};

Histogram histogram(std::span<const std::uint8_t> data);

}  // namespace voxcast

#endif
