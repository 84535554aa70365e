// Acceptance suite: one checked criterion per section, one PASS/FAIL line
// each, nonzero exit if anything fails.  Runs everything on the reference
// key; every tolerance is pinned here in code.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <unistd.h>

#include "voxcast/adpcm.hpp"
#include "voxcast/analysis.hpp"
#include "voxcast/chaos_map.hpp"
#include "voxcast/keys.hpp"
#include "voxcast/permute.hpp"
#include "voxcast/pipeline.hpp"
#include "voxcast/stream_cipher.hpp"
#include "voxcast/transport.hpp"

using namespace voxcast;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int index, const std::string& name, bool pass, const std::string& detail,
            double seconds) {
    std::printf("[%s] %2d. %-28s %s (%.2fs)\n", pass ? "PASS" : "FAIL", index, name.c_str(),
                detail.c_str(), seconds);
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

void run(int index, const std::string& name, const std::function<std::pair<bool, std::string>()>& fn) {
    const auto t0 = Clock::now();
    bool pass = false;
    std::string detail;
    try {
        std::tie(pass, detail) = fn();
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    const double dt = std::chrono::duration<double>(Clock::now() - t0).count();
    report(index, name, pass, detail, dt);
}

std::vector<std::uint8_t> random_frame(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> d(0, 255);
    std::vector<std::uint8_t> v(n);
    for (auto& b : v) b = static_cast<std::uint8_t>(d(rng));
    return v;
}

FactorOrder swapped(int n, std::pair<int, int> a, std::pair<int, int> b) {
    FactorOrder o = FactorOrder::canonical(n);
    std::iter_swap(std::find(o.pairs.begin(), o.pairs.end(), a),
                   std::find(o.pairs.begin(), o.pairs.end(), b));
    return o;
}

char buf_out[512];

std::string fmt(const char* f, ...) {
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf_out, sizeof buf_out, f, ap);
    va_end(ap);
    return buf_out;
}

// ---- criteria ---------------------------------------------------------------

std::pair<bool, std::string> matrix_golden_vectors() {
    static const std::int64_t m6[6][6] = {
        {1, 5, 18, 52, 121, 197}, {1, 6, 22, 64, 149, 242}, {1, 5, 19, 55, 128, 208},
        {1, 4, 13, 38, 88, 144},  {1, 3, 8, 20, 48, 80},    {1, 2, 4, 8, 16, 32}};
    static const std::int64_t m6s[6][6] = {
        {5, 9, 11, 29, 68, 113},    {1, 2, 3, 8, 19, 31},  {11, 20, 24, 65, 152, 252},
        {16, 29, 33, 91, 212, 352}, {4, 7, 8, 20, 48, 80}, {3, 5, 4, 8, 16, 32}};
    static const std::int64_t m7[7][7] = {
        {1, 6, 25, 84, 237, 550, 903}, {1, 7, 30, 102, 289, 671, 1100},
        {1, 6, 26, 88, 249, 578, 948}, {1, 5, 19, 63, 176, 408, 672},
        {1, 4, 13, 38, 104, 240, 400}, {1, 3, 8, 20, 48, 112, 192},
        {1, 2, 4, 8, 16, 32, 64}};
    static const std::int64_t m7s[7][7] = {
        {6, 11, 20, 53, 138, 322, 539},    {1, 2, 5, 14, 37, 87, 144},
        {7, 13, 26, 70, 183, 428, 714},    {11, 20, 32, 81, 212, 492, 828},
        {16, 29, 45, 111, 292, 676, 1140}, {4, 7, 8, 20, 48, 112, 192},
        {3, 5, 4, 8, 16, 32, 64}};

    const auto a6 = build_transform_matrix(FactorOrder::canonical(6));
    const auto a6s = build_transform_matrix(swapped(6, {1, 2}, {3, 4}));
    const auto a7 = build_transform_matrix(FactorOrder::canonical(7));
    const auto a7s = build_transform_matrix(swapped(7, {1, 2}, {4, 5}));

    for (int r = 0; r < 6; ++r)
        for (int c = 0; c < 6; ++c)
            if (a6.at(r, c) != m6[r][c] || a6s.at(r, c) != m6s[r][c])
                return {false, fmt("6x6 mismatch at (%d,%d)", r, c)};
    for (int r = 0; r < 7; ++r)
        for (int c = 0; c < 7; ++c)
            if (a7.at(r, c) != m7[r][c] || a7s.at(r, c) != m7s[r][c])
                return {false, fmt("7x7 mismatch at (%d,%d)", r, c)};
    return {true, "canonical 6x6, 7x7 and both swap matrices exact"};
}

std::pair<bool, std::string> worked_table_entries() {
    const auto t6 = generate_table(build_transform_matrix(FactorOrder::canonical(6)), 2,
                                   PriorityPermutation::identity(6));
    const auto t7 = generate_table(build_transform_matrix(FactorOrder::canonical(7)), 2,
                                   PriorityPermutation::identity(7));
    const bool ok = t6[14] == 1792 && t7[100] == 3296;
    return {ok, fmt("table6[14]=%u table7[100]=%u", t6[14], t7[100])};
}

std::pair<bool, std::string> permutation_properties() {
    const auto t6 = generate_table(build_transform_matrix(FactorOrder::canonical(6)), 2,
                                   PriorityPermutation::identity(6));
    const auto t7 = generate_table(build_transform_matrix(FactorOrder::canonical(7)), 2,
                                   PriorityPermutation::identity(7));
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> d(0, 255);
    std::vector<std::uint8_t> frame(kFrameBytes);
    for (int trial = 0; trial < 1000; ++trial) {
        for (auto& b : frame) b = static_cast<std::uint8_t>(d(rng));
        const auto permuted = permute_frame(frame, t6, t7);

        std::array<std::uint32_t, 256> h1{}, h2{};
        std::size_t pop1 = 0, pop2 = 0;
        for (std::uint8_t b : frame) {
            ++h1[b];
            pop1 += static_cast<std::size_t>(__builtin_popcount(b));
        }
        for (std::uint8_t b : permuted) {
            ++h2[b];
            pop2 += static_cast<std::size_t>(__builtin_popcount(b));
        }
        if (pop1 != pop2) return {false, fmt("bit population changed on trial %d", trial)};
        // byte scrambling preserves the histogram; bit scrambling moves bits
        // inside groups, so only the population is invariant for the cascade.
        const auto bytes_only = scramble_bytes(frame, t7);
        std::array<std::uint32_t, 256> h3{};
        for (std::uint8_t b : bytes_only) ++h3[b];
        if (h1 != h3) return {false, fmt("byte histogram changed on trial %d", trial)};

        if (unpermute_frame(permuted, t6, t7) != frame)
            return {false, fmt("roundtrip failed on trial %d", trial)};
    }
    return {true, "1000 random frames: inverse, population and histogram exact"};
}

std::pair<bool, std::string> pipeline_roundtrip() {
    // one minute of a 1 kHz sine at 8 kHz
    const std::size_t n = 480000;
    std::vector<std::int16_t> pcm(n);
    for (std::size_t k = 0; k < n; ++k)
        pcm[k] = static_cast<std::int16_t>(std::lround(
            16383.0 * std::sin(2.0 * std::numbers::pi * 1000.0 * static_cast<double>(k) / 8000.0)));

    const KeyBundle key = KeyBundle::reference();
    Encryptor enc(key);
    Decryptor dec(key);

    std::vector<std::int16_t> block(kBlockSamples);
    double signal = 0.0, noise = 0.0;
    for (std::size_t off = 0; off < n; off += kBlockSamples) {
        const std::size_t len = std::min(kBlockSamples, n - off);
        std::fill(block.begin(), block.end(), std::int16_t{0});
        std::copy_n(pcm.begin() + static_cast<std::ptrdiff_t>(off), len, block.begin());

        const auto compressed = enc.compress_block_bytes(block);
        const auto cipher = enc.encrypt_block(block);
        if (dec.decrypt_block_bytes(cipher) != compressed)
            return {false, "compressed byte stream not reproduced exactly"};

        const auto rec = dec.decrypt_block(cipher);
        for (std::size_t k = 0; k < len; ++k) {
            signal += static_cast<double>(block[k]) * block[k];
            const double e = static_cast<double>(block[k]) - rec[k];
            noise += e * e;
        }
    }
    const double snr = 10.0 * std::log10(signal / noise);
    return {snr >= 20.0, fmt("exact byte roundtrip, codec SNR %.2f dB (>= 20)", snr)};
}

std::pair<bool, std::string> lyapunov_reproduction() {
    ChaoticSystem chaotic = reference_system();  // eps 3e8, sigma 2e5
    const auto hi = lyapunov_spectrum(chaotic, 100000);

    ChaoticSystem tame = reference_system();
    tame.epsilon = 100.0;
    tame.sigma = 0.0667;
    const auto lo = lyapunov_spectrum(tame, 100000);

    const bool chaotic_ok = std::fabs(hi.exponents[0] - 14.84) <= 0.5 &&
                            std::fabs(hi.exponents[1] - 14.81) <= 0.5 &&
                            std::fabs(hi.exponents[2] - 0.19) <= 0.05;
    // the (100, 0.0667) orbit is quasi-periodic: LE1 -> 0^- with O(1/N)
    // estimator noise, so "negative" is asserted at the estimator resolution
    const bool tame_ok = lo.exponents[0] < 1e-3 && lo.exponents[1] < 0.0 && lo.exponents[2] < 0.0;
    return {chaotic_ok && tame_ok,
            fmt("(%.3f, %.3f, %.3f) vs (14.84, 14.81, 0.19); tame (%.1e, %.3f, %.3f) all <= ~0",
                hi.exponents[0], hi.exponents[1], hi.exponents[2], lo.exponents[0],
                lo.exponents[1], lo.exponents[2])};
}

std::pair<bool, std::string> differential_metrics() {
    const auto frame = random_frame(kFrameBytes, 77);
    StreamCipherKey key;
    key.system = reference_system();
    key.x0 = {0.1, 0.1, 0.1};

    key.rounds = 1;
    const auto one = average_npcr_uaci(key, frame, 256);
    key.rounds = 2;
    const auto two = average_npcr_uaci(key, frame, 256);

    const bool ok1 = std::fabs(one.npcr - 49.8) <= 3.0 && std::fabs(one.uaci - 16.73) <= 2.0;
    const bool ok2 = two.npcr >= 99.5 && std::fabs(two.uaci - 33.47) <= 0.5;
    return {ok1 && ok2, fmt("M=1 %.2f%%/%.2f%% (49.8/16.73)  M=2 %.2f%%/%.2f%% (>=99.5/33.47)",
                            one.npcr, one.uaci, two.npcr, two.uaci)};
}

std::pair<bool, std::string> statistical_battery() {
    ChaoticSystem sys = reference_system();
    CipherSession chaotic(sys);
    CipherState st{0.1, 0.1, 0.1};
    const std::size_t seq_bytes = 12500;  // 1e5 bits
    const auto stream = chaotic.keystream(20 * seq_bytes, st);

    int pass_all = 0;
    for (int s = 0; s < 20; ++s) {
        const std::span<const std::uint8_t> part(stream.data() + s * seq_bytes, seq_bytes);
        if (stat_tests(unpack_bits(part)).all_pass) ++pass_all;
    }

    ChaoticSystem tame = reference_system();
    tame.epsilon = 100.0;
    tame.sigma = 0.0667;
    CipherSession degen(tame);
    CipherState st2{0.1, 0.1, 0.1};
    const auto stream2 = degen.keystream(20 * seq_bytes, st2);
    int freq_fail = 0;
    for (int s = 0; s < 20; ++s) {
        const std::span<const std::uint8_t> part(stream2.data() + s * seq_bytes, seq_bytes);
        if (frequency_test(unpack_bits(part)) < 0.0001) ++freq_fail;
    }

    const bool ok = pass_all >= 18 && freq_fail >= 18;
    return {ok, fmt("eps=3e8: %d/20 pass all five; eps=100: %d/20 fail frequency", pass_all,
                    freq_fail)};
}

std::pair<bool, std::string> sensitivity_decades() {
    const auto frame = random_frame(kFrameBytes, 99);
    StreamCipherKey key;
    key.system = reference_system();
    key.x0 = {0.1, 0.1, 0.1};

    key.rounds = 5;
    const auto five = sensitivity_scan(key, frame, -12, 2);
    bool ok = true;
    std::string worst;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            const bool column1 = (j == 0 && i >= 1);  // a21, a31
            const int expect = column1 ? -3 : -9;
            const int got = five.decade[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            if (std::abs(got - expect) > 1) {
                ok = false;
                worst = fmt("a%d%d at 1e%d (want 1e%d +-1)", i + 1, j + 1, got, expect);
            }
        }
    }

    key.rounds = 1;
    const auto one = sensitivity_scan(key, frame, -12, 2);
    double insensitive = 1e300, sensitive = -1e300;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const double th = one.threshold[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            if (j == 0 && i >= 1)
                insensitive = std::min(insensitive, th);
            else
                sensitive = std::max(sensitive, th);
        }
    const double asymmetry = insensitive / sensitive;
    if (asymmetry < 1e4) {
        ok = false;
        worst += fmt(" M=1 asymmetry %.1e < 1e4", asymmetry);
    }
    return {ok, ok ? fmt("M=5 decades within +-1 of reference; M=1 asymmetry %.1e >= 1e4", asymmetry)
                   : worst};
}

std::pair<bool, std::string> key_space_arithmetic() {
    std::array<std::array<double, 3>, 3> sens = {{{1e-9, 1e-9, 1e-9},
                                                  {1e-3, 1e-9, 1e-9},
                                                  {1e-3, 1e-9, 1e-9}}};
    const auto ks = key_space(6, 7, sens, reference_system().a);
    auto close = [](double got, double want) { return std::fabs(got - want) / want < 5e-5; };
    const bool ok = close(ks.scrambler_bits, 9.4154e14) && close(ks.scrambler_bytes, 2.575e23) &&
                    close(ks.stream, 3.2607e64) && close(ks.total, 7.9055e102);
    return {ok, fmt("%.5g  %.5g  %.5g  %.5g", ks.scrambler_bits, ks.scrambler_bytes, ks.stream,
                    ks.total)};
}

std::pair<bool, std::string> multicast_fanout() {
    GroupConfig cfg;
    cfg.port = static_cast<std::uint16_t>(42000 + (getpid() % 2000));

    const KeyBundle key = KeyBundle::reference();
    KeyBundle wrong_key = key;
    wrong_key.stream.system.a[0][0] += 1e-9;

    // sender side: 8 speech-like blocks
    std::vector<std::vector<std::int16_t>> blocks;
    std::mt19937_64 rng(4242);
    std::normal_distribution<double> noise(0.0, 400.0);
    for (int b = 0; b < 8; ++b) {
        std::vector<std::int16_t> pcm(kBlockSamples);
        for (std::size_t k = 0; k < pcm.size(); ++k) {
            const double t = static_cast<double>(k) / 8000.0;
            pcm[k] = static_cast<std::int16_t>(std::clamp(
                8000.0 * std::sin(2 * std::numbers::pi * (200.0 + 40.0 * b) * t) + noise(rng),
                -32768.0, 32767.0));
        }
        blocks.push_back(std::move(pcm));
    }

    Encryptor enc(key);
    std::vector<std::vector<std::uint8_t>> plain_frames, cipher_frames;
    for (const auto& b : blocks) {
        plain_frames.push_back(enc.compress_block_bytes(b));
        cipher_frames.push_back(enc.encrypt_block(b));
    }

    struct RxResult {
        std::vector<std::vector<std::uint8_t>> frames;
    };
    auto receive = [&cfg](const KeyBundle& k, RxResult& out) {
        MulticastReceiver rx(cfg);
        Decryptor dec(k);
        for (;;) {
            const auto p = rx.recv_frame(std::chrono::milliseconds(3000));
            if (!p) break;
            out.frames.push_back(dec.decrypt_block_bytes(p->payload));
            if (out.frames.size() == 8) break;
        }
    };

    RxResult rx1, rx2, rx_bad;
    std::thread t1([&] { receive(key, rx1); });
    std::thread t2([&] { receive(key, rx2); });
    std::thread t3([&] { receive(wrong_key, rx_bad); });
    std::this_thread::sleep_for(std::chrono::milliseconds(150));

    MulticastSender tx(cfg);
    for (std::size_t i = 0; i < cipher_frames.size(); ++i) {
        FramePacket p;
        p.seq = static_cast<std::uint32_t>(i);
        p.rounds = static_cast<std::uint8_t>(key.stream.rounds);
        p.payload = cipher_frames[i];
        tx.send_frame(p);
        std::this_thread::sleep_for(std::chrono::milliseconds(15));
    }
    t1.join();
    t2.join();
    t3.join();

    if (rx1.frames.size() != 8 || rx2.frames.size() != 8 || rx_bad.frames.size() != 8)
        return {false, fmt("frames received: %zu/%zu/%zu of 8", rx1.frames.size(),
                           rx2.frames.size(), rx_bad.frames.size())};
    if (rx1.frames != plain_frames || rx2.frames != plain_frames)
        return {false, "matched receivers are not byte-identical to the sender stream"};

    double npcr_min = 100.0;
    for (std::size_t i = 0; i < 8; ++i)
        npcr_min = std::min(npcr_min, npcr_uaci(rx_bad.frames[i], plain_frames[i]).npcr);
    return {npcr_min >= 99.0,
            fmt("2 matched byte-identical; mismatched NPCR >= %.2f%% (>= 99)", npcr_min)};
}

std::pair<bool, std::string> steady_state_coefficients() {
    const auto c = error_dynamics_steady_state(reference_system().a, 2);
    const bool ok = std::fabs(c[0] - (-0.0887)) <= 0.001 && std::fabs(c[1] - 0.7507) <= 0.001 &&
                    std::fabs(c[2] - 1.4194) <= 0.001;
    return {ok, fmt("(%.4f, %.4f, %.4f) vs (-0.0887, 0.7507, 1.4194)", c[0], c[1], c[2])};
}

}  // namespace

int main() {
    std::printf("voxcast acceptance suite\n");
    run(1, "matrix golden vectors", matrix_golden_vectors);
    run(2, "worked table entries", worked_table_entries);
    run(3, "permutation properties", permutation_properties);
    run(4, "pipeline roundtrip", pipeline_roundtrip);
    run(5, "lyapunov reproduction", lyapunov_reproduction);
    run(6, "differential metrics", differential_metrics);
    run(7, "statistical battery", statistical_battery);
    run(8, "sensitivity decades", sensitivity_decades);
    run(9, "key-space arithmetic", key_space_arithmetic);
    run(10, "multicast fan-out", multicast_fanout);
    run(11, "steady-state coefficients", steady_state_coefficients);

    if (g_failures == 0)
        std::printf("all 11 criteria passed\n");
    else
        std::printf("%d criteria FAILED\n", g_failures);
    return g_failures;
}
