#include "voxcast/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace voxcast {

// --- special functions -----------------------------------------------------

namespace {

constexpr double kMachEps = 1.1e-16;
constexpr double kMaxLog = 709.78;

double igam_series(double a, double x) {
    double ax = a * std::log(x) - x - std::lgamma(a);
    if (ax < -kMaxLog) return 0.0;
    ax = std::exp(ax);
    double r = a, c = 1.0, ans = 1.0;
    do {
        r += 1.0;
        c *= x / r;
        ans += c;
    } while (c / ans > kMachEps);
    return ans * ax / a;
}

}  // namespace

double igamc(double a, double x) {
    if (x <= 0.0 || a <= 0.0) return 1.0;
    if (x < 1.0 || x < a) return 1.0 - igam_series(a, x);

    double ax = a * std::log(x) - x - std::lgamma(a);
    if (ax < -kMaxLog) return 0.0;
    ax = std::exp(ax);

    const double big = 4.503599627370496e15;
    const double biginv = 2.22044604925031308085e-16;
    double y = 1.0 - a, z = x + y + 1.0, c = 0.0;
    double pkm2 = 1.0, qkm2 = x, pkm1 = x + 1.0, qkm1 = z * x;
    double ans = pkm1 / qkm1;
    double t;
    do {
        c += 1.0;
        y += 1.0;
        z += 2.0;
        const double yc = y * c;
        const double pk = pkm1 * z - pkm2 * yc;
        const double qk = qkm1 * z - qkm2 * yc;
        if (qk != 0.0) {
            const double r = pk / qk;
            t = std::fabs((ans - r) / r);
            ans = r;
        } else {
            t = 1.0;
        }
        pkm2 = pkm1;
        pkm1 = pk;
        qkm2 = qkm1;
        qkm1 = qk;
        if (std::fabs(pk) > big) {
            pkm2 *= biginv;
            pkm1 *= biginv;
            qkm2 *= biginv;
            qkm1 *= biginv;
        }
    } while (t > kMachEps);
    return ans * ax;
}

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

// --- Lyapunov spectrum ------------------------------------------------------

LyapunovResult lyapunov_spectrum(const ChaoticSystem& sys, int iterations,
                                 int discard, CipherState x0) {
    if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");

    Eigen::Matrix3d a;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) a(i, j) = sys.a[i][j];

    Eigen::Vector3d x(x0.x1, x0.x2, x0.x3);
    auto iterate = [&](const Eigen::Vector3d& v) {
        Eigen::Vector3d y = a * v;
        y(2) += sys.epsilon * std::sin(sys.sigma * v(0));
        return y;
    };

    for (int k = 0; k < discard; ++k) {
        x = iterate(x);
        if (!x.allFinite()) throw std::runtime_error("trajectory diverged");
    }

    Eigen::Matrix3d q = Eigen::Matrix3d::Identity();
    Eigen::Vector3d acc = Eigen::Vector3d::Zero();
    for (int k = 0; k < iterations; ++k) {
        Eigen::Matrix3d jac = a;
        jac(2, 0) += sys.epsilon * sys.sigma * std::cos(sys.sigma * x(0));
        const Eigen::Matrix3d z = jac * q;
        Eigen::HouseholderQR<Eigen::Matrix3d> qr(z);
        Eigen::Matrix3d r = qr.matrixQR().triangularView<Eigen::Upper>();
        q = qr.householderQ();
        for (int i = 0; i < 3; ++i) acc(i) += std::log(std::fabs(r(i, i)));
        x = iterate(x);
        if (!x.allFinite()) throw std::runtime_error("trajectory diverged");
    }

    LyapunovResult res;
    for (int i = 0; i < 3; ++i) res.exponents[static_cast<std::size_t>(i)] = acc(i) / iterations;
    std::sort(res.exponents.begin(), res.exponents.end(), std::greater<>());
    for (double le : res.exponents) res.h_ks += std::max(le, 0.0);
    return res;
}

// --- SP 800-22 subset -------------------------------------------------------

BitSeq unpack_bits(std::span<const std::uint8_t> bytes) {
    BitSeq bits;
    bits.reserve(bytes.size() * 8);
    for (std::uint8_t b : bytes)
        for (int k = 7; k >= 0; --k) bits.push_back((b >> k) & 1u);
    return bits;
}

double frequency_test(const BitSeq& bits) {
    if (bits.empty()) throw std::invalid_argument("empty bit sequence");
    const double n = static_cast<double>(bits.size());
    std::int64_t s = 0;
    for (std::uint8_t b : bits) s += b ? 1 : -1;
    const double s_obs = std::fabs(static_cast<double>(s)) / std::sqrt(n);
    return std::erfc(s_obs / std::sqrt(2.0));
}

double block_frequency_test(const BitSeq& bits, std::size_t block_len) {
    const std::size_t blocks = bits.size() / block_len;
    if (blocks == 0) throw std::invalid_argument("sequence shorter than one block");
    double chi = 0.0;
    for (std::size_t i = 0; i < blocks; ++i) {
        std::size_t ones = 0;
        for (std::size_t k = 0; k < block_len; ++k) ones += bits[i * block_len + k];
        const double pi = static_cast<double>(ones) / static_cast<double>(block_len);
        chi += (pi - 0.5) * (pi - 0.5);
    }
    chi *= 4.0 * static_cast<double>(block_len);
    return igamc(static_cast<double>(blocks) / 2.0, chi / 2.0);
}

double runs_test(const BitSeq& bits) {
    const double n = static_cast<double>(bits.size());
    if (bits.empty()) throw std::invalid_argument("empty bit sequence");
    std::size_t ones = 0;
    for (std::uint8_t b : bits) ones += b;
    const double pi = static_cast<double>(ones) / n;
    if (std::fabs(pi - 0.5) >= 2.0 / std::sqrt(n)) return 0.0;  // frequency pre-test
    std::size_t v = 1;
    for (std::size_t k = 0; k + 1 < bits.size(); ++k)
        if (bits[k] != bits[k + 1]) ++v;
    const double num = std::fabs(static_cast<double>(v) - 2.0 * n * pi * (1.0 - pi));
    const double den = 2.0 * std::sqrt(2.0 * n) * pi * (1.0 - pi);
    return std::erfc(num / den);
}

double cumulative_sums_test(const BitSeq& bits, bool forward) {
    const std::size_t n = bits.size();
    if (n == 0) throw std::invalid_argument("empty bit sequence");
    std::int64_t s = 0, z = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const std::uint8_t b = forward ? bits[k] : bits[n - 1 - k];
        s += b ? 1 : -1;
        z = std::max<std::int64_t>(z, s < 0 ? -s : s);
    }
    if (z == 0) return 0.0;
    const double zn = static_cast<double>(z);
    const double sq = std::sqrt(static_cast<double>(n));
    const auto fdiv = [](double a, double b) { return std::floor(a / b); };
    const double nz = static_cast<double>(n) / zn;

    double t1 = 0.0;
    for (double k = fdiv(-nz + 1.0, 4.0); k <= fdiv(nz - 1.0, 4.0); k += 1.0)
        t1 += normal_cdf((4.0 * k + 1.0) * zn / sq) - normal_cdf((4.0 * k - 1.0) * zn / sq);
    double t2 = 0.0;
    for (double k = fdiv(-nz - 3.0, 4.0); k <= fdiv(nz - 1.0, 4.0); k += 1.0)
        t2 += normal_cdf((4.0 * k + 3.0) * zn / sq) - normal_cdf((4.0 * k + 1.0) * zn / sq);
    return 1.0 - t1 + t2;
}

double longest_run_test(const BitSeq& bits) {
    const std::size_t n = bits.size();
    if (n < 128) throw std::invalid_argument("longest-run test needs >= 128 bits");

    std::size_t m, k;
    std::vector<std::size_t> classes;
    std::vector<double> pis;
    if (n < 6272) {
        m = 8;
        k = 3;
        classes = {1, 2, 3, 4};
        pis = {0.2148, 0.3672, 0.2305, 0.1875};
    } else if (n < 750000) {
        m = 128;
        k = 5;
        classes = {4, 5, 6, 7, 8, 9};
        pis = {0.1174, 0.2430, 0.2493, 0.1752, 0.1027, 0.1124};
    } else {
        m = 10000;
        k = 6;
        classes = {10, 11, 12, 13, 14, 15, 16};
        pis = {0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727};
    }

    const std::size_t blocks = n / m;
    std::vector<std::size_t> nu(k + 1, 0);
    for (std::size_t i = 0; i < blocks; ++i) {
        std::size_t run = 0, longest = 0;
        for (std::size_t j = 0; j < m; ++j) {
            run = bits[i * m + j] ? run + 1 : 0;
            longest = std::max(longest, run);
        }
        const std::size_t v = std::clamp(longest, classes.front(), classes.back());
        nu[v - classes.front()] += 1;
    }

    double chi = 0.0;
    for (std::size_t i = 0; i <= k; ++i) {
        const double expect = static_cast<double>(blocks) * pis[i];
        const double d = static_cast<double>(nu[i]) - expect;
        chi += d * d / expect;
    }
    return igamc(static_cast<double>(k) / 2.0, chi / 2.0);
}

StatTestReport stat_tests(const BitSeq& bits) {
    StatTestReport rep;
    const std::size_t block_len = std::max<std::size_t>(20, bits.size() / 80);
    rep.tests.push_back({"frequency", frequency_test(bits), false});
    rep.tests.push_back({"block_frequency", block_frequency_test(bits, block_len), false});
    rep.tests.push_back({"runs", runs_test(bits), false});
    rep.tests.push_back({"cumulative_sums_forward", cumulative_sums_test(bits, true), false});
    rep.tests.push_back({"cumulative_sums_backward", cumulative_sums_test(bits, false), false});
    rep.tests.push_back({"longest_run_of_ones", longest_run_test(bits), false});
    rep.all_pass = true;
    for (auto& t : rep.tests) {
        t.pass = t.p_value >= 0.0001;
        rep.all_pass = rep.all_pass && t.pass;
    }
    return rep;
}

// --- differential metrics ---------------------------------------------------

DiffReport npcr_uaci(std::span<const std::uint8_t> c, std::span<const std::uint8_t> c2) {
    if (c.size() != c2.size())
        throw std::invalid_argument("ciphertext lengths differ");
    DiffReport r;
    r.count = c.size();
    std::size_t changed = 0;
    double intensity = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (c[i] != c2[i]) ++changed;
        intensity += std::abs(static_cast<int>(c[i]) - static_cast<int>(c2[i])) / 255.0;
    }
    r.npcr = 100.0 * static_cast<double>(changed) / static_cast<double>(c.size());
    r.uaci = 100.0 * intensity / static_cast<double>(c.size());
    return r;
}

DiffReport average_npcr_uaci(const StreamCipherKey& key,
                             std::span<const std::uint8_t> frame,
                             std::size_t positions) {
    if (positions == 0 || positions > frame.size())
        throw std::invalid_argument("invalid position sample count");
    const std::vector<std::uint8_t> base = encrypt_frame(frame, key);
    std::vector<std::uint8_t> perturbed(frame.begin(), frame.end());

    DiffReport avg;
    avg.count = positions;
    for (std::size_t s = 0; s < positions; ++s) {
        const std::size_t m = s * frame.size() / positions;
        perturbed[m] ^= 0x01;
        const std::vector<std::uint8_t> c2 = encrypt_frame(perturbed, key);
        perturbed[m] ^= 0x01;
        const DiffReport d = npcr_uaci(base, c2);
        avg.npcr += d.npcr;
        avg.uaci += d.uaci;
    }
    avg.npcr /= static_cast<double>(positions);
    avg.uaci /= static_cast<double>(positions);
    return avg;
}

// --- parameter sensitivity ----------------------------------------------------

SensitivityResult sensitivity_scan(const StreamCipherKey& key,
                                   std::span<const std::uint8_t> frame,
                                   int decade_min, int decade_max,
                                   double fail_fraction) {
    const std::vector<std::uint8_t> cipher = encrypt_frame(frame, key);
    SensitivityResult res;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            int found = decade_max + 1;
            for (int d = decade_min; d <= decade_max; ++d) {
                StreamCipherKey bad = key;
                bad.system.a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] +=
                    std::pow(10.0, d);
                std::vector<std::uint8_t> plain;
                try {
                    plain = decrypt_frame(cipher, bad);
                } catch (const std::runtime_error&) {
                    found = d;  // diverged: certainly undecryptable
                    break;
                }
                std::size_t wrong = 0;
                for (std::size_t k = 0; k < frame.size(); ++k)
                    if (plain[k] != frame[k]) ++wrong;
                if (static_cast<double>(wrong) > fail_fraction * static_cast<double>(frame.size())) {
                    found = d;
                    break;
                }
            }
            res.decade[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = found;
            res.threshold[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                std::pow(10.0, found);
        }
    }
    return res;
}

// --- key space ------------------------------------------------------------------

KeySpace key_space(int n_bit, int n_byte,
                   const std::array<std::array<double, 3>, 3>& sensitivity,
                   const std::array<std::array<double, 3>, 3>& a) {
    auto order_count = [](int n) {
        const int pairs = n * (n - 1) / 2;
        double f = 1.0;
        for (int k = 2; k <= pairs; ++k) f *= k;
        double g = 1.0;
        for (int k = 2; k <= n; ++k) g *= k;
        return f * g;
    };

    KeySpace ks;
    ks.scrambler_bits = order_count(n_bit);
    ks.scrambler_bytes = order_count(n_byte);
    ks.stream = 1.0;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            const double da = sensitivity[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            if (da == 0.0) throw std::invalid_argument("zero sensitivity entry");
            ks.stream *= std::fabs(a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) /
                         std::fabs(da);
        }
    }
    ks.total = ks.scrambler_bits * ks.scrambler_bytes * ks.stream;
    return ks;
}

// --- histogram ----------------------------------------------------------------

Histogram histogram(std::span<const std::uint8_t> data) {
    Histogram h;
    for (std::uint8_t b : data) ++h.counts[b];
    if (data.empty()) {
        h.p_value = 1.0;
        return h;
    }
    const double expect = static_cast<double>(data.size()) / 256.0;
    for (std::uint64_t c : h.counts) {
        const double d = static_cast<double>(c) - expect;
        h.chi_square += d * d / expect;
    }
    h.p_value = igamc(255.0 / 2.0, h.chi_square / 2.0);
    return h;
}

}  // namespace voxcast
