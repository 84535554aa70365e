// voxcast command-line front end: key generation, file encryption, live
// multicast send/receive, and the analysis reports.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "voxcast/adpcm.hpp"
#include "voxcast/analysis.hpp"
#include "voxcast/keys.hpp"
#include "voxcast/permute.hpp"
#include "voxcast/pipeline.hpp"
#include "voxcast/stream_cipher.hpp"
#include "voxcast/transport.hpp"
#include "voxcast/wav.hpp"

using namespace voxcast;
using nlohmann::json;

namespace {

// exit codes: 0 ok, 1 runtime failure, 2 usage, 3 file i/o, 4 bad key, 5 transport
enum ExitCode { kOk = 0, kFailure = 1, kIoError = 3, kKeyError = 4, kTransportError = 5 };

void emit_report(const json& j, const std::string& json_path, const std::string& csv_path,
                 const std::string& csv_text) {
    if (!json_path.empty()) {
        std::ofstream f(json_path, std::ios::trunc);
        if (!f) throw std::runtime_error("cannot write " + json_path);
        f << j.dump(2) << '\n';
    }
    if (!csv_path.empty()) {
        std::ofstream f(csv_path, std::ios::trunc);
        if (!f) throw std::runtime_error("cannot write " + csv_path);
        f << csv_text;
    }
    std::cout << j.dump(2) << '\n';
}

KeyBundle load_key_or_default(const std::string& path) {
    if (path.empty()) return KeyBundle::reference();
    return load_key(path);
}

std::vector<std::int16_t> demo_speech(std::size_t n) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> noise(0.0, 400.0);
    std::vector<std::int16_t> v(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) / 8000.0;
        const double env = 0.5 + 0.5 * std::sin(2 * std::numbers::pi * 1.3 * t);
        const double s = env * (7000.0 * std::sin(2 * std::numbers::pi * 210.0 * t) +
                                3500.0 * std::sin(2 * std::numbers::pi * 430.0 * t) +
                                1200.0 * std::sin(2 * std::numbers::pi * 890.0 * t)) +
                         noise(rng);
        v[k] = static_cast<std::int16_t>(std::clamp(s, -32768.0, 32767.0));
    }
    return v;
}

json diff_to_json(const DiffReport& d) {
    return json{{"npcr_percent", d.npcr}, {"uaci_percent", d.uaci}, {"count", d.count}};
}

int cmd_send(const std::string& wav_in, const KeyBundle& key, const GroupConfig& group,
             int interval_ms) {
    const WavData wav = read_wav(wav_in);
    const auto frames = encrypt_pcm(wav.samples, key);
    MulticastSender tx(group);
    std::uint32_t seq = 0;
    for (const auto& f : frames) {
        FramePacket p;
        p.seq = seq++;
        p.rounds = static_cast<std::uint8_t>(key.stream.rounds);
        p.payload = f;
        tx.send_frame(p);
        std::this_thread::sleep_for(std::chrono::milliseconds(interval_ms));
    }
    std::cerr << "sent " << frames.size() << " frames to " << group.group_address << ":"
              << group.port << "\n";
    return kOk;
}

int cmd_recv(const KeyBundle& key, const GroupConfig& group, const std::string& wav_out,
             int max_frames, int timeout_ms) {
    MulticastReceiver rx(group);
    Decryptor dec(key);

    // transport and decode run as two tasks over a bounded queue
    std::vector<std::vector<std::uint8_t>> q;
    std::mutex mu;
    std::condition_variable cv;
    bool done = false;

    std::vector<std::int16_t> samples;
    std::thread decoder([&] {
        for (;;) {
            std::vector<std::uint8_t> payload;
            {
                std::unique_lock<std::mutex> lk(mu);
                cv.wait(lk, [&] { return done || !q.empty(); });
                if (q.empty() && done) return;
                payload = std::move(q.front());
                q.erase(q.begin());
            }
            const auto pcm = dec.decrypt_block(payload);
            samples.insert(samples.end(), pcm.begin(), pcm.end());
        }
    });

    int received = 0;
    while (received < max_frames) {
        const auto p = rx.recv_frame(std::chrono::milliseconds(timeout_ms));
        if (!p) break;  // stream ended
        {
            std::unique_lock<std::mutex> lk(mu);
            cv.wait(lk, [&] { return q.size() < 64; });
            q.push_back(p->payload);
        }
        cv.notify_all();
        ++received;
    }
    {
        std::lock_guard<std::mutex> lk(mu);
        done = true;
    }
    cv.notify_all();
    decoder.join();

    write_wav(wav_out, samples, 8000);
    std::cerr << "received " << received << " frames (" << rx.discarded_frames()
              << " discarded, " << rx.malformed() << " malformed), wrote " << wav_out << "\n";
    return received > 0 ? kOk : kTransportError;
}

int cmd_reproduce(const std::string& wav_in) {
    // the matched/mismatched receiver experiments, file-based
    std::vector<std::int16_t> pcm;
    if (wav_in.empty()) {
        pcm = demo_speech(2 * kBlockSamples);
    } else {
        pcm = read_wav(wav_in).samples;
    }
    pcm.resize(((pcm.size() + kBlockSamples - 1) / kBlockSamples) * kBlockSamples, 0);

    const KeyBundle key = KeyBundle::reference();
    Encryptor enc(key);

    // one mismatched key per encryption level
    KeyBundle bad_bits = key;
    std::iter_swap(bad_bits.bit_scrambler.order.pairs.begin(),
                   bad_bits.bit_scrambler.order.pairs.begin() + 9);  // T12 <-> T34
    KeyBundle bad_bytes = key;
    std::iter_swap(bad_bytes.byte_scrambler.order.pairs.begin(),
                   bad_bytes.byte_scrambler.order.pairs.begin() + 15);  // T12 <-> T45
    KeyBundle bad_stream = key;
    bad_stream.stream.system.a[0][0] += 1e-9;

    Decryptor matched(key), d_bits(bad_bits), d_bytes(bad_bytes), d_stream(bad_stream);

    bool matched_exact = true;
    DiffReport worst_bits, worst_bytes, worst_stream;
    for (std::size_t off = 0; off < pcm.size(); off += kBlockSamples) {
        const std::span<const std::int16_t> block(pcm.data() + off, kBlockSamples);
        const auto compressed = enc.compress_block_bytes(block);
        const auto cipher = enc.encrypt_block(block);

        matched_exact = matched_exact && (matched.decrypt_block_bytes(cipher) == compressed);
        const auto r1 = npcr_uaci(d_bits.decrypt_block_bytes(cipher), compressed);
        const auto r2 = npcr_uaci(d_bytes.decrypt_block_bytes(cipher), compressed);
        const auto r3 = npcr_uaci(d_stream.decrypt_block_bytes(cipher), compressed);
        worst_bits.npcr = std::max(worst_bits.npcr, 100.0 - r1.npcr);
        worst_bytes.npcr = std::max(worst_bytes.npcr, 100.0 - r2.npcr);
        worst_stream.npcr = std::max(worst_stream.npcr, 100.0 - r3.npcr);
    }

    std::printf("condition 1: matched keys               -> %s\n",
                matched_exact ? "byte-exact decryption" : "FAILED");
    std::printf("condition 2: swapped bit-scrambler key  -> noise (best-case byte match %.2f%%)\n",
                worst_bits.npcr);
    std::printf("condition 3: swapped byte-scrambler key -> noise (best-case byte match %.2f%%)\n",
                worst_bytes.npcr);
    std::printf("condition 4: da11 = 1e-9 stream key     -> noise (best-case byte match %.2f%%)\n",
                worst_stream.npcr);
    const bool ok = matched_exact && worst_bits.npcr < 10.0 && worst_bytes.npcr < 10.0 &&
                    worst_stream.npcr < 10.0;
    std::printf("%s\n", ok ? "all conditions reproduced" : "REPRODUCTION FAILED");
    return ok ? kOk : kFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"secure speech multicast toolkit"};
    app.require_subcommand(1);

    std::string key_path, out_path, in_path, json_path, csv_path;
    GroupConfig group;
    int interval_ms = 20;

    // keygen
    auto* keygen_cmd = app.add_subcommand("keygen", "generate a key file");
    std::optional<std::uint64_t> seed;
    int kg_rounds = 5;
    double kg_eps = 3e8, kg_sigma = 2e5;
    bool kg_reference = false;
    std::vector<double> kg_matrix;
    keygen_cmd->add_option("--seed", seed, "deterministic seed");
    keygen_cmd->add_option("--rounds", kg_rounds, "encryption rounds M")->check(CLI::Range(1, 16));
    keygen_cmd->add_option("--eps", kg_eps, "controller gain");
    keygen_cmd->add_option("--sigma", kg_sigma, "controller frequency (default 6.6667e-4*eps)");
    keygen_cmd->add_flag("--reference", kg_reference, "emit the reference key (canonical orders)");
    keygen_cmd->add_option("--matrix", kg_matrix, "nine coefficients, row-major")->expected(9);
    keygen_cmd->add_option("--out", out_path, "output key file")->required();

    // encrypt / decrypt
    auto* encrypt_cmd = app.add_subcommand("encrypt", "encrypt a wav file");
    encrypt_cmd->add_option("--in", in_path, "input wav (16-bit PCM mono)")->required();
    encrypt_cmd->add_option("--key", key_path, "key file (reference key if omitted)");
    encrypt_cmd->add_option("--out", out_path, "output cipher stream")->required();

    auto* decrypt_cmd = app.add_subcommand("decrypt", "decrypt a cipher stream");
    decrypt_cmd->add_option("--in", in_path, "input cipher stream")->required();
    decrypt_cmd->add_option("--key", key_path, "key file (reference key if omitted)");
    decrypt_cmd->add_option("--out", out_path, "output wav")->required();

    // send / recv
    auto* send_cmd = app.add_subcommand("send", "stream an encrypted wav over multicast");
    send_cmd->add_option("--in", in_path, "input wav")->required();
    send_cmd->add_option("--key", key_path, "key file");
    send_cmd->add_option("--group", group.group_address, "multicast group (class D)");
    send_cmd->add_option("--port", group.port, "udp port");
    send_cmd->add_option("--ttl", group.ttl, "multicast ttl");
    send_cmd->add_option("--interval-ms", interval_ms, "inter-frame pacing");

    int recv_frames = 1 << 20, recv_timeout = 5000;
    auto* recv_cmd = app.add_subcommand("recv", "receive and decrypt a multicast stream");
    recv_cmd->add_option("--key", key_path, "key file");
    recv_cmd->add_option("--group", group.group_address, "multicast group (class D)");
    recv_cmd->add_option("--port", group.port, "udp port");
    recv_cmd->add_option("--out", out_path, "output wav")->required();
    recv_cmd->add_option("--frames", recv_frames, "stop after this many frames");
    recv_cmd->add_option("--timeout-ms", recv_timeout, "per-frame receive timeout");

    // analyze
    auto* analyze_cmd = app.add_subcommand("analyze", "security measurements");
    analyze_cmd->require_subcommand(1);

    auto* lyap = analyze_cmd->add_subcommand("lyapunov", "lyapunov spectrum");
    double ly_eps = 3e8;
    std::optional<double> ly_sigma;
    int ly_iters = 100000;
    std::string ly_sweep;
    double ly_sweep_max = 300.0;
    int ly_sweep_points = 60;
    lyap->add_option("--eps", ly_eps, "controller gain");
    lyap->add_option("--sigma", ly_sigma, "controller frequency (default 6.6667e-4*eps)");
    lyap->add_option("--iterations", ly_iters, "iteration count");
    lyap->add_option("--json", json_path, "write report to file");
    lyap->add_option("--sweep-dat", ly_sweep,
                     "write a gnuplot-ready eps sweep (sigma = 6.6667e-4*eps) instead");
    lyap->add_option("--sweep-max", ly_sweep_max, "sweep upper bound for eps");
    lyap->add_option("--sweep-points", ly_sweep_points, "sweep sample count");

    auto* nist = analyze_cmd->add_subcommand("nist", "statistical test battery");
    double nist_eps = 3e8;
    std::optional<double> nist_sigma;
    int nist_seqs = 20, nist_bits = 100000;
    nist->add_option("--eps", nist_eps, "controller gain");
    nist->add_option("--sigma", nist_sigma, "controller frequency");
    nist->add_option("--sequences", nist_seqs, "sequence count");
    nist->add_option("--bits", nist_bits, "bits per sequence")->check(CLI::Range(100000, 100000000));
    nist->add_option("--json", json_path, "write report to file");

    auto* npcr = analyze_cmd->add_subcommand("npcr", "average NPCR/UACI");
    int npcr_rounds = 5, npcr_positions = 256;
    std::uint64_t npcr_seed = 77;
    npcr->add_option("--rounds", npcr_rounds, "encryption rounds M")->check(CLI::Range(1, 16));
    npcr->add_option("--positions", npcr_positions, "perturbation positions (<= 16384)");
    npcr->add_option("--seed", npcr_seed, "random frame seed");
    npcr->add_option("--json", json_path, "write report to file");

    auto* sens = analyze_cmd->add_subcommand("sensitivity", "parameter mismatch thresholds");
    int sens_rounds = 5, sens_min = -12, sens_max = 2;
    double sens_fail = 0.5;
    sens->add_option("--rounds", sens_rounds, "encryption rounds M")->check(CLI::Range(1, 16));
    sens->add_option("--decade-min", sens_min, "smallest decade");
    sens->add_option("--decade-max", sens_max, "largest decade");
    sens->add_option("--fail-fraction", sens_fail, "garbled-byte fraction that counts as failure");
    sens->add_option("--json", json_path, "write report to file");

    auto* keyspace = analyze_cmd->add_subcommand("keyspace", "key-space magnitudes");
    keyspace->add_option("--json", json_path, "write report to file");

    auto* histo = analyze_cmd->add_subcommand("histogram", "byte histogram of a file or demo frame");
    std::string histo_in;
    histo->add_option("--in", histo_in, "raw byte file (demo encrypted frame if omitted)");
    histo->add_option("--json", json_path, "write report to file");
    histo->add_option("--csv", csv_path, "write bin counts as csv");

    // reproduce
    auto* repro = app.add_subcommand("reproduce", "run the matched/mismatched experiments");
    repro->add_option("--wav", in_path, "speech input (synthesized if omitted)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*keygen_cmd) {
            KeyBundle k = kg_reference ? KeyBundle::reference() : keygen(seed);
            k.stream.rounds = kg_rounds;
            k.stream.system.epsilon = kg_eps;
            k.stream.system.sigma =
                keygen_cmd->count("--sigma") ? kg_sigma : 6.6667e-4 * kg_eps;
            if (!kg_matrix.empty()) {
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j)
                        k.stream.system.a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                            kg_matrix[static_cast<std::size_t>(3 * i + j)];
            }
            try {
                validate_key(k);
            } catch (const std::invalid_argument& e) {
                std::cerr << "invalid key: " << e.what() << "\n";
                return kKeyError;
            }
            save_key(out_path, k);
            std::cerr << "wrote " << out_path << "\n";
            return kOk;
        }

        if (*encrypt_cmd) {
            encrypt_file(in_path, load_key_or_default(key_path), out_path);
            return kOk;
        }
        if (*decrypt_cmd) {
            decrypt_file(in_path, load_key_or_default(key_path), out_path);
            return kOk;
        }
        if (*send_cmd) return cmd_send(in_path, load_key_or_default(key_path), group, interval_ms);
        if (*recv_cmd)
            return cmd_recv(load_key_or_default(key_path), group, out_path, recv_frames,
                            recv_timeout);

        if (*lyap) {
            if (!ly_sweep.empty()) {
                std::ofstream f(ly_sweep, std::ios::trunc);
                if (!f) throw std::runtime_error("cannot write " + ly_sweep);
                f << "# eps sigma LE1 LE2 LE3\n";
                for (int k = 1; k <= ly_sweep_points; ++k) {
                    const double eps = ly_sweep_max * k / ly_sweep_points;
                    ChaoticSystem sys = reference_system();
                    sys.epsilon = eps;
                    sys.sigma = 6.6667e-4 * eps;
                    const auto r = lyapunov_spectrum(sys, ly_iters);
                    f << eps << ' ' << sys.sigma << ' ' << r.exponents[0] << ' '
                      << r.exponents[1] << ' ' << r.exponents[2] << '\n';
                }
                std::cerr << "wrote " << ly_sweep << "\n";
                return kOk;
            }
            ChaoticSystem sys = reference_system();
            sys.epsilon = ly_eps;
            sys.sigma = ly_sigma.value_or(6.6667e-4 * ly_eps);
            const auto r = lyapunov_spectrum(sys, ly_iters);
            emit_report(json{{"epsilon", sys.epsilon},
                             {"sigma", sys.sigma},
                             {"iterations", ly_iters},
                             {"exponents", r.exponents},
                             {"h_ks", r.h_ks}},
                        json_path, "", "");
            return kOk;
        }

        if (*nist) {
            ChaoticSystem sys = reference_system();
            sys.epsilon = nist_eps;
            sys.sigma = nist_sigma.value_or(6.6667e-4 * nist_eps);
            CipherSession session(sys);
            CipherState st{0.1, 0.1, 0.1};
            const std::size_t seq_bytes = static_cast<std::size_t>(nist_bits) / 8;
            const auto stream = session.keystream(static_cast<std::size_t>(nist_seqs) * seq_bytes, st);

            json seq_reports = json::array();
            int pass_all = 0;
            for (int s = 0; s < nist_seqs; ++s) {
                const std::span<const std::uint8_t> part(
                    stream.data() + static_cast<std::size_t>(s) * seq_bytes, seq_bytes);
                const auto rep = stat_tests(unpack_bits(part));
                json tests;
                for (const auto& t : rep.tests) tests[t.name] = t.p_value;
                seq_reports.push_back(tests);
                if (rep.all_pass) ++pass_all;
            }
            emit_report(json{{"epsilon", sys.epsilon},
                             {"sigma", sys.sigma},
                             {"sequences", nist_seqs},
                             {"bits_per_sequence", nist_bits},
                             {"pass_all_count", pass_all},
                             {"per_sequence_p_values", seq_reports}},
                        json_path, "", "");
            return kOk;
        }

        if (*npcr) {
            StreamCipherKey key = load_key_or_default(key_path).stream;
            key.rounds = npcr_rounds;
            std::mt19937_64 rng(npcr_seed);
            std::uniform_int_distribution<int> d(0, 255);
            std::vector<std::uint8_t> frame(kFrameBytes);
            for (auto& b : frame) b = static_cast<std::uint8_t>(d(rng));
            const auto r = average_npcr_uaci(key, frame, static_cast<std::size_t>(npcr_positions));
            json j = diff_to_json(r);
            j["rounds"] = npcr_rounds;
            emit_report(j, json_path, "", "");
            return kOk;
        }

        if (*sens) {
            StreamCipherKey key = load_key_or_default(key_path).stream;
            key.rounds = sens_rounds;
            const auto frame = [&] {
                std::mt19937_64 rng(99);
                std::uniform_int_distribution<int> d(0, 255);
                std::vector<std::uint8_t> f(kFrameBytes);
                for (auto& b : f) b = static_cast<std::uint8_t>(d(rng));
                return f;
            }();
            const auto r = sensitivity_scan(key, frame, sens_min, sens_max, sens_fail);
            emit_report(json{{"rounds", sens_rounds},
                             {"fail_fraction", sens_fail},
                             {"threshold_decades", r.decade}},
                        json_path, "", "");
            return kOk;
        }

        if (*keyspace) {
            std::array<std::array<double, 3>, 3> s5 = {{{1e-9, 1e-9, 1e-9},
                                                        {1e-3, 1e-9, 1e-9},
                                                        {1e-3, 1e-9, 1e-9}}};
            const auto ks = key_space(6, 7, s5, reference_system().a);
            emit_report(json{{"bit_scrambler", ks.scrambler_bits},
                             {"byte_scrambler", ks.scrambler_bytes},
                             {"stream_cipher", ks.stream},
                             {"total", ks.total}},
                        json_path, "", "");
            return kOk;
        }

        if (*histo) {
            std::vector<std::uint8_t> data;
            if (histo_in.empty()) {
                Encryptor enc(KeyBundle::reference());
                data = enc.encrypt_block(demo_speech(kBlockSamples));
            } else {
                std::ifstream f(histo_in, std::ios::binary);
                if (!f) throw std::runtime_error("cannot open " + histo_in);
                data.assign(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
            }
            const auto h = histogram(data);
            std::string csv = "byte,count\n";
            for (int b = 0; b < 256; ++b)
                csv += std::to_string(b) + "," + std::to_string(h.counts[static_cast<std::size_t>(b)]) + "\n";
            emit_report(json{{"bytes", data.size()},
                             {"chi_square", h.chi_square},
                             {"p_value", h.p_value},
                             {"counts", h.counts}},
                        json_path, csv_path, csv);
            return kOk;
        }

        if (*repro) return cmd_reproduce(in_path);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kKeyError;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIoError;
    }
    return kOk;
}
