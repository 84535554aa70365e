#include "voxcast/keys.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <stdexcept>

#include <json.hpp>

namespace voxcast {

PermutationTable ScramblerKey::make_table() const {
    return generate_table(build_transform_matrix(order), 2, alpha);
}

KeyBundle KeyBundle::reference() {
    KeyBundle k;
    k.bit_scrambler.order = FactorOrder::canonical(6);
    k.bit_scrambler.alpha = PriorityPermutation::identity(6);
    k.byte_scrambler.order = FactorOrder::canonical(7);
    k.byte_scrambler.alpha = PriorityPermutation::identity(7);
    k.stream.system = reference_system();
    k.stream.rounds = 5;
    k.stream.x0 = {0.1, 0.1, 0.1};
    return k;
}

KeyBundle keygen(std::optional<std::uint64_t> seed) {
    std::mt19937_64 rng(seed.value_or(std::random_device{}()));
    KeyBundle k = KeyBundle::reference();

    auto shuffle_key = [&rng](ScramblerKey& sk) {
        std::shuffle(sk.order.pairs.begin(), sk.order.pairs.end(), rng);
        std::shuffle(sk.alpha.alpha.begin(), sk.alpha.alpha.end(), rng);
    };
    shuffle_key(k.bit_scrambler);
    shuffle_key(k.byte_scrambler);

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    k.stream.x0 = {unit(rng), unit(rng), unit(rng)};
    return k;
}

void validate_key(const KeyBundle& key) {
    if (key.bit_scrambler.order.n != 6)
        throw std::invalid_argument("bit scrambler must have dimension 6");
    if (key.byte_scrambler.order.n != 7)
        throw std::invalid_argument("byte scrambler must have dimension 7");
    build_transform_matrix(key.bit_scrambler.order);
    build_transform_matrix(key.byte_scrambler.order);
    key.bit_scrambler.alpha.validate(6);
    key.byte_scrambler.alpha.validate(7);
    if (key.stream.rounds < 1 || key.stream.rounds > kMaxRounds)
        throw std::invalid_argument("round count must be in [1, 16]");
    if (key.stream.system.spectral_radius() >= 1.0)
        throw std::invalid_argument("coefficient matrix spectral radius must be < 1");
    if (key.stream.system.sync_block_radius() >= 1.0)
        throw std::invalid_argument("lower-right 2x2 block must contract (self-synchronization)");
    if (!key.stream.x0.finite())
        throw std::invalid_argument("initial state must be finite");
}

namespace {

using nlohmann::json;

json scrambler_to_json(const ScramblerKey& sk) {
    json pairs = json::array();
    for (const auto& [i, j] : sk.order.pairs) pairs.push_back({i, j});
    return json{{"n", sk.order.n},
                {"pairs", pairs},
                {"alpha", sk.alpha.alpha},
                {"block_params", sk.order.block}};
}

ScramblerKey scrambler_from_json(const json& j) {
    ScramblerKey sk;
    sk.order.n = j.at("n").get<int>();
    for (const auto& p : j.at("pairs"))
        sk.order.pairs.emplace_back(p.at(0).get<int>(), p.at(1).get<int>());
    sk.alpha.alpha = j.at("alpha").get<std::vector<int>>();
    if (j.contains("block_params"))
        sk.order.block = j.at("block_params").get<std::array<std::int64_t, 4>>();
    return sk;
}

}  // namespace

std::string key_to_json(const KeyBundle& key) {
    json j;
    j["bit_scrambler"] = scrambler_to_json(key.bit_scrambler);
    j["byte_scrambler"] = scrambler_to_json(key.byte_scrambler);
    j["stream"] = {{"a", key.stream.system.a},
                   {"epsilon", key.stream.system.epsilon},
                   {"sigma", key.stream.system.sigma},
                   {"rounds", key.stream.rounds},
                   {"x0", {key.stream.x0.x1, key.stream.x0.x2, key.stream.x0.x3}}};
    return j.dump(2);
}

KeyBundle key_from_json(const std::string& text) {
    const json j = json::parse(text);
    KeyBundle k;
    k.bit_scrambler = scrambler_from_json(j.at("bit_scrambler"));
    k.byte_scrambler = scrambler_from_json(j.at("byte_scrambler"));
    const json& s = j.at("stream");
    k.stream.system.a = s.at("a").get<std::array<std::array<double, 3>, 3>>();
    k.stream.system.epsilon = s.at("epsilon").get<double>();
    k.stream.system.sigma = s.at("sigma").get<double>();
    k.stream.rounds = s.at("rounds").get<int>();
    const auto x0 = s.at("x0").get<std::array<double, 3>>();
    k.stream.x0 = {x0[0], x0[1], x0[2]};
    validate_key(k);
    return k;
}

void save_key(const std::string& path, const KeyBundle& key) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << key_to_json(key) << '\n';
    if (!f) throw std::runtime_error("write failed: " + path);
}

KeyBundle load_key(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return key_from_json(text);
}

}  // namespace voxcast
