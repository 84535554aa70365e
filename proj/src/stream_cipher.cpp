#include "voxcast/stream_cipher.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace voxcast {

double ChaoticSystem::spectral_radius() const {
    Eigen::Matrix3d m;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m(i, j) = a[i][j];
    return m.eigenvalues().cwiseAbs().maxCoeff();
}

double ChaoticSystem::sync_block_radius() const {
    Eigen::Matrix2d m;
    m << a[1][1], a[1][2], a[2][1], a[2][2];
    return m.eigenvalues().cwiseAbs().maxCoeff();
}

ChaoticSystem reference_system() {
    ChaoticSystem s;
    s.a = {{{0.205, -0.595, 0.265},
            {-0.265, -0.125, 0.595},
            {0.33, -0.33, 0.47}}};
    s.epsilon = 3e8;
    s.sigma = 2e5;
    return s;
}

bool CipherState::finite() const {
    return std::isfinite(x1) && std::isfinite(x2) && std::isfinite(x3);
}

std::uint8_t keystream_byte(const CipherState& state) {
    if (!state.finite() || std::fabs(state.x1) >= 9.2e18)
        throw std::runtime_error("cipher state diverged");
    const std::int64_t f = static_cast<std::int64_t>(std::floor(state.x1));
    return static_cast<std::uint8_t>(f & 0xFF);
}

CipherSession::CipherSession(const ChaoticSystem& sys) : sys_(sys) {
    for (int p = 0; p < 256; ++p)
        ctrl_[static_cast<std::size_t>(p)] = sys.epsilon * std::sin(sys.sigma * p);
}

CipherState CipherSession::step(const CipherState& s, std::uint8_t p) const {
    const auto& a = sys_.a;
    CipherState n;
    n.x1 = a[0][0] * s.x1 + a[0][1] * s.x2 + a[0][2] * s.x3;
    n.x2 = a[1][0] * p + a[1][1] * s.x2 + a[1][2] * s.x3;
    n.x3 = a[2][0] * p + a[2][1] * s.x2 + a[2][2] * s.x3 + ctrl_[p];
    return n;
}

std::vector<std::uint8_t> CipherSession::encrypt_round(std::span<const std::uint8_t> plain,
                                                       CipherState& state) const {
    std::vector<std::uint8_t> out(plain.size());
    for (std::size_t k = 0; k < plain.size(); ++k) {
        const std::uint8_t p = keystream_byte(state) ^ plain[k];
        out[k] = p;
        state = step(state, p);
    }
    return out;
}

std::vector<std::uint8_t> CipherSession::decrypt_round(std::span<const std::uint8_t> cipher,
                                                       CipherState& state) const {
    std::vector<std::uint8_t> out(cipher.size());
    for (std::size_t k = 0; k < cipher.size(); ++k) {
        const std::uint8_t p = cipher[k];
        out[k] = keystream_byte(state) ^ p;
        state = step(state, p);
    }
    return out;
}

CipherState CipherSession::advance(CipherState state, std::span<const std::uint8_t> drive) const {
    for (std::uint8_t p : drive) {
        if (!state.finite()) throw std::runtime_error("cipher state diverged");
        state = step(state, p);
    }
    return state;
}

std::vector<std::uint8_t> CipherSession::keystream(std::size_t nbytes, CipherState& state) const {
    std::vector<std::uint8_t> out(nbytes);
    for (std::size_t k = 0; k < nbytes; ++k) {
        const std::uint8_t p = keystream_byte(state);  // s(k) == 0
        out[k] = p;
        state = step(state, p);
    }
    return out;
}

namespace {

void check_round_setup(std::size_t size, int rounds) {
    if (rounds < 1) throw std::invalid_argument("round count must be >= 1");
    if (rounds > kMaxRounds)
        throw std::invalid_argument("round count above 16 is not supported");
    if (rounds >= 2 && size < kMinMultiRoundBytes)
        throw std::invalid_argument(
            "multi-round operation needs at least one full 16384-byte frame");
}

}  // namespace

std::vector<std::uint8_t> encrypt_frame(std::span<const std::uint8_t> frame,
                                        const StreamCipherKey& key) {
    check_round_setup(frame.size(), key.rounds);
    CipherSession session(key.system);
    CipherState state = key.x0;
    std::vector<std::uint8_t> buf(frame.begin(), frame.end());
    for (int r = 0; r < key.rounds; ++r) buf = session.encrypt_round(buf, state);
    return buf;
}

std::vector<std::uint8_t> decrypt_frame(std::span<const std::uint8_t> cipher,
                                        const StreamCipherKey& key) {
    check_round_setup(cipher.size(), key.rounds);
    const int m = key.rounds;
    CipherSession session(key.system);

    if (m == 1) {
        CipherState state = key.x0;
        return session.decrypt_round(cipher, state);
    }

    // est[r]: recovered output of encryption round r (1-based); est[m] is exact.
    std::vector<std::vector<std::uint8_t>> est(static_cast<std::size_t>(m) + 1);
    est[static_cast<std::size_t>(m)].assign(cipher.begin(), cipher.end());

    // approximate sweep: every pass from x0, wrong only in a short prefix
    for (int r = m - 1; r >= 1; --r) {
        CipherState state = key.x0;
        est[static_cast<std::size_t>(r)] =
            session.decrypt_round(est[static_cast<std::size_t>(r) + 1], state);
    }

    // round-start states, rebuilt forward; the contraction of the state
    // recursion makes each round-end state exact despite the wrong prefixes
    std::vector<CipherState> start(static_cast<std::size_t>(m));
    start[0] = key.x0;
    for (int r = 1; r < m; ++r)
        start[static_cast<std::size_t>(r)] =
            session.advance(start[static_cast<std::size_t>(r) - 1], est[static_cast<std::size_t>(r)]);

    // exact sweep
    std::vector<std::uint8_t> buf(cipher.begin(), cipher.end());
    for (int r = m; r >= 1; --r) {
        CipherState state = start[static_cast<std::size_t>(r) - 1];
        buf = session.decrypt_round(buf, state);
    }
    return buf;
}

std::array<double, 3> error_dynamics_steady_state(
    const std::array<std::array<double, 3>, 3>& a, int row, double drive) {
    if (row < 0 || row > 2) throw std::invalid_argument("row index must be 0..2");

    // Error system: dx1' = a11 dx1 + a12 dx2 + a13 dx3; rows 2 and 3 see the
    // shared feedback p, so their dx1 coupling is zero.
    Eigen::Matrix3d e = Eigen::Matrix3d::Zero();
    e(0, 0) = a[0][0];
    e(0, 1) = a[0][1];
    e(0, 2) = a[0][2];
    e(1, 1) = a[1][1];
    e(1, 2) = a[1][2];
    e(2, 1) = a[2][1];
    e(2, 2) = a[2][2];

    Eigen::Matrix3d lhs = Eigen::Matrix3d::Identity() - e;
    Eigen::FullPivLU<Eigen::Matrix3d> lu(lhs);
    if (!lu.isInvertible()) throw std::runtime_error("steady-state system is singular");

    Eigen::Vector3d b = Eigen::Vector3d::Zero();
    b(row) = drive;
    Eigen::Vector3d sol = lu.solve(b);
    return {sol(0), sol(1), sol(2)};
}

}  // namespace voxcast
