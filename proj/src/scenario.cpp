// SPDX-License-Identifier: Apache-2.0
#include "aircomp/scenario.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace aircomp {

void Scenario::validate() const {
    if (K < 1) throw InvalidInput("scenario: K must be >= 1");
    if (N < 1) throw InvalidInput("scenario: N must be >= 1");
    if (M < 0) throw InvalidInput("scenario: M must be >= 0");
    if (!(d0 > 0)) throw InvalidInput("scenario: d0 must be > 0");
    if (!(alpha_direct > 0) || !(alpha_ap_irs > 0) || !(alpha_irs_user > 0))
        throw InvalidInput("scenario: path-loss exponents must be > 0");
    if (!(P0 > 0)) throw InvalidInput("scenario: P0 must be > 0");
    if (!(sigma2 > 0)) throw InvalidInput("scenario: sigma2 must be > 0");
    if (!std::isfinite(T0_db)) throw InvalidInput("scenario: T0_db must be finite");
    if (!(user_region.x_min <= user_region.x_max) || !(user_region.y_min <= user_region.y_max))
        throw InvalidInput("scenario: empty user region");
    if (!ap_position.allFinite() || !irs_position.allFinite())
        throw InvalidInput("scenario: non-finite AP/IRS position");
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

SeededRng::SeededRng(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

SeededRng SeededRng::substream(std::uint64_t seed, std::uint64_t index) {
    return SeededRng(seed ^ splitmix64(index));
}

double SeededRng::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double SeededRng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    // Box-Muller; 1 - u keeps the log argument in (0, 1].
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(phi);
    has_spare_ = true;
    return r * std::cos(phi);
}

std::complex<double> SeededRng::complex_normal() {
    const double re = normal();
    const double im = normal();
    return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
}

double path_loss(double d, double alpha, double T0_db, double d0) {
    if (!(d > 0)) throw InvalidInput("path_loss: distance must be > 0, got " + std::to_string(d));
    if (!(d0 > 0)) throw InvalidInput("path_loss: reference distance must be > 0");
    return std::pow(10.0, -T0_db / 10.0) * std::pow(d / d0, -alpha);
}

std::vector<Point3> place_users(const Scenario& scenario, SeededRng& rng) {
    const Region& r = scenario.user_region;
    std::vector<Point3> users;
    users.reserve(static_cast<std::size_t>(scenario.K));
    for (int k = 0; k < scenario.K; ++k) {
        const double x = rng.uniform(r.x_min, r.x_max);
        const double y = rng.uniform(r.y_min, r.y_max);
        users.emplace_back(x, y, 0.0);
    }
    return users;
}

ChannelSetd gen_channels(const Scenario& s, const std::vector<Point3>& users, SeededRng& rng) {
    if (static_cast<int>(users.size()) != s.K)
        throw InvalidInput("gen_channels: expected " + std::to_string(s.K) + " user positions, got " +
                           std::to_string(users.size()));
    const auto gain = [&](const Point3& a, const Point3& b, double alpha, const char* link) {
        const double d = (a - b).norm();
        if (!(d > 0)) throw InvalidInput(std::string("gen_channels: zero-length ") + link + " link");
        return std::sqrt(path_loss(d, alpha, s.T0_db, s.d0));
    };

    ChannelSetd ch;
    ch.h_direct.reserve(users.size());
    ch.h_irs_user.reserve(users.size());
    for (const auto& u : users) {
        const double g = gain(u, s.ap_position, s.alpha_direct, "user-AP");
        CVectord h(s.N);
        for (int n = 0; n < s.N; ++n) h(n) = g * rng.complex_normal();
        ch.h_direct.push_back(std::move(h));
    }
    for (const auto& u : users) {
        CVectord h(s.M);
        if (s.M > 0) {
            const double g = gain(u, s.irs_position, s.alpha_irs_user, "user-IRS");
            for (int m = 0; m < s.M; ++m) h(m) = g * rng.complex_normal();
        }
        ch.h_irs_user.push_back(std::move(h));
    }
    ch.G.resize(s.N, s.M);
    if (s.M > 0) {
        const double g = gain(s.irs_position, s.ap_position, s.alpha_ap_irs, "IRS-AP");
        for (int m = 0; m < s.M; ++m)
            for (int n = 0; n < s.N; ++n) ch.G(n, m) = g * rng.complex_normal();
    }
    return ch;
}

}  // namespace aircomp
