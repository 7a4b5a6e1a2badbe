// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <vector>

#include "aircomp/hermitian.hpp"

namespace aircomp {

using Point3 = Eigen::Vector3d;

/// Axis-aligned rectangle in the z = 0 plane.
struct Region {
    double x_min = -50.0;
    double x_max = 50.0;
    double y_min = 50.0;
    double y_max = 150.0;
};

/// Deployment geometry, link budget and problem dimensions. Defaults are the
/// reference single-cell layout with 30 dB transmit SNR (sigma2 = 1, P0 = 1000).
struct Scenario {
    Point3 ap_position{0.0, 0.0, 25.0};
    Point3 irs_position{50.0, 50.0, 40.0};
    Region user_region{};
    int K = 8;  // users
    int N = 8;  // AP antennas
    int M = 15; // IRS elements; 0 means no surface
    double T0_db = 30.0;
    double d0 = 1.0;
    double alpha_direct = 3.5;
    double alpha_ap_irs = 2.2;
    double alpha_irs_user = 2.8;
    double P0 = 1000.0;
    double sigma2 = 1.0;

    /// Throws InvalidInput on the first violated invariant.
    void validate() const;
};

/// One channel realization: h^d_k (dim N), h^r_k (dim M), G (N x M).
template <typename Real>
struct ChannelSet {
    std::vector<CVector<Real>> h_direct;
    std::vector<CVector<Real>> h_irs_user;
    CMatrix<Real> G;

    int K() const { return static_cast<int>(h_direct.size()); }
    int N() const { return static_cast<int>(G.rows()); }
    int M() const { return static_cast<int>(G.cols()); }

    void validate() const {
        if (h_irs_user.size() != h_direct.size()) throw InvalidInput("ChannelSet: user count mismatch");
        for (int k = 0; k < K(); ++k) {
            if (h_direct[k].size() != G.rows() || h_irs_user[k].size() != G.cols())
                throw InvalidInput("ChannelSet: dimension mismatch for user " + std::to_string(k));
            if (!detail::all_finite(h_direct[k]) || !detail::all_finite(h_irs_user[k]))
                throw InvalidInput("ChannelSet: non-finite channel entry");
        }
        if (!detail::all_finite(G)) throw InvalidInput("ChannelSet: non-finite G entry");
    }

    /// Same realization with the reflected path removed.
    ChannelSet without_irs() const {
        ChannelSet out = *this;
        out.G.setZero();
        return out;
    }
};

using ChannelSetd = ChannelSet<double>;

/// 64-bit Mersenne twister with hand-rolled uniform/normal transforms, so a
/// seed yields the same stream on every standard library.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed);

    /// Independent stream for (seed, index): seed xor splitmix64(index).
    static SeededRng substream(std::uint64_t seed, std::uint64_t index);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t next_u64() { return engine_(); }
    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal();
    /// CN(0, 1): real and imaginary parts N(0, 1/2).
    std::complex<double> complex_normal();

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

/// 10^(-T0_db/10) * (d/d0)^(-alpha).
double path_loss(double d, double alpha, double T0_db, double d0);

std::vector<Point3> place_users(const Scenario& scenario, SeededRng& rng);

/// Draws h^d_k for all users, then h^r_k for all users, then G (column-major),
/// so the direct channels of a given seed do not depend on M.
ChannelSetd gen_channels(const Scenario& scenario, const std::vector<Point3>& users, SeededRng& rng);

}  // namespace aircomp
