// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "aircomp/hermitian.hpp"
#include "aircomp/scenario.hpp"

namespace aircomp {

/// IRS phase vector theta in [0, 2pi)^M with unit reflection amplitude.
template <typename Real>
class PhaseConfig {
public:
    PhaseConfig() = default;
    explicit PhaseConfig(RVector<Real> theta) : theta_(std::move(theta)) {
        for (Eigen::Index i = 0; i < theta_.size(); ++i) {
            if (!std::isfinite(theta_(i))) throw InvalidInput("PhaseConfig: non-finite phase");
            theta_(i) = wrap(theta_(i));
        }
    }

    static PhaseConfig zeros(Eigen::Index m) { return PhaseConfig(RVector<Real>::Zero(m)); }

    static Real wrap(Real t) {
        const Real two_pi = Real(2) * std::numbers::pi_v<Real>;
        Real w = std::fmod(t, two_pi);
        if (w < 0) w += two_pi;
        if (w >= two_pi) w = 0;  // fmod round-off at -tiny
        return w;
    }

    Eigen::Index size() const { return theta_.size(); }
    const RVector<Real>& theta() const { return theta_; }

    /// v = [e^{j theta_1}, ..., e^{j theta_M}]^T
    CVector<Real> unit_vector() const {
        CVector<Real> v(theta_.size());
        for (Eigen::Index i = 0; i < theta_.size(); ++i) v(i) = std::polar(Real(1), theta_(i));
        return v;
    }

private:
    RVector<Real> theta_;
};

template <typename Real>
struct EffectiveChannels {
    std::vector<CVector<Real>> h;  // h^e_k, dim N
    int K() const { return static_cast<int>(h.size()); }
};

template <typename Real>
struct TransceiverDesign {
    CVector<Real> m;
    std::vector<Complex<Real>> w;
    Real eta = 0;
};

/// Lifted decoding-vector problem: minimize Tr M s.t. Tr(M H_k) >= 1.
template <typename Real>
struct LiftedP1 {
    std::vector<HermitianMatrix<Real>> H;
};

/// Homogenized phase feasibility problem: Re Tr(R_k V) + |c_k|^2 >= 1, V_ii = 1.
template <typename Real>
struct LiftedP2 {
    Eigen::Index M = 0;  // IRS elements; the lifted variable is (M+1) x (M+1)
    std::vector<CVector<Real>> a;
    std::vector<Complex<Real>> c;
    std::vector<HermitianMatrix<Real>> R;
};

/// h^e_k = G diag(e^{j theta}) h^r_k + h^d_k
template <typename Real>
EffectiveChannels<Real> effective_channels(const ChannelSet<Real>& ch, const PhaseConfig<Real>& phases) {
    if (phases.size() != ch.M()) throw InvalidInput("effective_channels: phase vector length != M");
    const CVector<Real> v = phases.unit_vector();
    EffectiveChannels<Real> out;
    out.h.reserve(ch.h_direct.size());
    for (int k = 0; k < ch.K(); ++k)
        out.h.push_back(ch.G * v.cwiseProduct(ch.h_irs_user[k]) + ch.h_direct[k]);
    return out;
}

namespace detail {

template <typename Real>
Real min_gain(const CVector<Real>& m, const EffectiveChannels<Real>& eff, const char* who) {
    if (eff.h.empty()) throw InvalidInput(std::string(who) + ": no users");
    Real lo = std::numeric_limits<Real>::infinity();
    for (const auto& h : eff.h) {
        if (h.size() != m.size()) throw InvalidInput(std::string(who) + ": dimension mismatch");
        lo = std::min(lo, std::norm(m.dot(h)));  // dot() conjugates m
    }
    if (!(lo > Real(0)))
        throw DegenerateChannel(std::string(who) + ": decoding vector orthogonal to an effective channel");
    return lo;
}

}  // namespace detail

/// eta = P0 min_k |m^H h^e_k|^2
template <typename Real>
Real normalizing_factor(const CVector<Real>& m, const EffectiveChannels<Real>& eff, Real P0) {
    return P0 * detail::min_gain(m, eff, "normalizing_factor");
}

/// w_k = sqrt(eta) (m^H h^e_k)^* / |m^H h^e_k|^2
template <typename Real>
std::vector<Complex<Real>> transmit_scalars(const CVector<Real>& m, const EffectiveChannels<Real>& eff, Real eta) {
    std::vector<Complex<Real>> w;
    w.reserve(eff.h.size());
    const Real se = std::sqrt(eta);
    for (const auto& h : eff.h) {
        const Complex<Real> g = m.dot(h);
        const Real g2 = std::norm(g);
        if (!(g2 > Real(0))) throw DegenerateChannel("transmit_scalars: zero inner product m^H h^e_k");
        w.push_back(se * std::conj(g) / g2);
    }
    return w;
}

/// sum_k |m^H h^e_k w_k / sqrt(eta) - 1|^2 + sigma2 ||m||^2 / eta
template <typename Real>
Real mse_general(const CVector<Real>& m, const std::vector<Complex<Real>>& w, const EffectiveChannels<Real>& eff,
                 Real eta, Real sigma2) {
    if (!(eta > Real(0))) throw InvalidInput("mse_general: eta must be > 0");
    if (w.size() != eff.h.size()) throw InvalidInput("mse_general: |w| != K");
    const Real inv = Real(1) / std::sqrt(eta);
    Real acc = 0;
    for (std::size_t k = 0; k < w.size(); ++k) acc += std::norm(inv * m.dot(eff.h[k]) * w[k] - Real(1));
    return acc + sigma2 * m.squaredNorm() / eta;
}

/// sigma2 ||m||^2 / (P0 min_k |m^H h^e_k|^2)
template <typename Real>
Real mse_closed_form(const CVector<Real>& m, const EffectiveChannels<Real>& eff, Real P0, Real sigma2) {
    return sigma2 * m.squaredNorm() / (P0 * detail::min_gain(m, eff, "mse_closed_form"));
}

template <typename Real>
TransceiverDesign<Real> optimal_transceiver(const CVector<Real>& m, const EffectiveChannels<Real>& eff, Real P0) {
    TransceiverDesign<Real> d;
    d.m = m;
    d.eta = normalizing_factor(m, eff, P0);
    d.w = transmit_scalars(m, eff, d.eta);
    return d;
}

template <typename Real>
LiftedP1<Real> build_p1(const EffectiveChannels<Real>& eff) {
    LiftedP1<Real> p;
    p.H.reserve(eff.h.size());
    for (const auto& h : eff.h) p.H.push_back(HermitianMatrix<Real>::outer(h));
    return p;
}

/// c_k = m^H h^d_k, a_k^H = m^H G diag(h^r_k), R_k = [a a^H, a c; c^* a^H, 0].
template <typename Real>
LiftedP2<Real> build_p2(const CVector<Real>& m, const ChannelSet<Real>& ch) {
    if (m.size() != ch.N()) throw InvalidInput("build_p2: decoding vector has wrong dimension");
    if (m.squaredNorm() == Real(0)) throw InvalidInput("build_p2: zero decoding vector");
    const Eigen::Index M = ch.M();
    const CVector<Real> gm = ch.G.adjoint() * m;  // G^H m
    LiftedP2<Real> p;
    p.M = M;
    for (int k = 0; k < ch.K(); ++k) {
        CVector<Real> a = gm.cwiseProduct(ch.h_irs_user[k].conjugate());
        const Complex<Real> c = m.dot(ch.h_direct[k]);
        CMatrix<Real> r = CMatrix<Real>::Zero(M + 1, M + 1);
        r.topLeftCorner(M, M) = a * a.adjoint();
        r.topRightCorner(M, 1) = a * c;
        r.bottomLeftCorner(1, M) = std::conj(c) * a.adjoint();
        p.a.push_back(std::move(a));
        p.c.push_back(c);
        p.R.emplace_back(r);
    }
    return p;
}

/// theta_m = arg(v_m / t) with t the trailing (homogenizing) entry.
template <typename Real>
PhaseConfig<Real> recover_phases(const CVector<Real>& v_tilde) {
    if (v_tilde.size() < 1) throw InvalidInput("recover_phases: empty vector");
    const Eigen::Index M = v_tilde.size() - 1;
    const Complex<Real> t = v_tilde(M);
    if (!(std::abs(t) > Real(1e-9))) throw RecoveryError("recover_phases: auxiliary entry t is ~0");
    RVector<Real> theta(M);
    for (Eigen::Index i = 0; i < M; ++i) theta(i) = std::arg(v_tilde(i) / t);
    return PhaseConfig<Real>(std::move(theta));
}

}  // namespace aircomp
