// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "aircomp/dc.hpp"
#include "aircomp/model.hpp"
#include "aircomp/scenario.hpp"

namespace aircomp {

enum class Algorithm { alternating_dc, alternating_sdr, random_phase, no_irs };

enum class Termination { mse_converged, p2_infeasible, max_iters, failed };

inline const char* to_string(Algorithm a) {
    switch (a) {
        case Algorithm::alternating_dc: return "alternating_dc";
        case Algorithm::alternating_sdr: return "alternating_sdr";
        case Algorithm::random_phase: return "random_phase";
        case Algorithm::no_irs: return "no_irs";
    }
    return "unknown";
}

inline const char* to_string(Termination t) {
    switch (t) {
        case Termination::mse_converged: return "mse_converged";
        case Termination::p2_infeasible: return "p2_infeasible";
        case Termination::max_iters: return "max_iters";
        case Termination::failed: return "failed";
    }
    return "unknown";
}

inline std::optional<Algorithm> parse_algorithm(const std::string& s) {
    for (Algorithm a : {Algorithm::alternating_dc, Algorithm::alternating_sdr, Algorithm::random_phase, Algorithm::no_irs})
        if (s == to_string(a)) return a;
    return std::nullopt;
}

template <typename Real>
struct AlgorithmParams {
    Real eps = Real(1e-3);  // relative MSE decrease that stops the alternation
    int max_alt_iters = 50;
    DcParams<Real> dc{};
    int sdr_randomizations = 100;

    void validate() const {
        if (!(eps > 0)) throw InvalidInput("AlgorithmParams: eps must be > 0");
        if (max_alt_iters < 1) throw InvalidInput("AlgorithmParams: max_alt_iters must be >= 1");
        if (sdr_randomizations < 1) throw InvalidInput("AlgorithmParams: sdr_randomizations must be >= 1");
        dc.validate();
    }
};

template <typename Real>
struct DesignResult {
    CVector<Real> m;
    PhaseConfig<Real> theta;
    std::vector<Complex<Real>> w;
    Real eta = 0;
    Real mse = std::numeric_limits<Real>::quiet_NaN();
    std::vector<Real> mse_per_iteration;      // best-so-far after each outer iteration
    std::vector<Real> raw_mse_per_iteration;  // MSE of that iteration's (m, theta)
    Termination terminated_by = Termination::failed;
    int iterations = 0;
    std::string message;

    bool ok() const { return terminated_by != Termination::failed; }
};

template <typename Real>
PhaseConfig<Real> random_phases(Eigen::Index m, SeededRng& rng) {
    RVector<Real> theta(m);
    for (Eigen::Index i = 0; i < m; ++i) theta(i) = static_cast<Real>(rng.uniform(0.0, 2.0 * std::numbers::pi));
    return PhaseConfig<Real>(std::move(theta));
}

// ---------------------------------------------------------------------------
// Gaussian randomization
// ---------------------------------------------------------------------------

namespace detail {

/// Columns U diag(sqrt(lambda_+)) so that U z with z ~ CN(0, I) has covariance X.
template <typename Real>
CMatrix<Real> covariance_factor(const HermitianMatrix<Real>& x) {
    const auto eig = eigh(x);
    RVector<Real> root = eig.eigenvalues.cwiseMax(Real(0)).cwiseSqrt();
    return eig.eigenvectors * root.asDiagonal();
}

template <typename Real>
CVector<Real> draw(const CMatrix<Real>& factor, SeededRng& rng) {
    CVector<Real> z(factor.cols());
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = Complex<Real>(rng.complex_normal());
    return factor * z;
}

}  // namespace detail

/// Decoding-vector candidates: each sample is rescaled to min_k m^H H_k m = 1;
/// the shortest one wins.
template <typename Real>
std::optional<CVector<Real>> gaussian_randomization(const HermitianMatrix<Real>& x_star, const LiftedP1<Real>& ctx,
                                                    int n_samples, SeededRng& rng) {
    const CMatrix<Real> factor = detail::covariance_factor(x_star);
    std::optional<CVector<Real>> best;
    Real best_norm = std::numeric_limits<Real>::infinity();
    for (int s = 0; s < n_samples; ++s) {
        CVector<Real> m = detail::draw(factor, rng);
        Real lo = std::numeric_limits<Real>::infinity();
        for (const auto& h : ctx.H) lo = std::min(lo, std::real(m.dot(h.matrix() * m)));
        if (!(lo > Real(0))) continue;
        m /= std::sqrt(lo);
        if (m.squaredNorm() < best_norm) {
            best_norm = m.squaredNorm();
            best = std::move(m);
        }
    }
    return best;
}

/// Phase candidates: divide by the auxiliary entry, project to unit modulus,
/// keep feasible ones (within 1e-9) with the largest minimum slack.
/// Returns [v; 1].
template <typename Real>
std::optional<CVector<Real>> gaussian_randomization(const HermitianMatrix<Real>& x_star, const LiftedP2<Real>& ctx,
                                                    int n_samples, SeededRng& rng) {
    const CMatrix<Real> factor = detail::covariance_factor(x_star);
    std::optional<CVector<Real>> best;
    Real best_slack = -std::numeric_limits<Real>::infinity();
    for (int s = 0; s < n_samples; ++s) {
        const CVector<Real> cand = detail::draw(factor, rng);
        if (!(std::abs(cand(cand.size() - 1)) > Real(1e-9))) continue;
        CVector<Real> v = unit_modulus_homogenized(cand);
        const Real slack = ctx.a.empty() ? Real(0) : p2_min_slack(ctx, CVector<Real>(v.head(ctx.M)));
        if (slack >= -Real(1e-9) && slack > best_slack) {
            best_slack = slack;
            best = std::move(v);
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Drivers
// ---------------------------------------------------------------------------

namespace detail {

template <typename Real>
struct P1Step {
    std::optional<CVector<Real>> m;
    std::string message;
};

template <typename Real>
struct P2Step {
    std::optional<PhaseConfig<Real>> theta;
    std::string message;
};

template <typename Real>
using P1Solver = std::function<P1Step<Real>(const LiftedP1<Real>&)>;
template <typename Real>
using P2Solver = std::function<P2Step<Real>(const LiftedP2<Real>&)>;

template <typename Real>
void finalize(DesignResult<Real>& r, const ChannelSet<Real>& ch, Real P0, Real sigma2) {
    const auto eff = effective_channels(ch, r.theta);
    const auto d = optimal_transceiver(r.m, eff, P0);
    r.w = d.w;
    r.eta = d.eta;
    r.mse = mse_closed_form(r.m, eff, P0, sigma2);
}

/// Alternates a decoding-vector solver and a phase solver; reports the best
/// (m, theta) pair seen. The MSE of an outer iteration is evaluated after
/// both steps.
template <typename Real>
DesignResult<Real> alternate(const ChannelSet<Real>& ch, const Scenario& sc, const AlgorithmParams<Real>& params,
                             PhaseConfig<Real> theta, const P1Solver<Real>& solve_p1, const P2Solver<Real>& solve_p2) {
    const Real P0 = static_cast<Real>(sc.P0), sigma2 = static_cast<Real>(sc.sigma2);
    DesignResult<Real> res;
    Real best = std::numeric_limits<Real>::infinity();
    Real prev = std::numeric_limits<Real>::infinity();
    const auto consider = [&](const CVector<Real>& m, const PhaseConfig<Real>& th, Real mse) {
        if (mse < best) {
            best = mse;
            res.m = m;
            res.theta = th;
        }
    };

    res.terminated_by = Termination::max_iters;
    for (int t = 1; t <= params.max_alt_iters; ++t) {
        res.iterations = t;
        const auto eff = effective_channels(ch, theta);
        const auto step = solve_p1(build_p1(eff));
        if (!step.m) {
            if (t == 1) {
                res.terminated_by = Termination::failed;
                res.message = "decoding-vector subproblem failed: " + step.message;
                return res;
            }
            res.message = "decoding-vector subproblem failed at iteration " + std::to_string(t) + ": " + step.message;
            break;
        }
        if (!step.message.empty()) res.message = step.message;
        const CVector<Real>& m = *step.m;
        const Real mse_m = mse_closed_form(m, eff, P0, sigma2);
        consider(m, theta, mse_m);

        if (ch.M() == 0) {
            res.raw_mse_per_iteration.push_back(mse_m);
            res.mse_per_iteration.push_back(best);
            res.terminated_by = Termination::mse_converged;
            break;
        }
        const auto next = solve_p2(build_p2(m, ch));
        if (!next.theta) {
            res.raw_mse_per_iteration.push_back(mse_m);
            res.mse_per_iteration.push_back(best);
            res.terminated_by = Termination::p2_infeasible;
            res.message = "phase subproblem at iteration " + std::to_string(t) + ": " + next.message;
            break;
        }
        theta = *next.theta;
        const Real mse_t = mse_closed_form(m, effective_channels(ch, theta), P0, sigma2);
        consider(m, theta, mse_t);
        res.raw_mse_per_iteration.push_back(mse_t);
        res.mse_per_iteration.push_back(best);
        if (prev - mse_t < params.eps * prev) {
            res.terminated_by = Termination::mse_converged;
            break;
        }
        prev = mse_t;
    }
    finalize(res, ch, P0, sigma2);
    return res;
}

template <typename Real>
P1Step<Real> dc_p1_step(const LiftedP1<Real>& p1, const AlgorithmParams<Real>& params) {
    auto r = dc_solve_p1(p1, params.dc);
    if (r.status == DcStatus::solver_failure) return {std::nullopt, r.message};
    return {r.m, r.status == DcStatus::non_rank_one ? r.message : std::string()};
}

template <typename Real>
DesignResult<Real> single_p1(const ChannelSet<Real>& ch, const Scenario& sc, const AlgorithmParams<Real>& params,
                             PhaseConfig<Real> theta) {
    DesignResult<Real> res;
    res.iterations = 1;
    const auto step = dc_p1_step(build_p1(effective_channels(ch, theta)), params);
    if (!step.m) {
        res.terminated_by = Termination::failed;
        res.message = step.message;
        return res;
    }
    res.m = *step.m;
    res.theta = std::move(theta);
    res.message = step.message;
    res.terminated_by = Termination::mse_converged;
    finalize(res, ch, static_cast<Real>(sc.P0), static_cast<Real>(sc.sigma2));
    res.mse_per_iteration = {res.mse};
    res.raw_mse_per_iteration = {res.mse};
    return res;
}

}  // namespace detail

/// Alternating DC: DC for both the decoding vector and the phase
/// feasibility problem, from theta^1 drawn uniformly with `rng`.
template <typename Real>
DesignResult<Real> alternating_dc(const ChannelSet<Real>& ch, const Scenario& sc, const AlgorithmParams<Real>& params,
                                  SeededRng& rng) {
    params.validate();
    ch.validate();
    auto theta = random_phases<Real>(ch.M(), rng);
    return detail::alternate<Real>(
        ch, sc, params, std::move(theta), [&](const LiftedP1<Real>& p1) { return detail::dc_p1_step(p1, params); },
        [&](const LiftedP2<Real>& p2) -> detail::P2Step<Real> {
            auto r = dc_solve_p2(p2, params.dc);
            if (!r.feasible) return {std::nullopt, r.message};
            return {recover_phases(r.v_tilde), {}};
        });
}

/// Alternating SDR: both subproblems relaxed, Gaussian randomization when the
/// relaxation is not rank-one. Randomization draws from `rng` after theta^1.
template <typename Real>
DesignResult<Real> alternating_sdr(const ChannelSet<Real>& ch, const Scenario& sc, const AlgorithmParams<Real>& params,
                                   SeededRng& rng) {
    params.validate();
    ch.validate();
    auto theta = random_phases<Real>(ch.M(), rng);
    const auto& dc = params.dc;
    auto p1 = [&](const LiftedP1<Real>& lifted) -> detail::P1Step<Real> {
        const auto sol = solve_sdp(p1_problem(lifted), dc.solver);
        if (sol.status == SdpStatus::infeasible_suspected) return {std::nullopt, "SDR reported infeasible_suspected"};
        if (relative_rank1_penalty(sol.X) <= dc.feas_tol)
            return {rescale_to_feasible(leading_rank1_factor(sol.X), lifted.H), {}};
        auto m = gaussian_randomization(sol.X, lifted, params.sdr_randomizations, rng);
        if (!m) return {std::nullopt, "randomization produced no usable candidate"};
        return {std::move(m), {}};
    };
    auto p2 = [&](const LiftedP2<Real>& lifted) -> detail::P2Step<Real> {
        const auto sol = solve_sdp(p2_problem(lifted), dc.solver);
        if (sol.status == SdpStatus::infeasible_suspected) return {std::nullopt, "SDR reported infeasible_suspected"};
        if (relative_rank1_penalty(sol.X) <= dc.feas_tol) {
            const CVector<Real> f = leading_rank1_factor(sol.X);
            if (std::abs(f(f.size() - 1)) > Real(1e-9)) {
                const CVector<Real> v = unit_modulus_homogenized(f);
                const Real slack = lifted.a.empty() ? Real(0) : p2_min_slack(lifted, CVector<Real>(v.head(lifted.M)));
                if (slack >= -Real(1e-6)) return {recover_phases(v), {}};
            }
        }
        auto v = gaussian_randomization(sol.X, lifted, params.sdr_randomizations, rng);
        if (!v) return {std::nullopt, "randomization produced no feasible candidate"};
        return {recover_phases(*v), {}};
    };
    return detail::alternate<Real>(ch, sc, params, std::move(theta), p1, p2);
}

/// Fixed uniformly random theta, one DC solve for the decoding vector.
template <typename Real>
DesignResult<Real> random_phase_baseline(const ChannelSet<Real>& ch, const Scenario& sc,
                                         const AlgorithmParams<Real>& params, SeededRng& rng) {
    params.validate();
    ch.validate();
    return detail::single_p1(ch, sc, params, random_phases<Real>(ch.M(), rng));
}

/// Reflected path removed (G = 0), one DC solve for the decoding vector.
template <typename Real>
DesignResult<Real> no_irs_baseline(const ChannelSet<Real>& ch, const Scenario& sc, const AlgorithmParams<Real>& params) {
    params.validate();
    ch.validate();
    return detail::single_p1(ch.without_irs(), sc, params, PhaseConfig<Real>::zeros(ch.M()));
}

/// Dispatch on the algorithm tag. Every algorithm that needs theta^1 draws it
/// first from `rng`, so equal seeds give equal starting phases.
template <typename Real>
DesignResult<Real> run_algorithm(Algorithm a, const ChannelSet<Real>& ch, const Scenario& sc,
                                 const AlgorithmParams<Real>& params, SeededRng& rng) {
    switch (a) {
        case Algorithm::alternating_dc: return alternating_dc(ch, sc, params, rng);
        case Algorithm::alternating_sdr: return alternating_sdr(ch, sc, params, rng);
        case Algorithm::random_phase: return random_phase_baseline(ch, sc, params, rng);
        case Algorithm::no_irs: return no_irs_baseline(ch, sc, params);
    }
    throw InvalidInput("run_algorithm: unknown algorithm");
}

}  // namespace aircomp
