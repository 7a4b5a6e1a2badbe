// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "aircomp/hermitian.hpp"
#include "aircomp/model.hpp"
#include "aircomp/sdp.hpp"

namespace aircomp {

template <typename Real>
struct DcParams {
    Real rho = Real(5);          // rank penalty weight, decoding-vector problem only
    Real eps_dc = Real(1e-8);    // relative objective-decrease threshold
    int max_dc_iters = 100;
    Real feas_tol = Real(1e-6);  // relative penalty (Tr X - ||X||_2) / Tr X counted as zero
    int stagnation_iters = 5;    // phase problem: stalled iterations before declaring infeasible
    SdpSettings<Real> solver{};

    void validate() const {
        if (!(rho > 0)) throw InvalidInput("DcParams: rho must be > 0");
        if (!(eps_dc > 0)) throw InvalidInput("DcParams: eps_dc must be > 0");
        if (!(feas_tol > 0)) throw InvalidInput("DcParams: feas_tol must be > 0");
        if (max_dc_iters < 1) throw InvalidInput("DcParams: max_dc_iters must be >= 1");
        if (stagnation_iters < 1) throw InvalidInput("DcParams: stagnation_iters must be >= 1");
    }
};

template <typename Real>
struct DcIterate {
    Real objective = 0;  // penalized objective
    Real penalty = 0;    // Tr X - ||X||_2
    SdpStatus status = SdpStatus::optimal;
};

/// Accepted iterates only, starting with the initial point.
template <typename Real>
struct DcTrace {
    std::vector<DcIterate<Real>> iterates;
    int rejected = 0;  // subproblem solutions that would have increased the objective
};

/// Tr X - sigma_1(X); zero exactly for rank-one PSD X.
template <typename Real>
Real rank1_penalty(const HermitianMatrix<Real>& x) {
    return x.trace() - spectral_norm(x);
}

template <typename Real>
Real relative_rank1_penalty(const HermitianMatrix<Real>& x) {
    const Real tr = x.trace();
    return tr > Real(0) ? rank1_penalty(x) / tr : Real(0);
}

/// Convex majorizer at the linearization point: cost C + rho (I - v1 v1^H).
template <typename Real>
LiftedSdp<Real> dc_iterate(const LiftedSdp<Real>& problem, const HermitianMatrix<Real>& linearization_point, Real rho) {
    if (linearization_point.dim() != problem.dim) throw InvalidInput("dc_iterate: dimension mismatch");
    LiftedSdp<Real> out = problem;
    if (rho == Real(0)) return out;
    const auto sub = spectral_subgradient(linearization_point);
    out.cost = HermitianMatrix<Real>(problem.cost.matrix() +
                                     rho * (CMatrix<Real>::Identity(problem.dim, problem.dim) - sub.matrix()));
    return out;
}

/// minimize Tr M  s.t.  Tr(M H_k) >= 1,  M PSD
template <typename Real>
LiftedSdp<Real> p1_problem(const LiftedP1<Real>& lifted) {
    if (lifted.H.empty()) throw InvalidInput("p1_problem: no users");
    LiftedSdp<Real> sdp;
    sdp.dim = lifted.H.front().dim();
    sdp.cost = HermitianMatrix<Real>::identity(sdp.dim);
    for (const auto& h : lifted.H) sdp.inequalities.push_back({h, Real(1)});
    return sdp;
}

/// find V  s.t.  Re Tr(R_k V) >= 1 - |c_k|^2,  V_ii = 1,  V PSD
template <typename Real>
LiftedSdp<Real> p2_problem(const LiftedP2<Real>& lifted) {
    LiftedSdp<Real> sdp;
    sdp.dim = lifted.M + 1;
    sdp.cost = HermitianMatrix<Real>::zero(sdp.dim);
    for (std::size_t k = 0; k < lifted.R.size(); ++k)
        sdp.inequalities.push_back({lifted.R[k], Real(1) - std::norm(lifted.c[k])});
    for (Eigen::Index i = 0; i < sdp.dim; ++i) sdp.diagonal.push_back({i, Real(1)});
    return sdp;
}

// ---------------------------------------------------------------------------
// Decoding-vector problem
// ---------------------------------------------------------------------------

enum class DcStatus { rank_one, non_rank_one, solver_failure };

inline const char* to_string(DcStatus s) {
    switch (s) {
        case DcStatus::rank_one: return "rank_one";
        case DcStatus::non_rank_one: return "non_rank_one";
        case DcStatus::solver_failure: return "solver_failure";
    }
    return "unknown";
}

template <typename Real>
struct DcP1Result {
    CVector<Real> m;
    HermitianMatrix<Real> M;
    DcTrace<Real> trace;
    DcStatus status = DcStatus::solver_failure;
    Real relative_penalty = 0;
    std::string message;
};

/// Scales m so that min_k m^H H_k m = 1 exactly.
template <typename Real>
CVector<Real> rescale_to_feasible(const CVector<Real>& m, const std::vector<HermitianMatrix<Real>>& H) {
    Real lo = std::numeric_limits<Real>::infinity();
    for (const auto& h : H) lo = std::min(lo, std::real(m.dot(h.matrix() * m)));
    if (!(lo > Real(0))) throw DegenerateChannel("rescale_to_feasible: decoding vector orthogonal to a channel");
    return m / std::sqrt(lo);
}

/// Penalized DC iterations for the decoding-vector problem, started from
/// `init` or from the plain SDR solution.
template <typename Real>
DcP1Result<Real> dc_solve_p1(const LiftedP1<Real>& lifted, const DcParams<Real>& params,
                             const std::optional<HermitianMatrix<Real>>& init = std::nullopt) {
    params.validate();
    const LiftedSdp<Real> base = p1_problem(lifted);
    DcP1Result<Real> res;
    const auto objective = [&](const HermitianMatrix<Real>& x, Real& pen) {
        pen = rank1_penalty(x);
        return inner(base.cost, x) + params.rho * pen;
    };

    std::optional<SdpSolution<Real>> last;
    HermitianMatrix<Real> x;
    SdpStatus init_status = SdpStatus::optimal;
    if (init) {
        if (init->dim() != base.dim) throw InvalidInput("dc_solve_p1: init has wrong dimension");
        x = *init;
    } else {
        auto sdr = solve_sdp(base, params.solver);
        init_status = sdr.status;
        if (sdr.status == SdpStatus::infeasible_suspected) {
            res.status = DcStatus::solver_failure;
            res.message = "SDR initialization reported infeasible_suspected";
            res.trace.iterates.push_back({Real(0), Real(0), sdr.status});
            return res;
        }
        x = sdr.X;
        last = std::move(sdr);
    }
    Real pen = 0;
    Real f = objective(x, pen);
    res.trace.iterates.push_back({f, pen, init_status});

    for (int t = 1; t <= params.max_dc_iters; ++t) {
        const auto sub = dc_iterate(base, x, params.rho);
        SdpWarmStart<Real> warm = last ? SdpWarmStart<Real>::from(*last) : SdpWarmStart<Real>{x, {}, {}, {}};
        auto sol = solve_sdp(sub, params.solver, &warm);
        if (sol.status == SdpStatus::infeasible_suspected) {
            res.status = DcStatus::solver_failure;
            res.message = "DC subproblem reported infeasible_suspected at iteration " + std::to_string(t);
            res.trace.iterates.push_back({f, pen, sol.status});
            res.M = x;
            return res;
        }
        Real pen_new = 0;
        const Real f_new = objective(sol.X, pen_new);
        const Real decrease = f - f_new;
        if (decrease < Real(0)) {
            // Subproblem round-off can only move the objective up by solver
            // tolerance; keep the incumbent and stop.
            ++res.trace.rejected;
            break;
        }
        x = sol.X;
        f = f_new;
        pen = pen_new;
        res.trace.iterates.push_back({f, pen, sol.status});
        last = std::move(sol);
        if (decrease < params.eps_dc * std::abs(f + decrease)) break;
    }

    res.M = x;
    res.relative_penalty = relative_rank1_penalty(x);
    res.status = res.relative_penalty <= params.feas_tol ? DcStatus::rank_one : DcStatus::non_rank_one;
    if (res.status == DcStatus::non_rank_one) res.message = "terminal relative penalty above feas_tol";
    res.m = rescale_to_feasible(leading_rank1_factor(x), lifted.H);
    return res;
}

// ---------------------------------------------------------------------------
// Phase feasibility problem
// ---------------------------------------------------------------------------

template <typename Real>
struct DcP2Result {
    bool feasible = false;
    CVector<Real> v_tilde;  // [unit-modulus v; 1] when feasible
    HermitianMatrix<Real> V;
    DcTrace<Real> trace;
    Real relative_penalty = 0;
    std::string message;
};

/// min_k |a_k^H v + c_k|^2 - 1 for a phase vector v.
template <typename Real>
Real p2_min_slack(const LiftedP2<Real>& lifted, const CVector<Real>& v) {
    Real lo = std::numeric_limits<Real>::infinity();
    for (std::size_t k = 0; k < lifted.a.size(); ++k)
        lo = std::min(lo, std::norm(lifted.a[k].dot(v) + lifted.c[k]) - Real(1));
    return lo;
}

/// Entry-wise unit-modulus repair of v / t; returns [v; 1].
template <typename Real>
CVector<Real> unit_modulus_homogenized(const CVector<Real>& v_tilde) {
    const auto phases = recover_phases(v_tilde);
    CVector<Real> out(v_tilde.size());
    out.head(phases.size()) = phases.unit_vector();
    out(phases.size()) = Complex<Real>(1, 0);
    return out;
}

/// Minimizes Tr V - ||V||_2 over the lifted phase constraints. Declares the
/// problem feasible only if the repaired unit-modulus vector satisfies every
/// original constraint within 1e-6.
template <typename Real>
DcP2Result<Real> dc_solve_p2(const LiftedP2<Real>& lifted, const DcParams<Real>& params,
                             const std::optional<HermitianMatrix<Real>>& init = std::nullopt) {
    params.validate();
    const LiftedSdp<Real> base = p2_problem(lifted);
    DcP2Result<Real> res;

    std::optional<SdpSolution<Real>> last;
    HermitianMatrix<Real> x;
    SdpStatus init_status = SdpStatus::optimal;
    if (init) {
        if (init->dim() != base.dim) throw InvalidInput("dc_solve_p2: init has wrong dimension");
        x = *init;
    } else {
        auto sdr = solve_sdp(base, params.solver);
        init_status = sdr.status;
        if (sdr.status == SdpStatus::infeasible_suspected) {
            res.message = "SDR relaxation reported infeasible_suspected";
            res.trace.iterates.push_back({Real(0), Real(0), sdr.status});
            return res;
        }
        x = sdr.X;
        last = std::move(sdr);
    }
    Real pen = rank1_penalty(x);
    res.trace.iterates.push_back({pen, pen, init_status});
    const Real scale = std::max(Real(1), x.trace());

    int stalled = 0;
    for (int t = 1; t <= params.max_dc_iters; ++t) {
        const auto sub = dc_iterate(base, x, Real(1));
        SdpWarmStart<Real> warm = last ? SdpWarmStart<Real>::from(*last) : SdpWarmStart<Real>{x, {}, {}, {}};
        auto sol = solve_sdp(sub, params.solver, &warm);
        if (sol.status == SdpStatus::infeasible_suspected) {
            res.message = "DC subproblem reported infeasible_suspected at iteration " + std::to_string(t);
            res.trace.iterates.push_back({pen, pen, sol.status});
            break;
        }
        const Real pen_new = rank1_penalty(sol.X);
        const Real decrease = pen - pen_new;
        if (decrease >= Real(0)) {
            x = sol.X;
            pen = pen_new;
            res.trace.iterates.push_back({pen, pen, sol.status});
            last = std::move(sol);
        } else {
            ++res.trace.rejected;
        }
        if (decrease < params.eps_dc * scale) {
            if (pen <= params.feas_tol * x.trace()) break;
            if (++stalled >= params.stagnation_iters) {
                res.message = "penalty stalled above feas_tol";
                break;
            }
        } else {
            stalled = 0;
        }
    }

    res.V = x;
    res.relative_penalty = relative_rank1_penalty(x);
    if (res.relative_penalty > params.feas_tol) {
        if (res.message.empty()) res.message = "terminal relative penalty above feas_tol";
        return res;
    }
    const CVector<Real> factor = leading_rank1_factor(x);
    if (!(std::abs(factor(factor.size() - 1)) > Real(1e-9))) {
        res.message = "rank-one factor has vanishing auxiliary entry";
        return res;
    }
    res.v_tilde = unit_modulus_homogenized(factor);
    const Real slack = lifted.a.empty() ? Real(0) : p2_min_slack(lifted, CVector<Real>(res.v_tilde.head(lifted.M)));
    if (slack < -Real(1e-6)) {
        res.message = "unit-modulus repair violates a constraint";
        return res;
    }
    res.feasible = true;
    return res;
}

}  // namespace aircomp
