// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "aircomp/hermitian.hpp"

namespace aircomp {

// ---------------------------------------------------------------------------
// Problem and result types
// ---------------------------------------------------------------------------

/// Re Tr(A X) >= rhs
template <typename Real>
struct InequalityConstraint {
    HermitianMatrix<Real> A;
    Real rhs = 0;
};

/// X(index, index) = value
template <typename Real>
struct DiagonalConstraint {
    Eigen::Index index = 0;
    Real value = 1;
};

/// minimize Re Tr(C X)  s.t.  Re Tr(A_k X) >= d_k,  X_ii = b_i,  X PSD.
template <typename Real>
struct LiftedSdp {
    Eigen::Index dim = 0;
    HermitianMatrix<Real> cost;
    std::vector<InequalityConstraint<Real>> inequalities;
    std::vector<DiagonalConstraint<Real>> diagonal;

    void validate() const {
        if (dim < 1) throw InvalidInput("LiftedSdp: dim must be >= 1");
        if (cost.dim() != dim) throw InvalidInput("LiftedSdp: cost matrix has wrong dimension");
        for (std::size_t k = 0; k < inequalities.size(); ++k) {
            if (inequalities[k].A.dim() != dim)
                throw InvalidInput("LiftedSdp: constraint " + std::to_string(k) + " has wrong dimension");
            if (!std::isfinite(inequalities[k].rhs)) throw InvalidInput("LiftedSdp: non-finite rhs");
        }
        std::vector<bool> seen(static_cast<std::size_t>(dim), false);
        for (const auto& d : diagonal) {
            if (d.index < 0 || d.index >= dim) throw InvalidInput("LiftedSdp: diagonal index out of range");
            if (seen[static_cast<std::size_t>(d.index)]) throw InvalidInput("LiftedSdp: duplicate diagonal index");
            seen[static_cast<std::size_t>(d.index)] = true;
            if (!(d.value > 0) || !std::isfinite(d.value))
                throw InvalidInput("LiftedSdp: diagonal values must be positive");
        }
    }
};

enum class SdpStatus { optimal, max_iterations, infeasible_suspected };

inline const char* to_string(SdpStatus s) {
    switch (s) {
        case SdpStatus::optimal: return "optimal";
        case SdpStatus::max_iterations: return "max_iterations";
        case SdpStatus::infeasible_suspected: return "infeasible_suspected";
    }
    return "unknown";
}

template <typename Real>
struct SdpIterationLog {
    int iteration = 0;
    Real objective = 0;
    Real primal_residual = 0;
    Real dual_residual = 0;
    Real primal_tolerance = 0;
    Real dual_tolerance = 0;
    Real penalty = 0;
};

template <typename Real>
struct SdpSettings {
    Real tol_abs = Real(1e-7);
    Real tol_rel = Real(1e-7);
    int max_iters = 20000;
    Real penalty = Real(1);
    bool adaptive_penalty = true;
    Real relaxation = Real(1.6);
    /// Length of the windows compared by the primal stagnation test.
    int stagnation_window = 1000;
    int log_every = 1;
    std::function<void(const SdpIterationLog<Real>&)> log_sink;  // verbose mode when set
};

template <typename Real>
struct SdpSolution {
    HermitianMatrix<Real> X;
    SdpStatus status = SdpStatus::max_iterations;
    Real primal_residual = 0;
    Real dual_residual = 0;
    Real primal_tolerance = 0;
    Real dual_tolerance = 0;
    Real objective = 0;
    int iterations = 0;
    // Dual certificate, in the caller's units: S = C - sum_k y_k A_k - sum_i mu_i E_ii.
    RVector<Real> inequality_duals;
    RVector<Real> diagonal_duals;
    HermitianMatrix<Real> dual_slack;
    Real final_penalty = 1;
};

/// Starting point for solve_sdp. Duals are optional; without them the
/// solver starts from zero multipliers.
template <typename Real>
struct SdpWarmStart {
    HermitianMatrix<Real> X;
    std::optional<RVector<Real>> inequality_duals;
    std::optional<HermitianMatrix<Real>> dual_slack;
    std::optional<Real> penalty;

    static SdpWarmStart from(const SdpSolution<Real>& s) {
        return {s.X, s.inequality_duals, s.dual_slack, s.final_penalty};
    }
};

// ---------------------------------------------------------------------------
// Solver
// ---------------------------------------------------------------------------

namespace detail {

/// The problem after equilibration: X = tau * Y, rows normalized to unit
/// Frobenius norm, cost divided by its Frobenius norm.
template <typename Real>
struct ScaledSdp {
    using Mat = CMatrix<Real>;
    Eigen::Index n = 0;
    Eigen::Index p = 0;  // inequalities
    Eigen::Index q = 0;  // diagonal equalities
    Mat cost;
    std::vector<Mat> A;
    RVector<Real> row_norm;  // ||A_k||_F, 1 for zero rows
    RVector<Real> d;
    std::vector<Eigen::Index> diag_index;
    RVector<Real> b;
    Real tau = 1;
    Real cost_scale = 1;
    Eigen::LLT<Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>> gram;

    explicit ScaledSdp(const LiftedSdp<Real>& prob) : n(prob.dim) {
        p = static_cast<Eigen::Index>(prob.inequalities.size());
        q = static_cast<Eigen::Index>(prob.diagonal.size());
        row_norm.resize(p);
        // Scale of X: fixed diagonals pin it; otherwise the rows that push
        // X away from zero (positive rhs) do. Rows with negative rhs are
        // slack-friendly and can be arbitrarily loose.
        Real t_pos = 0, t_any = 0;
        for (Eigen::Index k = 0; k < p; ++k) {
            const auto& c = prob.inequalities[static_cast<std::size_t>(k)];
            const Real nk = c.A.frobenius_norm();
            row_norm(k) = nk > Real(0) ? nk : Real(1);
            if (nk > Real(0)) {
                t_any = std::max(t_any, std::abs(c.rhs) / nk);
                if (c.rhs > Real(0)) t_pos = std::max(t_pos, c.rhs / nk);
            }
        }
        Real t_diag = 0;
        for (const auto& dc : prob.diagonal) t_diag = std::max(t_diag, std::abs(dc.value));
        tau = t_diag > Real(0) ? t_diag : t_pos > Real(0) ? t_pos : t_any > Real(0) ? t_any : Real(1);

        A.reserve(static_cast<std::size_t>(p));
        d.resize(p);
        for (Eigen::Index k = 0; k < p; ++k) {
            const auto& c = prob.inequalities[static_cast<std::size_t>(k)];
            A.push_back(c.A.matrix() / row_norm(k));
            d(k) = c.rhs / (row_norm(k) * tau);
        }
        b.resize(q);
        for (Eigen::Index i = 0; i < q; ++i) {
            diag_index.push_back(prob.diagonal[static_cast<std::size_t>(i)].index);
            b(i) = prob.diagonal[static_cast<std::size_t>(i)].value / tau;
        }
        const Real cn = prob.cost.frobenius_norm();
        cost_scale = cn > Real(0) ? cn : Real(1);
        cost = prob.cost.matrix() / cost_scale;

        // Gram matrix of the constraint map L(X, s) = [<A_k, X> - s_k; X_ii].
        // The slack identity block keeps it positive definite.
        const Eigen::Index m = p + q;
        Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic> g =
            Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>::Zero(m, m);
        for (Eigen::Index k = 0; k < p; ++k) {
            for (Eigen::Index l = k; l < p; ++l) g(k, l) = g(l, k) = real_inner(A[k], A[l]);
            g(k, k) += Real(1);
            for (Eigen::Index i = 0; i < q; ++i)
                g(k, p + i) = g(p + i, k) = std::real(A[k](diag_index[i], diag_index[i]));
        }
        for (Eigen::Index i = 0; i < q; ++i) g(p + i, p + i) = Real(1);
        if (m > 0) gram.compute(g);
    }

    static Real real_inner(const Mat& a, const Mat& b) { return (a.conjugate().cwiseProduct(b)).real().sum(); }

    /// L(W, w) - r
    RVector<Real> constraint_residual(const Mat& w_mat, const RVector<Real>& w_slack) const {
        RVector<Real> r(p + q);
        for (Eigen::Index k = 0; k < p; ++k) r(k) = real_inner(A[k], w_mat) - w_slack(k) - d(k);
        for (Eigen::Index i = 0; i < q; ++i) r(p + i) = std::real(w_mat(diag_index[i], diag_index[i])) - b(i);
        return r;
    }

    /// Matrix part of L^*(nu).
    Mat adjoint_matrix(const RVector<Real>& nu) const {
        Mat out = Mat::Zero(n, n);
        for (Eigen::Index k = 0; k < p; ++k) out += nu(k) * A[k];
        for (Eigen::Index i = 0; i < q; ++i) out(diag_index[i], diag_index[i]) += nu(p + i);
        return out;
    }
};

template <typename Real>
class PsdProjector {
public:
    explicit PsdProjector(Eigen::Index n) : es_(n) {}

    /// In-place projection of a Hermitian matrix onto the PSD cone.
    void project(CMatrix<Real>& s) {
        const Eigen::Index n = s.rows();
        es_.compute(s, Eigen::ComputeEigenvectors);
        const auto& w = es_.eigenvalues();
        Eigen::Index first = 0;
        while (first < n && w(first) <= Real(0)) ++first;
        const Eigen::Index k = n - first;
        if (k == 0) {
            s.setZero();
            return;
        }
        scaled_ = es_.eigenvectors().rightCols(k) * w.tail(k).cwiseSqrt().asDiagonal();
        s.noalias() = scaled_ * scaled_.adjoint();
    }

private:
    Eigen::SelfAdjointEigenSolver<CMatrix<Real>> es_;
    CMatrix<Real> scaled_;
};

}  // namespace detail

/// ADMM between the affine constraint set (with slack variables for the
/// inequalities) and the cone PSD x R_+^p. The affine projection reuses one
/// Cholesky factorization of the constraint Gram matrix.
template <typename Real>
SdpSolution<Real> solve_sdp(const LiftedSdp<Real>& problem, const SdpSettings<Real>& settings = {},
                            const SdpWarmStart<Real>* warm = nullptr) {
    using Mat = CMatrix<Real>;
    using Vec = RVector<Real>;
    problem.validate();
    if (!(settings.tol_abs > 0) || !(settings.tol_rel >= 0) || settings.max_iters < 1)
        throw InvalidInput("solve_sdp: tolerances must be positive and max_iters >= 1");

    const detail::ScaledSdp<Real> sp(problem);
    const Eigen::Index n = sp.n, p = sp.p, q = sp.q;
    detail::PsdProjector<Real> projector(n);

    Real sigma = settings.penalty;
    Mat Z = Mat::Zero(n, n), U = Mat::Zero(n, n);
    Vec t = Vec::Zero(p), u = Vec::Zero(p);
    if (warm != nullptr) {
        if (warm->X.dim() != n) throw InvalidInput("solve_sdp: warm start has wrong dimension");
        if (warm->penalty) sigma = *warm->penalty;
        Z = warm->X.matrix() / sp.tau;
        for (Eigen::Index k = 0; k < p; ++k)
            t(k) = std::max(Real(0), detail::ScaledSdp<Real>::real_inner(sp.A[k], Z) - sp.d(k));
        if (warm->dual_slack && warm->dual_slack->dim() == n)
            U = -warm->dual_slack->matrix() / (sp.cost_scale * sigma);
        if (warm->inequality_duals && warm->inequality_duals->size() == p)
            for (Eigen::Index k = 0; k < p; ++k)
                u(k) = -(*warm->inequality_duals)(k) * sp.row_norm(k) / (sp.cost_scale * sigma);
    }

    const Real alpha = settings.relaxation;
    Mat W(n, n), X(n, n), Xr(n, n), Z_old(n, n);
    Vec w(p), s(p), sr(p), t_old(p), nu(p + q);

    SdpSolution<Real> out;
    // Stagnation: over a window of iterations neither the final nor the
    // smallest primal ratio improved by 1% on the previous window's. The
    // minimum alone trips on warm starts (small early ratios), the final
    // value alone on penalty updates.
    Real checkpoint_ratio = std::numeric_limits<Real>::infinity();
    Real window_min = std::numeric_limits<Real>::infinity();
    Real prev_window_min = std::numeric_limits<Real>::infinity();
    Real rp = 0, rd = 0, eps_p = 0, eps_d = 0;
    int it = 0;
    out.status = SdpStatus::max_iterations;

    for (it = 1; it <= settings.max_iters; ++it) {
        // Affine step: project (Z - U - C/sigma, t - u) onto L(x) = r.
        W = Z - U - sp.cost / sigma;
        w = t - u;
        if (p + q > 0) {
            nu = sp.gram.solve(sp.constraint_residual(W, w));
            X = W - sp.adjoint_matrix(nu);
            s = w + nu.head(p);
        } else {
            X = W;
            s = w;
        }
        // Cone step with over-relaxation.
        Z_old = Z;
        t_old = t;
        Xr = alpha * X + (Real(1) - alpha) * Z_old;
        sr = alpha * s + (Real(1) - alpha) * t_old;
        Z = Xr + U;
        Z = (Z + Z.adjoint()).eval() * Real(0.5);
        projector.project(Z);
        t = (sr + u).cwiseMax(Real(0));
        U += Xr - Z;
        u += sr - t;

        rp = std::sqrt((X - Z).squaredNorm() + (s - t).squaredNorm());
        rd = sigma * std::sqrt((Z - Z_old).squaredNorm() + (t - t_old).squaredNorm());
        // Slacks of loose rows can be huge; leave them out of the relative term.
        const Real xnorm = X.norm();
        const Real znorm = Z.norm();
        eps_p = settings.tol_abs + settings.tol_rel * std::max(xnorm, znorm);
        eps_d = settings.tol_abs + settings.tol_rel * sigma * std::sqrt(U.squaredNorm() + u.squaredNorm());

        if (settings.log_sink && (it % std::max(1, settings.log_every) == 0)) {
            SdpIterationLog<Real> row;
            row.iteration = it;
            row.objective = sp.tau * sp.cost_scale * detail::ScaledSdp<Real>::real_inner(sp.cost, Z);
            row.primal_residual = rp;
            row.dual_residual = rd;
            row.primal_tolerance = eps_p;
            row.dual_tolerance = eps_d;
            row.penalty = sigma;
            settings.log_sink(row);
        }

        if (rp <= eps_p && rd <= eps_d) {
            out.status = SdpStatus::optimal;
            break;
        }

        const Real ratio = rp / eps_p;
        window_min = std::min(window_min, ratio);
        if (it % settings.stagnation_window == 0) {
            if (window_min > Real(1) && ratio >= Real(0.99) * checkpoint_ratio &&
                window_min >= Real(0.99) * prev_window_min) {
                out.status = SdpStatus::infeasible_suspected;
                break;
            }
            checkpoint_ratio = ratio;
            prev_window_min = window_min;
            window_min = std::numeric_limits<Real>::infinity();
        }
        if (!std::isfinite(rp) || U.norm() > Real(1e14)) {
            out.status = SdpStatus::infeasible_suspected;
            break;
        }

        if (settings.adaptive_penalty && it % 25 == 0) {
            const Real pr = rp / eps_p, dr = rd / eps_d;
            Real factor = 1;
            if (pr > Real(10) * dr) factor = Real(2);
            else if (dr > Real(10) * pr) factor = Real(0.5);
            if (factor != Real(1)) {
                sigma *= factor;
                U /= factor;
                u /= factor;
            }
        }
    }
    out.iterations = std::min(it, settings.max_iters);

    // Multipliers: diagonal ones from the last affine step (mu = -sigma nu);
    // inequality ones from the slack cone, y = -sigma u. u agrees with nu at
    // convergence but is exactly nonpositive and zero on loose rows. S = -sigma U.
    out.X = HermitianMatrix<Real>(Z * sp.tau);
    out.objective = inner(problem.cost, out.X);
    out.primal_residual = rp;
    out.dual_residual = rd;
    out.primal_tolerance = eps_p;
    out.dual_tolerance = eps_d;
    out.final_penalty = sigma;
    out.inequality_duals.resize(p);
    out.diagonal_duals.resize(q);
    if (p + q > 0) {
        for (Eigen::Index k = 0; k < p; ++k) out.inequality_duals(k) = std::max(Real(0), -sigma * u(k)) * sp.cost_scale / sp.row_norm(k);  // max() only turns -0 into 0
        for (Eigen::Index i = 0; i < q; ++i) out.diagonal_duals(i) = -sigma * nu(p + i) * sp.cost_scale;
    }
    out.dual_slack = HermitianMatrix<Real>(-sigma * sp.cost_scale * U);
    return out;
}

// ---------------------------------------------------------------------------
// KKT recomputation
// ---------------------------------------------------------------------------

/// Scale-free residuals recomputed from (X, y, mu) and the problem data.
template <typename Real>
struct KktReport {
    Real primal_infeasibility = 0;  // worst constraint violation, relative
    Real psd_violation = 0;         // max(0, -lambda_min(X)) / ||X||_2
    Real dual_infeasibility = 0;    // negative y or indefinite S, relative
    Real complementarity = 0;       // |<X,S>| and y_k * slack_k, relative
    Real primal_objective = 0;
    Real dual_objective = 0;
    Real objective_gap = 0;         // primal - dual, absolute
    Real relative_gap = 0;

    Real max_residual() const {
        return std::max({primal_infeasibility, psd_violation, dual_infeasibility, complementarity, relative_gap});
    }
};

template <typename Real>
KktReport<Real> kkt_report(const LiftedSdp<Real>& problem, const SdpSolution<Real>& sol) {
    problem.validate();
    const auto& X = sol.X;
    if (X.dim() != problem.dim) throw InvalidInput("kkt_report: solution has wrong dimension");
    const auto p = static_cast<Eigen::Index>(problem.inequalities.size());
    const auto q = static_cast<Eigen::Index>(problem.diagonal.size());
    if (sol.inequality_duals.size() != p || sol.diagonal_duals.size() != q)
        throw InvalidInput("kkt_report: dual vector sizes do not match the problem");
    constexpr Real tiny = std::numeric_limits<Real>::min();

    KktReport<Real> r;
    const Real xf = X.frobenius_norm();
    const Real cf = problem.cost.frobenius_norm();

    CMatrix<Real> S = problem.cost.matrix();
    Real dual_obj = 0;
    Real y_comp = 0;
    for (Eigen::Index k = 0; k < p; ++k) {
        const auto& c = problem.inequalities[static_cast<std::size_t>(k)];
        const Real y = sol.inequality_duals(k);
        const Real ax = inner(c.A, X);
        const Real scale = std::max({std::abs(c.rhs), c.A.frobenius_norm() * xf, tiny});
        r.primal_infeasibility = std::max(r.primal_infeasibility, std::max(Real(0), c.rhs - ax) / scale);
        S -= y * c.A.matrix();
        dual_obj += y * c.rhs;
        const Real ys = std::max(std::abs(y) * c.A.frobenius_norm(), tiny);
        r.dual_infeasibility = std::max(r.dual_infeasibility, std::max(Real(0), -y) * c.A.frobenius_norm() /
                                                                  std::max(cf, ys));
        y_comp = std::max(y_comp, std::abs(y * (ax - c.rhs)));
    }
    for (Eigen::Index i = 0; i < q; ++i) {
        const auto& dc = problem.diagonal[static_cast<std::size_t>(i)];
        const Real xi = std::real(X(dc.index, dc.index));
        r.primal_infeasibility = std::max(r.primal_infeasibility, std::abs(xi - dc.value) / std::max(dc.value, tiny));
        S(dc.index, dc.index) -= sol.diagonal_duals(i);
        dual_obj += sol.diagonal_duals(i) * dc.value;
    }
    const HermitianMatrix<Real> Sh(S);
    const Real sf = Sh.frobenius_norm();

    const auto xeig = eigh(X);
    if (X.dim() > 0 && xeig.eigenvalues(0) > Real(0))
        r.psd_violation = std::max(Real(0), -xeig.eigenvalues(X.dim() - 1)) / xeig.eigenvalues(0);
    else if (X.dim() > 0)
        r.psd_violation = xeig.eigenvalues(X.dim() - 1) < Real(0) ? Real(1) : Real(0);

    const auto seig = eigh(Sh);
    if (Sh.dim() > 0)
        r.dual_infeasibility = std::max(r.dual_infeasibility,
                                        std::max(Real(0), -seig.eigenvalues(Sh.dim() - 1)) / std::max({cf, sf, tiny}));

    // Both terms are pieces of the duality gap, so they share its scale.
    // ||S|| alone is useless here: it can be near zero at the optimum.
    r.primal_objective = inner(problem.cost, X);
    const Real gap_scale = std::max({cf * xf, std::abs(r.primal_objective), std::abs(dual_obj), tiny});
    r.complementarity = std::max(y_comp, std::abs(inner(X, Sh))) / gap_scale;
    r.dual_objective = dual_obj;
    r.objective_gap = r.primal_objective - r.dual_objective;
    r.relative_gap = std::abs(r.objective_gap) /
                     std::max({cf * xf, std::abs(r.primal_objective), std::abs(r.dual_objective), tiny});
    return r;
}

}  // namespace aircomp
