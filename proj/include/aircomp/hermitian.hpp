// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include "aircomp/errors.hpp"

namespace aircomp {

template <typename Real>
using Complex = std::complex<Real>;
template <typename Real>
using CVector = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, 1>;
template <typename Real>
using CMatrix = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using RVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

namespace detail {

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& a) {
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            const auto z = a(i, j);
            if (!std::isfinite(std::real(z)) || !std::isfinite(std::imag(z))) return false;
        }
    return true;
}

}  // namespace detail

/// Dense complex Hermitian matrix. The stored matrix is exactly Hermitian:
/// every constructor replaces its input A by (A + A^H)/2.
template <typename Real>
class HermitianMatrix {
public:
    using Scalar = Complex<Real>;
    using Matrix = CMatrix<Real>;

    HermitianMatrix() = default;

    template <typename Derived>
    explicit HermitianMatrix(const Eigen::MatrixBase<Derived>& a) {
        if (a.rows() != a.cols())
            throw InvalidInput("HermitianMatrix: input is " + std::to_string(a.rows()) + "x" +
                               std::to_string(a.cols()));
        Matrix m = a.template cast<Scalar>();
        if (!detail::all_finite(m)) throw InvalidInput("HermitianMatrix: non-finite entry");
        data_ = (m + m.adjoint()) * Real(0.5);
        for (Eigen::Index i = 0; i < data_.rows(); ++i) data_(i, i) = Scalar(std::real(data_(i, i)), 0);
    }

    static HermitianMatrix zero(Eigen::Index n) { return HermitianMatrix(Matrix::Zero(n, n)); }
    static HermitianMatrix identity(Eigen::Index n) { return HermitianMatrix(Matrix::Identity(n, n)); }

    /// v v^H
    template <typename Derived>
    static HermitianMatrix outer(const Eigen::MatrixBase<Derived>& v) {
        return HermitianMatrix(v * v.adjoint());
    }

    Eigen::Index dim() const { return data_.rows(); }
    const Matrix& matrix() const { return data_; }
    Scalar operator()(Eigen::Index i, Eigen::Index j) const { return data_(i, j); }

    Real trace() const { return data_.diagonal().real().sum(); }
    Real frobenius_norm() const { return data_.norm(); }

    HermitianMatrix operator+(const HermitianMatrix& o) const { return HermitianMatrix(data_ + o.data_); }
    HermitianMatrix operator-(const HermitianMatrix& o) const { return HermitianMatrix(data_ - o.data_); }
    HermitianMatrix operator*(Real s) const { return HermitianMatrix(data_ * s); }
    friend HermitianMatrix operator*(Real s, const HermitianMatrix& a) { return a * s; }

private:
    Matrix data_;
};

using HermitianMatrixd = HermitianMatrix<double>;
using CVectord = CVector<double>;
using CMatrixd = CMatrix<double>;

/// Real inner product Re Tr(A^H B); exact for Hermitian arguments.
template <typename Real>
Real inner(const HermitianMatrix<Real>& a, const HermitianMatrix<Real>& b) {
    if (a.dim() != b.dim()) throw InvalidInput("inner: dimension mismatch");
    return (a.matrix().conjugate().cwiseProduct(b.matrix())).real().sum();
}

template <typename Real>
struct EigDecomposition {
    RVector<Real> eigenvalues;    // descending
    CMatrix<Real> eigenvectors;   // column i pairs with eigenvalues(i)
};

template <typename Real>
EigDecomposition<Real> eigh(const HermitianMatrix<Real>& a) {
    const Eigen::Index n = a.dim();
    EigDecomposition<Real> out;
    if (n == 0) return out;
    Eigen::SelfAdjointEigenSolver<CMatrix<Real>> es(a.matrix(), Eigen::ComputeEigenvectors);
    if (es.info() != Eigen::Success) throw InvalidInput("eigh: eigensolver did not converge");
    out.eigenvalues = es.eigenvalues().reverse();
    out.eigenvectors = es.eigenvectors().rowwise().reverse();
    return out;
}

/// Largest eigenvalue; the input must be PSD up to a relative 1e-10.
template <typename Real>
Real spectral_norm(const HermitianMatrix<Real>& a) {
    if (a.dim() == 0) return Real(0);
    Eigen::SelfAdjointEigenSolver<CMatrix<Real>> es(a.matrix(), Eigen::EigenvaluesOnly);
    const Real lo = es.eigenvalues()(0);
    const Real hi = es.eigenvalues()(a.dim() - 1);
    if (lo < -Real(1e-10) * std::max(Real(1), std::abs(hi)))
        throw InvalidInput("spectral_norm: matrix is not positive semidefinite");
    return std::max(hi, Real(0));
}

/// Frobenius-nearest PSD matrix: negative eigenvalues clamped to zero.
template <typename Real>
HermitianMatrix<Real> psd_project(const HermitianMatrix<Real>& s) {
    const Eigen::Index n = s.dim();
    if (n == 0) return s;
    Eigen::SelfAdjointEigenSolver<CMatrix<Real>> es(s.matrix(), Eigen::ComputeEigenvectors);
    const auto& w = es.eigenvalues();
    Eigen::Index first = 0;  // eigenvalues are ascending
    while (first < n && w(first) <= Real(0)) ++first;
    const Eigen::Index k = n - first;
    if (k == 0) return HermitianMatrix<Real>::zero(n);
    const auto u = es.eigenvectors().rightCols(k);
    CMatrix<Real> scaled = u * w.tail(k).cwiseSqrt().asDiagonal();
    return HermitianMatrix<Real>(scaled * scaled.adjoint());
}

/// Rotates v so its largest-magnitude entry is real and nonnegative.
template <typename Real>
CVector<Real> canonical_phase(CVector<Real> v) {
    if (v.size() == 0) return v;
    Eigen::Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    const Real mag = std::abs(v(imax));
    if (mag > Real(0)) v *= std::conj(v(imax)) / mag;
    return v;
}

/// Unit leading eigenvector. When the top eigenvalue is repeated (relative
/// gap below 1e-9) the all-ones vector is projected onto the leading
/// eigenspace, which does not depend on the basis the eigensolver picked;
/// if that projection vanishes the eigensolver's first vector is used.
template <typename Real>
CVector<Real> leading_eigenvector(const HermitianMatrix<Real>& x) {
    const auto eig = eigh(x);
    const Eigen::Index n = x.dim();
    const Real top = eig.eigenvalues(0);
    const Real gap_tol = Real(1e-9) * std::max(std::abs(top), std::numeric_limits<Real>::min());
    Eigen::Index mult = 1;
    while (mult < n && top - eig.eigenvalues(mult) <= gap_tol) ++mult;
    if (mult > 1) {
        const auto basis = eig.eigenvectors.leftCols(mult);
        const CVector<Real> ones = CVector<Real>::Ones(n);
        CVector<Real> proj = basis * (basis.adjoint() * ones);
        const Real pn = proj.norm();
        if (pn > Real(1e-8) * std::sqrt(static_cast<Real>(n))) return proj / pn;
    }
    return eig.eigenvectors.col(0);
}

/// v1 v1^H for a unit leading eigenvector v1: a subgradient of the spectral
/// norm at a PSD matrix.
template <typename Real>
HermitianMatrix<Real> spectral_subgradient(const HermitianMatrix<Real>& x) {
    return HermitianMatrix<Real>::outer(leading_eigenvector(x));
}

/// sqrt(sigma_1) v1 with the canonical global phase. Equals the exact factor
/// when X is rank-one; callers check the rank-one residual themselves.
template <typename Real>
CVector<Real> leading_rank1_factor(const HermitianMatrix<Real>& x) {
    if (x.dim() == 0) return CVector<Real>();
    const auto eig = eigh(x);
    const Real s1 = std::max(eig.eigenvalues(0), Real(0));
    if (s1 == Real(0)) return CVector<Real>::Zero(x.dim());
    return canonical_phase<Real>(std::sqrt(s1) * eig.eigenvectors.col(0));
}

}  // namespace aircomp
