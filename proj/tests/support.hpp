// SPDX-License-Identifier: Apache-2.0
// Generators and reference computations shared by the test suites. The
// references avoid Eigen's decompositions on purpose.
#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "aircomp/hermitian.hpp"
#include "aircomp/model.hpp"
#include "aircomp/scenario.hpp"

namespace testing {

using aircomp::CMatrixd;
using aircomp::CVectord;
using aircomp::HermitianMatrixd;
using aircomp::SeededRng;
using cd = std::complex<double>;

inline CVectord random_vector(SeededRng& rng, Eigen::Index n, double scale = 1.0) {
    CVectord v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = scale * rng.complex_normal();
    return v;
}

inline CMatrixd random_matrix(SeededRng& rng, Eigen::Index r, Eigen::Index c, double scale = 1.0) {
    CMatrixd a(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
        for (Eigen::Index i = 0; i < r; ++i) a(i, j) = scale * rng.complex_normal();
    return a;
}

inline HermitianMatrixd random_hermitian(SeededRng& rng, Eigen::Index n) {
    return HermitianMatrixd(random_matrix(rng, n, n));
}

/// B B^H with B n x rank.
inline HermitianMatrixd random_psd(SeededRng& rng, Eigen::Index n, Eigen::Index rank) {
    const CMatrixd b = random_matrix(rng, n, rank);
    return HermitianMatrixd(b * b.adjoint());
}

/// Channels with unit-variance entries; M may be 0.
inline aircomp::ChannelSetd random_channels(SeededRng& rng, int N, int M, int K, double direct = 1.0,
                                            double reflected = 1.0) {
    aircomp::ChannelSetd ch;
    for (int k = 0; k < K; ++k) ch.h_direct.push_back(random_vector(rng, N, direct));
    for (int k = 0; k < K; ++k) ch.h_irs_user.push_back(random_vector(rng, M, reflected));
    ch.G = random_matrix(rng, N, M, reflected);
    return ch;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

/// Tr(A B) by explicit summation.
inline cd trace_product(const CMatrixd& a, const CMatrixd& b) {
    cd acc = 0;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, i);
    return acc;
}

/// x^H A y by explicit summation.
inline cd quad_form(const CVectord& x, const CMatrixd& a, const CVectord& y) {
    cd acc = 0;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) acc += std::conj(x(i)) * a(i, j) * y(j);
    return acc;
}

inline cd dot_h(const CVectord& x, const CVectord& y) {
    cd acc = 0;
    for (Eigen::Index i = 0; i < x.size(); ++i) acc += std::conj(x(i)) * y(i);
    return acc;
}

/// Largest eigenvalue of a PSD matrix by power iteration with a Rayleigh
/// quotient; `iters` should be large for clustered spectra.
inline double power_iteration(const HermitianMatrixd& a, int iters = 5000, std::uint64_t seed = 99) {
    SeededRng rng(seed);
    CVectord v = random_vector(rng, a.dim());
    v /= v.norm();
    double lambda = 0;
    for (int i = 0; i < iters; ++i) {
        CVectord w = a.matrix() * v;
        const double nw = w.norm();
        if (nw == 0) return 0;
        v = w / nw;
        lambda = std::real(quad_form(v, a.matrix(), v));
    }
    return lambda;
}

/// Random correlation-like PSD matrix with unit diagonal: normalized Gram
/// matrix of random vectors.
inline HermitianMatrixd random_unit_diagonal_psd(SeededRng& rng, Eigen::Index n, Eigen::Index rank) {
    CMatrixd b = random_matrix(rng, rank, n);
    for (Eigen::Index j = 0; j < n; ++j) b.col(j) /= b.col(j).norm();
    return HermitianMatrixd(b.adjoint() * b);
}

}  // namespace testing
