// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <limits>

#include "support.hpp"

using namespace aircomp;
using namespace testing;

TEST_CASE("constructor symmetrizes and keeps a real diagonal") {
    CMatrixd a(2, 2);
    a << cd(1, 3), cd(2, 1), cd(4, -1), cd(5, 0.5);
    const HermitianMatrixd h(a);
    CHECK(h(0, 0) == cd(1, 0));
    CHECK(h(1, 1) == cd(5, 0));
    CHECK(h(0, 1) == cd(3, 1));  // (2+i + conj(4-i)) / 2
    CHECK(h(1, 0) == std::conj(h(0, 1)));
}

TEST_CASE("constructor rejects bad input") {
    CHECK_THROWS_AS(HermitianMatrixd(CMatrixd::Zero(2, 3)), InvalidInput);
    CMatrixd a = CMatrixd::Identity(2, 2);
    a(0, 1) = cd(std::numeric_limits<double>::quiet_NaN(), 0);
    CHECK_THROWS_AS(HermitianMatrixd{a}, InvalidInput);
    a(0, 1) = cd(0, std::numeric_limits<double>::infinity());
    CHECK_THROWS_AS(HermitianMatrixd{a}, InvalidInput);
}

TEST_CASE("already Hermitian input is stored unchanged") {
    SeededRng rng(1);
    for (int t = 0; t < 20; ++t) {
        const auto h = random_hermitian(rng, 1 + t % 7);
        const HermitianMatrixd again(h.matrix());
        CHECK((again.matrix() - h.matrix()).norm() == 0.0);
    }
}

TEST_CASE("trace, norm and arithmetic") {
    SeededRng rng(2);
    const auto a = random_hermitian(rng, 5);
    const auto b = random_hermitian(rng, 5);
    CHECK(a.trace() == doctest::Approx(std::real(trace_product(a.matrix(), CMatrixd::Identity(5, 5)))));
    CHECK(a.frobenius_norm() == doctest::Approx(std::sqrt(std::real(trace_product(a.matrix(), a.matrix())))));
    CHECK(((a + b) - b).matrix().isApprox(a.matrix()));
    CHECK((2.0 * a).trace() == doctest::Approx(2 * a.trace()));
    CHECK(HermitianMatrixd::identity(4).trace() == 4.0);
    CHECK(HermitianMatrixd::zero(3).frobenius_norm() == 0.0);
}

TEST_CASE("inner product matches Re Tr(A^H B) summed by hand") {
    SeededRng rng(3);
    for (int t = 0; t < 100; ++t) {
        const Eigen::Index n = 1 + t % 9;
        const auto a = random_hermitian(rng, n);
        const auto b = random_hermitian(rng, n);
        const double ref = std::real(trace_product(a.matrix().adjoint(), b.matrix()));
        CHECK(std::abs(inner(a, b) - ref) <= 1e-12 * std::max(1.0, std::abs(ref)));
    }
    CHECK_THROWS_AS(inner(HermitianMatrixd::zero(2), HermitianMatrixd::zero(3)), InvalidInput);
}

TEST_CASE("eigh: descending eigenvalues, orthonormal vectors, reconstruction") {
    SeededRng rng(4);
    for (int t = 0; t < 50; ++t) {
        const Eigen::Index n = 1 + t % 12;
        const auto a = random_hermitian(rng, n);
        const auto e = eigh(a);
        for (Eigen::Index i = 1; i < n; ++i) CHECK(e.eigenvalues(i - 1) >= e.eigenvalues(i));
        const CMatrixd gram = e.eigenvectors.adjoint() * e.eigenvectors;
        CHECK((gram - CMatrixd::Identity(n, n)).norm() < 1e-12);
        const CMatrixd rec = e.eigenvectors * e.eigenvalues.cast<cd>().asDiagonal() * e.eigenvectors.adjoint();
        CHECK((rec - a.matrix()).norm() < 1e-12 * std::max(1.0, a.frobenius_norm()));
    }
    CHECK(eigh(HermitianMatrixd::zero(0)).eigenvalues.size() == 0);
}

TEST_CASE("spectral norm agrees with power iteration on PSD matrices") {
    SeededRng rng(5);
    for (int t = 0; t < 40; ++t) {
        const Eigen::Index n = 1 + t % 10;
        const auto a = random_psd(rng, n, 1 + t % 3);
        const double ref = power_iteration(a);
        CHECK(rel_err(spectral_norm(a), ref) < 1e-9);
    }
    CHECK(spectral_norm(HermitianMatrixd::zero(3)) == 0.0);
}

TEST_CASE("spectral norm rejects indefinite input") {
    CMatrixd a = CMatrixd::Identity(2, 2);
    a(1, 1) = -0.5;
    CHECK_THROWS_AS(spectral_norm(HermitianMatrixd(a)), InvalidInput);
    // Round-off sized negative eigenvalues are tolerated.
    a(1, 1) = -1e-14;
    CHECK(spectral_norm(HermitianMatrixd(a)) == doctest::Approx(1.0));
}

TEST_CASE("psd_project is the Frobenius-nearest PSD matrix") {
    SeededRng rng(6);
    for (int t = 0; t < 30; ++t) {
        const Eigen::Index n = 2 + t % 6;
        const auto s = random_hermitian(rng, n);
        const auto p = psd_project(s);
        CHECK(eigh(p).eigenvalues.minCoeff() >= -1e-12);
        // Idempotent.
        CHECK((psd_project(p).matrix() - p.matrix()).norm() < 1e-10);
        // No PSD probe is closer.
        const double d = (s - p).frobenius_norm();
        for (int probe = 0; probe < 50; ++probe) {
            const auto q = random_psd(rng, n, 1 + probe % n) * (0.2 * (1 + probe % 5));
            CHECK(d <= (s - q).frobenius_norm() + 1e-12);
            // Small perturbations towards the probe stay no closer.
            const auto r = p + (q - p) * 1e-3;
            CHECK(d <= (s - r).frobenius_norm() + 1e-12);
        }
    }
}

TEST_CASE("psd_project of negative definite input is zero") {
    CHECK(psd_project(HermitianMatrixd::identity(3) * -2.0).frobenius_norm() == 0.0);
}

TEST_CASE("canonical phase: largest entry real and nonnegative, modulus preserved") {
    SeededRng rng(7);
    for (int t = 0; t < 50; ++t) {
        const CVectord v = random_vector(rng, 1 + t % 8);
        const CVectord c = canonical_phase(v);
        Eigen::Index imax = 0;
        c.cwiseAbs().maxCoeff(&imax);
        CHECK(std::abs(c(imax).imag()) < 1e-15);
        CHECK(c(imax).real() >= 0);
        CHECK((c.cwiseAbs() - v.cwiseAbs()).norm() < 1e-14);
        // Same ray.
        CHECK(std::abs(std::abs(dot_h(v, c)) - v.squaredNorm()) < 1e-12 * v.squaredNorm());
    }
}

TEST_CASE("leading_rank1_factor recovers u from u u^H up to phase") {
    SeededRng rng(8);
    for (int t = 0; t < 50; ++t) {
        const CVectord u = random_vector(rng, 1 + t % 10);
        const auto x = HermitianMatrixd::outer(u);
        const CVectord f = leading_rank1_factor(x);
        CHECK((f - canonical_phase(u)).norm() < 1e-10 * u.norm());
    }
    CHECK(leading_rank1_factor(HermitianMatrixd::zero(3)).norm() == 0.0);
}

TEST_CASE("spectral subgradient inequality on random PSD probes") {
    // ||Y||_2 >= ||X||_2 + <v1 v1^H, Y - X> for PSD X, Y.
    SeededRng rng(9);
    double worst = std::numeric_limits<double>::infinity();
    for (int t = 0; t < 1000; ++t) {
        const Eigen::Index n = 1 + t % 8;
        const auto x = random_psd(rng, n, 1 + t % 3);
        const auto y = random_psd(rng, n, 1 + (t / 3) % 4);
        const auto g = spectral_subgradient(x);
        const double gap = spectral_norm(y) - spectral_norm(x) - inner(g, y - x);
        worst = std::min(worst, gap / std::max(1.0, spectral_norm(y)));
    }
    CHECK(worst >= -1e-9);
}

TEST_CASE("subgradient has unit trace and reproduces the spectral norm") {
    SeededRng rng(10);
    for (int t = 0; t < 50; ++t) {
        const auto x = random_psd(rng, 2 + t % 6, 2);
        const auto g = spectral_subgradient(x);
        CHECK(g.trace() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(inner(g, x) == doctest::Approx(spectral_norm(x)).epsilon(1e-10));
    }
}

TEST_CASE("tie-break for a repeated top eigenvalue ignores the eigenbasis") {
    // Identity: the leading eigenspace is everything; the pick is the
    // normalized all-ones vector whatever basis the solver returned.
    for (Eigen::Index n : {2, 5, 9}) {
        const CVectord v = leading_eigenvector(HermitianMatrixd::identity(n));
        CHECK((v - CVectord::Ones(n) / std::sqrt(double(n))).norm() < 1e-12);
    }
    // diag(2, 2, 1) in a rotated basis: the pick is the projection of ones
    // onto the 2-dimensional leading space.
    SeededRng rng(11);
    const CMatrixd q = random_matrix(rng, 3, 3).householderQr().householderQ();
    Eigen::Vector3d d(2, 2, 1);
    const HermitianMatrixd x(q * d.cast<cd>().asDiagonal() * q.adjoint());
    const CVectord v = leading_eigenvector(x);
    const CMatrixd basis = q.leftCols(2);
    CVectord ref = basis * (basis.adjoint() * CVectord::Ones(3));
    ref /= ref.norm();
    CHECK(std::abs(std::abs(dot_h(v, ref)) - 1.0) < 1e-9);
    CHECK((x.matrix() * v - 2.0 * v).norm() < 1e-9);
}
