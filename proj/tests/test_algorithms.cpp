// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "aircomp/algorithms.hpp"
#include "support.hpp"

using namespace aircomp;
using namespace testing;

namespace {

ChannelSetd drop(std::uint64_t seed, int N, int M, int K) {
    Scenario s;
    s.N = N;
    s.M = M;
    s.K = K;
    SeededRng rng(seed);
    return gen_channels(s, place_users(s, rng), rng);
}

void check_design_invariants(const DesignResult<double>& r, const ChannelSetd& ch, const Scenario& sc) {
    REQUIRE(r.ok());
    const auto eff = effective_channels(ch, r.theta);
    CHECK(rel_err(r.mse, mse_closed_form(r.m, eff, sc.P0, sc.sigma2)) < 1e-9);
    double mx = 0;
    for (const auto& w : r.w) mx = std::max(mx, std::norm(w));
    CHECK(mx <= sc.P0 * (1 + 1e-9));
    CHECK(rel_err(mx, sc.P0) < 1e-9);
    REQUIRE(!r.mse_per_iteration.empty());
    for (std::size_t i = 1; i < r.mse_per_iteration.size(); ++i)
        CHECK(r.mse_per_iteration[i] <= r.mse_per_iteration[i - 1] * (1 + 1e-9));
    CHECK(rel_err(r.mse, r.mse_per_iteration.back()) < 1e-9);
    CHECK(r.mse_per_iteration.size() == r.raw_mse_per_iteration.size());
    CHECK(r.iterations >= 1);
}

}  // namespace

TEST_CASE("single user without a surface reaches the analytic optimum") {
    const Scenario sc;
    for (int t = 0; t < 10; ++t) {
        const auto ch = drop(100 + t, 1 + t % 16, 0, 1);
        SeededRng rng(t);
        const auto r = alternating_dc(ch, sc, AlgorithmParams<double>{}, rng);
        const double exact = sc.sigma2 / (sc.P0 * ch.h_direct[0].squaredNorm());
        CHECK(rel_err(r.mse, exact) < 1e-4);
        CHECK(r.terminated_by == Termination::mse_converged);
        CHECK(r.iterations == 1);
        const auto b = no_irs_baseline(ch, sc, AlgorithmParams<double>{});
        CHECK(rel_err(b.mse, exact) < 1e-4);
        SeededRng rng2(t);
        const auto s = alternating_sdr(ch, sc, AlgorithmParams<double>{}, rng2);
        CHECK(rel_err(s.mse, exact) < 1e-5);
    }
}

TEST_CASE("no-IRS baseline ignores G and h^r") {
    const Scenario sc;
    const auto ch = drop(7, 4, 6, 3);
    auto other = ch;
    SeededRng rng(1);
    other.G = random_matrix(rng, 4, 6);
    other.h_irs_user[0] = random_vector(rng, 6);
    const auto a = no_irs_baseline(ch, sc, AlgorithmParams<double>{});
    const auto b = no_irs_baseline(other, sc, AlgorithmParams<double>{});
    CHECK(a.mse == b.mse);
}

TEST_CASE("an empty surface makes the random-phase baseline the no-IRS baseline") {
    const Scenario sc;
    const auto ch = drop(8, 4, 0, 3);
    SeededRng rng(2);
    const auto a = random_phase_baseline(ch, sc, AlgorithmParams<double>{}, rng);
    const auto b = no_irs_baseline(ch, sc, AlgorithmParams<double>{});
    CHECK(a.mse == b.mse);
}

TEST_CASE("zero G: alternating DC agrees with the no-IRS baseline") {
    Scenario sc;
    for (int t = 0; t < 5; ++t) {
        const auto ch = drop(200 + t, 4, 5, 3).without_irs();
        SeededRng rng(t);
        const auto a = alternating_dc(ch, sc, AlgorithmParams<double>{}, rng);
        const auto b = no_irs_baseline(ch, sc, AlgorithmParams<double>{});
        CHECK(rel_err(a.mse, b.mse) < 1e-9);
    }
}

TEST_CASE("design invariants hold for every algorithm") {
    Scenario sc;
    sc.N = 4;
    sc.M = 6;
    sc.K = 3;
    for (int t = 0; t < 4; ++t) {
        const auto ch = drop(300 + t, sc.N, sc.M, sc.K);
        for (Algorithm a :
             {Algorithm::alternating_dc, Algorithm::alternating_sdr, Algorithm::random_phase, Algorithm::no_irs}) {
            SeededRng rng(t);
            const auto r = run_algorithm(a, ch, sc, AlgorithmParams<double>{}, rng);
            CAPTURE(to_string(a));
            if (a == Algorithm::no_irs)
                check_design_invariants(r, ch.without_irs(), sc);
            else
                check_design_invariants(r, ch, sc);
            CHECK(r.iterations <= 50);
        }
    }
}

TEST_CASE("alternation never ends worse than its random-phase starting point") {
    // Both start from the first draw of the same phase stream.
    Scenario sc;
    sc.N = 4;
    sc.M = 8;
    sc.K = 4;
    for (int t = 0; t < 5; ++t) {
        const auto ch = drop(400 + t, sc.N, sc.M, sc.K);
        SeededRng r1(t), r2(t);
        const auto alt = alternating_dc(ch, sc, AlgorithmParams<double>{}, r1);
        const auto base = random_phase_baseline(ch, sc, AlgorithmParams<double>{}, r2);
        CHECK(alt.mse <= base.mse * (1 + 1e-12));
        CHECK(alt.mse_per_iteration.front() <= base.mse * (1 + 1e-12));
    }
}

TEST_CASE("fixed seeds give bit-identical results") {
    Scenario sc;
    sc.N = 3;
    sc.M = 5;
    sc.K = 3;
    const auto ch = drop(9, sc.N, sc.M, sc.K);
    for (Algorithm a : {Algorithm::alternating_dc, Algorithm::alternating_sdr, Algorithm::random_phase}) {
        SeededRng r1(5), r2(5);
        const auto x = run_algorithm(a, ch, sc, AlgorithmParams<double>{}, r1);
        const auto y = run_algorithm(a, ch, sc, AlgorithmParams<double>{}, r2);
        CHECK(x.mse == y.mse);
        CHECK(x.terminated_by == y.terminated_by);
        CHECK(x.iterations == y.iterations);
        CHECK(x.theta.theta() == y.theta.theta());
    }
}

TEST_CASE("max_alt_iters caps the alternation") {
    Scenario sc;
    sc.N = 4;
    sc.M = 6;
    sc.K = 3;
    AlgorithmParams<double> p;
    p.max_alt_iters = 1;
    p.eps = 1e-300;
    const auto ch = drop(10, sc.N, sc.M, sc.K);
    SeededRng rng(1);
    const auto r = alternating_dc(ch, sc, p, rng);
    CHECK(r.iterations == 1);
    CHECK((r.terminated_by == Termination::max_iters || r.terminated_by == Termination::p2_infeasible));
}

TEST_CASE("randomization for the decoding vector") {
    SeededRng rng(11);
    SUBCASE("rank-one covariance reproduces the deterministic factor") {
        const auto lifted = LiftedP1<double>{{HermitianMatrixd::outer(random_vector(rng, 4)),
                                              HermitianMatrixd::outer(random_vector(rng, 4))}};
        const CVectord u = random_vector(rng, 4);
        const auto m = gaussian_randomization(HermitianMatrixd::outer(u), lifted, 20, rng);
        REQUIRE(m);
        const CVectord ref = rescale_to_feasible(u, lifted.H);
        CHECK(rel_err(m->squaredNorm(), ref.squaredNorm()) < 1e-6);
    }
    SUBCASE("every candidate is feasible after scaling") {
        const auto lifted = LiftedP1<double>{{HermitianMatrixd::outer(random_vector(rng, 3)),
                                              HermitianMatrixd::outer(random_vector(rng, 3)),
                                              HermitianMatrixd::outer(random_vector(rng, 3))}};
        const auto sdr = solve_sdp(p1_problem(lifted));
        for (int n : {1, 10, 100}) {
            const auto m = gaussian_randomization(sdr.X, lifted, n, rng);
            REQUIRE(m);
            double lo = INFINITY;
            for (const auto& h : lifted.H) lo = std::min(lo, std::real(quad_form(*m, h.matrix(), *m)));
            CHECK(lo == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(m->squaredNorm() >= sdr.objective * (1 - 1e-6));
        }
    }
}

TEST_CASE("randomization for the phases returns verified candidates") {
    SeededRng rng(12);
    int successes = 0;
    for (int t = 0; t < 20; ++t) {
        const auto ch = random_channels(rng, 2, 2, 2, 1.0, 0.7);
        RVector<double> th(2);
        th << rng.uniform(0, 6), rng.uniform(0, 6);
        const auto p1 = dc_solve_p1(build_p1(effective_channels(ch, PhaseConfig<double>(th))), DcParams<double>{});
        const auto lp = build_p2(CVectord(p1.m * 0.9), ch);  // some slack for the phases
        const auto sdr = solve_sdp(p2_problem(lp));
        const auto v = gaussian_randomization(sdr.X, lp, 100, rng);
        if (!v) continue;
        ++successes;
        CHECK(std::abs((*v)(2) - cd(1, 0)) < 1e-15);
        double lo = INFINITY;
        for (std::size_t k = 0; k < lp.a.size(); ++k)
            lo = std::min(lo, std::norm(dot_h(lp.a[k], CVectord(v->head(2))) + lp.c[k]));
        CHECK(lo >= 1 - 1e-9);
    }
    MESSAGE("phase randomization successes: " << successes << "/20");
    CHECK(successes > 0);
}

TEST_CASE("phase randomization reports failure when nothing is feasible") {
    SeededRng rng(13);
    LiftedP2<double> lp;
    lp.M = 2;
    lp.a = {CVectord::Zero(2)};
    lp.c = {cd(0.1, 0)};
    lp.R = {HermitianMatrixd::zero(3)};
    CHECK_FALSE(gaussian_randomization(HermitianMatrixd::identity(3), lp, 50, rng).has_value());
}

TEST_CASE("parameter validation") {
    AlgorithmParams<double> p;
    p.eps = 0;
    CHECK_THROWS_AS(p.validate(), InvalidInput);
    p = {};
    p.sdr_randomizations = 0;
    CHECK_THROWS_AS(p.validate(), InvalidInput);
    p = {};
    p.max_alt_iters = 0;
    CHECK_THROWS_AS(p.validate(), InvalidInput);
    const Scenario sc;
    auto ch = drop(1, 2, 2, 2);
    ch.h_direct[0] = CVectord::Zero(3);
    SeededRng rng(1);
    CHECK_THROWS_AS(alternating_dc(ch, sc, AlgorithmParams<double>{}, rng), InvalidInput);
}

TEST_CASE("names round-trip") {
    for (Algorithm a : {Algorithm::alternating_dc, Algorithm::alternating_sdr, Algorithm::random_phase, Algorithm::no_irs})
        CHECK(parse_algorithm(to_string(a)) == a);
    CHECK_FALSE(parse_algorithm("gradient_descent").has_value());
    CHECK(std::string(to_string(Termination::p2_infeasible)) == "p2_infeasible");
}
