#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "fisvdd/kernel.hpp"
#include "fisvdd/kernel_inverse.hpp"
#include "helpers.hpp"

using namespace fisvdd;
using Catch::Matchers::WithinAbs;

TEST_CASE("expand_inverse 2x2 closed form") {
    // From order 1 with similarity s the inverse is (1/(1-s^2)) [[1,-s],[-s,1]].
    const KernelInverse one = KernelInverse::unit();
    KernelVector v(1);
    v[0] = 0.5;
    const ExpandedInverse grown = expand_inverse(one, v);
    CHECK_THAT(grown.beta, WithinAbs(0.75, 1e-15));
    CHECK_THAT(grown.inverse.matrix()(0, 0), WithinAbs(4.0 / 3.0, 1e-15));
    CHECK_THAT(grown.inverse.matrix()(0, 1), WithinAbs(-2.0 / 3.0, 1e-15));
    CHECK_THAT(grown.inverse.matrix()(1, 0), WithinAbs(-2.0 / 3.0, 1e-15));
    CHECK_THAT(grown.inverse.matrix()(1, 1), WithinAbs(4.0 / 3.0, 1e-15));
}

TEST_CASE("expand_inverse orthogonal limit") {
    const KernelInverse one = KernelInverse::unit();
    KernelVector v(1);
    v[0] = 1e-12;
    const ExpandedInverse grown = expand_inverse(one, v);
    CHECK_THAT(grown.beta, WithinAbs(1.0, 1e-11));
    CHECK(testutil::max_abs_diff(grown.inverse.matrix(),
                                 Eigen::MatrixXd::Identity(2, 2)) < 1e-11);
}

TEST_CASE("expand_inverse rejects degenerate expansions") {
    const KernelInverse one = KernelInverse::unit();
    KernelVector v(1);
    v[0] = 1.0;  // exact duplicate: beta = 0
    CHECK_THROWS_AS(expand_inverse(one, v), IllConditionedError);
    KernelVector wrong(2);
    wrong << 0.1, 0.1;
    CHECK_THROWS_AS(expand_inverse(one, wrong), InputError);
}

TEST_CASE("expand_inverse matches direct dense inversion") {
    std::mt19937 rng(42);
    const Bandwidth bw(0.7);
    const auto pts = testutil::random_points(rng, 6, 3);

    const std::vector<DataPoint> first5(pts.begin(), pts.begin() + 5);
    const Eigen::MatrixXd a5 = build_similarity(first5, bw);
    KernelInverse inv(testutil::direct_inverse(a5));

    const KernelVector v = similarity_vector(pts[5], first5, bw);
    const ExpandedInverse grown = expand_inverse(inv, v);

    const Eigen::MatrixXd a6 = build_similarity(pts, bw);
    CHECK(testutil::max_abs_diff(grown.inverse.matrix(),
                                 testutil::direct_inverse(a6)) < 1e-9);
    CHECK(grown.beta > 0.0);
}

TEST_CASE("shrink_inverse 2x2 closed form") {
    Eigen::MatrixXd m(2, 2);
    m << 4.0 / 3.0, -2.0 / 3.0, -2.0 / 3.0, 4.0 / 3.0;
    const KernelInverse shrunk = shrink_inverse(KernelInverse(m), 1);
    REQUIRE(shrunk.order() == 1);
    CHECK_THAT(shrunk.matrix()(0, 0), WithinAbs(1.0, 1e-15));
}

TEST_CASE("shrink_inverse removes an arbitrary index against dense oracle") {
    std::mt19937 rng(43);
    const Bandwidth bw(0.7);
    const auto pts = testutil::random_points(rng, 6, 3);
    const Eigen::MatrixXd a6 = build_similarity(pts, bw);
    const KernelInverse inv(testutil::direct_inverse(a6));

    const KernelInverse shrunk = shrink_inverse(inv, 2);

    std::vector<DataPoint> rest = pts;
    rest.erase(rest.begin() + 2);
    const Eigen::MatrixXd a5 = build_similarity(rest, bw);
    CHECK(testutil::max_abs_diff(shrunk.matrix(),
                                 testutil::direct_inverse(a5)) < 1e-9);
}

TEST_CASE("shrink_inverse guards") {
    CHECK_THROWS_AS(shrink_inverse(KernelInverse::unit(), 0), InputError);
    Eigen::MatrixXd m(2, 2);
    m << 1.0, 0.0, 0.0, 1.0;
    CHECK_THROWS_AS(shrink_inverse(KernelInverse(m), 5), InputError);
    // A zero pivot can only come from corrupted state.
    Eigen::MatrixXd corrupt(2, 2);
    corrupt << 1.0, 0.0, 0.0, 0.0;
    CHECK_THROWS_AS(shrink_inverse(KernelInverse(corrupt), 1),
                    IllConditionedError);
}

TEST_CASE("expand then shrink at the last index is the identity") {
    std::mt19937 rng(44);
    const Bandwidth bw(1.1);
    for (int trial = 0; trial < 25; ++trial) {
        const auto pts = testutil::random_points(rng, 5, 2);
        const std::vector<DataPoint> base(pts.begin(), pts.begin() + 4);
        const KernelInverse inv(
            testutil::direct_inverse(build_similarity(base, bw)));
        const KernelVector v = similarity_vector(pts[4], base, bw);
        const ExpandedInverse grown = expand_inverse(inv, v);
        const KernelInverse back =
            shrink_inverse(grown.inverse, grown.inverse.order() - 1);
        CHECK(testutil::max_abs_diff(back.matrix(), inv.matrix()) < 1e-10);
    }
}

TEST_CASE("row_sums solve the reconstructed linear system") {
    CHECK(row_sums(KernelInverse::unit())[0] == 1.0);

    Eigen::MatrixXd m(2, 2);
    m << 4.0 / 3.0, -2.0 / 3.0, -2.0 / 3.0, 4.0 / 3.0;
    const Eigen::VectorXd two = row_sums(KernelInverse(m));
    CHECK_THAT(two[0], WithinAbs(2.0 / 3.0, 1e-15));
    CHECK_THAT(two[1], WithinAbs(2.0 / 3.0, 1e-15));

    std::mt19937 rng(45);
    const Bandwidth bw(0.9);
    const auto pts = testutil::random_points(rng, 4, 3);
    const Eigen::MatrixXd a = build_similarity(pts, bw);
    const Eigen::VectorXd sums = row_sums(KernelInverse(testutil::direct_inverse(a)));
    const Eigen::VectorXd residual = a * sums - Eigen::VectorXd::Ones(4);
    CHECK(residual.cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("interleaved updates stay consistent with dense inversion") {
    std::mt19937 rng(46);
    std::uniform_real_distribution<double> sig(0.5, 2.0);
    std::bernoulli_distribution grow(0.7);
    std::uniform_int_distribution<int> dim_pick(0, 1);
    const std::size_t dims[2] = {2, 5};

    for (int trial = 0; trial < 20; ++trial) {
        const Bandwidth bw(sig(rng));
        const std::size_t dim = dims[dim_pick(rng)];
        std::vector<DataPoint> current = testutil::random_points(rng, 1, dim);
        KernelInverse inv = KernelInverse::unit();

        for (int op = 0; op < 60; ++op) {
            if (grow(rng) || current.size() == 1) {
                const DataPoint candidate =
                    testutil::random_points(rng, 1, dim).front();
                const KernelVector v = similarity_vector(candidate, current, bw);
                if (v.maxCoeff() > 1.0 - 1e-9) continue;
                try {
                    ExpandedInverse grown = expand_inverse(inv, v);
                    inv = std::move(grown.inverse);
                    current.push_back(candidate);
                } catch (const IllConditionedError&) {
                }
            } else {
                std::uniform_int_distribution<std::size_t> pick(0, current.size() - 1);
                const auto idx = static_cast<Eigen::Index>(pick(rng));
                inv = shrink_inverse(inv, idx);
                current.erase(current.begin() + idx);
            }
        }
        const Eigen::MatrixXd a = build_similarity(current, bw);
        CHECK(testutil::max_abs_diff(inv.matrix(), testutil::direct_inverse(a)) <
              1e-8);
        // Schur positivity held throughout: every accepted expansion had
        // beta > 0 by construction, and the surviving inverse is SPD-consistent.
        CHECK((inv.matrix() * a - Eigen::MatrixXd::Identity(a.rows(), a.cols()))
                  .cwiseAbs()
                  .maxCoeff() < 1e-8);
    }
}

TEST_CASE("shrinking any index equals direct inversion of the remainder") {
    std::mt19937 rng(47);
    const Bandwidth bw(1.3);
    const auto pts = testutil::random_points(rng, 7, 2);
    const KernelInverse inv(
        testutil::direct_inverse(build_similarity(pts, bw)));
    for (Eigen::Index idx = 0; idx < 7; ++idx) {
        const KernelInverse shrunk = shrink_inverse(inv, idx);
        std::vector<DataPoint> rest = pts;
        rest.erase(rest.begin() + idx);
        CHECK(testutil::max_abs_diff(
                  shrunk.matrix(),
                  testutil::direct_inverse(build_similarity(rest, bw))) < 1e-9);
    }
}
