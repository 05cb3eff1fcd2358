#include "crimereg/error.hpp"
#include "crimereg/rankdyn.hpp"
#include "crimereg/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>

using namespace crimereg;

namespace {

bool is_permutation_row(const RankMatrix& ranks, Eigen::Index t) {
    std::vector<int> row(ranks.row(t).data(), ranks.row(t).data() + ranks.cols());
    std::sort(row.begin(), row.end());
    for (std::size_t i = 0; i < row.size(); ++i)
        if (row[i] != static_cast<int>(i)) return false;
    return true;
}

Eigen::MatrixXd noisy_counts(int weeks, int regions, std::uint64_t seed) {
    Rng rng(seed);
    Eigen::MatrixXd c(weeks, regions);
    for (int t = 0; t < weeks; ++t)
        for (int i = 0; i < regions; ++i) c(t, i) = static_cast<double>(rng.poisson(20.0));
    return c;
}

} // namespace

TEST_CASE("weekly ranks order by descending count") {
    Eigen::MatrixXd c(2, 2);
    c << 5, 3, 1, 9;
    const auto r = weekly_ranks(c);
    CHECK(r(0, 0) == 0);
    CHECK(r(0, 1) == 1);
    CHECK(r(1, 0) == 1);
    CHECK(r(1, 1) == 0);
}

TEST_CASE("ties keep the lower region index first") {
    const Eigen::MatrixXd c = Eigen::MatrixXd::Constant(4, 5, 7.0);
    const auto r = weekly_ranks(c);
    for (int t = 0; t < 4; ++t)
        for (int i = 0; i < 5; ++i) CHECK(r(t, i) == i);
    CHECK_THROWS_AS(weekly_ranks(Eigen::MatrixXd::Ones(1, 5)), Error);
    CHECK_THROWS_AS(weekly_ranks(Eigen::MatrixXd::Ones(5, 1)), Error);
}

TEST_CASE("every rank row is a permutation") {
    const auto r = weekly_ranks(noisy_counts(100, 30, 1));
    for (Eigen::Index t = 0; t < r.rows(); ++t) CHECK(is_permutation_row(r, t));
}

TEST_CASE("entropy extremes") {
    // Region 0 always on top, the rest rotating uniformly.
    const int regions = 10, weeks = 90;
    Eigen::MatrixXd c(weeks, regions);
    for (int t = 0; t < weeks; ++t) {
        c(t, 0) = 1000;
        for (int i = 1; i < regions; ++i) c(t, i) = 1 + ((i + t) % (regions - 1));
    }
    const auto e = position_entropy(weekly_ranks(c));
    CHECK(e.h(0) == 0.0);
    for (int pos = 1; pos < regions; ++pos) CHECK(e.h(pos) == doctest::Approx(std::log(9.0) / std::log(10.0)));

    // Full rotation of all regions through all positions.
    Eigen::MatrixXd rot(weeks + 10, regions);
    for (int t = 0; t < weeks + 10; ++t)
        for (int i = 0; i < regions; ++i) rot(t, i) = (i + t) % regions;
    const auto full = position_entropy(weekly_ranks(rot));
    for (int pos = 0; pos < regions; ++pos) CHECK(full.h(pos) == doctest::Approx(1.0));
    CHECK(full.mean_h == doctest::Approx(1.0));
}

TEST_CASE("entropy stays in [0, 1] and a fixed hotspot sits below the mean") {
    Eigen::MatrixXd c = noisy_counts(200, 40, 2);
    c.col(7).array() += 500;
    const auto e = position_entropy(weekly_ranks(c));
    CHECK((e.h.array() >= 0.0).all());
    CHECK((e.h.array() <= 1.0).all());
    CHECK(e.h(0) == 0.0);
    CHECK(e.h(0) < e.mean_h);
}

TEST_CASE("entropy is invariant to relabelling regions") {
    const Eigen::MatrixXd c = noisy_counts(150, 25, 3);
    Rng rng(9);
    std::vector<int> perm(25);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(std::span<int>(perm));
    Eigen::MatrixXd relabelled(c.rows(), c.cols());
    for (int i = 0; i < 25; ++i) relabelled.col(perm[static_cast<std::size_t>(i)]) = c.col(i);
    // Break ties so the ordering does not depend on the label.
    Eigen::MatrixXd jitter = Eigen::MatrixXd::Zero(c.rows(), c.cols());
    for (Eigen::Index t = 0; t < c.rows(); ++t)
        for (int i = 0; i < 25; ++i) jitter(t, i) = 1e-3 * rng.uniform();
    Eigen::MatrixXd a = c + jitter, b(c.rows(), c.cols());
    for (int i = 0; i < 25; ++i) b.col(perm[static_cast<std::size_t>(i)]) = a.col(i);
    const auto ea = position_entropy(weekly_ranks(a)), eb = position_entropy(weekly_ranks(b));
    CHECK((ea.h - eb.h).cwiseAbs().maxCoeff() < 1e-12);

    // Reordering the weeks changes nothing either.
    Eigen::MatrixXd reversed = a.colwise().reverse();
    CHECK((position_entropy(weekly_ranks(reversed)).h - ea.h).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("midranks and spearman") {
    Eigen::VectorXd v(5);
    v << 10, 20, 20, 5, 30;
    const auto m = midranks(v);
    CHECK(m(0) == 2.0);
    CHECK(m(1) == 3.5);
    CHECK(m(2) == 3.5);
    CHECK(m(3) == 1.0);
    CHECK(m(4) == 5.0);

    const Eigen::VectorXd up = Eigen::VectorXd::LinSpaced(10, 1, 10);
    CHECK(spearman(up, up.array().exp().matrix()) == doctest::Approx(1.0));
    CHECK(spearman(up, -up) == doctest::Approx(-1.0));
    CHECK(spearman(up, Eigen::VectorXd::Constant(10, 3.0)) == 0.0);
    CHECK_THROWS_AS(spearman(up, up.head(4)), Error);
}

TEST_CASE("entropy shape over the top decile") {
    EntropyProfile p;
    p.h = Eigen::VectorXd::LinSpaced(40, 0.1, 0.9);
    const auto s = entropy_vs_rank_shape(p);
    CHECK(s.top_entropies.size() == 4);
    CHECK(s.spearman == doctest::Approx(1.0));
    p.h = Eigen::VectorXd::Constant(20, 0.5);
    CHECK(entropy_vs_rank_shape(p).spearman == 0.0);
    p.h = Eigen::VectorXd::Constant(9, 0.5);
    CHECK_THROWS_AS(entropy_vs_rank_shape(p), Error);
}
