#include <doctest.h>

#include <cmath>
#include <random>

#include "dix/errors.hpp"
#include "dix/factor.hpp"
#include "dix/testkit.hpp"

using namespace dix;

namespace {

CorrelationMatrix make_corr(const std::vector<std::string>& names, const Eigen::MatrixXd& values) {
    return {names, values};
}

Eigen::Matrix2d rotation2(double angle) {
    Eigen::Matrix2d r;
    r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
    return r;
}

// Synthetic sample with three orthogonal latent blocks; used for score tests.
struct BlockData {
    Eigen::MatrixXd data;
    std::vector<std::string> names;
};

BlockData block_sample(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 engine(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    BlockData out;
    out.names = {"v1", "v2", "v3", "v4", "v5", "v6"};
    out.data.resize(static_cast<Eigen::Index>(n), 6);
    for (std::size_t i = 0; i < n; ++i) {
        const double f1 = normal(engine), f2 = normal(engine), f3 = normal(engine);
        const double loads[6] = {0.9 * f1, 0.85 * f1, 0.9 * f2, 0.85 * f2, 0.9 * f3, 0.85 * f3};
        for (int v = 0; v < 6; ++v) {
            out.data(static_cast<Eigen::Index>(i), v) = loads[v] + 0.4 * normal(engine);
        }
    }
    return out;
}

CorrelationMatrix pearson_corr(const BlockData& block) {
    const Eigen::Index n = block.data.rows();
    Eigen::MatrixXd centered = block.data.rowwise() - block.data.colwise().mean();
    Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(n - 1);
    Eigen::VectorXd sd = cov.diagonal().array().sqrt();
    Eigen::MatrixXd corr = cov.array() / (sd * sd.transpose()).array();
    return make_corr(block.names, corr);
}

}  // namespace

TEST_CASE("eigenvalues of the block correlation example") {
    Eigen::MatrixXd m(3, 3);
    m << 1.0, 0.9, 0.0, 0.9, 1.0, 0.0, 0.0, 0.0, 1.0;
    auto model = factor_analysis(make_corr({"a", "b", "c"}, m));
    CHECK(model.eigenvalues(0) == doctest::Approx(1.9));
    CHECK(model.eigenvalues(1) == doctest::Approx(1.0));
    CHECK(model.eigenvalues(2) == doctest::Approx(0.1));
    CHECK(model.eigenvalues.sum() == doctest::Approx(3.0));  // trace identity
    REQUIRE(model.retained == 1);                            // strict > 1
    CHECK(model.loadings(0, 0) == doctest::Approx(std::sqrt(1.9 / 2.0)));
    CHECK(model.loadings(1, 0) == doctest::Approx(std::sqrt(1.9 / 2.0)));
    CHECK(model.loadings(2, 0) == doctest::Approx(0.0));
    CHECK(model.uniqueness(2) == doctest::Approx(1.0));
}

TEST_CASE("identity correlation retains zero factors under strict > 1") {
    auto model = factor_analysis(make_corr({"a", "b", "c"}, Eigen::MatrixXd::Identity(3, 3)));
    CHECK(model.retained == 0);
    CHECK(model.eigenvalues(0) == doctest::Approx(1.0));

    FactorOptions fixed;
    fixed.fixed_factor_count = 2;
    auto forced = factor_analysis(make_corr({"a", "b", "c"}, Eigen::MatrixXd::Identity(3, 3)), fixed);
    CHECK(forced.retained == 2);  // override flag
}

TEST_CASE("non-PSD matrix is rejected naming the eigenvalue") {
    Eigen::MatrixXd m(2, 2);
    m << 1.0, 1.2, 1.2, 1.0;  // eigenvalues 2.2 and -0.2
    CHECK_THROWS_WITH_AS(static_cast<void>(factor_analysis(make_corr({"a", "b"}, m))),
                         doctest::Contains("-0.2"), ValidationError);
}

TEST_CASE("varimax leaves simple structure alone") {
    Eigen::MatrixXd simple(4, 2);
    simple << 0.9, 0.0, 0.8, 0.0, 0.0, 0.85, 0.0, 0.7;
    auto [rotated, rotation] = varimax(simple);
    CHECK(rotated.isApprox(simple, 1e-9));
    CHECK(rotation.isApprox(Eigen::Matrix2d::Identity(), 1e-9));
}

TEST_CASE("varimax recovers a 30-degree rotation, matching a grid-search oracle") {
    Eigen::MatrixXd simple(6, 2);
    simple << 0.9, 0.0, 0.85, 0.0, 0.8, 0.0, 0.0, 0.9, 0.0, 0.85, 0.0, 0.8;
    const Eigen::MatrixXd mixed = simple * rotation2(M_PI / 6.0);

    auto [rotated, rotation] = varimax(mixed);

    // Grid-search oracle: the best single planar rotation of `mixed`.
    double best_crit = -1.0;
    Eigen::MatrixXd best;
    for (int step = 0; step < 72000; ++step) {
        const double angle = step * (M_PI / 36000.0);
        Eigen::MatrixXd cand = mixed * rotation2(angle);
        const double crit = varimax_criterion(cand);
        if (crit > best_crit) {
            best_crit = crit;
            best = cand;
        }
    }
    CHECK(varimax_criterion(rotated) >= best_crit - 1e-6);

    // Recovery up to column order and sign, within 1e-6.
    for (int col = 0; col < 2; ++col) {
        bool matched = false;
        for (int src = 0; src < 2; ++src) {
            if ((rotated.col(col) - simple.col(src)).cwiseAbs().maxCoeff() < 1e-6 ||
                (rotated.col(col) + simple.col(src)).cwiseAbs().maxCoeff() < 1e-6) {
                matched = true;
            }
        }
        CHECK(matched);
    }

    SUBCASE("rotation matrix is orthogonal and preserves communalities") {
        CHECK((rotation.transpose() * rotation).isApprox(Eigen::Matrix2d::Identity(), 1e-10));
        for (int r = 0; r < mixed.rows(); ++r) {
            CHECK(rotated.row(r).squaredNorm() == doctest::Approx(mixed.row(r).squaredNorm()).epsilon(1e-10));
        }
        CHECK((mixed * rotation - rotated).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("varimax criterion beats 10^4 random orthogonal rotations") {
    auto block = block_sample(1500, 99);
    auto model = factor_analysis(pearson_corr(block));
    REQUIRE(model.retained >= 2);
    const double crit = varimax_criterion(model.rotated_loadings);

    std::mt19937_64 engine(5);
    std::normal_distribution<double> normal(0.0, 1.0);
    const Eigen::Index f = model.retained;
    for (int trial = 0; trial < 10000; ++trial) {
        Eigen::MatrixXd g(f, f);
        for (Eigen::Index i = 0; i < f; ++i) {
            for (Eigen::Index j = 0; j < f; ++j) g(i, j) = normal(engine);
        }
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
        Eigen::MatrixXd q = qr.householderQ();
        CHECK(varimax_criterion(model.loadings * q) <= crit + 1e-9);
    }
}

TEST_CASE("kaiser weighting changes the path, not the communalities") {
    auto block = block_sample(800, 123);
    auto corr = pearson_corr(block);
    FactorOptions with, without;
    without.kaiser = false;
    auto a = factor_analysis(corr, with);
    auto b = factor_analysis(corr, without);
    REQUIRE(a.retained == b.retained);
    for (Eigen::Index r = 0; r < a.rotated_loadings.rows(); ++r) {
        CHECK(a.rotated_loadings.row(r).squaredNorm() ==
              doctest::Approx(b.rotated_loadings.row(r).squaredNorm()).epsilon(1e-8));
        CHECK(a.uniqueness(r) == doctest::Approx(1.0 - a.loadings.row(r).squaredNorm()).epsilon(1e-8));
    }
}

TEST_CASE("loading reconstruction is within the discarded-eigenvalue budget") {
    auto block = block_sample(2000, 7);
    auto corr = pearson_corr(block);
    auto model = factor_analysis(corr);
    Eigen::MatrixXd reconstructed =
        model.loadings * model.loadings.transpose() + Eigen::MatrixXd(model.uniqueness.asDiagonal());
    // Truncation error is bounded by the largest discarded eigenvalue.
    double discarded = 0.0;
    for (Eigen::Index i = model.retained; i < model.eigenvalues.size(); ++i) {
        discarded = std::max(discarded, std::abs(model.eigenvalues(i)));
    }
    CHECK((reconstructed - corr.values).cwiseAbs().maxCoeff() <= discarded + 1e-8);

    // Rotated loadings reproduce the same communalities exactly.
    for (Eigen::Index r = 0; r < model.loadings.rows(); ++r) {
        CHECK(model.rotated_loadings.row(r).squaredNorm() ==
              doctest::Approx(model.loadings.row(r).squaredNorm()).epsilon(1e-10));
    }
}

TEST_CASE("factor scores: near-zero pairwise correlation, rank order follows the loading variable") {
    auto block = block_sample(3000, 42);
    auto corr = pearson_corr(block);
    auto model = factor_analysis(corr);
    REQUIRE(model.retained == 3);
    auto scores = factor_scores(model, corr, block.data);
    REQUIRE(scores.cols() == 3);

    for (Eigen::Index c = 0; c < 3; ++c) CHECK(std::abs(scores.col(c).mean()) < 1e-10);

    auto pearson_of = [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
        const Eigen::VectorXd ca = a.array() - a.mean();
        const Eigen::VectorXd cb = b.array() - b.mean();
        return ca.dot(cb) / std::sqrt(ca.squaredNorm() * cb.squaredNorm());
    };
    for (Eigen::Index a = 0; a < 3; ++a) {
        for (Eigen::Index b = a + 1; b < 3; ++b) {
            CHECK(std::abs(pearson_of(scores.col(a), scores.col(b))) < 0.05);
        }
    }

    // Each factor's score ranks align with its highest-loading variable.
    for (Eigen::Index f = 0; f < 3; ++f) {
        Eigen::Index var = 0;
        model.rotated_loadings.col(f).cwiseAbs().maxCoeff(&var);
        const double sign = model.rotated_loadings(var, f) > 0 ? 1.0 : -1.0;
        CHECK(sign * pearson_of(scores.col(f), block.data.col(var)) > 0.7);
    }
}

TEST_CASE("zero-variance column fails before scoring") {
    auto block = block_sample(100, 11);
    auto corr = pearson_corr(block);
    auto model = factor_analysis(corr);
    Eigen::MatrixXd constant = block.data;
    constant.col(2).setConstant(3.0);
    CHECK_THROWS_AS(static_cast<void>(factor_scores(model, corr, constant)), ValidationError);
}

TEST_CASE("singular correlation matrix needs a ridge") {
    Eigen::MatrixXd m(3, 3);
    m << 1.0, 1.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0;  // rank 2
    auto corr = make_corr({"a", "b", "c"}, m);
    FactorOptions opt;
    opt.fixed_factor_count = 1;
    auto model = factor_analysis(corr, opt);
    Eigen::MatrixXd data = Eigen::MatrixXd::Random(50, 3);
    CHECK_THROWS_WITH_AS(static_cast<void>(factor_scores(model, corr, data)), doctest::Contains("ridge"),
                         ValidationError);
    auto scored = factor_scores(model, corr, data, 1e-8);
    CHECK(scored.rows() == 50);
}
