#include "autoeval/stats.hpp"

#include <cmath>

#include "test_support.hpp"

using namespace autoeval;
using test_support::naive_mean_cov;
using test_support::random_spd;
using test_support::random_stats;

TEST_CASE("compute_stats: two-point case with M-1 divisor") {
    std::vector<Vector> points(2, Vector(2));
    points[0] << 0.0, 0.0;
    points[1] << 2.0, 2.0;
    const DatasetStats stats = compute_stats(points);
    CHECK(stats.count == 2);
    CHECK(stats.mean[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(stats.mean[1] == doctest::Approx(1.0).epsilon(1e-15));
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) CHECK(stats.cov(i, j) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("compute_stats: zero spread") {
    Vector v(2);
    v << 3.0, -1.0;
    const DatasetStats stats = compute_stats(std::vector<Vector>(10, v));
    CHECK(stats.mean[0] == 3.0);
    CHECK(stats.mean[1] == -1.0);
    CHECK(stats.cov.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("compute_stats: matches the naive two-pass oracle") {
    CounterRng rng(11, 0);
    const int m = 50, d = 8;
    Matrix feats(m, d);
    std::vector<std::vector<double>> rows(m, std::vector<double>(d));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < d; ++j) {
            const double v = rng.uniform(-5.0, 5.0);
            feats(i, j) = v;
            rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = v;
        }

    std::vector<double> oracle_mean;
    std::vector<std::vector<double>> oracle_cov;
    naive_mean_cov(rows, oracle_mean, oracle_cov);

    const DatasetStats stats = compute_stats(feats);
    for (int j = 0; j < d; ++j)
        CHECK(std::abs(stats.mean[j] - oracle_mean[static_cast<std::size_t>(j)]) <= 1e-10);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            CHECK(std::abs(stats.cov(a, b) -
                           oracle_cov[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]) <=
                  1e-10);
    CHECK((stats.cov - stats.cov.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("compute_stats: error paths") {
    CHECK_ERROR_KIND(compute_stats(std::vector<Vector>{Vector::Zero(3)}),
                     ErrorKind::kInsufficientData);
    std::vector<Vector> mismatched{Vector::Zero(3), Vector::Zero(4)};
    CHECK_ERROR_KIND(compute_stats(mismatched), ErrorKind::kShape);
    Matrix bad(2, 2);
    bad << 1.0, 2.0, std::nan(""), 0.0;
    CHECK_ERROR_KIND(compute_stats(bad), ErrorKind::kValidation);
}

TEST_CASE("DatasetStats::validate rejects asymmetry and bad counts") {
    DatasetStats stats;
    stats.mean = Vector::Zero(2);
    stats.cov = Matrix::Identity(2, 2);
    stats.count = 2;
    CHECK_NOTHROW(stats.validate());

    stats.cov(0, 1) = 1e-3;  // asymmetric well beyond 1e-9 relative
    CHECK_ERROR_KIND(stats.validate(), ErrorKind::kShape);

    stats.cov(0, 1) = 0.0;
    stats.count = 1;
    CHECK_ERROR_KIND(stats.validate(), ErrorKind::kInsufficientData);
}

TEST_CASE("sqrtm_psd: identity and diagonal closed forms") {
    const Matrix id = Matrix::Identity(4, 4);
    CHECK((sqrtm_psd(id) - id).cwiseAbs().maxCoeff() <= 1e-12);

    Matrix diag = Matrix::Zero(2, 2);
    diag(0, 0) = 4.0;
    diag(1, 1) = 9.0;
    const Matrix root = sqrtm_psd(diag);
    CHECK(root(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(root(1, 1) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(std::abs(root(0, 1)) <= 1e-12);
}

TEST_CASE("sqrtm_psd: round trip on random SPD matrices") {
    CounterRng rng(5, 1);
    const Matrix a = random_spd(32, rng);
    const Matrix s = sqrtm_psd(a);
    CHECK((s - s.transpose()).cwiseAbs().maxCoeff() == 0.0);
    const double rel = (s * s - a).norm() / a.norm();
    CHECK(rel <= 1e-8);

    Eigen::SelfAdjointEigenSolver<Matrix> eig(s);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-10);
}

TEST_CASE("sqrtm_psd: clamps small negative eigenvalues") {
    // Rank-deficient with a tiny negative perturbation.
    Matrix a(2, 2);
    a << 1.0, 1.0, 1.0, 1.0;
    a.array() -= 1e-12;
    const Matrix s = sqrtm_psd(a);
    CHECK(s.allFinite());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(s);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-12);
}

TEST_CASE("sqrtm_psd: error paths") {
    CHECK_ERROR_KIND(sqrtm_psd(Matrix::Zero(2, 3)), ErrorKind::kShape);
    Matrix asym(2, 2);
    asym << 1.0, 0.5, -0.5, 1.0;
    CHECK_ERROR_KIND(sqrtm_psd(asym), ErrorKind::kShape);
}

TEST_CASE("frechet_distance: closed forms") {
    DatasetStats a, b;
    a.mean = Vector::Zero(1);
    a.cov = Matrix::Identity(1, 1);
    a.count = b.count = 10;
    b = a;

    SUBCASE("identical stats give zero") { CHECK(frechet_distance(a, b) <= 1e-9); }

    SUBCASE("mean separation only") {
        b.mean[0] = 1.0;
        CHECK(frechet_distance(a, b) == doctest::Approx(1.0).epsilon(1e-9));
    }

    SUBCASE("variance separation only: 4 + 1 - 2*2") {
        a.cov(0, 0) = 4.0;
        CHECK(frechet_distance(a, b) == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("frechet_distance: 2-d diagonal case") {
    DatasetStats a, b;
    a.mean = Vector::Zero(2);
    a.cov = Matrix::Identity(2, 2);
    a.count = 10;
    b.mean = Vector::Ones(2);
    b.cov = 4.0 * Matrix::Identity(2, 2);
    b.count = 10;
    // Per axis: (0-1)^2 + (1 + 4 - 2*2) = 1 + 1, so 4 in total.
    CHECK(frechet_distance(a, b) == doctest::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("frechet_distance: self-distance and symmetry properties") {
    CounterRng rng(17, 2);
    for (int trial = 0; trial < 20; ++trial) {
        const DatasetStats a = random_stats(12, rng);
        const DatasetStats b = random_stats(12, rng);
        CHECK(frechet_distance(a, a) <= 1e-9);
        const double ab = frechet_distance(a, b);
        const double ba = frechet_distance(b, a);
        CHECK(ab >= 0.0);
        CHECK(std::abs(ab - ba) <= 1e-6 * std::max(1.0, std::max(ab, ba)));
    }
}

TEST_CASE("frechet_distance: dimension mismatch") {
    CounterRng rng(3, 3);
    const DatasetStats a = random_stats(4, rng);
    const DatasetStats b = random_stats(5, rng);
    CHECK_ERROR_KIND(frechet_distance(a, b), ErrorKind::kShape);
}

TEST_CASE("spearman_rho: hand-computed cases") {
    CHECK(spearman_rho({1, 2, 3}, {3, 2, 1}) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(spearman_rho({1, 2, 3}, {10, 20, 30}) == doctest::Approx(1.0).epsilon(1e-12));
    // 1 - 6*4/(4*15) = 0.6
    CHECK(spearman_rho({1, 2, 3, 4}, {2, 1, 4, 3}) == doctest::Approx(0.6).epsilon(1e-12));
    // Tied pair gets rank 1.5 each; Pearson of ranks is sqrt(0.9).
    CHECK(spearman_rho({1, 1, 2, 3}, {1, 2, 3, 4}) ==
          doctest::Approx(0.9486832980505138).epsilon(1e-12));
}

TEST_CASE("spearman_rho: invariant under strictly monotone transforms") {
    CounterRng rng(23, 4);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 5 + rng.below(20);
        std::vector<double> xs(n), ys(n);
        for (std::size_t i = 0; i < n; ++i) {
            xs[i] = rng.uniform(-3.0, 3.0);
            ys[i] = rng.uniform(-3.0, 3.0);
        }
        const double base = spearman_rho(xs, ys);

        std::vector<double> xs_exp(n), ys_affine(n);
        for (std::size_t i = 0; i < n; ++i) {
            xs_exp[i] = std::exp(xs[i]);
            ys_affine[i] = 2.5 * ys[i] + 7.0;
        }
        CHECK(spearman_rho(xs_exp, ys) == doctest::Approx(base).epsilon(1e-12));
        CHECK(spearman_rho(xs, ys_affine) == doctest::Approx(base).epsilon(1e-12));
    }
}

TEST_CASE("spearman_rho: error paths") {
    CHECK_ERROR_KIND(spearman_rho({1, 2}, {1, 2}), ErrorKind::kInsufficientData);
    CHECK_ERROR_KIND(spearman_rho({1, 2, 3}, {1, 2}), ErrorKind::kInsufficientData);
    CHECK_ERROR_KIND(spearman_rho({2, 2, 2}, {1, 2, 3}), ErrorKind::kDegenerateInput);
}

TEST_CASE("rmse and mae: basic cases") {
    CHECK(rmse({0.5, 0.25}, {0.5, 0.25}) == 0.0);
    CHECK(mae({0.5, 0.25}, {0.5, 0.25}) == 0.0);
    CHECK(rmse({0.8}, {0.6}) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(mae({0.8}, {0.6}) == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("rmse: digit-benchmark regression values in percent units") {
    // Neural row: predictions {27.52, 64.11} vs truths {25.46, 64.08}.
    CHECK(std::abs(rmse({27.52, 64.11}, {25.46, 64.08}) - 1.46) <= 0.005);
    // Linear row: predictions {26.28, 50.14} against the same truths.
    CHECK(std::abs(rmse({26.28, 50.14}, {25.46, 64.08}) - 9.87) <= 0.005);
}

TEST_CASE("rmse >= mae >= 0 on random data") {
    CounterRng rng(31, 5);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + rng.below(30);
        std::vector<double> preds(n), truths(n);
        for (std::size_t i = 0; i < n; ++i) {
            preds[i] = rng.uniform(0.0, 1.0);
            truths[i] = rng.uniform(0.0, 1.0);
        }
        const double r = rmse(preds, truths);
        const double m = mae(preds, truths);
        CHECK(r >= m);
        CHECK(m >= 0.0);
    }
}

TEST_CASE("rmse/mae: error paths") {
    CHECK_ERROR_KIND(rmse({}, {}), ErrorKind::kInsufficientData);
    CHECK_ERROR_KIND(mae({1.0}, {1.0, 2.0}), ErrorKind::kInsufficientData);
}
