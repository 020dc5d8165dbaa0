#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "helpers.hpp"
#include "kfpls/errors.hpp"
#include "kfpls/kpls.hpp"
#include "kfpls/metrics.hpp"
#include "kfpls/simgen.hpp"
#include "oracles.hpp"

using namespace kfpls;

TEST_CASE("basis construction and validation") {
    const auto basis = BsplineBasis::simulation_basis();
    CHECK(basis.order() == 4);
    CHECK(basis.n_basis() == 23);
    CHECK(basis.knots().size() == 27);
    CHECK(basis.domain_min() == 0.0);
    CHECK(basis.domain_max() == 1.0);

    CHECK_THROWS_AS(BsplineBasis(0, {0.0, 1.0}), ConfigError);
    CHECK_THROWS_AS(BsplineBasis(4, {0.0}), ConfigError);
    CHECK_THROWS_AS(BsplineBasis(4, {0.0, 0.5, 0.5, 1.0}), ConfigError);
    CHECK_THROWS_AS(BsplineBasis(4, {0.0, 1.0, 0.5}), ConfigError);
    CHECK_THROWS_AS(BsplineBasis(4, {0.0, std::nan("")}), ConfigError);
}

TEST_CASE("basis is a nonnegative partition of unity") {
    const auto basis = BsplineBasis::simulation_basis();
    for (int k = 0; k <= 1000; ++k) {
        const double t = static_cast<double>(k) / 1000.0;
        const Eigen::VectorXd v = basis.eval(t);
        CHECK(v.minCoeff() >= 0.0);
        CHECK(std::abs(v.sum() - 1.0) < 1e-10);
    }
}

TEST_CASE("clamped endpoints put all mass on the boundary function") {
    const auto basis = BsplineBasis::simulation_basis();
    const Eigen::VectorXd at0 = basis.eval(0.0);
    CHECK(at0[0] == 1.0);
    CHECK(at0.tail(22).cwiseAbs().maxCoeff() == 0.0);
    const Eigen::VectorXd at1 = basis.eval(1.0);
    CHECK(at1[22] == 1.0);
    CHECK(at1.head(22).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("at most `order` functions are alive at any point") {
    const auto basis = BsplineBasis::simulation_basis();
    for (double t : {0.0, 0.137, 0.5, 0.649, 0.95, 1.0}) {
        const Eigen::VectorXd v = basis.eval(t);
        int nonzero = 0;
        for (int l = 0; l < v.size(); ++l)
            if (v[l] != 0.0) ++nonzero;
        CHECK(nonzero <= 4);
    }
}

TEST_CASE("basis evaluation matches the naive recursion") {
    const auto basis = BsplineBasis::simulation_basis();
    const auto& knots = basis.knots();
    for (int k = 0; k <= 200; ++k) {
        const double t = static_cast<double>(k) / 200.0;
        const Eigen::VectorXd got = basis.eval(t);
        for (int l = 0; l < basis.n_basis(); ++l) {
            const double want = oracles::naive_bspline(knots, l, basis.order(), t);
            CHECK(std::abs(got[l] - want) < 1e-12);
        }
    }

    // Also on a non-uniform, non-cubic basis.
    const BsplineBasis quad(3, {0.0, 0.2, 0.5, 0.6, 1.0});
    CHECK(quad.n_basis() == 6);
    for (int k = 0; k <= 100; ++k) {
        const double t = static_cast<double>(k) / 100.0;
        const Eigen::VectorXd got = quad.eval(t);
        for (int l = 0; l < quad.n_basis(); ++l)
            CHECK(std::abs(got[l] - oracles::naive_bspline(quad.knots(), l, 3, t)) < 1e-12);
    }
}

TEST_CASE("evaluation outside the domain is rejected") {
    const auto basis = BsplineBasis::simulation_basis();
    CHECK_THROWS_AS(basis.eval(-1e-9), ConfigError);
    CHECK_THROWS_AS(basis.eval(1.0 + 1e-9), ConfigError);
    CHECK_THROWS_AS(basis.eval(std::nan("")), ConfigError);
}

TEST_CASE("design matrix stacks pointwise evaluations") {
    const auto basis = BsplineBasis::simulation_basis();
    const auto grid = uniform_grid(11);
    const Eigen::MatrixXd design = basis.design_matrix(grid);
    REQUIRE(design.rows() == 11);
    REQUIRE(design.cols() == 23);
    for (std::size_t k = 0; k < grid.size(); ++k)
        CHECK(design.row(static_cast<Eigen::Index>(k)) ==
              basis.eval(grid.points()[k]).transpose());
}

TEST_CASE("coefficient functions") {
    CHECK(beta1(0.25) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(beta1(0.0) == 0.0);
    CHECK(beta2(0.0) == 2.0);
    CHECK(beta2(0.5) == doctest::Approx(-2.0).epsilon(1e-12));
}

TEST_CASE("link values") {
    CHECK(link_value(1, 1, 3.7) == 3.7);
    CHECK(link_value(1, 2, -2.0) == 4.0);
    CHECK(std::abs(link_value(1, 3, 1.0)) < 1e-12);
    CHECK(link_value(1, 4, 0.0) == 10.0);
    CHECK(link_value(1, 4, 1e-8) == doctest::Approx(10.0).epsilon(1e-9));
    CHECK(link_value(1, 4, std::numbers::pi) ==
          doctest::Approx(10.0 * std::sin(std::numbers::pi) / std::numbers::pi).epsilon(1e-12));

    CHECK(link_value(2, 1, 0.0, 0.0) == 1.0);
    CHECK(link_value(2, 1, 1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(link_value(2, 2, 0.0, 3.0) == doctest::Approx(10.0).epsilon(1e-12));

    CHECK_THROWS_AS(link_value(1, 5, 0.0), ConfigError);
    CHECK_THROWS_AS(link_value(2, 1, 0.0), ConfigError);
    CHECK_THROWS_AS(link_value(3, 1, 0.0), ConfigError);
    CHECK_THROWS_AS(link_value(2, 3, 0.0, 0.0), ConfigError);
    CHECK_THROWS_AS(link_value(1, 1, 0.0, 0.0), ConfigError);
}

TEST_CASE("scenario 1 and 2 truths on analytic curves") {
    const auto grid = uniform_grid(101);
    auto zeros = helpers::two_curves(grid, [](double) { return 0.0; },
                                     [](double) { return 0.0; });
    CHECK(truth_value_s1_s2(zeros, 1, 2) == 0.0);
    CHECK(truth_value_s1_s2(zeros, 2, 1) == 1.0);

    // X1 = sin(2 pi t) against beta1 = 2 sin(2 pi t): the inner product is 1.
    auto resonant = helpers::two_curves(grid,
                                        [](double t) { return std::sin(2.0 * std::numbers::pi * t); },
                                        [](double) { return 0.0; });
    CHECK(truth_value_s1_s2(resonant, 1, 1) == doctest::Approx(1.0).epsilon(1e-4));

    auto p1 = FunctionalSample({SampledCurve(grid, helpers::sample_fn(grid, [](double) {
        return 1.0;
    }))});
    CHECK_THROWS_AS(truth_value_s1_s2(p1, 1, 1), StructuralError);
}

TEST_CASE("scenario 3 truth on analytic curves") {
    const auto grid = uniform_grid(101);
    auto zeros = helpers::two_curves(grid, [](double) { return 0.0; },
                                     [](double) { return 0.0; });
    CHECK(truth_value_s3(zeros) == doctest::Approx(0.5).epsilon(1e-6));

    auto shifted = helpers::two_curves(grid, [](double) { return std::numbers::pi / 2.0; },
                                       [](double) { return 0.0; });
    CHECK(truth_value_s3(shifted) == doctest::Approx(1.0).epsilon(1e-6));

    CHECK(truth_value(zeros, 3, 1) == truth_value_s3(zeros));
    CHECK(truth_value(zeros, 1, 2) == truth_value_s1_s2(zeros, 1, 2));
}

TEST_CASE("scenario truths match fine quadrature on random spline curves") {
    const auto basis = BsplineBasis::simulation_basis();
    const auto grid = uniform_grid(3001);
    Rng rng(404);
    const auto samples = gen_covariates(1, basis, grid, rng);

    Rng replay(404);
    Eigen::VectorXd c1(basis.n_basis()), c2(basis.n_basis());
    for (int l = 0; l < basis.n_basis(); ++l) c1[l] = replay.normal();
    for (int l = 0; l < basis.n_basis(); ++l) c2[l] = replay.normal();

    auto x1 = [&](double t) { return basis.eval(t).dot(c1); };
    auto x2 = [&](double t) { return basis.eval(t).dot(c2); };

    const double z1 = oracles::simpson([&](double t) { return x1(t) * beta1(t); }, 0.0, 1.0);
    const double z2 = oracles::simpson([&](double t) { return x2(t) * beta2(t); }, 0.0, 1.0);
    CHECK(std::abs(truth_value_s1_s2(samples[0], 1, 1) - (z1 + z2)) < 1e-4);
    CHECK(std::abs(truth_value_s1_s2(samples[0], 2, 2) -
                   link_value(2, 2, z1, z2)) < 1e-4);

    const double s3 = oracles::simpson([&](double t) { return t * std::sin(x1(t)); }, 0.0, 1.0) +
                      oracles::simpson([&](double t) { return t * std::cos(x2(t)); }, 0.0, 1.0);
    CHECK(std::abs(truth_value_s3(samples[0]) - s3) < 1e-4);
}

TEST_CASE("sample_from_coeffs reproduces basis functions") {
    const auto basis = BsplineBasis::simulation_basis();
    const auto grid = uniform_grid(51);
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(23);
    Eigen::VectorXd e5 = zero;
    e5[5] = 1.0;

    auto s = sample_from_coeffs(zero, e5, basis, grid);
    for (double v : s.curve(0).values) CHECK(v == 0.0);
    for (std::size_t k = 0; k < grid.size(); ++k)
        CHECK(s.curve(1).values[k] ==
              doctest::Approx(basis.eval(grid.points()[k])[5]).epsilon(1e-14));

    CHECK_THROWS_AS(sample_from_coeffs(zero.head(5), e5, basis, grid), ConfigError);
}

TEST_CASE("gen_covariates draws subject-major, curve-major") {
    const auto basis = BsplineBasis::simulation_basis();
    const auto grid = uniform_grid(21);
    Rng rng(31);
    const auto samples = gen_covariates(2, basis, grid, rng);
    REQUIRE(samples.size() == 2);
    REQUIRE(samples[0].n_curves() == 2);

    Rng replay(31);
    const Eigen::MatrixXd design = basis.design_matrix(grid);
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
            Eigen::VectorXd c(23);
            for (int l = 0; l < 23; ++l) c[l] = replay.normal();
            const Eigen::VectorXd want = design * c;
            for (std::size_t k = 0; k < grid.size(); ++k)
                CHECK(samples[i].curve(j).values[k] == want[static_cast<Eigen::Index>(k)]);
        }
    }
}

TEST_CASE("pointwise covariate variance matches the analytic value") {
    const auto basis = BsplineBasis::simulation_basis();
    const auto grid = uniform_grid(11);
    Rng rng(2024);
    const std::size_t n = 10000;
    const auto samples = gen_covariates(n, basis, grid, rng);

    for (std::size_t k : {std::size_t{2}, std::size_t{5}, std::size_t{8}}) {
        double mean = 0.0, m2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double x = samples[i].curve(0).values[k];
            mean += x;
            m2 += x * x;
        }
        mean /= static_cast<double>(n);
        const double var = m2 / static_cast<double>(n) - mean * mean;
        const double analytic = basis.eval(grid.points()[k]).squaredNorm();
        CHECK(std::abs(var - analytic) / analytic < 0.05);
    }
}

TEST_CASE("spec validation") {
    ScenarioSpec spec;
    CHECK_NOTHROW(spec.validate());
    for (int c = 1; c <= 4; ++c) {
        spec.scenario = 1;
        spec.link_case = c;
        CHECK_NOTHROW(spec.validate());
    }
    spec.scenario = 1;
    spec.link_case = 5;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    spec.scenario = 2;
    spec.link_case = 3;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    spec.scenario = 3;
    spec.link_case = 2;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    spec.scenario = 4;
    spec.link_case = 1;
    CHECK_THROWS_AS(spec.validate(), ConfigError);

    spec = ScenarioSpec{};
    spec.n_train = 0;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    spec = ScenarioSpec{};
    spec.noise_sd = -0.1;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    spec = ScenarioSpec{};
    spec.grid_size = 1;
    CHECK_THROWS_AS(spec.validate(), ConfigError);

    CHECK_THROWS_AS(uniform_grid(1), ConfigError);
}

TEST_CASE("generate is deterministic and respects the stream order") {
    ScenarioSpec spec;
    spec.scenario = 1;
    spec.link_case = 2;
    spec.n_train = 7;
    spec.n_test = 5;
    spec.grid_size = 31;
    spec.seed = 12345;

    auto a = generate(spec);
    auto b = generate(spec);
    CHECK(a.train.responses() == b.train.responses());
    CHECK(a.test.responses() == b.test.responses());
    CHECK(a.train_truth == b.train_truth);
    for (std::size_t i = 0; i < spec.n_train; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            CHECK(a.train.sample(i).curve(j).values == b.train.sample(i).curve(j).values);

    // Replay the stream: train covariates, train noise, test covariates,
    // test noise, all from one generator.
    const auto basis = BsplineBasis::simulation_basis();
    const auto grid = uniform_grid(spec.grid_size);
    Rng replay(spec.seed);
    auto train_samples = gen_covariates(spec.n_train, basis, grid, replay);
    for (std::size_t i = 0; i < spec.n_train; ++i) {
        const double noise = replay.normal(0.0, spec.noise_sd);
        CHECK(a.train.responses()[i] == a.train_truth[i] + noise);
        CHECK(a.train.sample(i).curve(0).values == train_samples[i].curve(0).values);
    }
    auto test_samples = gen_covariates(spec.n_test, basis, grid, replay);
    for (std::size_t i = 0; i < spec.n_test; ++i) {
        const double noise = replay.normal(0.0, spec.noise_sd);
        CHECK(a.test.responses()[i] == a.test_truth[i] + noise);
        CHECK(a.test.sample(i).curve(1).values == test_samples[i].curve(1).values);
    }

    spec.noise_sd = 0.0;
    auto clean = generate(spec);
    CHECK(clean.train.responses() == clean.train_truth);
    CHECK(clean.test.responses() == clean.test_truth);
}

TEST_CASE("generated noise has the requested variance") {
    ScenarioSpec spec;
    spec.scenario = 1;
    spec.link_case = 1;
    spec.n_train = 5000;
    spec.n_test = 5000;
    spec.grid_size = 11;
    spec.seed = 7;

    auto data = generate(spec);
    double mean = 0.0, m2 = 0.0;
    std::size_t count = 0;
    auto absorb = [&](const FunctionalDataset& ds, const std::vector<double>& truth) {
        for (std::size_t i = 0; i < ds.size(); ++i) {
            const double e = ds.responses()[i] - truth[i];
            mean += e;
            m2 += e * e;
            ++count;
        }
    };
    absorb(data.train, data.train_truth);
    absorb(data.test, data.test_truth);
    mean /= static_cast<double>(count);
    const double var = m2 / static_cast<double>(count) - mean * mean;
    CHECK(std::abs(var - 0.0025) / 0.0025 < 0.05);
}

TEST_CASE("identity-link scenario is linear and easy for a linear kernel") {
    ScenarioSpec spec;
    spec.scenario = 1;
    spec.link_case = 1;
    spec.n_train = 200;
    spec.n_test = 10;
    spec.seed = 99;

    auto data = generate(spec);
    FitConfig cfg;
    cfg.n_components = 2;  // the truth lives in a two-functional span
    auto model = fit(data.train, {KernelFamily::linear, 1.0}, cfg);
    const double train_rase = rase(model.fitted(), responses_vector(data.train));
    CHECK(train_rase <= 3.0 * spec.noise_sd);
}
