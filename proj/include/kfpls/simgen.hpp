#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "kfpls/fdata.hpp"
#include "kfpls/rng.hpp"

namespace kfpls {

/// Clamped B-spline basis over a strictly increasing breakpoint sequence.
/// n_basis = order + (#breakpoints - 2). The default simulation basis is
/// order 4 with 21 equally spaced breakpoints on [0, 1], i.e. 23 functions.
class BsplineBasis {
public:
    BsplineBasis(int order, std::vector<double> breakpoints);

    static BsplineBasis simulation_basis();

    int order() const noexcept { return order_; }
    int n_basis() const noexcept { return n_basis_; }
    const std::vector<double>& knots() const noexcept { return knots_; }
    double domain_min() const noexcept { return knots_.front(); }
    double domain_max() const noexcept { return knots_.back(); }

    /// All n_basis values at t (Cox-de Boor; at most `order` are nonzero).
    Eigen::VectorXd eval(double t) const;

    /// Rows are eval() at each grid point.
    Eigen::MatrixXd design_matrix(const Grid& grid) const;

private:
    int order_;
    int n_basis_;
    std::vector<double> knots_;
};

/// Coefficient functions shared by Scenarios 1 and 2.
double beta1(double t);  // 2 sin(2 pi t)
double beta2(double t);  // 2 cos(2 pi t)

/// Simulation configuration. `scenario` is 1..3; valid cases are 1..4 for
/// Scenario 1, 1..2 for Scenario 2 and only 1 for Scenario 3.
struct ScenarioSpec {
    int scenario = 1;
    int link_case = 1;
    std::size_t n_train = 200;
    std::size_t n_test = 500;
    double noise_sd = 0.05;
    std::size_t grid_size = 101;
    std::uint64_t seed = 0;

    void validate() const;
};

struct GeneratedData {
    FunctionalDataset train;  // responses = truth + noise
    FunctionalDataset test;
    std::vector<double> train_truth;
    std::vector<double> test_truth;
};

/// grid_size equally spaced points on [0, 1].
Grid uniform_grid(std::size_t grid_size);

/// Scenario 1 links: x, x^2, cos(pi x / 2), 10 sin(x)/x (value 10 at x = 0).
double link_value(int scenario, int link_case, double z);
/// Scenario 2 links: Case 1 cos(pi z1/2) + sin(pi z2/2); Case 2
/// cos(pi z1/2) + z2^2.
double link_value(int scenario, int link_case, double z1, double z2);

/// Noise-free response of Scenarios 1/2: trapezoid inner products with
/// beta1/beta2 on the sample's own grids, then the link(s).
double truth_value_s1_s2(const FunctionalSample& sample, int scenario, int link_case);

/// Noise-free response of Scenario 3: int t sin(X1(t)) dt + int t cos(X2(t)) dt.
double truth_value_s3(const FunctionalSample& sample);

/// Dispatch on scenario.
double truth_value(const FunctionalSample& sample, int scenario, int link_case);

/// Two curves from explicit basis coefficients (test hook for zero and
/// one-hot coefficient checks).
FunctionalSample sample_from_coeffs(const Eigen::VectorXd& coeffs1,
                                    const Eigen::VectorXd& coeffs2, const BsplineBasis& basis,
                                    const Grid& grid);

/// n subjects, each with two B-spline curves from independent standard
/// normal coefficients. Draw order per subject: the 23 coefficients of the
/// first curve, then the 23 of the second.
std::vector<FunctionalSample> gen_covariates(std::size_t n, const BsplineBasis& basis,
                                             const Grid& grid, Rng& rng);

/// Full scenario draw, deterministic given spec.seed. Stream order: train
/// covariates, train noise, test covariates, test noise.
GeneratedData generate(const ScenarioSpec& spec);

}  // namespace kfpls
