#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "kfpls/kernel.hpp"
#include "kfpls/kpls.hpp"

namespace kfpls {

/// Default search grids: q in 1..8 and gamma log-spaced over
/// 10^-3 .. 10^2 in half-decade steps (11 values).
std::vector<int> default_q_grid();
std::vector<double> default_gamma_grid();

/// V-fold grid search plan. `fit.n_components` is ignored (each cell sets its
/// own q); the remaining fit parameters apply to every cell.
struct CvPlan {
    int n_folds = 5;
    std::uint64_t seed = 0;
    std::vector<int> q_grid = default_q_grid();
    std::vector<double> gamma_grid = default_gamma_grid();
    KernelFamily family = KernelFamily::gaussian;
    FitConfig fit;

    void validate(std::size_t n) const;
};

struct CvResult {
    std::vector<int> q_grid;
    std::vector<double> gamma_grid;
    /// scores(i, j) = CV criterion for (q_grid[i], gamma_grid[j]);
    /// +infinity marks cells where some fold failed numerically.
    Eigen::MatrixXd scores;
    int best_q = 0;
    double best_gamma = 0.0;
    double best_score = 0.0;
    std::vector<double> best_per_fold;  // held-out MSE per fold at the winner
    std::size_t n_failed_cells = 0;
};

/// Partition of 0..n-1 into n_folds shuffled contiguous chunks; the first
/// n % n_folds folds carry one extra index.
std::vector<std::vector<std::size_t>> make_folds(std::size_t n, int n_folds,
                                                 std::uint64_t seed);

/// Generic V-fold criterion: mean over folds of the held-out mean squared
/// error of `fit_predict(train_part, test_part)`. The hook exists so the
/// fold plumbing can be tested against hand-computed stubs.
using FitPredictFn =
    std::function<Eigen::VectorXd(const FunctionalDataset&, const FunctionalDataset&)>;
double cross_validate(const FunctionalDataset& ds, const FitPredictFn& fit_predict,
                      const std::vector<std::vector<std::size_t>>& folds);

/// CV criterion of one (kernel, q) cell, re-fitting from scratch per fold.
/// Reference path for the cached sweep in grid_search.
double cv_score(const FunctionalDataset& ds, const KernelSpec& spec, const FitConfig& cfg,
                const std::vector<std::vector<std::size_t>>& folds);

/// Full sweep over plan.q_grid x plan.gamma_grid. Distances are computed
/// once per fold and shared across gamma; scores for all q come from one
/// extraction at max(q_grid). Cells where any fold fails numerically score
/// +infinity; if every cell fails the search throws. Ties prefer smaller q,
/// then smaller gamma.
CvResult grid_search(const FunctionalDataset& ds, const CvPlan& plan);

}  // namespace kfpls
