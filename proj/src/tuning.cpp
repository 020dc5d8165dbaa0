#include "kfpls/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

#include "kfpls/errors.hpp"
#include "kfpls/parallel.hpp"
#include "kfpls/rng.hpp"

namespace kfpls {

std::vector<int> default_q_grid() { return {1, 2, 3, 4, 5, 6, 7, 8}; }

std::vector<double> default_gamma_grid() {
    std::vector<double> g;
    g.reserve(11);
    for (int k = 0; k <= 10; ++k) g.push_back(std::pow(10.0, -3.0 + 0.5 * k));
    return g;
}

void CvPlan::validate(std::size_t n) const {
    if (n_folds < 2) throw ConfigError("n_folds must be >= 2");
    if (static_cast<std::size_t>(n_folds) > n)
        throw ConfigError("n_folds exceeds the number of samples");
    if (q_grid.empty()) throw ConfigError("q_grid must be nonempty");
    for (int q : q_grid)
        if (q < 1) throw ConfigError("q_grid entries must be >= 1");
    if (gamma_grid.empty()) throw ConfigError("gamma_grid must be nonempty");
    for (double g : gamma_grid) KernelSpec{family, g}.validate();
}

std::vector<std::vector<std::size_t>> make_folds(std::size_t n, int n_folds,
                                                 std::uint64_t seed) {
    if (n_folds < 2) throw ConfigError("n_folds must be >= 2");
    if (static_cast<std::size_t>(n_folds) > n)
        throw ConfigError("n_folds exceeds the number of samples");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    rng.shuffle(order);

    const std::size_t v = static_cast<std::size_t>(n_folds);
    const std::size_t base = n / v;
    const std::size_t extra = n % v;
    std::vector<std::vector<std::size_t>> folds(v);
    std::size_t pos = 0;
    for (std::size_t f = 0; f < v; ++f) {
        const std::size_t len = base + (f < extra ? 1 : 0);
        folds[f].assign(order.begin() + static_cast<std::ptrdiff_t>(pos),
                        order.begin() + static_cast<std::ptrdiff_t>(pos + len));
        pos += len;
    }
    return folds;
}

namespace {

std::vector<std::size_t> complement_of(const std::vector<std::size_t>& fold, std::size_t n) {
    std::vector<char> held(n, 0);
    for (std::size_t i : fold) held.at(i) = 1;
    std::vector<std::size_t> train;
    train.reserve(n - fold.size());
    for (std::size_t i = 0; i < n; ++i)
        if (!held[i]) train.push_back(i);
    return train;
}

double held_out_mse(const Eigen::VectorXd& pred, const Eigen::VectorXd& truth) {
    return (pred - truth).squaredNorm() / static_cast<double>(truth.size());
}

}  // namespace

double cross_validate(const FunctionalDataset& ds, const FitPredictFn& fit_predict,
                      const std::vector<std::vector<std::size_t>>& folds) {
    if (!ds.has_responses()) throw StructuralError("cross-validation requires responses");
    if (folds.empty()) throw ConfigError("fold list is empty");

    double total = 0.0;
    for (const auto& fold : folds) {
        if (fold.empty()) throw ConfigError("empty fold");
        const auto train_idx = complement_of(fold, ds.size());
        FunctionalDataset train = ds.subset(train_idx);
        FunctionalDataset test = ds.subset(fold);
        Eigen::VectorXd pred = fit_predict(train, test);
        if (pred.size() != static_cast<Eigen::Index>(fold.size()))
            throw StructuralError("fit_predict returned the wrong number of predictions");
        total += held_out_mse(pred, responses_vector(test));
    }
    return total / static_cast<double>(folds.size());
}

double cv_score(const FunctionalDataset& ds, const KernelSpec& spec, const FitConfig& cfg,
                const std::vector<std::vector<std::size_t>>& folds) {
    return cross_validate(
        ds,
        [&](const FunctionalDataset& train, const FunctionalDataset& test) {
            KfplsModel model = fit(train, spec, cfg);
            return predict(model, test);
        },
        folds);
}

CvResult grid_search(const FunctionalDataset& ds, const CvPlan& plan) {
    if (!ds.has_responses()) throw StructuralError("grid search requires responses");
    const std::size_t n = ds.size();
    plan.validate(n);
    const int q_max = *std::max_element(plan.q_grid.begin(), plan.q_grid.end());
    const auto folds = make_folds(n, plan.n_folds, plan.seed);
    for (const auto& fold : folds) {
        if (n - fold.size() < 3) throw ConfigError("folds leave fewer than 3 training samples");
        if (static_cast<std::size_t>(q_max) >= n - fold.size())
            throw ConfigError("q_grid maximum is too large for the fold training size");
    }
    const std::size_t n_q = plan.q_grid.size();
    const std::size_t n_g = plan.gamma_grid.size();
    const std::size_t n_v = folds.size();
    const double inf = std::numeric_limits<double>::infinity();

    struct FoldData {
        FunctionalDataset train;
        FunctionalDataset test;
        Eigen::VectorXd y_train;
        Eigen::VectorXd y_test;
        Eigen::MatrixXd train_sq_dists;  // gaussian only
        Eigen::MatrixXd test_sq_dists;   // gaussian only
    };

    std::vector<FoldData> fold_data;
    fold_data.reserve(n_v);
    for (const auto& fold : folds) {
        const auto train_idx = complement_of(fold, n);
        FoldData fd{ds.subset(train_idx), ds.subset(fold), {}, {}, {}, {}};
        fd.y_train = responses_vector(fd.train);
        fd.y_test = responses_vector(fd.test);
        if (plan.family == KernelFamily::gaussian) {
            fd.train_sq_dists = pairwise_sq_dists(fd.train, fd.train);
            fd.test_sq_dists = pairwise_sq_dists(fd.test, fd.train);
        }
        fold_data.push_back(std::move(fd));
    }

    // fold_mse[(v * n_g + g) * n_q + qi]; each (fold, gamma) task owns a
    // disjoint slice.
    std::vector<double> fold_mse(n_v * n_g * n_q, inf);

    parallel_for(n_v * n_g, [&](std::size_t cell) {
        const std::size_t v = cell / n_g;
        const std::size_t gi = cell % n_g;
        const FoldData& fd = fold_data[v];
        const double gamma = plan.gamma_grid[gi];

        GramBundle bundle;
        CrossGram cross;
        if (plan.family == KernelFamily::gaussian) {
            bundle = gram_from_sq_dists(fd.train_sq_dists, gamma);
            cross = cross_gram_from_sq_dists(fd.test_sq_dists, bundle.raw, gamma);
        } else {
            const KernelSpec spec{plan.family, gamma};
            bundle = gram(fd.train, spec);
            cross = cross_gram(fd.test, fd.train, spec, bundle.raw);
        }

        const double y_mean = fd.y_train.mean();
        Eigen::VectorXd y_c = fd.y_train.array() - y_mean;

        FitConfig cfg = plan.fit;
        cfg.n_components = q_max;
        ScoreExtraction scores = extract_scores(bundle.centered, y_c, q_max, cfg);

        for (std::size_t qi = 0; qi < n_q; ++qi) {
            const int q = plan.q_grid[qi];
            if (scores.extracted() < q) continue;  // stays +inf
            Eigen::VectorXd coef;
            try {
                coef = combine_coefficients(scores, bundle.centered, y_c, q, cfg.rcond_min);
            } catch (const NumericError&) {
                continue;
            }
            Eigen::VectorXd pred = (cross.centered * coef).array() + y_mean;
            fold_mse[(v * n_g + gi) * n_q + qi] = held_out_mse(pred, fd.y_test);
        }
    });

    CvResult result;
    result.q_grid = plan.q_grid;
    result.gamma_grid = plan.gamma_grid;
    result.scores.setConstant(static_cast<Eigen::Index>(n_q), static_cast<Eigen::Index>(n_g),
                              inf);

    bool found = false;
    std::size_t best_qi = 0;
    std::size_t best_gi = 0;
    for (std::size_t qi = 0; qi < n_q; ++qi) {
        for (std::size_t gi = 0; gi < n_g; ++gi) {
            double total = 0.0;
            bool ok = true;
            for (std::size_t v = 0; v < n_v; ++v) {
                const double mse = fold_mse[(v * n_g + gi) * n_q + qi];
                if (!std::isfinite(mse)) {
                    ok = false;
                    break;
                }
                total += mse;
            }
            if (!ok) {
                ++result.n_failed_cells;
                continue;
            }
            const double score = total / static_cast<double>(n_v);
            result.scores(static_cast<Eigen::Index>(qi), static_cast<Eigen::Index>(gi)) = score;
            // Row-major scan plus strict < implements the (score, q, gamma)
            // lexicographic tie-break.
            if (!found || score < result.best_score) {
                found = true;
                result.best_score = score;
                best_qi = qi;
                best_gi = gi;
            }
        }
    }
    if (!found)
        throw NumericError("cv_all_failed", "every (q, gamma) cell failed during cross-validation");

    result.best_q = plan.q_grid[best_qi];
    result.best_gamma = plan.gamma_grid[best_gi];
    result.best_per_fold.resize(n_v);
    for (std::size_t v = 0; v < n_v; ++v)
        result.best_per_fold[v] = fold_mse[(v * n_g + best_gi) * n_q + best_qi];
    return result;
}

}  // namespace kfpls
