#pragma once

#include <cstdint>
#include <exception>

#include <Eigen/Core>

#include "kfpls/kernel.hpp"
#include "kfpls/rng.hpp"

namespace kfpls {

/// Fit parameters for the score iteration.
struct FitConfig {
    int n_components = 1;   // q
    double tol = 1e-8;      // convergence threshold on successive t-change
    int max_iter = 100;
    double rank_tol = 1e-12;   // norm floor under which the Gram counts as deflated away
    double rcond_min = 1e-12;  // reciprocal-condition floor for the q x q solve

    /// The default u-start is y/||y||, which for a scalar response is already
    /// the fixed point of the iteration and makes fits deterministic. The
    /// random start reproduces the classical initialization for comparison
    /// runs.
    bool random_init = false;
    std::uint64_t init_seed = 0;

    void validate(std::size_t n_train) const;
};

struct NipalsScores {
    Eigen::VectorXd t;  // unit-norm X-space score
    Eigen::VectorXd u;  // unit-norm Y-space score
    int iterations = 0;
};

/// One score pair from the working (possibly deflated) Gram and response:
/// alternate t <- K u / ||K u|| and u <- y (y' t) / ||.|| until the change in
/// t (after sign alignment) drops below cfg.tol.
///
/// Throws RankExhaustionError when the deflated Gram annihilates u,
/// DegenerateResponseError when the working response is zero, and
/// NonConvergenceError (carrying the last iterate) after cfg.max_iter sweeps.
NipalsScores nipals_component(const Eigen::MatrixXd& k_work, const Eigen::VectorXd& y_work,
                              const FitConfig& cfg, Rng* init_rng = nullptr);

/// Score extraction across components with deflation. Tolerant: stops early
/// when a component cannot be produced and records why, so sweeps over many
/// q values can reuse one extraction.
struct ScoreExtraction {
    Eigen::MatrixXd t_scores;  // n x extracted
    Eigen::MatrixXd u_scores;  // n x extracted
    std::exception_ptr failure;  // set when extracted < requested

    Eigen::Index extracted() const { return t_scores.cols(); }
};

ScoreExtraction extract_scores(const Eigen::MatrixXd& k_centered,
                               const Eigen::VectorXd& y_centered, int n_components,
                               const FitConfig& cfg);

/// Regression weights for the first q extracted components:
/// coef = U_q (T_q' Kc U_q)^{-1} T_q' y_c, so that fitted = Kc coef.
/// Throws SingularSystemError when the q x q system is ill-conditioned.
Eigen::VectorXd combine_coefficients(const ScoreExtraction& scores,
                                     const Eigen::MatrixXd& k_centered,
                                     const Eigen::VectorXd& y_centered, int n_components,
                                     double rcond_min);

/// Gram-level fit result; the dataset-level model wraps this together with
/// the kernel and the training samples.
struct GramFit {
    Eigen::MatrixXd t_scores;  // n x q
    Eigen::MatrixXd u_scores;  // n x q
    Eigen::VectorXd coef;      // n
    double y_mean = 0.0;
};

GramFit fit_gram(const GramBundle& bundle, const Eigen::VectorXd& y, const FitConfig& cfg);

/// Predictions from a centered cross Gram: K0c coef + y_mean.
Eigen::VectorXd predict_gram(const GramFit& fit, const Eigen::MatrixXd& centered_cross);

/// Fitted model: scores, regression weights, the training Gram (original,
/// un-deflated centered copy) and the training samples needed to evaluate
/// kernels against new data. Immutable after fit; safe for concurrent
/// predict calls.
class KfplsModel {
public:
    KfplsModel(KernelSpec spec, FunctionalDataset train_samples, GramBundle bundle,
               GramFit fit);

    const KernelSpec& kernel() const noexcept { return spec_; }
    const FunctionalDataset& training_samples() const noexcept { return train_; }
    const Eigen::MatrixXd& raw_gram() const noexcept { return bundle_.raw; }
    const Eigen::MatrixXd& centered_gram() const noexcept { return bundle_.centered; }
    const Eigen::MatrixXd& x_scores() const noexcept { return fit_.t_scores; }
    const Eigen::MatrixXd& y_scores() const noexcept { return fit_.u_scores; }
    const Eigen::VectorXd& coefficients() const noexcept { return fit_.coef; }
    double y_mean() const noexcept { return fit_.y_mean; }
    int n_components() const noexcept { return static_cast<int>(fit_.t_scores.cols()); }
    const GramFit& fit_result() const noexcept { return fit_; }

    /// In-sample predictions: Kc coef + y_mean.
    Eigen::VectorXd fitted() const;

private:
    KernelSpec spec_;
    FunctionalDataset train_;
    GramBundle bundle_;
    GramFit fit_;
};

/// Fits on a training set with responses (n >= 3).
KfplsModel fit(const FunctionalDataset& train, const KernelSpec& spec, const FitConfig& cfg);

/// Predicts the scalar response for new samples (structurally identical to
/// the training samples).
Eigen::VectorXd predict(const KfplsModel& model, const FunctionalDataset& new_samples);

}  // namespace kfpls
