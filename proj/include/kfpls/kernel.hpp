#pragma once

#include <Eigen/Core>

#include "kfpls/fdata.hpp"

namespace kfpls {

enum class KernelFamily { gaussian, linear };

const char* to_string(KernelFamily family);
KernelFamily kernel_family_from_string(const std::string& name);

/// Kernel family plus bandwidth. gamma is only meaningful for the gaussian
/// family: K(a, b) = exp(-gamma * ||a - b||^2) over the product-space L2
/// distance. The linear family is the plain sum of coordinate-wise L2 inner
/// products, giving an explicit-feature baseline and test oracle.
struct KernelSpec {
    KernelFamily family = KernelFamily::gaussian;
    double gamma = 1.0;

    void validate() const;
};

/// Raw training Gram K and its double-centered version
/// Kc = (I - 11'/n) K (I - 11'/n).
struct GramBundle {
    Eigen::MatrixXd raw;
    Eigen::MatrixXd centered;
};

/// Test-to-train Gram K0 and its centered version
/// K0c = (K0 - 1_m colmeans(K)') (I - 11'/n): each row first subtracts the
/// column means of the training Gram, then its own mean.
struct CrossGram {
    Eigen::MatrixXd raw;
    Eigen::MatrixXd centered;
};

double kernel_value(const FunctionalSample& a, const FunctionalSample& b,
                    const KernelSpec& spec);

/// Builds the n x n training Gram (n >= 2) and centers it.
GramBundle gram(const FunctionalDataset& train, const KernelSpec& spec);

/// Builds the m x n Gram between new samples and the training set;
/// `train_raw` is the raw (uncentered) training Gram.
CrossGram cross_gram(const FunctionalDataset& new_samples, const FunctionalDataset& train,
                     const KernelSpec& spec, const Eigen::MatrixXd& train_raw);

/// Centering of a test-to-train Gram against the raw training Gram. With
/// raw0 == train_raw this is exactly the double centering of the training
/// Gram, which keeps train fits and predict-on-train bit-identical.
Eigen::MatrixXd center_cross(const Eigen::MatrixXd& raw0, const Eigen::MatrixXd& train_raw);

/// Gaussian Gram from a precomputed squared-distance matrix. Lets tuning
/// sweeps cache distances once per fold and vary gamma cheaply.
GramBundle gram_from_sq_dists(const Eigen::MatrixXd& sq_dists, double gamma);
CrossGram cross_gram_from_sq_dists(const Eigen::MatrixXd& sq_dists0,
                                   const Eigen::MatrixXd& train_raw, double gamma);

}  // namespace kfpls
