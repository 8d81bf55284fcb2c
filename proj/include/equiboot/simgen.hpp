#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "equiboot/dataset.hpp"
#include "equiboot/rng.hpp"

namespace equiboot {

enum class ZMode { discrete, continuous };
enum class MeanMode { zero, random };
enum class CovMode { identity, random };

/// Settings for one synthetic dataset: group variable with `num_groups`
/// levels, `p` extra predictors (Bernoulli(0.5) in discrete mode,
/// multivariate normal in continuous mode), labels through the logistic link.
struct SimConfig {
    Eigen::Index n = 50000;
    int p = 20;
    int num_groups = 3;
    ZMode z_mode = ZMode::discrete;
    MeanMode mean_mode = MeanMode::zero;   // continuous mode only
    CovMode cov_mode = CovMode::identity;  // continuous mode only
    std::uint64_t seed = 0;

    void validate() const;
};

/// Ground-truth coefficients used by the label generator.
struct TrueTheta {
    double beta0 = 0.0;
    Eigen::VectorXd beta_a;
    Eigen::VectorXd beta_z;
};

/// The sampling distribution of the non-group predictors, kept so that
/// fresh Z draws (e.g. for Monte Carlo odds ratios) come from the same
/// distribution as the dataset.
struct ZDistribution {
    ZMode mode = ZMode::discrete;
    int p = 0;
    Eigen::VectorXd mean;    // continuous mode
    Eigen::MatrixXd chol_l;  // lower Cholesky factor of the covariance

    Eigen::MatrixXd sample(Eigen::Index rows, Rng& rng) const;
};

// Coefficient draws, in the fixed order beta0, beta_a extras, beta_z.
// For num_groups == 3 the group coefficients are (-0.5, 0.2, 1.0); for
// num_groups == 10 the first three are the same and the remaining seven
// are Unif(-0.1, 0.1). Other sizes get all-random group coefficients.
TrueTheta make_theta(const SimConfig& cfg, Rng& rng);

// Draws the mean (when random) and then the covariance factor (when
// random: Sigma = Phi^T Phi for a standard-normal p x p Phi). A failed
// Cholesky is retried once with 1e-10 jitter on the diagonal.
ZDistribution make_z_distribution(const SimConfig& cfg, Rng& rng);

// Convenience: make_z_distribution followed by an n-row sample.
Eigen::MatrixXd gen_z(const SimConfig& cfg, Rng& rng);

// I.i.d. uniform group assignments over {0, ..., num_groups-1}.
std::vector<int> gen_groups(Eigen::Index n, int num_groups, Rng& rng);

// label_i ~ Bernoulli(sigma(beta0 + beta_a[group_i] + beta_z . z_i)).
std::vector<int> gen_labels(const Eigen::MatrixXd& z, const std::vector<int>& groups,
                            const TrueTheta& theta, Rng& rng);

struct SimData {
    Dataset data;
    TrueTheta theta;
    ZDistribution z_dist;
};

// Full generation pipeline with one RNG stream seeded from cfg.seed,
// consumed in the order: theta, groups, z distribution, z, labels.
// Identical configs produce bit-identical datasets.
SimData simulate_dataset(const SimConfig& cfg);

} // namespace equiboot
