#pragma once

#include <Eigen/Core>
#include <functional>
#include <string>

#include "equiboot/dataset.hpp"
#include "equiboot/glm.hpp"
#include "equiboot/rng.hpp"

namespace equiboot {

enum class OrEstimator { EOR, LOR, MCLOR, INTADJ };

/// Pairwise odds ratios between groups. values[j][k] is the odds of Y=1 in
/// group j relative to group k; the diagonal is 1 by definition. Entries
/// that cannot be formed (a group with no positives or no negatives in the
/// counting estimate) are NaN and excluded from the mean absolute
/// deviation.
struct OddsRatioMatrix {
    Eigen::MatrixXd values;
    OrEstimator estimator = OrEstimator::EOR;
    double mad_from_one = 0.0;
    bool diagonal_included = false; // convention used for mad_from_one
    int num_undefined = 0;          // NaN off-diagonal entries

    int num_groups() const { return static_cast<int>(values.rows()); }
};

// Mean of |rho - 1| over the off-diagonal entries (include_diagonal=false)
// or over all entries. NaN entries are skipped; their count is written to
// undefined_count when provided.
double mad_from_one(const Eigen::MatrixXd& values, bool include_diagonal = false,
                    int* undefined_count = nullptr);

// Counting estimate from cell counts: rho_{j,k} = (n_j^1/n_j^0)/(n_k^1/n_k^0).
OddsRatioMatrix empirical_or(const std::vector<int>& labels, const std::vector<int>& groups,
                             int num_groups, bool mad_diagonal = false);

// Conditional-on-Z odds ratios of a fitted model:
// exp((beta_j + offset_j) - (beta_k + offset_k)).
OddsRatioMatrix conditional_lor(const LogisticModel& model, bool mad_diagonal = false);

// Monte Carlo estimate of P(Y=1 | A = group) under the model, averaging the
// predicted probability over the given z samples.
double mc_group_prob(const LogisticModel& model, int group, const Eigen::MatrixXd& z_samples);

// Odds ratios built from mc_group_prob values. The same z sample set is
// shared across all groups (common random numbers).
OddsRatioMatrix mc_lor(const LogisticModel& model, const Eigen::MatrixXd& z_samples,
                       bool mad_diagonal = false);

using ZSampler = std::function<Eigen::MatrixXd(Eigen::Index rows, Rng& rng)>;

// Draws nu shared samples from the sampler, then delegates.
OddsRatioMatrix mc_lor(const LogisticModel& model, const ZSampler& sampler, Eigen::Index nu,
                       Rng& rng, bool mad_diagonal = false);

// MCLOR for data whose Z distribution is only known empirically: each
// group's probability integrates over nu rows resampled from that group's
// own Z rows.
OddsRatioMatrix mc_lor_empirical(const LogisticModel& model, const Dataset& data,
                                 Eigen::Index nu, Rng& rng, bool mad_diagonal = false);

// Copy of the model with group_offsets[j] = log(zeta_{1,j} / zeta_{0,j}),
// where zeta_{y,j} is the fraction of group j carrying label 1-y in the
// reference data. beta_a and beta_z are untouched. Errors if some group
// lacks rows of either label.
LogisticModel intercept_adjust(const LogisticModel& model, const Dataset& reference);

// The threshold that makes {beta0, tau_new} classify identically to
// {beta0_new, tau}: tau_new = (exp(beta0_new - beta0) * (1-tau)/tau + 1)^-1.
double threshold_equiv(double beta0, double beta0_new, double tau);

// CSV with a header row of group names and a trailing mad_from_one line.
std::string or_matrix_to_csv(const OddsRatioMatrix& matrix,
                             const std::vector<std::string>& group_names);

} // namespace equiboot
