#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace equiboot {

/// Per-group sensitivity and specificity plus their ranges. A group with no
/// positives (respectively negatives) has sens (spec) set to NaN and is
/// excluded from the range.
struct GroupMetrics {
    Eigen::VectorXd sens;       // NaN where the group has no positives
    Eigen::VectorXd spec;       // NaN where the group has no negatives
    Eigen::VectorXi pos_count;  // per-group positive count (sens denominator)
    Eigen::VectorXi neg_count;  // per-group negative count (spec denominator)
    double sens_range = 0.0;    // max - min over defined groups
    double spec_range = 0.0;

    int num_groups() const { return static_cast<int>(sens.size()); }
};

GroupMetrics group_sens_spec(const std::vector<int>& pred, const std::vector<int>& truth,
                             const std::vector<int>& groups, int num_groups);

// max(sens_range, spec_range); zero iff the empirical equal odds criterion
// holds exactly. A range with no defined groups is ignored.
double equal_odds_gap(const GroupMetrics& metrics);

// Smallest threshold from the set of observed negative-row scores whose
// specificity (fraction of negatives scored strictly below it) reaches
// target_spec; if no observed score reaches it, the value just above the
// largest score. Requires at least one negative row.
double calibrate_threshold(const std::vector<double>& scores, const std::vector<int>& labels,
                           double target_spec);

// calibrate_threshold restricted to each group's rows. Errors if some group
// has no negatives.
std::vector<double> group_thresholds(const std::vector<double>& scores,
                                     const std::vector<int>& labels,
                                     const std::vector<int>& groups, int num_groups,
                                     const std::vector<double>& target_specs);

// CSV report: rows = groups, columns = sens/spec/counts, one trailing range
// row.
std::string metrics_to_csv(const GroupMetrics& metrics,
                           const std::vector<std::string>& group_names);

// Aligned-text table (groups as columns, Range last).
std::string metrics_to_text(const GroupMetrics& metrics,
                            const std::vector<std::string>& group_names);

} // namespace equiboot
