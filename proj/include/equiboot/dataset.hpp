#pragma once

#include <Eigen/Core>
#include <array>
#include <string>
#include <vector>

namespace equiboot {

/// A labeled, group-annotated predictor matrix. The group variable is kept
/// as an index column (one-hot encoding happens at fit time); all other
/// predictors live in `z`. Rows of `z`, `group` and `label` correspond.
///
/// Instances are treated as immutable after construction and are safe to
/// share across threads.
struct Dataset {
    Eigen::MatrixXd z;                      // n x p non-group predictors
    std::vector<int> group;                 // n group indices in [0, num_groups)
    std::vector<int> label;                 // n binary labels
    std::vector<std::string> feature_names; // p names
    std::vector<std::string> group_names;   // one per group level

    Eigen::Index n_rows() const { return static_cast<Eigen::Index>(group.size()); }
    Eigen::Index n_features() const { return z.cols(); }
    int num_groups() const { return static_cast<int>(group_names.size()); }

    // Throws std::invalid_argument on any structural violation: mismatched
    // row counts, group index out of range, or a label outside {0, 1}.
    void validate() const;
};

/// Row indices of each (group, label) cell, in original row order.
class GroupLabelPartition {
public:
    GroupLabelPartition() = default;
    GroupLabelPartition(int num_groups, std::vector<std::vector<Eigen::Index>> cells)
        : num_groups_(num_groups), cells_(std::move(cells)) {}

    int num_groups() const { return num_groups_; }
    const std::vector<Eigen::Index>& cell(int group, int label) const {
        return cells_[index(group, label)];
    }
    Eigen::Index count(int group, int label) const {
        return static_cast<Eigen::Index>(cell(group, label).size());
    }

private:
    std::size_t index(int group, int label) const {
        return static_cast<std::size_t>(group) * 2 + static_cast<std::size_t>(label);
    }
    int num_groups_ = 0;
    std::vector<std::vector<Eigen::Index>> cells_; // 2 * num_groups entries
};

/// Per-cell train/test/validation row indices. Within each cell the three
/// lists concatenate, in order, to the cell's original index list.
struct TrainTestValSplit {
    int num_groups = 0;
    std::array<double, 3> fractions{0.6, 0.2, 0.2};
    std::vector<std::vector<Eigen::Index>> train; // indexed 2*group + label
    std::vector<std::vector<Eigen::Index>> test;
    std::vector<std::vector<Eigen::Index>> val;

    const std::vector<Eigen::Index>& train_cell(int group, int label) const {
        return train[static_cast<std::size_t>(group) * 2 + label];
    }
    const std::vector<Eigen::Index>& test_cell(int group, int label) const {
        return test[static_cast<std::size_t>(group) * 2 + label];
    }
    const std::vector<Eigen::Index>& val_cell(int group, int label) const {
        return val[static_cast<std::size_t>(group) * 2 + label];
    }
};

// Splits rows by (group, label). Empty cells are recorded with count 0.
GroupLabelPartition partition_by_group_label(const Dataset& data);

// Order-preserving split of every cell: the first floor(f_train*m) indices
// go to train, the next floor(f_test*m) to test, the remainder to val.
// Fractions must be nonnegative and sum to 1 within 1e-12.
TrainTestValSplit sequential_split(const GroupLabelPartition& part,
                                   const std::array<double, 3>& fractions);

// Copies the given rows into a new Dataset (names are shared).
Dataset take_rows(const Dataset& data, const std::vector<Eigen::Index>& rows);

/// Column roles for CSV ingestion. Any column not named here is parsed as a
/// numeric predictor.
struct CsvSchema {
    std::string group_column = "group";
    std::string label_column = "label";
};

// Reads a comma-separated file (first row header, UTF-8). Group levels are
// indexed by order of first appearance. Parse errors report the 1-based
// data row number.
Dataset load_csv(const std::string& path, const CsvSchema& schema = {});

// Writes `group,<features...>,label` with shortest round-trip decimal
// representation for predictors.
void write_csv(const Dataset& data, const std::string& path);

} // namespace equiboot
