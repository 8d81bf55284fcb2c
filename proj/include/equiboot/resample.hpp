#pragma once

#include <cstdint>

#include "equiboot/dataset.hpp"

namespace equiboot {

enum class BootstrapMode { blind, equity };

/// `automatic` samples without replacement when the source cell has at
/// least as many rows as requested, with replacement otherwise; `always`
/// forces replacement.
enum class ReplacementPolicy { automatic, always };

struct BootstrapSpec {
    BootstrapMode mode = BootstrapMode::equity;
    Eigen::Index m_per_cell = 0; // equity mode: M rows per (group, label) cell
    Eigen::Index n_pos = 0;      // blind mode: positive rows drawn
    Eigen::Index n_neg = 0;      // blind mode: negative rows drawn
    ReplacementPolicy replacement = ReplacementPolicy::automatic;
    std::uint64_t seed = 0;
};

// Class-balanced resampling that ignores the group column: n_pos rows drawn
// with replacement from the pooled positive training cells, n_neg rows drawn
// per the replacement policy from the pooled negative cells. Output rows are
// positives first, then negatives.
Dataset blind_bootstrap(const TrainTestValSplit& split, const Dataset& data,
                        const BootstrapSpec& spec);

// Draws exactly m_per_cell rows from every (group, label) training cell, so
// the output has 2 * num_groups * M rows, concatenated cell by cell in
// (group, label) order. Cells smaller than M are sampled with replacement;
// an empty cell is an error naming the (group, label) pair.
Dataset equity_bootstrap(const TrainTestValSplit& split, const Dataset& data,
                         const BootstrapSpec& spec);

} // namespace equiboot
